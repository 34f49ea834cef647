"""Multi-unit directional association measures built on pairwise Delta P.

Typical use::

    from seqassoc import ingest, index, measures

    docs = lambda: ingest.read_plain(open("corpus.txt", "rb"))
    idx = index.build_index(docs, index.Thresholds(50, 10, 500))
    vec = measures.score_sequence(idx.sequences()[0], idx)
"""

__version__ = "0.1.0"
