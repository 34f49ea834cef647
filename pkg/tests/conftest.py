import os
import random
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from seqassoc import ingest  # noqa: E402
from seqassoc.index import Thresholds, build_index  # noqa: E402

HAND_CORPUS = "a b c a b c a b d"


def random_corpus(seed, max_tokens=10_000, tagged=None):
    """Documents as lists of ``(surface, tag_or_None)`` over a small alphabet.

    Unigram draws are skewed and some bigrams are planted so that the
    association measures see a mix of strong and weak links.
    """
    rng = random.Random(seed)
    alphabet = [f"w{i}" for i in range(rng.randint(3, 20))]
    tags = ["N", "V", "D", "A"]
    tag_of = {w: rng.choice(tags) for w in alphabet}
    if tagged is None:
        tagged = seed % 2 == 0
    weights = [1.0 / (i + 1) for i in range(len(alphabet))]
    follow = {w: rng.choice(alphabet) for w in alphabet}
    total = rng.randint(max_tokens // 4, max_tokens)
    docs = []
    n = 0
    while n < total:
        length = min(rng.randint(0, 40), total - n)
        doc = []
        prev = None
        for _ in range(length):
            if prev is not None and rng.random() < 0.35:
                w = follow[prev]
            else:
                w = rng.choices(alphabet, weights)[0]
            tag = None
            if tagged:
                tag = tag_of[w] if rng.random() < 0.9 else rng.choice(tags)
            doc.append((w, tag))
            prev = w
        docs.append(doc)
        n += length
    return docs


def to_documents(docs):
    return [ingest.Document(i, [ingest.Token(s, t) for s, t in d]) for i, d in enumerate(docs)]


def index_of(docs, thresholds=Thresholds(1, 1, 500), max_length=5, threads=1):
    documents = to_documents(docs)
    return build_index(lambda: iter(documents), thresholds, max_length, threads)


def unit_tuple(index, key):
    return tuple((index.units[u].kind, index.units[u].text) for u in key)


@pytest.fixture
def hand_index():
    docs = ingest.read_text(HAND_CORPUS)
    return build_index(lambda: iter(docs), Thresholds(1, 1, 500), 5)


# -- acceptance reporting ---------------------------------------------------
#
# Tests marked ``@pytest.mark.criterion("name")`` are grouped; after the run
# one PASS/FAIL line per criterion is printed (a criterion passes only if
# every test carrying it passed).

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion this test checks")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    name = marker.args[0]
    ok = _CRITERIA.setdefault(name, [True, 0])
    if report.when == "call" or report.failed or report.skipped:
        if report.failed or report.skipped:
            ok[0] = False
        if report.when == "call":
            ok[1] += 1


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, n) in _CRITERIA.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  ({n} checks)")
