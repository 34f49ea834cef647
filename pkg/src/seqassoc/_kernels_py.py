"""Pure-Python window counting; reference for the compiled ``_kernels``.

Both implementations expose the same function with the same contract, see
:func:`count_chunk`.
"""
from collections import Counter

MAX_SUPPORTED_LENGTH = 8


def count_chunk(lex, pos, starts, max_length, min_count):
    """Count every window of length 2..max_length inside one chunk.

    ``lex[k]`` / ``pos[k]`` are the unit ids available at token ``k`` (-1 when
    the lexical unit was dropped or the token is untagged). ``starts`` holds
    document offsets, ``len(starts) == n_docs + 1``; windows never cross a
    document boundary.

    Every combination of available slot realizations is counted. End-point
    pairs ``(first, last, length)`` are counted for lengths >= 3 whatever the
    interior slots hold. Entries with count < ``min_count`` are dropped.

    Returns ``(seq_counts, endpoint_counts)``: dicts keyed by id tuples and
    ``(left, right, length)`` triples.
    """
    if not 2 <= max_length <= MAX_SUPPORTED_LENGTH:
        raise ValueError(f"max_length must be in [2, {MAX_SUPPORTED_LENGTH}]")
    lex = [int(u) for u in lex]
    pos = [int(u) for u in pos]
    starts = [int(s) for s in starts]
    opts = [tuple(u for u in (lx, ps) if u >= 0) for lx, ps in zip(lex, pos)]

    seqs = Counter()
    ends = Counter()
    for d in range(len(starts) - 1):
        lo, hi = starts[d], starts[d + 1]
        for i in range(lo, hi):
            first = opts[i]
            if not first:
                continue
            partial = [(u,) for u in first]
            for length in range(2, max_length + 1):
                j = i + length - 1
                if j >= hi:
                    break
                nxt = opts[j]
                if length >= 3:
                    for y in nxt:
                        for x in first:
                            ends[x, y, length] += 1
                if partial:
                    partial = [p + (u,) for p in partial for u in nxt]
                    seqs.update(partial)

    if min_count > 1:
        seqs = {k: v for k, v in seqs.items() if v >= min_count}
        ends = {k: v for k, v in ends.items() if v >= min_count}
    return dict(seqs), dict(ends)
