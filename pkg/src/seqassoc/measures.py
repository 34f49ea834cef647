"""Multi-unit association measures over neighbouring pairs.

Every sequence gets an 18-value vector:

==========  =====================================================
sum, mean   sum / mean of pairwise values over neighbouring pairs
min         weakest neighbouring pair
rb, re      sum over the sequence minus the sum over the sequence
            without its first (rb) or last (re) unit
db, de      pairwise value of first unit | rest (db) and of
            rest | last unit (de), the rest taken as one span
e           pairwise value of the two end-points at this length
cs          sum over pairs of (LR - RL)
cc          number of pairs in the minority dominance direction
==========  =====================================================

The first seven come in an LR and an RL variant. rb/re/db/de/e need at least
three units; two-unit sequences report 0 for them.

Reduced measures telescope: removing an end-point removes exactly one
neighbouring pair, so rb equals the first pair's value and re the last
pair's. They are computed in that closed form, which keeps the identity exact
in floating point.
"""
from __future__ import annotations

from dataclasses import dataclass, fields
from typing import NamedTuple

import numpy as np

from .errors import CountError, SequenceNotFound
from .index import CorpusIndex
from .pairwise import base_measure, contingency

DIRECTIONS = ("lr", "rl")
WEIGHT_LEVELS = ("sequence", "pair")

MEASURES = (
    "sum_lr", "sum_rl", "mean_lr", "mean_rl", "min_lr", "min_rl",
    "rb_lr", "rb_rl", "re_lr", "re_rl", "db_lr", "db_rl", "de_lr", "de_rl",
    "e_lr", "e_rl", "cs", "cc",
)
DIRECTIONAL = ("sum", "mean", "min", "rb", "re", "db", "de", "e")
LONG_ONLY = frozenset({"rb", "re", "db", "de", "e"})


def defined_for(measure: str, length: int) -> bool:
    """Whether ``measure`` (with or without direction suffix) is defined at ``length``."""
    return length >= 3 or measure.split("_")[0] not in LONG_ONLY


@dataclass(frozen=True)
class ScoreConfig:
    base: str = "deltap"
    weighted: bool = False
    weight_level: str = "sequence"

    def __post_init__(self):
        base_measure(self.base)
        if self.weight_level not in WEIGHT_LEVELS:
            raise ValueError(f"weight_level must be one of {WEIGHT_LEVELS}")


DEFAULT_CONFIG = ScoreConfig()


@dataclass(frozen=True)
class AssociationVector:
    sum_lr: float
    sum_rl: float
    mean_lr: float
    mean_rl: float
    min_lr: float
    min_rl: float
    rb_lr: float
    rb_rl: float
    re_lr: float
    re_rl: float
    db_lr: float
    db_rl: float
    de_lr: float
    de_rl: float
    e_lr: float
    e_rl: float
    cs: float
    cc: int
    # a pair or span needed by the measures was missing from the index
    pruned: bool = False

    def values(self) -> tuple:
        return tuple(getattr(self, m) for m in MEASURES)

    def as_dict(self) -> dict:
        return {m: getattr(self, m) for m in MEASURES}

    def get(self, measure: str, direction: str | None = None):
        return getattr(self, f"{measure}_{direction}" if direction else measure)


assert tuple(f.name for f in fields(AssociationVector))[:18] == MEASURES


class PairValue(NamedTuple):
    lr: float
    rl: float
    freq: int = 0
    missing: bool = False


class IndexSource:
    """Pairwise values computed from index counts.

    ``pair(left, right)`` treats both arguments as spans (tuples of unit ids):
    the joint count is the count of their concatenation, each marginal is the
    span's own count, and N stays the corpus token count.
    """

    def __init__(self, index: CorpusIndex, base: str = "deltap"):
        self.index = index
        self.base = base
        self._measure = base_measure(base)
        self._cache = {}

    def _value(self, fx, fy, fxy, missing):
        # lexical and POS units may share tokens, so marginals can overrun N
        n = max(self.index.N, fx + fy - fxy)
        lr, rl = self._measure(contingency(fx, fy, fxy, n))
        return PairValue(lr, rl, fxy, missing)

    def pair(self, left, right) -> PairValue:
        key = (left, right)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        idx = self.index
        joint = left + right
        fxy = idx.seq_freq.get(joint, 0)
        fx = idx.freq(left)
        fy = idx.freq(right)
        missing = fxy == 0 or fx == 0 or fy == 0
        value = self._value(fx, fy, fxy, missing)
        self._cache[key] = value
        return value

    def endpoint(self, x, y, length) -> PairValue:
        idx = self.index
        fxy = idx.endpoint_freq.get((x, y, length), 0)
        if fxy == 0:
            return PairValue(0.0, 0.0, 0, False)
        fx, fy = idx.unit_freq[x], idx.unit_freq[y]
        return self._value(fx, fy, fxy, False)

    def freq(self, seq) -> int:
        return self.index.freq(seq)

    def check(self, seq):
        if tuple(seq) not in self.index.seq_freq:
            raise SequenceNotFound(f"sequence {seq!r} is not in the index")


def _as_span(part):
    if isinstance(part, tuple):
        return part
    if isinstance(part, str):
        return tuple(part.split())
    return (part,)


def _stub_value(v):
    lr, rl, *rest = v
    return PairValue(float(lr), float(rl), int(rest[0]) if rest else 0)


class StubSource:
    """Injected pairwise values, no counts required.

    ``pairs`` maps ``(left, right)`` to ``(lr, rl)`` or ``(lr, rl, freq)``;
    each side is a unit, a tuple of units or a space-separated string, so
    ``("the", "european union budget")`` is the span pair the|european union
    budget. ``endpoints`` maps ``(first, last)`` likewise. Absent pairs read as
    0 and mark the vector as pruned; absent end-points read as 0.
    """

    def __init__(self, pairs, endpoints=None, freqs=None):
        self.pairs = {(_as_span(l), _as_span(r)): _stub_value(v) for (l, r), v in pairs.items()}
        self.endpoints = {(l, r): _stub_value(v) for (l, r), v in (endpoints or {}).items()}
        self.freqs = {_as_span(k): v for k, v in (freqs or {}).items()}

    def pair(self, left, right) -> PairValue:
        return self.pairs.get((tuple(left), tuple(right)), PairValue(0.0, 0.0, 0, True))

    def endpoint(self, x, y, length) -> PairValue:
        return self.endpoints.get((x, y), PairValue(0.0, 0.0, 0, False))

    def freq(self, seq) -> int:
        return self.freqs.get(tuple(seq), 0)

    def check(self, seq):
        pass


def as_source(source, config: ScoreConfig = DEFAULT_CONFIG):
    if isinstance(source, CorpusIndex):
        return IndexSource(source, config.base)
    return source


class Scorer:
    """Computes measures for sequences against one source under one config."""

    def __init__(self, source, config: ScoreConfig = DEFAULT_CONFIG):
        self.config = config
        self.source = as_source(source, config)

    def _raw_pairs(self, seq):
        return [self.source.pair((seq[k],), (seq[k + 1],)) for k in range(len(seq) - 1)]

    def _w_pair(self, v: PairValue) -> PairValue:
        cfg = self.config
        if cfg.weighted and cfg.weight_level == "pair":
            return PairValue(v.lr * v.freq, v.rl * v.freq, v.freq, v.missing)
        return v

    def _w_seq(self, value: float, seq) -> float:
        cfg = self.config
        if cfg.weighted and cfg.weight_level == "sequence":
            return value * self.source.freq(seq)
        return value

    def pair_values(self, seq, direction):
        return [getattr(self._w_pair(v), direction) for v in self._raw_pairs(seq)]

    def sum(self, seq, direction):
        return self._w_seq(sum(self.pair_values(seq, direction)), seq)

    def mean(self, seq, direction):
        vals = self.pair_values(seq, direction)
        return self._w_seq(sum(vals) / len(vals), seq)

    def min(self, seq, direction):
        return self._w_seq(min(self.pair_values(seq, direction)), seq)

    def reduced_begin(self, seq, direction):
        if len(seq) < 3:
            return 0.0
        return self._w_seq(self.pair_values(seq, direction)[0], seq)

    def reduced_end(self, seq, direction):
        if len(seq) < 3:
            return 0.0
        return self._w_seq(self.pair_values(seq, direction)[-1], seq)

    def divided_begin(self, seq, direction):
        if len(seq) < 3:
            return 0.0
        v = self._w_pair(self.source.pair(tuple(seq[:1]), tuple(seq[1:])))
        return self._w_seq(getattr(v, direction), seq)

    def divided_end(self, seq, direction):
        if len(seq) < 3:
            return 0.0
        v = self._w_pair(self.source.pair(tuple(seq[:-1]), tuple(seq[-1:])))
        return self._w_seq(getattr(v, direction), seq)

    def endpoint(self, seq, direction):
        if len(seq) < 3:
            return 0.0
        v = self._w_pair(self.source.endpoint(seq[0], seq[-1], len(seq)))
        return self._w_seq(getattr(v, direction), seq)

    def changed_scalar(self, seq):
        raw = self._raw_pairs(seq)
        # the summed P_D column, arranged so that cs == sum_lr - sum_rl exactly
        return sum(v.lr for v in raw) - sum(v.rl for v in raw)

    def changed_categorical(self, seq):
        diffs = [v.lr - v.rl for v in self._raw_pairs(seq)]
        return min(sum(1 for d in diffs if d > 0), sum(1 for d in diffs if d < 0))

    def score(self, seq) -> AssociationVector:
        seq = tuple(seq)
        if len(seq) < 2:
            raise ValueError("sequences need at least two units")
        self.source.check(seq)
        raw = self._raw_pairs(seq)
        pairs = [self._w_pair(v) for v in raw]
        n = len(pairs)
        pruned = any(v.missing for v in raw)
        out = {}
        for d in DIRECTIONS:
            vals = [getattr(v, d) for v in pairs]
            s = sum(vals)
            out[f"sum_{d}"] = s
            out[f"mean_{d}"] = s / n
            out[f"min_{d}"] = min(vals)
            out[f"rb_{d}"] = vals[0] if n >= 2 else 0.0
            out[f"re_{d}"] = vals[-1] if n >= 2 else 0.0
        if n >= 2:
            db = self.source.pair(seq[:1], seq[1:])
            de = self.source.pair(seq[:-1], seq[-1:])
            e = self.source.endpoint(seq[0], seq[-1], len(seq))
            pruned = pruned or db.missing or de.missing
            db, de, e = self._w_pair(db), self._w_pair(de), self._w_pair(e)
        else:
            db = de = e = PairValue(0.0, 0.0)
        for d in DIRECTIONS:
            out[f"db_{d}"] = getattr(db, d)
            out[f"de_{d}"] = getattr(de, d)
            out[f"e_{d}"] = getattr(e, d)
        if self.config.weighted and self.config.weight_level == "sequence":
            f = self.source.freq(seq)
            out = {k: v * f for k, v in out.items()}
        diffs = [v.lr - v.rl for v in raw]
        out["cs"] = sum(v.lr for v in raw) - sum(v.rl for v in raw)
        out["cc"] = min(sum(1 for x in diffs if x > 0), sum(1 for x in diffs if x < 0))
        return AssociationVector(**out, pruned=pruned)

    def explain(self, seq):
        """Per-pair breakdown: rows of ``(label, lr, rl, p_d)``; p_d is None
        for rows that are not neighbouring pairs."""
        seq = tuple(seq)
        render = getattr(self.source, "index", None)
        name = (lambda s: render.render(s)) if render is not None else (lambda s: " ".join(map(str, s)))
        rows = []
        for k, v in enumerate(self._raw_pairs(seq)):
            rows.append((name(seq[k:k + 2]), v.lr, v.rl, v.lr - v.rl))
        if len(seq) >= 3:
            e = self.source.endpoint(seq[0], seq[-1], len(seq))
            rows.append((f"{name(seq[:1])} ... {name(seq[-1:])}", e.lr, e.rl, None))
            for sub in (seq[:-1], seq[1:]):
                vals = self._raw_pairs(sub)
                rows.append((name(sub), sum(v.lr for v in vals), sum(v.rl for v in vals), None))
            db = self.source.pair(seq[:1], seq[1:])
            de = self.source.pair(seq[:-1], seq[-1:])
            rows.append((f"{name(seq[:1])} | {name(seq[1:])}", db.lr, db.rl, None))
            rows.append((f"{name(seq[:-1])} | {name(seq[-1:])}", de.lr, de.rl, None))
        return rows


def _scorer(source, config):
    return Scorer(source, config or DEFAULT_CONFIG)


def sum_dp(seq, source, direction, config=None):
    return _scorer(source, config).sum(tuple(seq), direction)


def mean_dp(seq, source, direction, config=None):
    return _scorer(source, config).mean(tuple(seq), direction)


def min_dp(seq, source, direction, config=None):
    return _scorer(source, config).min(tuple(seq), direction)


def reduced_begin(seq, source, direction, config=None):
    return _scorer(source, config).reduced_begin(tuple(seq), direction)


def reduced_end(seq, source, direction, config=None):
    return _scorer(source, config).reduced_end(tuple(seq), direction)


def divided_begin(seq, source, direction, config=None):
    return _scorer(source, config).divided_begin(tuple(seq), direction)


def divided_end(seq, source, direction, config=None):
    return _scorer(source, config).divided_end(tuple(seq), direction)


def endpoint_dp(seq, source, direction, config=None):
    return _scorer(source, config).endpoint(tuple(seq), direction)


def changed_scalar(seq, source, config=None):
    return _scorer(source, config).changed_scalar(tuple(seq))


def changed_categorical(seq, source, config=None):
    return _scorer(source, config).changed_categorical(tuple(seq))


def score_sequence(seq, source, config: ScoreConfig | None = None) -> AssociationVector:
    return _scorer(source, config).score(seq)


class ScoredSequence(NamedTuple):
    key: tuple
    text: str
    mask: str
    freq: int
    vector: AssociationVector

    @property
    def length(self):
        return len(self.mask)


def _safe_div(num, den):
    out = np.zeros(len(num))
    np.divide(num, den, out=out, where=den != 0)
    return out


def _directional_batch(fx, fy, fxy, n_tokens, base):
    """Array form of :meth:`IndexSource._value` (same operations, same order)."""
    if np.any(fxy > np.minimum(fx, fy)):
        raise CountError("joint count exceeds a marginal")
    n = np.maximum(n_tokens, fx + fy - fxy)
    a = fxy
    b = fx - a
    c = fy - a
    d = n - a - b - c
    lr = _safe_div(a, a + c)
    rl = _safe_div(a, a + b)
    if base == "deltap":
        lr = lr - _safe_div(b, b + d)
        rl = rl - _safe_div(c, c + d)
    return lr, rl


def _score_group(index: CorpusIndex, config: ScoreConfig, keys: list, length: int) -> list:
    seq_freq = index.seq_freq
    unit_freq = np.asarray(index.unit_freq, dtype=np.int64)
    ids = np.asarray(keys, dtype=np.int64).reshape(len(keys), length)
    f_seq = np.fromiter((seq_freq[k] for k in keys), np.int64, len(keys))
    pair_w = config.weighted and config.weight_level == "pair"

    def directional(fx, fy, fxy):
        return _directional_batch(fx, fy, fxy, index.N, config.base)

    raw, weighted_pairs = [], []
    pruned = np.zeros(len(keys), dtype=bool)
    for j in range(length - 1):
        fxy = np.fromiter((seq_freq.get(k[j:j + 2], 0) for k in keys), np.int64, len(keys))
        fx, fy = unit_freq[ids[:, j]], unit_freq[ids[:, j + 1]]
        lr, rl = directional(fx, fy, fxy)
        pruned |= (fxy == 0) | (fx == 0) | (fy == 0)
        raw.append((lr, rl))
        weighted_pairs.append((lr * fxy, rl * fxy) if pair_w else (lr, rl))

    cols = {}
    zeros = np.zeros(len(keys))
    for di, d in enumerate(DIRECTIONS):
        total = weighted_pairs[0][di]
        low = weighted_pairs[0][di]
        for vals in weighted_pairs[1:]:
            total = total + vals[di]
            low = np.minimum(low, vals[di])
        cols[f"sum_{d}"] = total
        cols[f"mean_{d}"] = total / (length - 1)
        cols[f"min_{d}"] = low
        long_seq = length >= 3
        cols[f"rb_{d}"] = weighted_pairs[0][di] if long_seq else zeros
        cols[f"re_{d}"] = weighted_pairs[-1][di] if long_seq else zeros

    if length >= 3:
        first, last = unit_freq[ids[:, 0]], unit_freq[ids[:, -1]]
        f_suffix = np.fromiter((seq_freq.get(k[1:], 0) for k in keys), np.int64, len(keys))
        f_prefix = np.fromiter((seq_freq.get(k[:-1], 0) for k in keys), np.int64, len(keys))
        ends = index.endpoint_freq
        f_end = np.fromiter((ends.get((k[0], k[-1], length), 0) for k in keys), np.int64, len(keys))
        db = directional(first, f_suffix, f_seq)
        de = directional(f_prefix, last, f_seq)
        pruned |= (f_suffix == 0) | (f_prefix == 0) | (first == 0) | (last == 0)
        # end-points never seen together at this length contribute exactly 0
        seen = f_end > 0
        e = tuple(np.where(seen, v, 0.0) for v in directional(first, last, np.where(seen, f_end, 0)))
        if pair_w:
            db = tuple(v * f_seq for v in db)
            de = tuple(v * f_seq for v in de)
            e = tuple(v * f_end for v in e)
    else:
        db = de = e = (zeros, zeros)
    for di, d in enumerate(DIRECTIONS):
        cols[f"db_{d}"] = db[di]
        cols[f"de_{d}"] = de[di]
        cols[f"e_{d}"] = e[di]

    if config.weighted and config.weight_level == "sequence":
        cols = {k: v * f_seq for k, v in cols.items()}
    raw_lr, raw_rl = raw[0]
    for lr, rl in raw[1:]:
        raw_lr = raw_lr + lr
        raw_rl = raw_rl + rl
    cs = raw_lr - raw_rl
    diffs = [lr - rl for lr, rl in raw]
    positive = sum((x > 0).astype(np.int64) for x in diffs)
    negative = sum((x < 0).astype(np.int64) for x in diffs)
    cols["cs"] = cs
    cols["cc"] = np.minimum(positive, negative)

    columns = [cols[m].tolist() for m in MEASURES]
    flags = pruned.tolist()
    return [AssociationVector(*row, pruned=flag) for *row, flag in zip(*columns, flags)]


def score_batch(index: CorpusIndex, keys, config: ScoreConfig | None = None) -> list[AssociationVector]:
    """Vectors for many stored sequences at once.

    Equal to calling :meth:`Scorer.score` on each key, computed length group
    by length group with array arithmetic.
    """
    config = config or DEFAULT_CONFIG
    keys = [tuple(k) for k in keys]
    out = [None] * len(keys)
    groups = {}
    for pos, k in enumerate(keys):
        if k not in index.seq_freq:
            raise SequenceNotFound(f"sequence {k!r} is not in the index")
        groups.setdefault(len(k), []).append(pos)
    for length, positions in groups.items():
        if length < 2:
            raise ValueError("sequences need at least two units")
        vecs = _score_group(index, config, [keys[p] for p in positions], length)
        for p, v in zip(positions, vecs):
            out[p] = v
    return out


def score_index(index: CorpusIndex, config: ScoreConfig | None = None) -> list[ScoredSequence]:
    """Score every stored sequence, in :meth:`CorpusIndex.sequences` order."""
    keys = index.sequences()
    vectors = score_batch(index, keys, config)
    return [
        ScoredSequence(k, index.render(k), index.mask(k), index.seq_freq[k], v)
        for k, v in zip(keys, vectors)
    ]
