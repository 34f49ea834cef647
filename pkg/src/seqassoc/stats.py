"""Rank correlations, distribution descriptors and threshold sweeps."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .index import DEFAULT_MAX_LENGTH, Thresholds, build_index
from .measures import MEASURES, ScoredSequence, defined_for

# row/column order of the measure correlation table
CORRELATION_ORDER = ("sum", "mean", "min", "e", "rb", "re", "db", "de")
CLASSES = ("lexical", "syntactic", "mixed", "all")


def average_ranks(values) -> np.ndarray:
    """1-based ranks, ties sharing the mean of the ranks they span."""
    x = np.asarray(values, dtype=float)
    order = np.argsort(x, kind="mergesort")
    sx = x[order]
    ranks = np.empty(len(x))
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and sx[j + 1] == sx[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Spearman's rho with average ranks for ties.

    Returns NaN when either side has no rank variance.
    """
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    if len(xs) < 2:
        raise ValueError("need at least two observations")
    rx = average_ranks(xs)
    ry = average_ranks(ys)
    rx -= rx.mean()
    ry -= ry.mean()
    den = math.sqrt(float(rx @ rx) * float(ry @ ry))
    if den == 0:
        return math.nan
    return max(-1.0, min(1.0, float(rx @ ry) / den))


@dataclass
class CorrelationMatrix:
    """LR correlations below the diagonal, RL above; the diagonal is NaN."""

    measures: tuple
    values: np.ndarray
    n: np.ndarray

    def lr(self, a: str, b: str) -> float:
        i, j = self.measures.index(a), self.measures.index(b)
        return self.values[max(i, j), min(i, j)]

    def rl(self, a: str, b: str) -> float:
        i, j = self.measures.index(a), self.measures.index(b)
        return self.values[min(i, j), max(i, j)]


def correlation_matrix(items: Sequence[ScoredSequence],
                       measures: Sequence[str] = CORRELATION_ORDER) -> CorrelationMatrix:
    """Pairwise Spearman rho between measures.

    Each cell uses only the sequences for which both measures are defined.
    Cells with fewer than two such sequences are NaN.
    """
    k = len(measures)
    vals = np.full((k, k), np.nan)
    counts = np.zeros((k, k), dtype=int)
    for i in range(k):
        for j in range(i):
            ma, mb = measures[i], measures[j]
            rows = [it for it in items if defined_for(ma, it.length) and defined_for(mb, it.length)]
            counts[i, j] = counts[j, i] = len(rows)
            if len(rows) < 2:
                continue
            for d, (r, c) in (("lr", (i, j)), ("rl", (j, i))):
                vals[r, c] = spearman([getattr(it.vector, f"{ma}_{d}") for it in rows],
                                      [getattr(it.vector, f"{mb}_{d}") for it in rows])
    return CorrelationMatrix(tuple(measures), vals, counts)


def variant_agreement(a: Sequence[ScoredSequence], b: Sequence[ScoredSequence],
                      measures: Sequence[str] = MEASURES) -> dict:
    """Spearman rho per measure between two scorings of the same sequences,
    e.g. delta-P against conditional probability, matched on sequence key."""
    other = {it.key: it for it in b}
    shared = [(it, other[it.key]) for it in a if it.key in other]
    out = {}
    for m in measures:
        rows = [(x, y) for x, y in shared if defined_for(m, x.length)]
        if len(rows) < 2:
            out[m] = math.nan
            continue
        out[m] = spearman([getattr(x.vector, m) for x, _ in rows],
                          [getattr(y.vector, m) for _, y in rows])
    return out


def moments(values) -> tuple:
    """``(mean, skewness, excess kurtosis)`` from population (biased) moments.

    Skewness needs n >= 2 and kurtosis n >= 4; either is None when the sample
    is too small or constant.
    """
    x = np.asarray(values, dtype=float)
    n = len(x)
    if n == 0:
        return None, None, None
    mu = float(x.mean())
    if n < 2 or np.ptp(x) == 0:
        return mu, None, None
    dev = x - mu
    scale = float(np.max(np.abs(dev)))
    if scale == 0:
        return mu, None, None
    dev = dev / scale  # both ratios are scale-free; this keeps powers of tiny spreads representable
    m2 = float(np.mean(dev ** 2))
    m3 = float(np.mean(dev ** 3))
    skew = m3 / m2 ** 1.5
    kurt = float(np.mean(dev ** 4)) / m2 ** 2 - 3.0 if n >= 4 else None
    return mu, skew, kurt


def representation_class(mask: str) -> str:
    if "P" not in mask:
        return "lexical"
    if "L" not in mask:
        return "syntactic"
    return "mixed"


@dataclass
class DistributionReport:
    measure: str
    rep_class: str
    n: int
    mean: float | None
    skewness: float | None
    kurtosis: float | None
    mean_z: float | None = None
    skewness_z: float | None = None
    kurtosis_z: float | None = None


def _zscores(xs):
    avail = [x for x in xs if x is not None]
    if len(avail) < 2:
        return [None] * len(xs)
    mu = sum(avail) / len(avail)
    sd = math.sqrt(sum((x - mu) ** 2 for x in avail) / len(avail))
    if sd == 0:
        return [None if x is None else 0.0 for x in xs]
    return [None if x is None else (x - mu) / sd for x in xs]


def distribution_report(items: Iterable[ScoredSequence], class_filter: str = "all",
                        measures: Sequence[str] = MEASURES) -> list[DistributionReport]:
    """Mean, skewness and excess kurtosis per measure for one representation class.

    The ``*_z`` fields z-score each descriptor across the reported measures,
    putting measures with different scales side by side.
    """
    if class_filter not in CLASSES:
        raise ValueError(f"class_filter must be one of {CLASSES}")
    rows = [it for it in items
            if class_filter == "all" or representation_class(it.mask) == class_filter]
    reports = []
    for m in sorted(measures):
        vals = [getattr(it.vector, m) for it in rows if defined_for(m, it.length)]
        mu, skew, kurt = moments(vals)
        reports.append(DistributionReport(m, class_filter, len(vals), mu, skew, kurt))
    for attr in ("mean", "skewness", "kurtosis"):
        for rep, z in zip(reports, _zscores([getattr(r, attr) for r in reports])):
            setattr(rep, f"{attr}_z", z)
    return reports


@dataclass
class SweepRow:
    threshold: int
    sequences_before: int
    sequences_after: int


def threshold_sweep(documents: Callable, values: Sequence[int], vary: str = "individual",
                    base: Thresholds = Thresholds(), post_hoc_freq: int = 1000,
                    max_length: int = DEFAULT_MAX_LENGTH, threads: int = 1) -> list[SweepRow]:
    """Rebuild the index at each threshold value and count sequence types.

    ``sequences_before`` counts all stored sequence types; ``sequences_after``
    only those with frequency above ``post_hoc_freq``.
    """
    if not values:
        raise ValueError("sweep needs at least one value")
    field_name = {"individual": "individual_freq", "chunk": "per_chunk_freq"}.get(vary)
    if field_name is None:
        raise ValueError("vary must be 'individual' or 'chunk'")
    rows = []
    for v in values:
        idx = build_index(documents, replace(base, **{field_name: v}), max_length, threads)
        after = sum(1 for f in idx.seq_freq.values() if f > post_hoc_freq)
        rows.append(SweepRow(v, len(idx.seq_freq), after))
    return rows
