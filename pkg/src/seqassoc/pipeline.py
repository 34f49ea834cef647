"""Vector-based filtering and ranking of scored sequences.

Constraint measures (min and cc) decide admission; the remaining
direction-specific measures compete, and each admitted sequence is
represented by whichever of them is largest.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .measures import DIRECTIONS, ScoredSequence, defined_for

DEFAULT_RANKING = ("sum", "mean", "rb", "re", "db", "de", "e")
RANKABLE = ("sum", "mean", "min", "rb", "re", "db", "de", "e")
NORMS = ("minmax", "none")


@dataclass(frozen=True)
class FilterConfig:
    min_link: float = 0.01
    max_cc: int = 1
    direction: str = "lr"

    def __post_init__(self):
        if self.min_link != self.min_link or self.min_link in (float("inf"), float("-inf")):
            raise ValueError("min_link must be finite")
        if self.max_cc < 0:
            raise ValueError("max_cc must be >= 0")
        if self.direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}")


@dataclass(frozen=True)
class RankedSequence:
    seq: ScoredSequence
    score: float
    argmax_measure: str

    @property
    def vector(self):
        return self.seq.vector


def passes(item: ScoredSequence, cfg: FilterConfig) -> bool:
    v = item.vector
    return v.get("min", cfg.direction) >= cfg.min_link and v.cc <= cfg.max_cc


def apply_filter(items: Iterable[ScoredSequence], cfg: FilterConfig) -> list[ScoredSequence]:
    """Keep sequences with no weak link and at most ``max_cc`` direction changes."""
    return [it for it in items if passes(it, cfg)]


def _tie_key(item: ScoredSequence):
    return (-item.freq, item.text, item.mask)


def rank_by_max(items: Sequence[ScoredSequence], direction: str = "lr",
                measures: Sequence[str] = DEFAULT_RANKING, top_k: int | None = 100,
                norm: str = "minmax") -> list[RankedSequence]:
    """Represent each sequence by its largest ranking measure and sort.

    With ``norm="minmax"`` each measure is rescaled to [0, 1] over the
    candidates for which it is defined before the maximum is taken. Measures
    undefined for two-unit sequences are skipped for those sequences.
    """
    if not measures:
        raise ValueError("need at least one ranking measure")
    bad = [m for m in measures if m not in RANKABLE]
    if bad:
        raise ValueError(f"not direction-specific ranking measures: {bad}")
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}")
    if norm not in NORMS:
        raise ValueError(f"norm must be one of {NORMS}")
    names = [f"{m}_{direction}" for m in measures]

    scale = {}
    for name in names:
        vals = [getattr(it.vector, name) for it in items if defined_for(name, it.length)]
        if norm == "minmax" and vals:
            lo, hi = min(vals), max(vals)
            scale[name] = (lo, hi - lo)
        else:
            scale[name] = (0.0, 1.0)

    ranked = []
    for it in items:
        best, best_name = None, None
        for name in names:
            if not defined_for(name, it.length):
                continue
            lo, span = scale[name]
            x = getattr(it.vector, name)
            x = (x - lo) / span if span else 0.0
            if best is None or x > best:
                best, best_name = x, name
        if best is not None:
            ranked.append(RankedSequence(it, best, best_name))
    ranked.sort(key=lambda r: (-r.score, *_tie_key(r.seq)))
    return ranked if top_k is None else ranked[:top_k]


def select(items: Iterable[ScoredSequence], cfg: FilterConfig = FilterConfig(),
           measures: Sequence[str] = DEFAULT_RANKING, top_k: int | None = 100,
           norm: str = "minmax") -> list[RankedSequence]:
    """Filter, then rank in the filter's direction."""
    return rank_by_max(apply_filter(items, cfg), cfg.direction, measures, top_k, norm)


def rank_by_cs(items: Iterable[ScoredSequence], min_link: float = 0.01,
               top_k: int | None = 100) -> tuple[list[ScoredSequence], list[ScoredSequence]]:
    """Both extremes of the changed-scalar scale.

    The top list holds the most LR-dominant sequences whose LR minimum
    reaches ``min_link``; the bottom list the most RL-dominant whose RL
    minimum does, most negative first.
    """
    items = list(items)
    desc = sorted(items, key=lambda it: (-it.vector.cs, *_tie_key(it)))
    # one total order read from both ends keeps the two lists disjoint
    asc = desc[::-1]
    top = [it for it in desc if it.vector.min_lr >= min_link]
    bottom = [it for it in asc if it.vector.min_rl >= min_link]
    if top_k is not None:
        top, bottom = top[:top_k], bottom[:top_k]
    return top, bottom
