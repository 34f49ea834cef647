"""Contingency tables and the directional pairwise base measures.

For a pair X Y (single units or unit spans)::

             Y present   Y absent
  X present      a           b        a + b = freq(X)
  X absent       c           d        c + d
               a + c       b + d      a + b + c + d = N

LR conditions on Y, RL conditions on X.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .errors import CountError

BASES = ("deltap", "conditional")


@dataclass(frozen=True)
class ContingencyTable:
    a: int
    b: int
    c: int
    d: int

    def transpose(self) -> "ContingencyTable":
        """Swap the roles of X and Y."""
        return ContingencyTable(self.a, self.c, self.b, self.d)


class DirectionalScore(NamedTuple):
    lr: float
    rl: float


def contingency(freq_x: int, freq_y: int, freq_xy: int, n: int) -> ContingencyTable:
    if min(freq_x, freq_y, freq_xy, n) < 0:
        raise CountError("counts must be non-negative")
    if freq_xy > min(freq_x, freq_y):
        raise CountError(f"joint count {freq_xy} exceeds a marginal ({freq_x}, {freq_y})")
    if freq_x + freq_y - freq_xy > n:
        raise CountError(f"marginals {freq_x} + {freq_y} - {freq_xy} exceed N = {n}")
    a = freq_xy
    b = freq_x - a
    c = freq_y - a
    return ContingencyTable(a, b, c, n - a - b - c)


def _ratio(num, den):
    # a unit absent from the corpus carries no evidence
    return num / den if den else 0.0


def delta_p(t: ContingencyTable) -> DirectionalScore:
    return DirectionalScore(
        _ratio(t.a, t.a + t.c) - _ratio(t.b, t.b + t.d),
        _ratio(t.a, t.a + t.b) - _ratio(t.c, t.c + t.d),
    )


def conditional_p(t: ContingencyTable) -> DirectionalScore:
    return DirectionalScore(_ratio(t.a, t.a + t.c), _ratio(t.a, t.a + t.b))


def base_measure(name: str):
    """Map a base-measure name to its function."""
    if name == "deltap":
        return delta_p
    if name == "conditional":
        return conditional_p
    raise ValueError(f"unknown base measure {name!r}; expected one of {BASES}")


def weight(score: float, freq: int) -> float:
    """Frequency weighting: association times co-occurrence frequency."""
    if freq < 0:
        raise ValueError("freq must be >= 0")
    return score * freq
