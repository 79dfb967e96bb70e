"""Quadratic inequalities in the volume fraction and unions of f1-intervals."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

INTERP_NODES = (0.25, 0.5, 0.75)
CHECK_NODE = 1.0 / 3.0


@dataclass(frozen=True)
class FractionInterval:
    """A finite union of disjoint, sorted, closed subintervals of [0, 1]."""

    pieces: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "pieces", _normalize(self.pieces))

    @classmethod
    def full(cls):
        return cls(((0.0, 1.0),))

    @classmethod
    def empty(cls):
        return cls(())

    @property
    def is_empty(self):
        return not self.pieces

    def contains(self, f, tol=0.0):
        return any(lo - tol <= f <= hi + tol for lo, hi in self.pieces)

    __contains__ = contains

    def intersect(self, other: FractionInterval) -> FractionInterval:
        out = []
        for a_lo, a_hi in self.pieces:
            for b_lo, b_hi in other.pieces:
                lo, hi = max(a_lo, b_lo), min(a_hi, b_hi)
                if lo <= hi:
                    out.append((lo, hi))
        return FractionInterval(tuple(out))

    @property
    def hull(self):
        if self.is_empty:
            return None
        return self.pieces[0][0], self.pieces[-1][1]

    def to_list(self):
        return [[lo, hi] for lo, hi in self.pieces]

    def __str__(self):
        if self.is_empty:
            return "{}"
        return " U ".join(f"[{lo:.10g}, {hi:.10g}]" for lo, hi in self.pieces)


def _normalize(pieces):
    clipped = []
    for lo, hi in pieces:
        lo, hi = max(0.0, float(lo)), min(1.0, float(hi))
        if lo <= hi:
            clipped.append((lo, hi))
    clipped.sort()
    merged = []
    for lo, hi in clipped:
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return tuple(merged)


def intersect_all(intervals: Iterable[FractionInterval]) -> FractionInterval:
    out = FractionInterval.full()
    for iv in intervals:
        out = out.intersect(iv)
    return out


@dataclass(frozen=True)
class QuadraticInequality:
    """The constraint ``q2 f^2 + q1 f + q0 >= 0`` on f = f1."""

    q2: float
    q1: float
    q0: float
    label: str = field(default="", compare=False)

    def __call__(self, f):
        return (self.q2 * f + self.q1) * f + self.q0

    @property
    def scale(self):
        return max(abs(self.q2), abs(self.q1), abs(self.q0))

    def relaxed(self, tol):
        """Relax to ``q(f) + tol * f (1 - f) >= 0`` (slack tolerance carried through f1 f2)."""
        return QuadraticInequality(self.q2 - tol, self.q1 + tol, self.q0, self.label)

    def solve(self, lo=0.0, hi=1.0) -> FractionInterval:
        """Closed-form solution set within ``[lo, hi]``."""
        return FractionInterval(tuple(_quadratic_nonneg_set(self.q2, self.q1, self.q0, lo, hi)))


def fit_quadratic(func: Callable[[float], float], label="", rtol=1e-10) -> QuadraticInequality:
    """Quadratic through ``func`` at f = 1/4, 1/2, 3/4, checked at f = 1/3.

    ``func`` must itself be a quadratic polynomial of f; a failed check
    raises ``ArithmeticError``.
    """
    xs = np.array(INTERP_NODES)
    ys = np.array([func(x) for x in xs])
    V = np.vander(xs, 3)
    q2, q1, q0 = np.linalg.solve(V, ys)
    q = QuadraticInequality(float(q2), float(q1), float(q0), label)
    check = func(CHECK_NODE)
    ref = max(np.max(np.abs(ys)), abs(check))
    if abs(q(CHECK_NODE) - check) > rtol * ref + 1e-300:
        raise ArithmeticError(
            f"interpolated quadratic {label!r} fails the check point: {q(CHECK_NODE)} vs {check}"
        )
    return q


def _quadratic_nonneg_set(a, b, c, lo, hi):
    """Subintervals of [lo, hi] where a x^2 + b x + c >= 0."""
    scale = max(abs(a), abs(b), abs(c))
    if scale == 0.0:
        return [(lo, hi)]
    # normalize so tiny or huge coefficients neither underflow nor overflow
    a, b, c = a / scale, b / scale, c / scale
    eps = 1e-14
    if abs(a) <= eps:
        if abs(b) <= eps:
            return [(lo, hi)] if c >= 0 else []
        r = -c / b
        return [(max(lo, r), hi)] if b > 0 else [(lo, min(hi, r))]
    disc = b * b - 4.0 * a * c
    if disc < 0:
        return [(lo, hi)] if a > 0 else []
    sq = math.sqrt(disc)
    # numerically stable pair of roots
    t = -0.5 * (b + math.copysign(sq, b))
    r1 = t / a
    r2 = c / t if t != 0 else r1
    r1, r2 = min(r1, r2), max(r1, r2)
    if a > 0:
        return [(lo, min(hi, r1)), (max(lo, r2), hi)]
    return [(max(lo, r1), min(hi, r2))]
