"""Admissibility of (average stress, average strain) pairs in two-phase composites.

For a periodic or statistically homogeneous composite the energy and the
two determinant null-Lagrangians are fixed by the averages:
``E = sigma0 . eps0``, ``a = det sigma0``, ``b = det eps0``, with the average
gradient taken symmetric.  The volume-fraction inequalities then become
conditions on the pair alone.
"""
from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field

import numpy as np

from . import splitting, translation
from .boundary import Measurements
from .errors import DomainError
from .mandel import PhasePair, det_mandel


@dataclass(frozen=True)
class CompositePair:
    sigma0: np.ndarray
    eps0: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "sigma0", np.asarray(self.sigma0, dtype=float).reshape(3))
        object.__setattr__(self, "eps0", np.asarray(self.eps0, dtype=float).reshape(3))


@dataclass
class Verdict:
    admissible: bool
    f1: float
    slacks: dict = field(default_factory=dict)
    violated: list = field(default_factory=list)
    witness: tuple | None = None
    min_slack: float = 0.0

    def to_dict(self):
        return {
            "admissible": self.admissible,
            "f1": self.f1,
            "slacks": {k: float(v) for k, v in self.slacks.items()},
            "violated": [[name, float(v)] for name, v in self.violated],
            "witness": None if self.witness is None else [float(x) for x in self.witness],
            "min_slack": float(self.min_slack),
        }


def composite_measurements(p: CompositePair) -> Measurements:
    return Measurements(
        sigma0=p.sigma0,
        grad0=np.concatenate([[0.0], p.eps0]),
        energy=float(p.sigma0 @ p.eps0),
        a=det_mandel(p.sigma0),
        b=det_mandel(p.eps0),
        area=1.0,
    )


def admissible(p: CompositePair, f1, phases: PhasePair, rtol=translation.DEFAULT_RTOL) -> Verdict:
    """Run both translation endpoints and the splitting system on the pair.

    Slacks are reported normalized by an energy scale of the pair, so the
    verdict is invariant under scaling the pair.  Splitting violations are
    named by the constraints of each failing nonnegative dependency.
    """
    if not 0.0 < f1 < 1.0:
        raise DomainError(f"f1 must lie in (0, 1), got {f1}")
    phases.require_contrast()
    m = composite_measurements(p)
    scale_t = translation.energy_scale(m, phases)
    lo, hi = translation.endpoint_slacks(f1, m, phases)
    slacks = {"translation_alpha_lower": lo / scale_t, "translation_alpha_upper": hi / scale_t}
    violated = [(name, v) for name, v in slacks.items() if v < -rtol]

    k = splitting.split_knowns(m, phases)
    scale_s = k.scale(phases)
    res = splitting.feasible(f1, k, phases, rtol)
    slacks["splitting_margin"] = res.margin / scale_s
    g = f1 * (1.0 - f1)
    for q in splitting.dependency_quadratics(k, phases):
        v = q(f1) / g / scale_s
        slacks[f"splitting[{q.label}]"] = v
        if v < -rtol:
            violated.append((f"splitting[{q.label}]", v))
    if not res.feasible and not any(name.startswith("splitting") for name, _ in violated):
        violated.append(("splitting_margin", slacks["splitting_margin"]))
    return Verdict(
        admissible=not violated,
        f1=float(f1),
        slacks=slacks,
        violated=violated,
        witness=res.witness,
        min_slack=min(slacks.values()),
    )


@dataclass(frozen=True)
class GridSpec:
    """A 2-D slice of strain space: components ``axes`` vary, the third stays at ``fixed_value``."""

    axes: tuple[int, int]
    ranges: tuple[tuple[float, float, int], tuple[float, float, int]]
    fixed_value: float = 0.0

    def __post_init__(self):
        if len(set(self.axes)) != 2 or not all(0 <= a <= 2 for a in self.axes):
            raise ValueError(f"axes must be two distinct indices in 0..2, got {self.axes}")
        for start, stop, num in self.ranges:
            if int(num) < 1:
                raise ValueError("each grid axis needs at least one point")

    @property
    def shape(self):
        return tuple(int(r[2]) for r in self.ranges)

    def points(self):
        fixed_axis = ({0, 1, 2} - set(self.axes)).pop()
        xs = [np.linspace(start, stop, int(num)) if int(num) > 1 else np.array([start])
              for start, stop, num in self.ranges]
        for u, v in itertools.product(*xs):
            e = np.zeros(3)
            e[self.axes[0]], e[self.axes[1]], e[fixed_axis] = u, v, self.fixed_value
            yield e


REGION_HEADER = ("eps1", "eps2", "eps3", "admissible", "min_slack")


def region_scan(sigma0, grid: GridSpec, f1, phases: PhasePair, rtol=translation.DEFAULT_RTOL):
    """One row per grid point (first axis outermost): strain, admissible flag, minimum slack."""
    rows = []
    for e in grid.points():
        v = admissible(CompositePair(sigma0, e), f1, phases, rtol)
        rows.append((float(e[0]), float(e[1]), float(e[2]), v.admissible, float(v.min_slack)))
    if not rows:
        raise ValueError("empty grid")
    return rows


def write_table(path_or_file, header, rows):
    def _fmt(x):
        if isinstance(x, (bool, np.bool_)):
            return "1" if x else "0"
        if isinstance(x, (float, np.floating)):
            return repr(float(x))
        return str(x)

    close = False
    fh = path_or_file
    if not hasattr(path_or_file, "write"):
        fh = open(path_or_file, "w", newline="")
        close = True
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(x) for x in r])
    finally:
        if close:
            fh.close()
