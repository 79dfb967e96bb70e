"""Volume-fraction bounds by splitting the energy over the phases.

Unknowns are the per-phase shear energies ``p = (E1s, E2s)``.  The per-phase
bulk energies are eliminated through the energy and <det sigma> identities,
leaving five linear constraints (half-planes) in the ``p`` plane:

0. ``phase1_shear``   E1s >= A1s / f1
1. ``phase2_shear``   E2s >= A2s / f2
2. ``phase1_bulk``    E1b(p) >= A1b / f1
3. ``phase2_bulk``    E2b(p) >= A2b / f2
4. ``determinant``    c >= E1b/(4 k1) + E2b/(4 k2) - E1s/(4 m1) - E2s/(4 m2)

A fraction f1 is admissible when the five half-planes have a common point.
The normals do not depend on f1, so every minimal nonnegative dependency
``sum_i w_i n_i = 0`` among them gives a necessary condition
``sum_i w_i r_i(f1) >= 0`` on the offsets; in two dimensions these
conditions are also sufficient (Farkas and Caratheodory), and each one
times ``f1 f2`` is a quadratic in f1.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .boundary import Measurements
from .errors import DomainError, SolverError
from .intervals import FractionInterval, QuadraticInequality, fit_quadratic, intersect_all
from .mandel import PhasePair

NAMES = ("phase1_shear", "phase2_shear", "phase1_bulk", "phase2_bulk", "determinant")
DEFAULT_RTOL = 1e-9


@dataclass(frozen=True)
class PhaseAverages:
    """``m1[k] = <chi1 eps_k>`` and ``m2[k] = <chi2 eps_k>`` for the Mandel strain components."""

    m1: np.ndarray
    m2: np.ndarray


@dataclass(frozen=True)
class SplitKnowns:
    A1b: float
    A2b: float
    A1s: float
    A2s: float
    E: float
    a: float
    c: float

    def swapped(self):
        return SplitKnowns(self.A2b, self.A1b, self.A2s, self.A1s, self.E, self.a, self.c)

    def scale(self, phases: PhasePair):
        """Energy-unit magnitude used for tolerances."""
        kmax = max(phases.kappa_max, phases.mu_max)
        kmin = min(phases.kappa1, phases.kappa2, phases.mu1, phases.mu2)
        return max(self.A1b, self.A2b, self.A1s, self.A2s, abs(self.E), abs(self.a) / kmin,
                   kmax * abs(self.c), 1e-300)


@dataclass(frozen=True)
class HalfPlane:
    """Feasible side ``normal . p <= offset``."""

    normal: tuple[float, float]
    offset: float
    name: str = ""

    def slack(self, p):
        return self.offset - (self.normal[0] * p[0] + self.normal[1] * p[1])

    @property
    def norm(self):
        return float(np.hypot(*self.normal))


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    witness: tuple[float, float] | None
    active: tuple[int, ...]
    slacks: tuple[float, ...]
    margin: float


def phase_averages(m: Measurements, phases: PhasePair) -> PhaseAverages:
    phases.require_contrast()
    k1, k2, m1_, m2_ = phases.kappa1, phases.kappa2, phases.mu1, phases.mu2
    eps, sig = m.eps0, m.sigma0
    c1 = np.array([2 * k2, 2 * m2_, 2 * m2_])
    c2 = np.array([2 * k1, 2 * m1_, 2 * m1_])
    d = np.array([k2 - k1, m2_ - m1_, m2_ - m1_])
    return PhaseAverages((c1 * eps - sig) / (2 * d), (c2 * eps - sig) / (-2 * d))


def split_knowns(m: Measurements, phases: PhasePair) -> SplitKnowns:
    pa = phase_averages(m, phases)
    return SplitKnowns(
        A1b=2 * phases.kappa1 * pa.m1[0] ** 2,
        A2b=2 * phases.kappa2 * pa.m2[0] ** 2,
        A1s=2 * phases.mu1 * (pa.m1[1] ** 2 + pa.m1[2] ** 2),
        A2s=2 * phases.mu2 * (pa.m2[1] ** 2 + pa.m2[2] ** 2),
        E=m.energy,
        a=m.a,
        c=m.c,
    )


def _bulk_energies(k: SplitKnowns, phases: PhasePair):
    """E1b and E2b as affine functions of p: (constant, coefficient of E1s, coefficient of E2s)."""
    k1, k2, m1, m2 = phases.kappa1, phases.kappa2, phases.mu1, phases.mu2
    d = k1 - k2
    e1b = np.array([k.a - k2 * k.E, k2 + m1, k2 + m2]) / d
    e2b = np.array([k.a - k1 * k.E, k1 + m1, k1 + m2]) / (-d)
    return e1b, e2b


def _offset_parts(k: SplitKnowns, phases: PhasePair):
    """Normals (5, 2) and offsets split as ``r0 + r1 / f1 + r2 / f2`` (three (5,) arrays)."""
    phases.require_contrast()
    k1, k2, m1, m2 = phases.kappa1, phases.kappa2, phases.mu1, phases.mu2
    e1b, e2b = _bulk_energies(k, phases)
    d = abs(k1 - k2)
    normals = np.zeros((5, 2))
    r0, r1, r2 = np.zeros(5), np.zeros(5), np.zeros(5)
    # phase shear: -E1s <= -A1s/f1, -E2s <= -A2s/f2
    normals[0] = (-1.0, 0.0)
    r1[0] = -k.A1s
    normals[1] = (0.0, -1.0)
    r2[1] = -k.A2s
    # bulk: g(p) = E_b(p) - A/f >= 0 scaled by |k1 - k2|
    normals[2] = -d * e1b[1:]
    r0[2] = d * e1b[0]
    r1[2] = -d * k.A1b
    normals[3] = -d * e2b[1:]
    r0[3] = d * e2b[0]
    r2[3] = -d * k.A2b
    # determinant: 4c - (E1b/k1 + E2b/k2 - E1s/m1 - E2s/m2) >= 0 scaled by k1 k2
    lin = e1b / k1 + e2b / k2 - np.array([0.0, 1.0 / m1, 1.0 / m2])
    normals[4] = k1 * k2 * lin[1:]
    r0[4] = k1 * k2 * (4.0 * k.c - lin[0])
    return normals, r0, r1, r2


def half_planes(f1, k: SplitKnowns, phases: PhasePair):
    """The five constraints at volume fraction ``f1``, as feasible-side half-planes.

    With ``kappa1 > kappa2`` the normals are exactly ``(-1, 0)``, ``(0, -1)``,
    ``-(k2 + m1, k2 + m2)``, ``(k1 + m1, k1 + m2)`` and
    ``-((k1 + m1)(k2 + m1)/m1, (k1 + m2)(k2 + m2)/m2)``.
    """
    if not 0.0 < f1 < 1.0:
        raise DomainError(f"f1 must lie in (0, 1), got {f1}")
    normals, r0, r1, r2 = _offset_parts(k, phases)
    r = r0 + r1 / f1 + r2 / (1.0 - f1)
    return [HalfPlane((float(n[0]), float(n[1])), float(o), name) for n, o, name in zip(normals, r, NAMES)]


def _normalized(planes):
    N = np.array([hp.normal for hp in planes])
    r = np.array([hp.offset for hp in planes])
    norms = np.hypot(N[:, 0], N[:, 1])
    return N / norms[:, None], r / norms


def feasible(f1, k: SplitKnowns, phases: PhasePair, rtol=DEFAULT_RTOL) -> FeasibilityResult:
    """Exact feasibility of the five half-planes by vertex enumeration.

    The witness is the feasible vertex with the largest minimum normalized
    slack; ``active`` lists the constraints tight at it.  ``margin`` is that
    minimum slack when feasible, otherwise minus the smallest achievable
    worst-case violation.
    """
    planes = half_planes(f1, k, phases)
    N, r = _normalized(planes)
    tol = rtol * k.scale(phases)
    best = None
    for i, j in itertools.combinations(range(len(planes)), 2):
        M = N[[i, j]]
        det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
        if abs(det) < 1e-12:
            continue
        p = np.linalg.solve(M, r[[i, j]])
        s = r - N @ p
        if s.min() >= -tol:
            key = s.min()
            if best is None or key > best[0] + tol:
                best = (key, p, s)
    if best is not None:
        _, p, s = best
        active = tuple(int(i) for i in np.flatnonzero(np.abs(s) <= tol))
        return FeasibilityResult(True, (float(p[0]), float(p[1])), active, tuple(float(x) for x in s),
                                 float(s.min()))
    p, t = minimax_point(N, r)
    s = r - N @ p
    active = tuple(int(i) for i in np.flatnonzero(s < -tol))
    return FeasibilityResult(False, None, active, tuple(float(x) for x in s), -float(t))


def minimax_point(N, r):
    """Point minimizing the largest normalized violation ``max_i (n_i . p - r_i)``.

    Solved exactly: the optimum of this 3-variable linear program sits where
    three constraints are equally violated (or two, for an antiparallel pair).
    """
    best = None
    m = len(r)
    for idx in itertools.combinations(range(m), 3):
        A = np.column_stack([N[list(idx)], -np.ones(3)])
        if abs(np.linalg.det(A)) < 1e-12:
            continue
        sol = np.linalg.solve(A, r[list(idx)])
        p, t = sol[:2], sol[2]
        viol = N @ p - r
        if viol.max() <= t + 1e-12 * max(1.0, abs(t)):
            if best is None or t < best[1]:
                best = (p, t)
    if best is None:
        raise SolverError("no bounded minimax point")
    return best


def dependencies(phases: PhasePair, tol=1e-12):
    """Minimal nonnegative dependencies ``sum_i w_i n_i = 0`` among the five normals.

    Returns a list of ``(indices, weights)`` with weights normalized to sum 1.
    """
    normals, *_ = _offset_parts(SplitKnowns(0, 0, 0, 0, 0, 0, 0), phases)
    U = normals / np.hypot(normals[:, 0], normals[:, 1])[:, None]
    out = []
    for i, j in itertools.combinations(range(5), 2):
        if abs(U[i, 0] * U[j, 1] - U[i, 1] * U[j, 0]) < tol and U[i] @ U[j] < 0:
            out.append(((i, j), np.array([1.0, 1.0]) / 2.0))
    for idx in itertools.combinations(range(5), 3):
        A = U[list(idx)].T  # 2 x 3
        # null vector of a 2x3 matrix via cofactors
        w = np.array([
            A[0, 1] * A[1, 2] - A[0, 2] * A[1, 1],
            A[0, 2] * A[1, 0] - A[0, 0] * A[1, 2],
            A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0],
        ])
        if np.max(np.abs(w)) < tol:
            continue
        if np.all(w > tol) or np.all(w < -tol):
            w = np.abs(w)
            out.append((idx, w / w.sum()))
    return out


def combination_coefficients(triplet, phases: PhasePair):
    """Nonnegative weights combining three normals to zero, or ``None``.

    ``triplet`` holds labels 1..5 of the normals nu1..nu5 (phase 1 taken as
    the one with the larger bulk modulus).  The last label is written as
    ``alpha nu_a + beta nu_b`` in terms of the first two; the triplet admits
    a nonnegative dependency iff ``alpha <= 0`` and ``beta <= 0``, in which
    case ``(-alpha, -beta, 1)`` is returned.
    """
    if phases.kappa1 < phases.kappa2:
        raise DomainError("label phases so that kappa1 > kappa2")
    normals, *_ = _offset_parts(SplitKnowns(0, 0, 0, 0, 0, 0, 0), phases)
    a, b, c = (normals[i - 1] for i in triplet)
    M = np.column_stack([a, b])
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    if abs(det) < 1e-14 * np.max(np.abs(M)) ** 2:
        raise SolverError(f"normals {triplet[:2]} are parallel")
    alpha, beta = np.linalg.solve(M, c)
    if alpha <= 0 and beta <= 0:
        return (float(-alpha), float(-beta), 1.0), (float(alpha), float(beta))
    return None, (float(alpha), float(beta))


# triplets (in nu labels) behind the closed-form bounds
BULK_TRIPLET = (3, 4, 5)
SHEAR1_TRIPLET = (1, 4, 5)
SHEAR2_TRIPLET = (2, 4, 5)


def _oriented(k, phases, f1):
    if phases.kappa1 > phases.kappa2:
        return k, phases, f1
    return k.swapped(), phases.swapped(), 1.0 - f1


def closed_form_slacks(f1, k: SplitKnowns, phases: PhasePair):
    """Slacks of the closed-form bounds as nonnegative combinations of half-plane slacks.

    Returns a dict with ``"bulk"`` (both phases' bulk constraints with the
    determinant constraint) and ``"shear"`` (phase-1 or phase-2 shear
    constraint, whichever has a nonnegative dependency, with the phase-2 bulk
    and determinant constraints; "phase 1" here is the stiffer-bulk phase).
    """
    phases.require_contrast()
    ko, po, fo = _oriented(k, phases, f1)
    planes = half_planes(fo, ko, po)
    out = {}
    shear = SHEAR1_TRIPLET if po.mu1 > po.mu2 else SHEAR2_TRIPLET
    for name, trip in (("bulk", BULK_TRIPLET), ("shear", shear)):
        w, _ = combination_coefficients(trip, po)
        out[name] = float(sum(wi * planes[i - 1].offset for wi, i in zip(w, trip)))
    return out


def printed_bulk_slack(f1, k: SplitKnowns, phases: PhasePair):
    """The both-bulk bound written out explicitly (phase 1 taken as the stiffer-bulk phase)."""
    k, p, f1 = _oriented(k, phases, f1)
    f2 = 1.0 - f1
    k1, k2, m1, m2 = p.kappa1, p.kappa2, p.mu1, p.mu2
    rhs = (-k1 * k2 * (k.a + k.E * (m1 + m2)) / (m1 * m2)
           + k.A1b * k2 * (k1 + m1) * (k1 + m2) / (f1 * m1 * m2)
           + k.A2b * k1 * (k2 + m1) * (k2 + m2) / (f2 * m1 * m2))
    return 4 * k.c * k1 * k2 - rhs


def printed_shear_slack(f1, k: SplitKnowns, phases: PhasePair):
    """The shear bound written out explicitly; for mu1 < mu2 the A2s term is divided by f2."""
    k, p, f1 = _oriented(k, phases, f1)
    f2 = 1.0 - f1
    k1, k2, m1, m2 = p.kappa1, p.kappa2, p.mu1, p.mu2
    if m1 > m2:
        rhs = (k2 * (k.a + k.E * (m2 - k1)) / m2
               + k.A1s * k2 * (k1 + m1) * (m1 - m2) / (f1 * m1 * m2)
               + k.A2b * (k1 - k2) * (k2 + m2) / (f2 * m2))
    else:
        rhs = (k2 * (k.a + k.E * (m1 - k1)) / m1
               + k.A2s * k2 * (m2 - m1) * (k1 + m2) / (f2 * m1 * m2)
               + k.A2b * (k1 - k2) * (k2 + m1) / (f2 * m1))
    return 4 * k.c * k1 * k2 - rhs


def dependency_quadratics(k: SplitKnowns, phases: PhasePair):
    """``f1 f2 sum_i w_i r_i(f1)`` for every minimal dependency, as quadratics in f1."""
    normals, r0, r1, r2 = _offset_parts(k, phases)
    norms = np.hypot(normals[:, 0], normals[:, 1])
    out = []
    for idx, w in dependencies(phases):
        ww = w / norms[list(idx)]
        c0 = float(ww @ r0[list(idx)])
        c1 = float(ww @ r1[list(idx)])
        c2 = float(ww @ r2[list(idx)])
        # f(1-f) c0 + (1-f) c1 + f c2
        label = "+".join(NAMES[i] for i in idx)
        out.append(QuadraticInequality(-c0, c0 - c1 + c2, c1, label))
    return out


def closed_form_quadratics(k: SplitKnowns, phases: PhasePair):
    """The two closed-form bounds times f1 f2, fitted as quadratics in the caller's f1."""
    return [fit_quadratic(lambda f, name=name: f * (1 - f) * closed_form_slacks(f, k, phases)[name], label=name)
            for name in ("bulk", "shear")]


def invert_closed_form(k: SplitKnowns, phases: PhasePair, rtol=DEFAULT_RTOL) -> FractionInterval:
    tol = rtol * k.scale(phases)
    return intersect_all(q.relaxed(tol).solve() for q in dependency_quadratics(k, phases))


def invert(k: SplitKnowns, phases: PhasePair, resolution=1e-3, rtol=DEFAULT_RTOL, bisect_tol=1e-10):
    """Admissible volume fractions: scan ``feasible`` on a grid, bisect each transition.

    The grid is refined with the roots of the dependency quadratics so that
    isolated admissible points are not stepped over.  The result is
    intersected with the closed-form solution; :func:`scan_report` exposes
    both parts for cross-checking.
    """
    return scan_report(k, phases, resolution, rtol, bisect_tol)[0]


def scan_report(k, phases, resolution=1e-3, rtol=DEFAULT_RTOL, bisect_tol=1e-10):
    phases.require_contrast()
    closed = invert_closed_form(k, phases, rtol)
    scanned = _scan(k, phases, resolution, rtol, bisect_tol, closed)
    return scanned.intersect(_widen(closed, bisect_tol)), scanned, closed


def _widen(iv, d):
    return FractionInterval(tuple((lo - d, hi + d) for lo, hi in iv.pieces))


def _scan(k, phases, resolution, rtol, bisect_tol, closed):
    n = max(int(round(1.0 / resolution)), 2)
    grid = set(np.linspace(0.0, 1.0, n + 1)[1:-1].tolist())
    for lo, hi in closed.pieces:
        for e in (lo, hi, 0.5 * (lo + hi)):
            if 0.0 < e < 1.0:
                grid.add(float(e))
    grid = sorted(grid)
    ok = [feasible(f, k, phases, rtol).feasible for f in grid]

    def edge(a, b, a_ok):
        while b - a > bisect_tol:
            mid = 0.5 * (a + b)
            if feasible(mid, k, phases, rtol).feasible == a_ok:
                a = mid
            else:
                b = mid
        return a if a_ok else b

    pieces = []
    start = None
    if ok[0]:
        start = _extend_left(grid[0], k, phases, rtol, bisect_tol)
    for i in range(1, len(grid)):
        if ok[i] and not ok[i - 1]:
            start = edge(grid[i - 1], grid[i], False)
        elif not ok[i] and ok[i - 1]:
            pieces.append((start, edge(grid[i - 1], grid[i], True)))
            start = None
    if ok[-1]:
        pieces.append((start, _extend_right(grid[-1], k, phases, rtol, bisect_tol)))
    return FractionInterval(tuple(pieces))


def _extend_left(f, k, phases, rtol, tol):
    """Smallest admissible fraction below the feasible grid point ``f``; 0 if it reaches the end."""
    a, b = 0.0, f
    while b - a > tol:
        mid = 0.5 * (a + b)
        if feasible(mid, k, phases, rtol).feasible:
            b = mid
        else:
            a = mid
    return 0.0 if a == 0.0 else b


def _extend_right(f, k, phases, rtol, tol):
    a, b = f, 1.0
    while b - a > tol:
        mid = 0.5 * (a + b)
        if feasible(mid, k, phases, rtol).feasible:
            a = mid
        else:
            b = mid
    return 1.0 if b == 1.0 else a
