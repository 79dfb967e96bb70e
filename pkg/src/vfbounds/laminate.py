"""Exact fields of a two-phase rank-one laminate.

Layers have unit normal ``n = (cos theta, sin theta)``.  In Jacobian form
the phase displacement gradients are ``J1 = Jbar - f2 lam (x) n`` and
``J2 = Jbar + f1 lam (x) n``; the jump vector ``lam`` is fixed by traction
continuity ``(sigma2 - sigma1) n = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary import BoundaryTrace, Measurements
from .errors import DomainError, SolverError
from .mandel import (
    PhasePair, det_grad4, det_mandel, from_mandel, grad4_from_jacobian, matrix_from_grad4,
    stiffness, to_mandel,
)


@dataclass(frozen=True)
class Laminate:
    theta: float
    f1: float
    phases: PhasePair

    def __post_init__(self):
        if not 0.0 < self.f1 < 1.0:
            raise DomainError(f"f1 must lie in (0, 1), got {self.f1}")

    @property
    def normal(self):
        return np.array([np.cos(self.theta), np.sin(self.theta)])


@dataclass(frozen=True)
class LaminateFields:
    """Per-phase constant fields (Mandel strain/stress, gradient 4-vectors) and the jump vector."""

    eps1: np.ndarray
    eps2: np.ndarray
    sigma1: np.ndarray
    sigma2: np.ndarray
    grad1: np.ndarray
    grad2: np.ndarray
    jump: np.ndarray
    f1: float


def _stress_matrix(p, eps_matrix):
    return from_mandel(stiffness(p) * to_mandel(eps_matrix))


def _jac(g):
    return matrix_from_grad4(g).T


def solve(lam: Laminate, avg_grad) -> LaminateFields:
    """Fields of the laminate under the average gradient 4-vector ``avg_grad``."""
    n = lam.normal
    f1, f2 = lam.f1, 1.0 - lam.f1
    p1, p2 = lam.phases.phase1, lam.phases.phase2
    Jbar = _jac(np.asarray(avg_grad, dtype=float))
    epsbar = 0.5 * (Jbar + Jbar.T)

    def traction_of_jump(p, v):
        e = 0.5 * (np.outer(v, n) + np.outer(n, v))
        return _stress_matrix(p, e) @ n

    # f1 C2 sym(lam n) n + f2 C1 sym(lam n) n = (C1 - C2) epsbar n
    M = np.column_stack([f1 * traction_of_jump(p2, ek) + f2 * traction_of_jump(p1, ek) for ek in np.eye(2)])
    rhs = (_stress_matrix(p1, epsbar) - _stress_matrix(p2, epsbar)) @ n
    if abs(np.linalg.det(M)) < 1e-14 * max(np.max(np.abs(M)) ** 2, 1e-300):
        raise SolverError("singular interface system")
    jump = np.linalg.solve(M, rhs)

    J1 = Jbar - f2 * np.outer(jump, n)
    J2 = Jbar + f1 * np.outer(jump, n)
    g1, g2 = grad4_from_jacobian(J1), grad4_from_jacobian(J2)
    e1, e2 = g1[1:], g2[1:]
    return LaminateFields(e1, e2, stiffness(p1) * e1, stiffness(p2) * e2, g1, g2, jump, f1)


def measurements_of(fields: LaminateFields, f1=None) -> Measurements:
    f1 = fields.f1 if f1 is None else f1
    f2 = 1.0 - f1
    sigma0 = f1 * fields.sigma1 + f2 * fields.sigma2
    grad0 = f1 * fields.grad1 + f2 * fields.grad2
    energy = f1 * fields.sigma1 @ fields.eps1 + f2 * fields.sigma2 @ fields.eps2
    a = f1 * det_mandel(fields.sigma1) + f2 * det_mandel(fields.sigma2)
    b = f1 * det_grad4(fields.grad1) + f2 * det_grad4(fields.grad2)
    return Measurements(sigma0, grad0, energy, a, b, 1.0)


def split_energies(fields: LaminateFields):
    """True ``(E1s, E2s)``: per-phase shear energies weighted by volume fraction."""
    f1, f2 = fields.f1, 1.0 - fields.f1
    E1s = f1 * float(fields.sigma1[1:] @ fields.eps1[1:])
    E2s = f2 * float(fields.sigma2[1:] @ fields.eps2[1:])
    return E1s, E2s


def effective_compliance(lam: Laminate):
    """3x3 matrix mapping the average stress (Mandel) to the average strain."""
    cols = []
    for k in range(3):
        g = np.zeros(4)
        g[k + 1] = 1.0
        m = measurements_of(solve(lam, g))
        cols.append(m.sigma0)
    C = np.column_stack(cols)
    if abs(np.linalg.det(C)) < 1e-14 * np.max(np.abs(C)) ** 3:
        raise SolverError("singular effective stiffness")
    S = np.linalg.inv(C)
    return 0.5 * (S + S.T)


def hydrostatic(strain=1.0):
    """Gradient 4-vector of ``strain * I``."""
    return np.array([0.0, np.sqrt(2.0) * strain, 0.0, 0.0])


def displacement(lam: Laminate, fields: LaminateFields, x, offset=None):
    """Displacement of a single-interface laminate in a body.

    Phase 1 occupies ``n . x < offset`` and phase 2 the rest; the field is
    continuous across the interface and equals ``J1 x`` on the phase-1 side.
    """
    n = lam.normal
    x = np.asarray(x, dtype=float)
    J1 = _jac(fields.grad1)
    s = 0.0 if offset is None else offset
    u = x @ J1.T
    h = np.maximum(x @ n - s, 0.0)
    return u + h[:, None] * fields.jump[None, :]


def _clip_area(poly, n, s):
    """Area of ``poly`` intersected with the half-plane ``n . x <= s`` (Sutherland-Hodgman)."""
    out = []
    k = len(poly)
    for i in range(k):
        p, q = poly[i], poly[(i + 1) % k]
        dp, dq = n @ p - s, n @ q - s
        if dp <= 0:
            out.append(p)
        if dp * dq < 0:
            out.append(p + (q - p) * (dp / (dp - dq)))
    if len(out) < 3:
        return 0.0
    out = np.array(out)
    xn = np.roll(out, -1, axis=0)
    return 0.5 * abs(np.sum(out[:, 0] * xn[:, 1] - xn[:, 0] * out[:, 1]))


UNIT_SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def interface_offset(lam: Laminate, poly=UNIT_SQUARE):
    """Offset ``s`` such that the half-plane ``n . x < s`` covers fraction f1 of ``poly``."""
    n = lam.normal
    proj = poly @ n
    lo, hi = float(proj.min()), float(proj.max())
    total = _clip_area(poly, n, hi + 1.0)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _clip_area(poly, n, mid) < lam.f1 * total:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-16:
            break
    return 0.5 * (lo + hi)


def square_trace(lam: Laminate, fields: LaminateFields, nodes_per_edge=100):
    """Boundary trace of the unit square filled by a single-interface laminate.

    Nodes are placed uniformly on each edge plus split nodes at the corners
    and where the interface meets the boundary, so tractions (constant per
    phase and edge) and displacements (linear between nodes) are integrated
    exactly by the trapezoid rule.
    """
    n = lam.normal
    s = interface_offset(lam)
    sig = [from_mandel(fields.sigma1), from_mandel(fields.sigma2)]
    edge_normals = np.array([[0.0, -1.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]])
    xs, ts = [], []
    for k in range(4):
        p, q = UNIT_SQUARE[k], UNIT_SQUARE[(k + 1) % 4]
        params = list(np.linspace(0.0, 1.0, nodes_per_edge + 1))
        dp, dq = n @ p - s, n @ q - s
        cut = None
        if dp * dq < 0:
            cut = dp / (dp - dq)
            params = sorted(set(params) | {cut})
        for tpar in params:
            pt = p + tpar * (q - p)
            side = n @ pt - s
            if cut is not None and tpar == cut:
                # both sides of the interface, in traversal order
                copies = [0, 1] if dp < 0 else [1, 0]
            else:
                copies = [0 if side < 0 else 1]
            for c in copies:
                xs.append(pt)
                ts.append(sig[c] @ edge_normals[k])
    x = np.array(xs)
    t = np.array(ts)
    u = displacement(lam, fields, x, offset=s)
    return BoundaryTrace(x, t, u)
