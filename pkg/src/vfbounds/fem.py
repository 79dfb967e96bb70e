"""Displacement finite elements on a pixel grid of the unit square.

Bilinear quadrilaterals with 2x2 Gauss quadrature, one isotropic phase per
cell, Dirichlet displacement on the whole boundary.  The interior system is
symmetric positive definite and is solved with Jacobi-preconditioned
conjugate gradients; identical inputs give identical outputs.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sps
import scipy.sparse.linalg as spla

from .boundary import BoundaryTrace, Measurements
from .errors import DomainError, SolverError
from .mandel import (
    PhasePair, det_grad4, det_mandel, grad4_from_jacobian, matrix_from_grad4, stiffness,
)

GAUSS = np.array([-1.0, 1.0]) / np.sqrt(3.0)
# local node order: (0,0), (1,0), (1,1), (0,1)
LOCAL = np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
SOLVER_RTOL = 1e-10


@dataclass(frozen=True)
class PixelGeometry:
    """Phase id (1 or 2) per cell, ``phase[iy, ix]`` with row 0 at the bottom."""

    phase: np.ndarray

    def __post_init__(self):
        ph = np.asarray(self.phase, dtype=int)
        if ph.ndim != 2 or ph.shape[0] != ph.shape[1] or ph.shape[0] < 2:
            raise DomainError(f"geometry must be an n x n grid with n >= 2, got shape {ph.shape}")
        if not np.all((ph == 1) | (ph == 2)):
            raise DomainError("phase ids must be 1 or 2")
        object.__setattr__(self, "phase", ph)

    @property
    def n(self):
        return self.phase.shape[0]

    @property
    def f1(self):
        return float(np.count_nonzero(self.phase == 1)) / self.phase.size


def _centers(n):
    c = (np.arange(n) + 0.5) / n
    X, Y = np.meshgrid(c, c)  # X[iy, ix]
    return X, Y


def geometry_disk(n, radius, center=(0.5, 0.5)) -> PixelGeometry:
    """Phase 1 in the cells whose centers lie strictly inside the disk."""
    if int(n) != n or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n}")
    if not 0.0 < radius < 0.5:
        raise DomainError(f"radius must lie in (0, 0.5), got {radius}")
    X, Y = _centers(int(n))
    inside = (X - center[0]) ** 2 + (Y - center[1]) ** 2 < radius**2
    return PixelGeometry(np.where(inside, 1, 2))


def geometry_stripes(n, f1, period) -> PixelGeometry:
    """Vertical stripes (layer normal along x): each period of ``period`` cells starts with phase 1."""
    if int(n) != n or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n}")
    if period < 1 or n % period:
        raise DomainError(f"period {period} must divide n={n}")
    if not 0.0 <= f1 <= 1.0:
        raise DomainError(f"f1 must lie in [0, 1], got {f1}")
    w1 = int(round(f1 * period))
    cols = np.where(np.arange(n) % period < w1, 1, 2)
    return PixelGeometry(np.tile(cols, (n, 1)))


def refine(geom: PixelGeometry, factor: int) -> PixelGeometry:
    """Split every cell into ``factor x factor`` cells; the phase layout and f1 are unchanged."""
    if int(factor) != factor or factor < 1:
        raise DomainError(f"refinement factor must be a positive integer, got {factor}")
    return PixelGeometry(np.kron(geom.phase, np.ones((int(factor), int(factor)), dtype=int)))


def read_geometry(path) -> PixelGeometry:
    """Text grid of '1'/'2' characters, n lines of n characters, first line = top row."""
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    n = len(lines)
    for i, ln in enumerate(lines, start=1):
        if len(ln) != n or set(ln) - {"1", "2"}:
            raise DomainError(f"geometry line {i}: expected {n} characters from '1'/'2'")
    grid = np.array([[int(ch) for ch in ln] for ln in lines])[::-1]
    return PixelGeometry(grid)


def write_geometry(path, geom: PixelGeometry):
    Path(path).write_text("\n".join("".join(str(v) for v in row) for row in geom.phase[::-1]) + "\n")


def _shape_derivatives(xi, eta, h):
    """d N_a / d x for the four local nodes at (xi, eta) on a square cell of side h; shape (4, 2)."""
    dxi = 0.25 * LOCAL[:, 0] * (1 + LOCAL[:, 1] * eta)
    deta = 0.25 * LOCAL[:, 1] * (1 + LOCAL[:, 0] * xi)
    return np.stack([dxi, deta], axis=1) * (2.0 / h)


def _voigt_B(dN):
    B = np.zeros((3, 8))
    B[0, 0::2] = dN[:, 0]
    B[1, 1::2] = dN[:, 1]
    B[2, 0::2] = dN[:, 1]
    B[2, 1::2] = dN[:, 0]
    return B


D_BULK = np.array([[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 0.0]])
D_SHEAR = np.array([[1.0, -1.0, 0.0], [-1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])


def _element_matrices(h):
    Kb = np.zeros((8, 8))
    Ks = np.zeros((8, 8))
    w = h * h / 4.0
    for xi in GAUSS:
        for eta in GAUSS:
            B = _voigt_B(_shape_derivatives(xi, eta, h))
            Kb += w * B.T @ D_BULK @ B
            Ks += w * B.T @ D_SHEAR @ B
    return Kb, Ks


def _cell_nodes(n):
    ix, iy = np.meshgrid(np.arange(n), np.arange(n))  # [iy, ix]
    base = iy * (n + 1) + ix
    return np.stack([base, base + 1, base + n + 2, base + n + 1], axis=-1)  # (n, n, 4)


def node_coords(n):
    g = np.arange(n + 1) / n
    X, Y = np.meshgrid(g, g)
    return np.stack([X.ravel(), Y.ravel()], axis=1)


def boundary_nodes(n):
    idx = np.arange((n + 1) ** 2).reshape(n + 1, n + 1)
    mask = np.zeros_like(idx, dtype=bool)
    mask[0, :] = mask[-1, :] = mask[:, 0] = mask[:, -1] = True
    return idx[mask]


@dataclass
class FemSolution:
    geometry: PixelGeometry
    phases: PhasePair
    u: np.ndarray           # nodal displacements (N, 2)
    grad: np.ndarray        # gradient 4-vectors at Gauss points (n, n, 4, 4)
    strain: np.ndarray      # Mandel strain (n, n, 4, 3)
    stress: np.ndarray      # Mandel stress (n, n, 4, 3)
    weights: np.ndarray     # quadrature weights (n, n, 4)
    residual: float
    iterations: int
    stiffness_matrix: sps.csr_matrix

    @property
    def n(self):
        return self.geometry.n

    def phase_at_points(self):
        return np.repeat(self.geometry.phase[:, :, None], 4, axis=2)


def assemble(geom: PixelGeometry, phases: PhasePair):
    n = geom.n
    h = 1.0 / n
    Kb, Ks = _element_matrices(h)
    kap = np.where(geom.phase == 1, phases.kappa1, phases.kappa2)
    mu = np.where(geom.phase == 1, phases.mu1, phases.mu2)
    Ke = kap[..., None, None] * Kb + mu[..., None, None] * Ks  # (n, n, 8, 8)
    nodes = _cell_nodes(n)
    dofs = np.stack([2 * nodes, 2 * nodes + 1], axis=-1).reshape(n, n, 8)
    rows = np.broadcast_to(dofs[..., :, None], Ke.shape).ravel()
    cols = np.broadcast_to(dofs[..., None, :], Ke.shape).ravel()
    ndof = 2 * (n + 1) ** 2
    return sps.coo_matrix((Ke.ravel(), (rows, cols)), shape=(ndof, ndof)).tocsr()


def affine_displacement(avg_grad):
    """``u = J x`` for the Jacobian ``J`` of the gradient 4-vector ``avg_grad``."""
    J = matrix_from_grad4(np.asarray(avg_grad, dtype=float)).T
    return lambda x: np.asarray(x) @ J.T


def solve(geom: PixelGeometry, phases: PhasePair, avg_grad, boundary_displacement=None,
          rtol=SOLVER_RTOL, maxiter=None) -> FemSolution:
    """Displacement solution with ``u = boundary_displacement(x)`` on the boundary (affine by default)."""
    n = geom.n
    if boundary_displacement is None:
        boundary_displacement = affine_displacement(avg_grad)
    K = assemble(geom, phases)
    X = node_coords(n)
    bnodes = boundary_nodes(n)
    ndof = K.shape[0]
    fixed = np.zeros(ndof, dtype=bool)
    fixed[2 * bnodes] = fixed[2 * bnodes + 1] = True
    u = np.zeros(ndof)
    ub = np.asarray(boundary_displacement(X[bnodes]), dtype=float)
    u[2 * bnodes], u[2 * bnodes + 1] = ub[:, 0], ub[:, 1]
    free = np.flatnonzero(~fixed)
    Kff = K[free][:, free].tocsr()
    rhs = -(K[free][:, fixed] @ u[fixed])
    iters = 0
    rnorm = np.linalg.norm(rhs)
    if rnorm > 0:
        dinv = 1.0 / Kff.diagonal()
        M = spla.LinearOperator(Kff.shape, matvec=lambda v: dinv * v, dtype=float)

        def count(_):
            nonlocal iters
            iters += 1

        # tighter than the contract so the independently recomputed residual passes
        x, info = spla.cg(Kff, rhs, rtol=0.01 * rtol, atol=0.0, M=M,
                          maxiter=maxiter or 20 * len(free), callback=count)
        res = np.linalg.norm(Kff @ x - rhs) / rnorm
        if info != 0 or res > rtol:
            raise SolverError(f"conjugate gradients did not converge (info={info})", residual=res)
        u[free] = x
    else:
        res = 0.0
    U = u.reshape(-1, 2)
    grad, strain, stress, weights = _gauss_fields(geom, phases, U)
    return FemSolution(geom, phases, U, grad, strain, stress, weights, float(res), iters, K)


def _cell_jacobians(U, nodes, dN):
    """Jacobians d u_i / d x_j for every cell given shape derivatives dN (4, 2)."""
    ue = U[nodes]  # (n, n, 4, 2)
    return np.einsum("...ai,aj->...ij", ue, dN)


def _gauss_fields(geom, phases, U):
    n = geom.n
    h = 1.0 / n
    nodes = _cell_nodes(n)
    grads = []
    for eta in GAUSS:
        for xi in GAUSS:
            grads.append(grad4_from_jacobian(_cell_jacobians(U, nodes, _shape_derivatives(xi, eta, h))))
    grad = np.stack(grads, axis=2)  # (n, n, 4, 4)
    strain = grad[..., 1:]
    C = np.where((geom.phase == 1)[..., None], stiffness(phases.phase1), stiffness(phases.phase2))
    stress = C[:, :, None, :] * strain
    weights = np.full((n, n, 4), h * h / 4.0)
    return grad, strain, stress, weights


def measurements_of(sol: FemSolution) -> Measurements:
    """Null-Lagrangians by Gauss quadrature over the solution fields."""
    w = sol.weights[..., None]
    area = float(sol.weights.sum())
    sigma0 = np.sum(w * sol.stress, axis=(0, 1, 2)) / area
    grad0 = np.sum(w * sol.grad, axis=(0, 1, 2)) / area
    energy = float(np.sum(sol.weights * np.sum(sol.stress * sol.strain, axis=-1))) / area
    a = float(np.sum(sol.weights * det_mandel(sol.stress))) / area
    b = float(np.sum(sol.weights * det_grad4(sol.grad))) / area
    return Measurements(sigma0, grad0, energy, a, b, area)


def split_energies(sol: FemSolution):
    """True per-phase shear energies ``(E1s, E2s)`` by quadrature."""
    shear = np.sum(sol.stress[..., 1:] * sol.strain[..., 1:], axis=-1) * sol.weights
    ph = sol.phase_at_points()
    return float(shear[ph == 1].sum()), float(shear[ph == 2].sum())


def boundary_work(sol: FemSolution):
    """``sum_a R_a . u_a`` over boundary nodes, with nodal reactions ``R = K u``."""
    u = sol.u.ravel()
    R = (sol.stiffness_matrix @ u).reshape(-1, 2)
    b = boundary_nodes(sol.n)
    return float(np.sum(R[b] * sol.u[b]))


def _stress_at(sol, iy, ix, x):
    """Stress matrix of cell (iy, ix) evaluated at the physical point x."""
    n = sol.n
    h = 1.0 / n
    xi = 2.0 * (x[0] / h - ix) - 1.0
    eta = 2.0 * (x[1] / h - iy) - 1.0
    dN = _shape_derivatives(xi, eta, h)
    nodes = _cell_nodes(n)[iy, ix]
    J = sol.u[nodes].T @ dN
    eps = 0.5 * (J + J.T)
    p = sol.phases.phase1 if sol.geometry.phase[iy, ix] == 1 else sol.phases.phase2
    kap, mu = p.kappa, p.mu
    return 2.0 * mu * eps + (kap - mu) * np.trace(eps) * np.eye(2)


def _nodal_u_on_edge(sol, pts):
    """Bilinear interpolation of nodal displacements at boundary points."""
    n = sol.n
    out = np.empty((len(pts), 2))
    Ugrid = sol.u.reshape(n + 1, n + 1, 2)  # [iy, ix]
    for k, (x, y) in enumerate(pts):
        fx, fy = x * n, y * n
        ix = min(int(np.floor(fx)), n - 1)
        iy = min(int(np.floor(fy)), n - 1)
        sx, sy = fx - ix, fy - iy
        out[k] = ((1 - sx) * (1 - sy) * Ugrid[iy, ix] + sx * (1 - sy) * Ugrid[iy, ix + 1]
                  + sx * sy * Ugrid[iy + 1, ix + 1] + (1 - sx) * sy * Ugrid[iy + 1, ix])
    return out


def boundary_trace_of(sol: FemSolution, samples_per_edge=100) -> BoundaryTrace:
    """Counterclockwise trace of the unit square from the solution.

    Samples are uniform along each edge; element seams are added as split
    nodes carrying the tractions of the two adjacent boundary cells.
    """
    n = sol.n
    starts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    normals = np.array([[0.0, -1.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]])
    xs, ts = [], []
    for e in range(4):
        p, q = starts[e], starts[(e + 1) % 4]
        # exact fractions so samples that land on seams coincide with them
        samples = set((np.arange(samples_per_edge + 1) / samples_per_edge).tolist())
        seams = set((np.arange(1, n) / n).tolist())
        for s in sorted(samples | seams):
            x = p + s * (q - p)
            if s in seams:
                k = int(round(s * n))
                cells = (k - 1, k)
            else:
                cells = (min(int(np.floor(s * n)), n - 1),)
            for c in cells:
                iy, ix = _edge_cell(e, c, n)
                xs.append(x)
                ts.append(_stress_at(sol, iy, ix, x) @ normals[e])
    X = np.array(xs)
    return BoundaryTrace(X, np.array(ts), _nodal_u_on_edge(sol, X))


def _edge_cell(edge, c, n):
    """(iy, ix) of the c-th boundary cell along ``edge`` in counterclockwise traversal."""
    if edge == 0:
        return 0, c
    if edge == 1:
        return c, n - 1
    if edge == 2:
        return n - 1, n - 1 - c
    return n - 1 - c, 0


def stripes_displacement(geom: PixelGeometry, jump, grad1):
    """Exact displacement of vertical stripes: ``u = J1 x + jump * m2(x)``.

    ``m2(x)`` is the length of phase-2 cells in ``[0, x]`` along a row, so
    the gradient equals ``J1`` in phase 1 and ``J1 + jump (x) e_x`` in phase 2.
    """
    n = geom.n
    row = geom.phase[0]
    J1 = matrix_from_grad4(np.asarray(grad1, dtype=float)).T
    cum = np.concatenate([[0.0], np.cumsum(row == 2) / n])
    jump = np.asarray(jump, dtype=float)

    def u(x):
        x = np.asarray(x, dtype=float)
        pos = np.clip(x[:, 0] * n, 0, n)
        i = np.minimum(np.floor(pos).astype(int), n - 1)
        m2 = cum[i] + (pos - i) / n * (row[i] == 2)
        return x @ J1.T + m2[:, None] * jump[None, :]

    return u
