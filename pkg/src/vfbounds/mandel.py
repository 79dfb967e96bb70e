"""Tensor representations for 2-D isotropic elasticity.

Symmetric 2x2 tensors are stored as 3-vectors in the orthonormal basis

    I/sqrt(2),  diag(1, -1)/sqrt(2),  [[0, 1], [1, 0]]/sqrt(2)

("Mandel" vectors).  General 2x2 displacement gradients are stored as
4-vectors ``(F0, e1, e2, e3)``, where ``F0`` multiplies the antisymmetric
element ``[[0, 1], [-1, 0]]/sqrt(2)`` and ``(e1, e2, e3)`` is the Mandel
vector of the symmetric part.

Gradient matrices follow the column convention: ``grad[i, j] = d u_j / d x_i``,
i.e. the columns are the gradients of ``u_1`` and ``u_2``.  With this
convention ``F0 = (grad[0, 1] - grad[1, 0]) / sqrt(2)``; a counterclockwise
infinitesimal rotation ``u = w * (-y, x)`` has ``F0 = sqrt(2) * w``.

Isotropic compliance, stiffness and the translation matrix ``T`` are all
diagonal in the Mandel basis and are represented by their 3 diagonal
entries.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContrastError

SQRT2 = np.sqrt(2.0)

SYM_BASIS = np.array([
    [[1.0, 0.0], [0.0, 1.0]],
    [[1.0, 0.0], [0.0, -1.0]],
    [[0.0, 1.0], [1.0, 0.0]],
]) / SQRT2

GRAD_BASIS = np.array([
    [[0.0, 1.0], [-1.0, 0.0]],
    [[1.0, 0.0], [0.0, 1.0]],
    [[1.0, 0.0], [0.0, -1.0]],
    [[0.0, 1.0], [1.0, 0.0]],
]) / SQRT2

# diag(1, -1, -1): 0.5 * v . T v is the determinant of the represented matrix
T_DIAG = np.array([1.0, -1.0, -1.0])


@dataclass(frozen=True)
class IsotropicPhase:
    """A 2-D isotropic elastic material with bulk modulus ``kappa`` and shear modulus ``mu``."""

    kappa: float
    mu: float

    def __post_init__(self):
        if not (np.isfinite(self.kappa) and np.isfinite(self.mu)):
            raise ValueError("moduli must be finite")
        if self.kappa <= 0 or self.mu <= 0:
            raise ValueError(f"moduli must be positive, got kappa={self.kappa}, mu={self.mu}")


@dataclass(frozen=True)
class PhasePair:
    phase1: IsotropicPhase
    phase2: IsotropicPhase

    @classmethod
    def from_moduli(cls, kappa1, mu1, kappa2, mu2):
        return cls(IsotropicPhase(float(kappa1), float(mu1)), IsotropicPhase(float(kappa2), float(mu2)))

    @property
    def kappa1(self):
        return self.phase1.kappa

    @property
    def mu1(self):
        return self.phase1.mu

    @property
    def kappa2(self):
        return self.phase2.kappa

    @property
    def mu2(self):
        return self.phase2.mu

    @property
    def kappa_max(self):
        return max(self.kappa1, self.kappa2)

    @property
    def mu_max(self):
        return max(self.mu1, self.mu2)

    def swapped(self):
        return PhasePair(self.phase2, self.phase1)

    def require_contrast(self):
        """Raise :class:`ContrastError` unless both moduli differ between the phases."""
        if self.kappa1 == self.kappa2 or self.mu1 == self.mu2:
            raise ContrastError(
                "bounds need kappa1 != kappa2 and mu1 != mu2 "
                f"(got kappa={self.kappa1}, {self.kappa2}; mu={self.mu1}, {self.mu2})"
            )


def to_mandel(A):
    """Mandel vector of a symmetric 2x2 matrix (only the upper triangle is read)."""
    A = np.asarray(A, dtype=float)
    a11, a22, a12 = A[..., 0, 0], A[..., 1, 1], A[..., 0, 1]
    return np.stack([(a11 + a22) / SQRT2, (a11 - a22) / SQRT2, 2.0 * a12 / SQRT2], axis=-1)


def from_mandel(v):
    """Inverse of :func:`to_mandel`."""
    v = np.asarray(v, dtype=float)
    return np.einsum("...k,kij->...ij", v, SYM_BASIS)


def det_mandel(v):
    """Determinant of the symmetric matrix represented by ``v``: ``0.5 * v . T v``."""
    v = np.asarray(v, dtype=float)
    return 0.5 * np.sum(T_DIAG * v * v, axis=-1)


def grad4_from_matrix(G):
    """4-vector ``(F0, e1, e2, e3)`` of a 2x2 gradient in the column convention."""
    G = np.asarray(G, dtype=float)
    return np.einsum("...ij,kij->...k", G, GRAD_BASIS)


def matrix_from_grad4(g):
    g = np.asarray(g, dtype=float)
    return np.einsum("...k,kij->...ij", g, GRAD_BASIS)


def grad4_from_jacobian(J):
    """Same as :func:`grad4_from_matrix` for a Jacobian ``J[i, j] = d u_i / d x_j``."""
    return grad4_from_matrix(np.swapaxes(np.asarray(J, dtype=float), -1, -2))


def det_grad4(g):
    """Determinant of the gradient represented by ``g``: ``0.5 (F0^2 + e1^2 - e2^2 - e3^2)``."""
    g = np.asarray(g, dtype=float)
    return 0.5 * (g[..., 0] ** 2 + g[..., 1] ** 2 - g[..., 2] ** 2 - g[..., 3] ** 2)


def sym_part(g):
    """Mandel vector of the symmetric part of a gradient 4-vector."""
    return np.asarray(g, dtype=float)[..., 1:]


def compliance(p: IsotropicPhase):
    """Diagonal of the compliance ``S = 0.5 diag(1/kappa, 1/mu, 1/mu)``."""
    return 0.5 * np.array([1.0 / p.kappa, 1.0 / p.mu, 1.0 / p.mu])


def stiffness(p: IsotropicPhase):
    """Diagonal of the stiffness ``diag(2 kappa, 2 mu, 2 mu)``."""
    return np.array([2.0 * p.kappa, 2.0 * p.mu, 2.0 * p.mu])


def translation():
    """Diagonal of the translation matrix ``T``."""
    return T_DIAG.copy()


def rotate_mandel(v, angle):
    """Mandel vector of ``R A R^T`` for the counterclockwise rotation ``R`` by ``angle``.

    The bulk component is invariant; the two deviatoric components rotate by
    twice the angle.
    """
    v = np.asarray(v, dtype=float)
    c, s = np.cos(2.0 * angle), np.sin(2.0 * angle)
    out = np.array(v, copy=True)
    out[..., 1] = c * v[..., 1] - s * v[..., 2]
    out[..., 2] = s * v[..., 1] + c * v[..., 2]
    return out
