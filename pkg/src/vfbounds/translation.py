"""Volume-fraction bounds from the translation method with the null-Lagrangian det(sigma).

For a translation parameter ``alpha`` the translated tensor is
``L = S - alpha T``; it stays positive semi-definite for
``-1/(2 mu_max) <= alpha <= 1/(2 kappa_max)``.  Every quantity is diagonal
in the Mandel basis, so all products below are elementwise.  The slack
(left side minus right side of the inequality) is linear in ``alpha``,
so only the two endpoint values matter.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary import Measurements
from .errors import DomainError
from .intervals import FractionInterval, QuadraticInequality, fit_quadratic, intersect_all
from .mandel import IsotropicPhase, PhasePair, T_DIAG, compliance, det_mandel

DEFAULT_RTOL = 1e-9


def alpha_endpoints(phases: PhasePair):
    """``(-1/(2 mu_max), 1/(2 kappa_max))``."""
    return -0.5 / phases.mu_max, 0.5 / phases.kappa_max


def translated_tensor(p: IsotropicPhase, alpha):
    return compliance(p) - alpha * T_DIAG


@dataclass(frozen=True)
class TranslationContext:
    phases: PhasePair
    alpha: float

    def __post_init__(self):
        lo, hi = alpha_endpoints(self.phases)
        span = hi - lo
        if not (lo - 1e-12 * span <= self.alpha <= hi + 1e-12 * span):
            raise DomainError(f"alpha={self.alpha} outside [{lo}, {hi}]")

    @property
    def L1(self):
        return translated_tensor(self.phases.phase1, self.alpha)

    @property
    def L2(self):
        return translated_tensor(self.phases.phase2, self.alpha)


def _check_fraction(f1):
    if not 0.0 < f1 < 1.0:
        raise DomainError(f"f1 must lie in (0, 1), got {f1}")


def energy_scale(m: Measurements, phases: PhasePair):
    """A magnitude in energy units, homogeneous of degree 2 in the fields."""
    s = np.linalg.norm(m.sigma0)
    e = np.linalg.norm(m.eps0)
    kmax = max(phases.kappa_max, phases.mu_max)
    kmin = min(phases.kappa1, phases.kappa2, phases.mu1, phases.mu2)
    return max(abs(m.energy), s * e, abs(m.a) / kmin, kmax * abs(m.c), kmax * e * e, s * s / kmax, 1e-300)


def _lhs(m, alpha):
    return m.energy - float(m.sigma0 @ m.eps0) - 2.0 * alpha * (m.a - det_mandel(m.sigma0))


def slack(f1, m: Measurements, phases: PhasePair, alpha):
    """Left minus right side of the translation inequality at volume fraction ``f1``."""
    _check_fraction(f1)
    phases.require_contrast()
    f2 = 1.0 - f1
    L1 = translated_tensor(phases.phase1, alpha)
    L2 = translated_tensor(phases.phase2, alpha)
    dS = compliance(phases.phase1) - compliance(phases.phase2)  # == L1 - L2
    sigma0, eps0 = m.sigma0, m.eps0
    e0 = eps0 - alpha * T_DIAG * sigma0
    Lavg = f1 * L1 + f2 * L2
    rhs = np.sum((e0 - Lavg * sigma0) * ((f2 * L1 + f1 * L2) * e0 - L1 * L2 * sigma0) / dS**2) / (f1 * f2)
    return _lhs(m, alpha) - float(rhs)


def endpoint_slacks(f1, m, phases):
    lo, hi = alpha_endpoints(phases)
    return slack(f1, m, phases, lo), slack(f1, m, phases, hi)


def alpha_linearity_defect(f1, m, phases):
    """Slack at the midpoint alpha minus the mean of the endpoint slacks."""
    lo, hi = alpha_endpoints(phases)
    mid = slack(f1, m, phases, 0.5 * (lo + hi))
    return mid - 0.5 * (slack(f1, m, phases, lo) + slack(f1, m, phases, hi))


def quadratic(m, phases, alpha, label="") -> QuadraticInequality:
    """Coefficients of ``f1 f2 slack(f1)`` as a quadratic in f1."""
    phases.require_contrast()
    return fit_quadratic(lambda f: f * (1.0 - f) * slack(f, m, phases, alpha), label=label)


def endpoint_quadratics(m, phases):
    lo, hi = alpha_endpoints(phases)
    return (quadratic(m, phases, lo, label="translation_alpha_lower"),
            quadratic(m, phases, hi, label="translation_alpha_upper"))


def invert_each(m, phases, rtol=DEFAULT_RTOL):
    """Solution intervals of the two endpoint inequalities, keyed by label."""
    tol = rtol * energy_scale(m, phases)
    out = {}
    for q in endpoint_quadratics(m, phases):
        out[q.label] = q.relaxed(tol).solve()
    return out


def invert(m, phases, rtol=DEFAULT_RTOL) -> FractionInterval:
    """Volume fractions compatible with both endpoint inequalities."""
    return intersect_all(invert_each(m, phases, rtol).values())


def phase_stress_averages(f1, m, phases, alpha):
    """Per-phase average stresses of the minimizing field (they depend on alpha only through e0)."""
    _check_fraction(f1)
    phases.require_contrast()
    f2 = 1.0 - f1
    L1 = translated_tensor(phases.phase1, alpha)
    L2 = translated_tensor(phases.phase2, alpha)
    dL = L1 - L2
    e0 = m.eps0 - alpha * T_DIAG * m.sigma0
    s1 = (e0 - L2 * m.sigma0) / (f1 * dL)
    s2 = -(e0 - L1 * m.sigma0) / (f2 * dL)
    return s1, s2


def sigma_hat(f1, m, phases, alpha):
    """Constant values ``(D, E)`` of ``L sigma_hat`` on phase 1 and phase 2."""
    s1, s2 = phase_stress_averages(f1, m, phases, alpha)
    L1 = translated_tensor(phases.phase1, alpha)
    L2 = translated_tensor(phases.phase2, alpha)
    return L1 * s1, L2 * s2


def attainability_residual(stress, phase_id, weights, m, phases, alpha, f1):
    """Weighted mean of ``|L sigma - L sigma_hat|^2`` over sample points.

    ``stress`` is (N, 3) Mandel, ``phase_id`` (N,) with values 1 or 2,
    ``weights`` (N,) volume weights summing to the body area.  Zero exactly
    when the field attains the bound at this ``alpha``.
    """
    stress = np.asarray(stress, dtype=float)
    phase_id = np.asarray(phase_id)
    weights = np.asarray(weights, dtype=float)
    D, E = sigma_hat(f1, m, phases, alpha)
    L1 = translated_tensor(phases.phase1, alpha)
    L2 = translated_tensor(phases.phase2, alpha)
    in1 = phase_id == 1
    target = np.where(in1[:, None], D, E)
    Ls = np.where(in1[:, None], L1 * stress, L2 * stress)
    r = np.sum((Ls - target) ** 2, axis=1)
    return float(np.sum(weights * r) / np.sum(weights))
