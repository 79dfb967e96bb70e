"""Null-Lagrangians of a 2-D body from sampled boundary tractions and displacements.

The boundary is a closed polygon given as an ordered list of nodes carrying
the traction ``t = sigma . n`` and the displacement ``u``.  All integrals use
the trapezoid rule on the given nodes.  Two consecutive nodes may share a
position: the zero-length segment between them carries no length, which is
how a traction discontinuity (a polygon corner, or an interface meeting the
boundary) is encoded.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from .errors import TraceParseError, TraceValidationError
from .mandel import grad4_from_matrix, to_mandel

POSITION_RTOL = 1e-14


@dataclass(frozen=True)
class Measurements:
    """Volume averages that boundary data determine.

    ``sigma0`` is the Mandel vector of the average stress, ``grad0`` the
    4-vector ``(F0, e1, e2, e3)`` of the average displacement gradient,
    ``energy`` = <sigma . eps>, ``a`` = <det sigma>, ``b`` = <det grad u>.
    """

    sigma0: np.ndarray
    grad0: np.ndarray
    energy: float
    a: float
    b: float
    area: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "sigma0", np.asarray(self.sigma0, dtype=float).reshape(3))
        object.__setattr__(self, "grad0", np.asarray(self.grad0, dtype=float).reshape(4))
        for name in ("energy", "a", "b", "area"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not self.area > 0:
            raise ValueError(f"area must be positive, got {self.area}")

    @property
    def eps0(self):
        return self.grad0[1:]

    @property
    def F0(self):
        return float(self.grad0[0])

    @property
    def c(self):
        """``b - F0^2 / 2``, a lower bound for half the average of e1^2 - e2^2 - e3^2."""
        return self.b - 0.5 * self.grad0[0] ** 2

    @classmethod
    def zero(cls):
        return cls(np.zeros(3), np.zeros(4), 0.0, 0.0, 0.0, 1.0)

    def scaled(self, s):
        """Measurements of the fields multiplied by ``s``."""
        return Measurements(s * self.sigma0, s * self.grad0, s * s * self.energy,
                            s * s * self.a, s * s * self.b, self.area)

    def to_dict(self):
        return {
            "sigma0": [float(x) for x in self.sigma0],
            "grad0": [float(x) for x in self.grad0],
            "energy": self.energy,
            "a": self.a,
            "b": self.b,
            "area": self.area,
        }

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(d["sigma0"], d["grad0"], d["energy"], d["a"], d["b"], d.get("area", 1.0))
        except KeyError as exc:
            raise ValueError(f"measurements missing field {exc.args[0]!r}") from None


def save_measurements(path, m: Measurements, extra=None):
    payload = m.to_dict()
    if extra:
        payload.update(extra)
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def load_measurements(path) -> Measurements:
    return Measurements.from_dict(json.loads(Path(path).read_text()))


@dataclass
class BoundaryTrace:
    """Boundary nodes: positions ``x`` (N, 2), tractions ``t`` (N, 2), displacements ``u`` (N, 2)."""

    x: np.ndarray
    t: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float).reshape(-1, 2)
        self.t = np.asarray(self.t, dtype=float).reshape(-1, 2)
        self.u = np.asarray(self.u, dtype=float).reshape(-1, 2)
        if not (len(self.x) == len(self.t) == len(self.u)):
            raise TraceValidationError("x, t and u must have the same number of nodes")

    def __len__(self):
        return len(self.x)

    def reversed(self):
        return BoundaryTrace(self.x[::-1].copy(), self.t[::-1].copy(), self.u[::-1].copy())

    def rolled(self, shift):
        return BoundaryTrace(np.roll(self.x, -shift, axis=0), np.roll(self.t, -shift, axis=0),
                             np.roll(self.u, -shift, axis=0))


def signed_area(x):
    x = np.asarray(x, dtype=float)
    xn = np.roll(x, -1, axis=0)
    return 0.5 * float(np.sum(x[:, 0] * xn[:, 1] - xn[:, 0] * x[:, 1]))


def _segments(trace):
    x0, x1 = trace.x, np.roll(trace.x, -1, axis=0)
    d = x1 - x0
    length = np.hypot(d[:, 0], d[:, 1])
    scale = max(np.max(np.abs(trace.x)), 1.0)
    nonzero = length > POSITION_RTOL * scale
    # outward normal of a counterclockwise polygon: tangent rotated clockwise
    n = np.zeros_like(d)
    n[nonzero] = np.stack([d[nonzero, 1], -d[nonzero, 0]], axis=1) / length[nonzero, None]
    return length, n, nonzero


def _flux_potential(q, length):
    """Cumulative trapezoid integral of nodal values ``q`` along the boundary, zero at node 0."""
    seg = 0.5 * length * (q + np.roll(q, -1))
    Q = np.concatenate([[0.0], np.cumsum(seg[:-1])])
    return Q, float(np.sum(seg))


def _a_integral(t, length, area):
    # the counterclockwise potential of q2 enters with a minus sign; calibrated
    # against uniform stress, for which a must equal det(sigma)
    q1, q2 = t[:, 0], t[:, 1]
    Q2, _ = _flux_potential(q2, length)
    integrand = q1 * Q2
    return -float(np.sum(0.5 * length * (integrand + np.roll(integrand, -1)))) / area


@dataclass(frozen=True)
class TraceDiagnostics:
    signed_area: float
    area: float
    reoriented: bool
    perimeter: float
    split_nodes: int
    force_residual: float
    moment_residual: float
    x0_shift_residual: float
    stress_asymmetry: float = 0.0

    def to_dict(self):
        return asdict(self)


def _check(trace: BoundaryTrace):
    if len(trace) < 3:
        raise TraceValidationError(f"a boundary trace needs at least 3 nodes, got {len(trace)}")
    for name in ("x", "t", "u"):
        if not np.all(np.isfinite(getattr(trace, name))):
            raise TraceValidationError(f"non-finite values in {name}")
    sa = signed_area(trace.x)
    scale = max(np.max(np.abs(trace.x)), 1.0)
    if abs(sa) <= 1e-12 * scale * scale:
        raise TraceValidationError("polygon has zero area")
    return sa


def orient(trace: BoundaryTrace):
    """Return ``(ccw_trace, signed_area, reoriented)``."""
    sa = _check(trace)
    if sa < 0:
        return trace.reversed(), sa, True
    return trace, sa, False


def validate(trace: BoundaryTrace) -> TraceDiagnostics:
    """Orientation, area, equilibrium residuals and x0-sensitivity of <det sigma>."""
    ccw, sa, flipped = orient(trace)
    length, _, nonzero = _segments(ccw)
    area = abs(sa)
    t, x = ccw.t, ccw.x
    w = 0.5 * (length + np.roll(length, 1))  # trapezoid weight per node
    force = np.sum(w[:, None] * t, axis=0)
    moment_density = x[:, 0] * t[:, 1] - x[:, 1] * t[:, 0]
    moment = float(np.sum(w * moment_density))
    a0 = _a_integral(t, length, area)
    shifted = ccw.rolled(1)
    l1, _, _ = _segments(shifted)
    a1 = _a_integral(shifted.t, l1, area)
    return TraceDiagnostics(
        signed_area=float(sa),
        area=float(area),
        reoriented=flipped,
        perimeter=float(np.sum(length)),
        split_nodes=int(np.sum(~nonzero)),
        force_residual=float(np.hypot(*force)),
        moment_residual=abs(moment),
        x0_shift_residual=abs(a1 - a0),
    )


def ingest(trace: BoundaryTrace, return_diagnostics=False):
    """The five null-Lagrangians of the body bounded by ``trace``.

    Returns :class:`Measurements` (and :class:`TraceDiagnostics` when
    ``return_diagnostics`` is set).  The average stress is symmetrized; its
    antisymmetric residual is reported in the diagnostics.
    """
    diag = validate(trace)
    ccw = trace.reversed() if diag.reoriented else trace
    length, n, _ = _segments(ccw)
    area = diag.area
    x, t, u = ccw.x, ccw.t, ccw.u
    xn, tn, un = (np.roll(v, -1, axis=0) for v in (x, t, u))

    # <sigma>_ij = (1/|O|) oint x_i t_j
    sig = 0.5 * np.einsum("s,si,sj->ij", length, x, t) + 0.5 * np.einsum("s,si,sj->ij", length, xn, tn)
    sig /= area
    asym = 0.5 * abs(sig[0, 1] - sig[1, 0])
    sig = 0.5 * (sig + sig.T)

    # <grad u>_ij = (1/|O|) oint n_i u_j; n is constant on each segment
    umid = 0.5 * (u + un)
    grad = np.einsum("s,si,sj->ij", length, n, umid) / area

    energy = float(np.sum(0.5 * length * (np.sum(t * u, axis=1) + np.sum(tn * un, axis=1)))) / area
    a = _a_integral(t, length, area)
    # b = (1/|O|) oint u1 du2/dt, exact for displacements linear on each segment
    b = float(np.sum(umid[:, 0] * (un[:, 1] - u[:, 1]))) / area

    m = Measurements(to_mandel(sig), grad4_from_matrix(grad), energy, a, b, area)
    if return_diagnostics:
        diag = replace(diag, stress_asymmetry=float(asym))
        return m, diag
    return m


def read_trace(path) -> BoundaryTrace:
    """Parse a comma-separated trace file: ``x, y, t1, t2, u1, u2`` per row, '#' lines ignored."""
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = [p.strip() for p in s.split(",")]
            if len(parts) != 6:
                raise TraceParseError(f"expected 6 comma-separated values, got {len(parts)}", lineno)
            try:
                vals = [float(p) for p in parts]
            except ValueError:
                raise TraceParseError(f"non-numeric value in {s!r}", lineno) from None
            rows.append(vals)
    if not rows:
        raise TraceParseError("no data rows")
    arr = np.array(rows)
    return BoundaryTrace(arr[:, 0:2], arr[:, 2:4], arr[:, 4:6])


def write_trace(path, trace: BoundaryTrace):
    with open(path, "w") as fh:
        fh.write("# x, y, t1, t2, u1, u2\n")
        for x, t, u in zip(trace.x, trace.t, trace.u):
            fh.write(",".join(repr(float(v)) for v in (*x, *t, *u)) + "\n")


def uniform_square_trace(sigma, grad, nodes_per_edge=100, origin=(0.0, 0.0), side=1.0):
    """Trace of a square carrying a uniform stress and affine displacement ``u = grad^T x``.

    ``sigma`` is a symmetric 2x2 matrix and ``grad`` a 2x2 gradient in the
    column convention.  Corner nodes are split so each edge carries its own
    traction.
    """
    sigma = np.asarray(sigma, dtype=float)
    grad = np.asarray(grad, dtype=float)
    x0, y0 = origin
    corners = np.array([[x0, y0], [x0 + side, y0], [x0 + side, y0 + side], [x0, y0 + side]])
    normals = np.array([[0.0, -1.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]])
    xs, ts = [], []
    for k in range(4):
        p, q = corners[k], corners[(k + 1) % 4]
        s = np.linspace(0.0, 1.0, nodes_per_edge + 1)[:, None]
        pts = p + s * (q - p)
        xs.append(pts)
        ts.append(np.tile(sigma @ normals[k], (len(pts), 1)))
    x = np.concatenate(xs)
    t = np.concatenate(ts)
    u = x @ grad
    return BoundaryTrace(x, t, u)
