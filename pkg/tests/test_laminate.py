import numpy as np
import pytest

from vfbounds import boundary, laminate, splitting, translation
from vfbounds.errors import DomainError
from vfbounds.mandel import PhasePair, compliance, det_mandel, from_mandel, rotate_mandel, to_mandel
from factories import L0, L0_SIGMA0, P0, random_laminate, random_phases, rotation


@pytest.fixture(scope="module")
def l0_fields():
    return laminate.solve(L0, laminate.hydrostatic())


def test_l0_fields(l0_fields):
    f = l0_fields
    np.testing.assert_allclose(f.jump, (8 / 9, 0), atol=1e-14)
    np.testing.assert_allclose(from_mandel(f.eps1), np.diag([5 / 9, 1]), atol=1e-14)
    np.testing.assert_allclose(from_mandel(f.eps2), np.diag([13 / 9, 1]), atol=1e-14)
    np.testing.assert_allclose(from_mandel(f.sigma1), np.diag([8 / 3, 32 / 9]), atol=1e-14)
    np.testing.assert_allclose(from_mandel(f.sigma2), np.diag([8 / 3, 20 / 9]), atol=1e-14)
    assert f.grad1[0] == 0.0 and f.grad2[0] == 0.0


def test_l0_measurements(l0_fields):
    m = laminate.measurements_of(l0_fields)
    np.testing.assert_allclose(from_mandel(m.sigma0), L0_SIGMA0, atol=1e-14)
    np.testing.assert_allclose(m.grad0, laminate.hydrostatic(), atol=1e-14)
    assert (m.energy, m.a, m.b, m.c) == pytest.approx((50 / 9, 208 / 27, 1.0, 1.0), abs=1e-13)
    # composite identities
    assert m.energy == pytest.approx(m.sigma0 @ m.eps0, abs=1e-13)
    assert m.a == pytest.approx(det_mandel(m.sigma0), abs=1e-13)
    assert m.b == pytest.approx(det_mandel(m.eps0), abs=1e-13)


def test_equal_phases_give_uniform_fields(rng):
    same = PhasePair.from_moduli(1.5, 0.8, 1.5, 0.8)
    g = rng.normal(size=4)
    f = laminate.solve(laminate.Laminate(0.7, 0.3, same), g)
    np.testing.assert_allclose(f.jump, 0, atol=1e-14)
    np.testing.assert_allclose(f.grad1, g, atol=1e-14)
    np.testing.assert_allclose(f.grad2, g, atol=1e-14)


def test_zero_loading():
    m = laminate.measurements_of(laminate.solve(L0, np.zeros(4)))
    assert not np.any(m.sigma0) and (m.energy, m.a, m.b) == (0, 0, 0)


def test_interface_conditions_random(rng):
    for _ in range(50):
        lam = random_laminate(rng)
        g = rng.normal(size=4)
        f = laminate.solve(lam, g)
        n = lam.normal
        s1, s2 = from_mandel(f.sigma1), from_mandel(f.sigma2)
        assert np.linalg.norm((s2 - s1) @ n) <= 1e-12 * max(np.linalg.norm(s1), np.linalg.norm(s2))
        de = from_mandel(f.eps2) - from_mandel(f.eps1)
        np.testing.assert_allclose(de, 0.5 * (np.outer(f.jump, n) + np.outer(n, f.jump)), atol=1e-12)
        np.testing.assert_allclose(lam.f1 * f.grad1 + (1 - lam.f1) * f.grad2, g, atol=1e-12)
        m = laminate.measurements_of(f)
        assert m.energy == pytest.approx(m.sigma0 @ m.eps0, rel=1e-10, abs=1e-12)
        assert m.a == pytest.approx(det_mandel(m.sigma0), rel=1e-10, abs=1e-12)


def test_rotation_equivariance(rng):
    lam = random_laminate(rng)
    g = rng.normal(size=4)
    phi = 0.83
    f = laminate.solve(lam, g)
    g_rot = np.concatenate([[g[0]], rotate_mandel(g[1:], phi)])
    fr = laminate.solve(laminate.Laminate(lam.theta + phi, lam.f1, lam.phases), g_rot)
    np.testing.assert_allclose(fr.eps1, rotate_mandel(f.eps1, phi), atol=1e-12)
    np.testing.assert_allclose(fr.sigma2, rotate_mandel(f.sigma2, phi), atol=1e-12)
    np.testing.assert_allclose(fr.jump, rotation(phi) @ f.jump, atol=1e-12)
    np.testing.assert_allclose([fr.grad1[0], fr.grad2[0]], [f.grad1[0], f.grad2[0]], atol=1e-12)


def test_effective_compliance_equal_phases():
    same = PhasePair.from_moduli(1.5, 0.8, 1.5, 0.8)
    S = laminate.effective_compliance(laminate.Laminate(0.4, 0.6, same))
    np.testing.assert_allclose(S, np.diag(compliance(same.phase1)), atol=1e-14)


def test_effective_compliance_l0():
    S = laminate.effective_compliance(L0)
    np.testing.assert_allclose(S @ to_mandel(L0_SIGMA0), to_mandel(np.eye(2)), atol=1e-13)


def test_effective_compliance_eigenvalues_between_phases(rng):
    for _ in range(50):
        lam = random_laminate(rng)
        S = laminate.effective_compliance(lam)
        np.testing.assert_allclose(S, S.T, atol=1e-14)
        ev = np.linalg.eigvalsh(S)
        both = np.concatenate([compliance(lam.phases.phase1), compliance(lam.phases.phase2)])
        assert ev.min() >= both.min() * (1 - 1e-12)
        assert ev.max() <= both.max() * (1 + 1e-12)


def test_random_laminates_attain_both_bounds(rng):
    for _ in range(20):
        lam = random_laminate(rng)
        m = laminate.measurements_of(laminate.solve(lam, rng.normal(size=4)))
        scale = translation.energy_scale(m, lam.phases)
        assert max(abs(s) for s in translation.endpoint_slacks(lam.f1, m, lam.phases)) <= 1e-9 * scale
        assert splitting.feasible(lam.f1, splitting.split_knowns(m, lam.phases), lam.phases).feasible


def test_normal_aligned_hydrostatic_makes_every_half_plane_tight(rng):
    for _ in range(20):
        phases = random_phases(rng)
        lam = laminate.Laminate(0.0, rng.uniform(0.1, 0.9), phases)
        f = laminate.solve(lam, laminate.hydrostatic(rng.uniform(0.5, 2.0)))
        assert f.jump[1] == pytest.approx(0.0, abs=1e-14)
        k = splitting.split_knowns(laminate.measurements_of(f), phases)
        p = laminate.split_energies(f)
        for hp in splitting.half_planes(lam.f1, k, phases):
            assert abs(hp.slack(p)) <= 1e-10 * k.scale(phases) * hp.norm


def test_invalid_fraction():
    with pytest.raises(DomainError):
        laminate.Laminate(0.0, 1.0, P0)


def test_interface_offset_splits_area(rng):
    for _ in range(10):
        lam = random_laminate(rng)
        s = laminate.interface_offset(lam)
        assert laminate._clip_area(laminate.UNIT_SQUARE, lam.normal, s) == pytest.approx(lam.f1, abs=1e-12)


def test_displacement_continuous_across_interface(rng):
    lam = random_laminate(rng)
    f = laminate.solve(lam, rng.normal(size=4))
    s = laminate.interface_offset(lam)
    n = lam.normal
    t = np.array([-n[1], n[0]])
    on = s * n + 0.2 * t
    u_minus = laminate.displacement(lam, f, (on - 1e-9 * n)[None], offset=s)
    u_plus = laminate.displacement(lam, f, (on + 1e-9 * n)[None], offset=s)
    np.testing.assert_allclose(u_minus, u_plus, atol=1e-8)


def test_square_trace_is_exact_for_random_laminates(rng):
    for _ in range(10):
        lam = random_laminate(rng)
        f = laminate.solve(lam, rng.normal(size=4))
        m = laminate.measurements_of(f)
        got = boundary.ingest(laminate.square_trace(lam, f, 20))
        np.testing.assert_allclose(got.sigma0, m.sigma0, atol=1e-12)
        np.testing.assert_allclose(got.grad0, m.grad0, atol=1e-12)
        assert (got.energy, got.a, got.b) == pytest.approx((m.energy, m.a, m.b), abs=1e-11)
