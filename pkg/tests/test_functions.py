import math

import numpy as np
import pytest

from frachardy.constants import HardyParams
from frachardy.errors import ParameterError, PreconditionError
from frachardy.functions import (
    AnnulusProfile,
    FlatSubmanifold,
    GroundStateProduct,
    Superposition,
    ZeroFunction,
    bump_power_mass,
    counterexample_truncation_radius,
    ground_state_split,
    log_weight,
    make_bump,
    make_counterexample,
    make_radial,
    make_sharpness_sequence,
)
from frachardy.quadrature.functionals import weighted_lp
from frachardy.special_fns import sphere_surface


def test_bump_values():
    u = make_bump((0.5, -0.2), 0.8, 1)
    c = np.array([0.5, -0.2])
    assert u(c) == pytest.approx(1.0)
    assert u(c + [0.8, 0.0]) == pytest.approx(0.0, abs=1e-15)
    assert u(c + [0.8 / math.sqrt(2), 0.0]) == pytest.approx(0.5)


def test_bump_vectorised_and_support_box(rng):
    u = make_bump((0.3, 0.1, -0.4), 0.6, 2)
    lo, hi = u.support_box()
    pts = rng.uniform(-3, 3, size=(20_000, 3))
    vals = u(pts)
    outside = np.any((pts < lo) | (pts > hi), axis=1)
    assert np.all(vals[outside] == 0)
    assert np.all(vals >= 0) and np.all(np.isfinite(vals))
    # boundary faces of the box are outside the open support
    face = rng.uniform(lo, hi, size=(1000, 3))
    face[:, 0] = hi[0]
    assert np.all(u(face) == 0)


def test_bump_rejects_bad_input():
    with pytest.raises(ParameterError):
        make_bump((0.0,), -1.0)
    with pytest.raises(ParameterError):
        make_bump((0.0,), 1.0, 0)


def test_flat_submanifold_distance(rng):
    K = FlatSubmanifold(3, 2)
    x = rng.normal(size=(100, 3))
    assert np.allclose(K.distance_to_K(x), np.linalg.norm(x[:, :2], axis=1))


def test_bump_mass_matches_quadrature():
    hp = HardyParams(2, 0.6, 2.0, 2)
    u = make_bump((0.0, 0.0), 0.7, 2)
    # int |u|^p over R^2 with zero weight exponent equals the closed-form mass
    est = weighted_lp(u, 0.0, hp)
    assert est.value == pytest.approx(bump_power_mass(2, 0.7, 2, 2.0), rel=1e-10)


def test_counterexample_continuity():
    hp = HardyParams(2, 0.5, 2.0, 2)
    u = make_counterexample(0.1, hp)
    x1 = np.array([[1 - 1e-12, 0.0], [1 + 1e-12, 0.0], [0.0, 1.0]])
    assert np.allclose(u(x1), 1.0, rtol=1e-10)


def test_counterexample_gamma_nonpositive():
    hp = HardyParams(2, 0.5, 2.0, 2, -0.9, -0.9)
    assert hp.gamma < 0
    with pytest.raises(PreconditionError, match="dual"):
        make_counterexample(0.1, hp)
    with pytest.raises(ParameterError):
        make_counterexample(0.1, HardyParams(2, 0.6, 2.0, 1))


@pytest.mark.parametrize("eps", [0.2, 0.05])
@pytest.mark.parametrize("tup", [(2, 0.5, 2.0, 0.0, 0.0), (3, 0.4, 2.5, 0.2, -0.1)])
def test_counterexample_hardy_closed_form(eps, tup):
    d, s, p, a, b = tup
    hp = HardyParams(d, s, p, d, a, b)
    u = make_counterexample(eps, hp)
    est = weighted_lp(u, hp.hardy_exponent, hp)
    closed = sphere_surface(d - 1) * (1 / (2 * (d + a + b - s * p)) + 1 / (p * eps))
    assert est.value == pytest.approx(closed, rel=1e-6)


def test_counterexample_sobolev_lower_bound():
    d, s, p = 2, 0.5, 2.0
    hp = HardyParams(d, s, p, d)
    q = d * p / (d - s * p)
    for eps in (0.2, 0.1, 0.05):
        u = make_counterexample(eps, hp)
        val = weighted_lp(u, 0.0, hp, power=q).value ** (p / q)
        assert val >= (sphere_surface(d - 1) / q) ** (p / q) * eps ** (-p / q)


def test_truncation_radius_budget():
    for eps, p in ((0.1, 2.0), (0.025, 3.0)):
        R = counterexample_truncation_radius(eps, p)
        assert R ** (-p * eps) <= 1e-9 * 1.0001


def test_ground_state_reconstruction(rng):
    hp = HardyParams(3, 0.6, 2.0, 2, 0.3, 0.2)
    u = make_bump((0.2, -0.1, 0.3), 0.7)
    v, omega = ground_state_split(u, hp)
    x = rng.uniform(-1, 1, size=(10_000, 3))
    ux = u(x)
    mask = ux != 0
    assert np.allclose(omega(x)[mask] * v(x)[mask], ux[mask], rtol=1e-12, atol=0)
    assert np.allclose(omega(x) ** hp.p * np.abs(v(x)) ** hp.p, np.abs(ux) ** hp.p, rtol=1e-11, atol=1e-300)


def test_ground_state_trivial_gamma():
    hp = HardyParams(2, 0.5, 2.0, 2, -0.5, 0.0)  # gamma = (2 - 0.5 - 1)/2 != 0
    assert hp.gamma != 0
    hp0 = HardyParams(2, 0.5, 2.0, 1, 0.0, 0.0, allow_critical=True)
    assert hp0.gamma == 0
    u = make_bump((0.3, 0.2), 0.5)
    v, omega = ground_state_split(u, hp0)
    assert v is u
    assert np.all(omega(np.ones((5, 2))) == 1.0)


def test_ground_state_of_omega_is_one(rng):
    hp = HardyParams(2, 0.6, 2.0, 1, 0.2, 0.1)
    inner = make_bump((1.5, 0.0), 0.5)
    # u = omega * inner  ->  v = inner
    u = GroundStateProduct(inner, -hp.gamma, hp.k)
    v, omega = ground_state_split(u, hp)
    x = rng.uniform([1.0, -0.5], [2.0, 0.5], size=(1000, 2))
    assert np.allclose(v(x), inner(x), rtol=1e-12)


def test_log_weight_examples():
    R = 0.7
    assert log_weight(np.array([R, 0.0]), R, 2.0) == pytest.approx(math.log(4) ** 2)
    assert log_weight(np.array([0.0, 4 * R / math.e]), R, 3.0) == pytest.approx(1.0)
    assert log_weight(np.array([R / 4, 0.0]), R, 2.0) == pytest.approx(math.log(16) ** 2, rel=1e-12)
    assert math.log(16) ** 2 == pytest.approx(7.68725, abs=1e-5)
    with pytest.raises(ParameterError):
        log_weight(np.array([4 * R, 0.0]), R, 1.0)


def test_sharpness_sequence_structure():
    hp = HardyParams(2, 0.4, 2.0, 1)
    for N in (1.0, 4.0, 16.0):
        u = make_sharpness_sequence(hp, N)
        # ||phi_N||_p = 1
        y = np.linspace(-N, N, 200_001)[:, None]
        mass = np.trapezoid(np.abs(u.phi_N(y)) ** hp.p, y[:, 0]) if hasattr(np, "trapezoid") else \
            np.trapz(np.abs(u.phi_N(y)) ** hp.p, y[:, 0])
        assert mass == pytest.approx(1.0, rel=1e-6)
        xk = np.array([[0.3], [0.7]])
        pts = np.concatenate([xk, np.zeros((2, 1))], axis=1)
        assert np.allclose(u(pts), u.eta_values(xk) * u.phi_N(np.zeros((1, 1))))


def test_sharpness_denominator_independent_of_N():
    hp = HardyParams(3, 0.5, 2.0, 1, 0.1, 0.0)
    vals = [weighted_lp(make_sharpness_sequence(hp, N), hp.hardy_exponent, hp).value for N in (1, 4, 16, 64)]
    assert max(vals) / min(vals) - 1 < 1e-8


def test_sharpness_supercritical_needs_eta_off_origin():
    hp = HardyParams(2, 0.6, 2.0, 1)  # supercritical
    with pytest.raises(PreconditionError):
        make_sharpness_sequence(hp, 2.0, eta=make_bump((0.0,), 1.0).radial_spec())
    u = make_sharpness_sequence(hp, 2.0)
    assert u.min_distance_to_K(1) > 0


def test_superposition_and_zero(rng):
    a, b = make_bump((1.0, 0.0), 0.3), make_bump((-1.0, 0.0), 0.3)
    u = Superposition(((1.0, a), (-0.8, b)))
    x = rng.uniform(-2, 2, size=(1000, 2))
    assert np.allclose(u(x), a(x) - 0.8 * b(x))
    assert u.disjoint() and not u.nonnegative
    assert np.all(ZeroFunction(2)(x) == 0)


def test_radial_profile_matches_profile():
    prof = AnnulusProfile(1.0, 0.4)
    u = make_radial(2, prof.spec())
    x = np.array([[1.0, 0.0], [0.0, 0.8], [0.3, 0.4]])
    assert np.allclose(u(x), prof(np.linalg.norm(x, axis=1)))
