import math

import numpy as np
import pytest

from frachardy.constants import HardyParams
from frachardy.errors import NonIntegrableError, ParameterError
from frachardy.functions import ZeroFunction, make_bump, make_radial, BumpProfile
from frachardy.quadrature.estimate import IntegralEstimate
from frachardy.quadrature.functionals import (
    QuadratureSpec,
    double_integral,
    e_omega_form,
    e_tilde_form,
    gagliardo_form,
    gagliardo_mc,
    gagliardo_radial,
    remainder_functional,
    w_r_form,
    weighted_lp,
)
from frachardy.quadrature.mc import PairIntegrand, mc_double_integral
from frachardy.quadrature.rules import integrate_1d


def z(a: IntegralEstimate, b: IntegralEstimate, scale_b: float = 1.0) -> float:
    return abs(a.value - scale_b * b.value) / math.hypot(a.std_error, scale_b * b.std_error)


def test_integrate_1d_examples():
    est = integrate_1d(lambda r: r**-0.5, 0.0, 1.0, (-0.5, None), 1e-10)
    assert est.value == pytest.approx(2.0, rel=1e-10)
    assert integrate_1d(lambda r: 1.0, 0.0, 1.0).value == pytest.approx(1.0, rel=1e-14)
    with pytest.raises(NonIntegrableError):
        integrate_1d(lambda r: 1 / r, 0.0, 1.0, (-1.0, None))


def test_integrate_1d_both_endpoints():
    # int_0^1 r^{-0.3} (1-r)^{-0.6} dr = B(0.7, 0.4)
    ref = math.gamma(0.7) * math.gamma(0.4) / math.gamma(1.1)
    est = integrate_1d(lambda r: r**-0.3 * (1 - r) ** -0.6, 0.0, 1.0, (-0.3, -0.6), 1e-10)
    assert est.value == pytest.approx(ref, rel=1e-9)


def test_spec_validation():
    with pytest.raises(ParameterError):
        QuadratureSpec(samples=10)
    with pytest.raises(ParameterError):
        QuadratureSpec(rel_tol=0.5)
    with pytest.raises(ParameterError):
        QuadratureSpec(engine="simpson")
    with pytest.raises(ParameterError):
        QuadratureSpec(seed=-1)


def test_zero_function_exact():
    hp = HardyParams(2, 0.6, 2.0, 1)
    assert gagliardo_mc(ZeroFunction(2), hp).value == 0.0
    hp2 = HardyParams(2, 0.6, 2.0, 2)
    assert gagliardo_radial(ZeroFunction(2), hp2).value == 0.0
    assert weighted_lp(ZeroFunction(2), hp.hardy_exponent, hp).value == 0.0


def test_mc_determinism(mc_spec):
    hp = HardyParams(2, 0.6, 2.0, 1, 0.2, -0.1)
    u = make_bump((0.3, 0.1), 0.5)
    a, b = gagliardo_mc(u, hp, mc_spec), gagliardo_mc(u, hp, mc_spec)
    assert a == b
    c = gagliardo_mc(u, hp, QuadratureSpec("monte_carlo", samples=mc_spec.samples, seed=2))
    assert c.value != a.value


def test_mc_unbiasedness_proxy():
    # P = 1_S(x) 1_S(y) |x-y|^2 cancels the kernel for d = 1, sigma = 1: I = |S|^2 = 0.64
    lo, hi = np.array([-0.3]), np.array([0.5])

    def fn(x, y):
        inside = np.all((x >= lo) & (x <= hi), axis=-1) & np.all((y >= lo) & (y <= hi), axis=-1)
        return np.where(inside, np.sum((x - y) ** 2, axis=-1), 0.0)

    item = PairIntegrand(fn, 2.0, 0.0)
    hits = 0
    for seed in range(100):
        res = mc_double_integral([item], 1, 1.0, (lo, hi), 4000, seed)
        hits += abs(res.means[0] - 0.64) <= 3 * res.std_errors()[0]
    assert hits >= 99


def test_mc_error_scaling():
    hp = HardyParams(2, 0.6, 2.0, 1)
    u = make_bump((0.6, 0.0), 0.4)
    e1 = gagliardo_mc(u, hp, QuadratureSpec("monte_carlo", samples=50_000, seed=3)).std_error
    e4 = gagliardo_mc(u, hp, QuadratureSpec("monte_carlo", samples=200_000, seed=3)).std_error
    assert 1.5 <= e1 / e4 <= 2.5


@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_mc_scaling_law(lam, mc_spec):
    hp = HardyParams(2, 0.6, 2.0, 1, 0.2, 0.1)
    u = make_bump((0.4, 0.2), 0.5)
    base = gagliardo_mc(u, hp, mc_spec)
    scaled = gagliardo_mc(u.scaled(lam), hp, QuadratureSpec("monte_carlo", samples=mc_spec.samples, seed=7))
    factor = lam ** (hp.sp - hp.d - hp.alpha - hp.beta)
    assert z(scaled, base, factor) <= 3


@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_radial_scaling_law(lam):
    hp = HardyParams(2, 0.5, 2.0, 2, 0.3, -0.2)
    u = make_radial(2, BumpProfile(0.8).spec())
    base = gagliardo_radial(u, hp)
    scaled = gagliardo_radial(u.scaled(lam), hp)
    assert scaled.value == pytest.approx(lam ** (hp.sp - hp.d - hp.alpha - hp.beta) * base.value, rel=1e-4)


def test_radial_vs_mc():
    hp = HardyParams(2, 0.6, 2.0, 2, 0.1, 0.2)
    u = make_bump((0.0, 0.0), 0.9)
    rad = gagliardo_radial(u, hp)
    mc = gagliardo_mc(u, hp, QuadratureSpec("monte_carlo", samples=200_000, seed=5))
    assert abs(rad.value - mc.value) <= 3 * math.hypot(mc.std_error, rad.std_error)


def test_radial_requires_point_case():
    with pytest.raises(ParameterError):
        gagliardo_radial(make_bump((0.0, 0.0), 0.5), HardyParams(2, 0.6, 2.0, 1))


def test_alpha_beta_symmetry():
    u = make_bump((0.4, 0.3), 0.6)
    hp, hq = HardyParams(2, 0.6, 2.0, 1, 0.3, 0.1), HardyParams(2, 0.6, 2.0, 1, 0.1, 0.3)
    a = gagliardo_mc(u, hp, QuadratureSpec("monte_carlo", samples=100_000, seed=11))
    b = gagliardo_mc(u, hq, QuadratureSpec("monte_carlo", samples=100_000, seed=12))
    assert z(a, b) <= 3
    rp = HardyParams(2, 0.5, 2.0, 2, 0.3, -0.1)
    rq = HardyParams(2, 0.5, 2.0, 2, -0.1, 0.3)
    v = make_bump((0.0, 0.0), 0.7)
    assert gagliardo_radial(v, rp).value == pytest.approx(gagliardo_radial(v, rq).value, rel=1e-8)


def test_weighted_lp_closed_form_radial():
    # int_{B_R} (1-|x|^2/R^2)^{2p} |x|^{-e} dx in d = 2, e = 0.4, p = 2 -> 2 pi R^{2-e} B(1-e/2, 5)/2
    hp = HardyParams(2, 0.6, 2.0, 2, 0.4, 0.4)
    R, e = 0.8, 0.4
    u = make_bump((0.0, 0.0), R, 2)
    ref = 2 * math.pi * R ** (2 - e) * 0.5 * math.gamma(1 - e / 2) * math.gamma(5) / math.gamma(6 - e / 2)
    assert weighted_lp(u, e, hp).value == pytest.approx(ref, rel=1e-9)


def test_weighted_lp_nonintegrable():
    hp = HardyParams(2, 0.6, 2.0, 1, 0.5, 0.5)  # subcritical: bumps may cross K
    with pytest.raises(NonIntegrableError):
        weighted_lp(make_bump((0.0, 0.0), 0.5), 1.0, hp)


def test_remainder_forms_vanish_on_constants():
    xk, yk = np.linspace(0.1, 1, 4), np.linspace(0.2, 2, 4)
    ones = np.full(4, 1.7)
    hp2 = HardyParams(2, 0.5, 2.0, 2, 0.1, 0.2)
    hp15 = HardyParams(2, 0.6, 1.5, 1, 0.1, 0.2)
    for form in (e_omega_form(hp2), e_tilde_form(hp15), w_r_form(hp2, 2.0), gagliardo_form(hp2)):
        assert np.all(form.fn(ones, ones, xk, yk) == 0)
    assert remainder_functional(ZeroFunction(2), hp2, "E_omega").value == 0.0


def test_double_integral_engines_agree():
    hp = HardyParams(2, 0.5, 2.0, 2, 0.2, 0.1)
    u = make_bump((0.0, 0.0), 0.6)
    rad = double_integral(u, gagliardo_form(hp), hp, QuadratureSpec("radial_reduction"))
    mc = double_integral(u, gagliardo_form(hp), hp, QuadratureSpec("monte_carlo", samples=100_000, seed=2))
    assert abs(rad.value - mc.value) <= 3 * mc.std_error


def test_e_tilde_weight_on_the_diagonal_shell():
    # |x_k| = |y_k|: W = omega^p = |x_k|^{-(k+a+b-sp)}; v-values 1 and 0 make the difference factor 1
    hp = HardyParams(2, 0.6, 1.5, 1, 0.1, 0.2)
    r = np.array([0.3, 1.0, 2.5])
    out = e_tilde_form(hp).fn(np.ones(3), np.zeros(3), r, r)
    expected = r ** (-(hp.k + hp.alpha + hp.beta - hp.sp)) * r ** (hp.alpha + hp.beta)
    assert np.allclose(out, expected, rtol=1e-12)


@pytest.mark.parametrize("center, radius, expected", [
    ((0.0, 0.0), 0.5, 0.312223019620046145936815063703),
    ((0.0,), 0.4, 0.0863764494362222957679484992639),
    ((0.15,), 0.4, 0.0707321414987052887988250814632),
])
def test_log_critical_weight_at_origin(center, radius, expected):
    # int |u|^2 |x|^{-d} ln^{-3}(4.8/|x|) dx: integrable only thanks to the logarithm;
    # reference values from 30-digit quadrature in the variable t = ln(4R/|x|)
    from frachardy.quadrature.lp import weighted_power_integral

    u = make_bump(center, radius, 2)
    d = len(center)
    assert weighted_power_integral(u, d, 2.0, float(d), (1.2, 3.0)).value == pytest.approx(expected, rel=1e-9)
    with pytest.raises(NonIntegrableError):
        weighted_power_integral(u, d, 2.0, float(d), (1.2, 1.0))
