import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from frachardy.errors import ParameterError
from frachardy.special_fns import (
    KernelParams,
    check_power_sum_inequality,
    check_split_inequality,
    french_power,
    gamma_fn,
    phi_kernel,
    sphere_surface,
)


@pytest.mark.parametrize("x, expected", [(1.0, 1.0), (0.5, math.sqrt(math.pi)), (5.0, 24.0)])
def test_gamma_known_values(x, expected):
    assert gamma_fn(x) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
def test_gamma_rejects_nonpositive(x):
    with pytest.raises((ParameterError, ValueError)):
        gamma_fn(x)


@pytest.mark.parametrize("m, expected", [(0, 2.0), (1, 2 * math.pi), (2, 4 * math.pi)])
def test_sphere_surface_known(m, expected):
    assert sphere_surface(m) == pytest.approx(expected, rel=1e-14)


def test_sphere_surface_consistent_with_gamma():
    for m in range(8):
        assert sphere_surface(m) == pytest.approx(2 * math.pi ** ((m + 1) / 2) / gamma_fn((m + 1) / 2), rel=1e-14)


def test_sphere_surface_negative():
    with pytest.raises((ParameterError, ValueError)):
        sphere_surface(-1)


def test_phi_d1_branch():
    kp = KernelParams(1, 0.5, 2.0)
    assert phi_kernel(kp, 0.0) == pytest.approx(2.0, rel=1e-12)
    assert phi_kernel(kp, 0.5) == pytest.approx(4 + 4 / 9, rel=1e-12)


@pytest.mark.parametrize("s, p", [(0.5, 2.0), (0.3, 3.0), (0.7, 1.5)])
def test_phi_d3_closed_form(s, p):
    kp = KernelParams(3, s, p)
    sp = s * p
    for r in np.arange(1, 10) / 10:
        closed = 2 * math.pi * ((1 - r) ** (-1 - sp) - (1 + r) ** (-1 - sp)) / (r * (1 + sp))
        assert phi_kernel(kp, r) == pytest.approx(closed, rel=1e-9)


@pytest.mark.parametrize("d, s, p", [(2, 0.5, 2.0), (2, 0.2, 3.0), (4, 0.6, 1.5)])
def test_phi_matches_direct_quadrature(d, s, p):
    # Phi(r) = |S^{d-2}| int_{-1}^{1} (1-t^2)^{(d-3)/2} (1 - 2rt + r^2)^{-(d+sp)/2} dt
    sp = s * p
    kp = KernelParams(d, s, p)
    for r in (0.1, 0.5, 0.8):
        def f(phi):
            return math.sin(phi) ** (d - 2) * (1 - 2 * r * math.cos(phi) + r * r) ** (-(d + sp) / 2)

        ref = sphere_surface(d - 2) * integrate.quad(f, 0, math.pi, epsabs=0, epsrel=1e-13)[0]
        assert phi_kernel(kp, r) == pytest.approx(ref, rel=1e-9)


@pytest.mark.parametrize("d, s, p", [(1, 0.5, 2.0), (2, 0.5, 2.0), (3, 0.4, 3.0)])
def test_phi_strictly_increasing(d, s, p):
    kp = KernelParams(d, s, p)
    vals = np.asarray(phi_kernel(kp, np.linspace(0, 0.99, 200)))
    assert np.all(np.diff(vals) > 0)


@pytest.mark.parametrize("r", [1.0, 1.5, -0.1])
def test_phi_domain(r):
    with pytest.raises((ParameterError, ValueError)):
        phi_kernel(KernelParams(2, 0.5, 2.0), r)


def test_french_power_examples():
    assert french_power(-2.0, 2.0) == pytest.approx(-4.0)
    assert french_power(0.0, 0.7) == 0.0
    assert french_power(3.0, 0.5) == pytest.approx(math.sqrt(3))


@given(st.floats(-1e6, 1e6), st.floats(0.01, 5.0))
def test_french_power_odd(a, t):
    assert french_power(-a, t) == -french_power(a, t)


def test_split_inequality_examples():
    assert check_split_inequality(1, 1, 2, 2)
    assert check_split_inequality(0, 5, 3, 2)


def test_split_inequality_domain():
    with pytest.raises(ValueError):
        check_split_inequality(1, 1, 1.0, 2)
    with pytest.raises(ValueError):
        check_split_inequality(1, 1, 2, 1.0)


def test_split_inequality_randomized(rng):
    n = 20_000
    a = rng.normal(size=n) * 10 ** rng.uniform(-3, 3, n)
    b = rng.normal(size=n) * 10 ** rng.uniform(-3, 3, n)
    q = 1 + 10 ** rng.uniform(-2, 1, n)
    c = 1 + 10 ** rng.uniform(-3, 2, n)
    assert all(check_split_inequality(*args) for args in zip(a, b, q, c))


@settings(max_examples=300)
@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(1.01, 8.0), st.floats(1.01, 50.0))
def test_split_inequality_property(a, b, q, c):
    assert check_split_inequality(a, b, q, c)


def test_power_sum_examples():
    assert check_power_sum_inequality([1.0], 2.0)
    assert check_power_sum_inequality([1.0, 1.0], 2.0)
    with pytest.raises(ValueError):
        check_power_sum_inequality([1.0], 0.5)


def test_power_sum_randomized(rng):
    for _ in range(10_000):
        n = int(rng.integers(1, 12))
        vals = rng.normal(size=n) * 10 ** rng.uniform(-2, 2)
        assert check_power_sum_inequality(vals, 1 + 4 * rng.random())


@given(st.lists(st.floats(-1e4, 1e4), min_size=1, max_size=10), st.floats(1.0, 6.0))
def test_power_sum_property(values, g):
    assert check_power_sum_inequality(values, g)
