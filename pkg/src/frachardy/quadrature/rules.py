"""One-dimensional rules: power-substituted adaptive Gauss-Kronrod and tanh-sinh nodes."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.special import expit

from ..errors import NonIntegrableError
from .estimate import IntegralEstimate

# tanh-sinh nodes never come closer than this to the endpoints of (0, 1)
TS_FLOOR_LEFT = 1e-100
TS_FLOOR_RIGHT = 1e-14


def _check_exponent(e):
    if e is not None and e <= -1:
        raise NonIntegrableError(f"endpoint exponent {e} <= -1 is not integrable")


def _power_half(f, a, h, e, rel_tol, from_right):
    """Integral of f over [a, a+h] (or [a-h, a] when from_right) with the
    substitution |x - a| = h u^{1/(1+e)} that cancels a |x - a|^e endpoint."""
    if e is None or e == 0:
        lo, hi = (a - h, a) if from_right else (a, a + h)
        val, err, info = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=rel_tol, limit=400, full_output=1)[:3]
        return val, err, info["neval"]
    k = 1.0 / (1.0 + e)

    def g(u):
        off = h * u**k
        x = a - off if from_right else a + off
        return f(x) * h * k * u ** (k - 1.0)

    val, err, info = integrate.quad(g, 0.0, 1.0, epsabs=0.0, epsrel=rel_tol, limit=400, full_output=1)[:3]
    return val, err, info["neval"]


def integrate_1d(f, a: float, b: float, endpoint_exponents=(None, None), rel_tol: float = 1e-10) -> IntegralEstimate:
    """Integrate f over (a, b) where f ~ (x-a)^left near a and (b-x)^right near b.

    The interval is split at its midpoint; each flagged half gets a power-law
    substitution that makes the leading endpoint behaviour bounded, then an
    adaptive Gauss-Kronrod (QUADPACK) pass runs to ``rel_tol``.  ``None``
    marks a regular endpoint.
    """
    left, right = endpoint_exponents
    _check_exponent(left)
    _check_exponent(right)
    if not b > a:
        raise ValueError("integrate_1d needs a < b")
    h = 0.5 * (b - a)
    v1, e1, n1 = _power_half(f, a, h, left, rel_tol, from_right=False)
    v2, e2, n2 = _power_half(f, b, h, right, rel_tol, from_right=True)
    return IntegralEstimate(v1 + v2, e1 + e2, n1 + n2)


@lru_cache(maxsize=None)
def tanh_sinh_unit(level: int = 4):
    """Tanh-sinh nodes on (0, 1) with step h = 2^-level.

    Returns (t, 1 - t, weights); the complement is computed directly so that
    nodes near t = 1 keep their gap to full relative precision.
    """
    h = 2.0**-level
    u_hi = math.asinh(math.log(1.0 / TS_FLOOR_RIGHT) / math.pi)
    u_lo = math.asinh(math.log(1.0 / TS_FLOOR_LEFT) / math.pi)
    ks = np.arange(-math.floor(u_lo / h), math.floor(u_hi / h) + 1)
    u = ks * h
    z = math.pi * np.sinh(u)
    t = expit(z)
    gap = expit(-z)
    wts = h * math.pi * np.cosh(u) * t * gap
    return t, gap, wts


@lru_cache(maxsize=None)
def tanh_sinh_interval(length: float, level: int = 4):
    """Tanh-sinh nodes on (0, length) as (x, length - x, weights)."""
    t, gap, w = tanh_sinh_unit(level)
    return t * length, gap * length, w * length


def log_tail_integral(values_at, s_max: float, level: int = 4, tail_span: float = 8.0):
    """Integral over s in (0, inf) of a function that decays like exp(-lam s).

    ``values_at(s)`` maps an array of s to integrand values.  (0, s_max) uses
    tanh-sinh; the remainder is closed with the exponential fitted to the last
    ``tail_span`` of the range.  Returns (value, tail_estimate).
    """
    s, _, w = tanh_sinh_interval(s_max, level)
    core = float(values_at(s) @ w)
    g = values_at(np.array([s_max - tail_span, s_max]))
    tail = 0.0
    if g[0] != 0 and g[1] != 0 and np.sign(g[0]) == np.sign(g[1]) and abs(g[1]) < abs(g[0]):
        lam = math.log(g[0] / g[1]) / tail_span
        tail = float(g[1] / lam)
    return core + tail, tail
