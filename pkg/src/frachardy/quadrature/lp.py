"""Weighted single integrals  int |u(x)|^P |x_k|^{-e} [ / ln^q(4R/|x|) ] dx.

The families in :mod:`frachardy.functions` admit exact dimension reductions:

* radial profiles (k = d): one radial integral, closed-form power tails;
* bumps: the (d-k)-dimensional slices of |u|^P have closed-form mass, leaving
  a k-dimensional integral that is done in polar coordinates around K;
* tensor products: product of a k-dimensional radial integral and the
  (d-k)-dimensional mass of phi_N;
* ground-state products, dilations and disjoint superpositions: reduced to
  their constituents.

Anything else falls back to a composite tensor Gauss-Legendre rule on the
support box, with the error estimated from two resolutions.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import NonIntegrableError
from ..functions import (
    Bump,
    CounterexampleEps,
    Dilation,
    GroundStateProduct,
    RadialProfile,
    Superposition,
    TensorSharpness,
    TestFunction,
    ZeroFunction,
)
from ..special_fns import sphere_surface
from .estimate import IntegralEstimate
from .rules import integrate_1d

__all__ = ["weighted_power_integral", "radial_power_integral"]

_PSI_NODES, _PSI_WEIGHTS = np.polynomial.legendre.leggauss(64)


def _log_factor(r, log_weight):
    if log_weight is None:
        return 1.0
    R, q = log_weight
    return np.log(4.0 * R / r) ** (-q)


def _log_critical(e_eff: float, dim: int, log_weight) -> bool:
    """r^{dim-1-e_eff} ln^{-q}(4R/r) with dim = e_eff is integrable at 0 exactly when q > 1."""
    return log_weight is not None and abs(e_eff - dim) < 1e-12 and log_weight[1] > 1


def _log_origin_integral(g, a: float, log_weight, rel_tol: float) -> IntegralEstimate:
    """int_0^a g(r) r^{-1} ln^{-q}(4R/r) dr for bounded g, q > 1 and a < 4R.

    With r = 4R exp(-T/y), T = ln(4R/a), this is T^{1-q} int_0^1 g(r(y)) y^{q-2} dy.
    """
    R, q = log_weight
    T = math.log(4.0 * R / a)
    if not T > 0:
        raise NonIntegrableError("the logarithmic weight needs |x| < 4R")

    def h(y):
        y = float(y)
        if y <= 0:
            return 0.0
        r = 4.0 * R * math.exp(-T / y)
        return float(g(r)) * y ** (q - 2.0)

    return integrate_1d(h, 0.0, 1.0, (q - 2.0, None), rel_tol).scaled(T ** (1.0 - q))


def radial_power_integral(spec, dim: int, power: float, e: float, log_weight=None,
                          rel_tol: float = 1e-11) -> IntegralEstimate:
    """|S^{dim-1}| int_0^inf |f(r)|^power r^{dim-1-e} [ln^{-q}(4R/r)] dr for a RadialSpec."""
    S = sphere_surface(dim - 1)
    if spec.outer <= 0:
        return IntegralEstimate(0.0)
    base = dim - 1 - e
    log_origin = not spec.zero_at_origin and _log_critical(e - power * spec.origin_power, dim, log_weight)
    if not spec.zero_at_origin and base + power * spec.origin_power <= -1 and not log_origin:
        raise NonIntegrableError("weight exponent makes the integral diverge at the origin")

    def f(r):
        r = float(r)
        if r <= 0:
            return 0.0
        return float(abs(spec.f(np.float64(r))) ** power * r**base * _log_factor(r, log_weight))

    edges = [spec.inner] + [b for b in spec.all_breaks() if b > spec.inner] + [spec.outer]
    est = IntegralEstimate(0.0)
    for j, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
        if j == 0 and a == 0 and log_origin:
            def g(r):
                r = max(r, 1e-300)
                return abs(spec.f(np.float64(r))) ** power * r ** (base + 1.0)

            est = est + _log_origin_integral(g, b, log_weight, rel_tol)
            continue
        left = base + power * spec.origin_power if (j == 0 and a == 0) else None
        est = est + integrate_1d(f, a, b, (left, None), rel_tol)
    if spec.tail is not None:
        if log_weight is not None:
            raise NonIntegrableError("the logarithmic weight needs compact support")
        A, g = spec.tail
        rate = g * power - dim + e  # tail integrand ~ r^{-1-rate}
        if not rate > 0:
            raise NonIntegrableError("power tail is not integrable against this weight")
        est = est + IntegralEstimate(abs(A) ** power * spec.outer ** (dim - e) / rate)
    return est.scaled(S)


def _slice_mass_coeff(m_perp: int, mP: float) -> float:
    """c with int_{R^{m_perp}} (1 - (a^2+|z|^2)/R^2)_+^{mP} dz = c R^{m_perp} (1 - a^2/R^2)^{mP + m_perp/2}."""
    if m_perp == 0:
        return 1.0
    return 0.5 * sphere_surface(m_perp - 1) * math.exp(
        math.lgamma(m_perp / 2) + math.lgamma(mP + 1) - math.lgamma(m_perp / 2 + mP + 1))


def _bump_integral(u: Bump, k: int, power: float, e: float, log_weight, rel_tol) -> IntegralEstimate:
    d, R = u.d, u.radius
    m_perp = d - k
    mP = u.m * power
    Pp = mP + 0.5 * m_perp
    coeff = _slice_mass_coeff(m_perp, mP) * R**m_perp
    c = np.asarray(u.center[:k])
    cn = float(np.linalg.norm(c))
    crosses = cn < R

    def M_of_sq(dist2):
        return coeff * np.maximum(1.0 - dist2 / R**2, 0.0) ** Pp

    log_origin = crosses and _log_critical(e, k, log_weight)
    if crosses and k - 1 - e <= -1 and not log_origin:
        raise NonIntegrableError("the weight |x_k|^{-e} is not integrable near K inside the support")
    if log_origin:
        return _bump_log_origin(M_of_sq, c, R, k, Pp, log_weight, rel_tol)

    if k == 1:
        c1 = float(c[0])

        def f(t):
            t = float(t)
            if t == 0:
                return 0.0
            return float(abs(t) ** -e * M_of_sq((t - c1) ** 2) * _log_factor(abs(t), log_weight))

        lo, hi = c1 - R, c1 + R
        if lo < 0 < hi:
            return (integrate_1d(f, lo, 0.0, (Pp, -e), rel_tol)
                    + integrate_1d(f, 0.0, hi, (-e, Pp), rel_tol))
        return integrate_1d(f, lo, hi, (Pp, Pp), rel_tol)

    S_k2 = sphere_surface(k - 2)

    def A(r):
        if cn == 0:
            return sphere_surface(k - 1) * M_of_sq(r * r)
        kappa = (r * r + cn * cn - R * R) / (2 * r * cn)
        if kappa >= 1:
            return 0.0
        psi_max = math.pi if kappa <= -1 else math.acos(kappa)
        psi = 0.5 * psi_max * (_PSI_NODES + 1)
        dist2 = r * r + cn * cn - 2 * r * cn * np.cos(psi)
        vals = np.sin(psi) ** (k - 2) * M_of_sq(dist2)
        return S_k2 * 0.5 * psi_max * float(vals @ _PSI_WEIGHTS)

    def f(r):
        r = float(r)
        if r <= 0:
            return 0.0
        return float(r ** (k - 1 - e) * A(r) * _log_factor(r, log_weight))

    edge_exp = Pp + 0.5 * (k - 1)
    hi = cn + R
    if crosses:
        inner = R - cn
        if cn == 0:
            return integrate_1d(f, 0.0, hi, (k - 1 - e, Pp), rel_tol)
        return (integrate_1d(f, 0.0, inner, (k - 1 - e, None), rel_tol)
                + integrate_1d(f, inner, hi, (None, edge_exp), rel_tol))
    return integrate_1d(f, cn - R, hi, (edge_exp, edge_exp), rel_tol)


def _shell_mass(M_of_sq, c, R, k):
    """A(r) = int_{S^{k-1}} M(|r theta - c|^2) dtheta for the slice mass M of a bump centred at c."""
    cn = float(np.linalg.norm(c))
    if k == 1:
        return lambda r: float(M_of_sq((r - cn) ** 2) + M_of_sq((r + cn) ** 2))
    S_k2 = sphere_surface(k - 2)

    def A(r):
        if cn == 0 or r == 0:
            return sphere_surface(k - 1) * float(M_of_sq(r * r + cn * cn))
        kappa = (r * r + cn * cn - R * R) / (2 * r * cn)
        if kappa >= 1:
            return 0.0
        psi_max = math.pi if kappa <= -1 else math.acos(kappa)
        psi = 0.5 * psi_max * (_PSI_NODES + 1)
        dist2 = r * r + cn * cn - 2 * r * cn * np.cos(psi)
        vals = np.sin(psi) ** (k - 2) * M_of_sq(dist2)
        return S_k2 * 0.5 * psi_max * float(vals @ _PSI_WEIGHTS)

    return A


def _bump_log_origin(M_of_sq, c, R, k, Pp, log_weight, rel_tol) -> IntegralEstimate:
    """Bump crossing K = {0} against |x_k|^{-k} ln^{-q}(4R'/|x_k|): log substitution near 0."""
    A = _shell_mass(M_of_sq, c, R, k)
    cn = float(np.linalg.norm(c))
    inner, hi = R - cn, R + cn
    est = _log_origin_integral(A, inner, log_weight, rel_tol)

    def f(r):
        r = float(r)
        return A(r) / r * _log_factor(r, log_weight) if r > 0 else 0.0

    if hi > inner:
        est = est + integrate_1d(f, inner, hi, (None, Pp + 0.5 * (k - 1)), rel_tol)
    return est


def _tensor_integral(u: TensorSharpness, power: float, e: float, rel_tol) -> IntegralEstimate:
    eta_part = radial_power_integral(u.eta, u.k, power, e, None, rel_tol)
    m_perp = u.d - u.k
    # phi_N(y) = scale * b(y/N) with b the bump: int |phi_N|^P = scale^P N^{m_perp} int |b|^P
    from ..functions import BumpProfile

    phi_part = radial_power_integral(BumpProfile(u.phi_radius, u.phi_m).spec(), m_perp, power, 0.0, None, rel_tol)
    factor = u.phi_scale**power * u.N**m_perp
    a, b = eta_part, phi_part.scaled(factor)
    val = a.value * b.value
    err = abs(a.value) * b.std_error + abs(b.value) * a.std_error
    return IntegralEstimate(val, err, a.samples_used + b.samples_used)


def _fallback_box(u: TestFunction, k: int, power: float, e: float, log_weight, n_panels: int) -> float:
    lo, hi = u.support_box()
    d = u.d
    gx, gw = np.polynomial.legendre.leggauss(8)
    axes, wts = [], []
    for j in range(d):
        edges = np.linspace(lo[j], hi[j], n_panels + 1)
        if j < k and lo[j] < 0 < hi[j]:
            edges = np.unique(np.concatenate([edges, [0.0]]))
        a, b = edges[:-1], edges[1:]
        axes.append((0.5 * (a + b)[:, None] + 0.5 * (b - a)[:, None] * gx[None, :]).ravel())
        wts.append((0.5 * (b - a)[:, None] * gw[None, :]).ravel())
    total = 0.0
    # iterate over the first axis to bound memory
    rest = np.stack(np.meshgrid(*axes[1:], indexing="ij"), axis=-1).reshape(-1, d - 1) if d > 1 else None
    wrest = np.prod(np.stack(np.meshgrid(*wts[1:], indexing="ij"), axis=-1).reshape(-1, d - 1), axis=1) if d > 1 else None
    for x0, w0 in zip(axes[0], wts[0]):
        if d > 1:
            pts = np.concatenate([np.full((len(rest), 1), x0), rest], axis=1)
            w = w0 * wrest
        else:
            pts, w = np.array([[x0]]), np.array([w0])
        rk = np.linalg.norm(pts[:, :k], axis=1)
        vals = np.abs(u(pts)) ** power
        with np.errstate(divide="ignore"):
            wt = np.where(rk > 0, rk ** -e, 0.0)
            if log_weight is not None:
                wt = wt * np.where(rk > 0, _log_factor(np.where(rk > 0, rk, 1.0), log_weight), 0.0)
        total += float(np.sum(np.where(vals != 0, vals * wt, 0.0) * w))
    return total


def weighted_power_integral(u: TestFunction, k: int, power: float, e: float, log_weight=None,
                            rel_tol: float = 1e-11) -> IntegralEstimate:
    """int |u|^power |x_k|^{-e} [ln^{-q}(4R/|x|)] dx, dispatched on the family of u."""
    if log_weight is not None and k != u.d:
        raise NonIntegrableError("the logarithmic weight is defined for the point case k = d")
    if isinstance(u, ZeroFunction):
        return IntegralEstimate(0.0)
    if u.min_distance_to_K(k) == 0 and e >= k:
        spec = u.radial_spec() if k == u.d else None
        e_eff = e if spec is None else e - power * spec.origin_power
        zero_at_K = spec is not None and spec.zero_at_origin
        if not zero_at_K and e_eff >= k and not _log_critical(e_eff, k, log_weight):
            raise NonIntegrableError("the weight |x_k|^{-e} is not integrable near K on the support of u")
    if isinstance(u, GroundStateProduct) and u.k == k:
        return weighted_power_integral(u.inner, k, power, e - u.exponent * power, log_weight, rel_tol)
    if isinstance(u, Dilation):
        lam = u.lam
        lw = None if log_weight is None else (log_weight[0] * lam, log_weight[1])
        return weighted_power_integral(u.base, k, power, e, lw, rel_tol).scaled(lam ** (e - u.d))
    if isinstance(u, Superposition) and u.disjoint():
        est = IntegralEstimate(0.0)
        for c, term in u.terms:
            est = est + weighted_power_integral(term, k, power, e, log_weight, rel_tol).scaled(abs(c) ** power)
        return est
    spec = u.radial_spec() if k == u.d else None
    if spec is not None:
        return radial_power_integral(spec, u.d, power, e, log_weight, rel_tol)
    if isinstance(u, Bump):
        return _bump_integral(u, k, power, e, log_weight, rel_tol)
    if isinstance(u, TensorSharpness) and u.k == k and log_weight is None:
        return _tensor_integral(u, power, e, rel_tol)
    if isinstance(u, (RadialProfile, CounterexampleEps)):
        raise NonIntegrableError("radial families are supported only with k = d")
    coarse = _fallback_box(u, k, power, e, log_weight, 12)
    fine = _fallback_box(u, k, power, e, log_weight, 24)
    return IntegralEstimate(fine, abs(fine - coarse), 0)
