"""Angular-reduction engine for double integrals of radial functions (k = d).

For radial integrands the double integral over R^d x R^d reduces to

    |S^{d-1}| int int_{rho < r} Psym(r, rho) r^{d-1} rho^{d-1} r^{-d-sp} Phi(rho/r) drho dr

with Psym(r, rho) = P(r, rho) + P(rho, r).  Substituting rho = t r gives

    |S^{d-1}| int_0^inf r^{d-1-sp} int_0^1 Psym(r, t r) t^{d-1} Phi(t) dt dr.

The diagonal t -> 1 is an endpoint of the inner integral, so tanh-sinh nodes
(computed together with the exact complement 1 - t) resolve the (1-t)^{-1-sp}
growth of Phi without cancellation.  The profile's non-smooth radii become
panel edges in r and, through t = b/r, in t.  Beyond the compact part the
outer variable is written r = R_c e^sigma.  A pure power tail beyond R_c
contributes a region (both radii > R_c) that is available in closed form
through a one-dimensional integral of the same type as the sharp constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..special_fns import phi_from_gap, sphere_surface
from .rules import tanh_sinh_interval, tanh_sinh_unit

_GL = np.polynomial.legendre.leggauss

__all__ = ["RadialKernel", "radial_pair_integral"]


@dataclass(frozen=True)
class RadialKernel:
    d: int
    sp: float

    def phi(self, gap):
        return phi_from_gap(gap, self.d, self.sp)


def _panel_nodes(t_lo, t_hi, gap_hi, level):
    """Tanh-sinh nodes on [t_lo, t_hi] (arrays over rows) with exact gaps 1 - t."""
    x, xc, w = tanh_sinh_unit(level)
    L = (t_hi - t_lo)[:, None]
    t = t_lo[:, None] + L * x[None, :]
    gap = gap_hi[:, None] + L * xc[None, :]
    return t, gap, L * w[None, :]


def _inner_sum(psym, kern, r, edges, gaps, level, cache):
    """sum over t-panels of int Psym(r, t r) t^{d-1} Phi(t) dt for each r (rows).

    ``edges`` is a list of arrays t_0 = 0 < t_1 < ... (one array per edge,
    each over the rows) and ``gaps`` the matching 1 - t_j.
    """
    d = kern.d
    total = np.zeros_like(r)
    for j in range(len(edges) - 1):
        t, gap, w = _panel_nodes(edges[j], edges[j + 1], gaps[j + 1], level)
        key = None
        if cache is not None and np.all(edges[j] == edges[j][0]) and np.all(edges[j + 1] == edges[j + 1][0]):
            key = (j, float(edges[j][0]), float(edges[j + 1][0]), level)
        if key is not None and key in cache:
            phi = cache[key]
        else:
            phi = kern.phi(gap[0] if key is not None else gap)
            if key is not None:
                cache[key] = phi
        vals = psym(r[:, None], t * r[:, None])
        with np.errstate(invalid="ignore"):
            vals = np.where(vals != 0, vals * t ** (d - 1) * phi, 0.0)
        total += np.sum(vals * w, axis=1)
    return total


def _region_inner(psym, kern, spec, level, cache):
    """r in (0, R_c): both radii inside the compact part."""
    R = spec.outer
    bks = spec.all_breaks()
    edges_r = [0.0] + [b for b in bks if b < R] + [R]
    total = 0.0
    for a, b in zip(edges_r[:-1], edges_r[1:]):
        if spec.inner > 0 and b <= spec.inner:
            continue  # f = 0 on both radii
        x, xc, w = tanh_sinh_interval(b - a, level)
        r = a + x
        active = [bb for bb in bks if bb <= a]
        edges = [np.zeros_like(r)] + [bb / r for bb in active] + [np.ones_like(r)]
        gaps = [np.ones_like(r)] + [(r - bb) / r for bb in active] + [np.zeros_like(r)]
        g = _inner_sum(psym, kern, r, edges, gaps, level, cache)
        total += float(np.sum(r ** (kern.d - 1 - kern.sp) * g * w))
    return total


def _sigma_nodes(sigma_max, level, gl_n):
    """Nodes on (0, sigma_max): tanh-sinh on (0, 2) then unit Gauss-Legendre panels."""
    x, _, w = tanh_sinh_interval(2.0, level)
    nodes, wts = [x], [w]
    if sigma_max > 2.0:
        gx, gw = _GL(gl_n)
        n_pan = int(math.ceil(sigma_max - 2.0))
        width = (sigma_max - 2.0) / n_pan
        starts = 2.0 + width * np.arange(n_pan)
        nodes.append((starts[:, None] + width * 0.5 * (gx[None, :] + 1)).ravel())
        wts.append(np.tile(width * 0.5 * gw, n_pan))
    return np.concatenate(nodes), np.concatenate(wts)


def _region_outer(psym, kern, spec, level, tail_rate, gl_n):
    """r > R_c, rho < R_c (with r = R_c e^sigma)."""
    R = spec.outer
    bks = [b for b in spec.all_breaks() if b < R]
    sigma_max = min(700.0, max(30.0, 40.0 / tail_rate))

    def g_of_sigma(sig):
        r = R * np.exp(sig)
        top = np.exp(-sig)
        edges = [np.zeros_like(r)] + [bb / r for bb in bks] + [top]
        gaps = [np.ones_like(r)] + [(r - bb) / r for bb in bks] + [-np.expm1(-sig)]
        g = _inner_sum(psym, kern, r, edges, gaps, level, None)
        return r ** (kern.d - kern.sp) * g  # r^{d-1-sp} * dr/dsigma

    sig, w = _sigma_nodes(sigma_max, level, gl_n)
    core = float(np.sum(g_of_sigma(sig) * w))
    span = 8.0 / tail_rate if tail_rate > 0 else 8.0
    span = min(span, 0.5 * sigma_max)
    ends = g_of_sigma(np.array([sigma_max - span, sigma_max]))
    tail = 0.0
    if ends[0] != 0 and ends[1] != 0 and np.sign(ends[0]) == np.sign(ends[1]) and abs(ends[1]) < abs(ends[0]):
        lam = math.log(ends[0] / ends[1]) / span
        tail = float(ends[1] / lam)
    return core + tail


def radial_pair_integral(psym, d: int, sp: float, spec, tail_rate: float,
                         level: int = 5, gl_n: int = 16, include_outer: bool = True) -> float:
    """|S^{d-1}| int int_{rho<r} Psym(r, rho) r^{d-1} rho^{d-1} r^{-d-sp} Phi(rho/r), restricted to rho < R_c.

    ``psym(r, rho)`` must be vectorised (broadcasting) and vanish when both
    radii exceed the compact part unless the caller adds that region itself.
    ``tail_rate`` is the exponential decay rate in sigma = log(r/R_c) of the
    outer-region integrand.
    """
    kern = RadialKernel(int(d), float(sp))
    cache = {}
    total = _region_inner(psym, kern, spec, level, cache)
    if include_outer:
        total += _region_outer(psym, kern, spec, level, tail_rate, gl_n)
    return sphere_surface(d - 1) * total
