"""Seeded importance-sampling Monte Carlo for singular double integrals.

Target: I = int int P(x, y) |x - y|^{-d-sigma} dx dy over R^d x R^d, where
P(x, y) = 0 unless x or y lies in a box S.  Relabelling the part with
y in S, x outside S gives

    I = int_{x in S} int_{y in R^d} [P(x, y) + 1{y not in S} P(y, x)] |x - y|^{-d-sigma} dy dx.

x is drawn from a mixture of the uniform law on S and (optionally) a law
concentrated near K with density proportional to |x_k|^c; y = x + h with h
drawn from a mixture of two truncated radial power laws |h|^{e-d} (e > 0,
matched to the near-diagonal behaviour |P| ~ |h|^e) at a small and a large
scale, plus a Pareto tail |h|^{-d-tau} beyond the large scale.

Work is split into fixed-size chunks; chunk j draws from
SeedSequence(seed, spawn_key=(j,)), so results depend only on (seed, samples).
Several integrands can share the same samples; the covariance of their
estimates is returned so that linear combinations get honest errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from ..special_fns import sphere_surface

__all__ = ["PairIntegrand", "MCResult", "mc_double_integral", "CHUNK"]

CHUNK = 1 << 15


@dataclass(frozen=True)
class PairIntegrand:
    """P(x, y) (without the kernel) plus what the sampler needs to know.

    diag_power: P(x, x+h) = O(|h|^diag_power) as h -> 0.
    tail_exponent: P(x, y) and P(y, x) grow at most like |y|^tail_exponent as |y| -> inf.
    k_exponent: exponent c of |x_k|^c describing the strongest weight singularity on K.
    """

    fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    diag_power: float
    tail_exponent: float
    k_exponent: float = 0.0


@dataclass(frozen=True)
class MCResult:
    means: np.ndarray
    cov: np.ndarray  # covariance matrix of the mean estimates
    samples: int

    def std_errors(self) -> np.ndarray:
        return np.sqrt(np.maximum(np.diag(self.cov), 0.0))

    def combination(self, coeffs) -> tuple:
        c = np.asarray(coeffs, dtype=float)
        return float(c @ self.means), float(math.sqrt(max(c @ self.cov @ c, 0.0)))


def _directions(rng, n, d):
    if d == 1:
        return np.where(rng.random(n) < 0.5, -1.0, 1.0)[:, None]
    g = rng.standard_normal((n, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


class _Proposal:
    def __init__(self, d, sigma, lo, hi, diag_power, tail_exp, k, k_exponent, proposal_exponent=None):
        self.d = d
        self.lo, self.hi = np.asarray(lo, float), np.asarray(hi, float)
        side = self.hi - self.lo
        if np.any(side <= 0):
            raise ValueError("degenerate support box")
        self.vol = float(np.prod(side))
        self.S = sphere_surface(d - 1)
        # radial exponent e of the diagonal law: density ~ |h|^{e - d}
        e = diag_power - sigma if proposal_exponent is None else proposal_exponent + d
        if not e > 0:
            raise ValueError("diagonal proposal exponent must exceed -d")
        self.e = e
        self.H = (2.0 * float(side.min()), 2.0 * float(np.linalg.norm(side)))
        self.tau = max(0.5 * (sigma - tail_exp), 0.05)
        self.w = (0.45, 0.35, 0.20)
        # optional K-concentrated component for x
        self.k = k
        dist_lo = np.where(self.lo[:k] > 0, self.lo[:k], np.where(self.hi[:k] < 0, -self.hi[:k], 0.0))
        self.use_k = bool(k_exponent < 0 and np.linalg.norm(dist_lo) < 1e-12)
        if self.use_k:
            self.c = max(k_exponent, -k + 0.25)
            self.rmax = float(np.linalg.norm(np.maximum(np.abs(self.lo[:k]), np.abs(self.hi[:k]))))
            self.wk = 0.3
            self.vol_rest = float(np.prod(side[k:])) if k < d else 1.0

    # -- x law
    def sample_x(self, rng, n):
        x = self.lo + (self.hi - self.lo) * rng.random((n, self.d))
        if self.use_k:
            pick = rng.random(n) < self.wk
            m = int(pick.sum())
            if m:
                k = self.k
                r = self.rmax * rng.random(m) ** (1.0 / (k + self.c))
                xk = r[:, None] * _directions(rng, m, k)
                xr = self.lo[k:] + (self.hi[k:] - self.lo[k:]) * rng.random((m, self.d - k))
                x[pick] = np.concatenate([xk, xr], axis=1)
        return x

    def density_x(self, x):
        inside = np.all((x >= self.lo) & (x <= self.hi), axis=1)
        dens = np.where(inside, 1.0 / self.vol, 0.0)
        if self.use_k:
            k = self.k
            rk = np.linalg.norm(x[:, :k], axis=1)
            norm = (k + self.c) / (sphere_surface(k - 1) * self.rmax ** (k + self.c) * self.vol_rest)
            qk = np.where((rk < self.rmax) & (rk > 0), norm * np.where(rk > 0, rk, 1.0) ** self.c, 0.0)
            rest_in = np.all((x[:, k:] >= self.lo[k:]) & (x[:, k:] <= self.hi[k:]), axis=1)
            dens = (1 - self.wk) * dens + self.wk * np.where(rest_in, qk, 0.0)
        return dens, inside

    # -- h law
    def sample_h(self, rng, n):
        u = rng.random(n)
        comp = np.searchsorted(np.cumsum(self.w), u, side="right")
        comp = np.minimum(comp, 2)
        v = rng.random(n)
        rho = np.empty(n)
        for j, H in enumerate(self.H):
            m = comp == j
            rho[m] = H * v[m] ** (1.0 / self.e)
        m = comp == 2
        rho[m] = self.H[1] * (1.0 - v[m]) ** (-1.0 / self.tau)
        return rho[:, None] * _directions(rng, n, self.d), rho

    def density_h(self, rho):
        dens = np.zeros_like(rho)
        for wj, H in zip(self.w[:2], self.H):
            c = self.e / (self.S * H**self.e)
            dens += np.where(rho < H, wj * c * rho ** (self.e - self.d), 0.0)
        Ht = self.H[1]
        ct = self.tau * Ht**self.tau / self.S
        dens += np.where(rho >= Ht, self.w[2] * ct * rho ** (-self.d - self.tau), 0.0)
        return dens


def mc_double_integral(integrands: Sequence[PairIntegrand], d: int, sigma: float, box, samples: int,
                       seed: int, k: Optional[int] = None, proposal_exponent: Optional[float] = None) -> MCResult:
    """Estimate int int P_i(x,y) |x-y|^{-d-sigma} for every integrand on shared samples."""
    lo, hi = box
    n_f = len(integrands)
    diag = min(f.diag_power for f in integrands)
    tail = max(f.tail_exponent for f in integrands)
    kexp = min(f.k_exponent for f in integrands)
    prop = _Proposal(d, sigma, lo, hi, diag, tail, k if k is not None else d, kexp, proposal_exponent)
    n_chunks = max(1, int(math.ceil(samples / CHUNK)))
    sums = np.zeros(n_f)
    sq = np.zeros((n_f, n_f))
    total = 0
    for j in range(n_chunks):
        n = min(CHUNK, samples - j * CHUNK)
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(j,)))
        x = prop.sample_x(rng, n)
        h, rho = prop.sample_h(rng, n)
        y = x + h
        qx, x_in = prop.density_x(x)
        qh = prop.density_h(rho)
        y_in = np.all((y >= prop.lo) & (y <= prop.hi), axis=1)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            kern = rho ** (-d - sigma) / (qx * qh)
        kern = np.where(x_in & (rho > 0), kern, 0.0)
        vals = np.empty((n_f, n))
        xs, ys = x[x_in], y[x_in]
        yout = ~y_in[x_in]
        for i, f in enumerate(integrands):
            row = np.zeros(n)
            pv = f.fn(xs, ys)
            if yout.any():
                pv[yout] += f.fn(ys[yout], xs[yout])
            row[x_in] = pv
            vals[i] = np.where(kern != 0, row * kern, 0.0)
        sums += vals.sum(axis=1)
        sq += vals @ vals.T
        total += n
    means = sums / total
    cov = (sq / total - np.outer(means, means)) / max(total - 1, 1)
    return MCResult(means, cov, total)
