"""Explicit constants: the sharp Hardy constants, remainder constants and exponents."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DegenerateRegimeError, ParameterError
from .quadrature.estimate import IntegralEstimate
from .quadrature.rules import integrate_1d
from .special_fns import gamma_fn, phi_from_gap, sphere_surface

__all__ = [
    "HardyParams",
    "SobolevParams",
    "check_point_params",
    "point_constant_estimate",
    "power_difference_integral",
    "flat_constant_estimate",
    "sharp_constant_point",
    "sharp_constant_flat",
    "lemma21_prefactor",
    "flat_direction_integral",
    "remainder_c_p",
    "remainder_C_p",
    "derive_theta",
    "critical_q",
]

CONSTANT_RTOL = 1e-11


@dataclass(frozen=True)
class HardyParams:
    """Parameter tuple (d, s, p, k, alpha, beta) of the weighted Hardy inequality.

    Construction validates the admissible range alpha, beta, alpha+beta in (-k, sp)
    and rejects the critical case sp = k + alpha + beta unless ``allow_critical``.
    """

    d: int
    s: float
    p: float
    k: int
    alpha: float = 0.0
    beta: float = 0.0
    allow_critical: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ParameterError(f"d must be an integer >= 1, got {self.d}")
        if int(self.k) != self.k or not 1 <= self.k <= self.d:
            raise ParameterError(f"k must be an integer in [1, d], got {self.k}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "k", int(self.k))
        if not 0.0 <= self.s < 1.0:
            raise ParameterError(f"s must lie in [0, 1), got {self.s}")
        if self.p < 1.0:
            raise ParameterError(f"p must be >= 1, got {self.p}")
        k, sp = self.k, self.sp
        for name, val in (("alpha", self.alpha), ("beta", self.beta), ("alpha+beta", self.alpha + self.beta)):
            if not -k < val < sp:
                raise ParameterError(f"{name} must lie in (-k, sp)")
        if not self.allow_critical and self.regime == "critical":
            raise DegenerateRegimeError("sp = k+alpha+beta is the critical case: the sharp constant vanishes")

    @property
    def sp(self) -> float:
        return self.s * self.p

    @property
    def gamma(self) -> float:
        """Ground-state exponent (k + alpha + beta - sp)/p; omega(x) = |x_k|^{-gamma}."""
        return (self.k + self.alpha + self.beta - self.sp) / self.p

    @property
    def regime(self) -> str:
        excess = self.k + self.alpha + self.beta - self.sp
        if abs(excess) <= 1e-12 * max(1.0, self.k):
            return "critical"
        return "subcritical" if excess > 0 else "supercritical"

    @property
    def hardy_exponent(self) -> float:
        """Exponent of |x_k| in the denominator of the Hardy term: sp - alpha - beta."""
        return self.sp - self.alpha - self.beta

    def dual(self) -> "HardyParams":
        """Image under the inversion x -> x/|x|^2 (k = d only)."""
        if self.k != self.d:
            raise ParameterError("the inversion duality needs k = d")
        return HardyParams(
            self.d, self.s, self.p, self.k,
            self.sp - self.alpha - self.d, self.sp - self.beta - self.d,
        )

    def as_dict(self) -> dict:
        return {"d": self.d, "s": self.s, "p": self.p, "k": self.k, "alpha": self.alpha, "beta": self.beta}


def critical_q(d: int, s: float, p: float) -> float:
    sp = s * p
    if sp >= d:
        return math.inf
    return d * p / (d - sp)


@dataclass(frozen=True)
class SobolevParams:
    """Hardy parameters plus the Sobolev exponent q and the derived theta.

    ``log_variant`` admits q = p (the k = d logarithmic inequalities).
    """

    base: HardyParams
    q: float
    log_variant: bool = False
    theta: float = field(init=False)

    def __post_init__(self):
        b = self.base
        object.__setattr__(self, "theta", derive_theta(b.d, b.s, b.p, self.q, self.log_variant))

    def as_dict(self) -> dict:
        out = self.base.as_dict()
        out.update(q=self.q, theta=self.theta)
        return out


def derive_theta(d: int, s: float, p: float, q: float, log_variant: bool = False) -> float:
    """theta = d + (sp - d) q/p, exactly 0 at the critical exponent q = dp/(d - sp)."""
    sp = s * p
    if sp > d:
        raise ParameterError("the Sobolev range needs sp <= d")
    q_lower_ok = q >= p if log_variant else q > p
    if sp < d:
        qc = d * p / (d - sp)
        if not (q_lower_ok and q <= qc * (1 + 1e-14)):
            lb = "[" if log_variant else "("
            raise ParameterError(f"q must lie in {lb}p, dp/(d-sp)] = {lb}{p}, {qc}]")
        if abs(q - qc) <= 1e-14 * qc:
            return 0.0
    elif not q_lower_ok:
        raise ParameterError("q must exceed p when sp = d")
    return d + (sp - d) * q / p


def check_point_params(d: int, s: float, p: float, alpha: float, beta: float) -> None:
    if int(d) != d or d < 1:
        raise ParameterError(f"d must be an integer >= 1, got {d}")
    if not 0.0 <= s < 1.0:
        raise ParameterError(f"s must lie in [0, 1), got {s}")
    if p < 1.0:
        raise ParameterError(f"p must be >= 1, got {p}")
    sp = s * p
    for name, val in (("alpha", alpha), ("beta", beta), ("alpha+beta", alpha + beta)):
        if not -d < val < sp:
            raise ParameterError(f"{name} must lie in (-d, sp)")
    if abs(d + alpha + beta - sp) <= 1e-12 * d:
        raise DegenerateRegimeError("d+alpha+beta = sp: the point constant vanishes")


def _one_minus_power(gap: np.ndarray, expo: float) -> np.ndarray:
    """|1 - (1-gap)^expo| without cancellation for small gaps."""
    return np.abs(np.expm1(expo * np.log1p(-gap)))


@lru_cache(maxsize=512)
def power_difference_integral(d: int, s: float, p: float, alpha: float, beta: float, g: float,
                              rel_tol: float = CONSTANT_RTOL) -> IntegralEstimate:
    """int_0^1 r^{sp-1}(r^{-alpha}+r^{-beta}) |1 - r^g|^p Phi_{d,s,p}(r) dr.

    With g = (d+alpha+beta-sp)/p this is C_1; other exponents g arise for
    pure power tails.  The left half (0, 1/2) carries the r -> 0 exponent;
    the right half is written in the gap w = 1 - r, where the integrand
    behaves like w^{p(1-s)-1}.
    """
    if g == 0:
        return IntegralEstimate(0.0, 0.0, 0)
    sp = s * p

    def f_left(r):
        return float(r ** (sp - 1) * (r ** -alpha + r ** -beta) * abs(1 - r**g) ** p
                     * phi_from_gap(1.0 - r, d, sp))

    def f_right(w):
        r = 1.0 - w
        return float(r ** (sp - 1) * (r ** -alpha + r ** -beta)
                     * _one_minus_power(np.float64(w), g) ** p * phi_from_gap(w, d, sp))

    left_exp = sp - 1 - max(alpha, beta) + (g * p if g < 0 else 0.0)
    right_exp = p - 1 - sp
    a = integrate_1d(f_left, 0.0, 0.5, (left_exp, None), rel_tol)
    b = integrate_1d(f_right, 0.0, 0.5, (right_exp, None), rel_tol)
    return a + b


def point_constant_estimate(d: int, s: float, p: float, alpha: float, beta: float,
                            rel_tol: float = CONSTANT_RTOL) -> IntegralEstimate:
    """C_1(d,s,p,alpha,beta) with its quadrature error."""
    check_point_params(d, s, p, alpha, beta)
    g = (d + alpha + beta - s * p) / p
    return power_difference_integral(int(d), float(s), float(p), float(alpha), float(beta), g, rel_tol)


def sharp_constant_point(d: int, s: float, p: float, alpha: float, beta: float) -> float:
    """Sharp constant C_1 of the weighted Hardy inequality with a point singularity."""
    return point_constant_estimate(int(d), float(s), float(p), float(alpha), float(beta)).value


def lemma21_prefactor(d: int, k: int, s: float, p: float) -> float:
    """pi^{(d-k)/2} Gamma((k+sp)/2) / Gamma((d+sp)/2)."""
    if not 1 <= k <= d:
        raise ParameterError(f"k must lie in [1, d], got k={k}, d={d}")
    sp = s * p
    return math.pi ** ((d - k) / 2) * gamma_fn((k + sp) / 2) / gamma_fn((d + sp) / 2)


def flat_direction_integral(d: int, k: int, s: float, p: float, rel_tol: float = 1e-12) -> IntegralEstimate:
    """Direct quadrature of int_{R^{d-k}} (1 + |y|^2)^{-(d+sp)/2} dy.

    Radial reduction to (0, inf), then rho = u/(1-u) onto (0, 1); the image
    has exponent k + sp - 1 at u = 1.
    """
    if not 1 <= k <= d:
        raise ParameterError(f"k must lie in [1, d], got k={k}, d={d}")
    m = d - k
    if m == 0:
        return IntegralEstimate(1.0, 0.0, 0)
    sp = s * p

    def f(u):
        rho = u / (1.0 - u)
        return rho ** (m - 1) * (1.0 + rho * rho) ** (-(d + sp) / 2) / (1.0 - u) ** 2

    est = integrate_1d(f, 0.0, 1.0, (m - 1 if m > 1 else None, k + sp - 1), rel_tol)
    return est.scaled(sphere_surface(m - 1))


def sharp_constant_flat(hp: HardyParams) -> float:
    """Sharp constant C for the flat submanifold of codimension k."""
    return lemma21_prefactor(hp.d, hp.k, hp.s, hp.p) * sharp_constant_point(hp.k, hp.s, hp.p, hp.alpha, hp.beta)


def flat_constant_estimate(hp: HardyParams) -> IntegralEstimate:
    pref = lemma21_prefactor(hp.d, hp.k, hp.s, hp.p)
    return point_constant_estimate(hp.k, float(hp.s), float(hp.p), float(hp.alpha), float(hp.beta)).scaled(pref)


def _g_tau(tau, p):
    return (1 - tau) ** p - tau**p + p * tau ** (p - 1)


def remainder_c_p(p: float, grid: int = 1000, tol: float = 1e-10) -> float:
    """c_p = min over 0 < tau < 1/2 of (1-tau)^p - tau^p + p tau^{p-1}.

    Coarse grid, then golden-section on the bracketing cells.  Unimodality is
    not assumed: if the refined point is worse than the grid minimum the dense
    grid value is used instead.
    """
    if p < 2:
        raise ParameterError(f"c_p needs p >= 2, got {p}")
    taus = (np.arange(grid) + 0.5) * (0.5 / grid)
    vals = _g_tau(taus, p)
    i = int(np.argmin(vals))
    lo = 0.0 if i == 0 else taus[i - 1]
    hi = 0.5 if i == grid - 1 else taus[i + 1]
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = _g_tau(c, p), _g_tau(d, p)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = _g_tau(c, p)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = _g_tau(d, p)
    best = min(fc, fd)
    if best > vals[i] + 1e-13:
        dense = (np.arange(10**6) + 0.5) * (0.5 / 10**6)
        best = float(np.min(_g_tau(dense, p)))
    return float(min(best, 1.0))


def remainder_C_p(p: float, nonnegative_u: bool = False) -> float:
    """Remainder constant for 1 < p < 2: max{(p-1)/p, p(p-1)/2}, or p-1 for u >= 0."""
    if not 1 < p < 2:
        raise ParameterError(f"C_p needs 1 < p < 2, got {p}")
    if nonnegative_u:
        return p - 1.0
    return max((p - 1) / p, p * (p - 1) / 2)
