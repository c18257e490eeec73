"""Exact-formula layer: Gamma, sphere measures, the angular kernel, signed powers.

The angular kernel

    Phi_{d,s,p}(r) = |S^{d-2}| int_{-1}^{1} (1-t^2)^{(d-3)/2} (1 - 2tr + r^2)^{-(d+sp)/2} dt

is evaluated through t = cos(phi), which turns the weight into sin(phi)^{d-2}
and removes the endpoint blow-up for d = 2.  The integrand in phi is sharply
peaked at phi = 0 when r -> 1 (width ~ 1 - r), so the panels are graded
geometrically from the peak outwards.  The denominator is written as
(1-r)^2 + 4 r sin^2(phi/2), which stays accurate when 1 - r is tiny.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "KernelParams",
    "gamma_fn",
    "sphere_surface",
    "phi_kernel",
    "phi_from_gap",
    "french_power",
    "check_split_inequality",
    "check_power_sum_inequality",
]

# public phi_kernel refuses r closer to 1 than this
R_CAP = 1.0 - 1e-12

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


@dataclass(frozen=True)
class KernelParams:
    d: int
    s: float
    p: float

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"d must be an integer >= 1, got {self.d}")
        if not 0.0 <= self.s < 1.0:
            raise ValueError(f"s must lie in [0, 1), got {self.s}")
        if self.p < 1.0:
            raise ValueError(f"p must be >= 1, got {self.p}")
        object.__setattr__(self, "d", int(self.d))

    @property
    def sp(self) -> float:
        return self.s * self.p


def gamma_fn(x: float) -> float:
    """Gamma function for positive real arguments."""
    if not x > 0:
        raise ValueError(f"gamma_fn requires x > 0, got {x}")
    return math.gamma(x)


def sphere_surface(m: int) -> float:
    """Surface measure of the unit sphere S^m in R^{m+1} (S^0 is two points)."""
    if int(m) != m or m < 0:
        raise ValueError(f"sphere dimension must be a nonnegative integer, got {m}")
    return 2.0 * math.pi ** ((m + 1) / 2.0) / gamma_fn((m + 1) / 2.0)


def phi_from_gap(w, d: int, sp: float) -> np.ndarray:
    """Phi_{d,s,p}(1 - w) for gaps 0 < w <= 1, vectorised over w (w = 0 gives inf).

    Working with the gap w = 1 - r keeps full relative accuracy close to the
    diagonal, which the double-integral engines rely on.
    """
    w = np.asarray(w, dtype=float)
    if d == 1:
        return w ** (-1.0 - sp) + (2.0 - w) ** (-1.0 - sp)
    flat = np.atleast_1d(w).ravel()
    zero = flat <= 0
    if zero.all():
        return np.full(w.shape, np.inf) if w.ndim else np.inf
    if zero.any():  # an underflowed gap sits on the diagonal, where the kernel is infinite
        out = np.full(flat.shape, np.inf)
        out[~zero] = phi_from_gap(flat[~zero], d, sp)
        return out.reshape(w.shape)
    r = 1.0 - flat
    expo = -(d + sp) / 2.0
    # panel edges 0, w, 2w, 4w, ... clipped at pi
    n_panels = int(math.ceil(math.log2(math.pi / flat.min()))) + 2
    total = np.zeros_like(flat)
    lo = np.zeros_like(flat)
    for j in range(n_panels):
        hi = np.minimum(flat * 2.0**j, math.pi) if j < n_panels - 1 else np.full_like(flat, math.pi)
        half = 0.5 * (hi - lo)
        live = half > 0
        if live.any():
            mid = 0.5 * (hi + lo)[live]
            phi = mid[:, None] + half[live][:, None] * _GL_NODES[None, :]
            sin_half = np.sin(0.5 * phi)
            denom = flat[live][:, None] ** 2 + 4.0 * r[live][:, None] * sin_half**2
            vals = denom**expo
            if d > 2:
                vals = vals * np.sin(phi) ** (d - 2)
            total[live] += half[live] * (vals @ _GL_WEIGHTS)
        lo = hi
    out = sphere_surface(d - 2) * total
    return out.reshape(w.shape) if w.ndim else out[0]


def phi_kernel(kp: KernelParams, r):
    """Angular kernel Phi_{d,s,p}(r) on 0 <= r < 1.

    Accepts a scalar or an array.  Values of r above ``R_CAP`` are rejected:
    the kernel diverges like (1-r)^{-1-sp} and callers are expected to handle
    that asymptote themselves.
    """
    arr = np.asarray(r, dtype=float)
    if np.any(arr < 0):
        raise ValueError("phi_kernel requires r >= 0")
    if np.any(arr >= 1.0):
        raise ValueError("phi_kernel diverges at r >= 1")
    if np.any(arr > R_CAP):
        raise ValueError(f"phi_kernel is capped at r <= {R_CAP!r}")
    out = phi_from_gap(1.0 - arr, kp.d, kp.sp)
    return float(out) if arr.ndim == 0 else out


def french_power(a, t: float):
    """Signed power |a|^t sgn(a)."""
    if not t > 0:
        raise ValueError(f"french_power requires t > 0, got {t}")
    a_arr = np.asarray(a, dtype=float)
    out = np.sign(a_arr) * np.abs(a_arr) ** t
    return float(out) if a_arr.ndim == 0 else out


def check_split_inequality(a: float, b: float, q: float, c: float) -> bool:
    """(|a|+|b|)^q <= c|a|^q + (1 - c^{-1/(q-1)})^{1-q} |b|^q.

    A relative slack of 1e-12 absorbs rounding at the equality cases.
    """
    if not q > 1:
        raise ValueError(f"q must be > 1, got {q}")
    if not c > 1:
        raise ValueError(f"c must be > 1, got {c}")
    lhs = (abs(a) + abs(b)) ** q
    rhs = c * abs(a) ** q + (1.0 - c ** (-1.0 / (q - 1.0))) ** (1.0 - q) * abs(b) ** q
    return bool(lhs <= rhs * (1.0 + 1e-12))


def check_power_sum_inequality(values, gamma: float) -> bool:
    """sum |a_l|^gamma <= (sum |a_l|)^gamma for gamma >= 1."""
    if gamma < 1:
        raise ValueError(f"gamma must be >= 1, got {gamma}")
    mags = np.abs(np.asarray(values, dtype=float))
    lhs = float(np.sum(mags**gamma))
    rhs = float(np.sum(mags)) ** gamma
    return bool(lhs <= rhs * (1.0 + 1e-12))
