"""Concrete test-function families.

Every family is an immutable object that evaluates on arrays of points of
shape ``(..., d)`` and reports an axis-aligned support box.  Families that are
radial about the origin also expose a :class:`RadialSpec`, which the radial
quadrature engine and the 1-D weighted-norm routines consume.

The singular set is K = {x : x_k = 0}, where x_k collects the first k
coordinates (K = {0} when k = d).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .constants import HardyParams
from .errors import ParameterError, PreconditionError
from .special_fns import sphere_surface

__all__ = [
    "FlatSubmanifold",
    "RadialSpec",
    "BumpProfile",
    "AnnulusProfile",
    "TestFunction",
    "Bump",
    "RadialProfile",
    "TensorSharpness",
    "CounterexampleEps",
    "GroundStateProduct",
    "Superposition",
    "ZeroFunction",
    "make_bump",
    "make_radial",
    "make_sharpness_sequence",
    "make_counterexample",
    "ground_state_split",
    "log_weight",
    "counterexample_truncation_radius",
    "bump_power_mass",
]

TRUNCATION_BUDGET = 1e-9


@dataclass(frozen=True)
class FlatSubmanifold:
    """K = {x : x_k = 0} in R^d."""

    d: int
    k: int

    def __post_init__(self):
        if not 1 <= self.k <= self.d:
            raise ParameterError(f"k must lie in [1, d], got k={self.k}, d={self.d}")

    def split(self, x):
        x = np.asarray(x, dtype=float)
        return x[..., : self.k], x[..., self.k:]

    def distance_to_K(self, x):
        x = np.asarray(x, dtype=float)
        return np.linalg.norm(x[..., : self.k], axis=-1)


# ---------------------------------------------------------------------------
# one-dimensional radial profiles


@dataclass(frozen=True)
class RadialSpec:
    """Radial description f(|x|) of a function on R^dim.

    ``f`` is vectorised over r >= 0.  ``inner``/``outer`` bound the compact
    part: f = 0 on [0, inner).  ``breaks`` lists radii in (0, outer] where f
    is not smooth (``outer`` itself is always treated as one).  ``tail`` is
    either None (f = 0 beyond ``outer``) or (A, g): f(r) = A (r/outer)^{-g}
    for r > outer.  ``zero_at_origin`` tells the integrators whether f
    vanishes in a neighbourhood of 0.
    """

    f: Callable[[np.ndarray], np.ndarray]
    outer: float
    inner: float = 0.0
    breaks: tuple = ()
    tail: Optional[tuple] = None
    origin_power: float = 0.0

    @property
    def zero_at_origin(self) -> bool:
        return self.inner > 0

    def all_breaks(self) -> tuple:
        pts = set(b for b in self.breaks if 0 < b < self.outer)
        if self.inner > 0:
            pts.add(self.inner)
        return tuple(sorted(pts))


@dataclass(frozen=True)
class BumpProfile:
    """(1 - r^2/R^2)_+^m."""

    radius: float
    m: int = 2

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return np.maximum(1.0 - (r / self.radius) ** 2, 0.0) ** self.m

    def spec(self) -> RadialSpec:
        return RadialSpec(self, self.radius)


@dataclass(frozen=True)
class AnnulusProfile:
    """(1 - ((r - c)/w)^2)_+^m, supported in the shell c - w < r < c + w."""

    center: float
    half_width: float
    m: int = 2

    def __post_init__(self):
        if not 0 < self.half_width < self.center:
            raise ParameterError("annulus must stay away from the origin: need 0 < half_width < center")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return np.maximum(1.0 - ((r - self.center) / self.half_width) ** 2, 0.0) ** self.m

    def spec(self) -> RadialSpec:
        return RadialSpec(self, self.center + self.half_width, inner=self.center - self.half_width)


@dataclass(frozen=True)
class _PowerSplitProfile:
    """r^gamma on [0, 1], r^{-gamma-eps} beyond."""

    gamma: float
    eps: float

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        inside = r <= 1.0
        safe = np.where(r > 0, r, 1.0)
        out = np.where(inside, safe**self.gamma, safe ** (-self.gamma - self.eps))
        return np.where(r > 0, out, 0.0 if self.gamma > 0 else np.inf)


@dataclass(frozen=True)
class _ScaledProfile:
    base: Callable
    factor: float

    def __call__(self, r):
        return self.base(np.asarray(r, dtype=float) * self.factor)


@dataclass(frozen=True)
class _WeightedProfile:
    base: Callable
    exponent: float

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        vals = self.base(r)
        safe = np.where(r > 0, r, 1.0)
        out = np.where(vals != 0, vals * safe**self.exponent, 0.0)
        if self.exponent != 0:
            at_zero = 0.0 if self.exponent > 0 else np.inf
            out = np.where((r > 0) | (vals == 0), out, at_zero)
        return out


# ---------------------------------------------------------------------------
# test functions


class TestFunction:
    """Base class: an evaluable, compactly supported (or truncated) function."""

    __test__ = False  # keep pytest from collecting the class
    variant = "TestFunction"
    d: int

    def __call__(self, x) -> np.ndarray:
        raise NotImplementedError

    def support_box(self):
        """(lo, hi) arrays; the function is exactly zero outside."""
        raise NotImplementedError

    def radial_spec(self) -> Optional[RadialSpec]:
        """Radial description about the origin, or None if not radial."""
        return None

    @property
    def nonnegative(self) -> bool:
        return True

    def min_distance_to_K(self, k: int) -> float:
        """Lower bound for |x_k| on the support (0 if the support may meet K)."""
        lo, hi = self.support_box()
        lo, hi = lo[:k], hi[:k]
        gap = np.where(lo > 0, lo, np.where(hi < 0, -hi, 0.0))
        return float(np.linalg.norm(gap))

    def scaled(self, lam: float) -> "TestFunction":
        """x -> u(lam x)."""
        return Dilation(self, lam)

    def describe(self) -> dict:
        return {"variant": self.variant}

    def _points(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.d:
            raise ValueError(f"expected points of dimension {self.d}, got shape {x.shape}")
        return x


@dataclass(frozen=True)
class ZeroFunction(TestFunction):
    d: int
    variant = "Zero"

    def __call__(self, x):
        x = self._points(x)
        return np.zeros(x.shape[:-1])

    def support_box(self):
        return np.zeros(self.d), np.zeros(self.d)

    def radial_spec(self):
        return RadialSpec(lambda r: np.zeros_like(np.asarray(r, dtype=float)), 0.0)


@dataclass(frozen=True)
class Bump(TestFunction):
    """u(x) = (1 - |x - center|^2/radius^2)_+^m."""

    center: tuple
    radius: float
    m: int = 2
    variant = "Bump"

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if not self.radius > 0:
            raise ParameterError("bump radius must be positive")
        if int(self.m) != self.m or self.m < 1:
            raise ParameterError("bump smoothness m must be an integer >= 1")

    @property
    def d(self) -> int:
        return len(self.center)

    def __call__(self, x):
        x = self._points(x)
        r2 = np.sum((x - np.asarray(self.center)) ** 2, axis=-1)
        return np.maximum(1.0 - r2 / self.radius**2, 0.0) ** self.m

    def support_box(self):
        c = np.asarray(self.center)
        return c - self.radius, c + self.radius

    def radial_spec(self):
        if any(c != 0 for c in self.center):
            return None
        return BumpProfile(self.radius, self.m).spec()

    def min_distance_to_K(self, k):
        return max(0.0, float(np.linalg.norm(self.center[:k])) - self.radius)

    def describe(self):
        return {"variant": self.variant, "center": list(self.center), "radius": self.radius, "m": self.m}


@dataclass(frozen=True)
class RadialProfile(TestFunction):
    """u(x) = f(|x|) on R^d for a profile described by ``spec``."""

    d: int
    spec: RadialSpec
    variant = "RadialProfile"

    def __call__(self, x):
        x = self._points(x)
        return self.spec.f(np.linalg.norm(x, axis=-1))

    def support_box(self):
        if self.spec.tail is not None:
            raise PreconditionError("profile has an unbounded tail; no finite support box")
        R = self.spec.outer
        return np.full(self.d, -R), np.full(self.d, R)

    def radial_spec(self):
        return self.spec

    def min_distance_to_K(self, k):
        return self.spec.inner if k == self.d else 0.0

    def describe(self):
        return {"variant": self.variant, "outer": self.spec.outer, "inner": self.spec.inner}


@dataclass(frozen=True)
class Dilation(TestFunction):
    """x -> base(lam x)."""

    base: TestFunction
    lam: float
    variant = "Dilation"

    def __post_init__(self):
        if not self.lam > 0:
            raise ParameterError("dilation factor must be positive")

    @property
    def d(self):
        return self.base.d

    def __call__(self, x):
        return self.base(self._points(x) * self.lam)

    def support_box(self):
        lo, hi = self.base.support_box()
        return lo / self.lam, hi / self.lam

    def radial_spec(self):
        rs = self.base.radial_spec()
        if rs is None:
            return None
        lam = self.lam
        return RadialSpec(_ScaledProfile(rs.f, lam), rs.outer / lam, rs.inner / lam,
                          tuple(b / lam for b in rs.breaks), rs.tail, rs.origin_power)

    @property
    def nonnegative(self):
        return self.base.nonnegative

    def min_distance_to_K(self, k):
        return self.base.min_distance_to_K(k) / self.lam

    def describe(self):
        return {"variant": self.variant, "lam": self.lam, "base": self.base.describe()}


def bump_power_mass(dim: int, radius: float, m: int, power: float) -> float:
    """Closed form of int_{R^dim} (1 - |x|^2/radius^2)_+^{m*power} dx."""
    e = m * power
    return (sphere_surface(dim - 1) * radius**dim * 0.5
            * math.exp(math.lgamma(dim / 2) + math.lgamma(e + 1) - math.lgamma(dim / 2 + e + 1)))


@dataclass(frozen=True)
class TensorSharpness(TestFunction):
    """u_N(x) = eta(|x_k|) phi_N(x_{d-k}) with phi_N(y) = N^{(k-d)/p} phi(y/N)/||phi||_p.

    ``eta`` is a radial profile on R^k; ``phi`` is the bump
    (1 - |y|^2/phi_radius^2)_+^phi_m on R^{d-k}.
    """

    d: int
    k: int
    eta: RadialSpec
    N: float
    p: float
    phi_radius: float = 1.0
    phi_m: int = 2
    variant = "TensorSharpness"

    def __post_init__(self):
        if not 1 <= self.k < self.d:
            raise ParameterError("the tensor sharpness sequence needs 1 <= k < d")
        if not self.N > 0:
            raise ParameterError("N must be positive")

    @property
    def phi_norm(self) -> float:
        return bump_power_mass(self.d - self.k, self.phi_radius, self.phi_m, self.p) ** (1.0 / self.p)

    @property
    def phi_scale(self) -> float:
        return self.N ** ((self.k - self.d) / self.p) / self.phi_norm

    def eta_values(self, xk):
        return self.eta.f(np.linalg.norm(np.asarray(xk, dtype=float), axis=-1))

    def phi_N(self, y):
        y = np.asarray(y, dtype=float)
        r2 = np.sum((y / self.N) ** 2, axis=-1)
        return self.phi_scale * np.maximum(1.0 - r2 / self.phi_radius**2, 0.0) ** self.phi_m

    def __call__(self, x):
        x = self._points(x)
        return self.eta_values(x[..., : self.k]) * self.phi_N(x[..., self.k:])

    def support_box(self):
        Re, Rp = self.eta.outer, self.phi_radius * self.N
        return (np.concatenate([np.full(self.k, -Re), np.full(self.d - self.k, -Rp)]),
                np.concatenate([np.full(self.k, Re), np.full(self.d - self.k, Rp)]))

    def min_distance_to_K(self, k):
        return self.eta.inner if k == self.k else 0.0

    def describe(self):
        return {"variant": self.variant, "k": self.k, "N": self.N, "eta_outer": self.eta.outer,
                "eta_inner": self.eta.inner, "phi_radius": self.phi_radius, "phi_m": self.phi_m}


def counterexample_truncation_radius(eps: float, p: float, budget: float = TRUNCATION_BUDGET) -> float:
    """Radius beyond which the Hardy-term tail of u_eps is below ``budget`` relative.

    Outside the unit ball the Hardy integrand is |S| r^{-1-p eps}; its tail from R
    is |S| R^{-p eps}/(p eps) while the whole outer part is |S|/(p eps), so the
    dropped fraction of the outer part alone is R^{-p eps}.
    """
    return float(math.exp(-math.log(budget) / (p * eps)))


@dataclass(frozen=True)
class CounterexampleEps(TestFunction):
    """u_eps(x) = |x|^gamma on the unit ball, |x|^{-gamma-eps} outside."""

    d: int
    eps: float
    gamma: float
    p: float
    variant = "CounterexampleEps"

    @property
    def R_trunc(self) -> float:
        return counterexample_truncation_radius(self.eps, self.p)

    def __call__(self, x):
        x = self._points(x)
        return _PowerSplitProfile(self.gamma, self.eps)(np.linalg.norm(x, axis=-1))

    def support_box(self):
        R = self.R_trunc
        return np.full(self.d, -R), np.full(self.d, R)

    def radial_spec(self):
        return RadialSpec(_PowerSplitProfile(self.gamma, self.eps), 1.0, tail=(1.0, self.gamma + self.eps),
                          origin_power=self.gamma)

    def min_distance_to_K(self, k):
        return 0.0

    def describe(self):
        return {"variant": self.variant, "eps": self.eps, "gamma": self.gamma, "R_trunc": self.R_trunc}


@dataclass(frozen=True)
class GroundStateProduct(TestFunction):
    """u(x) = |x_k|^exponent * inner(x); u = omega v uses exponent = -gamma."""

    inner: TestFunction
    exponent: float
    k: int
    variant = "GroundStateProduct"

    @property
    def d(self):
        return self.inner.d

    def __call__(self, x):
        x = self._points(x)
        vals = self.inner(x)
        rk = np.linalg.norm(x[..., : self.k], axis=-1)
        safe = np.where(rk > 0, rk, 1.0)
        return np.where(vals != 0, vals * safe**self.exponent, 0.0)

    def support_box(self):
        return self.inner.support_box()

    def radial_spec(self):
        rs = self.inner.radial_spec()
        if rs is None or self.k != self.d:
            return None
        tail = None if rs.tail is None else (rs.tail[0] * rs.outer**self.exponent, rs.tail[1] - self.exponent)
        return RadialSpec(_WeightedProfile(rs.f, self.exponent), rs.outer, rs.inner, rs.breaks, tail,
                          rs.origin_power + self.exponent)

    @property
    def nonnegative(self):
        return self.inner.nonnegative

    def min_distance_to_K(self, k):
        return self.inner.min_distance_to_K(k)

    def describe(self):
        return {"variant": self.variant, "exponent": self.exponent, "k": self.k, "inner": self.inner.describe()}


@dataclass(frozen=True)
class Superposition(TestFunction):
    """Finite linear combination sum c_i u_i (used for sign-changing inputs)."""

    terms: tuple
    variant = "Superposition"

    def __post_init__(self):
        if not self.terms:
            raise ParameterError("superposition needs at least one term")
        object.__setattr__(self, "terms", tuple((float(c), u) for c, u in self.terms))
        dims = {u.d for _, u in self.terms}
        if len(dims) != 1:
            raise ParameterError("all superposed functions must share the dimension")

    @property
    def d(self):
        return self.terms[0][1].d

    def __call__(self, x):
        x = self._points(x)
        out = np.zeros(x.shape[:-1])
        for c, u in self.terms:
            out = out + c * u(x)
        return out

    def support_box(self):
        boxes = [u.support_box() for _, u in self.terms]
        return np.min([b[0] for b in boxes], axis=0), np.max([b[1] for b in boxes], axis=0)

    @property
    def nonnegative(self):
        return all(c >= 0 and u.nonnegative for c, u in self.terms)

    def disjoint(self) -> bool:
        """True when the support boxes of the terms are pairwise disjoint."""
        boxes = [u.support_box() for _, u in self.terms]
        for i in range(len(boxes)):
            for j in range(i + 1, len(boxes)):
                (l1, h1), (l2, h2) = boxes[i], boxes[j]
                if np.all((h1 > l2) & (h2 > l1)):
                    return False
        return True

    def min_distance_to_K(self, k):
        return min(u.min_distance_to_K(k) for _, u in self.terms)

    def describe(self):
        return {"variant": self.variant, "terms": [[c, u.describe()] for c, u in self.terms]}


# ---------------------------------------------------------------------------
# constructors


def make_bump(center: Sequence[float], radius: float, m: int = 2) -> Bump:
    """Smooth bump (1 - |x-center|^2/radius^2)_+^m, C^1 for m >= 1 (default m = 2)."""
    return Bump(tuple(center), radius, m)


def make_radial(d: int, spec: RadialSpec) -> RadialProfile:
    return RadialProfile(int(d), spec)


def default_eta(hp: HardyParams) -> RadialSpec:
    """Bump on the unit ball of R^k when subcritical, a shell on (0.5, 1.5) when supercritical."""
    if hp.regime == "supercritical":
        return AnnulusProfile(1.0, 0.5, 2).spec()
    return BumpProfile(1.0, 2).spec()


def make_sharpness_sequence(hp: HardyParams, N: float, eta: Optional[RadialSpec] = None,
                            phi_radius: float = 1.0, phi_m: int = 2) -> TensorSharpness:
    """u_N = eta(x_k) phi_N(x_{d-k}) with phi_N normalised in L^p(R^{d-k})."""
    eta = default_eta(hp) if eta is None else eta
    if hp.regime == "supercritical" and not eta.zero_at_origin:
        raise PreconditionError("supercritical regime: eta must vanish near the origin of R^k")
    return TensorSharpness(hp.d, hp.k, eta, float(N), hp.p, phi_radius, phi_m)


def make_counterexample(eps: float, hp: HardyParams) -> CounterexampleEps:
    """u_eps for the point singularity (k = d) with gamma = (d+alpha+beta-sp)/p > 0."""
    if not eps > 0:
        raise ParameterError("eps must be positive")
    if hp.k != hp.d:
        raise ParameterError("the counterexample family lives in the point case k = d")
    if not hp.sp < hp.d:
        raise ParameterError("the counterexample needs sp < d")
    if abs(hp.alpha + hp.beta + hp.sp - hp.d) < 1e-12:
        raise ParameterError("alpha+beta+sp = d is excluded")
    if not hp.gamma > 0:
        raise PreconditionError("gamma <= 0: map the parameters with HardyParams.dual() and use the dual family")
    return CounterexampleEps(hp.d, float(eps), hp.gamma, hp.p)


def ground_state_split(u: TestFunction, hp: HardyParams):
    """Return (v, omega) with v = |x_k|^gamma u and omega = |x_k|^{-gamma}, so u = omega v."""
    g, k = hp.gamma, hp.k
    v = u if g == 0 or isinstance(u, ZeroFunction) else GroundStateProduct(u, g, k)

    def omega(x):
        rk = np.linalg.norm(np.asarray(x, dtype=float)[..., :k], axis=-1)
        return rk ** (-g)

    return v, omega


def log_weight(x, R: float, q: float):
    """ln^q(4R/|x|) for 0 < |x| < 4R (x is a point or an array of points)."""
    if not R > 0:
        raise ParameterError("R must be positive")
    x = np.asarray(x, dtype=float)
    r = np.abs(x) if x.ndim == 0 else np.linalg.norm(x, axis=-1)
    if np.any(r >= 4 * R) or np.any(r <= 0):
        raise ParameterError("log_weight needs 0 < |x| < 4R")
    out = np.log(4 * R / r) ** q
    return float(out) if np.ndim(out) == 0 else out
