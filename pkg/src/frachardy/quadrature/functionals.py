"""Public integral estimators: Gagliardo seminorms, weighted L^p terms, remainders.

Every double integral is described by a :class:`PairForm`, a vectorised map
(u(x), u(y), |x_k|, |y_k|) -> integrand without the kernel |x-y|^{-d-sigma}.
The same form drives the Monte Carlo engine (any k) and the radial engine
(k = d, radial functions), so both engines integrate literally the same
expression.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from ..constants import HardyParams, power_difference_integral
from ..errors import ParameterError
from ..functions import GroundStateProduct, TestFunction, ZeroFunction, ground_state_split
from ..special_fns import french_power, sphere_surface
from .estimate import IntegralEstimate
from .lp import weighted_power_integral
from .mc import MCResult, PairIntegrand, mc_double_integral
from .radial import radial_pair_integral

__all__ = [
    "QuadratureSpec",
    "PairForm",
    "gagliardo_form",
    "e_omega_form",
    "e_tilde_form",
    "w_r_form",
    "double_integral",
    "double_integrals_mc",
    "gagliardo_mc",
    "gagliardo_radial",
    "weighted_lp",
    "remainder_functional",
    "REMAINDER_KINDS",
]

ENGINES = ("auto", "adaptive1d", "adaptive2d", "monte_carlo", "radial_reduction")
REMAINDER_KINDS = ("E_omega", "E_tilde", "W_r_form")


@dataclass(frozen=True)
class QuadratureSpec:
    """Engine selection, budgets, tolerances and the RNG seed.

    ``engine='auto'`` picks the radial reduction for radial functions with
    k = d and Monte Carlo otherwise.  ``proposal_exponent`` overrides the
    exponent of the near-diagonal Monte Carlo proposal |h|^{proposal_exponent}
    (default: diag_power - sigma - d, i.e. p - sp - d for the seminorm).
    ``level`` is the tanh-sinh level of the radial engine.
    """

    engine: str = "auto"
    rel_tol: float = 1e-8
    samples: int = 200_000
    seed: int = 0
    proposal_exponent: Optional[float] = None
    level: int = 5

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise ParameterError(f"engine must be one of {ENGINES}")
        if not 0 < self.rel_tol <= 0.1:
            raise ParameterError("rel_tol must lie in (0, 0.1]")
        if int(self.samples) != self.samples or self.samples < 1000:
            raise ParameterError("samples must be an integer >= 1000")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ParameterError("seed must be an integer in [0, 2^64)")
        if not 2 <= self.level <= 8:
            raise ParameterError("level must lie in [2, 8]")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class PairForm:
    """Integrand F(u(x), u(y), |x_k|, |y_k|) of a double integral with kernel |x-y|^{-d-sigma}."""

    name: str
    fn: Callable
    sigma: float
    diag_power: float
    tail_exponent: float
    k_exponent: float = 0.0


def _log_powers(rx, ry, a, b):
    with np.errstate(divide="ignore"):
        return a * np.log(rx) + b * np.log(ry)


def _combine(diff, log_weight):
    """diff * exp(log_weight), computed in log space and set to 0 where diff = 0.

    Near K the weights and the differences are individually outside the
    floating-point range while their product is moderate.
    """
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = np.exp(np.log(diff) + log_weight)
    return np.where(diff > 0, out, 0.0)


def gagliardo_form(hp: HardyParams) -> PairForm:
    p, a, b = hp.p, hp.alpha, hp.beta

    def fn(ux, uy, rx, ry):
        return _combine(np.abs(ux - uy) ** p, _log_powers(rx, ry, a, b))

    return PairForm("gagliardo", fn, hp.sp, p, max(a, b), min(a, b, a + b, 0.0))


def e_omega_weights(hp: HardyParams):
    k, a, b, sp = hp.k, hp.alpha, hp.beta, hp.sp
    return -(k - a + b - sp) / 2.0, -(k + a - b - sp) / 2.0


def e_omega_form(hp: HardyParams) -> PairForm:
    """|v(x)-v(y)|^p |x_k|^{-(k-a+b-sp)/2} |y_k|^{-(k+a-b-sp)/2}."""
    p = hp.p
    wa, wb = e_omega_weights(hp)

    def fn(vx, vy, rx, ry):
        return _combine(np.abs(vx - vy) ** p, _log_powers(rx, ry, wa, wb))

    return PairForm("E_omega", fn, hp.sp, p, max(wa, wb), min(wa, wb, wa + wb, 0.0))


def _log_min_max_weight(rx, ry, expo, r):
    """log of min{w_x, w_y} max{w_x, w_y}^{r-1} with w = |.|^{-expo}."""
    with np.errstate(divide="ignore"):
        lx, ly = -expo * np.log(rx), -expo * np.log(ry)
    return np.minimum(lx, ly) + (r - 1.0) * np.maximum(lx, ly)


def _far_exponent(expo, r):
    # growth of min*max^{r-1} in the far variable when the near one is fixed
    return -expo if expo > 0 else -expo * (r - 1.0)


def e_tilde_form(hp: HardyParams) -> PairForm:
    """(v(x)^<p/2> - v(y)^<p/2>)^2 W(x,y) |x_k|^a |y_k|^b with W = min{w} max{w}^{p-1}, w = |x_k|^{-gamma}."""
    p, a, b, g = hp.p, hp.alpha, hp.beta, hp.gamma
    if not 1 < p < 2:
        raise ParameterError("E_tilde is the remainder form for 1 < p < 2")

    def fn(vx, vy, rx, ry):
        diff = (french_power(vx, p / 2) - french_power(vy, p / 2)) ** 2
        return _combine(diff, _log_min_max_weight(rx, ry, g, p) + _log_powers(rx, ry, a, b))

    far = _far_exponent(g, p)
    return PairForm("E_tilde", fn, hp.sp, 2.0, max(a, b) + far, min(a, b, a + b, 0.0) - abs(g) * p)


def w_r_form(hp: HardyParams, r: float) -> PairForm:
    """|u(x)-u(y)|^2 W_r(x,y) |x_k|^a |y_k|^b with kernel order 2s and W_r = min{w} max{w}^{r-1},
    w = |x_k|^{-(k+a+b-2s)/r}."""
    if not r > 1:
        raise ParameterError("W_r needs r > 1")
    k, a, b, s = hp.k, hp.alpha, hp.beta, hp.s
    expo = (k + a + b - 2 * s) / r

    def fn(ux, uy, rx, ry):
        return _combine((ux - uy) ** 2, _log_min_max_weight(rx, ry, expo, r) + _log_powers(rx, ry, a, b))

    return PairForm("W_r_form", fn, 2 * s, 2.0, max(a, b) + _far_exponent(expo, r),
                    min(a, b, a + b, 0.0) - abs(expo) * r)


# ---------------------------------------------------------------------------
# engines


def _holder_at_K(u: TestFunction, k: int) -> float:
    """Hoelder exponent of u across K: below 1 for ground-state products |x_k|^g w with 0 <= g < 1 and w != 0 on K."""
    if isinstance(u, GroundStateProduct) and u.k == k and u.exponent < 1 and u.inner.min_distance_to_K(k) == 0:
        return max(float(u.exponent), 0.0)
    return 1.0


def _to_pair_integrand(u: TestFunction, form: PairForm, k: int) -> PairIntegrand:
    def fn(x, y):
        return form.fn(u(x), u(y), np.linalg.norm(x[:, :k], axis=1), np.linalg.norm(y[:, :k], axis=1))

    if _holder_at_K(u, k) < 1:
        # |u(x)-u(y)| ~ |h|^g on a strip around K: a nearly flat diagonal law and
        # the strongest K-concentration of x keep the variance finite
        return PairIntegrand(fn, form.sigma + 0.1, form.tail_exponent, -float(k))
    return PairIntegrand(fn, form.diag_power, form.tail_exponent, form.k_exponent)


def double_integrals_mc(items: Sequence[tuple], hp: HardyParams, spec: QuadratureSpec) -> MCResult:
    """Shared-sample Monte Carlo estimates for [(u, form), ...] (all forms share sigma).

    The support box is the union of the supports of the functions involved.
    """
    sigmas = {round(f.sigma, 14) for _, f in items}
    if len(sigmas) != 1:
        raise ParameterError("forms estimated together must share the kernel order")
    d = hp.d
    for u, _ in items:
        if u.d != d:
            raise ParameterError("test function dimension differs from d")
        if d > 4:
            raise ParameterError("the Monte Carlo engine is capped at d <= 4")
    boxes = [u.support_box() for u, _ in items]
    lo = np.min([b[0] for b in boxes], axis=0)
    hi = np.max([b[1] for b in boxes], axis=0)
    pis = [_to_pair_integrand(u, f, hp.k) for u, f in items]
    return mc_double_integral(pis, d, items[0][1].sigma, (lo, hi), int(spec.samples), int(spec.seed),
                              k=hp.k, proposal_exponent=spec.proposal_exponent)


def _radial_once(spec_r, d, form: PairForm, level: int) -> float:
    f = spec_r.f

    def psym(r, rho):
        fr, fp = f(r), f(rho)
        return form.fn(fr, fp, r, rho) + form.fn(fp, fr, rho, r)

    rate = form.sigma - form.tail_exponent
    if not rate > 0:
        raise ParameterError("the outer region of this form does not decay")
    return radial_pair_integral(psym, d, form.sigma, spec_r, rate, level=level)


def _radial_estimate(spec_r, d, form, level, extra=0.0) -> IntegralEstimate:
    hi = _radial_once(spec_r, d, form, level) + extra
    lo = _radial_once(spec_r, d, form, level - 1) + extra
    err = max(abs(hi - lo), 4 * np.finfo(float).eps * abs(hi))
    return IntegralEstimate(hi, err, 0)


def _power_tail_region(spec_r, d, hp: HardyParams) -> float:
    """Both radii beyond R_c for f = A (r/R_c)^{-g}: closed form via a 1-D integral."""
    A, g = spec_r.tail
    R = spec_r.outer
    lam = g * hp.p - (d - hp.sp + hp.alpha + hp.beta)
    if not lam > 0:
        raise ParameterError("the power tail makes the seminorm diverge")
    inner = power_difference_integral(d, float(hp.s), float(hp.p), float(hp.alpha), float(hp.beta), float(g))
    return sphere_surface(d - 1) * abs(A) ** hp.p * R ** (d - hp.sp + hp.alpha + hp.beta) / lam * inner.value


def _use_radial(u: TestFunction, hp: HardyParams, spec: QuadratureSpec) -> bool:
    if spec.engine == "radial_reduction":
        return True
    if spec.engine == "monte_carlo":
        return False
    return hp.k == hp.d and u.radial_spec() is not None


def double_integral(u: TestFunction, form: PairForm, hp: HardyParams, spec: QuadratureSpec) -> IntegralEstimate:
    """int int form(u(x), u(y), |x_k|, |y_k|) |x-y|^{-d-sigma} dx dy with the engine chosen by ``spec``."""
    if isinstance(u, ZeroFunction):
        return IntegralEstimate(0.0)
    if _use_radial(u, hp, spec):
        if hp.k != hp.d:
            raise ParameterError("the radial reduction needs k = d")
        rs = u.radial_spec()
        if rs is None:
            raise ParameterError("the radial reduction needs a radial test function")
        extra = 0.0
        if rs.tail is not None:
            if form.name != "gagliardo":
                raise ParameterError("power tails are supported for the seminorm only")
            extra = _power_tail_region(rs, hp.d, hp)
        return _radial_estimate(rs, hp.d, form, spec.level, extra)
    res = double_integrals_mc([(u, form)], hp, spec)
    return IntegralEstimate(float(res.means[0]), float(res.std_errors()[0]), res.samples)


def gagliardo_mc(u: TestFunction, hp: HardyParams, spec: Optional[QuadratureSpec] = None) -> IntegralEstimate:
    """Monte Carlo estimate of int int |u(x)-u(y)|^p |x-y|^{-d-sp} |x_k|^alpha |y_k|^beta dx dy."""
    spec = spec or QuadratureSpec()
    if isinstance(u, ZeroFunction):
        return IntegralEstimate(0.0)
    res = double_integrals_mc([(u, gagliardo_form(hp))], hp, spec)
    return IntegralEstimate(float(res.means[0]), float(res.std_errors()[0]), res.samples)


def gagliardo_radial(u, hp: HardyParams, spec: Optional[QuadratureSpec] = None) -> IntegralEstimate:
    """Radial-reduction value of the weighted seminorm (p-th power) for radial u and k = d.

    ``u`` is a radial TestFunction or a RadialSpec.
    """
    spec = spec or QuadratureSpec()
    if hp.k != hp.d:
        raise ParameterError("gagliardo_radial needs k = d")
    from ..functions import RadialProfile, RadialSpec

    if isinstance(u, RadialSpec):
        u = RadialProfile(hp.d, u)
    rspec = QuadratureSpec("radial_reduction", spec.rel_tol, spec.samples, spec.seed, spec.proposal_exponent, spec.level)
    return double_integral(u, gagliardo_form(hp), hp, rspec)


def weighted_lp(u: TestFunction, weight_exponent: float, hp: HardyParams, spec: Optional[QuadratureSpec] = None,
                log_weight_q: Optional[tuple] = None, power: Optional[float] = None) -> IntegralEstimate:
    """int |u|^P |x_k|^{-weight_exponent} [/ ln^q(4R/|x|)] dx.

    P defaults to p, or to q when ``log_weight_q = (R, q)`` is given.
    """
    spec = spec or QuadratureSpec()
    if power is None:
        power = hp.p if log_weight_q is None else log_weight_q[1]
    rel = min(spec.rel_tol, 1e-10)
    return weighted_power_integral(u, hp.k, float(power), float(weight_exponent), log_weight_q, rel)


def hardy_term(u: TestFunction, hp: HardyParams, spec: Optional[QuadratureSpec] = None) -> IntegralEstimate:
    """int |u|^p / |x_k|^{sp - alpha - beta} dx."""
    return weighted_lp(u, hp.hardy_exponent, hp, spec)


def remainder_form(hp: HardyParams, kind: str, r_param: Optional[float] = None) -> PairForm:
    if kind == "E_omega":
        return e_omega_form(hp)
    if kind == "E_tilde":
        return e_tilde_form(hp)
    if kind == "W_r_form":
        return w_r_form(hp, 2.0 if r_param is None else r_param)
    raise ParameterError(f"kind must be one of {REMAINDER_KINDS}")


def remainder_functional(v: TestFunction, hp: HardyParams, kind: str, r_param: Optional[float] = None,
                         spec: Optional[QuadratureSpec] = None) -> IntegralEstimate:
    """Remainder double integral of kind E_omega, E_tilde or W_r_form evaluated on v.

    For E_omega and E_tilde, v is the ground-state quotient |x_k|^gamma u
    (see :func:`frachardy.functions.ground_state_split`); W_r_form is applied to
    the function it is given.
    """
    spec = spec or QuadratureSpec()
    return double_integral(v, remainder_form(hp, kind, r_param), hp, spec)


def ground_state_quotient(u: TestFunction, hp: HardyParams) -> TestFunction:
    return ground_state_split(u, hp)[0]
