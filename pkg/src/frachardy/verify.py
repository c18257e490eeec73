"""Inequality harness: pass/fail verification of the Hardy-type inequalities.

Every check returns a :class:`VerificationReport` whose ``passed`` flag obeys
the single rule ``margin >= -3 * sigma``.  Studies (sharpness, counterexample)
return a :class:`StudyTable`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .constants import (
    HardyParams,
    SobolevParams,
    critical_q,
    flat_constant_estimate,
    lemma21_prefactor,
    power_difference_integral,
    remainder_C_p,
    remainder_c_p,
    sharp_constant_point,
)
from .errors import ParameterError, PreconditionError
from .functions import (
    Bump,
    BumpProfile,
    RadialProfile,
    RadialSpec,
    Superposition,
    TestFunction,
    ZeroFunction,
    ground_state_split,
    make_counterexample,
    make_sharpness_sequence,
    default_eta,
)
from .quadrature.estimate import IntegralEstimate
from .quadrature.functionals import (
    QuadratureSpec,
    _use_radial,
    double_integral,
    double_integrals_mc,
    e_omega_form,
    e_tilde_form,
    gagliardo_form,
    _combine,
    _log_powers,
    _to_pair_integrand,
    gagliardo_radial,
    w_r_form,
    weighted_lp,
)
from .quadrature.mc import PairIntegrand, mc_double_integral
from .quadrature.radial import radial_pair_integral
from .special_fns import sphere_surface

__all__ = [
    "VerificationReport",
    "StudyTable",
    "DualityResult",
    "check_hardy",
    "check_remainder_p_ge2",
    "check_remainder_p_lt2",
    "check_hardy_sobolev",
    "check_log_hardy_sobolev",
    "check_hsm",
    "hsm_failure_study",
    "sharpness_study",
    "duality_check",
    "random_bump_suite",
    "sign_changing_suite",
    "centered_bump_suite",
    "suite_min_ratio",
    "DEFAULT_HARDY_TUPLES",
    "THEOREM_IDS",
]

THEOREM_IDS = (
    "hardy",
    "remainder_p_ge2",
    "remainder_p_lt2",
    "hardy_sobolev_ineq1",
    "hardy_sobolev_ineq2",
    "log_hardy_sobolev_ineq1",
    "log_hardy_sobolev_ineq2",
    "hsm",
    "hsm_log",
)

# (d, k, s, p, alpha, beta): both regimes, point and flat singularities
DEFAULT_HARDY_TUPLES = (
    (2, 1, 0.6, 2.0, 0.0, 0.0),
    (2, 1, 0.5, 2.0, 0.25, 0.25),
    (3, 2, 0.5, 2.0, 0.0, 0.0),
    (2, 1, 0.5, 3.0, 0.3, 0.1),
    (2, 2, 0.5, 2.0, -0.3, -0.3),
    (3, 1, 0.7, 1.5, 0.2, -0.2),
)


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one inequality check.

    ``margin`` is lhs - constant * hardy_term - (claimed lower bound); for the
    Hardy-Sobolev checks, whose constant is only known to exist, it is the
    empirical ratio itself.  ``passed`` is True exactly when
    margin >= -3 * sigma.
    """

    theorem_id: str
    params: dict
    lhs: IntegralEstimate
    hardy_term: IntegralEstimate
    constant: float
    remainder_or_rhs: IntegralEstimate
    margin: float
    sigma: float
    passed: bool = field(init=False)
    empirical_ratio: Optional[float] = None
    skipped: bool = False
    seed: int = 0
    spec: dict = field(default_factory=dict)
    function: dict = field(default_factory=dict)
    note: str = ""
    version: str = __version__

    def __post_init__(self):
        if self.theorem_id not in THEOREM_IDS:
            raise ParameterError(f"unknown theorem id {self.theorem_id!r}")
        if not self.sigma >= 0:
            raise ValueError("sigma must be nonnegative")
        object.__setattr__(self, "passed", bool(self.margin >= -3.0 * self.sigma))


@dataclass(frozen=True)
class StudyTable:
    """Rows of a parameter study plus summary statistics and the overall verdict."""

    study_id: str
    params: dict
    columns: tuple
    rows: tuple
    summary: dict
    passed: bool
    csv_columns: tuple = ()
    seed: int = 0
    spec: dict = field(default_factory=dict)
    version: str = __version__


@dataclass(frozen=True)
class DualityResult:
    constant: float
    dual_constant: Optional[float]
    rel_diff: Optional[float]
    skipped: bool
    note: str = ""

    def __bool__(self) -> bool:
        return (not self.skipped) and self.rel_diff is not None and self.rel_diff < 1e-6


# ---------------------------------------------------------------------------
# helpers


def _spec(spec: Optional[QuadratureSpec]) -> QuadratureSpec:
    return spec if spec is not None else QuadratureSpec()


def _check_dimension(u: TestFunction, hp: HardyParams):
    if u.d != hp.d:
        raise ParameterError(f"test function lives in dimension {u.d}, parameters have d={hp.d}")


def _check_class(u: TestFunction, hp: HardyParams):
    """Admissible class: C_c^1(R^d) when subcritical, supported off K when supercritical."""
    _check_dimension(u, hp)
    if hp.regime == "supercritical" and not isinstance(u, ZeroFunction) and u.min_distance_to_K(hp.k) <= 0:
        raise PreconditionError("supercritical regime: u must vanish in a neighbourhood of K")


def _estimate_forms(items, hp, spec):
    """Estimates and covariance for [(function, form), ...] sharing the kernel order."""
    n = len(items)
    if all(isinstance(f, ZeroFunction) for f, _ in items):
        return [IntegralEstimate(0.0)] * n, np.zeros((n, n))
    if all(_use_radial(f, hp, spec) for f, _ in items):
        ests = [double_integral(f, form, hp, spec) for f, form in items]
        return ests, np.diag([e.std_error**2 for e in ests])
    res = double_integrals_mc(items, hp, spec)
    errs = res.std_errors()
    ests = [IntegralEstimate(float(m), float(e), res.samples) for m, e in zip(res.means, errs)]
    return ests, res.cov


def _combined_sigma(coeffs, cov, extra=()):
    c = np.asarray(coeffs, dtype=float)
    var = float(c @ cov @ c) + sum(x * x for x in extra)
    return math.sqrt(max(var, 0.0))


def _constant_for(hp: HardyParams) -> IntegralEstimate:
    return flat_constant_estimate(hp)


def _base_fields(hp, spec, u, extra_params=None):
    params = hp.as_dict()
    if extra_params:
        params.update(extra_params)
    return dict(params=params, seed=int(spec.seed), spec=spec.to_dict(), function=u.describe())


def _hardy_difference(u, hp, spec, extra_items=(), extra_coeffs=()):
    """lhs, hardy, constant, extra estimates and the sigma of lhs - C hardy - sum c_i extra_i."""
    _check_class(u, hp)
    C = _constant_for(hp)
    hardy = weighted_lp(u, hp.hardy_exponent, hp, spec)
    items = [(u, gagliardo_form(hp))] + list(extra_items)
    ests, cov = _estimate_forms(items, hp, spec)
    coeffs = [1.0] + [-c for c in extra_coeffs]
    value = ests[0].value - C.value * hardy.value - sum(c * e.value for c, e in zip(extra_coeffs, ests[1:]))
    sigma = _combined_sigma(coeffs, cov, (C.value * hardy.std_error, hardy.value * C.std_error))
    return C, hardy, ests, value, sigma


# ---------------------------------------------------------------------------
# checks


def check_hardy(u: TestFunction, hp: HardyParams, spec: Optional[QuadratureSpec] = None) -> VerificationReport:
    """[u]^p >= C int |u|^p / |x_k|^{sp-alpha-beta}."""
    spec = _spec(spec)
    C, hardy, ests, margin, sigma = _hardy_difference(u, hp, spec)
    return VerificationReport("hardy", lhs=ests[0], hardy_term=hardy, constant=C.value,
                              remainder_or_rhs=hardy.scaled(C.value), margin=margin, sigma=sigma,
                              **_base_fields(hp, spec, u))


def check_remainder_p_ge2(u: TestFunction, hp: HardyParams, spec: Optional[QuadratureSpec] = None) -> VerificationReport:
    """[u]^p - C hardy >= c_p E_omega[v] with v = |x_k|^gamma u (equality for p = 2)."""
    spec = _spec(spec)
    if hp.p < 2:
        raise ParameterError("this remainder needs p >= 2")
    v, _ = ground_state_split(u, hp)
    cp = remainder_c_p(hp.p)
    C, hardy, ests, margin, sigma = _hardy_difference(u, hp, spec, [(v, e_omega_form(hp))], [cp])
    return VerificationReport("remainder_p_ge2", lhs=ests[0], hardy_term=hardy, constant=C.value,
                              remainder_or_rhs=ests[1].scaled(cp), margin=margin, sigma=sigma,
                              note=f"c_p={cp!r}", **_base_fields(hp, spec, u))


def check_remainder_p_lt2(u: TestFunction, hp: HardyParams, spec: Optional[QuadratureSpec] = None,
                          nonnegative_constant: Optional[bool] = None) -> VerificationReport:
    """[u]^p - C hardy >= C_p E~[v] for 1 < p < 2.

    The constant is p - 1 for nonnegative u and max{(p-1)/p, p(p-1)/2}
    otherwise; ``nonnegative_constant`` overrides the automatic choice
    (asking for p - 1 on a sign-changing u is a precondition error).
    """
    spec = _spec(spec)
    if not 1 < hp.p < 2:
        raise ParameterError("this remainder needs 1 < p < 2")
    use_nonneg = u.nonnegative if nonnegative_constant is None else bool(nonnegative_constant)
    if use_nonneg and not u.nonnegative:
        raise PreconditionError("the constant p-1 is only available for nonnegative u")
    Cp = remainder_C_p(hp.p, use_nonneg)
    v, _ = ground_state_split(u, hp)
    C, hardy, ests, margin, sigma = _hardy_difference(u, hp, spec, [(v, e_tilde_form(hp))], [Cp])
    return VerificationReport("remainder_p_lt2", lhs=ests[0], hardy_term=hardy, constant=C.value,
                              remainder_or_rhs=ests[1].scaled(Cp), margin=margin, sigma=sigma,
                              note=f"C_p={Cp!r}", **_base_fields(hp, spec, u))


def _skipped(theorem_id, hp, spec, u, extra_params, note):
    zero = IntegralEstimate(0.0)
    return VerificationReport(theorem_id, lhs=zero, hardy_term=zero, constant=0.0, remainder_or_rhs=zero,
                              margin=0.0, sigma=0.0, skipped=True, note=note,
                              **_base_fields(hp, spec, u, extra_params))


def _ratio_report(theorem_id, u, hp, spec, lhs_form, rhs_power, rhs_exponent, lhs_power, extra, log_weight=None):
    """empirical ratio lhs^{1/lhs_power} / rhs^{1/rhs_power}."""
    lhs = double_integral(u, lhs_form, hp, spec)
    rhs = weighted_lp(u, rhs_exponent, hp, spec, log_weight_q=log_weight, power=rhs_power)
    if lhs.value <= 0 or rhs.value <= 0:
        ratio, sig = 0.0, 0.0
    else:
        ratio = lhs.value ** (1 / lhs_power) / rhs.value ** (1 / rhs_power)
        sig = ratio * math.hypot(lhs.std_error / (lhs_power * lhs.value), rhs.std_error / (rhs_power * rhs.value))
    zero = IntegralEstimate(0.0)
    return VerificationReport(theorem_id, lhs=lhs, hardy_term=zero, constant=0.0, remainder_or_rhs=rhs,
                              margin=ratio, sigma=sig, empirical_ratio=ratio,
                              **_base_fields(hp, spec, u, extra))


def _ineq2_exponent(sp_params: SobolevParams, d: int, k: int, s: float) -> float:
    q2 = sp_params.q
    upper = 2 * d / (d - 2 * s) if 2 * s < d else math.inf
    if not 2 < q2 <= upper * (1 + 1e-12):
        raise ParameterError("q must lie in (2, 2d/(d-2s)] for the W_r form")
    theta2 = d + (2 * s - d) * q2 / 2
    return theta2 + (k - 2 * s) * q2 / 2, theta2


def check_hardy_sobolev(u: TestFunction, sp_params: SobolevParams, spec: Optional[QuadratureSpec] = None,
                        form: str = "ineq1", r_param: Optional[float] = None) -> VerificationReport:
    """Empirical ratio of the weighted Hardy-Sobolev inequality (flat K, 1 <= k < d).

    ineq1: (E_omega-weighted seminorm of u)^{1/p} / (int |u|^q |x_k|^{-theta-(k-sp)q/p})^{1/q}.
    ineq2: (W_r-weighted order-2s seminorm with p = 2)^{1/2} / (int |u|^q' |x_k|^{-theta'-(k-2s)q'/2})^{1/q'},
    with q' = sp_params.q and r = r_param (default p).
    The constant is only known to exist, so ``margin`` is the ratio itself.
    """
    spec = _spec(spec)
    hp = sp_params.base
    if hp.k == hp.d:
        raise ParameterError("the Hardy-Sobolev inequality needs k < d (it fails for k = d)")
    if form not in ("ineq1", "ineq2"):
        raise ParameterError("form must be ineq1 or ineq2")
    _check_dimension(u, hp)
    tid = f"hardy_sobolev_{form}"
    extra = {"q": sp_params.q, "theta": sp_params.theta}
    if isinstance(u, ZeroFunction):
        return _skipped(tid, hp, spec, u, extra, "u = 0: ratio 0/0")
    q = sp_params.q
    if form == "ineq1":
        e = sp_params.theta + (hp.k - hp.sp) * q / hp.p
        return _ratio_report(tid, u, hp, spec, e_omega_form(hp), q, e, hp.p, extra)
    r = hp.p if r_param is None else r_param
    e, theta2 = _ineq2_exponent(sp_params, hp.d, hp.k, hp.s)
    extra.update(theta=theta2, r=r)
    return _ratio_report(tid, u, hp, spec, w_r_form(hp, r), q, e, 2.0, extra)


def _support_radius(u: TestFunction) -> float:
    lo, hi = u.support_box()
    rs = u.radial_spec() if hasattr(u, "radial_spec") else None
    if rs is not None and rs.tail is None:
        return float(rs.outer)
    if isinstance(u, Bump):
        return float(np.linalg.norm(u.center) + u.radius)
    return float(np.linalg.norm(np.maximum(np.abs(lo), np.abs(hi))))


def check_log_hardy_sobolev(u: TestFunction, sp_params: SobolevParams, spec: Optional[QuadratureSpec] = None,
                            form: str = "ineq1", r_param: Optional[float] = None,
                            R: Optional[float] = None) -> VerificationReport:
    """Point singularity (k = d) Hardy-Sobolev ratio with the weight |x|^{-d} ln^{-q}(4R/|x|).

    R defaults to twice the support radius of u.
    """
    spec = _spec(spec)
    hp = sp_params.base
    if hp.k != hp.d:
        raise ParameterError("the logarithmic Hardy-Sobolev inequality is the k = d case")
    if form not in ("ineq1", "ineq2"):
        raise ParameterError("form must be ineq1 or ineq2")
    _check_dimension(u, hp)
    tid = f"log_hardy_sobolev_{form}"
    if isinstance(u, ZeroFunction):
        return _skipped(tid, hp, spec, u, {"q": sp_params.q}, "u = 0: ratio 0/0")
    rad = _support_radius(u)
    R = 2.0 * rad if R is None else float(R)
    if rad > R:
        raise PreconditionError("supp u must lie in B(0, R)")
    q = sp_params.q
    extra = {"q": q, "R": R}
    if form == "ineq1":
        return _ratio_report(tid, u, hp, spec, e_omega_form(hp), q, float(hp.d), hp.p, extra, (R, q))
    r = hp.p if r_param is None else r_param
    extra["r"] = r
    return _ratio_report(tid, u, hp, spec, w_r_form(hp, r), q, float(hp.d), 2.0, extra, (R, q))


def check_hsm(u: TestFunction, sp_params: SobolevParams, spec: Optional[QuadratureSpec] = None,
              log_variant: bool = False, R: Optional[float] = None) -> VerificationReport:
    """Hardy-Sobolev-Maz'ya: numerator lhs - C hardy >= -3 sigma, ratio numerator / rhs^{p/q} reported.

    rhs = int |u|^q |x_k|^{q(alpha+beta)/p - theta} [/ ln^q(4R/|x|)], the
    logarithmic variant being the point case k = d with R = 2 x support radius
    unless given.
    """
    spec = _spec(spec)
    hp = sp_params.base
    tid = "hsm_log" if log_variant else "hsm"
    extra = {"q": sp_params.q, "theta": sp_params.theta}
    if log_variant and hp.k != hp.d:
        raise ParameterError("the logarithmic variant needs k = d")
    if not log_variant and hp.k == hp.d:
        raise ParameterError("without the logarithmic weight the inequality fails for k = d")
    _check_dimension(u, hp)
    if isinstance(u, ZeroFunction):
        return _skipped(tid, hp, spec, u, extra, "u = 0: ratio 0/0")
    log_weight = None
    if log_variant:
        rad = _support_radius(u)
        R = 2.0 * rad if R is None else float(R)
        if rad > R:
            raise PreconditionError("supp u must lie in B(0, R)")
        log_weight = (R, sp_params.q)
        extra["R"] = R
    C, hardy, ests, numerator, sigma = _hardy_difference(u, hp, spec)
    q, p = sp_params.q, hp.p
    e = sp_params.theta - q * (hp.alpha + hp.beta) / p
    rhs = weighted_lp(u, e, hp, spec, log_weight_q=log_weight, power=q)
    scale = rhs.value ** (p / q) if rhs.value > 0 else math.inf
    ratio = numerator / scale
    return VerificationReport(tid, lhs=ests[0], hardy_term=hardy, constant=C.value, remainder_or_rhs=rhs,
                              margin=numerator, sigma=sigma, empirical_ratio=ratio,
                              **_base_fields(hp, spec, u, extra))


def suite_min_ratio(reports: Sequence[VerificationReport]) -> dict:
    """Minimum and median empirical ratio over the non-skipped members of a suite.

    ``bounded_below`` is True when every ratio exceeds 3 of its own sigmas
    (for ratio-type reports) or is positive (numerator-type reports).
    """
    live = [r for r in reports if not r.skipped and r.empirical_ratio is not None]
    if not live:
        return {"count": 0, "min_ratio": None, "median_ratio": None, "bounded_below": True}
    ratios = np.array([r.empirical_ratio for r in live])
    ok = []
    for r in live:
        if r.theorem_id.startswith(("hardy_sobolev", "log_hardy_sobolev")):
            ok.append(r.empirical_ratio - 3 * r.sigma > 0)
        else:
            ok.append(r.empirical_ratio > 0 or r.margin >= -3 * r.sigma)
    return {"count": len(live), "min_ratio": float(ratios.min()), "median_ratio": float(np.median(ratios)),
            "bounded_below": bool(all(ok))}


# ---------------------------------------------------------------------------
# studies


def _unweighted_radial_seminorm(spec_r: RadialSpec, dim: int, s: float, p: float, level: int = 5) -> float:
    """[f]^p_{W^{s,p}(R^dim)} for a compactly supported radial profile."""
    sp = s * p

    def psym(r, rho):
        return 2.0 * np.abs(spec_r.f(r) - spec_r.f(rho)) ** p

    return radial_pair_integral(psym, dim, sp, spec_r, sp, level=level)


def _fit_slope(x, y) -> float:
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def sharpness_study(hp: HardyParams, eta: Optional[RadialSpec] = None, N_list: Sequence[float] = (1, 4, 16, 64),
                    spec: Optional[QuadratureSpec] = None, phi_radius: float = 1.0, phi_m: int = 2) -> StudyTable:
    """Hardy ratio [u_N]^p / hardy(u_N) along u_N = eta(x_k) phi_N(x_{d-k}).

    Columns: N, ratio, ratio_sigma, gagliardo, gagliardo_sigma, hardy, margin,
    I1p, I2p.  I1^p = prefactor * [eta]^p_k does not depend on N;
    I2^p = c N^{-sp} is computed in closed form when beta = 0 and by
    Monte Carlo otherwise.  The limit of the ratio is prefactor * [eta]^p_k / hardy_k(eta).
    """
    spec = _spec(spec)
    if hp.k == hp.d:
        raise ParameterError("the sharpness construction needs k < d")
    eta = default_eta(hp) if eta is None else eta
    d, k, s, p, a, b = hp.d, hp.k, hp.s, hp.p, hp.alpha, hp.beta
    m = d - k
    hk = HardyParams(k, s, p, k, a, b)
    eta_fn = RadialProfile(k, eta)
    eta_semi = gagliardo_radial(eta_fn, hk, spec)
    eta_hardy = weighted_lp(eta_fn, hk.hardy_exponent, hk, spec)
    pref = lemma21_prefactor(d, k, s, p)
    limit = pref * eta_semi.value / eta_hardy.value
    I1p = pref * eta_semi.value
    C = _constant_for(hp).value

    phi_spec = BumpProfile(phi_radius, phi_m).spec()
    closed_I2 = b == 0
    if closed_I2:
        phi_semi = _unweighted_radial_seminorm(phi_spec, m, s, p, spec.level)
        phi_norm_p = weighted_lp(RadialProfile(m, phi_spec), 0.0, HardyParams(m, s, p, m, 0, 0, allow_critical=True),
                                 spec, power=p).value
        eta_mass = weighted_lp(eta_fn, -a, hk, spec, power=p).value  # int |eta|^p |x_k|^alpha
        c2 = lemma21_prefactor(d, m, s, p)
        I2_unit = c2 * eta_mass * phi_semi / phi_norm_p

    rows = []
    for N in N_list:
        u = make_sharpness_sequence(hp, N, eta, phi_radius, phi_m)
        hardy = weighted_lp(u, hp.hardy_exponent, hp, spec)
        res = _sharpness_mc(u, hp, spec, not closed_I2)
        g, gs = float(res.means[0]), float(res.std_errors()[0])
        I2p = I2_unit * N ** (-s * p) if closed_I2 else float(res.means[1])
        ratio = g / hardy.value
        rows.append((float(N), ratio, gs / hardy.value, g, gs, hardy.value, g - C * hardy.value, I1p, I2p))

    ratios = np.array([r[1] for r in rows])
    sig = np.array([r[2] for r in rows])
    monotone = bool(all(ratios[i + 1] <= ratios[i] + 3 * math.hypot(sig[i], sig[i + 1]) for i in range(len(rows) - 1)))
    margins = np.array([r[6] for r in rows])
    msig = np.array([r[4] for r in rows])
    margin_monotone = bool(all(margins[i + 1] <= margins[i] + 3 * math.hypot(msig[i], msig[i + 1])
                               for i in range(len(rows) - 1)))
    I2 = np.array([r[8] for r in rows])
    I2_decreasing = bool(np.all(np.diff(I2) < 0))
    rel_gap = float(abs(ratios[-1] - limit) / limit)
    within = rel_gap <= 0.15
    floor_ok = bool(ratios[-1] + 3 * sig[-1] >= C)
    decay = _fit_slope([r[0] for r in rows], I2) if np.all(I2 > 0) and len(rows) > 1 else float("nan")
    summary = {
        "limit_ratio": limit, "prefactor": pref, "eta_seminorm_p": eta_semi.value, "eta_hardy": eta_hardy.value,
        "sharp_constant": C, "final_ratio": float(ratios[-1]), "final_rel_gap": rel_gap,
        "ratio_monotone": monotone, "margin_monotone": margin_monotone, "I2_decreasing": I2_decreasing,
        "I2_decay_rate": decay, "within_15_percent": within, "above_sharp_constant": floor_ok,
        "I2_method": "closed_form" if closed_I2 else "monte_carlo",
    }
    passed = monotone and I2_decreasing and within and floor_ok
    cols = ("N", "ratio", "ratio_sigma", "gagliardo", "gagliardo_sigma", "hardy", "margin", "I1p", "I2p")
    return StudyTable("sharpness", hp.as_dict(), cols, tuple(rows), summary, passed, cols,
                      int(spec.seed), spec.to_dict())


def _sharpness_mc(u, hp: HardyParams, spec: QuadratureSpec, with_i2: bool):
    """Shared-sample estimates of [u_N]^p and (optionally) the I2^p piece."""
    p, a, b, k = hp.p, hp.alpha, hp.beta, hp.k
    items = [_to_pair_integrand(u, gagliardo_form(hp), k)]
    if with_i2:
        def i2(x, y):
            rx, ry = np.linalg.norm(x[:, :k], axis=1), np.linalg.norm(y[:, :k], axis=1)
            diff = np.abs(u.eta_values(x[:, :k])) ** p * np.abs(u.phi_N(x[:, k:]) - u.phi_N(y[:, k:])) ** p
            return _combine(diff, _log_powers(rx, ry, a, b))

        items.append(PairIntegrand(i2, p, max(a, b), min(a, b, a + b, 0.0)))
    lo, hi = u.support_box()
    return mc_double_integral(items, hp.d, hp.sp, (lo, hi), int(spec.samples), int(spec.seed), k=k,
                              proposal_exponent=spec.proposal_exponent)


def hsm_failure_study(hp: HardyParams, sp_params: Optional[SobolevParams] = None,
                      eps_list: Sequence[float] = (0.2, 0.1, 0.05, 0.025),
                      spec: Optional[QuadratureSpec] = None) -> StudyTable:
    """Psi(u_eps) = (lhs - C hardy) / rhs^{p/q} along the two-branch family u_eps (k = d, q critical).

    When gamma < 0 the study runs on the inversion-dual parameters, which share
    the constant.  Columns: eps, psi, gagliardo, hardy, hardy_closed_form,
    sobolev, sobolev_lower_bound, C_eps, numerator.
    """
    spec = _spec(spec)
    if hp.k != hp.d:
        raise ParameterError("the counterexample lives in the point case k = d")
    d, s, p = hp.d, hp.s, hp.p
    if not hp.sp < d:
        raise ParameterError("the counterexample needs sp < d")
    if abs(hp.alpha + hp.beta + hp.sp - d) < 1e-12:
        raise ParameterError("alpha+beta+sp = d is excluded")
    q = critical_q(d, s, p)
    if sp_params is not None and abs(sp_params.q - q) > 1e-12 * q:
        raise ParameterError("the counterexample uses the critical exponent q = dp/(d-sp)")
    note = ""
    work = hp
    if hp.gamma < 0:
        work = hp.dual()
        note = "gamma < 0: evaluated on the inversion-dual parameters"
    elif hp.gamma == 0:
        raise ParameterError("gamma = 0 is degenerate")
    a, b = work.alpha, work.beta
    C = sharp_constant_point(d, s, p, a, b)
    S = sphere_surface(d - 1)
    theta = 0.0
    e_rhs = theta - q * (a + b) / p
    rspec = QuadratureSpec("radial_reduction", spec.rel_tol, spec.samples, spec.seed, spec.proposal_exponent, spec.level)
    rows = []
    for eps in eps_list:
        u = make_counterexample(eps, work)
        g = gagliardo_radial(u, work, rspec)
        h = weighted_lp(u, work.hardy_exponent, work, rspec)
        h_closed = S * (1.0 / (2 * (d + a + b - work.sp)) + 1.0 / (p * eps))
        sob = weighted_lp(u, e_rhs, work, rspec, power=q)
        lower = (S / q) ** (p / q) * eps ** (-p / q)
        C_eps = power_difference_integral(d, float(s), float(p), float(a), float(b), work.gamma + eps).value
        num = g.value - C * h.value
        psi = num / sob.value ** (p / q)
        rows.append((float(eps), psi, g.value, h.value, h_closed, sob.value, lower, C_eps, num))
    eps_arr = np.array([r[0] for r in rows])
    psi_arr = np.array([r[1] for r in rows])
    order = np.argsort(-eps_arr)
    slope = _fit_slope(eps_arr, psi_arr) if np.all(psi_arr > 0) and len(rows) > 1 else float("nan")
    target = p / q
    monotone = bool(np.all(np.diff(psi_arr[order]) < 0))
    slope_ok = bool(0.85 * target <= slope <= 1.15 * target)
    ceps_ok = bool(all(r[7] > C for r in rows))
    hardy_err = max(abs(r[3] - r[4]) / r[4] for r in rows)
    sob_ok = bool(all(r[5] ** (p / q) >= r[6] * (1 - 1e-9) for r in rows))
    summary = {"slope": slope, "target_slope": target, "slope_ok": slope_ok, "psi_monotone": monotone,
               "C": C, "C_eps_exceeds_C": ceps_ok, "hardy_max_rel_err": hardy_err,
               "sobolev_lower_bound_ok": sob_ok, "q": q, "note": note}
    passed = slope_ok and monotone and ceps_ok and hardy_err <= 1e-6 and sob_ok
    cols = ("eps", "psi", "gagliardo", "hardy", "hardy_closed_form", "sobolev", "sobolev_lower_bound", "C_eps",
            "numerator")
    params = work.as_dict()
    params["q"] = q
    return StudyTable("counterexample", params, cols, tuple(rows), summary, passed,
                      ("eps", "psi", "slope"), int(spec.seed), rspec.to_dict())


def duality_check(hp: HardyParams) -> DualityResult:
    """C_1(alpha, beta) versus C_1(sp-alpha-d, sp-beta-d); inadmissible duals are skipped."""
    if hp.k != hp.d:
        raise ParameterError("the inversion duality needs k = d")
    c = sharp_constant_point(hp.d, hp.s, hp.p, hp.alpha, hp.beta)
    try:
        dual = hp.dual()
    except ParameterError as exc:
        return DualityResult(c, None, None, True, str(exc))
    cd = sharp_constant_point(dual.d, dual.s, dual.p, dual.alpha, dual.beta)
    return DualityResult(c, cd, abs(c - cd) / abs(c), False)


# ---------------------------------------------------------------------------
# default suites


def random_bump_suite(hp: HardyParams, n: int = 20, seed: int = 0, crossing: Optional[bool] = None) -> list:
    """n seeded random bumps inside a unit-scale box.

    In the supercritical regime every bump stays at distance >= 0.05 from K.
    In the subcritical regime the first half of the suite straddles K
    (``crossing`` forces one behaviour for all members).
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(hp.d, hp.k)))
    out = []
    for i in range(n):
        radius = float(rng.uniform(0.25, 0.6))
        cross = (hp.regime == "subcritical" and i < n // 2) if crossing is None else crossing
        if hp.regime == "supercritical":
            cross = False
        dist = float(rng.uniform(0.0, 0.8 * radius)) if cross else radius + float(rng.uniform(0.05, 0.5))
        g = rng.standard_normal(hp.k)
        direction = g / np.linalg.norm(g)
        center_k = dist * direction
        center_rest = rng.uniform(-0.5, 0.5, hp.d - hp.k)
        out.append(Bump(tuple(float(x) for x in np.concatenate([center_k, center_rest])), radius, 2))
    return out


def sign_changing_suite(hp: HardyParams, n: int = 10, seed: int = 0) -> list:
    """Bump minus a disjoint shifted bump, seeded."""
    base = random_bump_suite(hp, 2 * n, seed + 7919, crossing=False)
    out = []
    for i in range(n):
        b1 = base[2 * i]
        c = np.array(b1.center)
        shift = np.zeros(hp.d)
        shift[-1] = 2 * b1.radius + 0.1 + 0.3 * (i % 3)
        if hp.k == hp.d:
            # move along the direction of the center so that the copy also avoids K
            unit = c / np.linalg.norm(c)
            shift = unit * (2 * b1.radius + 0.1)
        b2 = Bump(tuple(float(x) for x in c + shift), b1.radius * (0.7 + 0.1 * (i % 3)), 2)
        out.append(Superposition(((1.0, b1), (-0.8, b2))))
    return out


def centered_bump_suite(hp: HardyParams, radii: Sequence[float] = (0.5, 0.8, 1.0, 1.5)) -> list:
    """Radial bumps centred on the origin (k = d, radial engine)."""
    return [Bump(tuple([0.0] * hp.d), float(r), 2) for r in radii]
