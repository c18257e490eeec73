"""Command-line front end.

    python3 -m frachardy constant --d 2 --k 1 --s 0.6 --p 2
    python3 -m frachardy verify --theorem hardy --d 2 --k 1 --s 0.6 --p 2 --seed 42
    python3 -m frachardy counterexample --d 2 --s 0.5 --p 2 --eps 0.2,0.1,0.05,0.025 --format csv

Exit status: 0 when every check passes, 1 when any check fails, 2 on a
configuration error (inadmissible parameters, unwritable output, bad flags).
Options may also come from a plain ``key=value`` file given with ``--config``;
flags override the file.  ``FRACHARDY_SEED`` sets the default seed.  JSON
output embeds the resolved configuration; CSV written to ``--output`` gets a
``<output>.meta.json`` sidecar holding it.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from typing import Optional

from . import __version__
from .constants import (
    HardyParams,
    SobolevParams,
    critical_q,
    flat_constant_estimate,
    point_constant_estimate,
    lemma21_prefactor,
    remainder_C_p,
    remainder_c_p,
)
from .errors import NonIntegrableError, ParameterError, PreconditionError
from .functions import Bump
from .quadrature.functionals import QuadratureSpec, double_integral, gagliardo_form, weighted_lp
from .report import _clean, emit_report
from .verify import (
    DEFAULT_HARDY_TUPLES,
    THEOREM_IDS,
    centered_bump_suite,
    check_hardy,
    check_hardy_sobolev,
    check_hsm,
    check_log_hardy_sobolev,
    check_remainder_p_ge2,
    check_remainder_p_lt2,
    hsm_failure_study,
    random_bump_suite,
    sharpness_study,
    sign_changing_suite,
)

__all__ = ["RunConfig", "run", "main", "build_parser"]

COMMANDS = ("constant", "seminorm", "verify", "sharpness", "counterexample", "suite")

# remainder suites: (d, k, s, p, alpha, beta)
REMAINDER_GE2_TUPLES = ((2, 1, 0.5, 3.0, 0.3, 0.1), (2, 1, 0.3, 3.0, 0.0, 0.0))
REMAINDER_LT2_TUPLES = ((2, 1, 0.6, 1.5, 0.0, 0.0), (3, 1, 0.7, 1.5, 0.2, -0.2))


class ConfigError(Exception):
    """Configuration problem detected before any computation (exit status 2)."""


@dataclass
class RunConfig:
    command: str
    params: dict
    spec: QuadratureSpec
    output_path: Optional[str] = None
    format: str = "json"
    options: dict = field(default_factory=dict)

    def resolved(self) -> dict:
        return {"command": self.command, "params": self.params, "spec": self.spec.to_dict(),
                "output_path": self.output_path, "format": self.format, "options": self.options,
                "version": __version__}


def _floats(text) -> list:
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    return [float(x) for x in str(text).split(",") if x.strip()]


def _default_seed() -> int:
    env = os.environ.get("FRACHARDY_SEED")
    if env is None or env.strip() == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"FRACHARDY_SEED must be an integer, got {env!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("parameters")
    g.add_argument("--d", type=int, default=2, help="ambient dimension")
    g.add_argument("--k", type=int, default=None, help="codimension of K (default: d)")
    g.add_argument("--s", type=float, default=0.5, help="fractional order in (0, 1)")
    g.add_argument("--p", type=float, default=2.0, help="integrability exponent")
    g.add_argument("--alpha", type=float, default=0.0)
    g.add_argument("--beta", type=float, default=0.0)
    g.add_argument("--q", type=float, default=None, help="Sobolev exponent (default: critical dp/(d-sp))")
    e = common.add_argument_group("quadrature")
    e.add_argument("--engine", default="auto",
                   choices=["auto", "adaptive1d", "adaptive2d", "monte_carlo", "radial_reduction"])
    e.add_argument("--samples", type=int, default=200_000)
    e.add_argument("--seed", type=int, default=None, help="RNG seed (default: $FRACHARDY_SEED or 0)")
    e.add_argument("--rel-tol", type=float, default=1e-8)
    e.add_argument("--level", type=int, default=5, help="tanh-sinh level of the radial engine")
    e.add_argument("--proposal-exponent", type=float, default=None)
    o = common.add_argument_group("output")
    o.add_argument("--output", default=None, help="output file (default: stdout)")
    o.add_argument("--format", choices=["json", "csv"], default=None,
                   help="output format (default: from the output suffix, else json)")
    o.add_argument("--config", default=None, help="key=value file; flags override it")

    parser = argparse.ArgumentParser(prog="frachardy", description="Weighted fractional Hardy inequality toolkit")
    parser.add_argument("--version", action="version", version=f"frachardy {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("constant", parents=[common], help="sharp constant and remainder constants")
    sm = sub.add_parser("seminorm", parents=[common], help="weighted seminorm and Hardy term of a bump")
    sm.add_argument("--center", default=None, help="comma-separated centre (default: origin)")
    sm.add_argument("--radius", type=float, default=1.0)
    sm.add_argument("--m", type=int, default=2)
    vp = sub.add_parser("verify", parents=[common], help="run one inequality check on its default suite")
    vp.add_argument("--theorem", required=True, choices=THEOREM_IDS)
    vp.add_argument("--suite-size", type=int, default=20)
    vp.add_argument("--r", type=float, default=None, help="W_r exponent (default: p)")
    sh = sub.add_parser("sharpness", parents=[common], help="ratio along the minimizing sequence u_N")
    sh.add_argument("--N", default="1,4,16,64")
    ce = sub.add_parser("counterexample", parents=[common], help="Psi(u_eps) decay study (k = d)")
    ce.add_argument("--eps", default="0.2,0.1,0.05,0.025")
    su = sub.add_parser("suite", parents=[common], help="full default battery of checks")
    su.add_argument("--suite-size", type=int, default=20)
    return parser


def _read_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}")
    out = {}
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key=value")
        key, val = (x.strip() for x in line.split("=", 1))
        out[key.replace("-", "_")] = val
    return out


def parse_args(argv) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        values = _read_config_file(args.config)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in sub._actions}
        unknown = sorted(set(values) - set(known))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        converted = {}
        for key, val in values.items():
            act = known[key]
            try:
                converted[key] = act.type(val) if act.type is not None else val
            except (TypeError, ValueError):
                raise ConfigError(f"config key {key}: cannot parse {val!r}")
            if act.choices is not None and converted[key] not in act.choices:
                raise ConfigError(f"config key {key}: {val!r} is not one of {sorted(act.choices)}")
        sub.set_defaults(**converted)
        args = parser.parse_args(argv)
    return args


def config_from_args(args: argparse.Namespace) -> RunConfig:
    seed = _default_seed() if args.seed is None else args.seed
    k = args.d if args.k is None else args.k
    if args.command == "counterexample":
        k = args.d
    params = {"d": args.d, "k": k, "s": args.s, "p": args.p, "alpha": args.alpha, "beta": args.beta}
    if args.q is not None:
        params["q"] = args.q
    spec = QuadratureSpec(args.engine, args.rel_tol, args.samples, seed, args.proposal_exponent, args.level)
    fmt = args.format
    if fmt is None:
        fmt = "csv" if args.output and args.output.lower().endswith(".csv") else "json"
    options = {}
    for key in ("theorem", "suite_size", "r", "N", "eps", "center", "radius", "m"):
        if hasattr(args, key):
            options[key] = getattr(args, key)
    return RunConfig(args.command, params, spec, args.output, fmt, options)


def _check_output_path(path: Optional[str]):
    if path is None:
        return
    if os.path.isdir(path):
        raise ConfigError(f"output path is a directory: {path}")
    parent = os.path.dirname(os.path.abspath(path)) or "."
    if not os.path.isdir(parent):
        raise ConfigError(f"output directory does not exist: {parent}")
    if not os.access(parent, os.W_OK) or (os.path.exists(path) and not os.access(path, os.W_OK)):
        raise ConfigError(f"output path is not writable: {path}")


def _write_atomic(path: Optional[str], data: bytes):
    if path is None:
        sys.stdout.write(data.decode())
        sys.stdout.flush()
        return
    parent = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(prefix=".frachardy-", dir=parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _hardy_params(cfg: RunConfig) -> HardyParams:
    p = cfg.params
    return HardyParams(p["d"], p["s"], p["p"], p["k"], p["alpha"], p["beta"])


def _sobolev(hp: HardyParams, q, log_variant=False) -> SobolevParams:
    if q is None:
        q = critical_q(hp.d, hp.s, hp.p)
        if not math.isfinite(q):
            raise ParameterError("sp >= d: give --q explicitly")
    return SobolevParams(hp, float(q), log_variant)


def _json(obj) -> bytes:
    return (json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n").encode()


def _rows_csv(header, rows) -> bytes:
    import csv
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows([[repr(v) if isinstance(v, float) else v for v in row] for row in rows])
    return buf.getvalue().encode()


def _cmd_constant(cfg: RunConfig):
    hp = _hardy_params(cfg)
    c1 = point_constant_estimate(hp.k, hp.s, hp.p, hp.alpha, hp.beta, cfg.spec.rel_tol)
    C = flat_constant_estimate(hp)
    out = {"command": "constant", "params": hp.as_dict(), "regime": hp.regime, "gamma": hp.gamma,
           "C": C.value, "C_std_error": C.std_error, "C1": c1.value, "C1_std_error": c1.std_error,
           "prefactor": lemma21_prefactor(hp.d, hp.k, hp.s, hp.p)}
    if hp.p >= 2:
        out["c_p"] = remainder_c_p(hp.p)
    elif hp.p > 1:
        out["C_p"] = remainder_C_p(hp.p)
        out["C_p_nonnegative"] = remainder_C_p(hp.p, True)
    out["config"] = cfg.resolved()
    if cfg.format == "csv":
        keys = ["C", "C1", "prefactor", "gamma", "c_p", "C_p", "C_p_nonnegative"]
        errs = {"C": C.std_error, "C1": c1.std_error}
        rows = [[k, out[k], errs.get(k, 0.0)] for k in keys if k in out]
        return _rows_csv(["quantity", "value", "std_error"], rows), 0
    return _json(out), 0


def _cmd_seminorm(cfg: RunConfig):
    hp = _hardy_params(cfg)
    o = cfg.options
    center = tuple(_floats(o["center"])) if o.get("center") else tuple([0.0] * hp.d)
    u = Bump(center, float(o["radius"]), int(o["m"]))
    if u.d != hp.d:
        raise ParameterError("--center must have d coordinates")
    g = double_integral(u, gagliardo_form(hp), hp, cfg.spec)
    h = weighted_lp(u, hp.hardy_exponent, hp, cfg.spec)
    out = {"command": "seminorm", "params": hp.as_dict(), "function": u.describe(),
           "gagliardo": {"value": g.value, "std_error": g.std_error, "samples": g.samples_used},
           "hardy": {"value": h.value, "std_error": h.std_error}, "config": cfg.resolved()}
    if cfg.format == "csv":
        rows = [["gagliardo", g.value, g.std_error], ["hardy", h.value, h.std_error]]
        return _rows_csv(["quantity", "value", "std_error"], rows), 0
    return _json(out), 0


def _theorem_reports(theorem: str, hp: HardyParams, q, spec: QuadratureSpec, n: int, r=None) -> list:
    seed = spec.seed
    if theorem == "hardy":
        return [check_hardy(u, hp, spec) for u in random_bump_suite(hp, n, seed)]
    if theorem == "remainder_p_ge2":
        return [check_remainder_p_ge2(u, hp, spec) for u in random_bump_suite(hp, n, seed)]
    if theorem == "remainder_p_lt2":
        out = [check_remainder_p_lt2(u, hp, spec) for u in random_bump_suite(hp, n, seed)]
        return out + [check_remainder_p_lt2(u, hp, spec) for u in sign_changing_suite(hp, max(1, n // 2), seed)]
    if theorem.startswith("hardy_sobolev"):
        sp = _sobolev(hp, q)
        form = theorem.rsplit("_", 1)[1]
        return [check_hardy_sobolev(u, sp, spec, form, r) for u in random_bump_suite(hp, n, seed)]
    if theorem.startswith("log_hardy_sobolev"):
        sp = _sobolev(hp, q, True)
        form = theorem.rsplit("_", 1)[1]
        funcs = centered_bump_suite(hp) + random_bump_suite(hp, n, seed)
        return [check_log_hardy_sobolev(u, sp, spec, form, r) for u in funcs]
    if theorem == "hsm":
        sp = _sobolev(hp, q)
        return [check_hsm(u, sp, spec) for u in random_bump_suite(hp, n, seed)]
    if theorem == "hsm_log":
        sp = _sobolev(hp, q, True)
        funcs = centered_bump_suite(hp) + random_bump_suite(hp, n, seed)
        return [check_hsm(u, sp, spec, log_variant=True) for u in funcs]
    raise ParameterError(f"unknown theorem {theorem}")


def _cmd_verify(cfg: RunConfig):
    hp = _hardy_params(cfg)
    o = cfg.options
    if o["suite_size"] < 0:
        raise ParameterError("suite-size must be nonnegative")
    reports = _theorem_reports(o["theorem"], hp, cfg.params.get("q"), cfg.spec, o["suite_size"], o.get("r"))
    status = 0 if all(r.passed for r in reports) else 1
    return emit_report(reports, cfg.format, cfg.resolved()), status


def default_battery(spec: QuadratureSpec, n: int) -> list:
    """Every theorem-backed default suite: Hardy tuples, remainders, Hardy-Sobolev and HSM."""
    reports = []
    for d, k, s, p, a, b in DEFAULT_HARDY_TUPLES:
        reports += _theorem_reports("hardy", HardyParams(d, s, p, k, a, b), None, spec, n)
    for d, k, s, p, a, b in REMAINDER_GE2_TUPLES:
        reports += _theorem_reports("remainder_p_ge2", HardyParams(d, s, p, k, a, b), None, spec, n)
    for d, k, s, p, a, b in REMAINDER_LT2_TUPLES:
        reports += _theorem_reports("remainder_p_lt2", HardyParams(d, s, p, k, a, b), None, spec, n)
    hs = HardyParams(2, 0.6, 2.0, 1)
    reports += _theorem_reports("hardy_sobolev_ineq1", hs, 3.0, spec, n)
    reports += _theorem_reports("hardy_sobolev_ineq2", hs, 3.0, spec, n)
    reports += _theorem_reports("hsm", hs, None, spec, n)
    reports += _theorem_reports("hsm_log", HardyParams(2, 0.5, 2.0, 2), None, spec, n)
    return reports


def _cmd_suite(cfg: RunConfig):
    n = cfg.options["suite_size"]
    if n < 0:
        raise ParameterError("suite-size must be nonnegative")
    reports = default_battery(cfg.spec, n)
    status = 0 if all(r.passed for r in reports) else 1
    return emit_report(reports, cfg.format, cfg.resolved()), status


def _cmd_sharpness(cfg: RunConfig):
    hp = _hardy_params(cfg)
    Ns = _floats(cfg.options["N"])
    if not Ns or any(N <= 0 for N in Ns):
        raise ParameterError("N values must be positive")
    table = sharpness_study(hp, None, Ns, cfg.spec)
    return emit_report(table, cfg.format, cfg.resolved()), 0 if table.passed else 1


def _cmd_counterexample(cfg: RunConfig):
    hp = _hardy_params(cfg)
    eps = _floats(cfg.options["eps"])
    if not eps or any(e <= 0 for e in eps):
        raise ParameterError("eps values must be positive")
    sp = _sobolev(hp, cfg.params.get("q")) if cfg.params.get("q") is not None else None
    table = hsm_failure_study(hp, sp, eps, cfg.spec)
    return emit_report(table, cfg.format, cfg.resolved()), 0 if table.passed else 1


_HANDLERS = {"constant": _cmd_constant, "seminorm": _cmd_seminorm, "verify": _cmd_verify,
             "sharpness": _cmd_sharpness, "counterexample": _cmd_counterexample, "suite": _cmd_suite}


def run(cfg: RunConfig) -> int:
    """Execute a validated configuration; returns the exit status."""
    if cfg.command not in _HANDLERS:
        raise ConfigError(f"unknown command {cfg.command}")
    _check_output_path(cfg.output_path)
    data, status = _HANDLERS[cfg.command](cfg)
    _write_atomic(cfg.output_path, data)
    if cfg.format == "csv" and cfg.output_path is not None:
        # CSV has no room for metadata: the resolved configuration goes to a sidecar
        _write_atomic(cfg.output_path + ".meta.json", _json({"config": cfg.resolved(), "exit_status": status}))
    return status


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        cfg = config_from_args(args)
        return run(cfg)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code) if isinstance(exc.code, int) else 2
    except (ConfigError, ParameterError, PreconditionError, NonIntegrableError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main_entry() -> None:
    """Console-script entry point."""
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
