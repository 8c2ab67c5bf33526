"""Command-line front end: solve, sweep, verify, simulate and scan.

Single results are emitted as JSON, curves as CSV with fixed headers; all
numeric output uses shortest-round-trip decimal formatting so identical
inputs produce byte-identical files.  Exit codes: 0 success, 1 invalid or
infeasible input, 2 verification failure (verify command only).

Relative ``--output`` paths are resolved against the ``PRIVCOMM_OUTPUT_DIR``
environment variable when it is set.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from .curves import sweep_privacy_distortion, sweep_rate_distortion
from .equilibrium import (
    ChannelSpec,
    Setting,
    SolveError,
    evaluate_setting2,
    solve_setting1,
    solve_setting2,
    solve_setting3,
)
from .model import ModelError, validate_model
from .montecarlo import SimConfig, simulate_policy
from .oracle import OracleConfig, lagrangian_scan, verify_equilibrium

OUTPUT_DIR_ENV = "PRIVCOMM_OUTPUT_DIR"

NATS_PER_BIT = math.log(2.0)


class CliError(Exception):
    """Raised for bad flags/combinations; mapped to exit status 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); keep exit codes ours
        raise CliError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="privcomm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, channel=True, dp=True):
        p.add_argument("--config", help="flat key=value config file; flags override")
        p.add_argument("--sigma-x2", type=float, help="variance of X")
        p.add_argument("--rho", type=float, help="normalized cross-correlation")
        p.add_argument("--r", type=float, help="normalized variance of theta")
        if dp:
            p.add_argument("--dp", type=float, help="privacy MMSE target")
        p.add_argument("--sigma-n2", type=float, help="test-channel noise (compression)")
        if channel:
            p.add_argument("--pt", type=float, help="transmit power budget (channel)")
            p.add_argument("--sigma-z2", type=float, help="channel noise variance")
        p.add_argument("--output", help="output path; stdout when omitted")
        p.add_argument("--bits", action="store_true", help="report rates/entropies in bits")

    p = sub.add_parser("solve", help="single equilibrium solution (JSON)")
    p.add_argument("--setting", choices=[s.value for s in Setting], required=True)
    add_common(p)

    p = sub.add_parser("tradeoff", help="privacy-distortion curve (CSV)")
    p.add_argument("--setting", choices=["simple", "channel"], required=True)
    add_common(p, dp=False)
    p.add_argument("--grid", type=int, default=65, help="number of curve samples")

    p = sub.add_parser("rate", help="rate-distortion sweep at fixed privacy (CSV)")
    add_common(p, channel=False)
    p.add_argument("--noise-grid", help="comma-separated sigma_n2 values", required=True)

    p = sub.add_parser("verify", help="brute-force oracle verification (JSON)")
    p.add_argument("--setting", choices=[s.value for s in Setting], required=True)
    add_common(p)
    p.add_argument("--oracle-grid", type=int, default=401)
    p.add_argument("--refine-tol", type=float, default=1e-7)

    p = sub.add_parser("simulate", help="Monte Carlo check of a solved equilibrium (JSON)")
    p.add_argument("--setting", choices=[s.value for s in Setting], required=True)
    add_common(p)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("scan", help="Lagrange-multiplier frontier scan (CSV)")
    add_common(p, channel=False, dp=False)
    p.add_argument("--lambdas", help="comma-separated multipliers in [0, 1/rho^2]")
    p.add_argument("--lambda-count", type=int, default=9,
                   help="uniform multiplier grid size when --lambdas is omitted")
    return parser


def _apply_config_file(args: argparse.Namespace) -> None:
    """Fill flags still unset from an optional flat key=value file."""
    path = getattr(args, "config", None)
    if not path:
        return
    try:
        lines = open(path).read().splitlines()
    except OSError as exc:
        raise CliError(f"cannot read config file: {exc}")
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        dest = key.replace("-", ".").replace(".", "_")
        if not hasattr(args, dest):
            raise CliError(f"{path}:{lineno}: unknown key {key!r}")
        if getattr(args, dest) is None:
            current_type = float if key not in ("setting", "output") else str
            if dest in ("grid", "samples", "seed", "oracle_grid", "lambda_count"):
                current_type = int
            setattr(args, dest, current_type(value))


def _model_from(args) -> "validate_model":
    for name in ("sigma_x2", "rho", "r"):
        if getattr(args, name, None) is None:
            raise CliError(f"missing required model parameter --{name.replace('_', '-')}")
    return validate_model(args.sigma_x2, args.rho, args.r)


def _channel_from(args) -> ChannelSpec:
    if getattr(args, "pt", None) is None or getattr(args, "sigma_z2", None) is None:
        raise CliError("channel setting requires --pt and --sigma-z2")
    return ChannelSpec(p_t=args.pt, sigma_z2=args.sigma_z2)


def _resolve_output(path: str) -> str:
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _emit(text: str, args) -> None:
    if getattr(args, "output", None):
        path = _resolve_output(args.output)
        try:
            with open(path, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise CliError(f"cannot write output: {exc}")
    else:
        sys.stdout.write(text)


def _csv(header: str, rows) -> str:
    lines = [header]
    for row in rows:
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _solution_dict(setting: Setting, sol, rate=None, bits=False) -> dict:
    out = {
        "setting": setting.value,
        "alpha": sol.policy.alpha,
        "beta": sol.policy.beta,
        "noise_var": sol.policy.noise_var,
        "kappa": sol.kappa,
        "d_c": sol.d_c,
        "d_p": sol.d_p,
        "constraint_active": sol.constraint_active,
    }
    if rate is not None:
        out["rate"] = rate / NATS_PER_BIT if bits else rate
        out["rate_units"] = "bits" if bits else "nats"
    return out


def _solve_for(args, setting: Setting, model):
    if args.dp is None:
        raise CliError("missing required --dp")
    if setting is Setting.SIMPLE:
        return solve_setting1(model, args.dp), None
    if setting is Setting.COMPRESSION:
        if args.sigma_n2 is None:
            raise CliError("compression setting requires --sigma-n2")
        sol = solve_setting2(model, args.dp, args.sigma_n2)
        rate, _, _ = evaluate_setting2(model, sol.policy)
        return sol, rate
    return solve_setting3(model, args.dp, _channel_from(args)), None


def _cmd_solve(args) -> int:
    model = _model_from(args)
    setting = Setting(args.setting)
    sol, rate = _solve_for(args, setting, model)
    _emit(_json(_solution_dict(setting, sol, rate, args.bits)), args)
    return 0


def _cmd_tradeoff(args) -> int:
    model = _model_from(args)
    setting = Setting(args.setting)
    channel = _channel_from(args) if setting is Setting.CHANNEL else None
    curve = sweep_privacy_distortion(model, setting, channel, args.grid)
    _emit(_csv("d_p,d_c,alpha,kappa", curve.points), args)
    return 0


def _cmd_rate(args) -> int:
    model = _model_from(args)
    if args.dp is None:
        raise CliError("missing required --dp")
    try:
        noise_grid = [float(v) for v in args.noise_grid.split(",") if v.strip()]
    except ValueError:
        raise CliError(f"bad --noise-grid value: {args.noise_grid!r}")
    curve = sweep_rate_distortion(model, args.dp, noise_grid)
    rows = [
        (n, rate / NATS_PER_BIT if args.bits else rate, d_c, d_p, alpha)
        for (n, rate, d_c, d_p, alpha) in curve.points
    ]
    _emit(_csv("sigma_n2,rate,d_c,d_p,alpha", rows), args)
    return 0


def _cmd_verify(args) -> int:
    model = _model_from(args)
    setting = Setting(args.setting)
    channel = _channel_from(args) if setting is Setting.CHANNEL else None
    if args.dp is None:
        raise CliError("missing required --dp")
    config = OracleConfig(grid=args.oracle_grid, refine_tol=args.refine_tol)
    report = verify_equilibrium(
        model, setting, channel, args.dp, config, sigma_n2=args.sigma_n2
    )
    payload = {
        "passed": report.passed,
        "dc_gap": report.dc_gap,
        "noise_at_optimum": report.noise_at_optimum,
        "oracle": {
            "alpha": report.oracle_optimum.alpha,
            "noise_var": report.oracle_optimum.noise_var,
            "d_c": report.oracle_optimum.d_c,
            "d_p": report.oracle_optimum.d_p,
        },
        "closed_form": _solution_dict(setting, report.closed_form),
    }
    _emit(_json(payload), args)
    return 0 if report.passed else 2


def _cmd_simulate(args) -> int:
    model = _model_from(args)
    setting = Setting(args.setting)
    channel = _channel_from(args) if setting is Setting.CHANNEL else None
    sol, rate = _solve_for(args, setting, model)
    config = SimConfig(samples=args.samples, seed=args.seed, setting=setting)
    result = simulate_policy(model, sol.policy, channel, sol.kappa, config)
    entropy = result.entropy_hat / NATS_PER_BIT if args.bits else result.entropy_hat
    payload = {
        "closed_form": _solution_dict(setting, sol, rate, args.bits),
        "d_c_hat": result.d_c_hat,
        "d_p_hat": result.d_p_hat,
        "d_p_hat_regression": result.d_p_hat_regression,
        "power_hat": result.power_hat,
        "entropy_hat": entropy,
        "entropy_units": "bits" if args.bits else "nats",
        "stderr_dc": result.stderr_dc,
        "stderr_dp": result.stderr_dp,
        "samples": result.samples,
        "seed": result.seed,
        "generator": result.generator,
    }
    _emit(_json(payload), args)
    return 0


def _cmd_scan(args) -> int:
    model = _model_from(args)
    if model.rho == 0.0:
        raise CliError("scan requires rho > 0")
    if args.lambdas:
        try:
            lams = [float(v) for v in args.lambdas.split(",") if v.strip()]
        except ValueError:
            raise CliError(f"bad --lambdas value: {args.lambdas!r}")
    else:
        lam_max = 1.0 / model.rho**2
        lams = [lam_max * i / (args.lambda_count - 1) for i in range(args.lambda_count)]
    points = lagrangian_scan(model, lams)
    rows = [(p.lam, p.alpha, p.noise_var, p.d_p, p.d_c) for p in points]
    _emit(_csv("lambda,alpha,noise_var,d_p,d_c", rows), args)
    return 0


_COMMANDS = {
    "solve": _cmd_solve,
    "tradeoff": _cmd_tradeoff,
    "rate": _cmd_rate,
    "verify": _cmd_verify,
    "simulate": _cmd_simulate,
    "scan": _cmd_scan,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        _apply_config_file(args)
        return _COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ModelError, SolveError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def console_entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console_entry()
