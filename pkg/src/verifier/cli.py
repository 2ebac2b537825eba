"""
Command-line entry point.

    python -m src.verifier.cli check --epsilon 0.1 --schedule paper
    python -m src.verifier.cli sample --what potential-bound --k 8 --theta 0
    python -m src.verifier.cli kelvin-check --dimension 3
    python -m src.verifier.cli infinity

Payloads (JSON or CSV) go to stdout or --out; status lines go to stderr.
Exit codes: 0 all checks pass, 1 some check failed, 2 bad invocation.
"""

from __future__ import annotations

import argparse
import asyncio
import io
import json
import math
import sys
from typing import Optional

import pandas as pd

from src.verifier.config import load_config, resolve_path, section
from src.verifier.dirac import FDStencil, dirac_residual
from src.verifier.errors import ConfigurationError, NumericalError, RangeError, StencilError, UsageError
from src.verifier.radii import band_constants, log_rho
from src.verifier.spinor_fields import BANDS_PER_ANNULUS, PolarPoint, Region, build_counterexample, eval_u_in
from src.verifier.tools.report_manager import ReportManager
from src.verifier.tools.run_metrics import RunMetrics
from src.verifier.verify import (
    CheckReport,
    SampleGrid,
    all_pass,
    opnorm_times_r,
    region_t,
    run_all,
    run_infinity,
    run_kelvin,
)

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2
REPORT_FIELDS = ["name", "region", "points", "worst_margin_logmag", "pass"]
SAMPLE_COLUMNS = {"u": "logmag_u", "potential-bound": "opnorm_times_r", "residual": "residual"}
CSV_HEADER_COMMENT = "# radial column is t = log r"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class Console:
    """Emoji status lines on stderr."""

    def __init__(self, quiet: bool = False):
        self.quiet = quiet

    def __call__(self, line: str) -> None:
        if not self.quiet:
            print(line, file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="verifier", description="Numerical checks of the glued 2-D Dirac counterexample.")
    common = _Parser(add_help=False)
    common.add_argument("--epsilon", type=float, default=None)
    common.add_argument("--delta", type=float, default=None)
    common.add_argument("--schedule", choices=["paper", "mild"], default=None)
    common.add_argument("--k-max", type=int, default=None)
    common.add_argument("--k0", type=int, default=None)
    common.add_argument("--radial-samples", type=int, default=None)
    common.add_argument("--theta-samples", type=int, default=None)
    common.add_argument("--fd-step", type=float, default=None)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--out", default=None)
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--config", default=None, help="configuration file (default config/verification_config.json)")
    common.add_argument("--quiet", action="store_true")
    common.add_argument("--no-history", action="store_true")

    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("build", parents=[common], help="print delta, k0 and the schedule summary")
    sub.add_parser("check", parents=[common], help="run every check")
    sample = sub.add_parser("sample", parents=[common], help="CSV profile along t at fixed theta")
    sample.add_argument("--what", choices=sorted(SAMPLE_COLUMNS), default="u")
    sample.add_argument("--k", type=int, default=None)
    sample.add_argument("--theta", type=float, default=0.0)
    kelvin = sub.add_parser("kelvin-check", parents=[common], help="Kelvin transform checks on synthetic fields")
    kelvin.add_argument("--dimension", type=int, choices=[2, 3], default=2)
    sub.add_parser("infinity", parents=[common], help="checks of the example vanishing at infinity")
    return parser


def resolve_args(args: argparse.Namespace) -> dict:
    """Merge flags over the configuration file and validate them."""
    config = load_config(args.config) if args.config else load_config()
    grid_cfg = section(config, "grid")
    fd_cfg = section(config, "finite_differences")

    epsilon = config.get("epsilon", 0.1) if args.epsilon is None else args.epsilon
    if not (math.isfinite(epsilon) and epsilon > 0.0):
        raise UsageError(f"--epsilon must be positive, got {epsilon!r}")
    if args.delta is not None:
        d = args.delta
        if not (0.0 < d < 0.25) or d * d + d > epsilon:
            raise UsageError(f"--delta {d!r} must satisfy 0 < delta < 1/4 and delta^2 + delta <= epsilon ({epsilon!r})")
    if args.fd_step is not None and not (math.isfinite(args.fd_step) and args.fd_step > 0.0):
        raise UsageError(f"--fd-step must be positive, got {args.fd_step!r}")
    tol = config.get("tol", 1e-6) if args.tol is None else args.tol
    if not tol > 0.0:
        raise UsageError(f"--tol must be positive, got {tol!r}")

    return {
        "epsilon": epsilon,
        "delta": args.delta,
        "schedule": args.schedule or config.get("schedule", "paper"),
        "k_max": config.get("k_max") if args.k_max is None else args.k_max,
        "k0": args.k0,
        "radial": grid_cfg["radial_samples"] if args.radial_samples is None else args.radial_samples,
        "angular": grid_cfg["theta_samples"] if args.theta_samples is None else args.theta_samples,
        "margin": grid_cfg["interior_margin"],
        "fd_step": fd_cfg["step"] if args.fd_step is None else args.fd_step,
        "fd_order": fd_cfg["order"],
        "tol": tol,
        "history": section(config, "history"),
        "performance": section(config, "performance"),
    }


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def render_reports(reports: list[CheckReport], parameters: dict, fmt: str) -> str:
    checks = [r.to_dict() for r in reports]
    if fmt == "csv":
        buf = io.StringIO()
        pd.DataFrame(checks, columns=REPORT_FIELDS).to_csv(buf, index=False)
        return buf.getvalue()
    payload = {"parameters": parameters, "checks": checks, "all_pass": all_pass(reports)}
    return json.dumps(payload, indent=2, default=str) + "\n"


def _print_summary(console: Console, title: str, reports: list[CheckReport]) -> None:
    console("\n" + "=" * 60)
    console(f"📊 {title}")
    console("=" * 60)
    for r in reports:
        mark = "✅" if r.passed else "❌"
        console(f"{mark} {r.name:<26} {r.points:>8} pts  worst margin {r.to_dict()['worst_margin_logmag']}")
    console("=" * 60)


def _record(settings: dict, command: str, parameters: dict, reports: list[CheckReport], enabled: bool) -> None:
    hist = settings["history"]
    if not (enabled and hist.get("enabled", True)):
        return
    manager = ReportManager(resolve_path(hist["history_file"]), hist.get("max_entries", 100))
    asyncio.run(manager.record_run(command, parameters, [r.to_dict() for r in reports], all_pass(reports)))


def _metrics(settings: dict) -> RunMetrics:
    perf = settings["performance"]
    return RunMetrics(resolve_path(perf["metrics_file"]), perf.get("metrics_enabled", True))


def _build(settings: dict):
    return build_counterexample(
        settings["epsilon"], settings["delta"], settings["schedule"], settings["k_max"], settings["k0"]
    )


def _stencil(settings: dict) -> FDStencil:
    return FDStencil(settings["fd_step"], settings["fd_order"])


def _grid(settings: dict) -> SampleGrid:
    return SampleGrid(settings["radial"], settings["angular"], settings["margin"])


def cmd_build(args, settings, console) -> int:
    cfg = _build(settings)
    s = cfg.schedule
    annuli = []
    for k in range(cfg.k0, s.k_max):
        bc = band_constants(s, k)
        annuli.append({
            "k": k,
            "log_rho": [log_rho(s, k, j) for j in range(BANDS_PER_ANNULUS)],
            "c_k": bc.c_k,
            "c_tilde_k": bc.c_tilde_k,
        })
    if not cfg.k0_admissible:
        console(f"⚠️  k0={cfg.k0} does not satisfy every band condition on the {s.preset} schedule")
    console(f"✅ delta={cfg.delta:.7g}  k0={cfg.k0}  schedule={s.preset}  k_max={s.k_max}")
    _emit(json.dumps({"parameters": cfg.parameters(), "annuli": annuli}, indent=2) + "\n", args.out)
    return EXIT_OK


def _finish(args, settings, console, command, title, parameters, reports, metrics=None) -> int:
    _print_summary(console, title, reports)
    if metrics is not None:
        if not console.quiet:
            metrics.print_summary()
        asyncio.run(metrics.save_metrics(parameters))
    _emit(render_reports(reports, parameters, args.format), args.out)
    _record(settings, command, parameters, reports, not args.no_history)
    return EXIT_OK if all_pass(reports) else EXIT_FAILED


def cmd_check(args, settings, console) -> int:
    cfg = _build(settings)
    console(f"🧪 Running checks: epsilon={cfg.epsilon} delta={cfg.delta:.7g} k0={cfg.k0} ({cfg.preset})")
    metrics = _metrics(settings)
    reports = run_all(cfg, _grid(settings), _stencil(settings), settings["tol"], metrics)
    return _finish(args, settings, console, "check", "VERIFICATION SUMMARY", cfg.parameters(), reports, metrics)


def cmd_infinity(args, settings, console) -> int:
    cfg = _build(settings)
    console(f"🧪 Running checks of the example vanishing at infinity (k0={cfg.k0})")
    metrics = _metrics(settings)
    reports = run_infinity(cfg, _grid(settings), _stencil(settings), settings["tol"], metrics)
    return _finish(args, settings, console, "infinity", "INFINITY SUMMARY", cfg.parameters(), reports, metrics)


def cmd_kelvin(args, settings, console) -> int:
    console(f"🧪 Running Kelvin transform checks in dimension {args.dimension}")
    st = FDStencil(args.fd_step, 4) if args.fd_step is not None else None
    tol = args.tol if args.tol is not None else 1e-5
    reports = run_kelvin(args.dimension, st, tol)
    parameters = {"dimension": args.dimension, "tol": tol}
    return _finish(args, settings, console, "kelvin-check", "KELVIN SUMMARY", parameters, reports)


def sample_rows(cfg, what: str, k: int, theta: float, grid: SampleGrid, st: FDStencil) -> list[dict]:
    """One row per grid point of annulus k at angle theta, ordered by decreasing t."""
    column = SAMPLE_COLUMNS[what]
    rows = []
    for j in range(BANDS_PER_ANNULUS):
        region = Region.band(k, j)
        for u in grid.fractions(interior=what == "residual"):
            p = PolarPoint(region_t(cfg, region, u), theta)
            if what == "u":
                norm = eval_u_in(cfg, region, p).norm()
                value = -math.inf if norm.is_zero else norm.logmag
            elif what == "potential-bound":
                value = opnorm_times_r(cfg, region, p)
            else:
                value = dirac_residual(cfg, p, st, region)
            rows.append({"t": p.t, "theta": p.theta, column: value})
    return rows


def cmd_sample(args, settings, console) -> int:
    cfg = _build(settings)
    k = cfg.k0 if args.k is None else args.k
    if not cfg.k0 <= k <= cfg.schedule.k_max - 1:
        raise UsageError(f"--k must lie in [{cfg.k0}, {cfg.schedule.k_max - 1}], got {k}")
    if not math.isfinite(args.theta):
        raise UsageError("--theta must be finite")
    console(f"📝 Sampling {args.what} on annulus {k} at theta={args.theta}")
    rows = sample_rows(cfg, args.what, k, args.theta, _grid(settings), _stencil(settings))
    buf = io.StringIO()
    buf.write(CSV_HEADER_COMMENT + "\n")
    pd.DataFrame(rows, columns=["t", "theta", SAMPLE_COLUMNS[args.what]]).to_csv(buf, index=False)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


COMMANDS = {
    "build": cmd_build,
    "check": cmd_check,
    "sample": cmd_sample,
    "kelvin-check": cmd_kelvin,
    "infinity": cmd_infinity,
}


def main(argv: Optional[list[str]] = None) -> int:
    console = Console("--quiet" in (sys.argv[1:] if argv is None else argv))
    try:
        args = build_parser().parse_args(argv)
        console = Console(args.quiet)
        settings = resolve_args(args)
        return COMMANDS[args.command](args, settings, console)
    except (UsageError, ConfigurationError) as e:
        console(f"❌ {e}")
        return EXIT_USAGE
    except (RangeError, StencilError, NumericalError) as e:
        console(f"❌ {type(e).__name__}: {e}")
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
