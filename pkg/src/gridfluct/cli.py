"""Command-line interface.

Subcommands: solve, variance, compare, sweep, simulate.  Exit codes:
0 on success, 2 when an input or method assumption is violated, 1 on
internal errors.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys

from .errors import (
    AssumptionViolatedError,
    DisconnectedGraphError,
    GridfluctError,
    InvalidGraphError,
    ValidationError,
)
from .montecarlo import default_sim_config
from .netfile import format_number, load_network, load_sweep, validate_mc_overrides
from .pipeline import (
    compare_variance,
    linearized,
    run_sweep,
    run_variance,
    write_comparison,
    write_report,
    write_sweep,
)
from .swing import security_check, solve_synchronous_state

USER_ERRORS = (AssumptionViolatedError, ValidationError, DisconnectedGraphError, InvalidGraphError)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridfluct",
        description="Stationary fluctuation covariance of stochastically disturbed power networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="synchronous state and per-line security margins")
    solve.add_argument("network")
    solve.add_argument("--format", choices=("human", "csv", "json"), default="human")

    variance = sub.add_parser("variance", help="stationary covariance by one method")
    variance.add_argument("network")
    variance.add_argument(
        "--method", required=True, choices=("numeric", "uniform", "closed", "first-order", "mc")
    )
    variance.add_argument("--format", choices=("csv", "json"), default="csv")
    variance.add_argument("--out", help="output file (default stdout)")
    variance.add_argument("--seed", type=int, default=0, help="Monte Carlo master seed")
    variance.add_argument("--mc-config", help="JSON file with Monte Carlo overrides")

    compare = sub.add_parser("compare", help="all applicable exact methods plus discrepancy")
    compare.add_argument("network")
    compare.add_argument("--methods", help="comma-separated subset of numeric,uniform,closed")
    compare.add_argument("--format", choices=("csv", "json"), default="csv")
    compare.add_argument("--out")

    sweep = sub.add_parser("sweep", help="evaluate a parameter sweep to CSV")
    sweep.add_argument("--spec", required=True)
    sweep.add_argument("--out")
    sweep.add_argument("--seed", type=int, default=None, help="Monte Carlo master seed override")

    simulate = sub.add_parser("simulate", help="Monte Carlo covariance estimate")
    simulate.add_argument("network")
    simulate.add_argument("--mc-config", help="JSON file with Monte Carlo overrides")
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--format", choices=("csv", "json"), default="csv")
    simulate.add_argument("--out")

    return parser


@contextlib.contextmanager
def _output(path: str | None):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _mc_config(args, net):
    overrides = {}
    if getattr(args, "mc_config", None):
        try:
            with open(args.mc_config) as fh:
                overrides = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"{args.mc_config}: {exc}") from exc
        overrides = validate_mc_overrides(overrides, str(args.mc_config))
    overrides.setdefault("master_seed", args.seed)
    return default_sim_config(linearized(net), **overrides)


def _cmd_solve(args) -> int:
    net = load_network(args.network)
    state = solve_synchronous_state(net)
    report = security_check(state, net)
    if args.format == "human":
        print(f"synchronous frequency: {format_number(state.sync_frequency)} rad/s")
        print(f"flow residual (sup-norm): {format_number(state.residual_norm)}")
        print(f"secure: {'yes' if report.secure else 'no'}")
        for k, ((i, j, _), margin) in enumerate(zip(net.topology.edges, report.margins), start=1):
            print(
                f"line {k} ({net.labels[i - 1]} -> {net.labels[j - 1]}): "
                f"margin {format_number(margin)} rad"
            )
    elif args.format == "json":
        payload = {
            "sync_frequency": state.sync_frequency,
            "angles": state.angles.tolist(),
            "residual_norm": state.residual_norm,
            "secure": report.secure,
            "margins": report.margins.tolist(),
        }
        json.dump(payload, sys.stdout, indent=2, sort_keys=True)
        print()
    else:
        print("line,from,to,margin")
        for k, ((i, j, _), margin) in enumerate(zip(net.topology.edges, report.margins), start=1):
            print(f"{k},{net.labels[i - 1]},{net.labels[j - 1]},{format_number(margin)}")
    return 0


def _cmd_variance(args) -> int:
    net = load_network(args.network)
    mc_config = _mc_config(args, net) if args.method == "mc" else None
    report = run_variance(net, args.method, mc_config=mc_config)
    with _output(args.out) as fh:
        write_report(report, fh, args.format)
    return 0


def _cmd_compare(args) -> int:
    net = load_network(args.network)
    methods = args.methods.split(",") if args.methods else None
    comparison = compare_variance(net, methods)
    with _output(args.out) as fh:
        write_comparison(comparison, fh, args.format)
    return 0


def _cmd_sweep(args) -> int:
    spec = load_sweep(args.spec)
    rows = run_sweep(spec, seed=args.seed)
    with _output(args.out) as fh:
        write_sweep(rows, spec, fh)
    return 0


def _cmd_simulate(args) -> int:
    net = load_network(args.network)
    report = run_variance(net, "mc", mc_config=_mc_config(args, net))
    with _output(args.out) as fh:
        write_report(report, fh, args.format)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    handlers = {
        "solve": _cmd_solve,
        "variance": _cmd_variance,
        "compare": _cmd_compare,
        "sweep": _cmd_sweep,
        "simulate": _cmd_simulate,
    }
    try:
        return handlers[args.command](args)
    except USER_ERRORS as exc:
        print(f"gridfluct: {exc}", file=sys.stderr)
        return 2
    except GridfluctError as exc:
        print(f"gridfluct: internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
