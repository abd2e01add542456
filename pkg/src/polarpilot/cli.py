"""Command-line entry point: ``polarpilot <command> ...``.

Exit codes: 0 on success, 2 on invalid input or a failed validation.
"""

from __future__ import annotations

import argparse
import json
import sys

from .construction import construct_info_set, validate_code_spec
from .pilots import select_pilots, throughput, validate_plan
from .simulation import ConfigError, load_config, run_fer, run_mse, with_overrides, write_csv, write_plot_data

EXIT_INVALID = 2


def _log2_size(value: str) -> int:
    """Accept either ``log2 N`` (up to 16) or the block length ``N`` itself."""
    v = int(value)
    if 1 <= v <= 16:
        return v
    if v > 16 and v & (v - 1) == 0:
        return v.bit_length() - 1
    raise argparse.ArgumentTypeError(f"{value} is neither log2(N) <= 16 nor a power of two")


def _code_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=_log2_size, default=8, help="log2 of the block length, or the block length")
    p.add_argument("--k", type=int, default=128, help="information set size")
    p.add_argument("--design-ebno", type=float, default=3.0)
    p.add_argument("--method", default="ga", help="ga, bec or external")
    p.add_argument("--order-file", default=None, help="reliability order for --method external")


def _pilot_args(p: argparse.ArgumentParser) -> None:
    _code_args(p)
    p.add_argument("--scheme", default="eps", help="eps, ueps or traditional")
    p.add_argument("--pilots", type=int, default=64)
    p.add_argument("--info-pilots", type=int, default=None, help="UEPS only: fix |P_i|")


def _sim_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="flat key=value experiment file")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p.add_argument("--emit-plot-data", default=None, metavar="PATH",
                   help="also write x/y pairs per curve")
    p.add_argument("--fd-hz", type=float, nargs="+")
    p.add_argument("--ebno-db", type=float, nargs="+")
    p.add_argument("--symbol-rate", type=float)
    p.add_argument("--estimator", choices=["ls", "mmse", "perfect"])


def _spec(args):
    return construct_info_set(args.n, args.k, args.design_ebno, args.method,
                              order_path=args.order_file)


def _plan(args, spec):
    kwargs = {}
    if args.info_pilots is not None:
        kwargs["num_info_pilots"] = args.info_pilots
    return select_pilots(spec, args.scheme, args.pilots, **kwargs)


def cmd_construct(args) -> int:
    spec = _spec(args)
    print(json.dumps(spec.info_set.tolist()))
    return 0


def cmd_plan_pilots(args) -> int:
    spec = _spec(args)
    plan = _plan(args, spec)
    report = throughput(plan, spec)
    print(json.dumps({
        "scheme": plan.scheme.value,
        "P_f": plan.frozen_pilots.tolist(),
        "P_i": plan.info_pilots.tolist(),
        "throughput": vars(report),
    }, indent=2))
    return 0


def cmd_verify(args) -> int:
    spec = _spec(args)
    plan = _plan(args, spec)
    checks = dict(validate_code_spec(spec).checks)
    if plan.positions.size:
        checks.update({f"plan.{k}": v for k, v in validate_plan(spec, plan).checks.items()})
    for name, ok in checks.items():
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    return 0 if all(checks.values()) else EXIT_INVALID


def _simulate(args, runner) -> int:
    config = with_overrides(load_config(args.config), seed=args.seed, workers=args.workers,
                            fd_hz=args.fd_hz, ebno_db=args.ebno_db,
                            symbol_rate=args.symbol_rate, estimator=args.estimator)
    rows = runner(config)
    write_csv(rows, args.out or sys.stdout)
    if args.emit_plot_data:
        metric = "fer" if runner is run_fer else "mse_full"
        write_plot_data(rows, args.emit_plot_data, metric)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polarpilot", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="print the information set as JSON")
    _code_args(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("plan-pilots", help="print pilot sets and throughput as JSON")
    _pilot_args(p)
    p.set_defaults(func=cmd_plan_pilots)

    p = sub.add_parser("verify", help="check the code and pilot plan structure")
    _pilot_args(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate-fer", help="FER/BER sweep to CSV")
    _sim_args(p)
    p.set_defaults(func=lambda a: _simulate(a, run_fer))

    p = sub.add_parser("simulate-mse", help="channel estimation MSE sweep to CSV")
    _sim_args(p)
    p.set_defaults(func=lambda a: _simulate(a, run_mse))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
