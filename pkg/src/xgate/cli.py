"""Command-line interface.

Every subcommand writes CSV (header first, ``.12g`` numbers, ``\\n`` line
endings). ``reproduce`` also writes a JSON manifest listing every parameter.
Exit status is 0 only when all outputs were written and every requested
convergence check passed; invalid configs exit with status 2 and write
nothing.
"""
import argparse
import json
import os
from pathlib import Path
import sys

from .config import ConfigError, TASKS, load_config
from .propagate import ConvergenceError
from . import tasks

UNITS_HELP = """\
units: every frequency in a config (B, dB, J0, J1, omega) is angular, in
rad/us (= rad*MHz; e.g. dB = -100 means -100 rad/us); times are in us and
hbar = 1. Basis order |uu>, |ud>, |du>, |dd>.
environment: XGATE_THREADS caps the worker threads of noise sweeps."""

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2

_RUNNERS = {
    "evolve": tasks.run_evolve,
    "fidelity-trace": tasks.run_fidelity_trace,
    "solve-gates": tasks.run_solve_gates,
    "noise-sweep": tasks.run_noise_sweep,
}


def worker_count():
    """Threads for independent sweep cells: the CPU count, capped by ``XGATE_THREADS``."""
    count = os.cpu_count() or 1
    raw = os.environ.get("XGATE_THREADS")
    if raw is None:
        return count
    try:
        return max(1, min(count, int(raw)))
    except ValueError:
        return count


def _fmt(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    return format(float(value), ".12g")


def format_csv(table):
    lines = [",".join(table.header)]
    lines += [",".join(_fmt(v) for v in row) for row in table.rows]
    return "\n".join(lines) + "\n"


def write_csv(table, path):
    Path(path).write_text(format_csv(table), newline="\n")


def _json_default(obj):
    if hasattr(obj, "item"):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def build_parser():
    parser = argparse.ArgumentParser(prog="xgate", description=__doc__.splitlines()[0], epilog=UNITS_HELP,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, metavar="PATH", help="INI run configuration")
        p.add_argument("--out", required=True, metavar="PATH",
                       help="output CSV (for reproduce: output directory)")
        p.add_argument("--steps", type=int, metavar="N", help="propagator steps (default: from phase bound)")
        p.add_argument("--quad-order", type=int, metavar="N", help="Gauss-Hermite order (odd)")
        p.add_argument("--check-convergence", action="store_true",
                       help="repeat with doubled steps / quadrature order and fail if results move")

    for task in TASKS:
        common(sub.add_parser(task, help=f"{task} from a config file"))
    rep = sub.add_parser("reproduce", help="regenerate the data of a reference figure")
    rep.add_argument("figure", choices=("fig2", "fig3", "fig4"))
    common(rep, needs_config=False)
    rep.add_argument("--points", type=int, metavar="N", help="time-grid points for trace figures")
    return parser


def _report(issues):
    for msg in issues:
        print(f"xgate: convergence check failed: {msg}", file=sys.stderr)
    return EXIT_CHECK_FAILED if issues else EXIT_OK


def run_task(args):
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"xgate: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        config = load_config(text, args.command, steps=args.steps, quad_order=args.quad_order,
                             check_convergence=args.check_convergence)
    except ConfigError as exc:
        print(f"xgate: invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    runner = _RUNNERS[args.command]
    try:
        if args.command == "noise-sweep":
            table = runner(config, workers=worker_count())
        else:
            table = runner(config)
    except ConvergenceError as exc:
        print(f"xgate: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    write_csv(table, args.out)
    return _report(table.issues)


def run_reproduce(args):
    if args.steps is not None and args.steps < 1:
        print("xgate: --steps must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    if args.quad_order is not None and (args.quad_order < 1 or args.quad_order % 2 == 0):
        print("xgate: --quad-order must be a positive odd integer", file=sys.stderr)
        return EXIT_CONFIG
    if args.points is not None and args.points < 2:
        print("xgate: --points must be >= 2", file=sys.stderr)
        return EXIT_CONFIG
    try:
        tables, manifest = tasks.reproduce(args.figure, steps=args.steps, workers=worker_count(),
                                           points=args.points, quad_order=args.quad_order,
                                           check_convergence=args.check_convergence)
    except ConvergenceError as exc:
        print(f"xgate: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    issues = []
    files = []
    for stem, table in tables.items():
        path = out / f"{stem}.csv"
        write_csv(table, path)
        files.append(path.name)
        issues += table.issues
    manifest["files"] = files
    (out / f"{args.figure}_manifest.json").write_text(
        json.dumps(manifest, indent=2, default=_json_default) + "\n", newline="\n")
    return _report(issues)


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "reproduce":
        return run_reproduce(args)
    return run_task(args)


if __name__ == "__main__":
    sys.exit(main())
