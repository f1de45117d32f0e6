"""``dqdnoise`` command line.

Subcommands::

    dqdnoise figure fig2a --out results/
    dqdnoise sweep my_sweep.toml --out sweep.csv
    dqdnoise validate --level full

Exit codes: 0 success, 2 config parse or validation error, unknown preset, 3 numeric hard
failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import load_sweep_config
from .errors import DQDError, ParseError, SpecError, UnknownPreset
from .presets import render_panel, resolve
from .sweep import DEFAULT_SEED, MEASURE_COLUMNS, WORKERS_ENV, default_workers, run_sweep
from .validate import run_validation

EXIT_OK = 0
EXIT_SPEC = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help=f"RNG seed recorded in the output (default {DEFAULT_SEED})")
    common.add_argument("--workers", type=_positive_int, default=None,
                        help=f"worker processes (default ${WORKERS_ENV} or 1)")

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--out", default=None,
                        help="output file or directory (default: standard output for one table)")
    output.add_argument("--format", choices=("csv",), default="csv")
    output.add_argument("--mode", choices=("paper", "kraus"), default=None,
                        help="dephasing map: uniform gamma scaling (paper) or exact Kraus (kraus)")
    output.add_argument("--measure", action="append", choices=tuple(MEASURE_COLUMNS), default=None,
                        help="measure to evaluate; repeatable")

    parser = argparse.ArgumentParser(prog="dqdnoise", description="Entanglement and coherence "
                                     "sweeps for a two-qubit double-quantum-dot model under noise.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    fig = sub.add_parser("figure", parents=[common, output], help="run a figure preset")
    fig.add_argument("preset", help="fig1 .. fig12, or a single panel such as fig2a")

    sw = sub.add_parser("sweep", parents=[common, output], help="run a sweep from a TOML config")
    sw.add_argument("config", help="path to the TOML sweep config")

    val = sub.add_parser("validate", parents=[common], help="run the invariant suite")
    val.add_argument("--level", choices=("fast", "full"), default="fast")
    val.add_argument("--n-traj", type=_positive_int, default=100_000,
                     help="Monte Carlo trajectories for --level full")
    val.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return parser


def _write(result, out: str | None, default_name: str) -> None:
    if out is None:
        result.write_csv(sys.stdout)
        return
    path = Path(out)
    if path.is_dir() or out.endswith(os.sep):
        path = path / default_name
    result.save(path)


def cmd_figure(args) -> int:
    panels = resolve(args.preset)
    workers = args.workers if args.workers is not None else default_workers()
    single_file = args.out is not None and args.out.endswith(".csv") and len(panels) == 1
    if args.out is None and len(panels) > 1:
        out_dir = Path(".")
    elif args.out is not None and not single_file:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
    else:
        out_dir = None
    for panel in panels:
        res = render_panel(panel, mode=args.mode or "paper", measures=args.measure,
                           workers=workers, seed=DEFAULT_SEED if args.seed is None else args.seed)
        if single_file:
            res.save(args.out)
        elif out_dir is None:
            res.write_csv(sys.stdout)
        else:
            target = out_dir / f"{panel.id}.csv"
            res.save(target)
            print(f"wrote {target}", file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = load_sweep_config(args.config)
    changes = {"seed": args.seed} if args.seed is not None else {}
    if args.mode:
        changes["mode"] = args.mode
    if args.measure:
        changes["measures"] = tuple(args.measure)
    if changes:
        spec = replace(spec, **changes)
    workers = args.workers if args.workers is not None else default_workers()
    res = run_sweep(spec, workers)
    _write(res, args.out, Path(args.config).with_suffix(".csv").name)
    return EXIT_OK


def cmd_validate(args) -> int:
    seed = DEFAULT_SEED if args.seed is None else args.seed
    report = run_validation(args.level, seed=seed, n_traj=args.n_traj,
                            inject_broken_kraus=args.inject_fault)
    return report.exit_code


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"figure": cmd_figure, "sweep": cmd_sweep, "validate": cmd_validate}
    try:
        return handlers[args.command](args)
    except (ParseError, SpecError, UnknownPreset) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except OSError as exc:
        print(f"error: I/O: {exc}", file=sys.stderr)
        return EXIT_IO
    except DQDError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
