"""Command-line entry point: ``strcs sweep | dump-scenario | dump-trajectory``."""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

from .config import ConfigError, ExperimentConfig, parse_config, render_config
from .evaluation import realization_rng, run_sweep
from .fields import dump_scenario, random_scenario
from .measurement import SHAPES, make_trajectory, trajectory_csv

__all__ = ["main", "build_parser", "cmd_sweep", "cmd_dump_scenario"]

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2
# largest excluded fraction of realizations still reported as success
EXCLUSION_THRESHOLD = 0.01


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="strcs",
        description="Movable-antenna channel estimation by successive "
        "transmitter-receiver compressed sensing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="run a Monte-Carlo NMSE sweep and write CSV")
    sw.add_argument("-c", "--config", type=Path, help="key = value configuration file")
    sw.add_argument("-o", "--output", help="CSV output path (overrides the config)")
    sw.add_argument("--seed", type=int, help="master seed")
    sw.add_argument("--realizations", type=int, help="realizations per sweep point")
    sw.add_argument("--workers", type=int, help="worker processes")
    sw.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override any configuration key (repeatable)",
    )
    sw.add_argument("--print-config", action="store_true", help="echo the resolved config")

    ds = sub.add_parser("dump-scenario", help="print one random scenario as text")
    ds.add_argument("--seed", type=int, required=True)
    ds.add_argument(
        "--index", type=int, default=0, help="realization index within a sweep (default 0)"
    )
    ds.add_argument("--n-t", type=int, default=3)
    ds.add_argument("--n-r", type=int, default=3)
    ds.add_argument("--eta", type=float, default=1.0)
    ds.add_argument("-o", "--output", type=Path)

    dt = sub.add_parser("dump-trajectory", help="print a trajectory as CSV")
    dt.add_argument("--shape", choices=SHAPES, default="upa")
    dt.add_argument("--count", type=int, default=256)
    dt.add_argument("--side", type=float, default=4.0)
    dt.add_argument("-o", "--output", type=Path)
    return parser


def _emit(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def _resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    text = args.config.read_text() if args.config else ""
    overrides = list(args.set)
    for flag in ("output", "seed", "realizations", "workers"):
        value = getattr(args, flag)
        if value is not None:
            overrides.append(f"{flag} = {value}")
    # flags are appended after the file, so later assignments win
    lines = [text.rstrip("\n")] + [o.replace("=", " = ", 1) for o in overrides]
    return parse_config("\n".join(lines))


def cmd_sweep(cfg: ExperimentConfig, stderr=None) -> int:
    """Run the configured sweep, write its CSV and return an exit code."""
    stderr = stderr if stderr is not None else sys.stderr
    try:
        curve = run_sweep(cfg.sweep_config(), progress=stderr, workers=cfg.workers)
    except (RuntimeError, ValueError, ArithmeticError) as exc:
        print(f"strcs: sweep failed: {exc}", file=stderr)
        return EXIT_RUNTIME
    Path(cfg.output).write_text(curve.to_csv())
    total = cfg.realizations * len(curve.points)
    if curve.excluded > EXCLUSION_THRESHOLD * total:
        print(
            f"strcs: {curve.excluded}/{total} realizations excluded for rank "
            f"deficiency (threshold {EXCLUSION_THRESHOLD:.0%})",
            file=stderr,
        )
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_dump_scenario(seed: int, index: int = 0, n_t: int = 3, n_r: int = 3, eta: float = 1.0) -> str:
    """Scenario ``index`` of a sweep run with master ``seed``, as text."""
    return dump_scenario(random_scenario(n_t, n_r, eta, realization_rng(seed, index)))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "sweep":
        try:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", UserWarning)
                cfg = _resolve_config(args)
            for w in caught:
                print(f"strcs: warning: {w.message}", file=sys.stderr)
        except (ConfigError, OSError) as exc:
            print(f"strcs: config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        if args.print_config:
            sys.stderr.write(render_config(cfg))
        return cmd_sweep(cfg)
    if args.command == "dump-scenario":
        if args.seed < 0 or args.index < 0 or min(args.n_t, args.n_r) < 1 or not args.eta > 0:
            print("strcs: config error: invalid scenario parameters", file=sys.stderr)
            return EXIT_CONFIG
        _emit(cmd_dump_scenario(args.seed, args.index, args.n_t, args.n_r, args.eta), args.output)
        return EXIT_OK
    try:
        traj = make_trajectory(args.shape, args.count, args.side)
    except ValueError as exc:
        print(f"strcs: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _emit(trajectory_csv(traj), args.output)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
