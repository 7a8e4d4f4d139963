"""Command-line entry point: ``run``, ``sweep`` and ``selftest``."""

from __future__ import annotations

import argparse
import logging
import sys

import yaml

from .config import MODES, ConfigError, load_config
from .scenario import aggregate, emit_csv, run_mode, run_sweep


def _values(text: str) -> list:
    # each token is read as a YAML scalar, so "5" -> 5 and "30 dBm" stays a string
    return [yaml.safe_load(tok.strip()) for tok in text.split(",") if tok.strip()]


def _modes(text: str) -> list:
    modes = [m.strip() for m in text.split(",") if m.strip()]
    bad = [m for m in modes if m not in MODES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown mode(s): {', '.join(bad)}")
    return modes


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="uav-isac", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="one deployment on one drop")
    r.add_argument("--config", required=True)
    r.add_argument("--mode", required=True, choices=MODES)
    r.add_argument("--seed", required=True, type=_seed)
    r.add_argument("--out", help="CSV file for the result row (default: stdout)")

    s = sub.add_parser("sweep", help="Cartesian sweep over one config field")
    s.add_argument("--config", required=True)
    s.add_argument("--param", required=True, help="dotted config key, e.g. qos.gamma or area.length")
    s.add_argument("--values", required=True, type=_values, help="comma-separated values")
    s.add_argument("--modes", default=["fixed"], type=_modes, help="comma-separated deployment modes")
    s.add_argument("--seeds", type=int, help="number of seeds 0..n-1 (default: from the config)")
    s.add_argument("--out", required=True, help="CSV file for the per-cell rows")
    s.add_argument("--workers", type=int, default=1)

    sub.add_parser("selftest", help="run the built-in oracle checks")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "selftest":
        from .selftest import run_selftest
        return 0 if run_selftest() else 1
    try:
        config = load_config(args.config)
    except (OSError, ConfigError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    if args.command == "run":
        row = run_mode(config, args.mode, args.seed).row()
        emit_csv([row], args.out or sys.stdout)
        return 0 if row["feasible"] else 3
    seeds = range(args.seeds) if args.seeds else None
    try:
        result = run_sweep(config, args.param, args.values, args.modes, seeds, workers=args.workers)
    except (ConfigError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    emit_csv(result, args.out)
    for agg in aggregate(result.rows):
        print(f"{agg['param']}={agg['value']!s:>8} {agg['mode']:>8}  median {agg['median_gamma_t_access']:.6g}"
              f"  feasible {agg['n_feasible']}/{agg['n']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
