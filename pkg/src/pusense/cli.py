"""Command-line entry point: ``pusense {roc,threshold,models,validate,throughput}``.

Exit codes: 0 success, 1 validation mismatch, 2 configuration/usage error,
3 threshold convergence failure, 4 Monte Carlo estimation failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .errors import ConvergenceError, EstimationError, PuSenseError
from .experiments import COMMANDS, CsvTable, render, run_command

log = logging.getLogger("pusense")

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_ESTIMATION = 4

_DEFAULT_OUT = {
    "roc": "roc.csv",
    "threshold": "threshold.csv",
    "models": "models.csv",
    "validate": "validate.csv",
    "throughput": "throughput.csv",
}


def output_path(base: Path, table: CsvTable) -> Path:
    """``roc.csv`` with suffix ``N2`` becomes ``roc_N2.csv``."""
    if table.suffix is None:
        return base
    return base.with_name(f"{base.stem}_{table.suffix}{base.suffix or '.csv'}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pusense",
        description="Energy-detection sensing performance under multi-change PU traffic.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("roc", "ROC curves, one file per N"),
        ("threshold", "false-alarm rate at a fixed detection target over an SNR sweep"),
        ("models", "ROC per holding-time model at a common mean"),
        ("validate", "analytic vs Monte Carlo comparison"),
        ("throughput", "secondary throughput over a sensing-time grid"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, default=None, help="YAML experiment file")
        p.add_argument("--out", type=Path, default=None, help="output CSV path")
        p.add_argument("--seed", type=int, default=None, help="Monte Carlo seed (u64)")
        p.add_argument("--threads", type=int, default=1, help="worker threads for simulation")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        if args.threads < 1:
            raise ConfigError("--threads", "must be >= 1")
        if args.seed is not None and not 0 <= args.seed < 2 ** 64:
            raise ConfigError("--seed", "must be an unsigned 64-bit integer")
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg["validate"]["seed"] = args.seed
        base = args.out or Path(cfg["output"] or _DEFAULT_OUT[args.command])
        if args.out is not None:
            cfg["output"] = str(args.out)
        tables = run_command(args.command, cfg, threads=args.threads)
    except ConfigError as exc:
        print(f"pusense: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"pusense: convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except EstimationError as exc:
        print(f"pusense: estimation failure: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION
    except PuSenseError as exc:
        print(f"pusense: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    for table in tables:
        path = output_path(base, table)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="\n") as fh:
            fh.write(render(args.command, cfg, table))
        log.info("wrote %s (%d rows)", path, len(table.rows))
        print(path)

    if not all(t.ok for t in tables):
        if args.command == "threshold":
            return EXIT_CONVERGENCE
        print("pusense: validation mismatch; see pfa_ok/pd_ok columns", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
