"""``simulate`` command: run the cost sweeps and write sweep.csv + summary.txt."""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from .config import load_config
from .errors import CalibrationError, ConfigurationError
from .experiments import PAPER_SCALE, SCENARIOS, emit_report, run_scenarios

log = logging.getLogger("vodtier")


def _seeds(text):
    try:
        seeds = tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"seeds must be comma-separated integers: {text!r}")
    if not seeds:
        raise argparse.ArgumentTypeError("at least one seed is required")
    return seeds


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="simulate",
        description="Compare storage/transcoding policies for synthetic VOD repositories.")
    p.add_argument("--config", help="INI file; see configs/default.ini for every key")
    p.add_argument("--scenario", choices=SCENARIOS + ("all",), default="all")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--paper-scale", action="store_true",
                   help=f"use {PAPER_SCALE:,} videos per repository")
    p.add_argument("--seeds", type=_seeds, help="e.g. 1,2,3 (overrides the config)")
    p.add_argument("--workers", type=int, help="processes for scenario points")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
        if args.paper_scale:
            cfg = cfg.paper_scale()
        if args.seeds:
            cfg = replace(cfg, seeds=args.seeds)
        if args.workers:
            cfg = replace(cfg, workers=args.workers)
        scenarios = SCENARIOS if args.scenario == "all" else (args.scenario,)
        result = run_scenarios(cfg, scenarios)
        csv_path, summary_path = emit_report(result.rows, args.out, result)
    except (CalibrationError, ConfigurationError, KeyError, ValueError) as exc:
        print(f"simulate: configuration/calibration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"simulate: I/O error: {exc}", file=sys.stderr)
        return 3
    log.info("wrote %s and %s", csv_path, summary_path)
    if result.skipped:
        for sc, a, got, want in result.skipped:
            print(f"simulate: calibration failed for {sc} shape {a:g}: "
                  f"FAV {got:.4f}, target {want:.4f}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
