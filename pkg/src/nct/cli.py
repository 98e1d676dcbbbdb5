"""``nct`` command line: one subcommand per experiment, configured by a JSON file.

stdout carries JSON records, one per line; ``--out`` receives the CSV table.
Exit status 0 on success, 1 when a check or tolerance fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys

from threadpoolctl import threadpool_limits

from .experiments import COMMANDS, ConfigError, ExperimentConfig, run

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nct", description="Quantum torus quantised-calculus experiments.")
    sub = ap.add_subparsers(dest="command", required=True)
    helps = {
        "verify": "algebraic and operator identities with residuals",
        "sv-decay": "singular values of the quantised differential and decay fits",
        "trace-formula": "Dixmier-type left side against the sphere integral",
        "calibrate": "Weyl-count calibration of the Laplacian resolvent",
        "defect": "smoothed-sign defect and the principal-part comparison",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--out", help="CSV output path (default: config 'output', else none)")
        p.add_argument("--threads", type=int, default=None, help="BLAS/LAPACK thread limit")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads is not None and args.threads < 1:
        print("nct: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = ExperimentConfig.load(args.config, args.command)
    except ConfigError as exc:
        print(f"nct: {exc}", file=sys.stderr)
        return EXIT_USAGE
    with threadpool_limits(limits=args.threads):
        report = run(cfg)
    sys.stdout.write(report.jsonl())
    out = args.out or cfg.output
    if out:
        report.write_csv(out)
    return EXIT_OK if report.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
