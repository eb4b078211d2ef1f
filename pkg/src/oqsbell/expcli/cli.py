"""Command-line entry point: ``oqsbell {steady,trajectory,attack,emit}``.

Exit status is 0 when every row succeeded, 2 when any row was flagged
failed and 1 on configuration or I/O errors.
"""

import argparse
import json
import logging
import sys

from ..errors import ConfigError
from .config import _parse_formats, load_spec
from .emit import emit
from .runner import THREADS_ENV, SweepResult, run

EXIT_OK, EXIT_ERROR, EXIT_ROW_FAILED = 0, 1, 2


def _parser():
    parser = argparse.ArgumentParser(prog="oqsbell", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, blurb in (("steady", "steady-state phase diagram"),
                        ("trajectory", "time evolution from an initial state"),
                        ("attack", "repeated-measurement attack on a steady state")):
        p = sub.add_parser(name, help=blurb)
        p.add_argument("--config", required=True, help="YAML sweep description")
        p.add_argument("--out", default=".", help="output directory (default: .)")
        p.add_argument("--threads", type=int, default=None,
                       help=f"worker threads (overridden by ${THREADS_ENV})")
        p.add_argument("--format", default=None, help="comma-separated subset of csv,json,svg")
    p = sub.add_parser("emit", help="re-emit a saved JSON result in other formats")
    p.add_argument("--input", required=True, help="result JSON written by a previous run")
    p.add_argument("--out", default=".", help="output directory (default: .)")
    p.add_argument("--format", default="csv,svg", help="comma-separated subset of csv,json,svg")
    return parser


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "emit":
            with open(args.input, encoding="utf-8") as fh:
                result = SweepResult.from_dict(json.load(fh))
            formats = _parse_formats(args.format)
        else:
            spec = load_spec(args.config, experiment=args.command)
            formats = _parse_formats(args.format) if args.format else spec.formats
            result = run(spec, threads=args.threads)
        for path in emit(result, args.out, formats):
            print(path)
    except (ConfigError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"oqsbell: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if not result.all_ok:
        failed = sum(str(r["status"]).startswith("failed") for r in result.rows)
        print(f"oqsbell: {failed} of {len(result.rows)} rows failed", file=sys.stderr)
        return EXIT_ROW_FAILED
    return EXIT_OK
