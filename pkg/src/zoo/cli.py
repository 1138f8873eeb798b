"""Command-line front end: ``zoo run``, ``zoo run-all`` and ``zoo list``.

Exit codes: 0 when the classification matches the manifest, 1 on a
mismatch, 2 on parameter or configuration errors, 3 on resource or
convergence failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from .errors import ParamError, ZooError
from .report import entry_claims, load_manifest, run_all, run_entry


def _parse_param(text: str):
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise ParamError(f"--param expects key=value, got {text!r}")
    return key.strip(), value.strip()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zoo", description="Measure and classify near-identities.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one entry")
    run.add_argument("entry_id")
    run.add_argument("--digits", type=int, default=None, help="output digits (default 60)")
    run.add_argument("--terms", type=int, default=None, help="series or product length, where the entry has one")
    run.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                     help="entry parameter; repeatable")
    run.add_argument("--json", dest="json_path", default=None, help="write the report to this file")

    run_all_p = sub.add_parser("run-all", help="run every entry in the manifest")
    run_all_p.add_argument("--config", default=None, help="JSON config with digits, entries and skip keys")
    run_all_p.add_argument("--json", dest="json_path", default=None, help="write all reports to this file")

    sub.add_parser("list", help="list entry ids and their claims")
    return parser


def _cmd_run(args) -> int:
    params = dict(_parse_param(p) for p in args.param)
    if args.terms is not None:
        params["terms"] = args.terms
    if args.digits is not None and args.digits < 6:
        raise ParamError("--digits must be at least 6")
    report = run_entry(args.entry_id, params, digits=args.digits)
    text = report.to_json()
    print(text)
    if args.json_path:
        Path(args.json_path).write_text(text + "\n")
    expected = load_manifest()["entries"].get(args.entry_id, {}).get("expected")
    return 0 if report.classification == expected else 1


def _cmd_run_all(args) -> int:
    summary = run_all(args.config, args.json_path)
    return summary.exit_code


def _cmd_list(args) -> int:
    for eid, claim in entry_claims():
        print(f"{eid:<24} {claim}")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "run-all": _cmd_run_all, "list": _cmd_list}
    try:
        return handlers[args.command](args)
    except ZooError as exc:
        print(f"zoo: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, json.JSONDecodeError) as exc:
        print(f"zoo: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
