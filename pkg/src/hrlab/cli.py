"""Command line front end: ``hrlab <command> --input job.json``."""

import argparse
import json
import sys

from . import __version__
from .jobs import EXIT_ERROR, JobError, run
from .jsonio import dumps
from .schema import COMMANDS, detect_kind, violations


def _read_json(path):
    if path is None or path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error(message, out=None):
    sys.stderr.write(dumps({"tool": "hrlab", "version": __version__, "error": message}))
    return EXIT_ERROR


def validate(path) -> dict:
    """Schema report for a JSON file: ``{"path", "kind", "ok", "violations"}``."""
    data = _read_json(path)
    kind = detect_kind(data)
    problems = violations(data, kind)
    return {"path": path, "kind": kind, "ok": not problems, "violations": problems}


def build_parser():
    parser = argparse.ArgumentParser(prog="hrlab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"hrlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input", "-i", help="job JSON file (stdin when omitted)")
        p.add_argument("--seed", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--out", "-o", help="write the report here instead of stdout")
        p.add_argument("--timing", action="store_true", help="include wall-clock time (breaks byte-identical output)")
    v = sub.add_parser("validate")
    v.add_argument("path")
    v.add_argument("--out", "-o")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "validate":
        try:
            report = validate(args.path)
        except (OSError, json.JSONDecodeError) as exc:
            return _error(f"cannot read {args.path}: {exc}")
        _emit(dumps(report), args.out)
        return 0 if report["ok"] else 1

    try:
        job = _read_json(args.input)
    except (OSError, json.JSONDecodeError) as exc:
        return _error(f"cannot read job: {exc}")
    if not isinstance(job, dict):
        return _error("job must be a JSON object")
    if job.get("command", args.command) != args.command:
        return _error(f"job declares command {job['command']!r} but {args.command!r} was requested")
    job = dict(job, command=args.command)
    for key in ("seed", "trials", "tol"):
        value = getattr(args, key)
        if value is not None:
            job[key] = value
    job.setdefault("seed", 0)
    try:
        report, code = run(job, timing=args.timing)
    except JobError as exc:
        return _error(str(exc))
    _emit(dumps(report), args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
