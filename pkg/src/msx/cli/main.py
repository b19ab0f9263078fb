"""Command-line entry point: ``msx run``, ``msx verify``, ``msx repl``, ``msx traceability``."""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from pathlib import Path

from ..errors import MsxError, ScriptSyntaxError
from .dsl import Binding, Emit, Scope, parse
from .interp import EXIT_ERROR, EXIT_FAILED, EXIT_OK, Interpreter, dumps, render_value, run
from .suites import SUITES, SuiteReport, run_suite, scaled_theta, traceability_markdown

__all__ = ["main", "build_parser", "default_seed"]


def default_seed() -> int:
    raw = os.environ.get("MSX_SEED", "")
    try:
        return int(raw) if raw else 0
    except ValueError:
        raise SystemExit(f"msx: MSX_SEED must be an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="msx", description="Exact multisymplectic geometry scripting.")
    sub = ap.add_subparsers(dest="verb", required=True)

    def output_flags(p):
        group = p.add_mutually_exclusive_group()
        group.add_argument("--json", dest="fmt", action="store_const", const="json", default="json")
        group.add_argument("--text", dest="fmt", action="store_const", const="text")
        p.add_argument("--seed", type=int, default=None, help="default seed (falls back to MSX_SEED, then 0)")
        p.add_argument("--mutate-theta", type=Fraction, default=None, metavar="FACTOR",
                       help="scale the p d^n x coefficient of Theta on Z (mutation check)")

    p_run = sub.add_parser("run", help="execute a .msx script")
    p_run.add_argument("file", type=Path)
    output_flags(p_run)

    p_verify = sub.add_parser("verify", help="run a verification suite")
    p_verify.add_argument("--suite", required=True, choices=sorted(SUITES) + ["all"])
    for name in ("n", "k", "m", "trials"):
        p_verify.add_argument(f"--{name}", type=int, default=None)
    output_flags(p_verify)

    p_repl = sub.add_parser("repl", help="read statements from standard input")
    p_repl.add_argument("--seed", type=int, default=None)

    p_trace = sub.add_parser("traceability", help="print the suite traceability table")
    p_trace.add_argument("--output", type=Path, default=None)
    return ap


def _theta(args):
    return None if args.mutate_theta is None else scaled_theta(args.mutate_theta)


def _error_doc(exc: MsxError, seed: int) -> dict:
    error = {"type": type(exc).__name__, "message": str(exc)}
    for attr in ("line", "column"):
        if getattr(exc, attr, None) is not None:
            error[attr] = getattr(exc, attr)
    return {"status": "error", "seed": seed, "emitted": [], "verify": [], "error": error}


def _text_report(r: dict) -> str:
    p = r["params"]
    line = (f"{r['suite']}: {'PASS' if r['pass'] else 'FAIL'} "
            f"(n={p['n']}, k={p['k']}, m={p['m']}, trials={r['trials']}, seed={p['seed']})")
    return "\n".join([line] + [f"  {f}" for f in r["failures"]])


def _emit(doc: dict, fmt: str, out, text=()) -> None:
    if fmt == "json":
        out.write(dumps(doc))
        return
    for line in text:
        out.write(line + "\n")
    for r in doc["verify"]:
        out.write(_text_report(r) + "\n")
    if "error" in doc:
        e = doc["error"]
        where = f"line {e['line']}: " if "line" in e else ""
        out.write(f"error: {where}{e['type']}: {e['message']}\n")


def cmd_run(args, out) -> int:
    seed = default_seed() if args.seed is None else args.seed
    try:
        source = args.file.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"msx: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        script = parse(source)
    except MsxError as exc:
        _emit(_error_doc(exc, seed), args.fmt, out)
        return EXIT_ERROR
    result = run(script, seed=seed, theta=_theta(args))
    _emit(result.doc, args.fmt, out, result.text)
    return result.exit_code


def cmd_verify(args, out) -> int:
    seed = default_seed() if args.seed is None else args.seed
    ids = list(SUITES) if args.suite == "all" else [args.suite]
    reports: list[SuiteReport] = []
    try:
        for sid in ids:
            given = {"seed": seed}
            if args.suite != "all":
                given.update(n=args.n, k=args.k, m=args.m, trials=args.trials)
            reports.append(run_suite(sid, theta=_theta(args), **given))
    except MsxError as exc:
        _emit(_error_doc(exc, seed), args.fmt, out)
        return EXIT_ERROR
    failed = any(not r.passed for r in reports)
    doc = {"status": "verification-failed" if failed else "ok", "seed": seed, "emitted": [],
           "verify": [r.to_json() for r in reports]}
    _emit(doc, args.fmt, out)
    return EXIT_FAILED if failed else EXIT_OK


def cmd_repl(args, inp, out) -> int:
    seed = default_seed() if args.seed is None else args.seed
    scope = Scope()
    interp = Interpreter(seed=seed)
    interactive = inp.isatty()
    code = EXIT_OK
    while True:
        if interactive:
            out.write("msx> ")
            out.flush()
        line = inp.readline()
        if not line:
            break
        try:
            for stmt in parse(line, scope):
                value = interp.execute(stmt)
                if isinstance(value, SuiteReport):
                    out.write(_text_report(value.to_json()) + "\n")
                    if not value.passed:
                        code = EXIT_FAILED
                elif isinstance(stmt, Emit):
                    for name, v in zip(stmt.names, value):
                        out.write(f"{name} = {render_value(v)}\n")
                elif isinstance(stmt, Binding):
                    out.write(f"{stmt.name} = {render_value(value)}\n")
                else:
                    out.write(f"chart {value.label}\n")
        except ScriptSyntaxError as exc:
            out.write(f"syntax error at {exc.line}:{exc.column}: {exc.message}\n")
        except MsxError as exc:
            out.write(f"error: {type(exc).__name__}: {exc}\n")
    return code


def cmd_traceability(args, out) -> int:
    text = traceability_markdown()
    if args.output is None:
        out.write(text)
    else:
        args.output.write_text(text, encoding="utf-8")
    return EXIT_OK


def main(argv=None, stdin=None, stdout=None) -> int:
    out = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    if args.verb == "run":
        return cmd_run(args, out)
    if args.verb == "verify":
        return cmd_verify(args, out)
    if args.verb == "repl":
        return cmd_repl(args, stdin or sys.stdin, out)
    return cmd_traceability(args, out)


if __name__ == "__main__":
    sys.exit(main())
