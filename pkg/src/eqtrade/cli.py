"""Command line: ``eqtrade {run,verify,trace,harness,oracles}``.

Exit status: 0 success, 1 a verification or suite found failures, 2 bad
usage or an unreadable document, 3 mechanism or property not applicable
to the instance model, 4 the mechanism itself raised an error.
"""
from __future__ import annotations

import argparse
import csv
import io as _stdio
import json
import os
import random
import sys
from pathlib import Path

from . import io
from .errors import DocumentError, EqTradeError, IncompatibleMechanism
from .oracles import is_nonincreasing, manipulation_gain, replication_series, series_maxima
from .rational import format_rational, parse_rational
from .registry import MECHANISMS, PROPERTIES, SUITE_GENERATORS, accepted, evaluate, lambda_rule, run_mechanism

OUTPUT_ENV = "EQTRADE_OUTPUT_DIR"

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_INCOMPATIBLE, EXIT_MECHANISM = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _csv_list(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def _read_json(path):
    try:
        with open(path, "rb") as fh:
            return json.loads(fh.read().decode("utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DocumentError([("SchemaError", "", f"{path}: invalid JSON: {exc}")]) from None


def _instance(path):
    return io.parse_instance(_read_json(path))


def _out_dir(args):
    out = getattr(args, "out", None) or os.environ.get(OUTPUT_ENV)
    return Path(out) if out else None


def _emit(args, files: dict) -> None:
    """Write ``{file name: text}`` into the output directory, or the single
    document to stdout when no directory is configured."""
    out = _out_dir(args)
    if out is None:
        if len(files) != 1:
            raise AssertionError("several outputs need an output directory")
        sys.stdout.write(next(iter(files.values())))
        return
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        with open(out / name, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _rule(args):
    table = None
    if args.lambda_kind == "file":
        if not args.lambda_file:
            raise UsageError("--lambda file needs --lambda-file PATH")
        raw = _read_json(args.lambda_file)
        try:
            table = {int(step): {(i, o): parse_rational(v) for i, row in rows.items() for o, v in row.items()}
                     for step, rows in raw["steps"].items()}
        except (KeyError, AttributeError, ValueError, TypeError) as exc:
            raise DocumentError([("SchemaError", "/steps", f"bad lambda table: {exc}")]) from None
    return lambda_rule(args.lambda_kind, table)


def _properties(args, mechanism):
    if args.properties in (None, "default"):
        return list(MECHANISMS[mechanism].defaults) if args.properties == "default" else []
    names = _csv_list(args.properties)
    unknown = [n for n in names if n not in PROPERTIES]
    if unknown:
        raise UsageError(f"unknown properties {unknown}; choose from {sorted(PROPERTIES)}")
    return names


# ----------------------------------------------------------------------------
# commands


def cmd_run(args) -> int:
    problem = _instance(args.instance)
    accepted(args.mechanism, problem)
    names = _properties(args, args.mechanism)
    p, trace = run_mechanism(args.mechanism, problem, _rule(args))
    files = {"assignment.json": io.dumps(io.assignment_to_dict(p, args.mechanism))}
    if args.trace:
        if trace is None:
            raise IncompatibleMechanism(f"{args.mechanism} is a reference oracle and keeps no trace")
        files["trace.json"] = io.dumps(io.trace_to_dict(trace))
    report = None
    if names:
        report = io.report_to_dict(evaluate(names, p, problem))
        files["report.json"] = io.dumps(report)
    if len(files) > 1 and _out_dir(args) is None:
        bundle = {"schema_version": io.SCHEMA_VERSION, "kind": "run",
                  "assignment": json.loads(files["assignment.json"])}
        for key in ("trace", "report"):
            if f"{key}.json" in files:
                bundle[key] = json.loads(files[f"{key}.json"])
        files = {"run.json": io.dumps(bundle)}
    _emit(args, files)
    return EXIT_OK if report is None or report["ok"] else EXIT_FAILED


def cmd_verify(args) -> int:
    p = io.parse_assignment(_read_json(args.assignment))
    problem = _instance(args.instance)
    if tuple(p.agents) != tuple(problem.agents) or tuple(p.objects) != tuple(problem.objects):
        raise DocumentError([("DanglingIdentifier", "/agents",
                              "assignment and instance declare different agents or objects")])
    names = _csv_list(args.properties)
    unknown = [n for n in names if n not in PROPERTIES]
    if unknown:
        raise UsageError(f"unknown properties {unknown}; choose from {sorted(PROPERTIES)}")
    report = io.report_to_dict(evaluate(names, p, problem))
    _emit(args, {"report.json": io.dumps(report)})
    return EXIT_OK if report["ok"] else EXIT_FAILED


def cmd_trace(args) -> int:
    if args.replay:
        doc = _read_json(args.instance)
        if doc.get("kind") != "trace":
            raise DocumentError([("SchemaError", "/kind", "expected a trace document")])
        p = io.replay_trace_document(doc)
        _emit(args, {"assignment.json": io.dumps(io.assignment_to_dict(p, doc.get("mechanism")))})
        return EXIT_OK
    if not args.mechanism:
        raise UsageError("trace needs --mechanism unless --replay is given")
    problem = _instance(args.instance)
    p, trace = run_mechanism(args.mechanism, problem, _rule(args))
    if trace is None:
        raise IncompatibleMechanism(f"{args.mechanism} is a reference oracle and keeps no trace")
    _emit(args, {"trace.json": io.dumps(io.trace_to_dict(trace))})
    return EXIT_OK


def _csv_text(header, rows) -> str:
    buf = _stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_harness(args) -> int:
    if args.harness == "replicate":
        if args.mechanism not in ("equal-bta", "proportional-bta", "bta"):
            raise IncompatibleMechanism("replication needs an endowment exchange mechanism: "
                                        "equal-bta, proportional-bta or bta")
        problem = accepted(args.mechanism, _instance(args.instance))
        try:
            ns = [int(n) for n in _csv_list(args.n)]
        except ValueError:
            raise UsageError(f"--n takes a comma separated list of positive integers, got {args.n!r}") from None
        if not ns or min(ns) < 1:
            raise UsageError("--n needs positive replication factors")
        rule = _rule(args)

        def mech(q):
            return run_mechanism(args.mechanism, q, rule)[0]

        rows = replication_series(problem, mech, tuple(ns))
        maxima = series_maxima(rows)
        table = [(n, "agent", i, format_rational(e)) for n, i, e in rows]
        table += [(n, "max", "", format_rational(e)) for n, e in maxima.items()]
        text = _csv_text(["n", "scope", "agent", "epsilon"], table)
        flag = "nonincreasing" if is_nonincreasing(maxima[n] for n in ns) else "exception"
        text += f"# series {flag}\n"
        _emit(args, {"replication.csv": text})
        return EXIT_OK
    return _suite(args)


def _suite(args) -> int:
    rng = random.Random(args.seed)
    mechanisms = [args.mechanism] if args.mechanism else list(SUITE_GENERATORS)
    rows, failed = [], False
    for m in mechanisms:
        names = list(MECHANISMS[m].defaults)
        fails = {n: 0 for n in names}
        errors = 0
        for _ in range(args.count):
            problem = SUITE_GENERATORS[m](rng)
            try:
                p, _ = run_mechanism(m, problem, _rule(args))
            except EqTradeError:
                errors += 1
                continue
            for name, rep in evaluate(names, p, problem).items():
                fails[name] += not rep.ok
        for name in names:
            rows.append((m, name, args.count, fails[name], errors))
            failed |= bool(fails[name] or errors)
    _emit(args, {"suite.csv": _csv_text(["mechanism", "property", "instances", "failures", "errors"], rows)})
    return EXIT_FAILED if failed else EXIT_OK


def cmd_oracles(args) -> int:
    problem = _instance(args.instance)
    if args.oracle in ("ps", "ttc"):
        p, _ = run_mechanism(args.oracle, problem)
        _emit(args, {"assignment.json": io.dumps(io.assignment_to_dict(p, args.oracle))})
        return EXIT_OK
    fee = accepted(args.mechanism, problem)
    rule = _rule(args)

    def mech(q):
        return run_mechanism(args.mechanism, q, rule)[0]

    agents = [args.agent] if args.agent else list(fee.agents)
    rows = []
    for i in agents:
        if i not in fee.agents:
            raise UsageError(f"unknown agent {i!r}")
        res = manipulation_gain(fee, mech, i)
        rows.append((i, format_rational(res.epsilon), " ".join(res.report)))
    _emit(args, {"manipulation.csv": _csv_text(["agent", "epsilon", "best_report"], rows)})
    return EXIT_OK


# ----------------------------------------------------------------------------
# parser


def _add_common(p, mechanism_required=True):
    p.add_argument("--mechanism", choices=sorted(MECHANISMS), required=mechanism_required)
    p.add_argument("--lambda", dest="lambda_kind", choices=("equal", "proportional", "file"), default="equal",
                   help="lambda rule for bta and time-exchange")
    p.add_argument("--lambda-file", help="JSON {\"steps\": {step: {agent: {object: \"p/q\"}}}}")
    p.add_argument("--out", help=f"output directory (default: stdout, or ${OUTPUT_ENV})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eqtrade", description="Exact trading algorithms for market design.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a mechanism on an instance")
    _add_common(run)
    run.add_argument("--trace", action="store_true", help="also write the step trace")
    run.add_argument("--properties", help="comma separated property names, or 'default'")
    run.add_argument("instance")
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify", help="check properties of an assignment document")
    ver.add_argument("--properties", required=True, help="comma separated property names")
    ver.add_argument("--out")
    ver.add_argument("assignment")
    ver.add_argument("instance")
    ver.set_defaults(func=cmd_verify)

    tr = sub.add_parser("trace", help="write a step trace, or replay one with --replay")
    _add_common(tr, mechanism_required=False)
    tr.add_argument("--replay", action="store_true", help="treat the input as a trace document and replay it")
    tr.add_argument("instance")
    tr.set_defaults(func=cmd_trace)

    har = sub.add_parser("harness", help="replication series and randomized suites")
    hsub = har.add_subparsers(dest="harness", required=True)
    rep = hsub.add_parser("replicate", help="manipulation gain of replicated markets")
    _add_common(rep)
    rep.add_argument("--n", default="1,2,4,8", help="replication factors, e.g. 1,2,4")
    rep.add_argument("instance")
    suite = hsub.add_parser("suite", help="random instances checked against each mechanism's properties")
    _add_common(suite, mechanism_required=False)
    suite.add_argument("--seed", type=int, default=0)
    suite.add_argument("--count", type=int, default=50)
    har.set_defaults(func=cmd_harness)

    orc = sub.add_parser("oracles", help="reference mechanisms and manipulation search")
    osub = orc.add_subparsers(dest="oracle", required=True)
    for name in ("ps", "ttc"):
        o = osub.add_parser(name)
        o.add_argument("--out")
        o.add_argument("instance")
    man = osub.add_parser("manipulation", help="best misreport gain per agent")
    _add_common(man)
    man.add_argument("--agent")
    man.add_argument("instance")
    orc.set_defaults(func=cmd_oracles)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"eqtrade: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DocumentError as exc:
        for code, path, message in exc.issues:
            print(f"eqtrade: {code} at {path or '/'}: {message}", file=sys.stderr)
        return EXIT_USAGE
    except IncompatibleMechanism as exc:
        print(f"eqtrade: incompatible: {exc}", file=sys.stderr)
        return EXIT_INCOMPATIBLE
    except EqTradeError as exc:
        print(f"eqtrade: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MECHANISM


if __name__ == "__main__":
    sys.exit(main())
