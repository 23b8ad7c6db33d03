"""JSON documents for instances, assignments, traces and property reports.

Rationals are always written as ``"p/q"`` strings in lowest terms; agents,
objects and every per-agent or per-object section keep the declared order,
so serializing the same data twice gives identical bytes.
"""
from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources

import jsonschema

from .assignment import Assignment
from .errors import DocumentError, InvalidProblem
from .problems import (ConstrainedMatchProblem, FdatInput, FeeProblem, HetProblem,
                       HouseAllocationProblem, HousingMarketProblem, LaminarConstraints,
                       PbaProblem, TimeExchangeProblem)
from .rational import format_rational, parse_rational
from .trace import StepTrace

SCHEMA_VERSION = 1
MODELS = ("fee", "house_allocation", "housing_market", "het", "pba",
          "constrained", "time_exchange", "fdat_input")

_ids = {"type": "array", "items": {"type": "string", "minLength": 1}, "uniqueItems": True}
_rat = {"type": "string"}
_row = {"type": "object", "additionalProperties": _rat}
_matrix = {"type": "object", "additionalProperties": _row}
_order = {"type": "array", "items": {"type": "string"}}
_classes = {"type": "array", "items": {"type": "array", "items": {"type": "string"}, "minItems": 1}}

BASE_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "model", "agents", "objects", "preferences"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "model": {"type": "string"},
        "agents": _ids,
        "objects": _ids,
        "preferences": {"type": "object", "additionalProperties": _order},
    },
}

MODEL_SCHEMAS = {
    "fee": {"required": ["endowments"], "properties": {"endowments": _matrix}},
    "house_allocation": {},
    "housing_market": {"required": ["owners"],
                       "properties": {"owners": {"type": "object", "additionalProperties": {"type": "string"}}}},
    "het": {"required": ["tenants"],
            "properties": {"tenants": {"type": "object", "additionalProperties": {"type": "string"}}}},
    "pba": {"required": ["priorities"],
            "properties": {"priorities": {"type": "object", "additionalProperties": _classes},
                           "copies": {"type": "object",
                                      "additionalProperties": {"type": "integer", "minimum": 1}}}},
    "constrained": {"properties": {
        "constraints": {"type": "array", "items": {
            "type": "object", "required": ["hospitals", "floor", "ceiling"],
            "properties": {"hospitals": _order, "floor": _rat, "ceiling": _rat}}},
        "capacities": {"type": "object", "additionalProperties": _rat}}},
    "time_exchange": {"required": ["endowments"],
                      "properties": {"endowments": _matrix, "upper": _matrix, "lower": _matrix}},
    "fdat_input": {"required": ["priorities", "assignment"],
                   "properties": {"priorities": {"type": "object", "additionalProperties": _classes},
                                  "assignment": _matrix}},
}


def _pointer(path) -> str:
    return "".join(f"/{p}" for p in path)


class _Reader:
    """Collects issues while converting a raw document into model objects."""

    def __init__(self, doc):
        self.doc = doc
        self.issues = []
        self.agents = list(doc["agents"])
        self.objects = list(doc["objects"])

    def fail(self, code, path, message):
        self.issues.append((code, path, message))

    def rational(self, text, path):
        try:
            return parse_rational(text)
        except ValueError as exc:
            self.fail("BadRational", path, str(exc))
            return Fraction(0)

    def known(self, ident, pool, kind, path) -> bool:
        if ident not in pool:
            self.fail("DanglingIdentifier", path, f"undeclared {kind} {ident!r}")
            return False
        return True

    def matrix(self, key, rows_are="agent", cols_are="object"):
        out = {}
        pools = {"agent": self.agents, "object": self.objects}
        for r, row in self.doc.get(key, {}).items():
            if not self.known(r, pools[rows_are], rows_are, f"/{key}/{r}"):
                continue
            out[r] = {}
            for c, text in row.items():
                if self.known(c, pools[cols_are], cols_are, f"/{key}/{r}/{c}"):
                    out[r][c] = self.rational(text, f"/{key}/{r}/{c}")
        return out

    def unit_rows(self, key, rows):
        for r, row in rows.items():
            total = sum(row.values(), Fraction(0))
            if total > 1:
                self.fail("InvariantViolation", f"/{key}/{r}", f"row sums to {format_rational(total)}, more than 1")
            for c, v in row.items():
                if v < 0:
                    self.fail("InvariantViolation", f"/{key}/{r}/{c}", "negative amount")
        return rows

    def preferences(self):
        prefs = {}
        for i, order in self.doc["preferences"].items():
            if not self.known(i, self.agents, "agent", f"/preferences/{i}"):
                continue
            for k, o in enumerate(order):
                self.known(o, self.objects, "object", f"/preferences/{i}/{k}")
            prefs[i] = list(order)
        return prefs

    def priorities(self):
        pri = {}
        for o, classes in self.doc.get("priorities", {}).items():
            if not self.known(o, self.objects, "object", f"/priorities/{o}"):
                continue
            seen = set()
            for k, c in enumerate(classes):
                for n, a in enumerate(c):
                    self.known(a, self.agents, "agent", f"/priorities/{o}/{k}/{n}")
                    if a in seen:
                        self.fail("DanglingIdentifier", f"/priorities/{o}/{k}/{n}",
                                  f"agent {a!r} ranked twice")
                    seen.add(a)
            pri[o] = [list(c) for c in classes]
        return pri


def _build(r: _Reader, model: str):
    doc = r.doc
    prefs = r.preferences()
    agents, objects = r.agents, r.objects
    if model == "fee":
        omega = r.unit_rows("endowments", r.matrix("endowments"))
        if r.issues:
            return None
        return FeeProblem(agents, objects, omega, prefs)
    if model == "house_allocation":
        return HouseAllocationProblem(agents, objects, prefs)
    if model == "housing_market":
        owners = {}
        for o, i in doc["owners"].items():
            if r.known(o, objects, "object", f"/owners/{o}") and r.known(i, agents, "agent", f"/owners/{o}"):
                if i in owners.values():
                    r.fail("DanglingIdentifier", f"/owners/{o}", f"agent {i!r} owns two objects")
                owners[o] = i
        return HousingMarketProblem(agents, objects, owners, prefs)
    if model == "het":
        tenants = {}
        for i, o in doc["tenants"].items():
            if r.known(i, agents, "agent", f"/tenants/{i}") and r.known(o, objects, "object", f"/tenants/{i}"):
                if o in tenants.values():
                    r.fail("DanglingIdentifier", f"/tenants/{i}", f"house {o!r} claimed by two tenants")
                tenants[i] = o
        return HetProblem(agents, objects, tenants, prefs)
    if model == "pba":
        copies = {o: n for o, n in doc.get("copies", {}).items()
                  if r.known(o, objects, "object", f"/copies/{o}")}
        return PbaProblem(agents, objects, copies, r.priorities(), prefs)
    if model == "constrained":
        cons = []
        for k, c in enumerate(doc.get("constraints", [])):
            for n, h in enumerate(c["hospitals"]):
                r.known(h, objects, "object", f"/constraints/{k}/hospitals/{n}")
            cons.append((c["hospitals"], r.rational(c["floor"], f"/constraints/{k}/floor"),
                         r.rational(c["ceiling"], f"/constraints/{k}/ceiling")))
        caps = {h: r.rational(v, f"/capacities/{h}") for h, v in doc.get("capacities", {}).items()
                if r.known(h, objects, "object", f"/capacities/{h}")}
        if r.issues:
            return None
        return ConstrainedMatchProblem(agents, objects, prefs, LaminarConstraints(tuple(cons), caps))
    if model == "time_exchange":
        omega = r.unit_rows("endowments", r.matrix("endowments"))
        if r.issues:
            return None
        fee = FeeProblem(agents, objects, omega, prefs)
        return TimeExchangeProblem(fee, r.matrix("upper"), r.matrix("lower"))
    if model == "fdat_input":
        rows = r.unit_rows("assignment", r.matrix("assignment"))
        if r.issues:
            return None
        p = Assignment(agents, objects, rows)
        return FdatInput(p, r.priorities(), prefs)
    raise AssertionError(model)


def parse_instance(data):
    """Parse bytes, text or an already decoded dict into a problem object.

    Raises :class:`DocumentError` listing every issue found.
    """
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise DocumentError([("SchemaError", "", f"invalid JSON: {exc}")]) from None
    issues = [("SchemaError", _pointer(e.absolute_path), e.message)
              for e in jsonschema.Draft202012Validator(BASE_SCHEMA).iter_errors(data)]
    if issues:
        raise DocumentError(issues)
    model = data["model"]
    if model not in MODEL_SCHEMAS:
        raise DocumentError([("UnknownModel", "/model", f"unknown model {model!r}; expected one of {list(MODELS)}")])
    issues = [("SchemaError", _pointer(e.absolute_path), e.message)
              for e in jsonschema.Draft202012Validator(MODEL_SCHEMAS[model]).iter_errors(data)]
    if issues:
        raise DocumentError(issues)
    r = _Reader(data)
    try:
        problem = _build(r, model)
    except InvalidProblem as exc:
        if r.issues:
            raise DocumentError(r.issues) from None
        raise DocumentError([("InvariantViolation", "", str(exc))]) from None
    if r.issues:
        raise DocumentError(r.issues)
    return problem


def load_instance(path):
    with open(path, "rb") as fh:
        return parse_instance(fh.read())


def model_of(problem) -> str:
    for cls, tag in _TAGS:
        if isinstance(problem, cls):
            return tag
    raise TypeError(f"not a market instance: {type(problem).__name__}")


_TAGS = ((FeeProblem, "fee"), (HouseAllocationProblem, "house_allocation"),
         (HousingMarketProblem, "housing_market"), (HetProblem, "het"), (PbaProblem, "pba"),
         (ConstrainedMatchProblem, "constrained"), (TimeExchangeProblem, "time_exchange"),
         (FdatInput, "fdat_input"))


def _sparse(rows, agents, objects, default=0):
    """Rows without entries equal to ``default``, which the parser fills back in."""
    return {i: {o: format_rational(rows[i][o]) for o in objects if rows[i][o] != default} for i in agents}


def _dense(p: Assignment):
    return {i: {o: format_rational(p[i, o]) for o in p.objects} for i in p.agents}


def instance_to_dict(problem) -> dict:
    model = model_of(problem)
    agents, objects = list(problem.agents), list(problem.objects)
    doc = {"schema_version": SCHEMA_VERSION, "model": model, "agents": agents, "objects": objects,
           "preferences": {i: list(problem.preferences[i]) for i in agents}}
    if model == "fee":
        doc["endowments"] = _sparse(problem.endowments, agents, objects)
    elif model == "housing_market":
        doc["owners"] = {o: problem.owner[o] for o in objects}
    elif model == "het":
        doc["tenants"] = {i: problem.tenants[i] for i in agents if i in problem.tenants}
    elif model in ("pba", "fdat_input"):
        doc["priorities"] = {o: [list(c) for c in problem.priorities[o]] for o in objects}
        if model == "pba":
            doc["copies"] = {o: problem.copies[o] for o in objects}
        else:
            doc["assignment"] = _sparse(problem.assignment.as_dict(), agents, objects)
    elif model == "constrained":
        order = {h: k for k, h in enumerate(objects)}
        doc["constraints"] = [{"hospitals": sorted(s, key=order.__getitem__), "floor": format_rational(lo),
                               "ceiling": format_rational(hi)} for s, lo, hi in problem.constraints.constraints]
        doc["capacities"] = {h: format_rational(problem.constraints.capacities[h])
                             for h in objects if h in problem.constraints.capacities}
    elif model == "time_exchange":
        doc["endowments"] = _sparse(problem.fee.endowments, agents, objects)
        doc["upper"] = _sparse(problem.upper, agents, objects, default=1)
        doc["lower"] = _sparse(problem.lower, agents, objects)
    return doc


def dumps(doc) -> str:
    """Canonical text: two-space indent, declared key order, trailing newline."""
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def serialize_instance(problem) -> str:
    return dumps(instance_to_dict(problem))


def assignment_to_dict(p: Assignment, mechanism=None) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "kind": "assignment"}
    if mechanism:
        doc["mechanism"] = mechanism
    doc.update({"agents": list(p.agents), "objects": list(p.objects), "assignment": _dense(p)})
    return doc


def parse_assignment(data) -> Assignment:
    if isinstance(data, (bytes, bytearray, str)):
        data = json.loads(data)
    rows = data.get("assignment")
    if not isinstance(rows, dict) or "agents" not in data or "objects" not in data:
        raise DocumentError([("SchemaError", "", "assignment document needs agents, objects and assignment")])
    issues = []
    entries = {}
    for i, row in rows.items():
        if i not in data["agents"]:
            issues.append(("DanglingIdentifier", f"/assignment/{i}", f"undeclared agent {i!r}"))
            continue
        entries[i] = {}
        for o, text in row.items():
            if o not in data["objects"]:
                issues.append(("DanglingIdentifier", f"/assignment/{i}/{o}", f"undeclared object {o!r}"))
                continue
            try:
                entries[i][o] = parse_rational(text)
            except (ValueError, TypeError) as exc:
                issues.append(("BadRational", f"/assignment/{i}/{o}", str(exc)))
    if issues:
        raise DocumentError(issues)
    return Assignment(data["agents"], data["objects"], entries)


def jsonable(value):
    """Recursively turn Fractions, tuples and tuple-keyed dicts into JSON values."""
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, Assignment):
        return _dense(value)
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, dict):
        return {_key(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (set, frozenset)):
        return sorted(jsonable(v) for v in value)
    return value


def _key(k) -> str:
    if isinstance(k, tuple):
        return ":".join(_key(x) for x in k)
    return str(k)


def _pairs(mapping):
    return [[jsonable(k), format_rational(v)] for k, v in mapping.items()]


def trace_to_dict(trace: StepTrace) -> dict:
    steps = []
    for s in trace.steps:
        item = {"index": s.index, "kind": s.kind, "agents": jsonable(s.agents),
                "objects": jsonable(s.objects), "favorites": jsonable(s.favorites)}
        if s.lam is not None:
            item["lambda"] = [[jsonable(v), jsonable(u), format_rational(x)] for (v, u), x in s.lam.items()]
            item["quotas"] = _pairs(s.quotas)
            item["x"] = _pairs(s.x)
            item["blocks"] = jsonable(s.blocks)
            item["binding"] = jsonable(s.binding)
        item["assignment_delta"] = [[i, o, format_rational(v)] for i, o, v in s.assignment_delta]
        if s.endowment_delta:
            item["endowment_delta"] = [[i, o, format_rational(v)] for i, o, v in s.endowment_delta]
        if s.extra:
            item["extra"] = jsonable(s.extra)
        steps.append(item)
    doc = {"schema_version": SCHEMA_VERSION, "kind": "trace", "mechanism": trace.mechanism,
           "agents": list(trace.agents), "objects": list(trace.objects),
           "initial": _dense(trace.initial), "steps": steps}
    if trace.meta:
        doc["meta"] = jsonable(trace.meta)
    return doc


def replay_trace_document(doc) -> Assignment:
    """Rebuild the final assignment from a serialized trace alone."""
    if isinstance(doc, (bytes, bytearray, str)):
        doc = json.loads(doc)
    p = Assignment(doc["agents"], doc["objects"],
                   {i: {o: parse_rational(v) for o, v in row.items()} for i, row in doc["initial"].items()})
    for step in doc["steps"]:
        for i, o, v in step["assignment_delta"]:
            p.add(i, o, parse_rational(v))
    return p


def report_to_dict(reports: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, "kind": "report",
            "ok": all(r.ok for r in reports.values()),
            "properties": {name: {"ok": r.ok, "witnesses": jsonable(r.witnesses), "warnings": list(r.warnings)}
                           for name, r in reports.items()}}


def solver_debug_dict(g, sol) -> dict:
    """Nodes, lambda, quotas, partition and solution of one solver call."""
    return {"nodes": jsonable(g.nodes),
            "lambda": [[jsonable(v), jsonable(u), format_rational(x)] for (v, u), x in g.lam.items()],
            "quotas": _pairs(g.quotas),
            "blocks": jsonable(sol.partition.blocks),
            "residual": jsonable(sol.partition.residual),
            "x": _pairs(sol.x),
            "binding": jsonable([b.binding for b in sol.blocks])}


FIXTURES = ("example1", "example2", "table1", "table2", "table3", "bounded_envy", "replication_base")


def fixture_path(name: str):
    """Path of a bundled fixture document (``example1``, ``table3``, ...)."""
    return resources.files("eqtrade") / "data" / f"{name}.json"


def load_fixture(name: str):
    data = fixture_path(name).read_bytes()
    doc = json.loads(data)
    if doc.get("kind") == "assignment":
        return parse_assignment(doc)
    return parse_instance(doc)
