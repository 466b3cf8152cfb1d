"""Bit-exact instance and labeling documents, DIMACS input, DOT output.

Documents are JSON with a fixed key order (sorted), two-space indentation,
sorted override/label lists, and a trailing newline, so serializing a parsed
document reproduces it byte for byte.  Parsing performs structural
validation only; reachability is a solver concern.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from tmbcast.core import (
    Instance,
    Labeling,
    ParseError,
    ReachFastInstance,
    StaticGraph,
    TraversalSpec,
    ValidationError,
)
from tmbcast.reductions import CnfFormula, GadgetInstance

INSTANCE_FORMAT = "tmbcast/instance"
LABELING_FORMAT = "tmbcast/labeling"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class InstanceDocument:
    """Full-fidelity view of an instance file: model plus annotations."""

    kind: str  # "tmb" | "reachfast"
    graph: StaticGraph
    sources: frozenset[int]
    traversal: TraversalSpec
    tau: int
    multiplicity: tuple[int, ...] | None = None
    labels: Labeling | None = None
    names: tuple[str, ...] | None = None
    roles: tuple[str, ...] | None = None
    meta: dict | None = None

    def to_instance(self) -> Instance:
        if self.kind != "tmb":
            raise ValidationError("document holds a reachfast instance")
        return Instance(
            self.graph, self.sources, self.traversal, self.multiplicity, self.tau
        )

    def to_reachfast(self) -> ReachFastInstance:
        if self.kind != "reachfast":
            raise ValidationError("document holds a tmb instance")
        return ReachFastInstance(
            self.graph, self.sources, self.traversal, self.labels, self.tau
        )

    def model(self) -> Instance | ReachFastInstance:
        return self.to_instance() if self.kind == "tmb" else self.to_reachfast()

    def vertex_name(self, v: int) -> str:
        if self.names is not None:
            return self.names[v]
        return str(v)

    def vertex_id(self, token: str) -> int:
        if self.names is not None and token in self.names:
            return self.names.index(token)
        try:
            v = int(token)
        except ValueError:
            raise ValidationError(f"unknown vertex {token!r}") from None
        if not (0 <= v < self.graph.vertex_count):
            raise ValidationError(f"vertex {v} out of range")
        return v

    @classmethod
    def from_model(
        cls,
        model: Instance | ReachFastInstance,
        names=None,
        roles=None,
        meta=None,
    ) -> "InstanceDocument":
        common = dict(
            graph=model.graph,
            sources=model.sources,
            traversal=model.traversal,
            tau=model.tau,
            names=tuple(names) if names is not None else None,
            roles=tuple(roles) if roles is not None else None,
            meta=meta,
        )
        if isinstance(model, Instance):
            return cls(kind="tmb", multiplicity=model.multiplicity, **common)
        return cls(kind="reachfast", labels=model.labels, **common)

    @classmethod
    def from_gadget(cls, gadget: GadgetInstance) -> "InstanceDocument":
        return cls.from_model(
            gadget.instance,
            names=gadget.vertex_names,
            roles=gadget.vertex_roles,
            meta=dict(
                gadget.meta,
                yes_value=gadget.yes_value,
                no_value_lower_bound=gadget.no_value_lower_bound,
            ),
        )


def _canonical(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def serialize_instance(
    obj: InstanceDocument | Instance | ReachFastInstance,
    *,
    names=None,
    roles=None,
    meta=None,
) -> str:
    """Canonical text form; byte-identical across serialize/parse round trips."""
    if not isinstance(obj, InstanceDocument):
        obj = InstanceDocument.from_model(obj, names=names, roles=roles, meta=meta)
    payload: dict[str, Any] = {
        "format": INSTANCE_FORMAT,
        "version": FORMAT_VERSION,
        "kind": obj.kind,
        "vertices": obj.graph.vertex_count,
        "edges": [list(pair) for pair in obj.graph.edges],
        "sources": sorted(obj.sources),
        "tau": obj.tau,
        "default_weights": list(obj.traversal.defaults),
        "overrides": sorted(
            [e, t, w]
            for e, items in enumerate(obj.traversal.overrides)
            for t, w in items
        ),
    }
    if obj.kind == "tmb":
        payload["multiplicity"] = list(obj.multiplicity)
    else:
        payload["labels"] = [list(ts) for ts in obj.labels.times_by_edge]
    if obj.names is not None:
        payload["names"] = list(obj.names)
    if obj.roles is not None:
        payload["roles"] = list(obj.roles)
    if obj.meta is not None:
        payload["meta"] = obj.meta
    return _canonical(payload)


def _need(payload: dict, key: str, kinds, what: str):
    if key not in payload:
        raise ParseError(f"{what}: missing field {key!r}")
    value = payload[key]
    if not isinstance(value, kinds):
        raise ParseError(f"{what}: field {key!r} has the wrong type")
    return value


def _load_json(text: str, what: str) -> dict:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"{what}: not valid JSON ({err})") from None
    if not isinstance(payload, dict):
        raise ParseError(f"{what}: top level must be an object")
    return payload


def parse_instance_document(text: str) -> InstanceDocument:
    what = "instance document"
    payload = _load_json(text, what)
    if payload.get("format") != INSTANCE_FORMAT:
        raise ParseError(f"{what}: format must be {INSTANCE_FORMAT!r}")
    if payload.get("version") != FORMAT_VERSION:
        raise ParseError(f"{what}: unsupported version {payload.get('version')!r}")
    kind = _need(payload, "kind", str, what)
    if kind not in ("tmb", "reachfast"):
        raise ParseError(f"{what}: kind must be tmb or reachfast")
    n = _need(payload, "vertices", int, what)
    edges_raw = _need(payload, "edges", list, what)
    tau = _need(payload, "tau", int, what)
    sources = _need(payload, "sources", list, what)
    defaults = _need(payload, "default_weights", list, what)
    overrides_raw = _need(payload, "overrides", list, what)
    try:
        edges = tuple((int(u), int(v)) for u, v in edges_raw)
    except (TypeError, ValueError):
        raise ParseError(f"{what}: edges must be pairs of integers") from None
    table: list[dict[int, int]] = [dict() for _ in edges]
    for item in overrides_raw:
        try:
            e, t, w = (int(x) for x in item)
        except (TypeError, ValueError):
            raise ParseError(f"{what}: overrides must be [edge, time, weight]") from None
        if not (0 <= e < len(edges)):
            raise ParseError(f"{what}: override for unknown edge {e}")
        table[e][t] = w
    try:
        graph = StaticGraph(n, edges)
        traversal = TraversalSpec(
            tuple(int(d) for d in defaults),
            tuple(tuple(sorted(per.items())) for per in table),
        )
    except (TypeError, ValueError) as err:
        raise ParseError(f"{what}: {err}") from None

    names = payload.get("names")
    roles = payload.get("roles")
    meta = payload.get("meta")
    for label, seq in (("names", names), ("roles", roles)):
        if seq is not None:
            if not isinstance(seq, list) or len(seq) != n:
                raise ParseError(f"{what}: {label} must list one entry per vertex")
    if meta is not None and not isinstance(meta, dict):
        raise ParseError(f"{what}: meta must be an object")

    common = dict(
        graph=graph,
        sources=frozenset(int(s) for s in sources),
        traversal=traversal,
        tau=tau,
        names=tuple(names) if names is not None else None,
        roles=tuple(roles) if roles is not None else None,
        meta=meta,
    )
    if kind == "tmb":
        mult = _need(payload, "multiplicity", list, what)
        if "labels" in payload:
            raise ParseError(f"{what}: tmb documents do not carry labels")
        doc = InstanceDocument(
            kind="tmb", multiplicity=tuple(int(m) for m in mult), **common
        )
        doc.to_instance()  # validates
    else:
        labels_raw = _need(payload, "labels", list, what)
        if "multiplicity" in payload:
            raise ParseError(f"{what}: reachfast documents do not carry multiplicity")
        if len(labels_raw) != len(edges):
            raise ParseError(f"{what}: labels must list one entry per edge")
        try:
            labels = Labeling(tuple(tuple(int(t) for t in ts) for ts in labels_raw))
        except (TypeError, ValueError) as err:
            raise ParseError(f"{what}: {err}") from None
        doc = InstanceDocument(kind="reachfast", labels=labels, **common)
        doc.to_reachfast()  # validates
    return doc


def parse_instance(text: str) -> Instance | ReachFastInstance:
    return parse_instance_document(text).model()


# ---------------------------------------------------------------------------
# Labeling documents


@dataclass(frozen=True)
class LabelingDocument:
    labels: Labeling
    provenance: dict | None = None


def serialize_labeling(
    labeling: Labeling | LabelingDocument, provenance: dict | None = None
) -> str:
    if isinstance(labeling, LabelingDocument):
        provenance = labeling.provenance
        labeling = labeling.labels
    payload: dict[str, Any] = {
        "format": LABELING_FORMAT,
        "version": FORMAT_VERSION,
        "labels": [list(ts) for ts in labeling.times_by_edge],
    }
    if provenance is not None:
        payload["provenance"] = provenance
    return _canonical(payload)


def parse_labeling(text: str) -> LabelingDocument:
    what = "labeling document"
    payload = _load_json(text, what)
    if payload.get("format") != LABELING_FORMAT:
        raise ParseError(f"{what}: format must be {LABELING_FORMAT!r}")
    if payload.get("version") != FORMAT_VERSION:
        raise ParseError(f"{what}: unsupported version {payload.get('version')!r}")
    labels_raw = _need(payload, "labels", list, what)
    try:
        labels = Labeling(tuple(tuple(int(t) for t in ts) for ts in labels_raw))
    except (TypeError, ValueError) as err:
        raise ParseError(f"{what}: {err}") from None
    provenance = payload.get("provenance")
    if provenance is not None and not isinstance(provenance, dict):
        raise ParseError(f"{what}: provenance must be an object")
    return LabelingDocument(labels=labels, provenance=provenance)


# ---------------------------------------------------------------------------
# DIMACS CNF


def parse_cnf(text: str) -> CnfFormula:
    """DIMACS CNF: comments, a 'p cnf' header, zero-terminated clauses."""
    variable_count = None
    clause_count = None
    literals: list[int] = []
    clauses: list[tuple[int, ...]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            if variable_count is not None:
                raise ParseError(f"line {lineno}: duplicate header")
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"line {lineno}: header must be 'p cnf V C'")
            try:
                variable_count = int(parts[2])
                clause_count = int(parts[3])
            except ValueError:
                raise ParseError(f"line {lineno}: header counts must be integers")
            if variable_count < 1 or clause_count < 1:
                raise ParseError(f"line {lineno}: header counts must be positive")
            continue
        if variable_count is None:
            raise ParseError(f"line {lineno}: clause before header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                if not literals:
                    raise ParseError(f"line {lineno}: empty clause")
                clauses.append(tuple(literals))
                literals.clear()
            else:
                if abs(lit) > variable_count:
                    raise ParseError(
                        f"line {lineno}: literal {lit} beyond header variables"
                    )
                literals.append(lit)
    if variable_count is None:
        raise ParseError("missing 'p cnf' header")
    if literals:
        clauses.append(tuple(literals))  # final clause may omit the 0
    if len(clauses) != clause_count:
        raise ParseError(
            f"header promises {clause_count} clauses, found {len(clauses)}"
        )
    try:
        return CnfFormula(variable_count, tuple(clauses))
    except ValidationError as err:
        raise ParseError(str(err)) from None


def serialize_cnf(formula: CnfFormula, comment: str | None = None) -> str:
    lines = []
    if comment:
        for part in comment.splitlines():
            lines.append(f"c {part}")
    lines.append(f"p cnf {formula.variable_count} {formula.clause_count}")
    for clause in formula.clauses:
        lines.append(" ".join(str(l) for l in clause) + " 0")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# DOT export


def export_dot(
    document: InstanceDocument, labeling: Labeling | None = None
) -> str:
    """Static graph with schedule annotations, for eyeballing only."""
    graph = document.graph
    sources = document.sources
    lines = ["graph tmbcast {"]
    for v in range(graph.vertex_count):
        name = document.vertex_name(v)
        attrs = [f'label="{name}"']
        if v in sources:
            attrs.append("shape=doublecircle")
        if document.roles is not None:
            attrs.append(f'comment="{document.roles[v]}"')
        lines.append(f"  {v} [{', '.join(attrs)}];")
    for e, (u, v) in enumerate(graph.edges):
        notes = [
            f"({t},{w})" for t, w in document.traversal.overrides[e]
        ] or [f"w={document.traversal.defaults[e]}"]
        if labeling is not None and labeling.times(e):
            schedule = ",".join(str(t) for t in labeling.times(e))
            notes.insert(0, f"t={schedule}")
        lines.append(f'  {u} -- {v} [label="{" ".join(notes)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
