"""Command-line surface tying the library together.

Results go to stdout as one JSON document; diagnostics go to stderr.
Exit codes are part of the contract:

  0  success
  1  unexpected internal error
  2  usage error (bad flags or arguments)
  3  parse or validation error in an input file
  4  verification failed: infeasible labeling or multiplicity violation
  5  no tractable regime applies (and neither --approx nor --oracle given)
  6  brute-force search space exceeds the configured limit
  7  a required reachability precondition fails
  8  bad generator or witness input (parameters, formula shape, assignment)
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from tmbcast.core import (
    ContradictoryClause,
    Instance,
    InvalidParams,
    Labeling,
    MultiplicityTooSmall,
    MultiplicityViolation,
    NotATree,
    NotThreeSat,
    ParseError,
    ReachFastInstance,
    SameVertex,
    SearchSpaceTooLarge,
    TmbError,
    Unreachable,
    UnsatisfiedClause,
    ValidationError,
    WrongSourceCount,
    is_feasible,
)
from tmbcast.distances import Measure, distance, objective, path_stats
from tmbcast.fileformat import (
    InstanceDocument,
    export_dot,
    parse_cnf,
    parse_instance_document,
    parse_labeling,
    serialize_instance,
    serialize_labeling,
)
from tmbcast.reductions import (
    CnfFormula,
    GadgetParams,
    gadget_labeling_from_assignment,
    gen_single_source_gadget,
    gen_two_source_gadget,
    reachfast_to_tmb,
    tmb_to_reachfast,
    two_source_witness_labeling,
)
from tmbcast.solvers import (
    NoTractableRegime,
    OracleLimits,
    SolveStatus,
    approx_ft_mw,
    brute_force,
    pick_regime,
    solve_auto,
)

EXIT_CODES = (
    (ParseError, 3),
    (NoTractableRegime, 5),
    (SearchSpaceTooLarge, 6),
    (Unreachable, 7),
    (MultiplicityViolation, 4),
    (SameVertex, 3),
    (InvalidParams, 8),
    (NotThreeSat, 8),
    (ContradictoryClause, 8),
    (UnsatisfiedClause, 8),
    (WrongSourceCount, 8),
    (MultiplicityTooSmall, 8),
    (NotATree, 8),
    (ValidationError, 3),
    (TmbError, 1),
)


class _Exit(Exception):
    def __init__(self, code: int):
        self.code = code


def _fail(code: int, message: str):
    print(message, file=sys.stderr)
    raise _Exit(code)


def _emit(payload: dict):
    print(json.dumps(payload, sort_keys=True, indent=2))


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as err:
        _fail(3, f"cannot read {path}: {err}")


def _write(path: str, text: str):
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as err:
        _fail(3, f"cannot write {path}: {err}")


def _load_document(path: str) -> InstanceDocument:
    return parse_instance_document(_read(path))


def _load_tmb(path: str) -> tuple[InstanceDocument, Instance]:
    doc = _load_document(path)
    if doc.kind != "tmb":
        _fail(3, f"{path}: expected a tmb instance, found {doc.kind}")
    return doc, doc.to_instance()


def _load_labeling(path: str, instance) -> Labeling:
    doc = parse_labeling(_read(path))
    if doc.labels.edge_count != instance.graph.edge_count:
        _fail(3, f"{path}: labeling covers {doc.labels.edge_count} edges, "
                 f"instance has {instance.graph.edge_count}")
    return doc.labels


def _measure(code: str) -> Measure:
    return Measure.from_code(code)


def _labeling_provenance(result, measure: Measure) -> dict:
    return {
        "solver": result.regime,
        "measure": measure.code,
        "objective": result.objective,
        "status": result.status.value,
    }


def _steps_json(doc: InstanceDocument, witness) -> list:
    return [
        {
            "edge": e,
            "time": t,
            "from": doc.vertex_name(u),
            "to": doc.vertex_name(v),
        }
        for (e, t), u, v in zip(
            witness.steps, witness.vertices, witness.vertices[1:]
        )
    ]


# ---------------------------------------------------------------------------
# Subcommands


def cmd_solve(args) -> None:
    doc, instance = _load_tmb(args.input)
    measure = _measure(args.measure)
    result = None
    regime_error = None
    try:
        pick_regime(instance, measure)
        result = solve_auto(instance, measure)
    except NoTractableRegime as err:
        regime_error = err
    if result is None and args.approx:
        if measure in (Measure.FASTEST, Measure.MIN_WAIT):
            result = approx_ft_mw(instance, measure)
    if result is None and args.oracle:
        result = brute_force(instance, measure, _limits(args))
    if result is None:
        _fail(5, f"NoTractableRegime: {regime_error}")
    payload = {
        "command": "solve",
        "measure": measure.code,
        "regime": result.regime,
        "status": result.status.value,
        "objective": result.objective,
    }
    if result.bounds is not None:
        payload["bounds"] = {
            "ft_min": result.bounds.ft_min,
            "ft_max": result.bounds.ft_max,
            "mw_min": result.bounds.mw_min,
            "mw_max": result.bounds.mw_max,
        }
    if args.out:
        _write(
            args.out,
            serialize_labeling(result.labeling, _labeling_provenance(result, measure)),
        )
        payload["labeling_file"] = args.out
    _emit(payload)


def _limits(args) -> OracleLimits:
    kwargs = {}
    if getattr(args, "max_labelings", None) is not None:
        kwargs["max_labelings"] = args.max_labelings
    if getattr(args, "max_edges", None) is not None:
        kwargs["max_edges"] = args.max_edges
    if getattr(args, "max_tau", None) is not None:
        kwargs["max_tau"] = args.max_tau
    return OracleLimits(**kwargs)


def cmd_oracle(args) -> None:
    doc, instance = _load_tmb(args.input)
    measure = _measure(args.measure)
    result = brute_force(instance, measure, _limits(args))
    payload = {
        "command": "oracle",
        "measure": measure.code,
        "status": result.status.value,
        "objective": result.objective,
    }
    if args.out and result.status is not SolveStatus.INFEASIBLE:
        _write(
            args.out,
            serialize_labeling(result.labeling, _labeling_provenance(result, measure)),
        )
        payload["labeling_file"] = args.out
    _emit(payload)
    if result.status is SolveStatus.INFEASIBLE:
        raise _Exit(4)


def cmd_distance(args) -> None:
    doc, instance = _load_tmb(args.input)
    measure = _measure(args.measure)
    u = doc.vertex_id(getattr(args, "from"))
    v = doc.vertex_id(args.to)
    if args.labeling:
        availability = _load_labeling(args.labeling, instance)
    else:
        availability = instance.full_availability()
    result = distance(u, v, availability, instance, measure)
    payload = {
        "command": "distance",
        "measure": measure.code,
        "from": doc.vertex_name(u),
        "to": doc.vertex_name(v),
        "value": result.value,
    }
    if result.witness is not None:
        payload["witness"] = _steps_json(doc, result.witness)
    _emit(payload)


def cmd_verify(args) -> None:
    doc, instance = _load_tmb(args.input)
    measure = _measure(args.measure)
    labeling = _load_labeling(args.labeling, instance)
    feasible = is_feasible(instance, labeling)
    value = objective(instance, labeling, measure) if feasible else None
    _emit(
        {
            "command": "verify",
            "measure": measure.code,
            "feasible": feasible,
            "objective": value,
        }
    )
    if not feasible:
        raise _Exit(4)


def cmd_gen_sat(args) -> None:
    formula = parse_cnf(_read(args.cnf))
    params = GadgetParams(_measure(args.measure), args.a, args.b)
    gadget = gen_single_source_gadget(formula, params)
    _write(args.out, serialize_instance(InstanceDocument.from_gadget(gadget)))
    _emit(
        {
            "command": "gen-sat",
            "measure": args.measure,
            "a": args.a,
            "b": args.b,
            "yes_value": gadget.yes_value,
            "no_value_lower_bound": gadget.no_value_lower_bound,
            "vertices": gadget.instance.graph.vertex_count,
            "edges": gadget.instance.graph.edge_count,
            "tau": gadget.instance.tau,
            "instance_file": args.out,
        }
    )


def cmd_gen_twosource(args) -> None:
    formula = parse_cnf(_read(args.cnf))
    gadget = gen_two_source_gadget(formula, source_count=args.sources)
    _write(args.out, serialize_instance(InstanceDocument.from_gadget(gadget)))
    _emit(
        {
            "command": "gen-twosource",
            "sources": args.sources,
            "vertices": gadget.instance.graph.vertex_count,
            "edges": gadget.instance.graph.edge_count,
            "tau": gadget.instance.tau,
            "instance_file": args.out,
        }
    )


def cmd_convert(args) -> None:
    doc = _load_document(args.input)
    if args.to == "reachfast":
        if doc.kind != "tmb":
            _fail(3, "convert --to reachfast expects a tmb instance")
        model = tmb_to_reachfast(doc.to_instance())
    else:
        if doc.kind != "reachfast":
            _fail(3, "convert --to tmb expects a reachfast instance")
        model = reachfast_to_tmb(doc.to_reachfast())
    text = serialize_instance(
        model, names=doc.names, roles=doc.roles, meta=doc.meta
    )
    _write(args.out, text)
    _emit({"command": "convert", "to": args.to, "instance_file": args.out})


def _rebuild_gadget(doc: InstanceDocument):
    meta = doc.meta or {}
    kind = meta.get("kind")
    formula = CnfFormula(
        meta["variable_count"], tuple(tuple(c) for c in meta["cnf"])
    )
    if kind == "sat-gadget":
        params = GadgetParams(
            Measure.from_code(meta["measure"]), meta["a"], meta.get("b")
        )
        return formula, gen_single_source_gadget(formula, params)
    if kind == "twosource-gadget":
        return formula, gen_two_source_gadget(
            formula, source_count=meta["source_count"]
        )
    raise ValidationError("instance file does not carry gadget metadata")


def cmd_witness(args) -> None:
    doc = _load_document(args.input)
    formula_cli = parse_cnf(_read(args.cnf))
    formula_meta, gadget = _rebuild_gadget(doc)
    if formula_cli != formula_meta:
        _fail(3, "CNF file does not match the formula recorded in the gadget")
    rebuilt = serialize_instance(InstanceDocument.from_gadget(gadget))
    if rebuilt != serialize_instance(doc):
        _fail(3, "gadget file does not match its recorded generator inputs")
    bits = args.assignment
    if len(bits) != formula_cli.variable_count or any(c not in "01" for c in bits):
        _fail(
            8,
            f"assignment must be {formula_cli.variable_count} bits of 0/1, "
            f"got {bits!r}",
        )
    assignment = {i + 1: bits[i] == "1" for i in range(len(bits))}
    if gadget.meta["kind"] == "sat-gadget":
        labeling = gadget_labeling_from_assignment(gadget, assignment)
    else:
        labeling = two_source_witness_labeling(gadget, assignment)
    _write(
        args.out,
        serialize_labeling(
            labeling,
            {"solver": "witness", "assignment": bits, "kind": gadget.meta["kind"]},
        ),
    )
    _emit({"command": "witness", "labeling_file": args.out})


def cmd_export_dot(args) -> None:
    doc = _load_document(args.input)
    labeling = None
    if args.labeling:
        labeling = parse_labeling(_read(args.labeling)).labels
        if labeling.edge_count != doc.graph.edge_count:
            _fail(3, "labeling does not cover the instance's edges")
    _write(args.out, export_dot(doc, labeling))
    _emit({"command": "export-dot", "dot_file": args.out})


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tmbcast",
        description="Temporal multi-broadcast scheduling toolkit",
        epilog=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_measure(p, choices=("ea", "ld", "ft", "st", "mh", "mw")):
        p.add_argument("--measure", required=True, choices=choices)

    p = sub.add_parser("solve", help="dispatch to the applicable exact solver")
    add_measure(p)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.add_argument("--approx", action="store_true",
                   help="fall back to the ft/mw approximation (single source)")
    p.add_argument("--oracle", action="store_true",
                   help="fall back to brute force within limits")
    p.add_argument("--max-labelings", type=int)
    p.add_argument("--max-edges", type=int)
    p.add_argument("--max-tau", type=int)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="brute-force exact solve within limits")
    add_measure(p)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.add_argument("--max-labelings", type=int)
    p.add_argument("--max-edges", type=int)
    p.add_argument("--max-tau", type=int)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("distance", help="single-pair distance with witness")
    add_measure(p)
    p.add_argument("--from", required=True)
    p.add_argument("--to", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--labeling")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("verify", help="feasibility and objective of a labeling")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--labeling", required=True)
    add_measure(p)
    p.set_defaults(func=cmd_verify)

    gen = sub.add_parser("gen", help="hardness instance generators")
    gen_sub = gen.add_subparsers(dest="generator", required=True)

    p = gen_sub.add_parser("sat", help="single-source value gadget from CNF")
    add_measure(p, choices=("ft", "st", "mh", "mw"))
    p.add_argument("--cnf", required=True)
    p.add_argument("-a", type=int, required=True)
    p.add_argument("-b", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_sat)

    p = gen_sub.add_parser("twosource", help="two-source feasibility gadget")
    p.add_argument("--cnf", required=True)
    p.add_argument("--sources", type=int, default=2)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_twosource)

    p = sub.add_parser("convert", help="translate between formulations")
    p.add_argument("--to", required=True, choices=("reachfast", "tmb"))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("witness", help="labeling from a satisfying assignment")
    p.add_argument("--cnf", required=True)
    p.add_argument("--assignment", required=True,
                   help="bit string, leftmost bit is variable 1")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("export-dot", help="DOT rendering of the static graph")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--labeling")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_dot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except _Exit as stop:
        return stop.code
    except TmbError as err:
        for klass, code in EXIT_CODES:
            if isinstance(err, klass):
                print(f"{type(err).__name__}: {err}", file=sys.stderr)
                return code
        print(f"{type(err).__name__}: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
