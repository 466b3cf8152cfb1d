"""Exact solvers for the tractable regimes, the FT/MW approximation, and the
brute-force oracle.

Tractable regimes (earliest-arrival and latest-departure objectives only):

* one source: the measure's spanning out-tree on the full temporal graph is
  optimal outright;
* any number of sources when every multiplicity is at least the source
  count: each edge inherits the label it gets in any of the per-source
  trees;
* trees with every multiplicity at least two: per-source solutions merged
  edge by edge, keeping the latest label per traversal direction.

The brute-force oracle enumerates, per edge, every subset of the horizon of
size exactly ``min(mu, tau)``: extra labels only ever help, so maximal label
sets dominate and nothing smaller needs to be tried.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from enum import Enum

from tmbcast.core import (
    Instance,
    Labeling,
    MultiplicityTooSmall,
    NotATree,
    SearchSpaceTooLarge,
    StaticGraph,
    TmbError,
    TraversalSpec,
    Unreachable,
    ValidationError,
    WrongSourceCount,
    is_feasible,
    reaches_all,
)
from tmbcast.distances import (
    Bounds,
    DistanceResult,
    Measure,
    ft_mw_bounds,
    objective,
    sssp,
)
from tmbcast.tsot import build_ea_tsot, build_ld_tsot


class NoTractableRegime(TmbError):
    """No polynomial-time regime applies to the given instance and measure."""


class SolveStatus(Enum):
    OPTIMAL = "optimal"
    APPROXIMATE = "approximate"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class SolveResult:
    labeling: Labeling
    objective: int | None
    per_source_distances: dict[tuple[int, int], DistanceResult]
    status: SolveStatus
    regime: str | None = None
    bounds: Bounds | None = None


@dataclass(frozen=True)
class OracleLimits:
    max_edges: int = 16
    max_tau: int = 10
    max_labelings: int = 500_000


_EXACT_MEASURES = (Measure.EARLIEST_ARRIVAL, Measure.LATEST_DEPARTURE)


def _require_measure(measure: Measure, allowed, what: str) -> None:
    if measure not in allowed:
        codes = "/".join(m.code for m in allowed)
        raise ValidationError(f"{what} supports only {codes}, not {measure.code}")


def _per_source_distances(
    instance: Instance, labeling: Labeling, measure: Measure
) -> dict[tuple[int, int], DistanceResult]:
    out: dict[tuple[int, int], DistanceResult] = {}
    for s in sorted(instance.sources):
        vec = sssp(s, labeling, instance, measure)
        for v in range(instance.graph.vertex_count):
            if v != s:
                out[(s, v)] = vec[v]
    return out


def _check_full_reachability(instance: Instance) -> None:
    avail = instance.full_availability()
    for s in sorted(instance.sources):
        if not reaches_all(instance.graph, avail, instance.traversal, s):
            raise Unreachable(
                f"source {s} cannot reach every vertex even in the full graph"
            )


def _finish(instance, labeling, measure, regime, status=SolveStatus.OPTIMAL, bounds=None):
    return SolveResult(
        labeling=labeling,
        objective=objective(instance, labeling, measure),
        per_source_distances=_per_source_distances(instance, labeling, measure),
        status=status,
        regime=regime,
        bounds=bounds,
    )


def solve_single_source(instance: Instance, measure: Measure) -> SolveResult:
    """Optimal schedule for one source under EA or LD."""
    _require_measure(measure, _EXACT_MEASURES, "solve_single_source")
    if len(instance.sources) != 1:
        raise WrongSourceCount(
            f"single-source solver got {len(instance.sources)} sources"
        )
    (s,) = instance.sources
    _check_full_reachability(instance)
    if measure is Measure.EARLIEST_ARRIVAL:
        tree = build_ea_tsot(s, instance)
    else:
        tree = build_ld_tsot(s, instance)
    labeling = tree.to_labeling(instance.graph.edge_count)
    return _finish(instance, labeling, measure, regime="single-source")


def solve_multi_full_mu(instance: Instance, measure: Measure) -> SolveResult:
    """Optimal multi-source schedule when every multiplicity is >= |S|."""
    _require_measure(measure, _EXACT_MEASURES, "solve_multi_full_mu")
    k = len(instance.sources)
    for e, mu in enumerate(instance.multiplicity):
        if mu < k:
            raise MultiplicityTooSmall(
                f"edge {e} has multiplicity {mu} < source count {k}"
            )
    _check_full_reachability(instance)
    build = (
        build_ea_tsot if measure is Measure.EARLIEST_ARRIVAL else build_ld_tsot
    )
    labeling = Labeling.empty(instance.graph.edge_count)
    for s in sorted(instance.sources):
        tree = build(s, instance)
        labeling = labeling.union(tree.to_labeling(instance.graph.edge_count))
    return _finish(instance, labeling, measure, regime="multi-source-full-mu")


def tree_mu_diagnostic(instance: Instance) -> bool:
    """Weaker tree condition: multiplicity >= 2 on every source-to-source path.

    Advisory only; the tree solver itself insists on >= 2 everywhere.
    """
    graph = instance.graph
    if not graph.is_tree():
        raise NotATree("diagnostic applies to trees only")
    # Root the tree at 0; an edge lies on a source-to-source path iff both
    # sides of the split contain a source.
    parent: dict[int, tuple[int, int]] = {0: (-1, -1)}
    order = [0]
    stack = [0]
    while stack:
        v = stack.pop()
        for e, w in graph.incident(v):
            if w not in parent:
                parent[w] = (v, e)
                order.append(w)
                stack.append(w)
    below = [0] * graph.vertex_count
    for v in reversed(order):
        if v in instance.sources:
            below[v] += 1
        p, _ = parent[v]
        if p >= 0:
            below[p] += below[v]
    total = len(instance.sources)
    for v in order:
        p, e = parent[v]
        if p < 0:
            continue
        if below[v] >= 1 and total - below[v] >= 1:
            if instance.multiplicity[e] < 2:
                return False
    return True


def solve_tree(instance: Instance, measure: Measure) -> SolveResult:
    """Optimal multi-source schedule on trees with multiplicities >= 2.

    Per-source optimal schedules are merged per edge: sources on each side
    of the edge share one slot, and the slot keeps their latest label.
    """
    _require_measure(measure, _EXACT_MEASURES, "solve_tree")
    graph = instance.graph
    if not graph.is_tree():
        raise NotATree("solve_tree needs the underlying graph to be a tree")
    for e, mu in enumerate(instance.multiplicity):
        if mu < 2:
            raise MultiplicityTooSmall(f"edge {e} has multiplicity {mu} < 2")
    _check_full_reachability(instance)

    build = (
        build_ea_tsot if measure is Measure.EARLIEST_ARRIVAL else build_ld_tsot
    )
    sources = sorted(instance.sources)
    per_source_label: dict[int, Labeling] = {}
    for s in sources:
        tree = build(s, instance)
        per_source_label[s] = tree.to_labeling(graph.edge_count)

    # A source traverses edge {u, v} in direction u -> v exactly when it
    # lies on the u side of the split T - e.  Comparing the source's
    # distances to u and to v classifies the same way, except that
    # zero-weight edges can tie the two distances and mis-bucket the
    # source, so the split itself is used.
    def side_of(e: int) -> set[int]:
        u, _v = graph.endpoints(e)
        seen = {u}
        stack = [u]
        while stack:
            x = stack.pop()
            for f, y in graph.incident(x):
                if f == e or y in seen:
                    continue
                seen.add(y)
                stack.append(y)
        return seen

    table: list[tuple[int, ...]] = []
    for e in range(graph.edge_count):
        u_side = side_of(e)
        t1 = 0
        t2 = 0
        for s in sources:
            label = per_source_label[s].times(e)[0]
            if s in u_side:
                t1 = max(t1, label)
            else:
                t2 = max(t2, label)
        table.append(tuple(sorted({t for t in (t1, t2) if t > 0})))
    labeling = Labeling(tuple(table))
    return _finish(instance, labeling, measure, regime="tree")


def approx_ft_mw(instance: Instance, measure: Measure) -> SolveResult:
    """Feasible single-source schedule with a duration/waiting certificate.

    Returns the latest-departure tree of the full temporal graph; its
    objective is at most the reported ft_max (resp. mw_max) while no schedule
    can beat ft_min (resp. mw_min).
    """
    _require_measure(
        measure, (Measure.FASTEST, Measure.MIN_WAIT), "approx_ft_mw"
    )
    if len(instance.sources) != 1:
        raise WrongSourceCount(
            f"approximation needs one source, got {len(instance.sources)}"
        )
    (s,) = instance.sources
    bounds = ft_mw_bounds(s, instance)  # raises Unreachable when hopeless
    tree = build_ld_tsot(s, instance)
    labeling = tree.to_labeling(instance.graph.edge_count)
    return _finish(
        instance,
        labeling,
        measure,
        regime="approx-ld-tree",
        status=SolveStatus.APPROXIMATE,
        bounds=bounds,
    )


def add_super_source(instance: Instance) -> Instance:
    """Single-source relaxation: a fresh source wired to every original one.

    The new vertex connects to each original source by an edge with zero
    traversal weight at every time and multiplicity tau, so scheduling from
    the new source models "some source covers each vertex".
    """
    if len(instance.sources) < 2:
        raise WrongSourceCount("super-source relaxation needs at least 2 sources")
    n = instance.graph.vertex_count
    star = n
    new_edges = list(instance.graph.edges)
    defaults = list(instance.traversal.defaults)
    overrides = list(instance.traversal.overrides)
    multiplicity = list(instance.multiplicity)
    for s in sorted(instance.sources):
        new_edges.append((s, star))
        defaults.append(0)
        overrides.append(())
        multiplicity.append(instance.tau)
    return Instance(
        graph=StaticGraph(n + 1, tuple(new_edges)),
        sources=frozenset({star}),
        traversal=TraversalSpec(tuple(defaults), tuple(overrides)),
        multiplicity=tuple(multiplicity),
        tau=instance.tau,
    )


# ---------------------------------------------------------------------------
# Brute force


def search_space_size(instance: Instance) -> int:
    total = 1
    for e in range(instance.graph.edge_count):
        total *= math.comb(
            instance.tau, min(instance.multiplicity[e], instance.tau)
        )
    return total


def _fast_reaches_all(graph, trav, label_table, source) -> bool:
    """Reachability over raw per-edge label tuples (hot path of the oracle)."""
    n = graph.vertex_count
    override_index = trav._override_index
    defaults = trav.defaults
    arrivals = [None] * n
    arrivals[source] = 1
    heap = [(1, source)]
    settled = 0
    done = [False] * n
    while heap:
        arr, v = heapq.heappop(heap)
        if done[v]:
            continue
        done[v] = True
        settled += 1
        if settled == n:
            return True
        for e, w in graph.incident(v):
            if done[w]:
                continue
            per_edge = override_index[e]
            default = defaults[e]
            best = None
            saw_default = False
            for t in label_table[e]:
                if t < arr:
                    continue
                wt = per_edge.get(t)
                if wt is None:
                    if saw_default:
                        continue
                    saw_default = True
                    wt = default
                cand = t + wt
                if best is None or cand < best:
                    best = cand
            if best is not None and (arrivals[w] is None or best < arrivals[w]):
                arrivals[w] = best
                heapq.heappush(heap, (best, w))
    return settled == n


def brute_force(
    instance: Instance,
    measure: Measure,
    limits: OracleLimits | None = None,
) -> SolveResult:
    """Exhaustive exact solve over maximal label sets.

    Enumerates, per edge, all subsets of the horizon of size exactly
    ``min(mu, tau)`` in lexicographic order, keeps feasible labelings, and
    returns the objective-optimal one (the lexicographically smallest among
    ties).  Raises SearchSpaceTooLarge before enumerating anything when the
    cross product exceeds the limits.
    """
    limits = limits or OracleLimits()
    cardinality = search_space_size(instance)
    if (
        cardinality > limits.max_labelings
        or instance.graph.edge_count > limits.max_edges
        or instance.tau > limits.max_tau
    ):
        raise SearchSpaceTooLarge(cardinality, limits.max_labelings)

    graph = instance.graph
    trav = instance.traversal
    sources = sorted(instance.sources)
    horizon = range(1, instance.tau + 1)
    per_edge = [
        [tuple(c) for c in itertools.combinations(horizon, min(mu, instance.tau))]
        for mu in instance.multiplicity
    ]

    best_value: int | None = None
    best_table: tuple | None = None
    for table in itertools.product(*per_edge):
        if not all(
            _fast_reaches_all(graph, trav, table, s) for s in sources
        ):
            continue
        labeling = Labeling(table)
        value = objective(instance, labeling, measure)
        if value is None:
            continue
        if best_value is None or measure.better(value, best_value):
            best_value = value
            best_table = table

    if best_value is None:
        return SolveResult(
            labeling=Labeling.empty(graph.edge_count),
            objective=None,
            per_source_distances={},
            status=SolveStatus.INFEASIBLE,
            regime="oracle",
        )
    labeling = Labeling(best_table)
    return SolveResult(
        labeling=labeling,
        objective=best_value,
        per_source_distances=_per_source_distances(instance, labeling, measure),
        status=SolveStatus.OPTIMAL,
        regime="oracle",
    )


def pick_regime(instance: Instance, measure: Measure) -> str:
    """Name the exact tractable regime for this instance, if any."""
    if measure in _EXACT_MEASURES:
        if len(instance.sources) == 1:
            return "single-source"
        if all(mu >= len(instance.sources) for mu in instance.multiplicity):
            return "multi-source-full-mu"
        if instance.graph.is_tree() and all(
            mu >= 2 for mu in instance.multiplicity
        ):
            return "tree"
    raise NoTractableRegime(
        f"no exact polynomial regime for measure {measure.code} on this instance"
    )


def solve_auto(instance: Instance, measure: Measure) -> SolveResult:
    """Dispatch to the applicable exact solver (see pick_regime)."""
    regime = pick_regime(instance, measure)
    if regime == "single-source":
        return solve_single_source(instance, measure)
    if regime == "multi-source-full-mu":
        return solve_multi_full_mu(instance, measure)
    return solve_tree(instance, measure)
