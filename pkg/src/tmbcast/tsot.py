"""Temporal spanning out-trees: one label per tree edge, root reaches all.

Two constructions:

* the earliest-arrival tree records, for every vertex, the temporal in-edge
  that first achieved its final earliest arrival, so the tree realizes every
  earliest-arrival distance of the input availability;
* the latest-departure tree admits vertices in nondecreasing order of their
  latest-departure value and merges their witness paths edge by edge (add a
  new vertex's in-edge; keep the existing in-edge when the new arrival is
  not earlier; otherwise swap it), which guarantees every tree distance is
  at least the worst latest departure of the input graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from tmbcast.core import (
    Availability,
    Instance,
    Labeling,
    ReachFastInstance,
    StaticGraph,
    TemporalPath,
    TraversalSpec,
    Unreachable,
    ValidationError,
)
from tmbcast.distances import _sssp_ea, _sssp_ld


@dataclass(frozen=True)
class Tsot:
    """A spanning tree whose edges each carry exactly one time label.

    ``parent[v]`` is ``(edge id, time, parent vertex)`` for every vertex
    except the root, which maps to None.  The root temporally reaches every
    vertex along its unique tree path.
    """

    root: int
    parent: tuple[tuple[int, int, int] | None, ...]
    traversal: TraversalSpec

    def tree_edges(self) -> dict[int, int]:
        """edge id -> scheduled time, one entry per tree edge."""
        out: dict[int, int] = {}
        for entry in self.parent:
            if entry is not None:
                e, t, _ = entry
                if e in out:
                    raise ValidationError(f"edge {e} used twice in tree")
                out[e] = t
        return out

    def to_labeling(self, edge_count: int) -> Labeling:
        table: list[tuple[int, ...]] = [() for _ in range(edge_count)]
        for e, t in self.tree_edges().items():
            table[e] = (t,)
        return Labeling(tuple(table))

    def tree_path(self, v: int) -> TemporalPath:
        if v == self.root:
            raise ValidationError("no tree path from the root to itself")
        steps = []
        vertices = [v]
        while v != self.root:
            entry = self.parent[v]
            if entry is None:
                raise ValidationError(f"vertex {v} detached from the tree")
            e, t, u = entry
            steps.append((e, t))
            vertices.append(u)
            v = u
        steps.reverse()
        vertices.reverse()
        return TemporalPath(tuple(vertices), tuple(steps))

    def arrival(self, v: int) -> int | None:
        """Arrival time of the tree path at v (None for the root)."""
        if v == self.root:
            return None
        e, t, _ = self.parent[v]
        return t + self.traversal.weight(e, t)

    def is_valid(self, graph: StaticGraph) -> bool:
        """Spanning tree, one label per edge, time-respecting from the root."""
        n = graph.vertex_count
        if len(self.parent) != n or self.parent[self.root] is not None:
            return False
        if sum(1 for p in self.parent if p is not None) != n - 1:
            return False
        try:
            self.tree_edges()
        except ValidationError:
            return False
        for v in range(n):
            if v == self.root:
                continue
            entry = self.parent[v]
            if entry is None:
                return False
            e, t, u = entry
            if {u, v} != set(graph.endpoints(e)):
                return False
            # climb to the root, checking departures against arrivals
            seen = {v}
            cur = v
            while cur != self.root:
                ent = self.parent[cur]
                if ent is None:
                    return False
                e, t, u = ent
                up = self.parent[u]
                if up is not None:
                    ue, ut, _ = up
                    if ut + self.traversal.weight(ue, ut) > t:
                        return False
                cur = u
                if cur in seen:
                    return False
                seen.add(cur)
        return True


def _resolve(source_of_labels: Union[Instance, ReachFastInstance], availability):
    if availability is not None:
        return source_of_labels.graph, source_of_labels.traversal, availability
    if isinstance(source_of_labels, ReachFastInstance):
        return source_of_labels.graph, source_of_labels.traversal, source_of_labels.labels
    return (
        source_of_labels.graph,
        source_of_labels.traversal,
        source_of_labels.full_availability(),
    )


def build_ea_tsot(
    root: int,
    instance: Union[Instance, ReachFastInstance],
    availability: Availability | None = None,
) -> Tsot:
    """Tree realizing every earliest-arrival distance of the availability.

    Defaults to the full temporal graph for plain instances and to the given
    labels for the shifting formulation.  Raises Unreachable when the root
    cannot reach some vertex.
    """
    graph, trav, avail = _resolve(instance, availability)
    results = _sssp_ea(graph, avail, trav, root)
    parent: list[tuple[int, int, int] | None] = [None] * graph.vertex_count
    for v in range(graph.vertex_count):
        if v == root:
            continue
        if results[v].value is None:
            raise Unreachable(f"root {root} cannot reach vertex {v}")
        path = results[v].witness
        e, t = path.steps[-1]
        parent[v] = (e, t, path.vertices[-2])
    return Tsot(root, tuple(parent), trav)


def build_ld_tsot(
    root: int,
    instance: Union[Instance, ReachFastInstance],
    availability: Availability | None = None,
) -> Tsot:
    """Tree whose every latest departure is at least the graph's worst one."""
    graph, trav, avail = _resolve(instance, availability)
    results = _sssp_ld(graph, avail, trav, root)
    for v in range(graph.vertex_count):
        if v != root and results[v].value is None:
            raise Unreachable(f"root {root} cannot reach vertex {v}")

    parent: dict[int, tuple[int, int, int] | None] = {root: None}

    def is_ancestor(candidate: int, below: int) -> bool:
        cur = below
        while cur != root:
            if cur == candidate:
                return True
            cur = parent[cur][2]
        return candidate == root

    order = sorted(
        (v for v in range(graph.vertex_count) if v != root),
        key=lambda v: (results[v].value, v),
    )
    for u in order:
        if u in parent:
            continue
        path = results[u].witness
        tree_edges = {entry[0] for entry in parent.values() if entry is not None}
        for (e, t), tail, head in zip(path.steps, path.vertices, path.vertices[1:]):
            if head not in parent:
                parent[head] = (e, t, tail)
                tree_edges.add(e)
                continue
            if head == root:
                continue
            f, tf, _ = parent[head]
            if t + trav.weight(e, t) >= tf + trav.weight(f, tf):
                continue
            # Swapping in an edge already in the tree, or hanging a vertex
            # below its own descendant, would break the tree; the witness
            # paths produced by the latest-departure search never ask for
            # either, but guard anyway.
            if e in tree_edges or is_ancestor(head, tail):
                continue
            tree_edges.discard(f)
            tree_edges.add(e)
            parent[head] = (e, t, tail)
    return Tsot(
        root,
        tuple(parent.get(v) for v in range(graph.vertex_count)),
        trav,
    )
