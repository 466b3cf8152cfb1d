"""Static and temporal graph model: instances, labelings, paths, feasibility.

The model is deliberately integer-only.  A problem instance couples an
undirected simple graph with a traversal function ``tr(e, t)`` (how long edge
``e`` takes when entered at time ``t``), a per-edge multiplicity bound on how
many time labels may be scheduled, a set of source vertices, and a time
horizon ``tau``.  A labeling assigns each edge a (possibly empty) set of
times in ``1..tau``; a temporal path traverses distinct edges of a simple
static path at scheduled times ``t_1, ..., t_k`` with
``t_j + tr(e_j, t_j) <= t_{j+1}``.

All types are immutable after construction and every operation is a pure
function of its inputs, so everything here is safe to share across threads.
"""

from __future__ import annotations

import heapq
from bisect import bisect_left
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence, Union


class TmbError(Exception):
    """Base class for all library errors."""


class ValidationError(TmbError):
    """A structural invariant of a model object is violated."""


class ParseError(TmbError):
    """A document or DIMACS input could not be parsed."""


class InvalidPath(TmbError):
    """A temporal path violates the time-respecting condition."""


class MultiplicityViolation(TmbError):
    """A labeling schedules more labels on an edge than its multiplicity."""


class SameVertex(TmbError):
    """Distances are defined between distinct vertices only."""


class Unreachable(TmbError):
    """A required vertex cannot be temporally reached."""


class WrongSourceCount(TmbError):
    """A solver requires a specific number of sources."""


class MultiplicityTooSmall(TmbError):
    """A solver requires larger per-edge multiplicities."""


class NotATree(TmbError):
    """A solver requires the underlying graph to be a tree."""


class SearchSpaceTooLarge(TmbError):
    """The brute-force labeling space exceeds the configured limit."""

    def __init__(self, cardinality: int, limit: int):
        super().__init__(
            f"brute-force search space has {cardinality} labelings "
            f"(limit {limit})"
        )
        self.cardinality = cardinality
        self.limit = limit


class InvalidParams(TmbError):
    """Gadget parameters outside their valid range."""


class UnsatisfiedClause(TmbError):
    """An assignment offered as a witness does not satisfy the formula."""


class NotThreeSat(TmbError):
    """A generator requires clauses of exactly three literals."""


class ContradictoryClause(TmbError):
    """A clause contains both a variable and its negation."""


Edge = int
Vertex = int
Time = int


@dataclass(frozen=True)
class StaticGraph:
    """Finite, loopless, simple undirected graph with dense integer edge ids.

    ``edges[i]`` is the unordered endpoint pair of edge ``i``, stored with the
    smaller endpoint first.  Edge ids are stable: they index every per-edge
    array elsewhere in the library (traversal defaults, multiplicities,
    label sets).
    """

    vertex_count: int
    edges: tuple[tuple[Vertex, Vertex], ...]

    def __post_init__(self):
        if self.vertex_count < 1:
            raise ValidationError("graph needs at least one vertex")
        normalized = []
        seen = set()
        for e, pair in enumerate(self.edges):
            u, v = pair
            if u == v:
                raise ValidationError(f"edge {e} is a self-loop at {u}")
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise ValidationError(f"edge {e} endpoint out of range: {pair}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValidationError(f"duplicate edge {key}")
            seen.add(key)
            normalized.append(key)
        object.__setattr__(self, "edges", tuple(normalized))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[Edge, Vertex], ...], ...]:
        """Per-vertex tuple of (incident edge id, other endpoint)."""
        adj: list[list[tuple[Edge, Vertex]]] = [[] for _ in range(self.vertex_count)]
        for e, (u, v) in enumerate(self.edges):
            adj[u].append((e, v))
            adj[v].append((e, u))
        return tuple(tuple(entries) for entries in adj)

    def endpoints(self, e: Edge) -> tuple[Vertex, Vertex]:
        return self.edges[e]

    def other_endpoint(self, e: Edge, v: Vertex) -> Vertex:
        u, w = self.edges[e]
        if v == u:
            return w
        if v == w:
            return u
        raise ValidationError(f"vertex {v} is not an endpoint of edge {e}")

    def incident(self, v: Vertex) -> tuple[tuple[Edge, Vertex], ...]:
        return self.adjacency[v]

    def edge_id(self, u: Vertex, v: Vertex) -> Edge:
        """Edge id of {u, v}; raises ValidationError if absent."""
        key = (min(u, v), max(u, v))
        for e, other in self.adjacency[u]:
            if other == v:
                return e
        raise ValidationError(f"no edge {key}")

    def has_edge(self, u: Vertex, v: Vertex) -> bool:
        return any(other == v for _, other in self.adjacency[u])

    def is_connected(self) -> bool:
        if self.vertex_count == 1:
            return True
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for _, w in self.adjacency[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.vertex_count

    def is_tree(self) -> bool:
        return self.edge_count == self.vertex_count - 1 and self.is_connected()


@dataclass(frozen=True)
class TraversalSpec:
    """Sparse encoding of the traversal function ``tr: E x [tau] -> N0``.

    Each edge has a default weight that applies at every time, except at the
    explicitly listed override times.  ``overrides[e]`` is a sorted tuple of
    ``(time, weight)`` pairs.  Keeping the table sparse lets instances carry
    horizons (and sentinel default weights) far larger than the number of
    meaningful departure times.
    """

    defaults: tuple[int, ...]
    overrides: tuple[tuple[tuple[Time, int], ...], ...]

    def __post_init__(self):
        if len(self.defaults) != len(self.overrides):
            raise ValidationError("defaults and overrides must cover the same edges")
        norm = []
        for e, (default, items) in enumerate(zip(self.defaults, self.overrides)):
            if default < 0:
                raise ValidationError(f"edge {e} default weight is negative")
            pairs = sorted((int(t), int(w)) for t, w in items)
            times = [t for t, _ in pairs]
            if len(set(times)) != len(times):
                raise ValidationError(f"edge {e} has duplicate override times")
            for t, w in pairs:
                if t < 1:
                    raise ValidationError(f"edge {e} override at time {t} < 1")
                if w < 0:
                    raise ValidationError(f"edge {e} override weight negative at {t}")
            norm.append(tuple(pairs))
        object.__setattr__(self, "overrides", tuple(norm))
        object.__setattr__(self, "defaults", tuple(int(d) for d in self.defaults))

    @classmethod
    def uniform(cls, edge_count: int, weight: int) -> "TraversalSpec":
        return cls((weight,) * edge_count, ((),) * edge_count)

    @classmethod
    def from_maps(
        cls,
        defaults: Sequence[int],
        overrides: Mapping[Edge, Mapping[Time, int]] | None = None,
    ) -> "TraversalSpec":
        table: list[tuple[tuple[Time, int], ...]] = [() for _ in defaults]
        for e, per_edge in (overrides or {}).items():
            table[e] = tuple(sorted(per_edge.items()))
        return cls(tuple(defaults), tuple(table))

    @cached_property
    def _override_index(self) -> tuple[dict[Time, int], ...]:
        return tuple(dict(items) for items in self.overrides)

    @cached_property
    def override_times(self) -> tuple[tuple[Time, ...], ...]:
        return tuple(tuple(t for t, _ in items) for items in self.overrides)

    def weight(self, e: Edge, t: Time) -> int:
        """Evaluated traversal weight ``tr(e, t)``."""
        return self._override_index[e].get(t, self.defaults[e])

    def max_override_time(self) -> int:
        best = 0
        for items in self.overrides:
            if items:
                best = max(best, items[-1][0])
        return best


def _check_times(label_sets: Iterable[Iterable[Time]], tau: int, what: str) -> None:
    for e, times in enumerate(label_sets):
        for t in times:
            if not (1 <= t <= tau):
                raise ValidationError(f"{what} on edge {e}: time {t} outside 1..{tau}")


@dataclass(frozen=True)
class Labeling:
    """Per-edge sorted, duplicate-free sets of scheduled times.

    Empty sets are allowed: an edge may be left unscheduled.
    """

    times_by_edge: tuple[tuple[Time, ...], ...]

    def __post_init__(self):
        norm = []
        for e, times in enumerate(self.times_by_edge):
            ts = tuple(sorted(set(int(t) for t in times)))
            if len(ts) != len(tuple(times)):
                raise ValidationError(f"edge {e} labels not sorted/duplicate-free")
            if any(t < 1 for t in ts):
                raise ValidationError(f"edge {e} has a label < 1")
            norm.append(ts)
        object.__setattr__(self, "times_by_edge", tuple(norm))

    @classmethod
    def empty(cls, edge_count: int) -> "Labeling":
        return cls(((),) * edge_count)

    @classmethod
    def from_dict(cls, edge_count: int, by_edge: Mapping[Edge, Iterable[Time]]) -> "Labeling":
        table: list[tuple[Time, ...]] = [() for _ in range(edge_count)]
        for e, times in by_edge.items():
            table[e] = tuple(sorted(set(times)))
        return cls(tuple(table))

    @property
    def edge_count(self) -> int:
        return len(self.times_by_edge)

    def times(self, e: Edge) -> tuple[Time, ...]:
        return self.times_by_edge[e]

    def available(self, e: Edge, t: Time) -> bool:
        times = self.times_by_edge[e]
        i = bisect_left(times, t)
        return i < len(times) and times[i] == t

    def label_count(self) -> int:
        return sum(len(ts) for ts in self.times_by_edge)

    def respects_multiplicity(self, instance: "Instance") -> bool:
        return all(
            len(self.times_by_edge[e]) <= instance.multiplicity[e]
            for e in range(len(self.times_by_edge))
        )

    def union(self, other: "Labeling") -> "Labeling":
        if self.edge_count != other.edge_count:
            raise ValidationError("labelings cover different edge sets")
        return Labeling(
            tuple(
                tuple(sorted(set(a) | set(b)))
                for a, b in zip(self.times_by_edge, other.times_by_edge)
            )
        )


@dataclass(frozen=True)
class FullAvailability:
    """Marker for the full temporal graph: every edge available at 1..tau.

    Distance operations interpret this without ever materializing the
    ``tau * m`` label table.
    """

    tau: int

    def available(self, e: Edge, t: Time) -> bool:
        return 1 <= t <= self.tau

    def times(self, e: Edge) -> range:
        return range(1, self.tau + 1)


Availability = Union[Labeling, FullAvailability]


@dataclass(frozen=True)
class Instance:
    """A broadcast-scheduling instance: graph, sources, traversal, bounds.

    ``multiplicity[e]`` bounds how many labels a feasible labeling may put on
    edge ``e``;  ``tau`` is the scheduling horizon (labels live in 1..tau).
    """

    graph: StaticGraph
    sources: frozenset[Vertex]
    traversal: TraversalSpec
    multiplicity: tuple[int, ...]
    tau: int

    def __post_init__(self):
        object.__setattr__(self, "sources", frozenset(self.sources))
        object.__setattr__(self, "multiplicity", tuple(int(m) for m in self.multiplicity))
        if self.tau < 1:
            raise ValidationError("tau must be positive")
        if not self.sources:
            raise ValidationError("instance needs at least one source")
        for s in self.sources:
            if not (0 <= s < self.graph.vertex_count):
                raise ValidationError(f"source {s} out of range")
        if len(self.multiplicity) != self.graph.edge_count:
            raise ValidationError("multiplicity must cover every edge")
        for e, mu in enumerate(self.multiplicity):
            if not (1 <= mu <= self.tau):
                raise ValidationError(f"multiplicity of edge {e} outside 1..tau")
        if len(self.traversal.defaults) != self.graph.edge_count:
            raise ValidationError("traversal must cover every edge")
        for e, items in enumerate(self.traversal.overrides):
            for t, _ in items:
                if t > self.tau:
                    raise ValidationError(f"override time {t} on edge {e} beyond tau")

    def full_availability(self) -> FullAvailability:
        return FullAvailability(self.tau)


@dataclass(frozen=True)
class ReachFastInstance:
    """The shifting formulation: a concrete labeling instead of multiplicities."""

    graph: StaticGraph
    sources: frozenset[Vertex]
    traversal: TraversalSpec
    labels: Labeling
    tau: int

    def __post_init__(self):
        object.__setattr__(self, "sources", frozenset(self.sources))
        if self.tau < 1:
            raise ValidationError("tau must be positive")
        if not self.sources:
            raise ValidationError("instance needs at least one source")
        for s in self.sources:
            if not (0 <= s < self.graph.vertex_count):
                raise ValidationError(f"source {s} out of range")
        if self.labels.edge_count != self.graph.edge_count:
            raise ValidationError("labels must cover every edge")
        _check_times(self.labels.times_by_edge, self.tau, "label")
        if len(self.traversal.defaults) != self.graph.edge_count:
            raise ValidationError("traversal must cover every edge")


def full_temporal_graph(instance: Instance) -> FullAvailability:
    """Availability marker where every edge is usable at every time in 1..tau."""
    return instance.full_availability()


@dataclass(frozen=True)
class TemporalPath:
    """A time-respecting traversal of a simple static path.

    ``vertices`` is the full vertex sequence (length ``len(steps) + 1``), so
    the traversal direction of each undirected edge is unambiguous.
    """

    vertices: tuple[Vertex, ...]
    steps: tuple[tuple[Edge, Time], ...]

    def __post_init__(self):
        if not self.steps:
            raise ValidationError("a temporal path has at least one step")
        if len(self.vertices) != len(self.steps) + 1:
            raise ValidationError("vertex sequence must have one more entry than steps")

    @property
    def endpoints(self) -> tuple[Vertex, Vertex]:
        return (self.vertices[0], self.vertices[-1])

    @classmethod
    def from_steps(
        cls, graph: StaticGraph, start: Vertex, steps: Sequence[tuple[Edge, Time]]
    ) -> "TemporalPath":
        """Resolve the vertex sequence by walking the steps from ``start``."""
        vertices = [start]
        for e, _ in steps:
            vertices.append(graph.other_endpoint(e, vertices[-1]))
        return cls(tuple(vertices), tuple((int(e), int(t)) for e, t in steps))


@dataclass(frozen=True)
class PathStats:
    departure: int
    arrival: int
    duration: int
    travel: int
    waiting: int
    hops: int


def path_stats(path: TemporalPath, traversal: TraversalSpec) -> PathStats:
    """Departure/arrival/duration/travel/waiting/hops of a temporal path.

    Raises InvalidPath if the steps are not time-respecting, i.e. some step
    departs before the previous one arrives.
    """
    departure = path.steps[0][1]
    arrival = departure
    travel = 0
    waiting = 0
    first = True
    for e, t in path.steps:
        if not first:
            if t < arrival:
                raise InvalidPath(
                    f"step on edge {e} departs at {t} before arrival {arrival}"
                )
            waiting += t - arrival
        first = False
        w = traversal.weight(e, t)
        travel += w
        arrival = t + w
    return PathStats(
        departure=departure,
        arrival=arrival,
        duration=arrival - departure,
        travel=travel,
        waiting=waiting,
        hops=len(path.steps),
    )


def validate_path(
    path: TemporalPath,
    availability: Availability,
    traversal: TraversalSpec,
    graph: StaticGraph,
) -> bool:
    """True iff the path is simple, scheduled, and time-respecting.

    Checks that the underlying edges form a simple static path between the
    endpoints, that every departure time is available on its edge, and that
    consecutive steps satisfy ``t_j + tr(e_j, t_j) <= t_{j+1}``.
    """
    if len(set(path.vertices)) != len(path.vertices):
        return False
    if len(set(e for e, _ in path.steps)) != len(path.steps):
        return False
    arrival = None
    for (e, t), u, v in zip(path.steps, path.vertices, path.vertices[1:]):
        if not (0 <= e < graph.edge_count):
            return False
        if {u, v} != set(graph.endpoints(e)):
            return False
        if not availability.available(e, t):
            return False
        if arrival is not None and t < arrival:
            return False
        arrival = t + traversal.weight(e, t)
    return True


def _reachable(
    graph: StaticGraph,
    availability: Availability,
    traversal: TraversalSpec,
    source: Vertex,
) -> set[Vertex]:
    """Vertices temporally reachable from ``source`` (earliest-arrival search).

    Candidate departures per edge are its override times at-or-after the
    current arrival plus the earliest non-override available time; later
    default-weight departures never reach anywhere a dominated one cannot.
    """
    arrivals: dict[Vertex, int] = {source: 1}
    heap: list[tuple[int, Vertex]] = [(1, source)]
    settled: set[Vertex] = set()
    override_index = traversal._override_index
    full = isinstance(availability, FullAvailability)
    while heap:
        arr, v = heapq.heappop(heap)
        if v in settled:
            continue
        settled.add(v)
        for e, w in graph.incident(v):
            if w in settled:
                continue
            per_edge = override_index[e]
            best = None
            if full:
                tau = availability.tau
                t = arr
                while t in per_edge and t <= tau:
                    cand = t + per_edge[t]
                    if best is None or cand < best:
                        best = cand
                    t += 1
                if t <= tau:
                    cand = t + traversal.defaults[e]
                    if best is None or cand < best:
                        best = cand
                for t2, wt in traversal.overrides[e]:
                    if t2 >= arr:
                        cand = t2 + wt
                        if best is None or cand < best:
                            best = cand
            else:
                times = availability.times(e)
                i = bisect_left(times, arr)
                default = traversal.defaults[e]
                saw_default = False
                for t2 in times[i:]:
                    wt = per_edge.get(t2)
                    if wt is None:
                        if saw_default:
                            continue
                        saw_default = True
                        wt = default
                    cand = t2 + wt
                    if best is None or cand < best:
                        best = cand
            if best is not None and (w not in arrivals or best < arrivals[w]):
                arrivals[w] = best
                heapq.heappush(heap, (best, w))
    return settled


def is_feasible(instance: Instance, labeling: Labeling) -> bool:
    """True iff every source temporally reaches every other vertex.

    Raises MultiplicityViolation if the labeling exceeds some edge's
    multiplicity (that is an input error, not infeasibility).
    """
    for e in range(instance.graph.edge_count):
        if len(labeling.times(e)) > instance.multiplicity[e]:
            raise MultiplicityViolation(
                f"edge {e} has {len(labeling.times(e))} labels, "
                f"multiplicity {instance.multiplicity[e]}"
            )
    _check_times(labeling.times_by_edge, instance.tau, "label")
    everyone = set(range(instance.graph.vertex_count))
    for s in instance.sources:
        if _reachable(instance.graph, labeling, instance.traversal, s) != everyone:
            return False
    return True


def reaches_all(
    graph: StaticGraph,
    availability: Availability,
    traversal: TraversalSpec,
    source: Vertex,
) -> bool:
    """True iff ``source`` temporally reaches every vertex of the graph."""
    return len(_reachable(graph, availability, traversal, source)) == graph.vertex_count
