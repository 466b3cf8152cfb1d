"""The six temporal distance measures and the bound quantities for FT/MW.

One engine, measure-specific dominance:

* earliest arrival: Dijkstra over (vertex, arrival) with parent recording;
* latest departure: probe candidate first departures in descending order,
  checking reachability with an arrival search seeded at that exact time;
* fastest (min duration): probe candidate first departures, minimizing
  arrival minus departure;
* shortest travel / minimum hop: label-correcting search over Pareto sets of
  (arrival, cost) per vertex;
* minimum waiting: depth-first enumeration of simple paths (waiting is the
  one statistic where revisiting a vertex could pay off, and the definitions
  range over simple paths only).

Candidate departures on an edge given a lower bound are its override times
at-or-after the bound plus the earliest available non-override time: a later
departure at the default weight costs the same travel, waits longer, and
arrives no earlier, so it is dominated for every minimizing search.
"""

from __future__ import annotations

import heapq
from bisect import bisect_left
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator

from tmbcast.core import (
    Availability,
    FullAvailability,
    Instance,
    Labeling,
    MultiplicityViolation,
    PathStats,
    SameVertex,
    StaticGraph,
    TemporalPath,
    TraversalSpec,
    Unreachable,
    ValidationError,
    path_stats,
)


class Measure(Enum):
    """The six temporal distance measures with their objective polarity."""

    EARLIEST_ARRIVAL = "ea"
    LATEST_DEPARTURE = "ld"
    FASTEST = "ft"
    SHORTEST_TRAVEL = "st"
    MIN_HOP = "mh"
    MIN_WAIT = "mw"

    @property
    def code(self) -> str:
        return self.value

    @property
    def maximize(self) -> bool:
        """True when longer is better (latest departure); the worst case over
        vertices is then the minimum instead of the maximum."""
        return self is Measure.LATEST_DEPARTURE

    @classmethod
    def from_code(cls, code: str) -> "Measure":
        for m in cls:
            if m.value == code.lower():
                return m
        raise ValidationError(f"unknown measure {code!r}")

    def statistic(self, stats: PathStats) -> int:
        return {
            Measure.EARLIEST_ARRIVAL: stats.arrival,
            Measure.LATEST_DEPARTURE: stats.departure,
            Measure.FASTEST: stats.duration,
            Measure.SHORTEST_TRAVEL: stats.travel,
            Measure.MIN_HOP: stats.hops,
            Measure.MIN_WAIT: stats.waiting,
        }[self]

    def better(self, a: int, b: int) -> bool:
        return a > b if self.maximize else a < b

    def worst(self, values: Iterable[int]) -> int:
        return min(values) if self.maximize else max(values)


@dataclass(frozen=True)
class DistanceResult:
    """Optimal value of a measure between a vertex pair, with a realizing path."""

    value: int | None
    witness: TemporalPath | None

    @property
    def reachable(self) -> bool:
        return self.value is not None


UNREACHED = DistanceResult(None, None)


@dataclass(frozen=True)
class Bounds:
    """Worst-vertex extremes of duration and waiting over the full temporal graph.

    The minima bound any feasible solution's objective from below; the maxima
    bound the objective of any spanning schedule from above, which is what
    the approximation certificate reports.
    """

    ft_min: int
    ft_max: int
    mw_min: int
    mw_max: int


# ---------------------------------------------------------------------------
# Candidate departures


def _min_candidates(
    avail: Availability, trav: TraversalSpec, e: int, lo: int
) -> Iterator[tuple[int, int]]:
    """(time, weight) departures worth trying at-or-after ``lo`` when minimizing."""
    per_edge = trav._override_index[e]
    if isinstance(avail, FullAvailability):
        tau = avail.tau
        if lo > tau:
            return
        for t, w in trav.overrides[e]:
            if t >= lo:
                yield t, w
        t = lo
        while t <= tau and t in per_edge:
            t += 1
        if t <= tau:
            yield t, trav.defaults[e]
    else:
        times = avail.times(e)
        default = trav.defaults[e]
        saw_default = False
        for i in range(bisect_left(times, lo), len(times)):
            t = times[i]
            w = per_edge.get(t)
            if w is None:
                if saw_default:
                    continue
                saw_default = True
                w = default
            yield t, w


def _all_times(avail: Availability, e: int, lo: int = 1) -> Iterator[int]:
    """Every available departure at-or-after ``lo`` (used by maximizing scans)."""
    if isinstance(avail, FullAvailability):
        yield from range(lo, avail.tau + 1)
    else:
        times = avail.times(e)
        for i in range(bisect_left(times, lo), len(times)):
            yield times[i]


def _first_departure_times(
    graph: StaticGraph, avail: Availability, source: int
) -> list[int]:
    """Distinct times at which some edge incident to ``source`` is available."""
    if isinstance(avail, FullAvailability):
        return list(range(1, avail.tau + 1)) if graph.incident(source) else []
    out: set[int] = set()
    for e, _ in graph.incident(source):
        out.update(avail.times(e))
    return sorted(out)


# ---------------------------------------------------------------------------
# Earliest-arrival search (the workhorse)


def _ea_run(
    graph: StaticGraph,
    avail: Availability,
    trav: TraversalSpec,
    source: int,
    first_time: int | None = None,
):
    """Dijkstra over (arrival, vertex); returns (arrivals, parents).

    With ``first_time`` the first step must depart exactly then; otherwise the
    first step may depart at any available time.  ``parents[v]`` is
    ``(previous vertex, edge, departure)`` and the parent forest realizes the
    recorded arrivals.
    """
    arrivals: dict[int, int] = {}
    parents: dict[int, tuple[int, int, int]] = {}
    heap: list[tuple[int, int]] = []

    def relax(u: int, arr_u: int, exact: int | None):
        for e, w_v in graph.incident(u):
            if w_v == source:
                continue
            best = None
            best_t = None
            if exact is None:
                for t, w in _min_candidates(avail, trav, e, arr_u):
                    if best is None or t + w < best:
                        best, best_t = t + w, t
            else:
                if avail.available(e, exact):
                    best, best_t = exact + trav.weight(e, exact), exact
            if best is None:
                continue
            if w_v not in arrivals or best < arrivals[w_v]:
                arrivals[w_v] = best
                parents[w_v] = (u, e, best_t)
                heapq.heappush(heap, (best, w_v))

    settled: set[int] = set()
    if first_time is None:
        relax(source, 1, None)
    else:
        relax(source, first_time, first_time)
    settled.add(source)
    while heap:
        arr, v = heapq.heappop(heap)
        if v in settled or arr > arrivals.get(v, -1):
            continue
        settled.add(v)
        relax(v, arr, None)
    return arrivals, parents


def _path_from_parents(
    graph: StaticGraph, parents: dict, source: int, v: int
) -> TemporalPath:
    steps = []
    vertices = [v]
    while v != source:
        u, e, t = parents[v]
        steps.append((e, t))
        vertices.append(u)
        v = u
    steps.reverse()
    vertices.reverse()
    return TemporalPath(tuple(vertices), tuple(steps))


# ---------------------------------------------------------------------------
# Pareto search for shortest-travel and minimum-hop


class _State:
    __slots__ = ("vertex", "arrival", "cost", "parent", "edge", "time")

    def __init__(self, vertex, arrival, cost, parent, edge, time):
        self.vertex = vertex
        self.arrival = arrival
        self.cost = cost
        self.parent = parent
        self.edge = edge
        self.time = time


def _state_path(state: _State) -> TemporalPath:
    steps = []
    vertices = [state.vertex]
    while state.parent is not None:
        steps.append((state.edge, state.time))
        state = state.parent
        vertices.append(state.vertex)
    steps.reverse()
    vertices.reverse()
    return TemporalPath(tuple(vertices), tuple(steps))


def _pareto_run(
    graph: StaticGraph,
    avail: Availability,
    trav: TraversalSpec,
    source: int,
    hop_cost: bool,
):
    """Label-correcting search keeping per-vertex Pareto sets of (arrival, cost).

    A new state is kept only if no recorded state has both a weakly earlier
    arrival and a weakly lower cost; revisiting a vertex along a walk is
    therefore always rejected, so reconstructed witnesses are simple paths.
    """
    root = _State(source, 1, 0, None, None, None)
    frontier: dict[int, list[_State]] = {source: [root]}
    queue: deque[_State] = deque()
    queue.append(root)

    def try_add(state: _State) -> bool:
        states = frontier.setdefault(state.vertex, [])
        for s in states:
            if s.arrival <= state.arrival and s.cost <= state.cost:
                return False
        states[:] = [
            s for s in states if not (state.arrival <= s.arrival and state.cost <= s.cost)
        ]
        states.append(state)
        return True

    while queue:
        cur = queue.popleft()
        if cur not in frontier.get(cur.vertex, []):
            continue
        for e, w_v in graph.incident(cur.vertex):
            for t, w in _min_candidates(avail, trav, e, cur.arrival):
                nxt = _State(
                    w_v,
                    t + w,
                    cur.cost + (1 if hop_cost else w),
                    cur,
                    e,
                    t,
                )
                if try_add(nxt):
                    queue.append(nxt)
    return frontier


# ---------------------------------------------------------------------------
# Minimum-waiting search over simple paths


def _min_wait_run(
    graph: StaticGraph, avail: Availability, trav: TraversalSpec, source: int
) -> dict[int, tuple[int, tuple]]:
    """Best (waiting, steps) per vertex over simple temporal paths from source."""
    best: dict[int, tuple[int, tuple]] = {}
    on_path = [False] * graph.vertex_count
    on_path[source] = True
    steps: list[tuple[int, int]] = []

    def visit(v: int, arrival: int, waited: int, first: bool):
        if not first:
            cur = best.get(v)
            if cur is None or waited < cur[0]:
                best[v] = (waited, tuple(steps))
        for e, w_v in graph.incident(v):
            if on_path[w_v]:
                continue
            if first:
                candidates = (
                    (t, trav.weight(e, t)) for t in _all_times(avail, e)
                )
            else:
                candidates = _min_candidates(avail, trav, e, arrival)
            for t, w in candidates:
                extra = 0 if first else t - arrival
                on_path[w_v] = True
                steps.append((e, t))
                visit(w_v, t + w, waited + extra, False)
                steps.pop()
                on_path[w_v] = False

    visit(source, 1, 0, True)
    return best


def _steps_to_path(graph: StaticGraph, source: int, steps: tuple) -> TemporalPath:
    return TemporalPath.from_steps(graph, source, list(steps))


# ---------------------------------------------------------------------------
# Public distance operations


def _sssp_ea(graph, avail, trav, source):
    arrivals, parents = _ea_run(graph, avail, trav, source)
    out = [UNREACHED] * graph.vertex_count
    for v, arr in arrivals.items():
        out[v] = DistanceResult(arr, _path_from_parents(graph, parents, source, v))
    return out


def _sssp_ld(graph, avail, trav, source):
    out: list[DistanceResult] = [UNREACHED] * graph.vertex_count
    remaining = set(range(graph.vertex_count)) - {source}
    for t0 in sorted(_first_departure_times(graph, avail, source), reverse=True):
        if not remaining:
            break
        arrivals, parents = _ea_run(graph, avail, trav, source, first_time=t0)
        for v in list(remaining):
            if v in arrivals:
                out[v] = DistanceResult(t0, _path_from_parents(graph, parents, source, v))
                remaining.discard(v)
    return out


def _sssp_ft(graph, avail, trav, source):
    best: list[tuple[int, TemporalPath] | None] = [None] * graph.vertex_count
    for t0 in _first_departure_times(graph, avail, source):
        arrivals, parents = _ea_run(graph, avail, trav, source, first_time=t0)
        for v, arr in arrivals.items():
            if v == source:
                continue
            dur = arr - t0
            if best[v] is None or dur < best[v][0]:
                best[v] = (dur, _path_from_parents(graph, parents, source, v))
    return [
        UNREACHED if b is None else DistanceResult(b[0], b[1]) for b in best
    ]


def _sssp_pareto(graph, avail, trav, source, hop_cost: bool):
    frontier = _pareto_run(graph, avail, trav, source, hop_cost)
    out = [UNREACHED] * graph.vertex_count
    for v, states in frontier.items():
        if v == source or not states:
            continue
        winner = min(states, key=lambda s: (s.cost, s.arrival))
        out[v] = DistanceResult(winner.cost, _state_path(winner))
    return out


def _sssp_mw(graph, avail, trav, source):
    best = _min_wait_run(graph, avail, trav, source)
    out = [UNREACHED] * graph.vertex_count
    for v, (wait, steps) in best.items():
        out[v] = DistanceResult(wait, _steps_to_path(graph, source, steps))
    return out


def _sssp(graph, avail, trav, source, measure: Measure):
    if measure is Measure.EARLIEST_ARRIVAL:
        return _sssp_ea(graph, avail, trav, source)
    if measure is Measure.LATEST_DEPARTURE:
        return _sssp_ld(graph, avail, trav, source)
    if measure is Measure.FASTEST:
        return _sssp_ft(graph, avail, trav, source)
    if measure is Measure.SHORTEST_TRAVEL:
        return _sssp_pareto(graph, avail, trav, source, hop_cost=False)
    if measure is Measure.MIN_HOP:
        return _sssp_pareto(graph, avail, trav, source, hop_cost=True)
    if measure is Measure.MIN_WAIT:
        return _sssp_mw(graph, avail, trav, source)
    raise ValidationError(f"unhandled measure {measure}")


def sssp(
    source: int,
    availability: Availability,
    instance: Instance,
    measure: Measure,
) -> tuple[DistanceResult, ...]:
    """Single-source distance vector; entry ``v`` realizes measure(source, v)."""
    graph = instance.graph
    if not (0 <= source < graph.vertex_count):
        raise ValidationError(f"source {source} out of range")
    return tuple(_sssp(graph, availability, instance.traversal, source, measure))


def distance(
    u: int,
    v: int,
    availability: Availability,
    instance: Instance,
    measure: Measure,
) -> DistanceResult:
    """Optimum of the measure over all temporal paths from u to v."""
    graph = instance.graph
    if not (0 <= u < graph.vertex_count and 0 <= v < graph.vertex_count):
        raise ValidationError("vertex out of range")
    if u == v:
        raise SameVertex(f"distance between {u} and itself is undefined")
    return _sssp(graph, availability, instance.traversal, u, measure)[v]


def objective(
    instance: Instance, labeling: Labeling, measure: Measure
) -> int | None:
    """Worst-case measure over every (source, other vertex) pair, or None.

    Max over pairs for the minimizing measures, min for latest departure;
    None when some source fails to reach some vertex.
    """
    for e in range(instance.graph.edge_count):
        if len(labeling.times(e)) > instance.multiplicity[e]:
            raise MultiplicityViolation(
                f"edge {e} has {len(labeling.times(e))} labels, "
                f"multiplicity {instance.multiplicity[e]}"
            )
    values: list[int] = []
    for s in sorted(instance.sources):
        results = sssp(s, labeling, instance, measure)
        for v, res in enumerate(results):
            if v == s:
                continue
            if res.value is None:
                return None
            values.append(res.value)
    return measure.worst(values)


# ---------------------------------------------------------------------------
# FT/MW bound quantities on the full temporal graph


def _max_stats_run(graph: StaticGraph, avail: FullAvailability, trav: TraversalSpec, source: int):
    """Per-vertex maxima of duration and waiting over simple temporal paths.

    DFS over simple static paths carrying Pareto sets of partial schedules:
    (departure, arrival) for duration (both minimized: a smaller departure can
    only lengthen, a smaller arrival keeps every later departure open), and
    (waiting, arrival) for waiting (waiting maximized, arrival minimized).
    """
    max_dur: dict[int, int] = {}
    max_wait: dict[int, int] = {}
    on_path = [False] * graph.vertex_count
    on_path[source] = True

    def pareto_dur(states: list[tuple[int, int]]) -> list[tuple[int, int]]:
        states.sort()
        kept: list[tuple[int, int]] = []
        best_arr = None
        for td, arr in states:
            if best_arr is None or arr < best_arr:
                kept.append((td, arr))
                best_arr = arr
        return kept

    def pareto_wait(states: list[tuple[int, int]]) -> list[tuple[int, int]]:
        # maximize wait, minimize arrival
        states.sort(key=lambda s: (-s[0], s[1]))
        kept: list[tuple[int, int]] = []
        best_arr = None
        for wait, arr in states:
            if best_arr is None or arr < best_arr:
                kept.append((wait, arr))
                best_arr = arr
        return kept

    def visit(v: int, dur_states: list[tuple[int, int]], wait_states: list[tuple[int, int]]):
        for e, w_v in graph.incident(v):
            if on_path[w_v]:
                continue
            new_dur: list[tuple[int, int]] = []
            new_wait: list[tuple[int, int]] = []
            for td, arr in dur_states:
                for t in _all_times(avail, e, max(arr, 1)):
                    new_dur.append((td if td else t, t + trav.weight(e, t)))
            for wait, arr in wait_states:
                for t in _all_times(avail, e, max(arr, 1)):
                    gap = 0 if arr == 0 else t - arr
                    new_wait.append((wait + gap, t + trav.weight(e, t)))
            if not new_dur:
                continue
            d = max(arr - td for td, arr in new_dur)
            w = max(wait for wait, _ in new_wait)
            if d > max_dur.get(w_v, -1):
                max_dur[w_v] = d
            if w > max_wait.get(w_v, -1):
                max_wait[w_v] = w
            on_path[w_v] = True
            visit(w_v, pareto_dur(new_dur), pareto_wait(new_wait))
            on_path[w_v] = False

    # departure 0 / arrival 0 mark "no step taken yet"
    visit(source, [(0, 0)], [(0, 0)])
    return max_dur, max_wait


def ft_mw_bounds(source: int, instance: Instance) -> Bounds:
    """Duration and waiting extremes from ``source`` in the full temporal graph.

    Raises Unreachable when some vertex admits no temporal path from the
    source even with every edge available at every time.
    """
    graph = instance.graph
    avail = instance.full_availability()
    trav = instance.traversal
    ft = _sssp_ft(graph, avail, trav, source)
    others = [v for v in range(graph.vertex_count) if v != source]
    if any(ft[v].value is None for v in others):
        missing = [v for v in others if ft[v].value is None]
        raise Unreachable(f"source {source} cannot reach vertices {missing}")
    mw = _sssp_mw(graph, avail, trav, source)
    max_dur, max_wait = _max_stats_run(graph, avail, trav, source)
    return Bounds(
        ft_min=max(ft[v].value for v in others),
        ft_max=max(max_dur[v] for v in others),
        mw_min=max(mw[v].value for v in others),
        mw_max=max(max_wait[v] for v in others),
    )
