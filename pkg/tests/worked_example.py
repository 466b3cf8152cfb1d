"""The worked road-network example used throughout the test suite.

Two suppliers E and M must deliver to four distribution points; each edge can
be scheduled at most once, choosing one of its two listed (time, weight)
options.  Three reference schedules optimize worst-case earliest arrival,
duration, and travel time respectively.
"""

from __future__ import annotations

from tmbcast.core import Instance, Labeling, StaticGraph, TraversalSpec

VERTEX_NAMES = ("E", "v1", "v2", "v3", "v4", "M")
E, V1, V2, V3, V4, M = range(6)

# edge id -> (endpoints, [(time, weight), (time, weight)])
EDGE_TABLE = (
    ((E, V1), ((1, 1), (12, 1))),
    ((E, V2), ((6, 2), (10, 1))),
    ((V1, V2), ((2, 3), (10, 1))),
    ((V2, V3), ((4, 1), (12, 2))),
    ((V2, V4), ((5, 1), (14, 2))),
    ((V3, V4), ((1, 1), (9, 1))),
    ((V3, M), ((2, 1), (12, 3))),
    ((V4, M), ((6, 3), (10, 1))),
    ((V1, V4), ((6, 4), (11, 1))),
    ((E, V3), ((8, 1), (10, 2))),
)

TAU = 14


def build_instance() -> Instance:
    graph = StaticGraph(6, tuple(pair for pair, _ in EDGE_TABLE))
    overrides = tuple(opts for _, opts in EDGE_TABLE)
    traversal = TraversalSpec((TAU,) * len(EDGE_TABLE), overrides)
    return Instance(
        graph=graph,
        sources=frozenset({E, M}),
        traversal=traversal,
        multiplicity=(1,) * len(EDGE_TABLE),
        tau=TAU,
    )


def _labeling(by_edge: dict[int, int]) -> Labeling:
    return Labeling.from_dict(len(EDGE_TABLE), {e: (t,) for e, t in by_edge.items()})


# Minimizes the worst earliest arrival: objective 10.
LABELING_EA = _labeling({0: 1, 1: 6, 2: 2, 3: 4, 4: 5, 6: 2, 7: 6, 8: 6, 9: 8})

# Minimizes the worst duration: objective 3.
LABELING_FT = _labeling({0: 12, 1: 6, 3: 4, 5: 9, 6: 2, 7: 10, 8: 11, 9: 8})

# Minimizes the worst travel time: objective 3.
LABELING_ST = _labeling({0: 1, 2: 10, 3: 4, 5: 9, 6: 2, 7: 10, 9: 8})

EXPECTED = {"ea": 10, "ft": 3, "st": 3}
