from __future__ import annotations

import random

import pytest

from tmbcast.core import (
    FullAvailability,
    Instance,
    Labeling,
    MultiplicityTooSmall,
    NotATree,
    SearchSpaceTooLarge,
    StaticGraph,
    TraversalSpec,
    Unreachable,
    WrongSourceCount,
    is_feasible,
)
from tmbcast.distances import Measure, distance, ft_mw_bounds, objective, sssp
from tmbcast.solvers import (
    NoTractableRegime,
    OracleLimits,
    SolveStatus,
    add_super_source,
    approx_ft_mw,
    brute_force,
    pick_regime,
    search_space_size,
    solve_auto,
    solve_multi_full_mu,
    solve_single_source,
    solve_tree,
    tree_mu_diagnostic,
)

import worked_example as fig
import oracles

EA = Measure.EARLIEST_ARRIVAL
LD = Measure.LATEST_DEPARTURE
FT = Measure.FASTEST
MW = Measure.MIN_WAIT


def reachable_instance(rng, **kwargs):
    """Random instance whose sources reach everything in the full graph."""
    while True:
        inst = oracles.random_instance(rng, **kwargs)
        avail = FullAvailability(inst.tau)
        from tmbcast.core import reaches_all

        if all(
            reaches_all(inst.graph, avail, inst.traversal, s)
            for s in inst.sources
        ):
            return inst


def check_result_invariants(inst, result, measure):
    assert result.labeling.respects_multiplicity(inst)
    if result.status is not SolveStatus.INFEASIBLE:
        assert is_feasible(inst, result.labeling)
        assert objective(inst, result.labeling, measure) == result.objective


# ---------------------------------------------------------------------------
# solve_single_source


def test_single_source_star_ea():
    graph = StaticGraph(4, ((0, 1), (0, 2), (0, 3)))
    trav = TraversalSpec.from_maps((5, 5, 5), {0: {1: 1}, 1: {2: 2}, 2: {3: 1}})
    inst = Instance(graph, frozenset({0}), trav, (1, 1, 1), 5)
    result = solve_single_source(inst, EA)
    assert result.status is SolveStatus.OPTIMAL
    assert result.objective == 4  # spoke arrivals 2, 4, 4
    check_result_invariants(inst, result, EA)


def test_single_source_rejects_multi_source():
    inst = fig.build_instance()
    with pytest.raises(WrongSourceCount):
        solve_single_source(inst, EA)


def test_single_source_unreachable():
    graph = StaticGraph(3, ((0, 1),))
    inst = Instance(graph, frozenset({0}), TraversalSpec.uniform(1, 1), (1,), 2)
    with pytest.raises(Unreachable):
        solve_single_source(inst, EA)


def test_single_source_matches_oracle():
    rng = random.Random(900)
    for trial in range(30):
        inst = reachable_instance(
            rng, n=rng.randint(2, 5), extra_edges=rng.randint(0, 2),
            tau=rng.randint(2, 4), mu_choices=(1, 2), source_count=1,
        )
        if search_space_size(inst) > 40_000:
            continue
        for m in (EA, LD):
            got = solve_single_source(inst, m)
            want = brute_force(inst, m)
            assert want.status is SolveStatus.OPTIMAL
            assert got.objective == want.objective, (inst, m.code)
            check_result_invariants(inst, got, m)


def test_single_source_worked_example_m_only():
    inst0 = fig.build_instance()
    inst = Instance(
        inst0.graph, frozenset({fig.M}), inst0.traversal, inst0.multiplicity, inst0.tau
    )
    got = solve_single_source(inst, EA)
    assert got.objective <= 10
    # Brute force over the listed schedule options per edge: labels at
    # sentinel-weight times arrive later than any listed option, so the
    # optimum over option combinations is the true optimum.
    import itertools

    option_times = [
        [t for t, _ in inst.traversal.overrides[e]]
        for e in range(inst.graph.edge_count)
    ]
    best = None
    for combo in itertools.product(*option_times):
        lab = Labeling(tuple((t,) for t in combo))
        value = objective(inst, lab, EA)
        if value is not None and (best is None or value < best):
            best = value
    assert got.objective == best
    check_result_invariants(inst, got, EA)


def test_single_source_ea_per_vertex_optimality():
    rng = random.Random(901)
    for _ in range(20):
        inst = reachable_instance(
            rng, n=rng.randint(2, 6), extra_edges=rng.randint(0, 3),
            tau=rng.randint(1, 5), source_count=1,
        )
        (s,) = inst.sources
        got = solve_single_source(inst, EA)
        full = sssp(s, FullAvailability(inst.tau), inst, EA)
        for v in range(inst.graph.vertex_count):
            if v == s:
                continue
            assert got.per_source_distances[(s, v)].value == full[v].value


def test_single_source_ld_bound_per_vertex():
    rng = random.Random(902)
    for _ in range(20):
        inst = reachable_instance(
            rng, n=rng.randint(2, 6), extra_edges=rng.randint(0, 3),
            tau=rng.randint(1, 5), source_count=1,
        )
        (s,) = inst.sources
        got = solve_single_source(inst, LD)
        full = sssp(s, FullAvailability(inst.tau), inst, LD)
        floor = min(
            full[v].value for v in range(inst.graph.vertex_count) if v != s
        )
        for v in range(inst.graph.vertex_count):
            if v == s:
                continue
            assert got.per_source_distances[(s, v)].value >= floor
        assert got.objective == floor


# ---------------------------------------------------------------------------
# solve_multi_full_mu


def test_multi_full_mu_two_source_path():
    graph = StaticGraph(3, ((0, 1), (1, 2)))
    inst = Instance(
        graph, frozenset({0, 2}), TraversalSpec.uniform(2, 1), (2, 2), 3
    )
    result = solve_multi_full_mu(inst, EA)
    assert result.status is SolveStatus.OPTIMAL
    check_result_invariants(inst, result, EA)
    assert all(len(ts) <= 2 for ts in result.labeling.times_by_edge)
    want = brute_force(inst, EA)
    assert result.objective == want.objective


def test_multi_full_mu_requires_capacity():
    graph = StaticGraph(3, ((0, 1), (1, 2)))
    inst = Instance(
        graph, frozenset({0, 2}), TraversalSpec.uniform(2, 1), (1, 2), 3
    )
    with pytest.raises(MultiplicityTooSmall):
        solve_multi_full_mu(inst, EA)


def test_multi_full_mu_label_count_bounded_by_sources():
    rng = random.Random(903)
    for _ in range(15):
        inst = reachable_instance(
            rng, n=rng.randint(3, 5), extra_edges=rng.randint(0, 2),
            tau=4, mu_choices=(2,), source_count=2,
        )
        result = solve_multi_full_mu(inst, EA)
        assert all(len(ts) <= 2 for ts in result.labeling.times_by_edge)


def test_multi_full_mu_matches_oracle():
    rng = random.Random(904)
    done = 0
    while done < 20:
        inst = reachable_instance(
            rng, n=rng.randint(2, 5), extra_edges=rng.randint(0, 1),
            tau=rng.randint(2, 4), mu_choices=(2,), source_count=2,
        )
        if search_space_size(inst) > 40_000:
            continue
        for m in (EA, LD):
            got = solve_multi_full_mu(inst, m)
            want = brute_force(inst, m)
            assert got.objective == want.objective
            check_result_invariants(inst, got, m)
        done += 1


# ---------------------------------------------------------------------------
# solve_tree


def test_tree_single_source_degenerates():
    rng = random.Random(905)
    for _ in range(10):
        inst = reachable_instance(
            rng, n=rng.randint(2, 6), tau=rng.randint(2, 5),
            mu_choices=(2,), source_count=1, tree=True,
        )
        a = solve_tree(inst, EA)
        b = solve_single_source(inst, EA)
        assert a.objective == b.objective


def test_tree_output_has_at_most_two_labels_per_edge():
    rng = random.Random(906)
    for _ in range(15):
        inst = reachable_instance(
            rng, n=rng.randint(3, 6), tau=rng.randint(2, 5),
            mu_choices=(2,), source_count=rng.randint(2, 3), tree=True,
        )
        result = solve_tree(inst, EA)
        assert all(len(ts) <= 2 for ts in result.labeling.times_by_edge)
        check_result_invariants(inst, result, EA)


def test_tree_matches_oracle():
    rng = random.Random(907)
    done = 0
    while done < 20:
        sc = rng.randint(2, 3)
        inst = reachable_instance(
            rng, n=rng.randint(sc, 5), tau=rng.randint(2, 4),
            mu_choices=(2,), source_count=sc, tree=True,
        )
        if search_space_size(inst) > 40_000:
            continue
        for m in (EA, LD):
            got = solve_tree(inst, m)
            want = brute_force(inst, m)
            assert got.objective == want.objective, (inst, m.code)
            check_result_invariants(inst, got, m)
        done += 1


def test_tree_rejects_cycles_and_small_mu():
    graph = StaticGraph(3, ((0, 1), (1, 2), (0, 2)))
    inst = Instance(
        graph, frozenset({0, 2}), TraversalSpec.uniform(3, 1), (2, 2, 2), 3
    )
    with pytest.raises(NotATree):
        solve_tree(inst, EA)
    tree_inst = Instance(
        StaticGraph(3, ((0, 1), (1, 2))),
        frozenset({0, 2}),
        TraversalSpec.uniform(2, 1),
        (1, 2),
        3,
    )
    with pytest.raises(MultiplicityTooSmall):
        solve_tree(tree_inst, EA)


def test_tree_mu_diagnostic():
    # 0 -- 1 -- 2 with a leaf 3 off vertex 1; sources 0 and 2.
    graph = StaticGraph(4, ((0, 1), (1, 2), (1, 3)))
    inst = Instance(
        graph, frozenset({0, 2}), TraversalSpec.uniform(3, 1), (2, 2, 1), 3
    )
    assert tree_mu_diagnostic(inst)  # leaf edge may have mu 1
    inst2 = Instance(
        graph, frozenset({0, 2}), TraversalSpec.uniform(3, 1), (1, 2, 2), 3
    )
    assert not tree_mu_diagnostic(inst2)


# ---------------------------------------------------------------------------
# approx_ft_mw


def test_approx_ratio_one_when_durations_identical():
    graph = StaticGraph(4, ((0, 1), (0, 2), (0, 3)))
    inst = Instance(graph, frozenset({0}), TraversalSpec.uniform(3, 1), (1,) * 3, 1)
    result = approx_ft_mw(inst, FT)
    assert result.status is SolveStatus.APPROXIMATE
    assert result.bounds.ft_min == result.bounds.ft_max == 1
    assert result.objective == 1
    check_result_invariants(inst, result, FT)


def test_approx_certificate_random():
    rng = random.Random(908)
    done = 0
    while done < 25:
        inst = reachable_instance(
            rng, n=rng.randint(2, 5), extra_edges=rng.randint(0, 1),
            tau=rng.randint(2, 4), mu_choices=(1, 2), source_count=1,
        )
        if search_space_size(inst) > 20_000:
            continue
        for m in (FT, MW):
            got = approx_ft_mw(inst, m)
            check_result_invariants(inst, got, m)
            b = got.bounds
            hi = b.ft_max if m is FT else b.mw_max
            lo = b.ft_min if m is FT else b.mw_min
            assert got.objective <= hi
            opt = brute_force(inst, m)
            assert opt.status is SolveStatus.OPTIMAL
            assert opt.objective >= lo
            assert got.objective >= opt.objective
        done += 1


def test_approx_rejects_multi_source():
    inst = fig.build_instance()
    with pytest.raises(WrongSourceCount):
        approx_ft_mw(inst, FT)


# ---------------------------------------------------------------------------
# brute_force


def test_brute_force_single_edge():
    graph = StaticGraph(2, ((0, 1),))
    inst = Instance(graph, frozenset({0}), TraversalSpec.uniform(1, 1), (1,), 3)
    result = brute_force(inst, EA)
    assert result.objective == 2
    assert result.labeling.times(0) == (1,)


def test_brute_force_lexicographic_tie_break():
    graph = StaticGraph(2, ((0, 1),))
    inst = Instance(graph, frozenset({0}), TraversalSpec.uniform(1, 1), (1,), 2)
    result = brute_force(inst, MW)  # both labels give waiting 0
    assert result.labeling.times(0) == (1,)


def test_brute_force_infeasible():
    # Two sources on a 2-vertex path through a middle vertex, one label each.
    graph = StaticGraph(3, ((0, 1), (1, 2)))
    inst = Instance(
        graph, frozenset({0, 2}), TraversalSpec.uniform(2, 1), (1, 1), 3
    )
    result = brute_force(inst, EA)
    assert result.status is SolveStatus.INFEASIBLE
    assert result.objective is None


def test_brute_force_space_guard():
    graph = StaticGraph(2, ((0, 1),))
    inst = Instance(graph, frozenset({0}), TraversalSpec.uniform(1, 1), (1,), 5)
    with pytest.raises(SearchSpaceTooLarge) as err:
        brute_force(inst, EA, OracleLimits(max_labelings=3))
    assert err.value.cardinality == 5


def test_maximal_enumeration_matches_full_subsets():
    rng = random.Random(909)
    done = 0
    while done < 15:
        inst = oracles.random_instance(
            rng, n=rng.randint(2, 4), extra_edges=0, tau=3, mu_choices=(1, 2)
        )
        if inst.graph.edge_count > 3:
            continue
        for m in (EA, LD, FT, Measure.SHORTEST_TRAVEL):
            got = brute_force(inst, m)
            want = oracles.exhaustive_optimum(
                inst, m.code, labelings=oracles.all_labelings(inst)
            )
            assert got.objective == want
        done += 1


def test_brute_force_monotone_in_multiplicity():
    rng = random.Random(910)
    done = 0
    while done < 10:
        inst = oracles.random_instance(
            rng, n=rng.randint(2, 4), extra_edges=0, tau=3, mu_choices=(1,)
        )
        bigger = Instance(
            inst.graph,
            inst.sources,
            inst.traversal,
            tuple(min(mu + 1, inst.tau) for mu in inst.multiplicity),
            inst.tau,
        )
        for m in (EA, FT):
            a = brute_force(inst, m)
            b = brute_force(bigger, m)
            if a.objective is None:
                continue
            assert b.objective is not None
            assert b.objective <= a.objective
        done += 1


# ---------------------------------------------------------------------------
# add_super_source and the relaxed objective


def relaxed_brute_force(inst, measure):
    """Relaxed oracle: every non-source covered by some source."""
    best = None
    non_sources = [
        v for v in range(inst.graph.vertex_count) if v not in inst.sources
    ]
    for lab in oracles.maximal_labelings(inst):
        per_vertex = []
        ok = True
        for v in non_sources:
            vals = []
            for s in inst.sources:
                d = oracles.exhaustive_distance(
                    inst.graph, lab, inst.traversal, s, v, measure.code
                )
                if d is not None:
                    vals.append(d)
            if not vals:
                ok = False
                break
            per_vertex.append(max(vals) if measure.maximize else min(vals))
        if not ok or not per_vertex:
            continue
        value = min(per_vertex) if measure.maximize else max(per_vertex)
        if best is None or measure.better(value, best):
            best = value
    return best


def test_super_source_shape():
    inst = fig.build_instance()
    relaxed = add_super_source(inst)
    assert relaxed.graph.vertex_count == inst.graph.vertex_count + 1
    assert relaxed.graph.edge_count == inst.graph.edge_count + 2
    assert relaxed.sources == frozenset({inst.graph.vertex_count})
    star = inst.graph.vertex_count
    for s in inst.sources:
        e = relaxed.graph.edge_id(star, s)
        assert relaxed.traversal.weight(e, 1) == 0
        assert relaxed.multiplicity[e] == relaxed.tau


def test_super_source_preserves_reachability():
    rng = random.Random(912)
    for _ in range(20):
        inst = oracles.random_instance(
            rng, n=rng.randint(3, 5), extra_edges=rng.randint(0, 2),
            tau=3, source_count=2,
        )
        relaxed = add_super_source(inst)
        star = inst.graph.vertex_count
        covered_by_some = set()
        for s in inst.sources:
            vec = sssp(s, FullAvailability(inst.tau), inst, EA)
            covered_by_some |= {
                v for v, r in enumerate(vec) if v != s and r.value is not None
            }
        star_vec = sssp(star, FullAvailability(relaxed.tau), relaxed, EA)
        for v in covered_by_some:
            assert star_vec[v].value is not None


def test_super_source_requires_two_sources():
    graph = StaticGraph(2, ((0, 1),))
    inst = Instance(graph, frozenset({0}), TraversalSpec.uniform(1, 1), (1,), 2)
    with pytest.raises(WrongSourceCount):
        add_super_source(inst)


def test_super_source_relaxed_optimum_matches_oracle():
    rng = random.Random(911)
    done = 0
    while done < 10:
        inst = oracles.random_instance(
            rng, n=rng.randint(3, 4), extra_edges=rng.randint(0, 1),
            tau=3, mu_choices=(1,), source_count=2,
        )
        if search_space_size(inst) > 3_000:
            continue
        non_sources = [
            v for v in range(inst.graph.vertex_count) if v not in inst.sources
        ]
        if not non_sources:
            continue
        relaxed = add_super_source(inst)
        star = inst.graph.vertex_count
        for measure, agg in ((EA, max), (LD, min)):
            want = relaxed_brute_force(inst, measure)
            try:
                got = solve_single_source(relaxed, measure)
            except Unreachable:
                assert want is None
                continue
            value = agg(
                got.per_source_distances[(star, v)].value for v in non_sources
            )
            assert value == want, measure
        done += 1


# ---------------------------------------------------------------------------
# regime dispatch


def test_pick_regime_names():
    inst = fig.build_instance()  # 2 sources, mu 1: nothing applies
    with pytest.raises(NoTractableRegime):
        pick_regime(inst, EA)
    single = Instance(
        inst.graph, frozenset({fig.E}), inst.traversal, inst.multiplicity, inst.tau
    )
    assert pick_regime(single, EA) == "single-source"
    with pytest.raises(NoTractableRegime):
        pick_regime(single, FT)


def test_solve_auto_dispatch():
    graph = StaticGraph(3, ((0, 1), (1, 2)))
    inst = Instance(
        graph, frozenset({0, 2}), TraversalSpec.uniform(2, 1), (2, 2), 3
    )
    result = solve_auto(inst, EA)
    assert result.regime == "multi-source-full-mu"
    assert result.status is SolveStatus.OPTIMAL
