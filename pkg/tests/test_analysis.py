import math
import random
from fractions import Fraction as F

import pytest

from powertree.analysis import (
    AnalysisError,
    EdgeClassification,
    build_binary_tree,
    check_delta_properties,
    classify_edges,
    delta_spanning,
    delta_steiner,
    harmonic,
    sample_witness,
    theoretical_factor,
    witness_stats,
)
from powertree.analysis import _derive, _pair_paths
from powertree.trees import CostedTree, random_full_component


def steiner_series_reference(i: int, terms: int = 200) -> float:
    """Independent high-precision evaluation: plain partial sum to q = terms."""
    h = F(0)
    for j in range(1, i + 1):
        h += F(1, j)
    total = F(0)
    h_qi = h
    for q in range(1, terms + 1):
        h_qi += F(1, q + i)
        total += h_qi / F(2) ** q
    scale = F(1, 2**i)
    return float(scale * h + (1 - scale) * total)


# ---------------------------------------------------------------------------
# delta formulas


def test_harmonic_values():
    assert harmonic(0) == 0
    assert harmonic(1) == 1
    assert harmonic(2) == F(3, 2)
    assert harmonic(4) == F(25, 12)


def test_delta_spanning_closed_forms():
    assert delta_spanning(1, 2) == F(3, 2)
    assert delta_spanning(2, 3) == 2 * F(11, 6)


def test_delta_steiner_headline_value():
    assert abs(delta_steiner(1, 2) - (3 * math.log(4) - 2.25)) < 1e-6


def test_delta_steiner_i1_is_2ln2():
    assert abs(delta_steiner(1, 1) - steiner_series_reference(1)) < 1e-10
    assert abs(delta_steiner(1, 1) - 2 * math.log(2)) < 1e-6


def test_delta_steiner_matches_reference_series():
    for i in range(1, 12):
        assert abs(delta_steiner(1, i) - steiner_series_reference(i)) < 1e-9


def test_delta_properties_spanning():
    report = check_delta_properties("spanning", 50)
    # harmonic increments M/(i+1), strictly decreasing
    vals = [0.0] + list(report.values)
    incs = [vals[i + 1] - vals[i] for i in range(len(vals) - 1)]
    assert all(incs[i] > incs[i + 1] for i in range(len(incs) - 1))


def test_delta_properties_steiner():
    report = check_delta_properties("steiner", 50)
    assert report.increasing and report.concave_increments


def test_delta_properties_vacuous_at_one():
    report = check_delta_properties("spanning", 1)
    assert report.i_max == 1


def test_theoretical_factors():
    assert theoretical_factor("spanning") == F(3, 2)
    assert abs(theoretical_factor("steiner") - 1.9088831) < 1e-6
    for mode in ("spanning", "steiner"):
        assert 1 < float(theoretical_factor(mode)) < 2


# ---------------------------------------------------------------------------
# edge classification


def test_classify_path():
    tree = CostedTree(((0, 1, F(1)), (1, 2, F(3))), frozenset({0, 2}))
    cls = classify_edges(tree)
    assert cls.heavy == (1,)
    assert cls.middle == (0,)
    assert cls.light == ()
    assert cls.gamma_h == F(3, 4)
    assert cls.gamma_m == F(1, 4)
    assert cls.alpha == F(7, 4)
    # p = alpha * c exactly: 7 = (7/4) * 4
    assert cls.alpha * tree.cost() == tree.power()


def test_classify_uniform_star_identity_is_tie_independent():
    edges = tuple((4, leaf, F(2)) for leaf in range(4))
    tree = CostedTree(edges, frozenset(range(4)))
    cls = classify_edges(tree)
    assert cls.alpha * tree.cost() == tree.power()
    assert len(cls.heavy) + len(cls.middle) + len(cls.light) == 4


def test_classify_random_trees():
    for seed in range(200):
        tree = random_full_component(90_000 + seed, terminal_count=6)
        cls = classify_edges(tree)
        assert 1 <= cls.alpha <= 2
        assert cls.alpha * tree.cost() == tree.power()
        assert set(cls.heavy) | set(cls.middle) | set(cls.light) == set(range(len(tree.edges)))


# ---------------------------------------------------------------------------
# binarization


def hub_component() -> CostedTree:
    # hub node 0 with terminal children of costs 9, 7, 5, 3 and a cost-1
    # edge to the second internal node 1 (which holds two terminals), so
    # the top-3 incident edges of the hub are all child edges
    edges = (
        (1, 6, F(2)),
        (1, 7, F(4)),
        (0, 1, F(1)),
        (0, 2, F(9)),
        (0, 3, F(7)),
        (0, 4, F(5)),
        (0, 5, F(3)),
    )
    return CostedTree(edges, frozenset({2, 3, 4, 5, 6, 7}))


def test_binary_tree_expensive_edges_on_top():
    sbin = build_binary_tree(hub_component())
    # the hub's children: 9-cost edge strictly above 7-cost, 7 above-or-level
    # with 5 (the last two children share the bottom dummy)
    lev9 = sbin.levels[2]
    lev7 = sbin.levels[3]
    lev5 = sbin.levels[4]
    assert lev9 < lev7 <= lev5
    for node, kids in sbin.children.items():
        assert len(kids) in (0, 2)
    for key in sbin.dummy_edges:
        assert sbin.edge_cost[key] == 0


def test_binary_tree_preserves_binary_component():
    # both endpoints of the split edge keep two children: no dummies, no shortcuts
    edges = ((0, 1, F(2)), (0, 2, F(3)), (0, 3, F(1)), (1, 4, F(5)), (1, 5, F(4)))
    tree = CostedTree(edges, frozenset({2, 3, 4, 5}))
    sbin = build_binary_tree(tree)
    assert not sbin.dummy_edges
    assert set(sbin.levels) == set(tree.nodes) | {sbin.root}


def test_binary_tree_requires_full_component():
    with pytest.raises(Exception):
        build_binary_tree(CostedTree(((0, 1, F(1)), (1, 2, F(1))), frozenset({0, 1, 2})))


# ---------------------------------------------------------------------------
# witness trees


def chain_component() -> CostedTree:
    # y=0 (degree 2, contracted), z=1; terminals b=2, c=3, d=4
    # edge ids: 0: y-b cost 3 (split edge), 1: y-z cost 5, 2: z-c cost 8, 3: z-d cost 2
    edges = ((0, 2, F(3)), (0, 1, F(5)), (1, 3, F(8)), (1, 4, F(2)))
    return CostedTree(edges, frozenset({2, 3, 4}))


def test_witness_sets_hand_computed():
    sbin = build_binary_tree(chain_component())
    # structure: root -> {z=1 (merged y edges), b=2}; z -> {c=3, d=4}
    assert sorted(sbin.children[sbin.root]) == [1, 2]
    assert sbin.children[1] == (3, 4)  # c before d (cost 8 > 2)
    assert sorted(sbin.edge_origs[1]) == [0, 1]

    marks = frozenset({2, 4})  # mark the b-edge at the root and the d-edge at z
    ws = _derive(sbin, marks, _pair_paths(sbin))
    ws.validate()
    assert set(ws.witness_edges) == {(2, 3), (3, 4)}
    assert ws.witness_set(2) == frozenset({(2, 3), (3, 4)})  # cost-8 edge
    assert ws.witness_set(1) == frozenset({(2, 3)})          # cost-5 edge
    assert ws.witness_set(3) == frozenset({(3, 4)})          # cost-2 edge
    assert ws.witness_set(0) == frozenset({(2, 3)})          # split edge


def test_sampled_witness_is_always_spanning_tree():
    for seed in range(60):
        tree = random_full_component(91_000 + seed, terminal_count=7)
        sbin = build_binary_tree(tree)
        ws = sample_witness(sbin, seed)
        ws.validate()  # spanning tree + nonempty witness sets
        flat = set()
        for key, wset in ws.witness_map.items():
            flat |= wset
        assert flat <= set(ws.witness_edges)


def test_witness_stats_matches_marking_probability():
    tree = hub_component()
    for i in (1, 2, 3):
        rep = witness_stats(tree, 0, i, trials=2500, seed=11)
        assert abs(rep.freq_s_equals_d - rep.expected_s_equals_d) <= 3 * rep.binomial_sigma
        assert rep.max_within_component_edges <= i
        assert rep.mean_harmonic <= rep.delta_bound + 3 * rep.binomial_sigma


def test_witness_stats_preconditions():
    tree = hub_component()
    with pytest.raises(AnalysisError, match="degree"):
        witness_stats(tree, 5, 1, trials=10, seed=0)  # terminal leaf, degree 1
    with pytest.raises(AnalysisError, match="i must"):
        witness_stats(tree, 0, 5, trials=10, seed=0)  # i = d(v) not allowed
    with pytest.raises(AnalysisError, match="not unique"):
        # i = d(v) - 1 takes every child edge: no leftover leaf d' exists
        witness_stats(tree, 0, 4, trials=10, seed=0)
