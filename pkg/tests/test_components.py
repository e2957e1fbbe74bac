import random
from fractions import Fraction as F

import pytest

from powertree.components import (
    ComponentError,
    enumerate_columns,
    min_power_component,
)
from powertree.generators import generate
from powertree.instance import Instance, evaluate, parse_instance
from powertree.pathpower import min_power_path
from oracles import min_power_tree_bruteforce


def test_pair_equals_min_power_path():
    for seed in range(25):
        inst = generate("uniform-random", 7, 4, 4000 + seed, edge_prob=0.5, cost_max=9)
        terms = sorted(inst.terminals)
        comp = min_power_component(inst, {terms[0], terms[1]}, 2)
        assert comp.power == min_power_path(inst, terms[0], terms[1]).power


def test_star_component():
    text = "nodes 4\nedge 0 3 1\nedge 1 3 1\nedge 2 3 1\nterminals 0 1 2\nroot 0\n"
    comp = min_power_component(parse_instance(text), {0, 1, 2}, 3)
    assert comp.power == 4
    assert sorted(comp.edges) == [0, 1, 2]


def test_oracle_equivalence_q3():
    for seed in range(120):
        rng = random.Random(4000 + seed)
        n = rng.randint(4, 7)
        tcount = rng.randint(3, n)
        inst = generate("uniform-random", n, tcount, 4000 + seed, edge_prob=0.5, cost_max=9)
        terms = sorted(inst.terminals)
        if len(terms) < 3:
            continue
        Q = frozenset(rng.sample(terms, 3))
        comp = min_power_component(inst, Q, 3)
        want = min_power_tree_bruteforce(
            Instance(inst.node_count, inst.edges, Q, min(Q)), Q
        )
        assert comp.power == want, (seed, sorted(Q))


def test_oracle_equivalence_q4_small():
    # |Q| = 4 goes through the general topology machinery
    checked = 0
    for seed in range(60):
        rng = random.Random(5000 + seed)
        n = rng.randint(5, 7)
        inst = generate("uniform-random", n, rng.randint(4, n), 5000 + seed,
                        edge_prob=0.5, cost_max=9)
        terms = sorted(inst.terminals)
        if len(terms) < 4:
            continue
        Q = frozenset(rng.sample(terms, 4))
        comp = min_power_component(inst, Q, 4)
        want = min_power_tree_bruteforce(
            Instance(inst.node_count, inst.edges, Q, min(Q)), Q
        )
        assert comp.power == want, (seed, sorted(Q))
        checked += 1
    assert checked >= 30


def test_component_power_matches_evaluate():
    for seed in range(40):
        rng = random.Random(6000 + seed)
        inst = generate("uniform-random", 7, 4, 6000 + seed, edge_prob=0.5, cost_max=9)
        terms = sorted(inst.terminals)
        Q = frozenset(rng.sample(terms, 3))
        comp = min_power_component(inst, Q, 3)
        restricted = Instance(inst.node_count, inst.edges, Q, min(Q))
        assert evaluate(restricted, comp.edges).total_power == comp.power


def test_component_at_least_cheapest_pair():
    for seed in range(40):
        rng = random.Random(7000 + seed)
        inst = generate("uniform-random", 7, 5, 7000 + seed, edge_prob=0.5, cost_max=9)
        terms = sorted(inst.terminals)
        Q = sorted(rng.sample(terms, 3))
        comp = min_power_component(inst, frozenset(Q), 3)
        cheapest_pair = min(
            min_power_path(inst, a, b).power
            for i, a in enumerate(Q) for b in Q[i + 1:]
        )
        assert comp.power >= cheapest_pair


def test_validation_errors():
    inst = parse_instance("nodes 4\nedge 0 1 1\nedge 1 2 1\nedge 2 3 1\nterminals 0 1 2\nroot 0\n")
    with pytest.raises(ComponentError, match="not terminals"):
        min_power_component(inst, {0, 3}, 2)
    with pytest.raises(ComponentError, match="k_cap"):
        min_power_component(inst, {0, 1}, 5)
    with pytest.raises(ComponentError, match="exceeds"):
        min_power_component(inst, {0, 1, 2}, 2)


def test_enumerate_columns_counts():
    text = "nodes 4\nedge 0 3 1\nedge 1 3 1\nedge 2 3 1\nterminals 0 1 2\nroot 0\n"
    inst = parse_instance(text)
    cols = enumerate_columns(inst, 3)
    assert len(cols) == 9  # 3 pairs x 2 sinks + 1 triple x 3 sinks
    pair = parse_instance("nodes 2\nedge 0 1 3\nterminals 0 1\nroot 0\n")
    cols2 = enumerate_columns(pair, 3)
    assert len(cols2) == 2
    assert cols2[0].power == cols2[1].power == 6


def test_enumerate_columns_k2_matches_paths():
    inst = generate("uniform-random", 7, 5, 8000, edge_prob=0.4, cost_max=9)
    for col in enumerate_columns(inst, 2):
        a, b = sorted(col.terminal_set)
        assert col.power == min_power_path(inst, a, b).power


def test_column_guard():
    inst = generate("uniform-random", 40, 40, 1, edge_prob=0.1)
    with pytest.raises(ComponentError, match="guard"):
        enumerate_columns(inst, 4)
