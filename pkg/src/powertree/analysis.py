"""Executable analysis quantities: harmonic deletion-time bounds, the
heavy/middle/light edge classification, the rooted binarization of a full
component, and the random witness-tree machinery with empirical checks.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import sqrt

from .trees import CostedTree, TreeError, validate_full_component


class AnalysisError(ValueError):
    """Raised on invalid analysis queries or violated structural properties."""


def harmonic(n: int) -> Fraction:
    """n-th harmonic number, exact."""
    if n < 0:
        raise AnalysisError(f"harmonic number needs n >= 0, got {n}")
    return sum((Fraction(1, i) for i in range(1, n + 1)), Fraction(0))


def delta_spanning(m, i: int) -> Fraction:
    """Expected deletion rounds of a node's i most expensive edges, spanning
    case: M * H_i, exact."""
    if i < 1:
        raise AnalysisError(f"i must be >= 1, got {i}")
    return Fraction(m) * harmonic(i)


def delta_steiner(m, i: int) -> float:
    """Steiner-case bound: (1/2^i) M H_i + (1 - 1/2^i) sum_q (1/2^q) M H_{q+i}.

    The series is truncated adaptively: iteration stops once the tail bound
    (H_{q+i} + 2) / 2^q drops below 1e-12, leaving absolute error below
    1e-10 * M.
    """
    if i < 1:
        raise AnalysisError(f"i must be >= 1, got {i}")
    m = float(m)
    if m <= 0:
        raise AnalysisError(f"M must be positive, got {m}")
    h = float(harmonic(i))
    total = 0.0
    h_qi = h
    q = 0
    while True:
        q += 1
        h_qi += 1.0 / (q + i)
        total += h_qi / 2.0**q
        if (h_qi + 2.0) / 2.0**q < 1e-12:
            break
    scale = 0.5**i
    return m * (scale * h + (1.0 - scale) * total)


@dataclass(frozen=True)
class DeltaReport:
    kind: str
    i_max: int
    values: tuple[float, ...]
    increasing: bool
    concave_increments: bool


def check_delta_properties(kind: str, i_max: int, m=1) -> DeltaReport:
    """Verify that the delta bounds increase with i at decreasing speed."""
    if kind not in ("spanning", "steiner"):
        raise AnalysisError(f"unknown kind {kind!r}")
    if not 1 <= i_max <= 50:
        raise AnalysisError(f"i_max must be in [1, 50], got {i_max}")
    tol = 1e-9 * float(m)
    if kind == "spanning":
        values = [float(delta_spanning(m, i)) for i in range(1, i_max + 2)]
    else:
        values = [delta_steiner(m, i) for i in range(1, i_max + 2)]
    deltas = [0.0] + values  # delta^0 = 0
    increasing = all(deltas[i] <= deltas[i + 1] + tol for i in range(1, i_max + 1))
    concave = all(
        deltas[i] - deltas[i - 1] >= deltas[i + 1] - deltas[i] - tol
        for i in range(1, i_max + 1)
    )
    report = DeltaReport(kind, i_max, tuple(values[:i_max]), increasing, concave)
    if not (increasing and concave):
        raise AnalysisError(f"delta properties violated: {report}")
    return report


def theoretical_factor(mode: str):
    """Headline approximation factors: 3/2 (spanning), 3 ln 4 - 9/4 (steiner).

    The LP tolerance epsilon is reported separately by callers, never folded
    into these values.
    """
    if mode == "spanning":
        return delta_spanning(1, 2)
    if mode == "steiner":
        return delta_steiner(1, 2)
    raise AnalysisError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# heavy / middle / light classification


@dataclass(frozen=True)
class EdgeClassification:
    heavy: tuple[int, ...]
    middle: tuple[int, ...]
    light: tuple[int, ...]
    gamma_h: Fraction
    gamma_m: Fraction
    alpha: Fraction


def classify_edges(tree: CostedTree) -> EdgeClassification:
    """Partition tree edges by how many endpoint powers they define.

    An edge is heavy if it is the max-cost incident edge of both endpoints
    (ties to the smallest edge index), middle if of exactly one, light
    otherwise; then p = (2*gamma_h + gamma_m) * c exactly.
    """
    if not tree.edges:
        raise AnalysisError("empty tree has no classification")
    total_cost = tree.cost()
    if total_cost == 0:
        raise AnalysisError("zero-cost tree has no edge classification")
    defining: dict[int, int] = {}
    incident: dict[int, list[int]] = {}
    for idx, (u, v, _) in enumerate(tree.edges):
        incident.setdefault(u, []).append(idx)
        incident.setdefault(v, []).append(idx)
    for node, idxs in incident.items():
        defining[node] = max(idxs, key=lambda e: (tree.edges[e][2], -e))
    heavy, middle, light = [], [], []
    cost_h = Fraction(0)
    cost_m = Fraction(0)
    for idx, (u, v, c) in enumerate(tree.edges):
        hits = (defining[u] == idx) + (defining[v] == idx)
        if hits == 2:
            heavy.append(idx)
            cost_h += c
        elif hits == 1:
            middle.append(idx)
            cost_m += c
        else:
            light.append(idx)
    gamma_h = cost_h / total_cost
    gamma_m = cost_m / total_cost
    return EdgeClassification(
        tuple(heavy), tuple(middle), tuple(light), gamma_h, gamma_m,
        2 * gamma_h + gamma_m,
    )


# ---------------------------------------------------------------------------
# rooted binarization


@dataclass
class MarkedBinaryTree:
    """Rooted binary form of a full component.

    Bin edges are keyed by their lower endpoint (every non-root node has one
    parent edge). Dummy edges cost 0; each bin edge carries the original edge
    indices it stands for (several after degree-2 shortcuts, none for pure
    dummies). Built unmarked; witness sampling supplies marks separately.
    """

    source: CostedTree
    root: int
    parent: dict[int, int]
    children: dict[int, tuple[int, ...]]
    edge_origs: dict[int, tuple[int, ...]]
    edge_cost: dict[int, Fraction]
    dummy_edges: frozenset[int]
    levels: dict[int, int]
    terminals: frozenset[int]
    orig_to_bin: dict[int, int]

    def internal_nodes(self) -> list[int]:
        return sorted(n for n, ch in self.children.items() if ch)

    def path_keys(self, a: int, b: int) -> tuple[int, ...]:
        """Bin edges (child keys) on the tree path between two nodes."""
        seen = {}
        x = a
        depth_a = self.levels[a]
        depth_b = self.levels[b]
        ka: list[int] = []
        kb: list[int] = []
        while depth_a > depth_b:
            ka.append(x)
            x = self.parent[x]
            depth_a -= 1
        y = b
        while depth_b > depth_a:
            kb.append(y)
            y = self.parent[y]
            depth_b -= 1
        while x != y:
            ka.append(x)
            kb.append(y)
            x = self.parent[x]
            y = self.parent[y]
        return tuple(ka + kb[::-1])


def build_binary_tree(tree: CostedTree) -> MarkedBinaryTree:
    """Split one edge (smallest index), root there, binarize with cost-0
    dummy chains placing the most expensive child edges on the highest
    consecutive levels, then shortcut single-child nodes.
    """
    validate_full_component(tree)
    if len(tree.terminals) < 2:
        raise AnalysisError("binarization needs at least 2 terminals")
    next_id = max(tree.nodes) + 1

    adj: dict[int, list[tuple[int, int]]] = {}
    for idx, (u, v, _) in enumerate(tree.edges):
        adj.setdefault(u, []).append((v, idx))
        adj.setdefault(v, []).append((u, idx))

    root = next_id
    next_id += 1
    u0, v0, c0 = tree.edges[0]
    a0, b0 = (u0, v0) if u0 < v0 else (v0, u0)

    parent: dict[int, int] = {root: -1, a0: root, b0: root}
    children: dict[int, list[int]] = {root: [a0, b0]}
    edge_origs: dict[int, tuple[int, ...]] = {a0: (0,), b0: (0,)}
    edge_cost: dict[int, Fraction] = {a0: c0, b0: c0}
    dummy: set[int] = set()

    # rooted child lists on the original tree
    stack = [(a0, b0), (b0, a0)]
    raw_children: dict[int, list[tuple[int, int]]] = {}
    while stack:
        node, par = stack.pop()
        kids = [(other, idx) for other, idx in sorted(adj.get(node, ())) if other != par]
        raw_children[node] = kids
        for other, _ in kids:
            stack.append((other, node))

    def attach(p: int, child: int, origs: tuple[int, ...], cost: Fraction, is_dummy: bool) -> None:
        parent[child] = p
        children.setdefault(p, []).append(child)
        edge_origs[child] = origs
        edge_cost[child] = cost
        if is_dummy:
            dummy.add(child)

    def binarize(node: int) -> None:
        nonlocal next_id
        kids = raw_children.get(node, [])
        if len(kids) <= 2:
            for other, idx in kids:
                attach(node, other, (idx,), tree.edges[idx][2], False)
                binarize(other)
            return
        # chain: most expensive child edge highest, ties to smallest index
        ordered = sorted(kids, key=lambda ki: (-tree.edges[ki[1]][2], ki[1]))
        holder = node
        for pos, (other, idx) in enumerate(ordered):
            if pos < len(ordered) - 2:
                attach(holder, other, (idx,), tree.edges[idx][2], False)
                w = next_id
                next_id += 1
                attach(holder, w, (), Fraction(0), True)
                holder = w
            else:
                attach(holder, other, (idx,), tree.edges[idx][2], False)
        for other, _ in kids:
            binarize(other)

    children.setdefault(a0, [])
    children.setdefault(b0, [])
    binarize(a0)
    binarize(b0)

    # shortcut single-child nodes (the root keeps both halves)
    changed = True
    while changed:
        changed = False
        for node in list(children):
            kids = children.get(node, [])
            if node != root and len(kids) == 1 and node in parent:
                child = kids[0]
                p = parent[node]
                children[p] = [child if x == node else x for x in children[p]]
                parent[child] = p
                edge_origs[child] = edge_origs[node] + edge_origs[child]
                edge_cost[child] = max(edge_cost[node], edge_cost[child])
                if child in dummy or node in dummy:
                    dummy.discard(child)  # merged edges carry original costs
                del children[node]
                del parent[node]
                del edge_origs[node]
                del edge_cost[node]
                changed = True
                break

    levels = {root: 0}
    queue = [root]
    while queue:
        node = queue.pop()
        for ch in children.get(node, ()):  # children order preserved
            levels[ch] = levels[node] + 1
            queue.append(ch)

    orig_to_bin: dict[int, int] = {}
    for child, origs in edge_origs.items():
        for o in origs:
            if o == 0 and child == b0:
                continue  # the split edge maps to its first half
            orig_to_bin[o] = child
    orig_to_bin.setdefault(0, a0)

    bad = [n for n, ch in children.items() if len(ch) not in (0, 2)]
    if bad:
        raise AnalysisError(f"internal error: non-binary nodes {bad}")
    return MarkedBinaryTree(
        source=tree,
        root=root,
        parent={k: v for k, v in parent.items() if k != root},
        children={k: tuple(v) for k, v in children.items()},
        edge_origs=edge_origs,
        edge_cost=edge_cost,
        dummy_edges=frozenset(dummy),
        levels=levels,
        terminals=tree.terminals,
        orig_to_bin=orig_to_bin,
    )


# ---------------------------------------------------------------------------
# witness trees


@dataclass
class WitnessStructure:
    sbin: MarkedBinaryTree
    marks: frozenset[int]  # marked bin edges, keyed by lower endpoint
    witness_edges: tuple[tuple[int, int], ...]
    witness_map: dict[int, frozenset[tuple[int, int]]]  # bin edge -> T* edges

    def witness_set(self, orig_edge: int) -> frozenset[tuple[int, int]]:
        return self.witness_map[self.sbin.orig_to_bin[orig_edge]]

    def validate(self) -> None:
        """T* must be a spanning tree on the terminals; every original edge
        must have a nonempty witness set."""
        terms = sorted(self.sbin.terminals)
        if len(self.witness_edges) != len(terms) - 1:
            raise AnalysisError(
                f"witness tree has {len(self.witness_edges)} edges for {len(terms)} terminals"
            )
        parent = {t: t for t in terms}

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.witness_edges:
            ra, rb = find(a), find(b)
            if ra == rb:
                raise AnalysisError("witness tree contains a cycle")
            parent[ra] = rb
        if len({find(t) for t in terms}) != 1:
            raise AnalysisError("witness tree is disconnected")
        for orig in range(len(self.sbin.source.edges)):
            if not self.witness_set(orig):
                raise AnalysisError(f"empty witness set for edge {orig}")


def _pair_paths(sbin: MarkedBinaryTree) -> dict[tuple[int, int], tuple[int, ...]]:
    terms = sorted(sbin.terminals)
    return {
        (a, b): sbin.path_keys(a, b)
        for i, a in enumerate(terms)
        for b in terms[i + 1:]
    }


def _draw_marks(sbin: MarkedBinaryTree, rng: random.Random) -> frozenset[int]:
    marks = set()
    for node in sbin.internal_nodes():
        first, second = sbin.children[node]
        marks.add(first if rng.random() < 0.5 else second)
    return frozenset(marks)


def _derive(sbin: MarkedBinaryTree, marks: frozenset[int], pair_paths) -> WitnessStructure:
    witness_edges = []
    witness_map: dict[int, set[tuple[int, int]]] = {key: set() for key in sbin.parent}
    for pair, keys in pair_paths.items():
        marked = sum(1 for k in keys if k in marks)
        if marked == 1:
            witness_edges.append(pair)
            for k in keys:
                witness_map[k].add(pair)
    return WitnessStructure(
        sbin, marks, tuple(witness_edges),
        {k: frozenset(v) for k, v in witness_map.items()},
    )


def sample_witness(sbin: MarkedBinaryTree, seed: int) -> WitnessStructure:
    """Mark one child edge per internal node uniformly at random and derive
    the witness tree T* (terminal pairs whose bin path holds exactly one
    mark) together with all witness sets."""
    rng = random.Random(seed)
    return _derive(sbin, _draw_marks(sbin, rng), _pair_paths(sbin))


@dataclass(frozen=True)
class WitnessReport:
    node: int
    i: int
    trials: int
    freq_s_equals_d: float
    expected_s_equals_d: float
    binomial_sigma: float
    wsize_histogram: dict[int, int]
    mean_harmonic: float
    delta_bound: float
    max_within_component_edges: int


def witness_stats(
    tree: CostedTree,
    v: int,
    i: int,
    trials: int,
    seed: int,
) -> WitnessReport:
    """Empirical distribution of the witness machinery around node v.

    Per trial: check T* is a terminal spanning tree, locate s' (the unmarked
    descent of the expanded chain T') and d' (its only leaf free of the i
    top edges), count witness edges inside C', and collect |W^i(v)|. The
    frequency of s' = d' estimates 1/2^i; the mean of H_{|W^i(v)|} is
    compared one-sidedly against the closed-form bound.
    """
    if trials < 1:
        raise AnalysisError("trials must be >= 1")
    sbin = build_binary_tree(tree)
    incident: list[tuple[Fraction, int]] = []
    for idx, (a, b, c) in enumerate(tree.edges):
        if v in (a, b):
            incident.append((c, idx))
    d_v = len(incident)
    if d_v < 3:
        raise AnalysisError(f"node {v} has degree {d_v} < 3")
    if not 1 <= i < d_v:
        raise AnalysisError(f"i must be in [1, {d_v - 1}], got {i}")
    ranked = sorted(incident, key=lambda ce: (-ce[0], ce[1]))
    top_edges = [idx for _, idx in ranked[:i]]
    f_keys = [sbin.orig_to_bin[idx] for idx in top_edges]
    if len(set(f_keys)) != i:
        raise AnalysisError("top edges collapse onto one bin edge; pick another node")

    tprime: set[int] = set()
    for key in f_keys:
        p = sbin.parent[key]
        for sib in sbin.children[p]:
            tprime.add(sib)
    t_nodes = set()
    for key in tprime:
        t_nodes.add(key)
        t_nodes.add(sbin.parent[key])
    r_prime = min(t_nodes, key=lambda n: sbin.levels[n])
    t_leaves = [n for n in t_nodes if not any(ch in tprime for ch in sbin.children.get(n, ()))]
    f_endpoints = set()
    for key in f_keys:
        f_endpoints.add(key)
        f_endpoints.add(sbin.parent[key])
    d_candidates = [n for n in t_leaves if n not in f_endpoints]
    if len(d_candidates) != 1:
        raise AnalysisError(
            "d' is not unique: the i most expensive edges of v must be child "
            "edges in the binarization (paper handles other cases only qualitatively)"
        )
    d_prime = d_candidates[0]

    pair_paths = _pair_paths(sbin)
    hits = 0
    histogram: dict[int, int] = {}
    harmonic_sum = 0.0
    max_within = 0
    for trial in range(trials):
        rng = random.Random(f"{seed}:{trial}")
        marks = _draw_marks(sbin, rng)
        ws = _derive(sbin, marks, pair_paths)
        ws.validate()

        # s': unmarked descent within T'
        node = r_prime
        while True:
            nxt = [ch for ch in sbin.children.get(node, ()) if ch in tprime and ch not in marks]
            if not nxt:
                break
            node = nxt[0]
        if node == d_prime:
            hits += 1

        # C': expand T' leaves by unmarked descents in the full tree
        leaves_c: set[int] = set()
        for leaf in t_leaves:
            x = leaf
            while sbin.children.get(x):
                x = next(ch for ch in sbin.children[x] if ch not in marks)
            leaves_c.add(x)
        within = sum(
            1 for a, b in ws.witness_edges if a in leaves_c and b in leaves_c
        )
        max_within = max(max_within, within)
        if within > i:
            raise AnalysisError(
                f"trial {trial}: {within} witness edges inside C' exceeds i={i}"
            )

        wset: set[tuple[int, int]] = set()
        for key in f_keys:
            wset |= ws.witness_map[key]
        size = len(wset)
        histogram[size] = histogram.get(size, 0) + 1
        harmonic_sum += float(harmonic(size))

    expected = 0.5**i
    sigma = sqrt(expected * (1 - expected) / trials)
    return WitnessReport(
        node=v,
        i=i,
        trials=trials,
        freq_s_equals_d=hits / trials,
        expected_s_equals_d=expected,
        binomial_sigma=sigma,
        wsize_histogram=dict(sorted(histogram.items())),
        mean_harmonic=harmonic_sum / trials,
        delta_bound=delta_steiner(1, i),
        max_within_component_edges=max_within,
    )
