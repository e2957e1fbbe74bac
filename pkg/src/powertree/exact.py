"""Exact brute-force min-power solver and min-cost baselines.

The exact solver enumerates candidate trees by contraction/deletion growth
from the root with a running power lower bound; it is meant for desk-scale
instances (see the node guard). The baselines are a minimum spanning tree
(spanning case) and exact Dreyfus-Wagner / metric-closure min-cost Steiner
trees, all evaluated under the power objective.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from itertools import combinations

from .instance import Instance, PowerTree, evaluate


class SolverError(ValueError):
    """Raised on guard violations or infeasible solver inputs."""


def _require_connected(instance: Instance, required: frozenset[int]) -> None:
    seen = {next(iter(required))}
    stack = list(seen)
    while stack:
        node = stack.pop()
        for eid in instance.adjacency[node]:
            other = instance.other_end(eid, node)
            if other not in seen:
                seen.add(other)
                stack.append(other)
    if not required <= seen:
        raise SolverError("required nodes are disconnected")


def exact_min_power(instance: Instance, mode: str = "steiner", node_guard: int = 12) -> PowerTree:
    """Global minimum-power tree by exhaustive branch-and-bound.

    mode="spanning" requires every node; mode="steiner" requires the terminal
    set. Ties are resolved deterministically (lexicographically smallest
    sorted edge-id list among the enumerated optima). The node guard bounds
    the default instance size; callers may raise it for structured instances
    at their own risk.
    """
    if mode not in ("steiner", "spanning"):
        raise SolverError(f"unknown mode {mode!r}")
    if instance.node_count > node_guard:
        raise SolverError(f"node count {instance.node_count} exceeds guard {node_guard}")
    required = frozenset(range(instance.node_count)) if mode == "spanning" else instance.terminals
    _require_connected(instance, required)
    if len(required) == 1 and mode == "steiner":
        return evaluate(instance, [])

    edges = instance.edges
    m = len(edges)
    root = instance.root

    # upper bound seed from the cost baseline keeps the search shallow
    try:
        seed_tree = baseline_min_cost(instance, mode, allow_fallback=True)
        best_power: Fraction | None = seed_tree.total_power
    except SolverError:
        best_power = None
    best_edges: tuple[int, ...] | None = None

    in_tree = [False] * instance.node_count
    in_tree[root] = True
    node_max: dict[int, Fraction] = {root: Fraction(0)}
    banned = [False] * m
    min_incident: list[Fraction | None] = [None] * instance.node_count

    def lower_bound(power: Fraction, covered: int) -> Fraction | None:
        extra = Fraction(0)
        for t in required:
            if in_tree[t]:
                continue
            cheapest = None
            for eid in instance.adjacency[t]:
                if banned[eid]:
                    continue
                c = edges[eid][2]
                if cheapest is None or c < cheapest:
                    cheapest = c
            if cheapest is None:
                return None  # t has no usable edge at all
            extra += cheapest
        return power + extra

    def feasible() -> bool:
        parent = list(range(instance.node_count))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for eid in range(m):
            if banned[eid]:
                continue
            u, v, _ = edges[eid]
            parent[find(u)] = find(v)
        r0 = find(root)
        return all(find(t) == r0 for t in required)

    order = sorted(range(m), key=lambda e: (edges[e][2], e))
    selected: list[int] = []

    def record(power: Fraction) -> None:
        nonlocal best_power, best_edges
        cand = tuple(sorted(selected))
        if best_power is None or power < best_power or (
            power == best_power and (best_edges is None or cand < best_edges)
        ):
            best_power = power
            best_edges = cand

    def recurse(power: Fraction, covered: int) -> None:
        if covered == len(required):
            record(power)
            return
        lb = lower_bound(power, covered)
        if lb is None or (best_power is not None and lb > best_power):
            return
        pick = None
        for eid in order:
            if banned[eid]:
                continue
            u, v, _ = edges[eid]
            if in_tree[u] != in_tree[v]:
                pick = eid
                break
        if pick is None:
            return
        u, v, c = edges[pick]
        inner, outer = (u, v) if in_tree[u] else (v, u)

        # include branch
        selected.append(pick)
        in_tree[outer] = True
        old_inner = node_max[inner]
        node_max[inner] = max(old_inner, c)
        node_max[outer] = c
        delta = (node_max[inner] - old_inner) + c
        recurse(power + delta, covered + (1 if outer in required else 0))
        del node_max[outer]
        node_max[inner] = old_inner
        in_tree[outer] = False
        selected.pop()

        # exclude branch
        banned[pick] = True
        if feasible():
            recurse(power, covered)
        banned[pick] = False

    recurse(Fraction(0), 1 if root in required else 0)
    if best_edges is None:
        if best_power is not None:
            # only the baseline seed was optimal and the search never matched it;
            # cannot happen, but fail loudly rather than return a wrong tree
            raise SolverError("internal error: search found no tree")
        raise SolverError("no feasible tree found")
    return evaluate(instance, best_edges)


# ---------------------------------------------------------------------------
# shortest paths (by cost) with edge predecessors, exact arithmetic


def _dijkstra_cost(instance: Instance, source: int) -> tuple[list[Fraction | None], list[int | None]]:
    dist: list[Fraction | None] = [None] * instance.node_count
    pred_edge: list[int | None] = [None] * instance.node_count
    dist[source] = Fraction(0)
    heap: list[tuple[Fraction, int]] = [(Fraction(0), source)]
    done = [False] * instance.node_count
    while heap:
        d, node = heapq.heappop(heap)
        if done[node]:
            continue
        done[node] = True
        for eid in instance.adjacency[node]:
            other = instance.other_end(eid, node)
            nd = d + instance.cost(eid)
            if dist[other] is None or nd < dist[other]:
                dist[other] = nd
                pred_edge[other] = eid
                heapq.heappush(heap, (nd, other))
    return dist, pred_edge


def _walk_path(instance: Instance, pred_edge: list[int | None], source: int, target: int) -> list[int]:
    out = []
    node = target
    while node != source:
        eid = pred_edge[node]
        if eid is None:
            raise SolverError(f"node {target} unreachable from {source}")
        out.append(eid)
        node = instance.other_end(eid, node)
    return out


def _kruskal(instance: Instance, edge_ids: list[int], nodes: set[int]) -> list[int]:
    parent = {v: v for v in nodes}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    chosen = []
    for eid in sorted(edge_ids, key=lambda e: (instance.cost(e), e)):
        u, v, _ = instance.edges[eid]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            chosen.append(eid)
    return chosen


def _prune_to_terminals(instance: Instance, edge_ids: list[int], required: frozenset[int]) -> list[int]:
    edge_set = set(edge_ids)
    while True:
        deg: dict[int, int] = {}
        for eid in edge_set:
            u, v, _ = instance.edges[eid]
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        removable = None
        for eid in sorted(edge_set):
            u, v, _ = instance.edges[eid]
            if (deg[u] == 1 and u not in required) or (deg[v] == 1 and v not in required):
                removable = eid
                break
        if removable is None:
            return sorted(edge_set)
        edge_set.remove(removable)


def _dreyfus_wagner(instance: Instance) -> list[int]:
    """Exact min-cost Steiner tree edges via the terminal-subset DP."""
    terms = sorted(instance.terminals)
    k = len(terms)
    if k == 1:
        return []
    n = instance.node_count
    dist: list[list[Fraction | None]] = []
    preds: list[list[int | None]] = []
    for s in range(n):
        d, p = _dijkstra_cost(instance, s)
        dist.append(d)
        preds.append(p)

    INFEASIBLE = None
    full = (1 << k) - 1
    dp: list[list[Fraction | None]] = [[INFEASIBLE] * n for _ in range(1 << k)]
    choice: list[list[tuple | None]] = [[None] * n for _ in range(1 << k)]
    for i, t in enumerate(terms):
        for v in range(n):
            dp[1 << i][v] = dist[t][v]
            choice[1 << i][v] = ("leaf", t)

    for mask in range(1, full + 1):
        if mask & (mask - 1) == 0:
            continue
        low = mask & (-mask)
        sub = (mask - 1) & mask
        while sub:
            if sub & low:
                rest = mask ^ sub
                for v in range(n):
                    a, b = dp[sub][v], dp[rest][v]
                    if a is not None and b is not None:
                        cand = a + b
                        if dp[mask][v] is None or cand < dp[mask][v]:
                            dp[mask][v] = cand
                            choice[mask][v] = ("merge", sub)
            sub = (sub - 1) & mask
        # grow step: one Dijkstra pass over the dp labels
        heap = [(dp[mask][v], v) for v in range(n) if dp[mask][v] is not None]
        heapq.heapify(heap)
        settled = [False] * n
        while heap:
            d, v = heapq.heappop(heap)
            if settled[v] or dp[mask][v] != d:
                continue
            settled[v] = True
            for eid in instance.adjacency[v]:
                other = instance.other_end(eid, v)
                nd = d + instance.cost(eid)
                if dp[mask][other] is None or nd < dp[mask][other]:
                    dp[mask][other] = nd
                    choice[mask][other] = ("grow", v, eid)
                    heapq.heappush(heap, (nd, other))

    target = terms[0]
    if dp[full][target] is None:
        raise SolverError("terminals are disconnected")

    edges: set[int] = set()

    def reconstruct(mask: int, v: int) -> None:
        ch = choice[mask][v]
        if ch is None:
            raise SolverError("internal error: missing DP choice")
        if ch[0] == "leaf":
            edges.update(_walk_path(instance, preds[ch[1]], ch[1], v))
        elif ch[0] == "merge":
            reconstruct(ch[1], v)
            reconstruct(mask ^ ch[1], v)
        else:
            _, u, eid = ch
            edges.add(eid)
            reconstruct(mask, u)

    reconstruct(full, target)
    nodes = set()
    for eid in edges:
        u, v, _ = instance.edges[eid]
        nodes.update((u, v))
    nodes.update(instance.terminals)
    tree = _kruskal(instance, sorted(edges), nodes)
    return _prune_to_terminals(instance, tree, instance.terminals)


def _metric_closure_steiner(instance: Instance) -> list[int]:
    """KMB-style heuristic: MST over the terminal metric closure, expanded."""
    terms = sorted(instance.terminals)
    if len(terms) == 1:
        return []
    dists = {}
    preds = {}
    for t in terms:
        d, p = _dijkstra_cost(instance, t)
        dists[t] = d
        preds[t] = p
    # Kruskal over terminal pairs
    pairs = []
    for a, b in combinations(terms, 2):
        if dists[a][b] is None:
            raise SolverError("terminals are disconnected")
        pairs.append((dists[a][b], a, b))
    pairs.sort(key=lambda x: (x[0], x[1], x[2]))
    parent = {t: t for t in terms}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    union_edges: set[int] = set()
    for _, a, b in pairs:
        if find(a) != find(b):
            parent[find(a)] = find(b)
            union_edges.update(_walk_path(instance, preds[a], a, b))
    nodes = set(instance.terminals)
    for eid in union_edges:
        u, v, _ = instance.edges[eid]
        nodes.update((u, v))
    tree = _kruskal(instance, sorted(union_edges), nodes)
    return _prune_to_terminals(instance, tree, instance.terminals)


def baseline_min_cost(instance: Instance, mode: str = "steiner", allow_fallback: bool = False) -> PowerTree:
    """Min-cost tree (MST / Dreyfus-Wagner / metric-closure) under the power objective.

    In spanning mode and exact steiner mode the result is a per-instance
    2-approximation for min-power via c(S) <= p(S) <= 2c(S).
    """
    if mode == "spanning":
        _require_connected(instance, frozenset(range(instance.node_count)))
        chosen = _kruskal(instance, list(range(len(instance.edges))), set(range(instance.node_count)))
        if len(chosen) != instance.node_count - 1:
            raise SolverError("graph is disconnected")
        return evaluate(instance, chosen)
    if mode != "steiner":
        raise SolverError(f"unknown mode {mode!r}")
    if len(instance.terminals) > 12:
        if not allow_fallback:
            raise SolverError("terminal count exceeds exact guard (pass allow_fallback for the metric-closure heuristic)")
        return evaluate(instance, _metric_closure_steiner(instance))
    return evaluate(instance, _dreyfus_wagner(instance))
