"""Tree extraction from connected edge sets under the power objective.

Deleting an edge never increases power (node payments are maxima over
incident edges), so greedily removing the non-bridge edge whose removal
helps most, then stripping leaves outside the required set, yields a tree
whose power is at most the power of the input edge set.
"""

from __future__ import annotations

from fractions import Fraction

from .instance import Instance


def _bridges(adj: dict[int, list[tuple[int, int]]]) -> set[int]:
    """Edge ids that are bridges of the graph given as adjacency lists."""
    disc: dict[int, int] = {}
    low: dict[int, int] = {}
    bridges: set[int] = set()
    clock = 0
    for root in sorted(adj):
        if root in disc:
            continue
        disc[root] = low[root] = clock
        clock += 1
        stack = [(root, -1, iter(adj[root]))]
        while stack:
            node, parent_edge, neighbors = stack[-1]
            advanced = False
            for other, eid in neighbors:
                if eid == parent_edge:
                    continue
                if other in disc:
                    low[node] = min(low[node], disc[other])
                else:
                    disc[other] = low[other] = clock
                    clock += 1
                    stack.append((other, eid, iter(adj[other])))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                if stack:
                    pnode = stack[-1][0]
                    low[pnode] = min(low[pnode], low[node])
                    if low[node] > disc[pnode]:
                        bridges.add(parent_edge)
    return bridges


def extract_tree(instance: Instance, edge_ids, required: frozenset[int]) -> list[int]:
    """Reduce a connected edge set to a tree spanning `required`.

    Repeatedly deletes, among non-bridge edges, the one whose removal most
    reduces power (ties by smallest edge id), then strips non-required
    leaves. The result's power never exceeds the input edge set's power.
    """
    ids = sorted(set(edge_ids))
    current = set(ids)

    def adjacency() -> dict[int, list[tuple[int, int]]]:
        adj: dict[int, list[tuple[int, int]]] = {}
        for eid in sorted(current):
            u, v, _ = instance.edges[eid]
            adj.setdefault(u, []).append((v, eid))
            adj.setdefault(v, []).append((u, eid))
        return adj

    # connectivity of the required set within the selection
    adj = adjacency()
    if required:
        start = next(iter(required))
        seen = {start}
        stack = [start]
        while stack:
            node = stack.pop()
            for other, _ in adj.get(node, ()):
                if other not in seen:
                    seen.add(other)
                    stack.append(other)
        if not required <= seen:
            raise ValueError("edge set does not connect the required nodes")

    while True:
        adj = adjacency()
        n_nodes = len(adj)
        comps = 0
        seen: set[int] = set()
        for node in adj:
            if node in seen:
                continue
            comps += 1
            stack = [node]
            seen.add(node)
            while stack:
                cur = stack.pop()
                for other, _ in adj[cur]:
                    if other not in seen:
                        seen.add(other)
                        stack.append(other)
        if len(current) == n_nodes - comps:
            break  # acyclic
        bridge_ids = _bridges(adj)
        node_max: dict[int, Fraction] = {}
        for eid in current:
            u, v, c = instance.edges[eid]
            for node in (u, v):
                if node_max.get(node, Fraction(-1)) < c:
                    node_max[node] = c
        best: tuple[Fraction, int] | None = None
        for eid in sorted(current - bridge_ids):
            u, v, c = instance.edges[eid]
            delta = Fraction(0)
            for node in (u, v):
                if node_max[node] == c:
                    rest = [instance.edges[e][2] for _, e in adj[node] if e != eid]
                    new_max = max(rest) if rest else Fraction(0)
                    if not rest:
                        delta -= node_max[node]
                    else:
                        delta -= node_max[node] - new_max
            if best is None or (delta, eid) < best:
                best = (delta, eid)
        current.remove(best[1])

    # strip leaves outside the required set
    while True:
        deg: dict[int, int] = {}
        for eid in current:
            u, v, _ = instance.edges[eid]
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        drop = None
        for eid in sorted(current):
            u, v, _ = instance.edges[eid]
            if (deg[u] == 1 and u not in required) or (deg[v] == 1 and v not in required):
                drop = eid
                break
        if drop is None:
            break
        current.remove(drop)
    return sorted(current)
