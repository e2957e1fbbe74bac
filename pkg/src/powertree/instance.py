"""Instance model: graphs with exact rational edge costs, power evaluation, file I/O.

Costs are `fractions.Fraction` throughout; power of a node is the maximum
cost over its incident tree edges, and tie-breaking on equal powers is
meaningful, so no floating point enters the combinatorial layers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence


class InstanceError(ValueError):
    """Raised for malformed instance files or invalid instance data."""


def parse_cost(token: str) -> Fraction:
    """Parse a cost token exactly: decimal ("2.50" -> 5/2) or rational ("5/2")."""
    try:
        if "/" in token:
            num, den = token.split("/", 1)
            value = Fraction(int(num), int(den))
        else:
            value = Fraction(token)
    except (ValueError, ZeroDivisionError) as exc:
        raise InstanceError(f"malformed cost {token!r}") from exc
    if value < 0:
        raise InstanceError(f"negative cost {token!r}")
    return value


def format_cost(value: Fraction) -> str:
    """Render a cost exactly: terminating decimal when possible, else "p/q"."""
    num, den = value.numerator, value.denominator
    if den == 1:
        return str(num)
    d, twos, fives = den, 0, 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{num}/{den}"
    digits = max(twos, fives)
    scaled = num * 10**digits // den
    text = str(scaled).rjust(digits + 1, "0")
    return f"{text[:-digits]}.{text[-digits:]}"


@dataclass(frozen=True)
class Instance:
    """Undirected graph with rational edge costs, a terminal set and a root terminal.

    Node ids are dense integers 0..node_count-1. Edges are identified by their
    index in `edges`. Immutable after construction; safe to share across threads.
    """

    node_count: int
    edges: tuple[tuple[int, int, Fraction], ...]
    terminals: frozenset[int]
    root: int
    adjacency: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.node_count <= 0:
            raise InstanceError("node count must be positive")
        seen: set[tuple[int, int]] = set()
        for u, v, cost in self.edges:
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise InstanceError(f"edge ({u},{v}) endpoint out of range")
            if u == v:
                raise InstanceError(f"self-loop at node {u}")
            if cost < 0:
                raise InstanceError(f"negative cost on edge ({u},{v})")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise InstanceError(f"duplicate edge {key}")
            seen.add(key)
        if not self.terminals:
            raise InstanceError("terminal set is empty")
        for t in self.terminals:
            if not (0 <= t < self.node_count):
                raise InstanceError(f"terminal id {t} out of range")
        if self.root not in self.terminals:
            raise InstanceError(f"root {self.root} is not a terminal")
        adj: list[list[int]] = [[] for _ in range(self.node_count)]
        for idx, (u, v, _) in enumerate(self.edges):
            adj[u].append(idx)
            adj[v].append(idx)
        object.__setattr__(self, "adjacency", tuple(tuple(a) for a in adj))
        if not self._terminals_connected():
            raise InstanceError("terminals are disconnected")

    def _terminals_connected(self) -> bool:
        start = self.root
        seen = {start}
        stack = [start]
        while stack:
            node = stack.pop()
            for eid in self.adjacency[node]:
                u, v, _ = self.edges[eid]
                other = v if u == node else u
                if other not in seen:
                    seen.add(other)
                    stack.append(other)
        return self.terminals <= seen

    def other_end(self, eid: int, node: int) -> int:
        u, v, _ = self.edges[eid]
        return v if u == node else u

    def cost(self, eid: int) -> Fraction:
        return self.edges[eid][2]

    def with_costs(self, costs: Sequence[Fraction]) -> "Instance":
        """Copy of this instance with the same structure and new edge costs."""
        if len(costs) != len(self.edges):
            raise InstanceError("cost vector length mismatch")
        new_edges = tuple((u, v, Fraction(c)) for (u, v, _), c in zip(self.edges, costs))
        return Instance(self.node_count, new_edges, self.terminals, self.root)


@dataclass(frozen=True)
class PowerTree:
    """A tree solution: edge ids, per-node powers, total power and total cost."""

    edges: tuple[int, ...]
    node_powers: Mapping[int, Fraction]
    total_power: Fraction
    total_cost: Fraction

    def to_record(self, solver: str | None = None, seed: int | None = None) -> dict:
        """JSON-compatible record; costs rendered exactly as strings."""
        rec = {
            "edges": list(self.edges),
            "node_powers": {str(v): format_cost(p) for v, p in sorted(self.node_powers.items())},
            "total_power": format_cost(self.total_power),
            "total_cost": format_cost(self.total_cost),
            "solver": solver,
            "seed": seed,
        }
        return rec


def edge_set_power(edges: Iterable[tuple[int, int, Fraction]]) -> Fraction:
    """Power of an arbitrary edge set: sum over touched nodes of max incident cost."""
    node_max: dict[int, Fraction] = {}
    for u, v, c in edges:
        for node in (u, v):
            cur = node_max.get(node)
            if cur is None or c > cur:
                node_max[node] = c
    return sum(node_max.values(), Fraction(0))


def evaluate(instance: Instance, edge_ids: Sequence[int]) -> PowerTree:
    """Evaluate an acyclic edge set spanning all terminals as a PowerTree.

    Raises InstanceError on a cyclic edge set or when some terminal is not
    connected to the others by the selected edges.
    """
    ids = list(edge_ids)
    if len(set(ids)) != len(ids):
        raise InstanceError("cyclic edge set (duplicate edge id)")
    parent = list(range(instance.node_count))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    node_powers: dict[int, Fraction] = {}
    total_cost = Fraction(0)
    for eid in ids:
        if not (0 <= eid < len(instance.edges)):
            raise InstanceError(f"edge id {eid} out of range")
        u, v, c = instance.edges[eid]
        ru, rv = find(u), find(v)
        if ru == rv:
            raise InstanceError("cyclic edge set")
        parent[ru] = rv
        total_cost += c
        for node in (u, v):
            cur = node_powers.get(node)
            if cur is None or c > cur:
                node_powers[node] = c
    roots = {find(t) for t in instance.terminals}
    if len(roots) > 1:
        raise InstanceError("edge set does not span all terminals")
    if not ids and len(instance.terminals) == 1:
        node_powers = {next(iter(instance.terminals)): Fraction(0)}
    total_power = sum(node_powers.values(), Fraction(0))
    return PowerTree(tuple(sorted(ids)), node_powers, total_power, total_cost)


def parse_instance(text: str) -> Instance:
    """Parse the instance file format (one directive per line, '#' comments)."""
    node_count: int | None = None
    edges: list[tuple[int, int, Fraction]] = []
    terminals: set[int] | None = None
    root: int | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "nodes" and len(parts) == 2:
                node_count = int(parts[1])
            elif parts[0] == "edge" and len(parts) == 4:
                edges.append((int(parts[1]), int(parts[2]), parse_cost(parts[3])))
            elif parts[0] == "terminals" and len(parts) >= 2:
                terminals = {int(p) for p in parts[1:]}
            elif parts[0] == "root" and len(parts) == 2:
                root = int(parts[1])
            else:
                raise InstanceError(f"malformed line {lineno}: {raw.strip()!r}")
        except InstanceError:
            raise
        except ValueError as exc:
            raise InstanceError(f"malformed line {lineno}: {raw.strip()!r}") from exc
    if node_count is None:
        raise InstanceError("missing 'nodes' directive")
    if terminals is None:
        raise InstanceError("missing 'terminals' directive")
    if root is None:
        raise InstanceError("missing 'root' directive")
    return Instance(node_count, tuple(edges), frozenset(terminals), root)


def serialize(instance: Instance) -> str:
    lines = [f"nodes {instance.node_count}"]
    for u, v, c in instance.edges:
        lines.append(f"edge {u} {v} {format_cost(c)}")
    lines.append("terminals " + " ".join(str(t) for t in sorted(instance.terminals)))
    lines.append(f"root {instance.root}")
    return "\n".join(lines) + "\n"


def reduce_cost_to_power(instance: Instance) -> Instance:
    """Min-cost to min-power reduction: each edge becomes a 3-edge path.

    Edge (u,v,c) turns into u-x (cost 0), x-y (cost c/2), y-v (cost 0) with
    fresh nodes x,y; terminals and root are unchanged. The min-power optimum
    of the output equals the min-cost Steiner optimum of the input.
    """
    n = instance.node_count
    new_edges: list[tuple[int, int, Fraction]] = []
    for idx, (u, v, c) in enumerate(instance.edges):
        x = n + 2 * idx
        y = n + 2 * idx + 1
        new_edges.append((u, x, Fraction(0)))
        new_edges.append((x, y, c / 2))
        new_edges.append((y, v, Fraction(0)))
    return Instance(n + 2 * len(instance.edges), tuple(new_edges), instance.terminals, instance.root)
