"""Undirected graphs stored as reversal-closed sets of directed edges, plus colorings."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import networkx as nx

from ..errors import DomainError, ValidationError

COLORS = (1, 2, 3)
# component c of a three-component graph is colored with ROTATIONS[c] applied to c0
ROTATIONS = (
    {1: 1, 2: 2, 3: 3},
    {1: 2, 2: 3, 3: 1},
    {1: 3, 2: 1, 3: 2},
)


@dataclass(frozen=True)
class Graph:
    node_count: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        if not isinstance(self.node_count, int) or self.node_count < 1:
            raise ValidationError(f"node count must be a positive integer, got {self.node_count!r}")
        edges = frozenset((int(a), int(b)) for a, b in self.edges)
        for a, b in edges:
            if not (0 <= a < self.node_count and 0 <= b < self.node_count):
                raise ValidationError(f"edge ({a}, {b}) leaves the node range")
            if a == b:
                raise ValidationError(f"self-loop at node {a}")
            if (b, a) not in edges:
                raise ValidationError(f"edge ({a}, {b}) lacks its reverse")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_undirected(cls, node_count: int, pairs: Iterable[Sequence[int]]) -> "Graph":
        edges = set()
        for pair in pairs:
            if len(pair) != 2:
                raise ValidationError(f"edge {pair!r} is not a pair")
            a, b = pair
            edges.add((a, b))
            edges.add((b, a))
        return cls(node_count, frozenset(edges))

    @cached_property
    def directed_edges(self) -> tuple[tuple[int, int], ...]:
        """Canonical (sorted) order of directed edges."""
        return tuple(sorted(self.edges))

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {e: j for j, e in enumerate(self.directed_edges)}

    @cached_property
    def reverse_index(self) -> tuple[int, ...]:
        idx = self.edge_index
        return tuple(idx[(b, a)] for a, b in self.directed_edges)

    @cached_property
    def sources(self) -> tuple[int, ...]:
        return tuple(a for a, _ in self.directed_edges)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self.node_count
        for a, _ in self.edges:
            deg[a] += 1
        return tuple(deg)

    @property
    def edge_label_count(self) -> int:
        return len(self.edges)

    def undirected_edges(self) -> list[tuple[int, int]]:
        return [(a, b) for a, b in self.directed_edges if a < b]

    def components(self) -> list[list[int]]:
        """Connected components as sorted node lists, ordered by smallest node."""
        adj: list[list[int]] = [[] for _ in range(self.node_count)]
        for a, b in self.edges:
            adj[a].append(b)
        seen = [False] * self.node_count
        comps = []
        for start in range(self.node_count):
            if seen[start]:
                continue
            seen[start] = True
            stack, comp = [start], []
            while stack:
                a = stack.pop()
                comp.append(a)
                for b in adj[a]:
                    if not seen[b]:
                        seen[b] = True
                        stack.append(b)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Image under the node map ``a -> perm[a]``."""
        return Graph(self.node_count, frozenset((perm[a], perm[b]) for a, b in self.edges))

    def induced(self, nodes: Sequence[int]) -> "Graph":
        """Subgraph on ``nodes``, renumbered ``0..len(nodes)-1`` in the given order."""
        pos = {a: i for i, a in enumerate(nodes)}
        return Graph(
            len(nodes),
            frozenset((pos[a], pos[b]) for a, b in self.edges if a in pos and b in pos),
        )

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.node_count))
        g.add_edges_from(self.undirected_edges())
        return g

    def to_dict(self) -> dict:
        return {"nodes": self.node_count, "edges": [list(e) for e in self.undirected_edges()]}


def load_graph(doc: dict) -> Graph:
    try:
        return Graph.from_undirected(int(doc["nodes"]), doc["edges"])
    except (KeyError, TypeError):
        raise ValidationError("graph file needs 'nodes' and 'edges'") from None


def disjoint_union(*graphs: Graph) -> Graph:
    edges, offset = set(), 0
    for g in graphs:
        edges.update((a + offset, b + offset) for a, b in g.edges)
        offset += g.node_count
    return Graph(offset, frozenset(edges))


@dataclass(frozen=True)
class ThreeComponentGraph:
    """A graph made of three relabeled copies of a connected base graph.

    ``copies[c][a]`` is the node of copy ``c`` playing the role of base node ``a``.
    """

    graph: Graph
    base: Graph
    copies: tuple[tuple[int, ...], ...]


def make_three_component(g0: Graph) -> ThreeComponentGraph:
    if not g0.is_connected():
        raise DomainError("base graph must be connected")
    if not g0.edges:
        raise DomainError("base graph needs at least one edge")
    v = g0.node_count
    g = disjoint_union(g0, g0, g0)
    copies = tuple(tuple(c * v + a for a in range(v)) for c in range(3))
    return ThreeComponentGraph(g, g0, copies)


def as_three_component(g: Graph) -> ThreeComponentGraph:
    """Recover base graph and copy maps from a graph with three isomorphic components."""
    comps = g.components()
    if len(comps) != 3:
        raise DomainError(f"expected 3 connected components, found {len(comps)}")
    base = g.induced(comps[0])
    if not base.edges:
        raise DomainError("components need at least one edge")
    base_nx = base.to_networkx()
    copies = [tuple(comps[0])]
    for comp in comps[1:]:
        sub = g.induced(comp)
        matcher = nx.algorithms.isomorphism.GraphMatcher(base_nx, sub.to_networkx())
        if not matcher.is_isomorphic():
            raise DomainError("components are not pairwise isomorphic")
        mapping = matcher.mapping  # base node -> position within comp
        copies.append(tuple(comp[mapping[a]] for a in range(base.node_count)))
    return ThreeComponentGraph(g, base, tuple(copies))


# -- colorings ------------------------------------------------------------------

def validate_coloring(g: Graph, colors: Sequence[int]) -> tuple[int, ...]:
    colors = tuple(colors)
    if len(colors) != g.node_count:
        raise ValidationError(f"coloring has {len(colors)} entries for {g.node_count} nodes")
    if any(c not in COLORS for c in colors):
        raise ValidationError("colors must be 1, 2 or 3")
    return colors


def is_proper(g: Graph, colors: Sequence[int]) -> bool:
    return all(colors[a] != colors[b] for a, b in g.edges)


def is_balanced(g: Graph, colors: Sequence[int]) -> bool:
    """Nodes of each degree are split equally among the three colors."""
    per_degree: dict[int, Counter] = {}
    for a, d in enumerate(g.degrees):
        per_degree.setdefault(d, Counter())[colors[a]] += 1
    return all(len(set(cnt[c] for c in COLORS)) == 1 for cnt in per_degree.values())


def balance_coloring(tc: ThreeComponentGraph, c0: Sequence[int]) -> tuple[int, ...]:
    """Spread a proper coloring of the base graph over the copies with cyclic rotations."""
    c0 = validate_coloring(tc.base, c0)
    if not is_proper(tc.base, c0):
        raise DomainError("base coloring is not proper")
    colors = [0] * tc.graph.node_count
    for rot, copy in zip(ROTATIONS, tc.copies):
        for a, node in enumerate(copy):
            colors[node] = rot[c0[a]]
    return tuple(colors)


def canonical_balanced_coloring(g: Graph) -> tuple[int, ...]:
    """Round-robin colors within each degree class; balanced, not necessarily proper."""
    seen: Counter = Counter()
    colors = []
    for d in g.degrees:
        colors.append(COLORS[seen[d] % 3])
        seen[d] += 1
    return tuple(colors)


def proper_colorings(g: Graph) -> list[tuple[int, ...]]:
    """All proper 3-colorings by brute force (small graphs only)."""
    from itertools import product

    if g.node_count > 12:
        raise DomainError("brute-force coloring search is limited to 12 nodes")
    return [c for c in product(COLORS, repeat=g.node_count) if is_proper(g, c)]
