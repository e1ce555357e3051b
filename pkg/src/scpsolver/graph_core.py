"""Undirected base graphs and their cycle space.

Vertices are integers 1..n.  Every edge gets a fixed forward orientation,
(lower id, higher id), so integer edge flows have a well defined sign.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

Cost = int | float


class UnionFind:
    """Plain union-find over arbitrary hashable items."""

    def __init__(self, items: Iterable = ()):
        self.parent = {x: x for x in items}

    def add(self, x) -> None:
        if x not in self.parent:
            self.parent[x] = x

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


@dataclass(frozen=True)
class Edge:
    """Undirected edge; (u, v) with u < v is also the forward orientation."""

    u: int
    v: int
    cost: Cost


@dataclass(frozen=True)
class BaseGraph:
    """Simple undirected graph with nonnegative edge costs.

    Edge ids are positions in ``edges``.  Connectivity is not required here;
    operations that need it check and raise.
    """

    vertex_count: int
    edges: tuple[Edge, ...]

    def __post_init__(self) -> None:
        if self.vertex_count < 1:
            raise ValueError("graph needs at least one vertex")
        seen: set[tuple[int, int]] = set()
        for e in self.edges:
            if not (1 <= e.u <= self.vertex_count and 1 <= e.v <= self.vertex_count):
                raise ValueError(f"edge endpoint out of range: {e}")
            if e.u == e.v:
                raise ValueError(f"self-loop not allowed: {e}")
            if e.u > e.v:
                raise ValueError(f"edge not in forward orientation: {e}")
            if (e.u, e.v) in seen:
                raise ValueError(f"parallel edge not allowed: {e}")
            if e.cost < 0:
                raise ValueError(f"negative edge cost: {e}")
            seen.add((e.u, e.v))

    @classmethod
    def from_edges(cls, vertex_count: int, triples: Iterable[tuple[int, int, Cost]]) -> "BaseGraph":
        """Build a graph normalizing each (u, v, cost) triple to u < v."""
        edges = tuple(Edge(min(u, v), max(u, v), cost) for u, v, cost in triples)
        return cls(vertex_count, edges)

    @cached_property
    def adjacency(self) -> dict[int, tuple[tuple[int, int], ...]]:
        """Vertex -> (neighbor, edge_id) pairs, ascending by neighbor id."""
        adj: dict[int, list[tuple[int, int]]] = {v: [] for v in range(1, self.vertex_count + 1)}
        for eid, e in enumerate(self.edges):
            adj[e.u].append((e.v, eid))
            adj[e.v].append((e.u, eid))
        return {v: tuple(sorted(pairs)) for v, pairs in adj.items()}

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])


@dataclass(frozen=True)
class CycleBasis:
    """Fundamental cycle basis induced by a spanning tree.

    ``cycles[i]`` maps edge_id -> +1/-1 along the unit cycle flow that
    traverses non-tree edge ``non_tree_edges[i]`` forward and returns through
    the tree.  Each cycle hits its own non-tree edge with +1 and no other
    non-tree edge, so non-tree flow values are basis coordinates.
    """

    tree: frozenset[int]
    non_tree_edges: tuple[int, ...]
    cycles: tuple[dict[int, int], ...]


@dataclass(frozen=True)
class Multigraph:
    """Loops and parallel edges allowed; used for smoothed cores only."""

    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int, Cost], ...]


@dataclass(frozen=True)
class TopologyReport:
    cycle_rank: int
    branch_vertices: tuple[int, ...]
    branch_count: int
    core_multigraph: Multigraph


def is_connected(graph: BaseGraph) -> bool:
    reached = {1}
    stack = [1]
    while stack:
        v = stack.pop()
        for w, _ in graph.adjacency[v]:
            if w not in reached:
                reached.add(w)
                stack.append(w)
    return len(reached) == graph.vertex_count


def cycle_rank(graph: BaseGraph) -> int:
    """m - n + 1 for a connected graph."""
    if not is_connected(graph):
        raise ValueError("graph not connected")
    return len(graph.edges) - graph.vertex_count + 1


def spanning_tree(graph: BaseGraph) -> frozenset[int]:
    """BFS tree from the lowest vertex id, neighbors explored ascending."""
    if not is_connected(graph):
        raise ValueError("graph not connected")
    tree: set[int] = set()
    visited = {1}
    queue = [1]
    while queue:
        v = queue.pop(0)
        for w, eid in graph.adjacency[v]:
            if w not in visited:
                visited.add(w)
                tree.add(eid)
                queue.append(w)
    return frozenset(tree)


def _tree_parents(graph: BaseGraph, tree: frozenset[int]) -> tuple[dict[int, int], dict[int, int]]:
    """Parent vertex and parent edge maps for the tree rooted at vertex 1."""
    in_tree: dict[int, list[tuple[int, int]]] = {v: [] for v in range(1, graph.vertex_count + 1)}
    for eid in tree:
        e = graph.edges[eid]
        in_tree[e.u].append((e.v, eid))
        in_tree[e.v].append((e.u, eid))
    parent: dict[int, int] = {1: 0}
    parent_edge: dict[int, int] = {}
    stack = [1]
    while stack:
        v = stack.pop()
        for w, eid in in_tree[v]:
            if w not in parent:
                parent[w] = v
                parent_edge[w] = eid
                stack.append(w)
    if len(parent) != graph.vertex_count:
        raise ValueError("edge set is not a spanning tree")
    return parent, parent_edge


def tree_path(graph: BaseGraph, tree: frozenset[int], source: int, target: int) -> list[tuple[int, int, int]]:
    """Directed steps (from, to, edge_id) along the unique tree path."""
    parent, parent_edge = _tree_parents(graph, tree)
    depth: dict[int, int] = {}

    def depth_of(v: int) -> int:
        if v not in depth:
            depth[v] = 0 if parent[v] == 0 else depth_of(parent[v]) + 1
        return depth[v]

    up_s: list[tuple[int, int, int]] = []
    down_t: list[tuple[int, int, int]] = []
    a, b = source, target
    while depth_of(a) > depth_of(b):
        up_s.append((a, parent[a], parent_edge[a]))
        a = parent[a]
    while depth_of(b) > depth_of(a):
        down_t.append((parent[b], b, parent_edge[b]))
        b = parent[b]
    while a != b:
        up_s.append((a, parent[a], parent_edge[a]))
        down_t.append((parent[b], b, parent_edge[b]))
        a, b = parent[a], parent[b]
    return up_s + list(reversed(down_t))


def fundamental_cycles(graph: BaseGraph, tree: frozenset[int]) -> CycleBasis:
    """Unit cycle flows, one per non-tree edge in ascending edge_id order."""
    if len(tree) != graph.vertex_count - 1:
        raise ValueError("edge set is not a spanning tree")
    for eid in tree:
        if not (0 <= eid < len(graph.edges)):
            raise ValueError(f"unknown edge id in tree: {eid}")
    _tree_parents(graph, tree)  # raises when the set does not span

    non_tree = tuple(eid for eid in range(len(graph.edges)) if eid not in tree)
    cycles: list[dict[int, int]] = []
    for eid in non_tree:
        e = graph.edges[eid]
        cycle = {eid: 1}
        for x, _, step_edge in tree_path(graph, tree, e.v, e.u):
            cycle[step_edge] = 1 if x == graph.edges[step_edge].u else -1
        cycles.append(cycle)
    return CycleBasis(frozenset(tree), non_tree, tuple(cycles))


def smooth_topology(graph: BaseGraph) -> TopologyReport:
    """Collapse degree-2 chains; report cycle rank, branch vertices, core."""
    rank = cycle_rank(graph)  # also checks connectivity
    branch = tuple(v for v in range(1, graph.vertex_count + 1) if graph.degree(v) >= 3)

    vertices = set(range(1, graph.vertex_count + 1))
    edges: list[tuple[int, int, Cost]] = [(e.u, e.v, e.cost) for e in graph.edges]
    while True:
        slots: dict[int, list[int]] = {v: [] for v in vertices}
        for idx, (u, v, _) in enumerate(edges):
            slots[u].append(idx)
            slots[v].append(idx)
        candidate = None
        for v in sorted(vertices):
            s = slots[v]
            if len(s) == 2 and s[0] != s[1]:
                candidate = v
                break
        if candidate is None:
            break
        i, j = slots[candidate]
        iu, iv, icost = edges[i]
        ju, jv, jcost = edges[j]
        a = iu if iv == candidate else iv
        b = ju if jv == candidate else jv
        merged = (min(a, b), max(a, b), icost + jcost)
        edges = [e for idx, e in enumerate(edges) if idx not in (i, j)] + [merged]
        vertices.discard(candidate)

    core = Multigraph(tuple(sorted(vertices)), tuple(edges))
    return TopologyReport(rank, branch, len(branch), core)


def shortest_path(graph: BaseGraph, source: int, target: int) -> tuple[Cost, tuple[int, ...]]:
    """Min-cost path; ties broken by lexicographically smallest vertex list."""
    for v in (source, target):
        if not (1 <= v <= graph.vertex_count):
            raise ValueError(f"vertex out of range: {v}")
    if source == target:
        return 0, (source,)
    heap: list[tuple[Cost, tuple[int, ...]]] = [(0, (source,))]
    done: set[int] = set()
    while heap:
        dist, path = heapq.heappop(heap)
        v = path[-1]
        if v in done:
            continue
        done.add(v)
        if v == target:
            return dist, path
        for w, eid in graph.adjacency[v]:
            if w not in done:
                heapq.heappush(heap, (dist + graph.edges[eid].cost, path + (w,)))
    raise ValueError(f"no path between {source} and {target}")


def edge_components(graph: BaseGraph, edge_ids: Iterable[int]) -> tuple[tuple[frozenset[int], ...], frozenset[int]]:
    """Components of the subgraph on the given edges, plus untouched vertices."""
    ids = list(edge_ids)
    for eid in ids:
        if not (0 <= eid < len(graph.edges)):
            raise ValueError(f"unknown edge id: {eid}")
    uf = UnionFind()
    touched: set[int] = set()
    for eid in ids:
        e = graph.edges[eid]
        uf.add(e.u)
        uf.add(e.v)
        uf.union(e.u, e.v)
        touched.update((e.u, e.v))
    groups: dict[int, set[int]] = {}
    for v in touched:
        groups.setdefault(uf.find(v), set()).add(v)
    components = tuple(sorted((frozenset(g) for g in groups.values()), key=min))
    untouched = frozenset(range(1, graph.vertex_count + 1)) - touched
    return components, untouched
