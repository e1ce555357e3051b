"""Cheapest tour within one homology class.

Fixing the class fixes every traversal the tour must make except the doubled
edges that stitch the class's support components together.  Those form a
Steiner tree over the contracted support, solved exactly by enumerating
subsets of the few branch vertices that survive preprocessing.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circulation import Circulation, Instance, circulation_cost
from .graph_core import Cost, UnionFind

KIND_REQUEST = "request"
KIND_EDGE = "edge"


@dataclass(frozen=True)
class ContractedGraph:
    """Support components shrunk to terminals; edge weights are doubled costs."""

    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int, Cost, int], ...]  # (u, v, weight, original edge_id)
    terminals: frozenset[int]
    vertex_map: dict[int, int]


@dataclass(frozen=True)
class ReducedGraph:
    """Contracted graph after Steiner preprocessing.

    Each edge carries the sorted tuple of original edge ids it stands for.
    """

    vertices: tuple[int, ...]
    terminals: frozenset[int]
    edges: tuple[tuple[int, int, Cost, tuple[int, ...]], ...]


@dataclass(frozen=True)
class SteinerSolution:
    edge_ids: frozenset[int]  # original edge ids
    weight: Cost


@dataclass(frozen=True)
class Step:
    kind: str  # "request" or "edge"
    source: int
    target: int
    ref: int  # arc_id or edge_id


@dataclass(frozen=True)
class Tour:
    steps: tuple[Step, ...]
    total: Cost


@dataclass(frozen=True)
class EulerMultigraph:
    arcs: tuple[tuple[int, int, str, int, Cost], ...]  # (tail, head, kind, ref, cost)


def contract_support(instance: Instance, g: Circulation) -> ContractedGraph:
    """One quotient vertex per support component, one per untouched vertex."""
    graph = instance.base
    uf = UnionFind(range(1, graph.vertex_count + 1))
    touched: set[int] = set()
    for eid, e in enumerate(graph.edges):
        if g.edge_flow[eid] != 0:
            uf.union(e.u, e.v)
            touched.update((e.u, e.v))
    for aid, r in enumerate(instance.requests):
        if g.arc_flow[aid] != 0:
            uf.union(r.source, r.target)
            touched.update((r.source, r.target))

    classes: dict[int, list[int]] = {}
    for v in range(1, graph.vertex_count + 1):
        classes.setdefault(uf.find(v), []).append(v)
    ordered = sorted(classes.values(), key=min)
    vertex_map = {v: q for q, members in enumerate(ordered) for v in members}

    quotient_edges: list[tuple[int, int, Cost, int]] = []
    for eid, e in enumerate(graph.edges):
        if g.edge_flow[eid] != 0:
            continue  # contracted inside its component
        qu, qv = vertex_map[e.u], vertex_map[e.v]
        if qu == qv:
            continue  # self-loop, useless for reconnection
        quotient_edges.append((min(qu, qv), max(qu, qv), 2 * e.cost, eid))

    terminals = frozenset(vertex_map[v] for v in touched)
    return ContractedGraph(
        tuple(range(len(ordered))), tuple(quotient_edges), terminals, vertex_map
    )


def steiner_preprocess(cg: ContractedGraph) -> ReducedGraph:
    """Strip Steiner leaves, splice degree-2 Steiner vertices, keep cheapest parallels."""
    vertices = set(cg.vertices)
    edges: list[tuple[int, int, Cost, tuple[int, ...]]] = [
        (u, v, w, (eid,)) for u, v, w, eid in cg.edges
    ]
    terminals = cg.terminals
    while True:
        edges = [e for e in edges if e[0] != e[1]]
        by_pair: dict[tuple[int, int], tuple[int, int, Cost, tuple[int, ...]]] = {}
        for u, v, w, origin in edges:
            key = (min(u, v), max(u, v))
            best = by_pair.get(key)
            if best is None or (w, origin) < (best[2], best[3]):
                by_pair[key] = (u, v, w, origin)
        edges = [by_pair[k] for k in sorted(by_pair)]

        slots: dict[int, list[int]] = {v: [] for v in vertices}
        for idx, (u, v, _, _) in enumerate(edges):
            slots[u].append(idx)
            slots[v].append(idx)

        steiner = sorted(v for v in vertices if v not in terminals)
        target = next((v for v in steiner if len(slots[v]) <= 2), None)
        if target is None:
            return ReducedGraph(tuple(sorted(vertices)), terminals, tuple(edges))
        incident = slots[target]
        if len(incident) == 0:
            vertices.discard(target)
        elif len(incident) == 1:
            edges = [e for i, e in enumerate(edges) if i != incident[0]]
            vertices.discard(target)
        else:
            iu, iv, iw, iorigin = edges[incident[0]]
            ju, jv, jw, jorigin = edges[incident[1]]
            a = iu if iv == target else iv
            b = ju if jv == target else jv
            merged = (min(a, b), max(a, b), iw + jw, tuple(sorted(iorigin + jorigin)))
            edges = [e for i, e in enumerate(edges) if i not in incident] + [merged]
            vertices.discard(target)


def min_steiner_tree(graph: ReducedGraph, terminals: frozenset[int]) -> SteinerSolution:
    """Exact Steiner tree by sweeping subsets of the non-terminal vertices.

    Every subset induces a subgraph whose spanning tree (when one exists) is
    a Steiner tree candidate; the optimum uses some subset, so the sweep is
    exhaustive.  Kruskal with a fixed edge order keeps the witness stable.
    """
    if not terminals:
        raise ValueError("terminal set is empty")
    if not terminals <= set(graph.vertices):
        raise ValueError("terminal not present in graph")
    if len(terminals) == 1:
        return SteinerSolution(frozenset(), 0)

    steiner = sorted(set(graph.vertices) - terminals)
    order = sorted(range(len(graph.edges)), key=lambda i: (graph.edges[i][2], i))
    best: tuple[Cost, frozenset[int]] | None = None
    for mask in range(1 << len(steiner)):
        nodes = set(terminals)
        for i, v in enumerate(steiner):
            if mask >> i & 1:
                nodes.add(v)
        uf = UnionFind(nodes)
        chosen: list[int] = []
        weight: Cost = 0
        for i in order:
            u, v, w, _ = graph.edges[i]
            if u in nodes and v in nodes and uf.union(u, v):
                chosen.append(i)
                weight += w
        if len(chosen) != len(nodes) - 1:
            continue  # subset does not induce a connected subgraph
        while True:
            degree: dict[int, int] = {}
            for i in chosen:
                u, v, _, _ = graph.edges[i]
                degree[u] = degree.get(u, 0) + 1
                degree[v] = degree.get(v, 0) + 1
            prunable = [
                i
                for i in chosen
                if (degree[graph.edges[i][0]] == 1 and graph.edges[i][0] not in terminals)
                or (degree[graph.edges[i][1]] == 1 and graph.edges[i][1] not in terminals)
            ]
            if not prunable:
                break
            for i in prunable:
                chosen.remove(i)
                weight -= graph.edges[i][2]
        if best is None or weight < best[0]:
            origins: set[int] = set()
            for i in chosen:
                origins.update(graph.edges[i][3])
            best = (weight, frozenset(origins))
    if best is None:
        raise ValueError("homology class disconnected")
    return SteinerSolution(best[1], best[0])


def connectivity_repair(instance: Instance, g: Circulation) -> SteinerSolution:
    """Doubled edges needed to join the support of g into one component."""
    cg = contract_support(instance, g)
    if len(cg.terminals) <= 1:
        return SteinerSolution(frozenset(), 0)
    reduced = steiner_preprocess(cg)
    return min_steiner_tree(reduced, reduced.terminals)


def build_euler_multigraph(instance: Instance, g: Circulation, st: SteinerSolution) -> EulerMultigraph:
    """Directed multigraph whose Euler circuits are exactly the class tours."""
    graph = instance.base
    arcs: list[tuple[int, int, str, int, Cost]] = []
    for aid, r in enumerate(instance.requests):
        for _ in range(g.arc_flow[aid]):
            arcs.append((r.source, r.target, KIND_REQUEST, aid, r.cost))
    for eid, e in enumerate(graph.edges):
        val = g.edge_flow[eid]
        if val == 0:
            continue
        tail, head = (e.u, e.v) if val > 0 else (e.v, e.u)
        for _ in range(abs(val)):
            arcs.append((tail, head, KIND_EDGE, eid, e.cost))
    for eid in sorted(st.edge_ids):
        e = graph.edges[eid]
        arcs.append((e.u, e.v, KIND_EDGE, eid, e.cost))
        arcs.append((e.v, e.u, KIND_EDGE, eid, e.cost))

    balance: dict[int, int] = {}
    uf = UnionFind()
    for tail, head, *_ in arcs:
        balance[tail] = balance.get(tail, 0) + 1
        balance[head] = balance.get(head, 0) - 1
        uf.add(tail)
        uf.add(head)
        uf.union(tail, head)
    if any(b != 0 for b in balance.values()):
        raise RuntimeError("euler multigraph is unbalanced")
    if arcs and len({uf.find(v) for v in balance}) != 1:
        raise RuntimeError("euler multigraph is disconnected")
    return EulerMultigraph(tuple(arcs))


def euler_tour(mg: EulerMultigraph) -> Tour:
    """Hierholzer circuit from the lowest vertex with an outgoing arc.

    At each vertex unused arcs are taken ascending by (target, kind, ref)
    with requests before edges, which pins down one canonical circuit.
    """
    if not mg.arcs:
        return Tour((), 0)
    kind_rank = {KIND_REQUEST: 0, KIND_EDGE: 1}
    out: dict[int, list[int]] = {}
    for idx, (tail, head, kind, ref, _) in enumerate(mg.arcs):
        out.setdefault(tail, []).append(idx)
    for tail in out:
        out[tail].sort(key=lambda i: (mg.arcs[i][1], kind_rank[mg.arcs[i][2]], mg.arcs[i][3]))
    ptr = dict.fromkeys(out, 0)

    start = min(out)
    vertex_stack = [start]
    arc_stack: list[int] = []
    circuit: list[int] = []
    while vertex_stack:
        v = vertex_stack[-1]
        if ptr.get(v, 0) < len(out.get(v, ())):
            arc = out[v][ptr[v]]
            ptr[v] += 1
            vertex_stack.append(mg.arcs[arc][1])
            arc_stack.append(arc)
        else:
            vertex_stack.pop()
            if arc_stack:
                circuit.append(arc_stack.pop())
    circuit.reverse()
    if len(circuit) != len(mg.arcs):
        raise RuntimeError("euler multigraph is disconnected")

    steps = tuple(Step(mg.arcs[i][2], mg.arcs[i][0], mg.arcs[i][1], mg.arcs[i][3]) for i in circuit)
    total: Cost = sum(mg.arcs[i][4] for i in circuit)
    return Tour(steps, total)


def tour_in_class(instance: Instance, g: Circulation) -> Tour:
    """Cheapest tour whose traversal counts realize the class of g.

    Its cost is circulation_cost(g) plus the connectivity repair weight.
    """
    st = connectivity_repair(instance, g)
    tour = euler_tour(build_euler_multigraph(instance, g, st))
    expected = circulation_cost(instance, g) + st.weight
    if tour.total != expected:
        raise RuntimeError("tour cost disagrees with class cost")
    return tour
