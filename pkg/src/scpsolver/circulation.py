"""Integer circulations on a base graph with fixed request arcs.

A circulation assigns an integer flow to every edge (signed, relative to the
edge's forward orientation) and to every request arc.  Feasible circulations
pin each arc flow to its demand, so optimizing over them relaxes the tour
problem: connectivity is ignored.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .graph_core import BaseGraph, Cost, CycleBasis, UnionFind, tree_path


@dataclass(frozen=True)
class Request:
    """Directed transport request from source to target with a unit cost."""

    source: int
    target: int
    cost: Cost
    demand: int = 1


@dataclass(frozen=True)
class Instance:
    base: BaseGraph
    requests: tuple[Request, ...]

    def __post_init__(self) -> None:
        seen: set[tuple[int, int]] = set()
        n = self.base.vertex_count
        for r in self.requests:
            if not (1 <= r.source <= n and 1 <= r.target <= n):
                raise ValueError(f"request endpoint out of range: {r}")
            if r.source == r.target:
                raise ValueError(f"request with equal endpoints: {r}")
            if r.cost < 0:
                raise ValueError(f"negative request cost: {r}")
            if r.demand < 1:
                raise ValueError(f"request demand must be positive: {r}")
            if (r.source, r.target) in seen:
                raise ValueError(f"duplicate request pair: {r}")
            seen.add((r.source, r.target))


@dataclass(frozen=True)
class Circulation:
    """Edge and arc flows, indexed by edge_id and arc_id (request position)."""

    edge_flow: tuple[int, ...]
    arc_flow: tuple[int, ...]


def zero_circulation(instance: Instance) -> Circulation:
    return Circulation((0,) * len(instance.base.edges), (0,) * len(instance.requests))


def _vertex_balance(instance: Instance, f: Circulation) -> dict[int, int | float]:
    """Net outflow per vertex; zero everywhere means conservation."""
    bal: dict[int, int | float] = {v: 0 for v in range(1, instance.base.vertex_count + 1)}
    for eid, e in enumerate(instance.base.edges):
        bal[e.u] += f.edge_flow[eid]
        bal[e.v] -= f.edge_flow[eid]
    for aid, r in enumerate(instance.requests):
        bal[r.source] += f.arc_flow[aid]
        bal[r.target] -= f.arc_flow[aid]
    return bal


def edge_flow_conserves(graph: BaseGraph, edge_flow: tuple[int, ...]) -> bool:
    bal = {v: 0 for v in range(1, graph.vertex_count + 1)}
    for eid, e in enumerate(graph.edges):
        bal[e.u] += edge_flow[eid]
        bal[e.v] -= edge_flow[eid]
    return all(b == 0 for b in bal.values())


def is_feasible(instance: Instance, f: Circulation) -> bool:
    """Conservation at every vertex and arc flows equal to demands."""
    if len(f.edge_flow) != len(instance.base.edges):
        return False
    if len(f.arc_flow) != len(instance.requests):
        return False
    if any(f.arc_flow[aid] != r.demand for aid, r in enumerate(instance.requests)):
        return False
    return all(b == 0 for b in _vertex_balance(instance, f).values())


def circulation_cost(instance: Instance, f: Circulation) -> Cost:
    total: Cost = 0
    for aid, r in enumerate(instance.requests):
        total += f.arc_flow[aid] * r.cost
    for eid, e in enumerate(instance.base.edges):
        total += abs(f.edge_flow[eid]) * e.cost
    return total


def support_connected(instance: Instance, f: Circulation) -> bool:
    """True when the nonzero edges and arcs form one connected subgraph."""
    uf = UnionFind()
    touched: set[int] = set()
    for eid, e in enumerate(instance.base.edges):
        if f.edge_flow[eid] != 0:
            for v in (e.u, e.v):
                uf.add(v)
            uf.union(e.u, e.v)
            touched.update((e.u, e.v))
    for aid, r in enumerate(instance.requests):
        if f.arc_flow[aid] != 0:
            for v in (r.source, r.target):
                uf.add(v)
            uf.union(r.source, r.target)
            touched.update((r.source, r.target))
    if not touched:
        return True
    roots = {uf.find(v) for v in touched}
    return len(roots) == 1


def initial_circulation(instance: Instance, basis: CycleBasis) -> Circulation:
    """Feasible start: each demand returns along the spanning tree path."""
    graph = instance.base
    flows = [0] * len(graph.edges)
    for r in instance.requests:
        # subtracting d along source->target equals routing d back through the tree
        for x, _, eid in tree_path(graph, basis.tree, r.source, r.target):
            if x == graph.edges[eid].u:
                flows[eid] -= r.demand
            else:
                flows[eid] += r.demand
    return Circulation(tuple(flows), tuple(r.demand for r in instance.requests))


# --- min-cost circulation by canceling minimum-mean residual cycles ---

_INF = None  # sentinel for unbounded residual capacity


def _residual_arcs(graph: BaseGraph, flows: list[int]):
    """Two residual arcs per edge: (tail, head, cost, edge_id, sign, capacity).

    Pushing along the reverse of existing flow refunds the edge cost, so that
    direction carries cost -c with capacity |flow|.  Everything else costs +c
    with unbounded capacity.  sign is the effect of one pushed unit on the
    signed edge flow.
    """
    arcs = []
    for eid, e in enumerate(graph.edges):
        f = flows[eid]
        c = Fraction(e.cost)
        if f < 0:
            arcs.append((e.u, e.v, -c, eid, 1, -f))
        else:
            arcs.append((e.u, e.v, c, eid, 1, _INF))
        if f > 0:
            arcs.append((e.v, e.u, -c, eid, -1, f))
        else:
            arcs.append((e.v, e.u, c, eid, -1, _INF))
    return arcs


def _min_mean_cycle(vertex_count: int, arcs) -> tuple[Fraction | None, list | None]:
    """Exact minimum mean over directed cycles, and one witness cycle.

    Karp's recurrence with multi-source start gives the mean; a cycle
    achieving it is read off the zero-reduced-cost subgraph under shifted
    costs.  Returns (None, None) when the arc graph is acyclic.
    """
    if not arcs:
        return None, None
    n = vertex_count
    dist = [dict.fromkeys(range(1, n + 1), Fraction(0))]
    for _ in range(n):
        prev = dist[-1]
        cur: dict[int, Fraction] = {}
        for tail, head, cost, *_ in arcs:
            if tail in prev:
                cand = prev[tail] + cost
                if head not in cur or cand < cur[head]:
                    cur[head] = cand
        dist.append(cur)

    mu: Fraction | None = None
    for v in range(1, n + 1):
        if v not in dist[n]:
            continue
        worst: Fraction | None = None
        for k in range(n):
            if v not in dist[k]:
                continue
            val = Fraction(dist[n][v] - dist[k][v], n - k)
            if worst is None or val > worst:
                worst = val
        if worst is not None and (mu is None or worst < mu):
            mu = worst
    if mu is None:
        return None, None
    if mu >= 0:
        return mu, None

    # Bellman-Ford potentials under costs shifted by mu; the shifted graph has
    # no negative cycle, so this converges within n passes.
    pot = dict.fromkeys(range(1, n + 1), Fraction(0))
    for _ in range(n + 1):
        changed = False
        for tail, head, cost, *_ in arcs:
            cand = pot[tail] + cost - mu
            if cand < pot[head]:
                pot[head] = cand
                changed = True
        if not changed:
            break
    else:
        raise RuntimeError("potential computation did not converge")

    tight: dict[int, list[tuple[int, int]]] = {}
    for idx, (tail, head, cost, *_) in enumerate(arcs):
        if cost - mu + pot[tail] - pot[head] == 0:
            tight.setdefault(tail, []).append((head, idx))
    for lst in tight.values():
        lst.sort()

    # any directed cycle inside the tight subgraph attains the minimum mean
    color = dict.fromkeys(range(1, n + 1), 0)
    for start in sorted(tight):
        if color[start] != 0:
            continue
        path: list[tuple[int, int | None]] = [(start, None)]
        on_path = {start: 0}
        iters = {start: iter(tight.get(start, ()))}
        color[start] = 1
        while path:
            v = path[-1][0]
            advanced = False
            for head, aidx in iters[v]:
                if color.get(head, 2) == 1:
                    cycle = [aidx]
                    for w, entry in reversed(path):
                        if w == head:
                            break
                        cycle.append(entry)
                    cycle.reverse()
                    return mu, [arcs[i] for i in cycle]
                if color.get(head, 2) == 0:
                    color[head] = 1
                    path.append((head, aidx))
                    on_path[head] = len(path) - 1
                    iters[head] = iter(tight.get(head, ()))
                    advanced = True
                    break
            if not advanced:
                color[v] = 2
                path.pop()
    raise RuntimeError("negative mean reported but no tight cycle found")


def min_cost_circulation(instance: Instance, basis: CycleBasis) -> Circulation:
    """Cheapest feasible circulation; connectivity deliberately ignored.

    Starts from the tree routing and repeatedly cancels the minimum-mean
    negative cycle of the edge residual graph.  Arc flows stay pinned at the
    demands throughout, so only edge flows move.
    """
    graph = instance.base
    flows = list(initial_circulation(instance, basis).edge_flow)
    demands = tuple(r.demand for r in instance.requests)
    if not graph.edges:
        return Circulation((), demands)
    for _ in range(100_000):
        arcs = _residual_arcs(graph, flows)
        mu, cycle = _min_mean_cycle(graph.vertex_count, arcs)
        if mu is None or mu >= 0:
            return Circulation(tuple(flows), demands)
        delta = min(cap for *_, cap in cycle if cap is not _INF)
        for _, _, _, eid, sign, _ in cycle:
            flows[eid] += sign * delta
    raise RuntimeError("cycle canceling did not terminate")


def decompose(graph: BaseGraph, f: Circulation) -> list[tuple[int, dict[int, int]]]:
    """Split edge flows into at most cycle_rank(supp) unit cycle flows.

    Returns (value, cycle) pairs where cycle maps edge_id -> +1/-1 and the
    weighted cycles sum back to the input exactly.  Arc flows are ignored.
    """
    if not edge_flow_conserves(graph, f.edge_flow):
        raise ValueError("edge flows do not conserve")
    flows = list(f.edge_flow)
    parts: list[tuple[int, dict[int, int]]] = []
    while True:
        out: dict[int, list[tuple[int, int]]] = {}
        for eid, val in enumerate(flows):
            if val == 0:
                continue
            e = graph.edges[eid]
            tail, head = (e.u, e.v) if val > 0 else (e.v, e.u)
            out.setdefault(tail, []).append((head, eid))
        if not out:
            break
        for lst in out.values():
            lst.sort()
        # walk the nonzero-flow digraph; conservation guarantees a way out of
        # every vertex entered, so a vertex repeats within n steps
        start = min(out)
        order = {start: 0}
        walk: list[tuple[int, int]] = []
        v = start
        while True:
            head, eid = out[v][0]
            walk.append((v, eid))
            if head in order:
                cycle = walk[order[head]:]
                break
            order[head] = len(walk)
            v = head
        value = min(abs(flows[eid]) for _, eid in cycle)
        unit: dict[int, int] = {}
        for x, eid in cycle:
            sign = 1 if x == graph.edges[eid].u else -1
            unit[eid] = sign
            flows[eid] -= sign * value
        parts.append((value, unit))
    return parts


def is_elementary(graph: BaseGraph, f: Circulation) -> bool:
    """False exactly when f contains a cycle flow of value 2.

    Equivalent test: orient every edge with |flow| >= 2 along its flow sign;
    elementary means that digraph is acyclic.
    """
    out: dict[int, list[int]] = {}
    for eid, val in enumerate(f.edge_flow):
        if abs(val) < 2:
            continue
        e = graph.edges[eid]
        tail, head = (e.u, e.v) if val > 0 else (e.v, e.u)
        out.setdefault(tail, []).append(head)
    color: dict[int, int] = {}
    for start in out:
        if color.get(start, 0) != 0:
            continue
        stack: list[tuple[int, int]] = [(start, 0)]
        color[start] = 1
        while stack:
            v, i = stack[-1]
            succ = out.get(v, ())
            if i < len(succ):
                stack[-1] = (v, i + 1)
                w = succ[i]
                if color.get(w, 0) == 1:
                    return False
                if color.get(w, 0) == 0:
                    color[w] = 1
                    stack.append((w, 0))
            else:
                color[v] = 2
                stack.pop()
    return True
