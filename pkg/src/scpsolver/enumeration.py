"""Gray-code sweep of the circulations near a feasible base circulation.

Candidate homology classes are f plus small integer combinations of the
fundamental cycles.  Walking coefficient vectors in reflected mixed-radix
Gray order changes one coefficient by one per step, so each candidate is an
O(m) update of the previous one.
"""

from __future__ import annotations

from typing import Iterator

from .circulation import Circulation
from .graph_core import CycleBasis

LambdaVector = tuple[int, ...]


def gray_code_lambdas(r: int, k: int) -> Iterator[LambdaVector]:
    """All (2k+1)^r vectors in [-k, k]^r, adjacent vectors one step apart.

    Coordinate 0 varies fastest.  The first vector is all -k.
    """
    if r < 0 or k < 0:
        raise ValueError("r and k must be nonnegative")
    hi = 2 * k
    digits = [0] * r
    dirs = [1] * r
    yield tuple(d - k for d in digits)
    while True:
        for i in range(r):
            nxt = digits[i] + dirs[i]
            if 0 <= nxt <= hi:
                digits[i] = nxt
                for j in range(i):
                    dirs[j] = -dirs[j]
                yield tuple(d - k for d in digits)
                break
            # this digit is pinned at its wall; carry to the next coordinate
        else:
            return


def enumerate_candidates(f: Circulation, basis: CycleBasis, k: int) -> Iterator[Circulation]:
    """Stream f + sum(lambda_i * C_i) over gray_code_lambdas(r, k).

    Candidates appear in the same order as the lambda vectors, all share the
    arc flows of f, and all conserve flow because every term does.
    """
    r = len(basis.non_tree_edges)
    working = list(f.edge_flow)
    prev: LambdaVector | None = None
    for lam in gray_code_lambdas(r, k):
        if prev is None:
            for i, cycle in enumerate(basis.cycles):
                if lam[i]:
                    for eid, val in cycle.items():
                        working[eid] += lam[i] * val
        else:
            for i in range(r):
                delta = lam[i] - prev[i]
                if delta:
                    for eid, val in basis.cycles[i].items():
                        working[eid] += delta * val
                    break
        prev = lam
        yield Circulation(tuple(working), f.arc_flow)
