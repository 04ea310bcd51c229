"""Independent brute-force oracles for the test suite.

The transport oracle enumerates every vertex of the transportation
polytope: vertices are spanning trees of the complete bipartite graph
K_{n,m}, so for tiny instances the optimal cost is the minimum tree cost
over all trees whose implied flows are nonnegative. Flows on a tree are
signed subset sums of the marginals, precomputed per tree as a {0,+1,-1}
matrix, which keeps the per-instance work to one small matrix product and
the arithmetic exact for marginals with small power-of-two denominators.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

FEAS_TOL = 1e-12


def _spanning_trees(n: int, m: int):
    """Yield edge tuples ((i, j), ...) of all spanning trees of K_{n,m}."""
    edges = [(i, j) for i in range(n) for j in range(m)]
    want = n + m - 1
    for combo in itertools.combinations(edges, want):
        parent = list(range(n + m))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ok = True
        for i, j in combo:
            ri, rj = find(i), find(n + j)
            if ri == rj:
                ok = False
                break
            parent[ri] = rj
        if ok:
            yield combo


def _flow_matrix(tree, n: int, m: int) -> np.ndarray:
    """Rows = tree edges; columns = n row-supplies then m col-supplies.

    flow(edge) = sum of a over rows on the edge's row side minus sum of b
    over cols on that side, where sides come from deleting the edge.
    """
    V = n + m
    adj: list[list[tuple[int, int]]] = [[] for _ in range(V)]
    for e, (i, j) in enumerate(tree):
        adj[i].append((n + j, e))
        adj[n + j].append((i, e))
    out = np.zeros((len(tree), V), dtype=np.int8)
    for e, (i, j) in enumerate(tree):
        # collect the component containing the row endpoint i, cutting edge e
        stack = [i]
        seen = {i}
        while stack:
            x = stack.pop()
            for y, e2 in adj[x]:
                if e2 != e and y not in seen:
                    seen.add(y)
                    stack.append(y)
        for x in seen:
            out[e, x] = 1 if x < n else -1
    return out


@dataclass
class VertexOracle:
    """All transportation-polytope vertices of K_{n,m}, evaluated in batch."""

    n: int
    m: int

    def __post_init__(self) -> None:
        trees = list(_spanning_trees(self.n, self.m))
        self.trees = trees
        self.flow_mats = np.stack(
            [_flow_matrix(t, self.n, self.m) for t in trees]
        ).astype(np.float64)  # (T, n+m-1, n+m)
        self.edge_rows = np.array([[i for i, _ in t] for t in trees])
        self.edge_cols = np.array([[j for _, j in t] for t in trees])

    def min_cost(self, a: np.ndarray, b: np.ndarray, C: np.ndarray) -> float:
        return self.min_costs(a, b, [C])[0]

    def min_costs(
        self, a: np.ndarray, b: np.ndarray, costs: list[np.ndarray]
    ) -> list[float]:
        """Optimal values for several cost matrices on the same marginals.

        Flows depend only on (a, b), so they are computed once and reused
        across cost matrices.
        """
        s = np.concatenate([a, b])
        flows = self.flow_mats @ s  # (T, n+m-1)
        feasible = (flows >= -FEAS_TOL).all(axis=1)
        if not feasible.any():
            raise AssertionError("no feasible vertex; marginals unbalanced?")
        flows = flows[feasible]
        rows = self.edge_rows[feasible]
        cols = self.edge_cols[feasible]
        out = []
        for C in costs:
            totals = (flows * C[rows, cols]).sum(axis=1)
            out.append(float(totals.min()))
        return out

    def min_costs_many(
        self, a: np.ndarray, bs: np.ndarray, costs: list[np.ndarray]
    ) -> np.ndarray:
        """Optimal values for one row marginal against many column marginals.

        bs has shape (P, m); returns (len(costs), P). Flows for all P
        instances come from a single matrix product, which is what makes
        exhaustive grids over rational marginals affordable.
        """
        P = bs.shape[0]
        S = np.empty((self.n + self.m, P))
        S[: self.n] = a[:, None]
        S[self.n :] = bs.T
        flows = self.flow_mats @ S  # (T, n+m-1, P)
        feasible = (flows >= -FEAS_TOL).all(axis=1)  # (T, P)
        if not feasible.any(axis=0).all():
            raise AssertionError("no feasible vertex; marginals unbalanced?")
        out = np.empty((len(costs), P))
        for k, C in enumerate(costs):
            ec = C[self.edge_rows, self.edge_cols]  # (T, n+m-1)
            totals = np.einsum("tep,te->tp", flows, ec)
            totals[~feasible] = np.inf
            out[k] = totals.min(axis=0)
        return out

    def tree_count(self) -> int:
        return len(self.trees)
