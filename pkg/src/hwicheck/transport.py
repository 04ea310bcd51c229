"""Exact optimal transport between distributions on a shared finite space.

Three ground costs are supported: the graph distance d (Linear), its square
d^2 (Quadratic), and d + d^2 (Mixed). The solver is a transportation
simplex (see _simplex), so every returned plan is an exact vertex optimum
and carries dual potentials. solve() verifies the duality certificate
before returning; a certificate failure is an internal error, never a
silently wrong answer.

Conventions: solve().cost is the optimal transport cost itself. w1 returns
the Linear cost, while w2 and wc return square roots of the Quadratic and
Mixed costs, so wc(nu, mu)**2 is the quantity the torus inequalities bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from ._simplex import solve_arrays
from .functionals import Distribution
from .state_spaces import StateSpace, distance_matrix

MARGINAL_TOL = 1e-10
SUPPORT_SLACK_TOL = 1e-9
DUAL_GAP_TOL = 1e-9


class CostSpec(Enum):
    LINEAR = "linear"
    QUADRATIC = "quadratic"
    MIXED = "mixed"


def cost_matrix(space: StateSpace, cost: CostSpec) -> np.ndarray:
    """Dense integer ground-cost matrix over the space."""
    d = distance_matrix(space)
    if cost is CostSpec.LINEAR:
        return d
    if cost is CostSpec.QUADRATIC:
        return d * d
    return d + d * d


@lru_cache(maxsize=6)
def _cost_matrix_f64(space: StateSpace, cost: CostSpec) -> np.ndarray:
    out = cost_matrix(space, cost).astype(np.float64)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class TransportPlan:
    plan: np.ndarray = field(repr=False)
    cost: float
    dual_u: np.ndarray = field(repr=False)
    dual_v: np.ndarray = field(repr=False)

    def validate(self, nu: np.ndarray, mu: np.ndarray, C: np.ndarray) -> None:
        """Assert marginals and the duality certificate; raises on failure."""
        if np.any(self.plan < 0):
            raise AssertionError("negative plan entry")
        row = np.abs(self.plan.sum(axis=1) - nu).max()
        col = np.abs(self.plan.sum(axis=0) - mu).max()
        if max(row, col) > MARGINAL_TOL:
            raise AssertionError(f"plan marginals off by {max(row, col):.3e}")
        slack = C - self.dual_u[:, None] - self.dual_v[None, :]
        worst = slack.min()
        if worst < -SUPPORT_SLACK_TOL:
            raise AssertionError(f"dual infeasible by {-worst:.3e}")
        on_support = np.abs(slack[self.plan > 0]).max(initial=0.0)
        if on_support > SUPPORT_SLACK_TOL:
            raise AssertionError(f"support slack {on_support:.3e}")
        dual_value = float(self.dual_u @ nu + self.dual_v @ mu)
        if abs(dual_value - self.cost) > DUAL_GAP_TOL:
            raise AssertionError(f"duality gap {dual_value - self.cost:.3e}")


def _as_cost(cost: CostSpec | str) -> CostSpec:
    if isinstance(cost, CostSpec):
        return cost
    return CostSpec(cost)


def solve(
    nu: Distribution, mu: Distribution, cost: CostSpec | str = CostSpec.LINEAR
) -> TransportPlan:
    """Exactly optimal coupling of nu (rows) and mu (columns)."""
    if nu.space != mu.space:
        raise ValueError(f"marginals live on different spaces: {nu.space} vs {mu.space}")
    spec = _as_cost(cost)
    a_full = nu.weights
    b_full = mu.weights
    if abs(a_full.sum() - b_full.sum()) > 1e-9:
        raise ValueError("marginal masses differ by more than 1e-9")
    size = nu.space.size
    C = _cost_matrix_f64(nu.space, spec)

    # zero-mass rows and columns leave the polytope; drop and reinsert
    rows = np.flatnonzero(a_full > 0)
    cols = np.flatnonzero(b_full > 0)
    sub_C = C[np.ix_(rows, cols)]
    bi, bj, bf, u_sub, v_sub = solve_arrays(a_full[rows], b_full[cols], sub_C)

    plan = np.zeros((size, size))
    plan[rows[bi], cols[bj]] = bf  # basic arcs are distinct tree edges
    total = math.fsum((bf * sub_C[bi, bj]).tolist())

    # dropped rows/cols still need feasible potentials: take the tightest
    dual_u = np.empty(size)
    dual_v = np.empty(size)
    dual_u[rows] = u_sub
    dual_v[cols] = v_sub
    missing_rows = np.setdiff1d(np.arange(size), rows, assume_unique=True)
    missing_cols = np.setdiff1d(np.arange(size), cols, assume_unique=True)
    if missing_cols.size:
        dual_v[missing_cols] = (C[np.ix_(rows, missing_cols)] - u_sub[:, None]).min(
            axis=0
        )
    if missing_rows.size:
        dual_u[missing_rows] = (C[missing_rows] - dual_v[None, :]).min(axis=1)

    out = TransportPlan(plan=plan, cost=total, dual_u=dual_u, dual_v=dual_v)
    out.validate(a_full, b_full, C)
    return out


def w1(nu: Distribution, mu: Distribution) -> float:
    """Earth-mover distance (optimal Linear cost, no root)."""
    return solve(nu, mu, CostSpec.LINEAR).cost


def w2(nu: Distribution, mu: Distribution) -> float:
    """Square root of the optimal Quadratic cost."""
    return math.sqrt(solve(nu, mu, CostSpec.QUADRATIC).cost)


def wc(nu: Distribution, mu: Distribution) -> float:
    """Square root of the optimal Mixed (d + d^2) cost."""
    return math.sqrt(solve(nu, mu, CostSpec.MIXED).cost)
