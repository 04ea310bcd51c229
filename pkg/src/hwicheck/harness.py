"""Assembles functionals into pass/fail verdicts for each inequality.

Every check computes only the quantities its inequality needs, records
them in an InequalityReport, and classifies the outcome as one of
pass / vacuous-pass / not-applicable / FAIL.  FAIL is reserved for an
applicable, non-vacuous trial whose margin is below -1e-9; any FAIL is
either an implementation bug or a counterexample, so library-level
campaign runs abort on it by default, carrying the offending report.

Seeding: campaigns derive per-trial seeds as (campaign_seed, trial_index)
fed to SeedSequence, so results are independent of execution order and
reproducible from the record alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import evolve_hypercube, evolve_torus
from .functionals import (
    Distribution,
    fisher_hypercube,
    fisher_torus,
    point_mass,
    relative_entropy,
    uniform,
)
from .state_spaces import StateSpace
from .transport import w1, wc

__all__ = [
    "CampaignFailure",
    "DistributionFamily",
    "InequalityReport",
    "MARGIN_TOL",
    "check_flow_bounds",
    "check_hypercube_hwi",
    "check_mlsi",
    "check_torus_hwi",
    "optimal_time",
    "phi",
    "phi_bound_margin",
    "run_trials",
    "sample",
    "verdict_for",
]

# absolute tolerance on inequality margins for exact-arithmetic pipelines
MARGIN_TOL = 1e-9

_FAMILY_KINDS = (
    "dirichlet",
    "product-bernoulli",
    "sparse-support",
    "point-mass",
    "semigroup-pushforward",
)


@dataclass(frozen=True)
class InequalityReport:
    """One checked inequality instance; margin = rhs - lhs."""

    trial_id: int
    space: str
    n: int
    family: str
    H: float | None
    I: float | None
    W1: float | None
    W2: float | None
    Wc: float | None
    applicable: bool
    vacuous: bool
    lhs: float
    rhs: float
    margin: float
    verdict: str


class CampaignFailure(Exception):
    """Raised when a campaign produces a FAIL verdict."""

    def __init__(self, report: InequalityReport):
        self.report = report
        super().__init__(f"FAIL verdict at trial {report.trial_id}: {report!r}")


def verdict_for(
    applicable: bool, vacuous: bool, margin: float, tol: float = MARGIN_TOL
) -> str:
    """FAIL iff applicable and not vacuous and margin < -tol."""
    if vacuous:
        return "vacuous-pass"
    if not applicable:
        return "not-applicable"
    return "FAIL" if margin < -tol else "pass"


def phi(t: float) -> float:
    """e^{-2t} log((1 + e^{-2t}) / (1 - e^{-2t})); diverges at t = 0."""
    t = float(t)
    if not t > 0.0:
        raise ValueError(f"phi needs t > 0, got {t}")
    s = math.exp(-2.0 * t)
    return s * math.log((1.0 + s) / (1.0 - s))


def phi_bound_margin(t: float) -> float:
    """Margin of phi(t) <= 2/(1 - e^{-2t}) - 2; nonnegative for t > 0."""
    t = float(t)
    if not t > 0.0:
        raise ValueError(f"need t > 0, got {t}")
    s = math.exp(-2.0 * t)
    return 2.0 / (1.0 - s) - 2.0 - phi(t)


def optimal_time(w1_value: float, fisher: float) -> float:
    """Minimizer s* = 2 sqrt(w1/fisher) of 2 w1/s - 2 w1 + s fisher/2.

    Requires fisher >= 4 w1 > 0 so that s* <= 1; at s* the combined bound
    collapses to 2 sqrt(w1 fisher) - 2 w1.
    """
    w1_value = float(w1_value)
    fisher = float(fisher)
    if not w1_value > 0.0:
        raise ValueError(f"need w1 > 0, got {w1_value}")
    if not fisher >= 4.0 * w1_value:
        raise ValueError(
            f"need fisher >= 4*w1 (got fisher={fisher}, 4*w1={4.0 * w1_value}); "
            "the optimal s would exceed 1"
        )
    return 2.0 * math.sqrt(w1_value / fisher)


@dataclass(frozen=True)
class DistributionFamily:
    """Named sampling recipe plus the seed that makes it reproducible.

    seed may be an int or a tuple of ints (fed to SeedSequence); campaign
    runners overwrite it with (campaign_seed, trial_index) per trial.
    """

    kind: str
    seed: object
    alpha: float = 1.0
    p: tuple | None = None
    k: int | None = None
    base: Distribution | None = None
    t: float = 0.5

    def __post_init__(self):
        if self.kind not in _FAMILY_KINDS:
            raise ValueError(
                f"unknown family kind {self.kind!r}, expected one of {_FAMILY_KINDS}"
            )
        if not float(self.alpha) > 0.0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if self.p is not None:
            p = tuple(float(v) for v in self.p)
            if any(not 0.0 < v < 1.0 for v in p):
                raise ValueError("bernoulli parameters must lie in (0, 1)")
            object.__setattr__(self, "p", p)
        if self.kind == "sparse-support":
            if self.k is None or int(self.k) < 1:
                raise ValueError(f"sparse-support needs k >= 1, got {self.k}")
        if not float(self.t) >= 0.0:
            raise ValueError(f"pushforward time must be >= 0, got {self.t}")

    @property
    def descriptor(self) -> str:
        if self.kind == "dirichlet":
            return f"dirichlet({self.alpha:g})"
        if self.kind == "product-bernoulli":
            if self.p is None:
                return "product-bernoulli(random)"
            return "product-bernoulli(" + ",".join(f"{v:g}" for v in self.p) + ")"
        if self.kind == "sparse-support":
            return f"sparse-support({self.k})"
        if self.kind == "point-mass":
            return "point-mass"
        return f"semigroup-pushforward(t={self.t:g})"


def sample(family: DistributionFamily, space: StateSpace) -> Distribution:
    """Draw one Distribution; identical (family, space) gives identical draws."""
    rng = np.random.default_rng(np.random.SeedSequence(family.seed))
    if family.kind == "dirichlet":
        return Distribution(space, rng.dirichlet(np.full(space.size, family.alpha)))
    if family.kind == "product-bernoulli":
        if space.kind != "hypercube":
            raise ValueError("product-bernoulli is defined on hypercubes only")
        if family.p is not None:
            if len(family.p) != space.n:
                raise ValueError(
                    f"got {len(family.p)} bernoulli parameters for {space.n} coordinates"
                )
            p = np.array(family.p)
        else:
            p = rng.uniform(0.05, 0.95, space.n)
        states = np.arange(space.size)
        weights = np.ones(space.size)
        for i in range(space.n):
            bit = (states >> i) & 1
            weights *= np.where(bit == 1, p[i], 1.0 - p[i])
        return Distribution(space, weights)
    if family.kind == "sparse-support":
        k = int(family.k)
        if k > space.size:
            raise ValueError(f"k={k} exceeds space size {space.size}")
        idx = rng.choice(space.size, size=k, replace=False)
        weights = np.zeros(space.size)
        weights[idx] = rng.dirichlet(np.ones(k))
        return Distribution(space, weights)
    if family.kind == "point-mass":
        return point_mass(space, int(rng.integers(space.size)))
    # semigroup-pushforward
    base = family.base
    if base is None:
        base = Distribution(space, rng.dirichlet(np.ones(space.size)))
    if base.space != space:
        raise ValueError(f"pushforward base lives on {base.space}, not {space}")
    if space.kind == "hypercube":
        return evolve_hypercube(base, family.t)
    return evolve_torus(base, family.t)


def _require_kind(nu: Distribution, kind: str) -> None:
    if nu.space.kind != kind:
        raise ValueError(f"expected a {kind} distribution, got {nu.space}")


def check_hypercube_hwi(
    nu: Distribution, trial_id: int = 0, family: str = "", tol: float = MARGIN_TOL
) -> InequalityReport:
    """H <= 2 sqrt(W1 I) - 2 W1, applicable iff I >= 4 W1."""
    _require_kind(nu, "hypercube")
    h = float(relative_entropy(nu))
    fisher = fisher_hypercube(nu)
    i_val = float(fisher)
    w1_val = float(w1(nu, uniform(nu.space)))
    vacuous = not fisher.finite
    applicable = i_val >= 4.0 * w1_val
    rhs = 2.0 * math.sqrt(w1_val * i_val) - 2.0 * w1_val if i_val > 0 else 0.0
    margin = rhs - h
    return InequalityReport(
        trial_id=trial_id, space=nu.space.kind, n=nu.space.n, family=family,
        H=h, I=i_val, W1=w1_val, W2=None, Wc=None,
        applicable=applicable, vacuous=vacuous,
        lhs=h, rhs=rhs, margin=margin,
        verdict=verdict_for(applicable, vacuous, margin, tol),
    )


def check_torus_hwi(
    nu: Distribution, trial_id: int = 0, family: str = "", tol: float = MARGIN_TOL
) -> InequalityReport:
    """H <= sqrt(2) Wc sqrt(I); no applicability condition."""
    _require_kind(nu, "torus")
    h = float(relative_entropy(nu))
    fisher = fisher_torus(nu)
    i_val = float(fisher)
    wc_val = float(wc(nu, uniform(nu.space)))
    vacuous = not fisher.finite
    rhs = math.sqrt(2.0) * wc_val * math.sqrt(i_val) if i_val > 0 else 0.0
    margin = rhs - h
    return InequalityReport(
        trial_id=trial_id, space=nu.space.kind, n=nu.space.n, family=family,
        H=h, I=i_val, W1=None, W2=None, Wc=wc_val,
        applicable=True, vacuous=vacuous,
        lhs=h, rhs=rhs, margin=margin,
        verdict=verdict_for(True, vacuous, margin, tol),
    )


def check_mlsi(
    nu: Distribution, trial_id: int = 0, family: str = "", tol: float = MARGIN_TOL
) -> InequalityReport:
    """Modified log-Sobolev inequality H <= I/2 on the hypercube."""
    _require_kind(nu, "hypercube")
    h = float(relative_entropy(nu))
    fisher = fisher_hypercube(nu)
    i_val = float(fisher)
    vacuous = not fisher.finite
    rhs = i_val / 2.0
    margin = rhs - h
    return InequalityReport(
        trial_id=trial_id, space=nu.space.kind, n=nu.space.n, family=family,
        H=h, I=i_val, W1=None, W2=None, Wc=None,
        applicable=True, vacuous=vacuous,
        lhs=h, rhs=rhs, margin=margin,
        verdict=verdict_for(True, vacuous, margin, tol),
    )


def check_flow_bounds(
    nu: Distribution,
    t_grid,
    trial_id: int = 0,
    family: str = "",
    tol: float = MARGIN_TOL,
) -> list[InequalityReport]:
    """Reverse transport-entropy bounds along the semigroup.

    Hypercube: H(nu_t | mu) <= phi(t) W1(nu, mu).
    Torus: H(nu_{t/2} | mu) <= Wc(nu, mu)^2 / (2t); the evolution runs at
    half time because the bound is proved on the unit-total-rate clock
    while evolve_torus uses rate 2.
    """
    grid = [float(t) for t in t_grid]
    if not grid:
        raise ValueError("t grid must be nonempty")
    if any(not t > 0.0 for t in grid):
        raise ValueError(f"t grid must be positive, got {grid}")
    mu = uniform(nu.space)
    reports = []
    if nu.space.kind == "hypercube":
        w1_val = float(w1(nu, mu))
        for t in grid:
            lhs = float(relative_entropy(evolve_hypercube(nu, t)))
            rhs = phi(t) * w1_val
            margin = rhs - lhs
            reports.append(InequalityReport(
                trial_id=trial_id, space=nu.space.kind, n=nu.space.n,
                family=f"{family}@t={t:g}" if family else f"@t={t:g}",
                H=lhs, I=None, W1=w1_val, W2=None, Wc=None,
                applicable=True, vacuous=False,
                lhs=lhs, rhs=rhs, margin=margin,
                verdict=verdict_for(True, False, margin, tol),
            ))
    else:
        wc_val = float(wc(nu, mu))
        for t in grid:
            lhs = float(relative_entropy(evolve_torus(nu, t / 2.0)))
            rhs = wc_val * wc_val / (2.0 * t)
            margin = rhs - lhs
            reports.append(InequalityReport(
                trial_id=trial_id, space=nu.space.kind, n=nu.space.n,
                family=f"{family}@t={t:g}" if family else f"@t={t:g}",
                H=lhs, I=None, W1=None, W2=None, Wc=wc_val,
                applicable=True, vacuous=False,
                lhs=lhs, rhs=rhs, margin=margin,
                verdict=verdict_for(True, False, margin, tol),
            ))
    return reports


_CHECKS = {
    "hypercube-hwi": check_hypercube_hwi,
    "torus-hwi": check_torus_hwi,
    "mlsi": check_mlsi,
}


def run_trials(
    check: str,
    space: StateSpace,
    family: DistributionFamily,
    n_trials: int,
    campaign_seed: int,
    *,
    t_grid=None,
    start_trial_id: int = 0,
    fail_fast: bool = True,
) -> list[InequalityReport]:
    """Run n_trials independent trials of one check over sampled inputs.

    Trial index tid gets seed (campaign_seed, tid), so shards of the same
    campaign executed separately produce the same reports.
    """
    if check != "flow" and check not in _CHECKS:
        raise ValueError(f"unknown check {check!r}")
    if check == "flow" and t_grid is None:
        raise ValueError("flow check needs a t grid")
    reports: list[InequalityReport] = []
    for idx in range(int(n_trials)):
        tid = start_trial_id + idx
        fam = replace(family, seed=(campaign_seed, tid))
        nu = sample(fam, space)
        if check == "flow":
            batch = check_flow_bounds(nu, t_grid, trial_id=tid, family=fam.descriptor)
        else:
            batch = [_CHECKS[check](nu, trial_id=tid, family=fam.descriptor)]
        for rep in batch:
            if fail_fast and rep.verdict == "FAIL":
                raise CampaignFailure(rep)
            reports.append(rep)
    return reports
