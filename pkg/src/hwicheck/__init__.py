"""Numerical certification of entropy-transport inequalities on the
discrete hypercube and discrete torus.

The package computes relative entropy, modified Fisher information, and
exact optimal-transport distances; evolves distributions under the
natural Markov semigroups; and checks the resulting inequalities
(entropy-transport-Fisher interpolation, modified log-Sobolev, Fisher
decay, reverse transport-entropy along the flow, Bessel-ratio bounds)
with explicit margins and verdicts.
"""

from .bessel import (
    BesselEvaluator,
    FMonotonicityReport,
    UnimodalSymmetricLaw,
    binomial_law,
    check_amos_bound,
    check_f_monotonicity,
    check_ratio_bound,
    check_unimodal_expectation,
    f_value,
    h_oddness_residual,
    log_bessel_i,
    normalization_defect,
    point_mass_law,
    uniform_window_law,
)
from .dynamics import (
    CouplingStats,
    FlowTrace,
    LiftStats,
    de_bruijn_residual,
    evolve_hypercube,
    evolve_torus,
    simulate_hypercube_coupling,
    simulate_torus_lift,
    trace,
)
from .functionals import (
    MASS_TOL,
    Distribution,
    FunctionalValue,
    fisher_hypercube,
    fisher_torus,
    point_mass,
    relative_entropy,
    uniform,
)
from .harness import (
    MARGIN_TOL,
    CampaignFailure,
    DistributionFamily,
    InequalityReport,
    check_flow_bounds,
    check_hypercube_hwi,
    check_mlsi,
    check_torus_hwi,
    optimal_time,
    phi,
    phi_bound_margin,
    run_trials,
    sample,
    verdict_for,
)
from .state_spaces import StateSpace, hypercube, torus
from .transport import CostSpec, TransportPlan, cost_matrix, solve, w1, w2, wc

__version__ = "0.1.0"

__all__ = [
    "BesselEvaluator",
    "CampaignFailure",
    "CostSpec",
    "CouplingStats",
    "Distribution",
    "DistributionFamily",
    "FMonotonicityReport",
    "FlowTrace",
    "FunctionalValue",
    "InequalityReport",
    "LiftStats",
    "MARGIN_TOL",
    "MASS_TOL",
    "StateSpace",
    "TransportPlan",
    "UnimodalSymmetricLaw",
    "binomial_law",
    "check_amos_bound",
    "check_f_monotonicity",
    "check_flow_bounds",
    "check_hypercube_hwi",
    "check_mlsi",
    "check_ratio_bound",
    "check_torus_hwi",
    "check_unimodal_expectation",
    "cost_matrix",
    "de_bruijn_residual",
    "evolve_hypercube",
    "evolve_torus",
    "f_value",
    "fisher_hypercube",
    "fisher_torus",
    "h_oddness_residual",
    "hypercube",
    "log_bessel_i",
    "normalization_defect",
    "optimal_time",
    "phi",
    "phi_bound_margin",
    "point_mass",
    "point_mass_law",
    "relative_entropy",
    "run_trials",
    "sample",
    "simulate_hypercube_coupling",
    "simulate_torus_lift",
    "solve",
    "trace",
    "torus",
    "uniform",
    "uniform_window_law",
    "verdict_for",
    "w1",
    "w2",
    "wc",
]
