"""Nonparametric plug-in and sieve classification with rate experiments.

A library plus CLI for locally polynomial plug-in classifiers with an
eigenvalue guard, empirical risk minimization over epsilon-nets, synthetic
distributions with exact regression functions and margins, and a
reproducible experiment harness that checks convergence-rate exponents,
margin behavior, concentration and minimax lower bounds at desk scale.
"""

from .mathcore import (
    HolderSpec,
    KernelSpec,
    MultiIndex,
    bump_profile,
    enumerate_multiindices,
    kernel_eval,
    monomial_eval,
    radial_bump,
    smooth_bump_kernel,
    taylor_eval,
    uniform_ball_kernel,
)
from .sample import Sample
from .lp import (
    LPConfig,
    LocalDesign,
    PluginClassifier,
    build_design,
    default_guard_threshold,
    guarded_lp_estimate,
    lp_solve,
    plugin_classify,
    rate_optimal_bandwidth,
)
from .sieve import (
    EpsilonNet,
    NetSpec,
    SieveClassifier,
    UnsupportedSmoothnessError,
    build_net,
    empirical_risk,
    epsilon_schedule,
    sieve_fit,
)
from .distributions import (
    CorridorDistribution,
    HypercubeDistribution,
    QuadraticBallDistribution,
    SyntheticDistribution,
    ValidationError,
    corridor,
    hypercube_build,
    hypercube_mild_density_regime,
    hypercube_strong_density_regime,
    quadratic_ball,
    validate_holder,
)
from .risk import (
    ConcentrationProbe,
    ExponentSummary,
    RateFitResult,
    RateUndefinedError,
    RiskEstimate,
    assouad_lower_bound,
    concentration_probe,
    excess_bound_from_lp_error,
    excess_bound_from_sup_error,
    excess_risk,
    margin_gap_excess_bound,
    rate_fit,
    theoretical_exponents,
)

__version__ = "0.1.0"
