"""Robust decision-making under independent, possibly non-identical processes.

The package models sets of independent data-generating processes, maxmin
expected-utility decisions over the induced predictive hulls, and updating
rules that shrink the set after observing a sample: average-then-update with
a sup-norm ball, a chi-square acceptance test for the i.i.d. case (with a
Bonferroni variant), maximum-likelihood selection, and Bayesian weighting
over enumerable families.  A seeded simulation harness checks the headline
guarantees (accommodation implies objective dominance, coverage of the truth,
and the Bayesian/ML failure modes) by Monte Carlo.
"""

from .config import (
    FORMATS,
    RULES,
    SCENARIO_NAMES,
    ExperimentConfig,
    load_config,
    parse_config,
)
from .decisions import (
    Act,
    DecisionProblem,
    PointCloud,
    RectHull,
    accommodates,
    act,
    act_from_json,
    act_to_json,
    basic_problem,
    box_simplex_vertices,
    certainty_equivalent,
    constant_act,
    future_hull,
    in_convex_hull,
    meu_choice,
    meu_values,
    min_expected_utility,
    minimax_regret_choice,
    objective_payoff,
    refines,
    regret_values,
)
from .dgp import (
    SUPPORT_FLOOR,
    BoxFamily,
    DgpFamily,
    ExplicitSet,
    IidTail,
    IndependentDgp,
    Marginal,
    OutcomeSpace,
    PeriodicTail,
    SampleData,
    UnionFamily,
    VertexFamily,
    average_sample_marginals,
    binary_iid,
    binary_marginal,
    binary_space,
    box_attainable_bounds,
    dgp_from_json,
    dgp_to_json,
    dgps_close,
    empirical_distribution,
    family_contains,
    family_from_json,
    family_to_json,
    floored_log_likelihood,
    iid_dgp,
    log_likelihood,
    marginal,
    marginals_close,
    periodic_dgp,
    sample,
    space_from_json,
    space_to_json,
)
from .errors import (
    ConfigError,
    EmptyFamilyError,
    EmptySampleError,
    HorizonTooLargeError,
    InvalidDistributionError,
    RobustUpdateError,
    SingularCovarianceError,
    WitnessNotFoundError,
    ZeroEvidenceError,
)
from .models import (
    BernoulliNuisanceModel,
    GaussianSignalsModel,
    Interval,
    bern_marginal,
    bern_prediction_asymptotic,
    bern_prediction_finite,
    bern_prediction_ml,
    bern_theta_asymptotic,
    bern_theta_finite,
    gauss_atu_states,
    gauss_sample,
)
from .report import (
    CSV_COLUMNS,
    CheckResult,
    ExperimentReport,
    ReplicationRecord,
    build_report,
)
from .scenarios import SCENARIOS, mc_threshold, run_scenario
from .stats import (
    EllipsoidRegion,
    acceptance_test,
    average_covariance,
    bonferroni_accept,
    bonferroni_pbar_box,
    chi_square_cdf,
    chi_square_quantile,
    ellipsoid_pbar_box,
    gram_difference,
    iid_acceptance_region,
    iid_average_covariance,
    min_eigenvalue,
    multinomial_covariance,
    normal_cdf,
    normal_upper_quantile,
    psd_check,
    score_interval,
    test_statistic,
    wilson_interval,
)
from .updating import (
    AverageBallConstraint,
    BonferroniConstraint,
    IidAcceptanceConstraint,
    PosteriorAtom,
    PosteriorWeights,
    UpdateParams,
    achievable_average_box,
    average_then_update,
    bayesian_posterior,
    bonferroni_update,
    full_bayesian_update,
    max_likelihood_update,
    robust_iid_update,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
