"""Pseudo-Bayesian optimal exact designs for fractional polynomial models.

The public surface is re-exported here; submodules hold the details.
"""
from .onefactor import (
    CANONICAL_POWERS, FactorRange, FirstOrderFP, FirstOrderParams, SecondOrderFP,
    SecondOrderParams, eval_first_order, eval_second_order, fp_transform,
    grad_first_order, grad_second_order,
)
from .twofactor import (
    BetaVector, TwoFactorFP, TwoFactorParams, TwoFactorRange, beta_to_gamma,
    eval_two_factor, gamma_to_beta, grad_two_factor,
)
from .information import (
    Design, SingularInformation, build_info, covariance, variances_first_order_closed,
    variances_second_order_closed,
)
from .criterion import (
    D_OPT, WEIGHTED_AS, CriterionReport, Objective, WeightSpec, bayes_criterion,
    d_local, efficiency, efficiency_from_values, weighted_as_local, weights_first_order,
    weights_second_order,
)
from .priors import AlphaPrior, GammaPrior, PriorSpec, allocate, quadrature_draws, sample_draws
from .search import (
    SearchConfig, SearchResult, complete_search, coordinate_exchange, level_grid,
    point_exchange, refine,
)
from .catalog import ccd_projection, equally_spaced, locally_optimal, metric_levels
from .config import ConfigError, RunConfig, load_config, parse_config, run_search
from .tables import TABLE_IDS, run_table

__version__ = "0.1.0"
