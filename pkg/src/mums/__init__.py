"""Closed-form solution toolkit for linear rational-expectations models
with one endogenous and one exogenous state.

The impulse dynamics of every variable are represented as a three-state
absorbing Markov chain (impact state, medium-run state, steady state);
solving the model means finding the chain's undetermined state values
and its single endogenous transition probability.  Impulse responses,
present-discounted-value multipliers, cumulative sums and occupancy
probabilities then follow in closed form.  A classical
undetermined-coefficients state-space solver and a seeded Monte Carlo
ensemble simulator provide independent cross-checks of every result.
"""

__version__ = "0.1.0"

from .analytics import (
    HumpReport,
    IrfPath,
    OccupancyPath,
    cross_geometric_weights,
    cumulative_sum,
    hump_diagnosis,
    irf,
    irf_recurrence,
    occupancy,
    pdv_multiplier,
    transient_power,
)
from .ensemble import (
    ChainConfig,
    ConvergenceExperiment,
    EnsembleResult,
    config_from_solution,
    convergence_experiment,
    ensemble_average,
    expected_durations,
    simulate_run,
    substream,
)
from .errors import (
    AlgebraicSolutionWarning,
    DomainError,
    InputError,
    ModelValidationError,
    MumsError,
    ResidualCheckError,
    RootSelectionError,
    SingularSystemError,
    SolverError,
)
from .io import ModelDocument, document_to_json, load_document, parse_document, parse_model
from .markov import (
    MarkovSolution,
    NextPeriodExpectation,
    conditional_expectations,
    solve_model,
    solve_q,
    solve_states,
    verify_restrictions,
)
from .model import ModelSpec, ReducedModel, ShockImpulse, reduce_model, validate_model
from .nk_habits import (
    NKDerivedStats,
    NKParams,
    asad_loci,
    build_model,
    derived_stats,
    fixed_point_residual,
    restriction_residuals,
    solve_habit_model,
    solve_restriction_system,
)
from .state_space import (
    RootResult,
    SolverOptions,
    StateSpaceSolution,
    characteristic_residual,
    find_msv_root,
    iterate_irf,
    solve_msv,
    univariate_msv_root,
)
