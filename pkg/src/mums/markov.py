"""Markov-state solution of the reduced model.

A solved model is summarized by one transition probability q together
with impact and medium-run values for the endogenous state and every
control.  Writing the forward and backward equations in the impact
state (exogenous level equal to the shock) and in the medium-run state
(exogenous level zero) gives five restriction blocks, with s the shock
size:

    forward, impact:   A0 Y_I = p A Y_I + (1-p) A Y_M + B k_I + C s
    forward, medium:   A0 Y_M = q A Y_M + B k_M
    backward, impact:  k_I = D0 Y_I + e s
    backward, medium:  k_M = rho k_I / (1-p) + D0 Y_M
    persistence link:  k_M = q k_I / (1-p)

q solves the same scalar characteristic equation as the state-space
persistence coefficient, so the shared homotopy tracker provides it.
Given q, the medium-run block collapses to Y_M = (A0 - q A)^{-1} B k_M
and substituting the backward and persistence links into the impact
block leaves one dense system for Y_I.  All five restrictions are
re-verified on every solution before it is returned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ResidualCheckError, RootSelectionError
from .model import ModelSpec, ShockImpulse, reduce_model, shock_size
from .state_space import (
    DEFAULT_OPTIONS,
    RootResult,
    SolverOptions,
    checked_solve,
    find_msv_root,
    univariate_msv_root,
)

__all__ = [
    "MarkovSolution",
    "NextPeriodExpectation",
    "solve_q",
    "solve_states",
    "solve_model",
    "verify_restrictions",
    "conditional_expectations",
]

RESTRICTION_NAMES = (
    "forward_impact",
    "forward_medium",
    "backward_impact",
    "backward_medium",
    "ar2_link",
)


@dataclass(frozen=True, eq=False)
class MarkovSolution:
    """Markov states and transition probability of a solved model.

    ``controls_impact``/``controls_medium`` hold the length-N impact and
    medium-run control values, ordered like ``control_names``.
    ``markov_valid`` is true exactly when 0 <= q < 1, i.e. when q can be
    read as the probability of remaining in the medium-run state.
    """

    q: float
    k_impact: float
    k_medium: float
    controls_impact: np.ndarray
    controls_medium: np.ndarray
    p: float
    shock: float
    markov_valid: bool
    stationary: bool
    control_names: tuple[str, ...]


@dataclass(frozen=True)
class NextPeriodExpectation:
    """Expected next-period values conditional on the current chain state."""

    controls: dict[str, float]
    state: float


def solve_q(model: ModelSpec, options: SolverOptions | None = None) -> RootResult:
    """Solve for the transition probability of the medium-run state.

    q is the MSV root of the characteristic equation of the reduced
    model, located by homotopy continuation.  For single-control models
    the result is cross-checked against the closed-form minus-sign
    quadratic root; a disagreement indicates a branch-tracking failure
    and raises :class:`~mums.errors.RootSelectionError`.
    """
    options = options or DEFAULT_OPTIONS
    root = find_msv_root(model, options)
    if model.n_controls == 1:
        reduced = reduce_model(model)
        closed = univariate_msv_root(
            a0=float(reduced.A0[0, 0]),
            a=float(reduced.A[0, 0]),
            b=float(reduced.B[0]),
            d=float(reduced.D0[0]),
            rho=reduced.rho,
        )
        if abs(closed - root.value) > options.cross_check_tol * max(1.0, abs(closed)):
            raise RootSelectionError(
                f"homotopy root {root.value:.12g} disagrees with the closed-form "
                f"quadratic root {closed:.12g}"
            )
    return root


def solve_states(
    model: ModelSpec,
    q: float,
    shock: ShockImpulse | float = 1.0,
    options: SolverOptions | None = None,
) -> MarkovSolution:
    """Solve the impact and medium-run state vectors for a given q.

    The shock scales the exogenous level of the impact state, so the
    whole solution is proportional to it.  All five defining
    restrictions are verified before returning; a residual above
    ``options.restriction_tol`` (relative to max(1, |shock|)) raises
    :class:`~mums.errors.ResidualCheckError` carrying the per-equation
    residuals.
    """
    options = options or DEFAULT_OPTIONS
    reduced = reduce_model(model)
    size = shock_size(shock)
    p = reduced.p
    q = float(q)

    # Y_M direction per unit of k_M, from the medium-run forward block.
    direction = checked_solve(
        reduced.A0 - q * reduced.A,
        reduced.B,
        "medium-run control direction",
        options.linear_residual_tol,
    )
    g = q * (reduced.A @ direction) + reduced.B
    impact_matrix = reduced.A0 - p * reduced.A - np.outer(g, reduced.D0)
    impact_rhs = (g * reduced.e + reduced.C) * size
    y_impact = checked_solve(
        impact_matrix, impact_rhs, "impact system", options.linear_residual_tol
    )

    k_impact = float(reduced.D0 @ y_impact) + reduced.e * size
    k_medium = q * k_impact / (1.0 - p)
    y_medium = direction * k_medium

    solution = MarkovSolution(
        q=q,
        k_impact=k_impact,
        k_medium=k_medium,
        controls_impact=y_impact,
        controls_medium=y_medium,
        p=p,
        shock=size,
        markov_valid=0.0 <= q < 1.0,
        stationary=abs(q) < 1.0,
        control_names=model.control_names,
    )
    residuals = verify_restrictions(solution, model)
    worst = max(residuals.values())
    if worst > options.restriction_tol * max(1.0, abs(size)):
        raise ResidualCheckError(
            f"Markov restrictions violated: worst residual {worst:.3e} exceeds "
            f"{options.restriction_tol:g} x max(1, |shock|)",
            residuals,
        )
    return solution


def solve_model(
    model: ModelSpec,
    shock: ShockImpulse | float = 1.0,
    options: SolverOptions | None = None,
) -> MarkovSolution:
    """Convenience wrapper: solve q, then the state vectors."""
    root = solve_q(model, options)
    return solve_states(model, root.value, shock, options)


def verify_restrictions(solution: MarkovSolution, model: ModelSpec) -> dict[str, float]:
    """Infinity-norm residuals of the five defining restrictions.

    Returns a report keyed ``forward_impact``, ``forward_medium``,
    ``backward_impact``, ``backward_medium`` and ``ar2_link``.  Never
    raises; callers decide what residual level is acceptable.
    """
    reduced = reduce_model(model)
    q = solution.q
    p = reduced.p
    size = solution.shock
    y_i = solution.controls_impact
    y_m = solution.controls_medium
    k_i = solution.k_impact
    k_m = solution.k_medium

    forward_impact = (
        reduced.A0 @ y_i
        - p * (reduced.A @ y_i)
        - (1.0 - p) * (reduced.A @ y_m)
        - reduced.B * k_i
        - reduced.C * size
    )
    forward_medium = reduced.A0 @ y_m - q * (reduced.A @ y_m) - reduced.B * k_m
    backward_impact = k_i - float(reduced.D0 @ y_i) - reduced.e * size
    backward_medium = k_m - reduced.rho * k_i / (1.0 - p) - float(reduced.D0 @ y_m)
    ar2_link = k_m - q * k_i / (1.0 - p)

    return {
        "forward_impact": float(np.linalg.norm(forward_impact, np.inf)),
        "forward_medium": float(np.linalg.norm(forward_medium, np.inf)),
        "backward_impact": abs(backward_impact),
        "backward_medium": abs(backward_medium),
        "ar2_link": abs(ar2_link),
    }


def conditional_expectations(
    solution: MarkovSolution,
) -> tuple[NextPeriodExpectation, NextPeriodExpectation]:
    """Expected next-period values in the impact and medium-run states.

    Conditional on the impact state the chain stays with probability p
    and moves to the medium-run state otherwise, so
    E_I[X'] = p X_I + (1-p) X_M componentwise; conditional on the
    medium-run state, E_M[X'] = q X_M.
    """
    p, q = solution.p, solution.q
    impact = NextPeriodExpectation(
        controls={
            name: p * float(y_i) + (1.0 - p) * float(y_m)
            for name, y_i, y_m in zip(
                solution.control_names, solution.controls_impact, solution.controls_medium
            )
        },
        state=p * solution.k_impact + (1.0 - p) * solution.k_medium,
    )
    medium = NextPeriodExpectation(
        controls={
            name: q * float(y_m)
            for name, y_m in zip(solution.control_names, solution.controls_medium)
        },
        state=q * solution.k_medium,
    )
    return impact, medium
