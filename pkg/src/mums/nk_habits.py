"""New Keynesian model with external habit formation.

Log-linear equations in the marginal utility of consumption lambda_t,
inflation pi_t, the nominal rate r_t and output y_t, driven by an AR(1)
preference shock xi_t:

    lambda_t = E_t[lambda_{t+1}] + (r_t - E_t[pi_{t+1}] - xi_t)
    pi_t     = beta E_t[pi_{t+1}] + kappa (eta y_t - lambda_t)
    y_t      = h y_{t-1} - (1 - h) lambda_t
    r_t      = phi_pi pi_t

Substituting the policy rule leaves two forward-looking controls
(lambda, pi) and makes output the endogenous state with persistence h,
so the model maps directly onto the solver's structural form:

    Euler row:    lambda_t - phi_pi pi_t = E[lambda'] - E[pi'] - xi_t
    Phillips row: kappa lambda_t + pi_t  = beta E[pi'] + kappa eta y_t
    state:        y_t = h y_{t-1} - (1 - h) lambda_t

The shock is passed literally (a negative value is a contractionary
demand shock); the Euler row's loading of -1 on xi_t preserves its sign.

In Markov-state form the model reduces to seven restrictions in
(q, lambda_I, lambda_M, pi_I, pi_M, y_I, y_M); this module also solves
that specialized system directly, as an independent check on the
general pipeline, and builds the aggregate-supply/aggregate-demand loci
that represent the equilibrium graphically.  The persistence q solves
the scalar fixed point

    q = h - q (1 - h) f(q),
    f(q) = kappa eta (phi_pi - q) / ((1-q)(1-beta q) + kappa (phi_pi - q)),

which is the model's characteristic equation in disguise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from .analytics import irf
from .errors import DomainError, ModelValidationError
from .markov import MarkovSolution, solve_model
from .model import ModelSpec
from .state_space import SolverOptions

__all__ = [
    "NKParams",
    "NKDerivedStats",
    "FixedPointCheck",
    "LocusLine",
    "build_model",
    "solve_habit_model",
    "fixed_point_residual",
    "solve_restriction_system",
    "restriction_residuals",
    "derived_stats",
    "asad_loci",
]

CONTROL_NAMES = ("lambda", "pi")


@dataclass(frozen=True)
class NKParams:
    """Calibration of the habit model.

    Defaults are the quarterly calibration used throughout the demand-
    shock demonstration: beta=0.99, kappa=0.05, phi_pi=1.5, eta=1,
    p=0.7, h=0.9 and a -1% preference shock.
    """

    beta: float = 0.99
    kappa: float = 0.05
    phi_pi: float = 1.5
    h: float = 0.9
    eta: float = 1.0
    p: float = 0.7
    xi_impact: float = -0.01

    def validate(self) -> list[str]:
        problems = []
        if not 0.0 < self.beta < 1.0:
            problems.append(f"beta: must lie in (0, 1), got {self.beta}")
        if not self.kappa > 0.0:
            problems.append(f"kappa: must be positive, got {self.kappa}")
        if not self.phi_pi > 1.0:
            problems.append(f"phi_pi: must exceed 1 (active policy), got {self.phi_pi}")
        if not 0.0 <= self.h < 1.0:
            problems.append(f"h: must lie in [0, 1), got {self.h}")
        if not self.eta >= 0.0:
            problems.append(f"eta: must be non-negative, got {self.eta}")
        if not 0.0 <= self.p < 1.0:
            problems.append(f"p: must lie in [0, 1), got {self.p}")
        if not math.isfinite(self.xi_impact) or self.xi_impact == 0.0:
            problems.append(f"xi_impact: must be finite and nonzero, got {self.xi_impact}")
        return problems


@dataclass(frozen=True)
class NKDerivedStats:
    """Summary statistics derived from a solved habit model.

    ``psi`` is the slope of expected next-period inflation with respect
    to impact output; ``euler_slope_impact`` the coefficient through
    which the impact Euler equation maps (phi_pi - p) pi_I and the shock
    into y_I; ``pdv_scaling`` the factor 1 + beta q / (1 - beta q)
    turning the impact output response into its lifetime discounted
    response.  ``euler_shift``/``phillips_shift`` are the vertical
    displacements of the medium-run loci induced by the short-run drag
    h y_I / (1 - p), and ``shift_ratio`` their ratio, reported next to
    the reference coefficient 1 + eta (1 - h).
    """

    q: float
    psi: float
    euler_slope_impact: float
    pdv_scaling: float
    euler_shift: float
    phillips_shift: float
    shift_ratio: float
    shift_ratio_reference: float
    q_lower_bound: float
    hump: bool


@dataclass(frozen=True)
class FixedPointCheck:
    """Residual of the persistence fixed point and its kernel value."""

    residual: float
    kernel: float
    kernel_in_unit_interval: bool


@dataclass(frozen=True, eq=False)
class LocusLine:
    """One locus of the AS-AD representation, as (output, inflation) points."""

    panel: str
    locus: str
    output: np.ndarray
    inflation: np.ndarray


def _check_params(params: NKParams) -> None:
    problems = params.validate()
    if problems:
        raise ModelValidationError(problems)


def build_model(params: NKParams) -> ModelSpec:
    """Map the calibration onto the structural model form.

    Two controls (lambda, pi); output is the endogenous state with
    rho = h and D0 = [-(1-h), 0]; the preference shock is the exogenous
    state and enters the Euler row with loading -1.
    """
    _check_params(params)
    return ModelSpec(
        n_controls=2,
        control_names=CONTROL_NAMES,
        A0=[[1.0, -params.phi_pi], [params.kappa, 1.0]],
        A1=[[1.0, -1.0], [0.0, params.beta]],
        B0=[0.0, params.kappa * params.eta],
        B1=[0.0, 0.0],
        C0=[-1.0, 0.0],
        D0=[-(1.0 - params.h), 0.0],
        rho=params.h,
        e=0.0,
        p=params.p,
    )


def solve_habit_model(
    params: NKParams, options: SolverOptions | None = None
) -> tuple[ModelSpec, MarkovSolution]:
    """Build and solve the habit model; the shock size is xi_impact."""
    model = build_model(params)
    return model, solve_model(model, shock=params.xi_impact, options=options)


def _fixed_point_kernel(params: NKParams, q: float) -> float:
    numerator = params.kappa * params.eta * (params.phi_pi - q)
    denominator = (1.0 - q) * (1.0 - params.beta * q) + params.kappa * (
        params.phi_pi - q
    )
    if denominator == 0.0:
        raise DomainError(f"fixed-point kernel denominator vanishes at q={q}")
    return numerator / denominator


def fixed_point_residual(params: NKParams, q: float) -> FixedPointCheck:
    """Evaluate q - h + q (1 - h) f(q) and the kernel f(q).

    The residual vanishes at the solved persistence.  The kernel is the
    eta-general form; at eta = 1 it coincides with
    kappa (phi_pi - q) / ((1-q)(1-beta q) + kappa (phi_pi - q)) and lies
    in (0, 1], which is what delivers the lower bound q >= 2h - 1.
    """
    _check_params(params)
    kernel = _fixed_point_kernel(params, q)
    residual = q - params.h + q * (1.0 - params.h) * kernel
    return FixedPointCheck(
        residual=residual,
        kernel=kernel,
        kernel_in_unit_interval=0.0 < kernel <= 1.0,
    )


def _solve_fixed_point_q(params: NKParams) -> float:
    if params.h == 0.0:
        return 0.0

    def g(q: float) -> float:
        return q - params.h + q * (1.0 - params.h) * _fixed_point_kernel(params, q)

    g_high = g(params.h)
    if g_high == 0.0:
        return params.h
    return float(brentq(g, 0.0, params.h, xtol=1e-15))


def solve_restriction_system(params: NKParams) -> dict[str, float]:
    """Solve the seven Markov restrictions of the habit model directly.

    The persistence comes from the scalar fixed point; the six remaining
    unknowns then solve a linear system assembled from the impact and
    medium-run Euler, Phillips and marginal-utility blocks plus the
    persistence link.  Independent of the general pipeline by
    construction, which is exactly its value as a cross-check.
    """
    _check_params(params)
    q = _solve_fixed_point_q(params)
    beta, kappa, phi_pi = params.beta, params.kappa, params.phi_pi
    h, eta, p, xi = params.h, params.eta, params.p, params.xi_impact

    # Unknown ordering: lambda_I, lambda_M, pi_I, pi_M, y_I, y_M.
    matrix = np.array(
        [
            [1.0 - p, -(1.0 - p), -(phi_pi - p), 1.0 - p, 0.0, 0.0],
            [0.0, 1.0 - q, 0.0, -(phi_pi - q), 0.0, 0.0],
            [kappa, 0.0, 1.0 - beta * p, -beta * (1.0 - p), -kappa * eta, 0.0],
            [0.0, kappa, 0.0, 1.0 - beta * q, 0.0, -kappa * eta],
            [1.0 - h, 0.0, 0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, -q / (1.0 - p), 1.0],
        ]
    )
    rhs = np.array([-xi, 0.0, 0.0, 0.0, 0.0, 0.0])
    lam_i, lam_m, pi_i, pi_m, y_i, y_m = np.linalg.solve(matrix, rhs)
    return {
        "q": q,
        "lambda_impact": float(lam_i),
        "lambda_medium": float(lam_m),
        "pi_impact": float(pi_i),
        "pi_medium": float(pi_m),
        "y_impact": float(y_i),
        "y_medium": float(y_m),
    }


def restriction_residuals(params: NKParams, values: dict[str, float]) -> dict[str, float]:
    """Residuals of all seven habit-model restrictions at given values."""
    beta, kappa, phi_pi = params.beta, params.kappa, params.phi_pi
    h, eta, p, xi = params.h, params.eta, params.p, params.xi_impact
    q = values["q"]
    lam_i = values["lambda_impact"]
    lam_m = values["lambda_medium"]
    pi_i = values["pi_impact"]
    pi_m = values["pi_medium"]
    y_i = values["y_impact"]
    y_m = values["y_medium"]
    return {
        "euler_impact": lam_i
        - p * lam_i
        - (1.0 - p) * lam_m
        - (phi_pi - p) * pi_i
        + (1.0 - p) * pi_m
        + xi,
        "euler_medium": lam_m - q * lam_m - (phi_pi - q) * pi_m,
        "phillips_impact": pi_i
        - beta * (p * pi_i + (1.0 - p) * pi_m)
        - kappa * (eta * y_i - lam_i),
        "phillips_medium": pi_m - beta * q * pi_m - kappa * (eta * y_m - lam_m),
        "marginal_utility_impact": y_i + (1.0 - h) * lam_i,
        "marginal_utility_medium": y_m - h / (1.0 - p) * y_i + (1.0 - h) * lam_m,
        "ar2_link": y_m - q / (1.0 - p) * y_i,
    }


def _psi(params: NKParams, q: float) -> float:
    """Slope of expected next-period inflation in impact output."""
    return (
        params.kappa
        / (1.0 - params.beta * q)
        * (params.eta * q + (q - params.h) / (1.0 - params.h))
    )


def _short_run_loci(params: NKParams, q: float):
    """Closed-form impact-period Euler and Phillips loci, pi as a function of y.

    Expectations are substituted out through the chain structure:
    E_I[y'] = (p + q) y_I and E_I[pi'] = p pi_I + psi y_I.
    """
    h, p, phi_pi = params.h, params.p, params.phi_pi
    psi = _psi(params, q)
    depth = 1.0 - p + h - q - (1.0 - h) * psi
    euler_denominator = (1.0 - h) * (phi_pi - p)
    if euler_denominator == 0.0:
        raise DomainError("impact Euler locus is vertical: (1-h)(phi_pi - p) = 0")

    def euler(y: np.ndarray) -> np.ndarray:
        return (-depth * y + (1.0 - h) * params.xi_impact) / euler_denominator

    phillips_slope = (
        params.beta * psi + params.kappa * (params.eta + 1.0 / (1.0 - h))
    ) / (1.0 - params.beta * p)

    def phillips(y: np.ndarray) -> np.ndarray:
        return phillips_slope * y

    return euler, phillips, depth


def _medium_run_loci(params: NKParams, q: float, drag: float):
    """Medium-run Euler and Phillips loci shifted by the short-run drag."""
    h, phi_pi = params.h, params.phi_pi

    def euler(y: np.ndarray) -> np.ndarray:
        return (1.0 - q) * (drag - y) / ((1.0 - h) * (phi_pi - q))

    def phillips(y: np.ndarray) -> np.ndarray:
        return (
            params.kappa
            * ((params.eta + 1.0 / (1.0 - h)) * y - drag / (1.0 - h))
            / (1.0 - params.beta * q)
        )

    return euler, phillips


def derived_stats(params: NKParams, solution: MarkovSolution) -> NKDerivedStats:
    """Analytics of a solved habit model.

    The locus shifts are measured numerically as the vertical
    displacement of the medium-run Euler and Phillips loci when the
    drag term h y_I / (1 - p) is switched on.  Vanishing denominators
    raise :class:`~mums.errors.DomainError` rather than being skipped.
    """
    _check_params(params)
    q = solution.q
    y_impact = solution.k_impact
    psi = _psi(params, q)

    depth = 1.0 - params.p + params.h - q - (1.0 - params.h) * psi
    if depth == 0.0:
        raise DomainError("impact Euler slope denominator vanishes")
    euler_slope_impact = -(1.0 - params.h) / depth

    if params.beta * q >= 1.0:
        raise DomainError(f"beta*q = {params.beta * q:.6g} >= 1; scaling undefined")
    pdv_scaling = 1.0 + params.beta * q / (1.0 - params.beta * q)

    drag = params.h * y_impact / (1.0 - params.p)
    euler_with, phillips_with = _medium_run_loci(params, q, drag)
    euler_without, phillips_without = _medium_run_loci(params, q, 0.0)
    probe = np.array([0.0])
    euler_shift = abs(float(euler_with(probe)[0] - euler_without(probe)[0]))
    phillips_shift = abs(float(phillips_with(probe)[0] - phillips_without(probe)[0]))
    shift_ratio = euler_shift / phillips_shift if phillips_shift != 0.0 else math.nan

    return NKDerivedStats(
        q=q,
        psi=psi,
        euler_slope_impact=euler_slope_impact,
        pdv_scaling=pdv_scaling,
        euler_shift=euler_shift,
        phillips_shift=phillips_shift,
        shift_ratio=shift_ratio,
        shift_ratio_reference=1.0 + params.eta * (1.0 - params.h),
        q_lower_bound=2.0 * params.h - 1.0,
        hump=params.p + q > 1.0,
    )


def asad_loci(
    params: NKParams,
    solution: MarkovSolution,
    grid: np.ndarray | None = None,
    points: int = 201,
) -> list[LocusLine]:
    """Aggregate-supply/aggregate-demand loci for the habit model and its
    no-habit twin.

    Returns short-run and medium-run Euler/Phillips lines over an output
    grid, each tagged with its panel and variant, plus single-point
    equilibrium markers at the solved impact and medium-run states.  The
    default grid spans twice the larger equilibrium output displacement
    of the two variants, with ``points`` nodes.
    """
    _check_params(params)
    pi_index = CONTROL_NAMES.index("pi")

    params_plain = replace(params, h=0.0)
    _, solution_plain = solve_habit_model(params_plain)

    if grid is None:
        scale = max(abs(solution.k_impact), abs(solution_plain.k_impact))
        if scale == 0.0:
            scale = 1.0
        grid = np.linspace(-2.0 * scale, 2.0 * scale, points)
    else:
        grid = np.asarray(grid, dtype=float)
        if grid.size == 0:
            raise ValueError("the output grid must not be empty")

    lines: list[LocusLine] = []
    for variant, variant_params, variant_solution in (
        ("habits", params, solution),
        ("no_habits", params_plain, solution_plain),
    ):
        q = variant_solution.q
        y_i = variant_solution.k_impact
        y_m = variant_solution.k_medium
        pi_i = float(variant_solution.controls_impact[pi_index])
        pi_m = float(variant_solution.controls_medium[pi_index])
        drag = variant_params.h * y_i / (1.0 - variant_params.p)

        euler_short, phillips_short, _ = _short_run_loci(variant_params, q)
        euler_medium, phillips_medium = _medium_run_loci(variant_params, q, drag)
        lines += [
            LocusLine("short_run", f"euler_{variant}", grid, euler_short(grid)),
            LocusLine("short_run", f"phillips_{variant}", grid, phillips_short(grid)),
            LocusLine("medium_run", f"euler_{variant}", grid, euler_medium(grid)),
            LocusLine("medium_run", f"phillips_{variant}", grid, phillips_medium(grid)),
            LocusLine(
                "short_run",
                f"equilibrium_{variant}",
                np.array([y_i]),
                np.array([pi_i]),
            ),
            LocusLine(
                "medium_run",
                f"equilibrium_{variant}",
                np.array([y_m]),
                np.array([pi_m]),
            ),
        ]
    return lines


def output_irf(solution: MarkovSolution, horizon: int) -> np.ndarray:
    """Impulse response of output, read off the endogenous-state path."""
    return irf(solution, horizon).state
