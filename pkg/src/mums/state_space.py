"""Undetermined-coefficients state-space solution and the shared
persistence-root machinery.

The minimum-state-variable (MSV) solution of a reduced model takes the
state-space form

    k_t = eta_kk k_{t-1} + eta_kz z_t
    Y_t = eta_yk k_{t-1} + eta_yz z_t

Identifying coefficients against the reduced model shows that eta_kk
must be a zero of the scalar function

    f(x) = x - rho - x * D0 (A0 - x A)^{-1} B

and that eta_yk = (A0 - eta_kk A)^{-1} B eta_kk, while (eta_yz, eta_kz)
solve one further linear system.  Among the zeros of f, the MSV root is
the one that continuously deforms to x = 0 as the feedback coefficients
(B, D0, rho) are switched off.  The solver tracks exactly that branch:
it scales (B, D0, rho) by s, steps s from 0 to 1 over uniform
increments, and re-solves at each step with safeguarded bracketing in a
window around the previous root.

For a single control the zeros of f are the roots of the quadratic

    a x^2 - (a0 + a rho - b d) x + a0 rho = 0

and the MSV branch is the root with the minus sign in front of the
square root; :func:`univariate_msv_root` evaluates it in a
cancellation-free arrangement and serves as a closed-form cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .analytics import IrfPath
from .errors import (
    ModelValidationError,
    ResidualCheckError,
    RootSelectionError,
    SingularSystemError,
)
from .model import (
    ModelSpec,
    ReducedModel,
    ShockImpulse,
    reduce_model,
    shock_size,
    validate_model,
)

__all__ = [
    "SolverOptions",
    "RootResult",
    "StateSpaceSolution",
    "characteristic_residual",
    "find_msv_root",
    "univariate_msv_root",
    "solve_msv",
    "iterate_irf",
]


@dataclass(frozen=True)
class SolverOptions:
    """Tolerances and homotopy controls shared by the solvers.

    ``root_residual_tol`` bounds |f(root)| at the accepted persistence
    root; ``linear_residual_tol`` is the conditioning guard on every
    dense solve (relative residual); ``restriction_tol`` is the
    acceptance threshold for a Markov solution's defining restrictions,
    applied relative to max(1, |shock|).
    """

    root_residual_tol: float = 1e-12
    linear_residual_tol: float = 1e-8
    restriction_tol: float = 1e-8
    cross_check_tol: float = 1e-8
    homotopy_steps: int = 64
    window: float = 0.2
    window_growth: float = 2.0
    max_window: float = 3.2
    scan_points: int = 17


DEFAULT_OPTIONS = SolverOptions()


@dataclass(frozen=True)
class RootResult:
    """Persistence root of the characteristic equation.

    ``markov_valid`` records whether the root lies in [0, 1) and can be
    read as a transition probability; ``stationary`` whether |root| < 1.
    ``trace`` holds the homotopy path as (scale, root) pairs.
    """

    value: float
    residual: float
    markov_valid: bool
    stationary: bool
    trace: tuple[tuple[float, float], ...]


@dataclass(frozen=True, eq=False)
class StateSpaceSolution:
    """Undetermined-coefficients solution coefficients.

    ``eta_yk`` and ``eta_yz`` are the length-N loadings of the controls
    on the lagged endogenous state and on the exogenous state.
    ``residuals`` records the infinity norms of the identification
    systems the coefficients were solved from.
    """

    eta_kk: float
    eta_kz: float
    eta_yk: np.ndarray
    eta_yz: np.ndarray
    stationary: bool
    residuals: dict[str, float]


def characteristic_residual(reduced: ReducedModel, x: float) -> float:
    """Evaluate f(x) = x - rho - x * D0 (A0 - x A)^{-1} B.

    Raises :class:`~mums.errors.SingularSystemError` when A0 - x A is
    singular at the requested point.
    """
    m = reduced.A0 - x * reduced.A
    try:
        u = np.linalg.solve(m, reduced.B)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(
            f"A0 - x*A is singular at x={x!r}; the residual is undefined there"
        ) from exc
    return x - reduced.rho - x * float(reduced.D0 @ u)


def univariate_msv_root(a0: float, a: float, b: float, d: float, rho: float) -> float:
    """Closed-form MSV root for a single-control reduced model.

    Evaluates the minus-sign root of a x^2 - (a0 + a rho - b d) x +
    a0 rho = 0, i.e. the branch equal to zero when b = d = rho = 0.  The
    expression is rationalized so that no cancellation occurs for small
    a or small rho.
    """
    k = a0 + a * rho - b * d
    if a == 0.0:
        if k == 0.0:
            raise RootSelectionError(
                "degenerate linear characteristic equation (a = 0 and a0 + a*rho - b*d = 0)"
            )
        return a0 * rho / k
    disc = k * k - 4.0 * a * a0 * rho
    if disc < 0.0:
        raise RootSelectionError(
            f"complex persistence-root pair (discriminant {disc:.3e} < 0); "
            "the model has no real MSV solution"
        )
    sq = math.sqrt(disc)
    if k >= 0.0:
        denom = k + sq
        if denom == 0.0:  # k = disc = 0 implies a0*rho = 0
            return 0.0
        return 2.0 * a0 * rho / denom
    return (k - sq) / (2.0 * a)


def _scaled_residual(reduced: ReducedModel, s: float):
    """Residual of the homotopy member with (B, D0, rho) scaled by s.

    Returns a callable f_s(x); singular evaluation points yield +inf so
    bracketing logic can skip them.
    """
    rho = s * reduced.rho
    ss = s * s
    if reduced.A0.shape == (1, 1):
        a0 = float(reduced.A0[0, 0])
        a = float(reduced.A[0, 0])
        bd = ss * float(reduced.B[0]) * float(reduced.D0[0])

        def f(x: float) -> float:
            den = a0 - a * x
            if den == 0.0:
                return math.inf
            return x - rho - x * bd / den

        return f

    A0 = reduced.A0
    A = reduced.A
    B = reduced.B
    D0 = reduced.D0

    def f(x: float) -> float:
        try:
            u = np.linalg.solve(A0 - x * A, B)
        except np.linalg.LinAlgError:
            return math.inf
        value = x - rho - ss * x * float(D0 @ u)
        return value if math.isfinite(value) else math.inf

    return f


def _bracketed_root(f, lo, hi, flo, fhi) -> float | None:
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        return None
    return float(brentq(f, lo, hi, xtol=1e-14))


def _scan_candidates(f, lo, hi, points) -> list[float]:
    """Roots of f found by sign changes on a uniform grid over [lo, hi].

    Sub-intervals with a non-finite endpoint are skipped (poles of f),
    and candidates whose residual stays large are discarded: a sign
    change across a pole converges to the pole, not to a root.
    """
    xs = np.linspace(lo, hi, points)
    fs = [f(float(x)) for x in xs]
    candidates = []
    for i in range(points - 1):
        f0, f1 = fs[i], fs[i + 1]
        if not (math.isfinite(f0) and math.isfinite(f1)):
            continue
        root = _bracketed_root(f, float(xs[i]), float(xs[i + 1]), f0, f1)
        if root is not None and abs(f(root)) <= 1e-9:
            candidates.append(root)
    return candidates


def _track_root(f, x_prev: float, options: SolverOptions, s: float) -> float:
    """Continue the root branch from x_prev to the member f of the homotopy."""
    f_prev = f(x_prev)
    if f_prev == 0.0:
        return x_prev

    width = options.window
    while width <= options.max_window:
        lo, hi = x_prev - width, x_prev + width
        flo, fhi = f(lo), f(hi)
        if math.isfinite(flo) and math.isfinite(fhi):
            root = _bracketed_root(f, lo, hi, flo, fhi)
            if (
                root is not None
                and abs(f(root)) <= 1e-9
                and abs(root - x_prev) <= 0.6 * width
            ):
                return root
        candidates = _scan_candidates(f, lo, hi, options.scan_points)
        if candidates:
            return min(candidates, key=lambda c: abs(c - x_prev))
        width *= options.window_growth
    raise RootSelectionError(
        f"lost the persistence-root branch at homotopy scale s={s:.6f} "
        f"(previous root {x_prev:.6g}, searched windows up to half-width "
        f"{options.max_window:g})"
    )


def find_msv_root(model: ModelSpec, options: SolverOptions | None = None) -> RootResult:
    """Track the MSV persistence root from the decoupled system to the model.

    Scales the feedback coefficients (B, D0, rho) of the reduced model
    by s, where the root is exactly zero at s = 0, and follows the root
    branch over uniform steps in s with bracketed re-solves.  The final
    root must satisfy |f(root)| <= ``options.root_residual_tol``.

    For a single control the sign of the quadratic discriminant is
    checked first and a complex pair is rejected outright: the model
    then has no real MSV solution to select.
    """
    options = options or DEFAULT_OPTIONS
    violations = validate_model(model)
    if violations:
        raise ModelValidationError(violations)
    reduced = reduce_model(model)

    if model.n_controls == 1:
        a0 = float(reduced.A0[0, 0])
        a = float(reduced.A[0, 0])
        k = a0 + a * reduced.rho - float(reduced.B[0]) * float(reduced.D0[0])
        disc = k * k - 4.0 * a * a0 * reduced.rho
        if disc < 0.0:
            raise RootSelectionError(
                f"complex persistence-root pair (discriminant {disc:.3e} < 0); "
                "the model has no real MSV solution"
            )

    steps = options.homotopy_steps
    x = 0.0
    trace = [(0.0, 0.0)]
    for k_step in range(1, steps + 1):
        s = k_step / steps
        x = _track_root(_scaled_residual(reduced, s), x, options, s)
        trace.append((s, x))

    residual = characteristic_residual(reduced, x)
    if abs(residual) > options.root_residual_tol:
        raise RootSelectionError(
            f"homotopy terminated at x={x:.12g} with residual {residual:.3e} "
            f"above tolerance {options.root_residual_tol:g}"
        )
    return RootResult(
        value=x,
        residual=abs(residual),
        markov_valid=0.0 <= x < 1.0,
        stationary=abs(x) < 1.0,
        trace=tuple(trace),
    )


def checked_solve(matrix: np.ndarray, rhs: np.ndarray, label: str, tol: float) -> np.ndarray:
    """Dense partial-pivoting solve with a relative-residual guard."""
    try:
        x = np.linalg.solve(matrix, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"singular linear system: {label}") from exc
    residual = np.linalg.norm(matrix @ x - rhs, np.inf)
    scale = max(1.0, float(np.linalg.norm(rhs, np.inf)))
    if not np.all(np.isfinite(x)) or residual > tol * scale:
        raise SingularSystemError(
            f"ill-conditioned linear system: {label} "
            f"(relative residual {residual / scale:.3e} exceeds {tol:g})"
        )
    return x


def solve_msv(model: ModelSpec, options: SolverOptions | None = None) -> StateSpaceSolution:
    """Solve the model by undetermined coefficients.

    Args:
        model: validated structural model.
        options: solver tolerances; defaults are shared with the Markov
            solver so the two pipelines are directly comparable.

    Returns:
        StateSpaceSolution with the persistence root ``eta_kk``, state
        loadings ``eta_yk``/``eta_kz``/``eta_yz`` and the identification
        residuals actually achieved.

    Raises:
        ModelValidationError: the model breaks an invariant.
        RootSelectionError: no real MSV root could be tracked.
        SingularSystemError: an identification system is singular or
            fails the conditioning guard.
        ResidualCheckError: the assembled coefficients do not satisfy
            the identification equations.
    """
    options = options or DEFAULT_OPTIONS
    root = find_msv_root(model, options)
    reduced = reduce_model(model)
    eta_k = root.value

    m_k = checked_solve(
        reduced.A0 - eta_k * reduced.A,
        reduced.B * eta_k,
        "control loadings on the lagged state",
        options.linear_residual_tol,
    )
    g = reduced.A @ m_k + reduced.B
    m_z = checked_solve(
        reduced.A0 - reduced.p * reduced.A - np.outer(g, reduced.D0),
        g * reduced.e + reduced.C,
        "control loadings on the exogenous state",
        options.linear_residual_tol,
    )
    eta_z = float(reduced.D0 @ m_z) + reduced.e

    residuals = {
        "control_loading": float(
            np.linalg.norm(
                reduced.A0 @ m_k - eta_k * (reduced.A @ m_k) - reduced.B * eta_k, np.inf
            )
        ),
        "persistence": abs(eta_k - reduced.rho - float(reduced.D0 @ m_k)),
        "shock_loading": float(
            np.linalg.norm(
                reduced.A0 @ m_z
                - eta_z * (reduced.A @ m_k)
                - reduced.p * (reduced.A @ m_z)
                - reduced.B * eta_z
                - reduced.C,
                np.inf,
            )
        ),
    }
    worst = max(residuals.values())
    if worst > options.restriction_tol:
        raise ResidualCheckError(
            f"identification residuals reach {worst:.3e}, above "
            f"{options.restriction_tol:g}",
            residuals,
        )
    return StateSpaceSolution(
        eta_kk=eta_k,
        eta_kz=eta_z,
        eta_yk=m_k,
        eta_yz=m_z,
        stationary=root.stationary,
        residuals=residuals,
    )


def iterate_irf(
    solution: StateSpaceSolution,
    model: ModelSpec,
    horizon: int,
    shock: ShockImpulse | float = 1.0,
) -> IrfPath:
    """Brute-force forward iteration of the state-space form.

    Feeds the deterministic shock path z_n = p^n * shock through the
    state and measurement equations period by period, starting from the
    steady state (k = 0 before impact).  This is deliberately the
    plainest possible construction of the impulse response; it serves as
    the oracle the closed-form paths are checked against.
    """
    if horizon < 0:
        raise ValueError(f"horizon must be >= 0, got {horizon}")
    size = shock_size(shock)
    p = model.p
    names = model.control_names

    z = p ** np.arange(horizon + 1, dtype=float) * size
    k = np.empty(horizon + 1)
    controls = np.empty((model.n_controls, horizon + 1))
    k_prev = 0.0
    for n in range(horizon + 1):
        controls[:, n] = solution.eta_yk * k_prev + solution.eta_yz * z[n]
        k_prev = solution.eta_kk * k_prev + solution.eta_kz * z[n]
        k[n] = k_prev
    return IrfPath(
        horizon=horizon,
        exogenous=z,
        state=k,
        controls={name: controls[i] for i, name in enumerate(names)},
    )
