"""Closed-form path analytics for a solved Markov-state model.

Once the impact values, medium-run values and the transition
probability q are known, every conditional path and several summary
statistics follow in closed form.  With p the exogenous persistence,

    control at horizon n:  p^n y_I + (1 - p) w(n) y_M
    state at horizon n:    w(n + 1) k_I
    exogenous at horizon n: p^n * shock

where w(n) = (q^n - p^n) / (q - p), extended by continuity to
w(n) = n p^(n-1) at q = p.  Internally w is evaluated through its
cross-geometric representation w(n) = sum_{j<n} p^j q^(n-1-j), which is
exact at q = p and free of the cancellation the ratio form suffers when
q and p are close; see :func:`cross_geometric_weights`.

The same paths satisfy a second-order recurrence (the ensemble-average
law of the underlying chain), implemented independently in
:func:`irf_recurrence`, and are reproducible from the occupancy
probabilities of the chain's transient states, iterated in
:func:`occupancy`.  Keeping these routes separate is the point: they
cross-validate one another.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .errors import AlgebraicSolutionWarning, DomainError

__all__ = [
    "IrfPath",
    "OccupancyPath",
    "HumpReport",
    "cross_geometric_weights",
    "irf",
    "irf_recurrence",
    "pdv_multiplier",
    "cumulative_sum",
    "occupancy",
    "transient_power",
    "hump_diagnosis",
]


@dataclass(frozen=True, eq=False)
class IrfPath:
    """Expected paths after a single impulse, indexed n = 0..horizon.

    ``controls`` maps each control name to its path; ``state`` and
    ``exogenous`` hold the endogenous and exogenous state paths.  Entry
    0 is the impact period.
    """

    horizon: int
    exogenous: np.ndarray
    state: np.ndarray
    controls: dict[str, np.ndarray]

    def series(self, variable) -> np.ndarray:
        """Path of one variable: a control name/index, "state" or "exogenous"."""
        if isinstance(variable, str):
            if variable == "state":
                return self.state
            if variable == "exogenous":
                return self.exogenous
            try:
                return self.controls[variable]
            except KeyError:
                raise ValueError(
                    f"unknown variable {variable!r}; expected one of "
                    f"{sorted(self.controls)} or 'state'/'exogenous'"
                ) from None
        return list(self.controls.values())[int(variable)]


@dataclass(frozen=True, eq=False)
class OccupancyPath:
    """Unconditional probabilities of the two transient chain states."""

    p_impact: np.ndarray
    p_medium: np.ndarray


@dataclass(frozen=True)
class HumpReport:
    """Shape diagnosis of one impulse response.

    ``expectation_ratio`` is the one-step-ahead expected value divided
    by the impact value; a magnitude above one means the path keeps
    rising after impact.
    """

    has_hump: bool
    peak_index: int
    expectation_ratio: float


def _variable_states(solution, variable) -> tuple[float, float]:
    """(impact, medium-run) pair for a control, by name or index, or "state"."""
    if isinstance(variable, str):
        if variable == "state":
            return float(solution.k_impact), float(solution.k_medium)
        try:
            index = solution.control_names.index(variable)
        except ValueError:
            raise ValueError(
                f"unknown variable {variable!r}; expected one of "
                f"{list(solution.control_names)} or 'state'"
            ) from None
    else:
        index = int(variable)
    return float(solution.controls_impact[index]), float(solution.controls_medium[index])


def _warn_if_algebraic(solution) -> None:
    if not solution.markov_valid:
        warnings.warn(
            f"transition probability q={solution.q:.6g} lies outside [0, 1); "
            "closed-form results keep their algebraic meaning only",
            AlgebraicSolutionWarning,
            stacklevel=3,
        )


def cross_geometric_weights(p: float, q: float, length: int) -> np.ndarray:
    """First ``length`` values of w(n) = sum_{j<n} p^j q^(n-1-j).

    Equals (q^n - p^n)/(q - p) for q != p and n p^(n-1) at q = p, with
    no branch between the two: the sum representation is evaluated via
    the recursion w(n+1) = p w(n) + q^n, which involves no cancellation
    and is accurate uniformly in |q - p|.
    """
    if length <= 0:
        return np.zeros(0)
    w = np.empty(length)
    w[0] = 0.0
    if length > 1:
        powers = q ** np.arange(length - 1, dtype=float)
        w[1:] = lfilter([1.0], [1.0, -p], powers)
    return w


def irf(solution, horizon: int) -> IrfPath:
    """Closed-form expected paths of all variables out to ``horizon``.

    Entry n = 0 is the impact state itself and n = 1 equals
    p * impact + (1 - p) * medium for every variable.  Emits
    :class:`~mums.errors.AlgebraicSolutionWarning` when the solution's q
    is not a probability.
    """
    if horizon < 0:
        raise ValueError(f"horizon must be >= 0, got {horizon}")
    _warn_if_algebraic(solution)
    p, q = solution.p, solution.q
    pn = p ** np.arange(horizon + 1, dtype=float)
    w = cross_geometric_weights(p, q, horizon + 2)
    weights = (1.0 - p) * w[: horizon + 1]
    controls = {
        name: pn * float(y_i) + weights * float(y_m)
        for name, y_i, y_m in zip(
            solution.control_names, solution.controls_impact, solution.controls_medium
        )
    }
    return IrfPath(
        horizon=horizon,
        exogenous=pn * solution.shock,
        state=w[1 : horizon + 2] * solution.k_impact,
        controls=controls,
    )


def irf_recurrence(
    y_impact: float, y_medium: float, p: float, q: float, horizon: int
) -> np.ndarray:
    """Expected path built from the second-order ensemble-average law.

    n = 0 gives the impact value, n = 1 gives p*impact + (1-p)*medium,
    and every later entry follows x(n) = (p+q) x(n-1) - p q x(n-2).
    Implemented as a plain recursion on purpose: it is the independent
    counterpart of :func:`irf`.
    """
    if horizon < 0:
        raise ValueError(f"horizon must be >= 0, got {horizon}")
    path = np.empty(horizon + 1)
    path[0] = y_impact
    if horizon >= 1:
        path[1] = p * y_impact + (1.0 - p) * y_medium
    a1 = p + q
    a2 = p * q
    for n in range(2, horizon + 1):
        path[n] = a1 * path[n - 1] - a2 * path[n - 2]
    return path


def pdv_multiplier(solution, beta: float, variable) -> float:
    """Present-discounted-value multiplier of one variable.

    Returns impact + beta * (1 - p) / (1 - beta q) * medium, the
    lifetime discounted response per unit of lifetime discounted shock.
    Requires |beta * q| < 1 for the underlying sum to converge.
    """
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    _warn_if_algebraic(solution)
    if abs(beta * solution.q) >= 1.0:
        raise DomainError(
            f"discounted sum diverges: |beta*q| = {abs(beta * solution.q):.6g} >= 1"
        )
    y_i, y_m = _variable_states(solution, variable)
    return y_i + beta * (1.0 - solution.p) / (1.0 - beta * solution.q) * y_m


def cumulative_sum(solution, variable) -> float:
    """Undiscounted lifetime sum of one variable's expected path.

    Controls sum to impact/(1-p) + medium/(1-q); the endogenous state's
    sum is the same expression and also equals k_medium / (q (1 - q))
    when q is nonzero.  Requires |q| < 1.
    """
    _warn_if_algebraic(solution)
    if abs(solution.q) >= 1.0:
        raise DomainError(f"cumulative sum diverges: |q| = {abs(solution.q):.6g} >= 1")
    y_i, y_m = _variable_states(solution, variable)
    return y_i / (1.0 - solution.p) + y_m / (1.0 - solution.q)


def occupancy(p: float, q: float, horizon: int) -> OccupancyPath:
    """Unconditional transient-state probabilities out to ``horizon``.

    Starts from the degenerate distribution (1, 0) and iterates the
    transpose of the transient block [[p, 1-p], [0, q]] one period at a
    time.  Requires 0 <= p, q < 1 so the chain interpretation holds.
    """
    if not (0.0 <= p < 1.0 and 0.0 <= q < 1.0):
        raise ValueError(f"occupancy needs 0 <= p, q < 1, got p={p}, q={q}")
    if horizon < 0:
        raise ValueError(f"horizon must be >= 0, got {horizon}")
    p_impact = np.empty(horizon + 1)
    p_medium = np.empty(horizon + 1)
    p_impact[0] = 1.0
    p_medium[0] = 0.0
    for n in range(1, horizon + 1):
        p_impact[n] = p * p_impact[n - 1]
        p_medium[n] = (1.0 - p) * p_impact[n - 1] + q * p_medium[n - 1]
    return OccupancyPath(p_impact=p_impact, p_medium=p_medium)


def transient_power(p: float, q: float, n: int) -> np.ndarray:
    """n-th power of the transient block [[p, 1-p], [0, q]] in closed form.

    The off-diagonal entry is (1-p)(q^n - p^n)/(q - p) with the q = p
    limit built in; n = 0 returns the identity.
    """
    if n < 0:
        raise ValueError(f"matrix power needs n >= 0, got {n}")
    w = cross_geometric_weights(p, q, n + 1)[n] if n > 0 else 0.0
    return np.array([[p**n, (1.0 - p) * w], [0.0, q**n]])


def hump_diagnosis(solution, variable, horizon: int = 1000) -> HumpReport:
    """Diagnose whether one variable's response peaks after impact.

    A hump is declared when |path(1)| > |path(0)|; for the endogenous
    state this is exactly the condition p + q > 1.  ``peak_index`` is
    the argmax of |path(n)| over n <= horizon.  A zero impact value
    leaves the ratio undefined and raises
    :class:`~mums.errors.DomainError`.
    """
    y_i, _ = _variable_states(solution, variable)
    if y_i == 0.0:
        raise DomainError(
            f"impact value of {variable!r} is zero; the post-impact ratio is undefined"
        )
    path = irf(solution, horizon).series(variable)
    ratio = float(path[1] / path[0]) if horizon >= 1 else 1.0
    return HumpReport(
        has_hump=bool(abs(path[1]) > abs(path[0])) if horizon >= 1 else False,
        peak_index=int(np.argmax(np.abs(path))),
        expectation_ratio=ratio,
    )
