"""Structural model objects and their reduced forward-looking form.

A model instance couples N forward-looking controls Y_t with one
autoregressive endogenous state k_t and one AR(1) exogenous state z_t:

    A0 Y_t = A1 E_t[Y_{t+1}] + B0 k_t + B1 E_t[k_{t+1}] + C0 z_t
    k_t    = rho k_{t-1} + D0 Y_t + e z_t
    z_t    = p z_{t-1} + eps_t

Substituting E_t[k_{t+1}] = rho k_t + D0 E_t[Y_{t+1}] + e p z_t removes
the expected state from the first block and leaves the reduced forward
equation

    A0 Y_t = A E_t[Y_{t+1}] + B k_t + C z_t

with A = A1 + B1 D0, B = B0 + rho B1 and C = C0 + e p B1.  Every solver
in this package consumes the reduced form.

The economy starts at its steady state (all variables zero) and is hit
by a single innovation at the impact date; paths are indexed by the
number of periods since impact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ModelValidationError

__all__ = [
    "ModelSpec",
    "ReducedModel",
    "ShockImpulse",
    "validate_model",
    "reduce_model",
]


def _frozen_array(value, dtype=float) -> np.ndarray:
    arr = np.array(value, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """Structural matrices and scalars of a model with N controls.

    ``A0``/``A1`` are N-by-N, ``B0``/``B1``/``C0``/``D0`` are length-N
    vectors (``D0`` enters the state equation as a row), and ``rho``,
    ``e``, ``p`` are scalars.  Instances are immutable after
    construction; arrays are stored read-only so they can be shared
    across threads freely.

    Construction never checks the model invariants; use
    :func:`validate_model` for a full report.
    """

    n_controls: int
    control_names: tuple[str, ...]
    A0: np.ndarray
    A1: np.ndarray
    B0: np.ndarray
    B1: np.ndarray
    C0: np.ndarray
    D0: np.ndarray
    rho: float
    e: float
    p: float

    def __post_init__(self):
        object.__setattr__(self, "n_controls", int(self.n_controls))
        object.__setattr__(
            self, "control_names", tuple(str(name) for name in self.control_names)
        )
        for name in ("A0", "A1", "B0", "B1", "C0", "D0"):
            object.__setattr__(self, name, _frozen_array(getattr(self, name)))
        for name in ("rho", "e", "p"):
            object.__setattr__(self, name, float(getattr(self, name)))


@dataclass(frozen=True, eq=False)
class ReducedModel:
    """Reduced forward-looking form A0 Y = A E[Y'] + B k + C z.

    ``A0`` is carried along from the source model because the reduced
    forward equation still has it on the left-hand side.  All entries
    are recomputable bit-for-bit from the source :class:`ModelSpec` via
    :func:`reduce_model`.
    """

    A0: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D0: np.ndarray
    rho: float
    e: float
    p: float

    def __post_init__(self):
        for name in ("A0", "A", "B", "C", "D0"):
            object.__setattr__(self, name, _frozen_array(getattr(self, name)))
        for name in ("rho", "e", "p"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def n_controls(self) -> int:
        return self.A0.shape[0]


@dataclass(frozen=True)
class ShockImpulse:
    """A single innovation to the exogenous state, z evolving as
    z_t = p z_{t-1} + eps_t.  The innovation scale must be finite and
    nonzero."""

    size: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "size", float(self.size))
        if not math.isfinite(self.size) or self.size == 0.0:
            raise ModelValidationError(
                [f"shock size must be finite and nonzero, got {self.size!r}"]
            )


def shock_size(shock: ShockImpulse | float) -> float:
    """Normalize a shock argument (impulse object or bare float) to its size.

    A bare float may be zero (the solvers then return the zero solution
    of the homogeneous system); a :class:`ShockImpulse` proper is
    nonzero by construction.
    """
    if isinstance(shock, ShockImpulse):
        return shock.size
    value = float(shock)
    if not math.isfinite(value):
        raise ModelValidationError([f"shock size must be finite, got {value!r}"])
    return value


def validate_model(model: ModelSpec) -> list[str]:
    """Check all model invariants and report violations.

    Returns an empty list when the model is well formed.  Each entry
    names the offending field and the rule it breaks; this function
    reports and never raises.
    """
    violations: list[str] = []
    n = model.n_controls
    if n < 1:
        violations.append(f"n_controls: must be a positive integer, got {n}")
        return violations

    if len(model.control_names) != n:
        violations.append(
            f"control_names: expected {n} names, got {len(model.control_names)}"
        )
    if any(not name for name in model.control_names):
        violations.append("control_names: names must be non-empty")
    if len(set(model.control_names)) != len(model.control_names):
        violations.append("control_names: names must be unique")

    for name, shape in (
        ("A0", (n, n)),
        ("A1", (n, n)),
        ("B0", (n,)),
        ("B1", (n,)),
        ("C0", (n,)),
        ("D0", (n,)),
    ):
        arr = getattr(model, name)
        if arr.shape != shape:
            violations.append(f"{name}: expected shape {shape}, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            violations.append(f"{name}: entries must be finite")

    for name in ("rho", "e", "p"):
        if not math.isfinite(getattr(model, name)):
            violations.append(f"{name}: must be finite")
    if math.isfinite(model.p) and not (0.0 <= model.p < 1.0):
        violations.append(f"p: must satisfy 0 <= p < 1, got {model.p}")
    # rho is deliberately unrestricted here; stability is judged from the
    # solved persistence root, not from rho itself.
    return violations


def reduce_model(model: ModelSpec) -> ReducedModel:
    """Eliminate the expected endogenous state from the forward block.

    Computes A = A1 + B1 D0, B = B0 + rho B1 and C = C0 + e p B1 and
    copies D0, rho, e, p through.  Raises
    :class:`~mums.errors.ModelValidationError` when the model fails
    :func:`validate_model`.
    """
    violations = validate_model(model)
    if violations:
        raise ModelValidationError(violations)
    A = model.A1 + np.outer(model.B1, model.D0)
    B = model.B0 + model.rho * model.B1
    C = model.C0 + model.e * model.p * model.B1
    return ReducedModel(
        A0=model.A0,
        A=A,
        B=B,
        C=C,
        D0=model.D0,
        rho=model.rho,
        e=model.e,
        p=model.p,
    )
