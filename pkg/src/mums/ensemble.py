"""Seeded Monte Carlo simulation of the absorbing three-state chain.

Each run starts in the impact state and moves through the banded
transition matrix

    [[p, 1-p, 0],
     [0, q,   1-q],
     [0, 0,   1]]

so state indices only ever increase and the third state absorbs.  The
per-period mean over many runs (the ensemble average) converges to the
model's closed-form expected path, which is what the convergence
experiment demonstrates.

Reproducibility contract: every run j draws from its own counter-based
stream keyed by (seed, j), and the reduction across runs accumulates
integer occupancy counts.  Both are order-insensitive, so results are
bit-identical for any degree of parallelism.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InputError, ModelValidationError

__all__ = [
    "ChainConfig",
    "EnsembleResult",
    "ConvergenceExperiment",
    "substream",
    "simulate_run",
    "ensemble_average",
    "expected_durations",
    "config_from_solution",
    "convergence_experiment",
]

_UINT64_MAX = 2**64 - 1


@dataclass(frozen=True)
class ChainConfig:
    """One simulation request: chain parameters, tracked values, size, seed.

    ``states`` holds the value of the tracked variable in the impact,
    medium-run and absorbing state; the absorbing value must be zero
    (the chain ends at the steady state).
    """

    p: float
    q: float
    states: tuple[float, float, float]
    runs: int
    horizon: int
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "q", float(self.q))
        object.__setattr__(self, "states", tuple(float(v) for v in self.states))
        object.__setattr__(self, "runs", int(self.runs))
        object.__setattr__(self, "horizon", int(self.horizon))
        object.__setattr__(self, "seed", int(self.seed))
        problems = []
        if not 0.0 <= self.p < 1.0:
            problems.append(f"p must lie in [0, 1), got {self.p}")
        if not 0.0 <= self.q < 1.0:
            problems.append(f"q must lie in [0, 1), got {self.q}")
        if len(self.states) != 3:
            problems.append(f"states must be a triplet, got {len(self.states)} values")
        elif self.states[2] != 0.0:
            problems.append(f"absorbing state value must be 0, got {self.states[2]}")
        if self.states and not all(math.isfinite(v) for v in self.states):
            problems.append("state values must be finite")
        if self.runs < 1:
            problems.append(f"runs must be >= 1, got {self.runs}")
        if self.horizon < 0:
            problems.append(f"horizon must be >= 0, got {self.horizon}")
        if not 0 <= self.seed <= _UINT64_MAX:
            problems.append(f"seed must fit in an unsigned 64-bit integer, got {self.seed}")
        if problems:
            raise ModelValidationError(problems)

    @property
    def transition_matrix(self) -> np.ndarray:
        return np.array(
            [
                [self.p, 1.0 - self.p, 0.0],
                [0.0, self.q, 1.0 - self.q],
                [0.0, 0.0, 1.0],
            ]
        )


@dataclass(frozen=True, eq=False)
class EnsembleResult:
    """Per-period mean and standard error over the simulated runs.

    ``stderr`` is the sample standard deviation divided by sqrt(runs);
    for a single run it is defined as zero.
    """

    mean: np.ndarray
    stderr: np.ndarray
    runs: int


@dataclass(frozen=True, eq=False)
class ConvergenceExperiment:
    """Simulated panels of increasing run counts plus the exact reference path."""

    panels: dict[int, EnsembleResult]
    reference: np.ndarray
    impact: float
    medium: float
    p: float
    q: float
    horizon: int
    seed: int


def substream(seed: int, run_index: int) -> np.random.Generator:
    """Independent counter-based stream for one run, keyed by (seed, run)."""
    key = np.array([seed, run_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _transition_times(u: np.ndarray, p: float, q: float, horizon: int) -> tuple[int, int]:
    """First periods at which the run enters the medium-run and absorbing states.

    u holds the ``horizon`` uniforms of the run; u[n-1] decides the move
    into period n.  A time of horizon + 1 means "never within the path".
    """
    left_impact = u >= p
    if left_impact.any():
        t1 = int(np.argmax(left_impact)) + 1
    else:
        return horizon + 1, horizon + 1
    if t1 > horizon:
        return horizon + 1, horizon + 1
    left_medium = u[t1:] >= q
    if left_medium.any():
        t2 = t1 + int(np.argmax(left_medium)) + 1
    else:
        t2 = horizon + 1
    return t1, min(t2, horizon + 1)


def simulate_run(config: ChainConfig, rng: np.random.Generator) -> np.ndarray:
    """Simulate one chain realization; returns state indices of length horizon+1.

    The path starts in state 0, indices increase weakly, and state 2
    absorbs.  Exactly ``horizon`` uniforms are consumed from ``rng``
    regardless of when absorption happens.
    """
    u = rng.random(config.horizon)
    t1, t2 = _transition_times(u, config.p, config.q, config.horizon)
    path = np.zeros(config.horizon + 1, dtype=np.int8)
    path[t1:] = 1
    path[t2:] = 2
    return path


def _occupancy_counts(
    p: float, q: float, horizon: int, seed: int, start: int, stop: int
) -> np.ndarray:
    """Integer counts of (impact, medium) occupancy for runs start..stop-1."""
    counts = np.zeros((horizon + 1, 2), dtype=np.int64)
    for j in range(start, stop):
        u = substream(seed, j).random(horizon)
        t1, t2 = _transition_times(u, p, q, horizon)
        counts[: min(t1, horizon + 1), 0] += 1
        if t1 <= horizon:
            counts[t1:t2, 1] += 1
    return counts


def _resolve_threads(threads: int | None) -> int:
    if threads is None:
        raw = os.environ.get("MUMS_THREADS", "0").strip() or "0"
        try:
            threads = int(raw)
        except ValueError:
            raise InputError(
                f"MUMS_THREADS must be a non-negative integer, got {raw!r}"
            ) from None
    if threads < 0:
        raise InputError(f"thread count must be >= 0, got {threads}")
    if threads == 0:
        threads = os.cpu_count() or 1
    return threads


def ensemble_average(config: ChainConfig, threads: int | None = None) -> EnsembleResult:
    """Mean and standard-error paths of the tracked variable over all runs.

    Args:
        config: chain parameters, tracked state values, run count,
            horizon and seed.
        threads: simulation parallelism; ``None`` reads the
            ``MUMS_THREADS`` environment variable and 0 means one thread
            per CPU.

    The result is a pure function of ``config``: runs draw from
    per-run keyed streams and are reduced through integer occupancy
    counts, so the thread schedule cannot change a single bit of the
    output.
    """
    threads = _resolve_threads(threads)
    horizon, runs = config.horizon, config.runs

    if threads == 1 or runs < 2048:
        counts = _occupancy_counts(config.p, config.q, horizon, config.seed, 0, runs)
    else:
        chunk = max(512, -(-runs // (threads * 4)))
        ranges = [(start, min(start + chunk, runs)) for start in range(0, runs, chunk)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            pieces = pool.map(
                lambda r: _occupancy_counts(
                    config.p, config.q, horizon, config.seed, r[0], r[1]
                ),
                ranges,
            )
            counts = sum(pieces, np.zeros((horizon + 1, 2), dtype=np.int64))

    value_impact, value_medium, _ = config.states
    mean = (counts[:, 0] * value_impact + counts[:, 1] * value_medium) / runs
    if runs == 1:
        stderr = np.zeros(horizon + 1)
    else:
        second_moment = (
            counts[:, 0] * value_impact**2 + counts[:, 1] * value_medium**2
        ) / runs
        sample_var = np.maximum(second_moment - mean**2, 0.0) * runs / (runs - 1)
        stderr = np.sqrt(sample_var / runs)
    return EnsembleResult(mean=mean, stderr=stderr, runs=runs)


def expected_durations(p: float, q: float) -> tuple[float, float]:
    """Expected number of periods spent in the impact and medium-run states."""
    if not (0.0 <= p < 1.0 and 0.0 <= q < 1.0):
        raise ValueError(f"durations need 0 <= p, q < 1, got p={p}, q={q}")
    return 1.0 / (1.0 - p), 1.0 / (1.0 - q)


def config_from_solution(
    solution, variable, runs: int, horizon: int, seed: int
) -> ChainConfig:
    """Chain configuration tracking one variable of a solved model.

    Rejects solutions whose q lies outside [0, 1): a negative or
    explosive q is not a transition probability and the chain cannot be
    simulated.
    """
    if not solution.markov_valid:
        raise ModelValidationError(
            [
                f"q={solution.q:.6g} is not a probability; the chain cannot "
                "be simulated for this solution"
            ]
        )
    from .analytics import _variable_states

    impact, medium = _variable_states(solution, variable)
    return ChainConfig(
        p=solution.p,
        q=solution.q,
        states=(impact, medium, 0.0),
        runs=runs,
        horizon=horizon,
        seed=seed,
    )


def convergence_experiment(
    seed: int,
    runs: tuple[int, ...] = (1, 2, 10, 50_000),
    horizon: int = 40,
    eta_kk: float = 0.8,
    eta_kz: float = 0.5,
    eta_yk: float = 0.5,
    eta_yz: float = 0.1,
    p: float = 0.7,
    threads: int | None = None,
) -> ConvergenceExperiment:
    """Ensemble panels of increasing size against the exact ARMA(2,1) path.

    The reference variable follows
    x(n) = (p + eta_kk) x(n-1) - p eta_kk x(n-2) after the first two
    periods, with x(0) = eta_yz and a first-period moving-average
    contribution eta_yk * eta_kz - eta_yz * eta_kk from the unit
    impulse.  The matching chain tracks the same variable with impact
    value x(0), medium-run value (x(1) - p x(0)) / (1 - p) and
    persistence q = eta_kk.  As the number of runs grows, the simulated
    mean converges to the reference path.
    """
    if horizon < 1:
        raise ValueError(f"the experiment needs horizon >= 1, got {horizon}")
    reference = np.empty(horizon + 1)
    reference[0] = eta_yz
    reference[1] = (p + eta_kk) * reference[0] + (eta_yk * eta_kz - eta_yz * eta_kk)
    for n in range(2, horizon + 1):
        reference[n] = (p + eta_kk) * reference[n - 1] - p * eta_kk * reference[n - 2]

    impact = reference[0]
    medium = (reference[1] - p * reference[0]) / (1.0 - p)
    panels = {
        j: ensemble_average(
            ChainConfig(
                p=p,
                q=eta_kk,
                states=(impact, medium, 0.0),
                runs=j,
                horizon=horizon,
                seed=seed,
            ),
            threads=threads,
        )
        for j in runs
    }
    return ConvergenceExperiment(
        panels=panels,
        reference=reference,
        impact=float(impact),
        medium=float(medium),
        p=p,
        q=eta_kk,
        horizon=horizon,
        seed=seed,
    )
