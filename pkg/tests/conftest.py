"""Shared fixtures.

The session-scoped ``battery`` fixture solves a large randomized family
of single-control models through both pipelines once and records the
cross-pipeline disagreements; several test modules and the acceptance
suite all draw on it.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass

import numpy as np
import pytest

import mums

BATTERY_SEED = 230871
BATTERY_SIZE = 1000
BATTERY_HORIZON = 200


def make_univariate(a, b, c, d, rho, p, a0=1.0):
    """Single-control model y = (a/a0) E[y'] + ... in structural form."""
    return mums.ModelSpec(
        n_controls=1,
        control_names=("y",),
        A0=[[a0]],
        A1=[[a]],
        B0=[b],
        B1=[0.0],
        C0=[c],
        D0=[d],
        rho=rho,
        e=0.0,
        p=p,
    )


@pytest.fixture
def generic_model():
    """The workhorse single-control instance used across the suite."""
    return make_univariate(a=0.5, b=0.2, c=1.0, d=0.3, rho=0.8, p=0.7)


@pytest.fixture
def static_model():
    """No feedback at all: b = d = rho = 0, so q = 0 and y_I = c/(1 - a p)."""
    return make_univariate(a=0.5, b=0.0, c=1.0, d=0.0, rho=0.0, p=0.7)


@dataclass
class BatterySample:
    model: mums.ModelSpec
    root: mums.RootResult
    oracle: mums.StateSpaceSolution
    solution: mums.MarkovSolution
    irf_gap: float
    irf_scale: float


@dataclass
class Battery:
    samples: list[BatterySample]
    elapsed_seconds: float
    rejected_draws: int


def draw_battery_models(seed=BATTERY_SEED, count=BATTERY_SIZE):
    """Randomized single-control models with a real-root characteristic
    quadratic; complex-pair draws are rejected and counted."""
    rng = np.random.default_rng(seed)
    models = []
    rejected = 0
    while len(models) < count:
        a = rng.uniform(-0.9, 0.9)
        if a == 0.0:
            continue
        b = rng.uniform(-0.5, 0.5)
        d = rng.uniform(-0.5, 0.5)
        rho = rng.uniform(0.0, 0.95)
        p = rng.uniform(0.0, 0.95)
        k = 1.0 + a * rho - b * d
        if k * k - 4.0 * a * rho <= 0.0:
            rejected += 1
            continue
        models.append(make_univariate(a=a, b=b, c=1.0, d=d, rho=rho, p=p))
    return models, rejected


@pytest.fixture(scope="session")
def battery() -> Battery:
    models, rejected = draw_battery_models()
    samples = []
    start = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", mums.AlgebraicSolutionWarning)
        for model in models:
            root = mums.solve_q(model)
            oracle = mums.solve_msv(model)
            solution = mums.solve_states(model, root.value, 1.0)
            closed = mums.irf(solution, BATTERY_HORIZON)
            iterated = mums.iterate_irf(oracle, model, BATTERY_HORIZON, 1.0)
            gap = max(
                float(np.max(np.abs(closed.state - iterated.state))),
                float(np.max(np.abs(closed.controls["y"] - iterated.controls["y"]))),
                float(np.max(np.abs(closed.exogenous - iterated.exogenous))),
            )
            scale = max(
                float(np.max(np.abs(iterated.state))),
                float(np.max(np.abs(iterated.controls["y"]))),
                1.0,
            )
            samples.append(
                BatterySample(
                    model=model,
                    root=root,
                    oracle=oracle,
                    solution=solution,
                    irf_gap=gap,
                    irf_scale=scale,
                )
            )
    elapsed = time.perf_counter() - start
    return Battery(samples=samples, elapsed_seconds=elapsed, rejected_draws=rejected)
