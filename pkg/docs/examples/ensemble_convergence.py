"""Watch the chain's ensemble average converge to the exact path.

Every realization of the absorbing three-state chain is a step function,
yet the per-period average across realizations reproduces the smooth,
hump-shaped expected path exactly in the limit.  This script simulates
panels of 1, 2, 10 and 50,000 runs against the deterministic reference
and saves a four-panel figure.

Same data as the CLI command `mums figure1 --seed 42`.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import mums

experiment = mums.convergence_experiment(seed=42, horizon=40)
print(f"chain: p = {experiment.p}, q = {experiment.q}")
print(f"tracked values: impact {experiment.impact:.4f}, medium run {experiment.medium:.4f}")
print(f"reference path starts {experiment.reference[:3].round(4).tolist()}")

fig, axes = plt.subplots(2, 2, figsize=(10, 7), sharex=True, sharey=True)
horizon = np.arange(experiment.horizon + 1)
for ax, runs in zip(axes.ravel(), sorted(experiment.panels)):
    panel = experiment.panels[runs]
    ax.plot(horizon, experiment.reference, "o-", ms=3, label="exact path", zorder=3)
    ax.plot(horizon, panel.mean, drawstyle="steps-post", label=f"mean of {runs} run(s)")
    if runs > 1:
        ax.fill_between(
            horizon,
            panel.mean - 2 * panel.stderr,
            panel.mean + 2 * panel.stderr,
            alpha=0.25,
            linewidth=0,
        )
    ax.set_title(f"J = {runs}")
    ax.axhline(0.0, color="black", linewidth=0.6)
    ax.legend(fontsize=8)
for ax in axes[1]:
    ax.set_xlabel("periods since impulse")

fig.suptitle("Ensemble averages of an absorbing three-state chain")
fig.tight_layout()
fig.savefig("ensemble_convergence.png", dpi=150)
print("wrote ensemble_convergence.png")

largest = max(experiment.panels)
deviation = np.abs(experiment.panels[largest].mean - experiment.reference)
print(f"J = {largest}: max deviation from the exact path {deviation.max():.2e} "
      f"(max standard error {experiment.panels[largest].stderr.max():.2e})")
