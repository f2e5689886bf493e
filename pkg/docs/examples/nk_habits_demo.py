"""Solve the New Keynesian habit-formation model and draw its AS-AD graphs.

A -1% preference shock hits an economy with strong external habits
(h = 0.9).  The script solves the model, prints the headline analytics,
and plots the short-run and medium-run Euler/Phillips loci against the
no-habit benchmark, plus the output impulse response.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import mums

params = mums.NKParams()  # beta=0.99, kappa=0.05, phi_pi=1.5, eta=1, p=0.7, h=0.9
model, solution = mums.solve_habit_model(params)
stats = mums.derived_stats(params, solution)

print(f"persistence q                 = {solution.q:.6f} (lower bound 2h-1 = {stats.q_lower_bound})")
print(f"impact:    y_I = {solution.k_impact: .6f}, pi_I = {solution.controls_impact[1]: .6f}")
print(f"medium run: y_M = {solution.k_medium: .6f}, pi_M = {solution.controls_medium[1]: .6f}")
print(f"pdv scaling 1 + bq/(1-bq)     = {stats.pdv_scaling:.4f}")
print(f"medium-run locus shift ratio  = {stats.shift_ratio:.4f} "
      f"(1 + eta(1-h) = {stats.shift_ratio_reference})")
print(f"hump-shaped output response   = {stats.hump} (needs p + q > 1)")

# The same solution through the specialized seven-restriction system.
direct = mums.solve_restriction_system(params)
print(f"direct-system cross-check     |q - q'| = {abs(direct['q'] - solution.q):.2e}")

# --- AS-AD representation ----------------------------------------------------
loci = mums.asad_loci(params, solution)
by_key = {(line.panel, line.locus): line for line in loci}

fig, axes = plt.subplots(1, 2, figsize=(11, 4.5), sharey=True)
styles = {
    "euler_habits": dict(color="tab:blue", label="Euler (habits)"),
    "phillips_habits": dict(color="tab:red", label="Phillips (habits)"),
    "euler_no_habits": dict(color="tab:blue", ls="--", label="Euler (h=0)"),
    "phillips_no_habits": dict(color="tab:red", ls="--", label="Phillips (h=0)"),
}
for ax, panel in zip(axes, ("short_run", "medium_run")):
    for locus, style in styles.items():
        line = by_key[(panel, locus)]
        ax.plot(line.output, line.inflation, lw=1.4, **style)
    for variant, marker in (("habits", "ko"), ("no_habits", "rs")):
        point = by_key[(panel, f"equilibrium_{variant}")]
        ax.plot(point.output, point.inflation, marker, ms=7, mfc="none")
    ax.axhline(0, color="gray", lw=0.5)
    ax.axvline(0, color="gray", lw=0.5)
    ax.set_title(panel.replace("_", " "))
    ax.set_xlabel("output")
axes[0].set_ylabel("inflation")
axes[0].legend(fontsize=8)
fig.suptitle("Negative demand shock with and without habit formation")
fig.tight_layout()
fig.savefig("nk_habits_asad.png", dpi=150)
print("wrote nk_habits_asad.png")

# --- output impulse response --------------------------------------------------
horizon = 40
path = mums.irf(solution, horizon)
_, plain_solution = mums.solve_habit_model(
    mums.NKParams(h=0.0)
)
plain_path = mums.irf(plain_solution, horizon)

fig, ax = plt.subplots(figsize=(7, 4))
ax.plot(np.arange(horizon + 1), 100 * path.state, "o-", ms=3, label="habits (h=0.9)")
ax.plot(np.arange(horizon + 1), 100 * plain_path.state, "s--", ms=3, label="no habits")
ax.axhline(0, color="black", lw=0.6)
ax.set_xlabel("quarters since the shock")
ax.set_ylabel("output, % deviation")
ax.legend()
ax.set_title("Output response to the -1% preference shock")
fig.tight_layout()
fig.savefig("nk_habits_output_irf.png", dpi=150)
print("wrote nk_habits_output_irf.png")
