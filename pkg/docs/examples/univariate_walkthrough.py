"""Walk through the full solution of a small forward-looking model.

The model has one control y, one endogenous state k and one AR(1)
exogenous state z:

    y_t = 0.5 E_t[y_{t+1}] + 0.2 k_t + z_t
    k_t = 0.8 k_{t-1} + 0.3 y_t
    z_t = 0.7 z_{t-1} + eps_t

We solve it twice (Markov states and classical state space), confirm the
two impulse responses coincide, and read off the closed-form summary
statistics.
"""

import numpy as np

import mums

model = mums.ModelSpec(
    n_controls=1,
    control_names=("y",),
    A0=[[1.0]],
    A1=[[0.5]],
    B0=[0.2],
    B1=[0.0],
    C0=[1.0],
    D0=[0.3],
    rho=0.8,
    e=0.0,
    p=0.7,
)
assert mums.validate_model(model) == []

# --- Markov-state solution -------------------------------------------------
# q is the probability of remaining in the medium-run state; the impact
# and medium-run values of every variable complete the solution.
root = mums.solve_q(model)
solution = mums.solve_states(model, root.value, shock=1.0)
print(f"transition probability q        = {root.value:.6f}")
print(f"impact state       (y_I, k_I)   = {solution.controls_impact[0]:.6f}, {solution.k_impact:.6f}")
print(f"medium-run state   (y_M, k_M)   = {solution.controls_medium[0]:.6f}, {solution.k_medium:.6f}")

# --- classical state-space solution (the oracle) ---------------------------
oracle = mums.solve_msv(model)
print(f"state-space persistence eta_kk  = {oracle.eta_kk:.6f}   (equals q)")

closed = mums.irf(solution, 200)
iterated = mums.iterate_irf(oracle, model, 200, shock=1.0)
gap = np.max(np.abs(closed.controls["y"] - iterated.controls["y"]))
print(f"max |closed form - iteration|   = {gap:.2e} over 200 periods")

# --- expected path after a unit impulse -------------------------------------
print("\n n   exogenous     state     control")
for n in range(8):
    print(
        f"{n:2d}   {closed.exogenous[n]:9.6f}  {closed.state[n]:8.6f}  {closed.controls['y'][n]:9.6f}"
    )

# The state inherits persistence from both p and q, so its expected path
# keeps rising after impact whenever p + q > 1.
report = mums.hump_diagnosis(solution, "state")
print(f"\nstate hump-shaped: {report.has_hump} (p + q = {solution.p + solution.q:.3f}, "
      f"peak at n = {report.peak_index})")

# --- closed-form summary statistics -----------------------------------------
beta = 0.99
print(f"pdv multiplier of y (beta={beta})  = {mums.pdv_multiplier(solution, beta, 'y'):.6f}")
print(f"lifetime sum of y                = {mums.cumulative_sum(solution, 'y'):.6f}")
impact_time, medium_time = mums.expected_durations(solution.p, solution.q)
print(f"expected periods in each regime  = {impact_time:.3f} (impact), {medium_time:.3f} (medium run)")

# Conditional expectations are one-liners under the chain structure.
impact_expectation, medium_expectation = mums.conditional_expectations(solution)
print(f"E[y' | impact regime]            = {impact_expectation.controls['y']:.6f}")
print(f"E[y' | medium-run regime]        = {medium_expectation.controls['y']:.6f}")
