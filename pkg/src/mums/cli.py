"""Command-line surface.

Subcommands: solve, irf, pdv, cumsum, simulate, validate,
example nk-habits, figure1.  Exit status is 0 on success, 1 when a
solver fails and 2 for input errors (including usage errors).  CSV and
solution outputs are deterministic byte for byte for identical inputs
and seeds; the run report additionally carries timing, which varies.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, analytics, ensemble, io, markov, nk_habits
from .errors import InputError, ModelValidationError, MumsError
from .model import ModelSpec
from .state_space import iterate_irf, solve_msv

__all__ = ["run_command", "console_main"]

DEFAULT_BETA = 0.99
DEFAULT_HORIZON = 40


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _solution_dict(solution: markov.MarkovSolution, model: ModelSpec) -> dict:
    residuals = markov.verify_restrictions(solution, model)
    return {
        "q": solution.q,
        "markov_valid": solution.markov_valid,
        "stationary": solution.stationary,
        "p": solution.p,
        "shock": solution.shock,
        "k_impact": solution.k_impact,
        "k_medium": solution.k_medium,
        "controls": {
            name: {
                "impact": float(solution.controls_impact[i]),
                "medium": float(solution.controls_medium[i]),
            }
            for i, name in enumerate(solution.control_names)
        },
        "restriction_residuals": residuals,
    }


def _report_dict(root, residuals: dict, elapsed: float) -> dict:
    return {
        "tool": "mums",
        "version": __version__,
        "timing_seconds": elapsed,
        "q": root.value,
        "markov_valid": root.markov_valid,
        "stationary": root.stationary,
        "root_residual": root.residual,
        "restriction_residuals": residuals,
        "root_trace": [[s, x] for s, x in root.trace],
    }


def _solve_pipeline(args) -> tuple[ModelSpec, markov.MarkovSolution, object, float]:
    document = io.load_document(args.model)
    model = document.spec
    shock = args.shock if args.shock is not None else (document.shock or 1.0)
    start = time.perf_counter()
    root = markov.solve_q(model)
    solution = markov.solve_states(model, root.value, shock)
    elapsed = time.perf_counter() - start
    return model, solution, root, elapsed


def _cmd_solve(args) -> int:
    model, solution, root, elapsed = _solve_pipeline(args)
    payload = {
        "solution": _solution_dict(solution, model),
        "report": _report_dict(
            root, markov.verify_restrictions(solution, model), elapsed
        ),
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.output)
    return 0


def _cmd_irf(args) -> int:
    document = io.load_document(args.model)
    model = document.spec
    shock = args.shock if args.shock is not None else (document.shock or 1.0)
    horizon = args.horizon if args.horizon is not None else (document.horizon or DEFAULT_HORIZON)
    solution = markov.solve_model(model, shock=shock)
    path = analytics.irf(solution, horizon)
    header = ["n", "exogenous", "state", *model.control_names]
    rows = [
        [n, path.exogenous[n], path.state[n], *(path.controls[c][n] for c in model.control_names)]
        for n in range(horizon + 1)
    ]
    _emit(io.csv_lines(header, rows), args.output)
    return 0


def _cmd_pdv(args) -> int:
    document = io.load_document(args.model)
    model = document.spec
    shock = args.shock if args.shock is not None else (document.shock or 1.0)
    beta = args.beta if args.beta is not None else (document.beta or DEFAULT_BETA)
    solution = markov.solve_model(model, shock=shock)
    values = {
        name: analytics.pdv_multiplier(solution, beta, name)
        for name in model.control_names
    }
    values["state"] = analytics.pdv_multiplier(solution, beta, "state")
    _emit(json.dumps({"beta": beta, "multipliers": values}, indent=2) + "\n", args.output)
    return 0


def _cmd_cumsum(args) -> int:
    document = io.load_document(args.model)
    model = document.spec
    shock = args.shock if args.shock is not None else (document.shock or 1.0)
    solution = markov.solve_model(model, shock=shock)
    values = {
        name: analytics.cumulative_sum(solution, name) for name in model.control_names
    }
    values["state"] = analytics.cumulative_sum(solution, "state")
    _emit(json.dumps({"cumulative_sums": values}, indent=2) + "\n", args.output)
    return 0


def _cmd_simulate(args) -> int:
    document = io.load_document(args.model)
    model = document.spec
    shock = args.shock if args.shock is not None else (document.shock or 1.0)
    horizon = args.horizon if args.horizon is not None else (document.horizon or DEFAULT_HORIZON)
    solution = markov.solve_model(model, shock=shock)
    variable = args.variable or model.control_names[0]
    config = ensemble.config_from_solution(
        solution, variable, runs=args.runs, horizon=horizon, seed=args.seed
    )
    result = ensemble.ensemble_average(config)
    rows = [[n, result.mean[n], result.stderr[n]] for n in range(horizon + 1)]
    _emit(io.csv_lines(["n", "mean", "stderr"], rows), args.output)
    return 0


def _cmd_validate(args) -> int:
    document = io.load_document(args.model)
    model = document.spec
    shock = args.shock if args.shock is not None else (document.shock or 1.0)
    horizon = args.horizon if args.horizon is not None else 200

    root = markov.solve_q(model)
    solution = markov.solve_states(model, root.value, shock)
    oracle = solve_msv(model)
    lines = [
        f"persistence agreement: q={root.value:.12g} "
        f"eta_kk={oracle.eta_kk:.12g} |diff|={abs(root.value - oracle.eta_kk):.3e}"
    ]
    discrepancies = [abs(root.value - oracle.eta_kk)]

    closed = analytics.irf(solution, horizon)
    iterated = iterate_irf(oracle, model, horizon, shock)
    pipe_diff = max(
        float(np.max(np.abs(closed.state - iterated.state))),
        float(np.max(np.abs(closed.exogenous - iterated.exogenous))),
        max(
            float(np.max(np.abs(closed.controls[c] - iterated.controls[c])))
            for c in model.control_names
        ),
    )
    lines.append(
        f"closed form vs state-space iteration ({horizon} periods): max abs {pipe_diff:.3e}"
    )
    discrepancies.append(pipe_diff)

    rec_diff = 0.0
    for name in model.control_names:
        rec = analytics.irf_recurrence(
            float(solution.controls_impact[model.control_names.index(name)]),
            float(solution.controls_medium[model.control_names.index(name)]),
            solution.p,
            solution.q,
            horizon,
        )
        rec_diff = max(rec_diff, float(np.max(np.abs(rec - closed.controls[name]))))
    rec_state = analytics.irf_recurrence(
        solution.k_impact, solution.k_medium, solution.p, solution.q, horizon
    )
    rec_diff = max(rec_diff, float(np.max(np.abs(rec_state - closed.state))))
    lines.append(
        f"closed form vs ensemble-average recurrence ({horizon} periods): "
        f"max abs {rec_diff:.3e}"
    )
    discrepancies.append(rec_diff)

    residuals = markov.verify_restrictions(solution, model)
    worst_restriction = max(residuals.values())
    lines.append(f"restriction residuals: max {worst_restriction:.3e}")
    discrepancies.append(worst_restriction)

    if args.mc_runs:
        if not solution.markov_valid:
            lines.append("monte carlo check skipped: q is not a probability")
        else:
            variable = model.control_names[0]
            config = ensemble.config_from_solution(
                solution, variable, runs=args.mc_runs, horizon=min(horizon, 40), seed=args.mc_seed
            )
            result = ensemble.ensemble_average(config)
            target = closed.controls[variable][: config.horizon + 1]
            band = 4.0 * result.stderr + 1e-12
            inside = np.all(np.abs(result.mean - target) <= band)
            worst = float(np.max(np.abs(result.mean - target)))
            lines.append(
                f"monte carlo band check ({args.mc_runs} runs): "
                f"{'inside' if inside else 'OUTSIDE'} 4 standard errors "
                f"(max abs deviation {worst:.3e})"
            )
            if not inside:
                lines.append("FAIL, ensemble mean leaves the 4-standard-error band")
                _emit("\n".join(lines) + "\n", args.output)
                return 1

    worst = max(discrepancies)
    verdict = "PASS" if worst <= args.tol else "FAIL"
    lines.append(f"{verdict}, max discrepancy {worst:.3e} (tolerance {args.tol:g})")
    _emit("\n".join(lines) + "\n", args.output)
    return 0 if verdict == "PASS" else 1


def _cmd_example_nk(args) -> int:
    params = nk_habits.NKParams(
        beta=args.beta,
        kappa=args.kappa,
        phi_pi=args.phi_pi,
        h=args.h,
        eta=args.eta,
        p=args.p,
        xi_impact=args.xi,
    )
    model, solution = nk_habits.solve_habit_model(params)
    stats = nk_habits.derived_stats(params, solution)
    horizon = args.horizon

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    solution_path = outdir / "nk_habits_solution.json"
    solution_path.write_text(
        json.dumps(_solution_dict(solution, model), indent=2) + "\n", encoding="utf-8"
    )

    stats_dict = dataclasses.asdict(stats)
    stats_dict["pdv_output_coefficient"] = stats.pdv_scaling - 1.0
    stats_path = outdir / "nk_habits_stats.json"
    stats_path.write_text(json.dumps(stats_dict, indent=2) + "\n", encoding="utf-8")

    path = analytics.irf(solution, horizon)
    header = ["n", "exogenous", "state", *model.control_names]
    rows = [
        [n, path.exogenous[n], path.state[n], *(path.controls[c][n] for c in model.control_names)]
        for n in range(horizon + 1)
    ]
    irf_path = outdir / "nk_habits_irf.csv"
    irf_path.write_text(io.csv_lines(header, rows), encoding="utf-8")

    loci = nk_habits.asad_loci(params, solution, points=args.grid_points)
    loci_rows = []
    for line in loci:
        for y, pi in zip(line.output, line.inflation):
            loci_rows.append([line.panel, line.locus, y, pi])
    loci_path = outdir / "nk_habits_loci.csv"
    loci_path.write_text(io.csv_lines(["panel", "locus", "y", "pi"], loci_rows), encoding="utf-8")

    sys.stdout.write(
        "\n".join(
            [
                f"q = {stats.q:.6f} (lower bound 2h-1 = {stats.q_lower_bound:.3f})",
                f"pdv scaling = {stats.pdv_scaling:.4f} "
                f"(medium-run coefficient {stats.pdv_scaling - 1.0:.4f})",
                f"shift ratio = {stats.shift_ratio:.4f} "
                f"(reference 1+eta(1-h) = {stats.shift_ratio_reference:.4f})",
                f"hump-shaped output response: {stats.hump} (p+q = {params.p + stats.q:.4f})",
                f"wrote {solution_path}",
                f"wrote {stats_path}",
                f"wrote {irf_path}",
                f"wrote {loci_path}",
            ]
        )
        + "\n"
    )
    return 0


def _cmd_figure1(args) -> int:
    experiment = ensemble.convergence_experiment(seed=args.seed, horizon=args.horizon)
    rows = []
    for j, result in sorted(experiment.panels.items()):
        for n in range(args.horizon + 1):
            rows.append([f"J{j}", n, result.mean[n], result.stderr[n]])
    for n in range(args.horizon + 1):
        rows.append(["reference", n, experiment.reference[n], 0.0])
    _emit(io.csv_lines(["panel", "n", "mean", "stderr"], rows), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mums",
        description=(
            "Solve linear rational-expectations models with one endogenous and "
            "one exogenous state in closed form via an absorbing three-state "
            "Markov-chain representation."
        ),
    )
    parser.add_argument("--version", action="version", version=f"mums {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_model_command(name, help_text):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("model", help="path to a model JSON document")
        cmd.add_argument("--shock", type=float, default=None, help="impulse size (default: document value or 1.0)")
        cmd.add_argument("--output", default=None, help="write to this file instead of stdout")
        return cmd

    add_model_command("solve", "solve a model and print the solution with a run report").set_defaults(
        handler=_cmd_solve
    )

    irf_cmd = add_model_command("irf", "emit the closed-form impulse responses as CSV")
    irf_cmd.add_argument("--horizon", type=int, default=None, help="number of periods after impact")
    irf_cmd.set_defaults(handler=_cmd_irf)

    pdv_cmd = add_model_command("pdv", "present-discounted-value multipliers of all variables")
    pdv_cmd.add_argument("--beta", type=float, default=None, help="discount factor in (0, 1)")
    pdv_cmd.set_defaults(handler=_cmd_pdv)

    cumsum_cmd = add_model_command("cumsum", "lifetime cumulative sums of all variables")
    cumsum_cmd.set_defaults(handler=_cmd_cumsum)

    sim_cmd = add_model_command("simulate", "Monte Carlo ensemble average of the solved chain")
    sim_cmd.add_argument("--runs", type=int, default=50_000, help="number of chain realizations")
    sim_cmd.add_argument("--seed", type=int, default=0, help="base seed for the per-run streams")
    sim_cmd.add_argument("--horizon", type=int, default=None)
    sim_cmd.add_argument("--variable", default=None, help="tracked variable (default: first control)")
    sim_cmd.set_defaults(handler=_cmd_simulate)

    val_cmd = add_model_command("validate", "cross-check the solution pipelines against each other")
    val_cmd.add_argument("--tol", type=float, default=1e-8, help="acceptance tolerance")
    val_cmd.add_argument("--horizon", type=int, default=None)
    val_cmd.add_argument("--mc-runs", type=int, default=0, help="also run a Monte Carlo band check with this many runs")
    val_cmd.add_argument("--mc-seed", type=int, default=0)
    val_cmd.set_defaults(handler=_cmd_validate)

    example = sub.add_parser("example", help="built-in worked examples")
    example_sub = example.add_subparsers(dest="example_name", required=True)
    nk = example_sub.add_parser("nk-habits", help="New Keynesian model with habit formation")
    defaults = nk_habits.NKParams()
    nk.add_argument("--beta", type=float, default=defaults.beta)
    nk.add_argument("--kappa", type=float, default=defaults.kappa)
    nk.add_argument("--phi-pi", dest="phi_pi", type=float, default=defaults.phi_pi)
    nk.add_argument("--h", type=float, default=defaults.h)
    nk.add_argument("--eta", type=float, default=defaults.eta)
    nk.add_argument("--p", type=float, default=defaults.p)
    nk.add_argument("--xi", type=float, default=defaults.xi_impact, help="impact preference shock")
    nk.add_argument("--horizon", type=int, default=DEFAULT_HORIZON)
    nk.add_argument("--grid-points", type=int, default=201)
    nk.add_argument("--outdir", default=".", help="directory for the emitted files")
    nk.set_defaults(handler=_cmd_example_nk)

    fig = sub.add_parser(
        "figure1",
        help="ensemble-convergence experiment: panels of 1, 2, 10 and 50000 runs "
        "against the exact reference path, as long-format CSV",
    )
    fig.add_argument("--seed", type=int, default=0)
    fig.add_argument("--horizon", type=int, default=DEFAULT_HORIZON)
    fig.add_argument("--output", default=None)
    fig.set_defaults(handler=_cmd_figure1)
    return parser


def run_command(argv=None) -> int:
    """Run one CLI invocation; returns the exit status instead of exiting."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except (InputError, ModelValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MumsError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 1


def console_main() -> None:
    sys.exit(run_command())
