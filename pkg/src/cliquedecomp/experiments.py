"""Batch experiment drivers: planted sweeps, random-graph batches, DIMACS runs,
and certificate studies, with deterministic CSV/JSON emission.

Trial seeds derive as ``spec.seed + trial_index``; rows are computed in any
order (worker pool) and sorted on a stable key before writing, so output bytes
do not depend on the worker count.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import metrics
from .certificate import CertificateConfig, certify
from .graphs import generate_bernoulli_symmetric, generate_planted, load_dimacs
from .solver import PLANTED_PRESET, SolverConfig, solve, update_weights

RECOVERY_THRESHOLD = 1e-8

SWEEP_HEADER = [
    "model", "N", "n", "p", "trial", "seed", "err_l", "clique_size_error",
    "recovered", "clique_size", "clique_valid", "iterations", "status",
    "wall_time_s", "error",
]
SWEEP_AGG_HEADER = [
    "model", "N", "n", "p", "trials", "mean_err_l", "recovery_probability",
    "mean_iterations", "mean_wall_time_s",
]
BATCH_HEADER = [
    "N", "p", "trial", "seed", "observed_size", "spectral_norm",
    "clique_size_error", "clique_size", "clique_valid", "iterations", "status",
    "wall_time_s", "error",
]
DIMACS_HEADER = [
    "graph", "n_vertices", "n_edges", "rho", "decomposition_size",
    "clique_size", "clique_valid", "clique_size_error", "iterations", "status",
    "wall_time_s", "error",
]
CERTIFY_HEADER = [
    "N", "n", "p", "trial", "seed", "overall_pass", "golfing_monotone",
    "w_norm", "omega_residual_fro", "omega_perp_inf", "wl_norm",
    "wl_omega_perp_inf", "ws_norm", "ws_omega_perp_inf", "pq_norm",
    "wl_tangent_residual", "ws_tangent_residual", "sign_norm_ratio", "error",
]


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str  # planted_sweep | random_batch | dimacs | certify | single
    Ns: tuple = ()
    ns: tuple = ()
    p: float = 0.5
    trials: int = 1
    models: tuple = ("weighted",)
    solver: SolverConfig | None = None
    certificate: CertificateConfig | None = None
    alpha: float = 0.054
    files: tuple = ()
    rho: float | None = None
    out: str | None = None
    seed: int = 0
    workers: int = 1
    fmt: str = "csv"
    plots: bool = True
    # wall-clock values are the one nondeterministic field; they are blanked
    # on emission unless explicitly requested, so re-runs are byte-identical
    timings: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials={self.trials} must be >= 1")
        if self.workers < 1:
            raise ValueError(f"workers={self.workers} must be >= 1")
        if self.fmt not in ("csv", "json"):
            raise ValueError(f"unknown format {self.fmt!r}")


def _pool_map(fn, tasks, workers: int):
    if workers <= 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def _planted_solver_config(spec: ExperimentSpec) -> SolverConfig:
    if spec.solver is not None:
        return spec.solver
    return SolverConfig(**PLANTED_PRESET)


def run_planted_sweep(spec: ExperimentSpec) -> dict:
    """Solve every (model, N, n, trial) cell; aggregate mean error and recovery rate."""
    if not spec.Ns or not spec.ns:
        raise ValueError("planted sweep needs non-empty N and n grids")
    base = _planted_solver_config(spec)

    tasks = [
        (model, N, n, trial)
        for model in spec.models
        for N in spec.Ns
        for n in spec.ns
        for trial in range(spec.trials)
    ]

    def one(task):
        model, N, n, trial = task
        seed = spec.seed + trial
        row = {
            "model": model, "N": N, "n": n, "p": spec.p, "trial": trial,
            "seed": seed, "err_l": None, "clique_size_error": None,
            "recovered": False, "clique_size": None, "clique_valid": None,
            "iterations": None, "status": "error", "wall_time_s": None,
            "error": "",
        }
        try:
            inst = generate_planted(N, n, spec.p, seed)
            result = solve(inst.graph, replace(base, model=model, seed=seed))
            truth = inst.ground_truth()
            err = metrics.relative_error(result.L, truth.l_star)
            row.update(
                err_l=err,
                clique_size_error=metrics.clique_size_error(result.L),
                recovered=bool(err < RECOVERY_THRESHOLD),
                clique_size=len(result.clique),
                clique_valid=result.clique_valid,
                iterations=result.iterations,
                status=result.status,
                wall_time_s=result.wall_time_s,
            )
        except Exception as exc:  # failures land in the row, the sweep continues
            row["error"] = f"{type(exc).__name__}: {exc}"
        return row

    rows = _pool_map(one, tasks, spec.workers)
    rows.sort(key=lambda r: (r["model"], r["N"], r["n"], r["trial"]))

    aggregates = []
    for model in spec.models:
        for N in spec.Ns:
            for n in spec.ns:
                cell = [
                    r for r in rows
                    if r["model"] == model and r["N"] == N and r["n"] == n and not r["error"]
                ]
                if not cell:
                    continue
                aggregates.append({
                    "model": model, "N": N, "n": n, "p": spec.p, "trials": len(cell),
                    "mean_err_l": float(np.mean([r["err_l"] for r in cell])),
                    "recovery_probability": float(np.mean([r["recovered"] for r in cell])),
                    "mean_iterations": float(np.mean([r["iterations"] for r in cell])),
                    "mean_wall_time_s": float(np.mean([r["wall_time_s"] for r in cell])),
                })
    return {"rows": rows, "aggregates": aggregates}


def run_random_batch(spec: ExperimentSpec) -> dict:
    """Bernoulli graphs with no planted clique: decomposition size and node-count error."""
    if not spec.Ns:
        raise ValueError("random batch needs a non-empty N grid")
    base = spec.solver or SolverConfig()

    tasks = [(N, trial) for N in spec.Ns for trial in range(spec.trials)]

    def one(task):
        N, trial = task
        seed = spec.seed + trial
        row = {
            "N": N, "p": spec.p, "trial": trial, "seed": seed,
            "observed_size": None, "spectral_norm": None,
            "clique_size_error": None, "clique_size": None,
            "clique_valid": None, "iterations": None, "status": "error",
            "wall_time_s": None, "error": "",
        }
        try:
            graph = generate_bernoulli_symmetric(N, spec.p, seed)
            result = solve(graph, replace(base, seed=seed))
            row.update(
                observed_size=metrics.observed_clique_size(result.L),
                spectral_norm=float(np.linalg.norm(result.L, 2)),
                clique_size_error=metrics.clique_size_error(result.L),
                clique_size=len(result.clique),
                clique_valid=result.clique_valid,
                iterations=result.iterations,
                status=result.status,
                wall_time_s=result.wall_time_s,
            )
        except Exception as exc:
            row["error"] = f"{type(exc).__name__}: {exc}"
        return row

    rows = _pool_map(one, tasks, spec.workers)
    rows.sort(key=lambda r: (r["N"], r["trial"]))
    return {"rows": rows}


def run_dimacs(spec: ExperimentSpec) -> dict:
    """Solve each DIMACS file; completeness is verified against the original graph."""
    if not spec.files:
        raise ValueError("dimacs run needs at least one input file")
    base = spec.solver or SolverConfig()
    if spec.rho is not None:
        base = replace(base, rho=spec.rho)

    def one(path):
        name = os.path.splitext(os.path.basename(path))[0]
        row = {
            "graph": name, "n_vertices": None, "n_edges": None,
            "rho": None, "decomposition_size": None, "clique_size": None,
            "clique_valid": None, "clique_size_error": None,
            "iterations": None, "status": "error", "wall_time_s": None,
            "error": "",
        }
        try:
            graph = load_dimacs(path)
            row.update(n_vertices=graph.n_vertices, n_edges=graph.n_edges)
            result = solve(graph, base)
            row.update(
                rho=result.rho,
                decomposition_size=metrics.observed_clique_size(result.L),
                clique_size=len(result.clique),
                clique_valid=result.clique_valid,
                clique_size_error=metrics.clique_size_error(result.L),
                iterations=result.iterations,
                status=result.status,
                wall_time_s=result.wall_time_s,
            )
        except Exception as exc:
            row["error"] = f"{type(exc).__name__}: {exc}"
        return row

    rows = _pool_map(one, list(spec.files), spec.workers)
    rows.sort(key=lambda r: r["graph"])
    return {"rows": rows}


def run_certify(spec: ExperimentSpec) -> dict:
    """Per-(N, n, trial) certificate reports with every measured bound."""
    if not spec.Ns or not spec.ns:
        raise ValueError("certificate study needs non-empty N and n grids")
    cert = spec.certificate or CertificateConfig()

    tasks = [(N, n, trial) for N in spec.Ns for n in spec.ns for trial in range(spec.trials)]

    def one(task):
        N, n, trial = task
        seed = spec.seed + trial
        row = {col: None for col in CERTIFY_HEADER}
        row.update(N=N, n=n, p=spec.p, trial=trial, seed=seed, error="")
        try:
            inst = generate_planted(N, n, spec.p, seed)
            truth = inst.ground_truth()
            epsilon = spec.solver.epsilon if spec.solver is not None else 0.05
            C = update_weights(truth.s_star, epsilon)
            report = certify(truth, C, spec.alpha, replace(cert, seed=seed))
            row.update(
                overall_pass=report.overall_pass,
                golfing_monotone=report.golfing_monotone,
                wl_tangent_residual=report.wl_tangent_residual,
                ws_tangent_residual=report.ws_tangent_residual,
                sign_norm_ratio=report.sign_norm_ratio,
            )
            for key in (
                "w_norm", "omega_residual_fro", "omega_perp_inf", "wl_norm",
                "wl_omega_perp_inf", "ws_norm", "ws_omega_perp_inf", "pq_norm",
            ):
                row[key] = report.checks[key].value
        except Exception as exc:
            row["error"] = f"{type(exc).__name__}: {exc}"
        return row

    rows = _pool_map(one, tasks, spec.workers)
    rows.sort(key=lambda r: (r["N"], r["n"], r["trial"]))
    return {"rows": rows}


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_format_cell(row.get(col)) for col in header))
    return "\n".join(lines) + "\n"


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(rows_to_csv(header, rows))


def write_json(path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


HEADERS = {
    "planted_sweep": SWEEP_HEADER,
    "random_batch": BATCH_HEADER,
    "dimacs": DIMACS_HEADER,
    "certify": CERTIFY_HEADER,
}

RUNNERS = {
    "planted_sweep": run_planted_sweep,
    "random_batch": run_random_batch,
    "dimacs": run_dimacs,
    "certify": run_certify,
}


def run_experiment(spec: ExperimentSpec) -> dict:
    if spec.kind not in RUNNERS:
        raise ValueError(f"unknown experiment kind {spec.kind!r}")
    return RUNNERS[spec.kind](spec)


def strip_timings(outcome: dict) -> dict:
    out = {"rows": [dict(r, wall_time_s=None) for r in outcome["rows"]]}
    if "aggregates" in outcome:
        out["aggregates"] = [dict(a, mean_wall_time_s=None) for a in outcome["aggregates"]]
    return out


def emit(spec: ExperimentSpec, outcome: dict) -> list:
    """Write result tables (and figures, if enabled) next to ``spec.out``.

    Returns the list of files written.
    """
    if spec.out is None:
        return []
    written = []
    stem, ext = os.path.splitext(spec.out)
    if ext in (".csv", ".json"):
        out_base = stem
    else:
        out_base = spec.out
    emission = outcome if spec.timings else strip_timings(outcome)
    header = HEADERS[spec.kind]
    if spec.fmt == "csv":
        path = out_base + ".csv"
        write_csv(path, header, emission["rows"])
        written.append(path)
        if "aggregates" in emission:
            agg_path = out_base + "_aggregate.csv"
            write_csv(agg_path, SWEEP_AGG_HEADER, emission["aggregates"])
            written.append(agg_path)
    else:
        path = out_base + ".json"
        write_json(path, emission)
        written.append(path)
    if spec.plots:
        from . import plotting

        written.extend(plotting.render_figures(spec.kind, outcome, out_base))
    return written
