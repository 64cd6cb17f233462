"""Command-line front end.

Subcommands: generate, solve, sweep, random-batch, dimacs, certify.
Exit codes: 0 success, 1 argument errors, 2 runtime failures.

A JSON config file (``--config``) may carry any long-option value under its
option name with dashes as underscores; explicit command-line flags win.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .certificate import CertificateConfig
from .experiments import ExperimentSpec, emit, run_experiment
from .graphs import (
    generate_bernoulli_symmetric,
    generate_planted,
    graph_to_json,
    load_dimacs,
    load_graph_json,
)
from .metrics import build_recovery_report
from .solver import PLANTED_PRESET, SolverConfig, solve


class _ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgumentError(message)


def _add_common(p):
    p.add_argument("--config", help="JSON file with default option values")
    p.add_argument("--out", help="output path stem (tables and figures)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--format", dest="fmt", choices=["csv", "json"], default=None)
    p.add_argument("--timings", dest="timings", action="store_true", default=None,
                   help="emit wall-clock columns (breaks byte-identical re-runs)")
    plots = p.add_mutually_exclusive_group()
    plots.add_argument("--plots", dest="plots", action="store_true", default=None)
    plots.add_argument("--no-plots", dest="plots", action="store_false")


def _add_solver_flags(p):
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--lambda", dest="lambda_override", type=float, default=None)
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--max-iter", dest="max_iterations", type=int, default=None)
    p.add_argument("--epoch-length", type=int, default=None)
    p.add_argument("--model", choices=["weighted", "regular"], default=None)
    p.add_argument("--init", dest="init_mode", choices=["zeros", "random_feasible"], default=None)
    p.add_argument("--no-box", dest="enforce_box", action="store_false", default=None)


def build_parser() -> _Parser:
    parser = _Parser(prog="cliquedecomp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random instance as a graph JSON document")
    g.add_argument("--kind", choices=["planted", "bernoulli"], default="planted")
    g.add_argument("--n-vertices", type=int, required=True)
    g.add_argument("--clique-size", type=int, default=None)
    g.add_argument("--p", type=float, default=None)
    g.add_argument("--shuffle", action="store_true")
    _add_common(g)

    s = sub.add_parser("solve", help="decompose one graph and report the clique")
    s.add_argument("--input", help="graph file: .json document or DIMACS text")
    s.add_argument("--planted", nargs=3, type=float, metavar=("N", "n", "P"),
                   help="generate a planted instance instead of reading a file")
    s.add_argument("--random", nargs=2, type=float, metavar=("N", "P"),
                   help="generate a Bernoulli graph instead of reading a file")
    s.add_argument("--traces", action="store_true", help="include residual/objective traces in the report")
    _add_solver_flags(s)
    _add_common(s)

    w = sub.add_parser("sweep", help="planted-clique recovery sweep over (N, n) cells")
    w.add_argument("--N", dest="Ns", type=int, nargs="+", required=True)
    w.add_argument("--n", dest="ns", type=int, nargs="+", required=True)
    w.add_argument("--p", type=float, default=None)
    w.add_argument("--trials", type=int, default=None)
    w.add_argument("--models", nargs="+", choices=["weighted", "regular"], default=None)
    _add_solver_flags(w)
    _add_common(w)

    b = sub.add_parser("random-batch", help="maximum-clique runs on Bernoulli graphs")
    b.add_argument("--N", dest="Ns", type=int, nargs="+", required=True)
    b.add_argument("--p", type=float, default=None)
    b.add_argument("--trials", type=int, default=None)
    _add_solver_flags(b)
    _add_common(b)

    d = sub.add_parser("dimacs", help="solve DIMACS clique files")
    d.add_argument("files", nargs="+")
    _add_solver_flags(d)
    _add_common(d)

    c = sub.add_parser("certify", help="dual-certificate study on planted instances")
    c.add_argument("--N", dest="Ns", type=int, nargs="+", required=True)
    c.add_argument("--n", dest="ns", type=int, nargs="+", required=True)
    c.add_argument("--p", type=float, default=None)
    c.add_argument("--trials", type=int, default=None)
    c.add_argument("--alpha", type=float, default=None)
    c.add_argument("--cert-k", type=int, default=None)
    c.add_argument("--cert-q", type=float, default=None)
    c.add_argument("--neumann-terms", type=int, default=None)
    c.add_argument("--gamma", type=float, default=None)
    _add_common(c)
    return parser


def _apply_config_file(args: argparse.Namespace) -> argparse.Namespace:
    path = getattr(args, "config", None)
    if not path:
        return args
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise _ArgumentError(f"config file {path} must hold a JSON object")
    for key, value in doc.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise _ArgumentError(f"config file {path}: unknown option {key!r}")
        if getattr(args, attr) is None:
            setattr(args, attr, value)
    return args


def _solver_config(args, preset: dict | None = None) -> SolverConfig | None:
    fields = (
        "alpha", "lambda_override", "rho", "epsilon", "delta",
        "max_iterations", "epoch_length", "model", "init_mode", "enforce_box",
    )
    overrides = {f: getattr(args, f) for f in fields if getattr(args, f, None) is not None}
    if not overrides and preset is None:
        return None
    base = dict(preset or {})
    base.update(overrides)
    if getattr(args, "seed", None) is not None:
        base["seed"] = args.seed
    return SolverConfig(**base)


def _common_spec_kwargs(args) -> dict:
    out = {}
    for key in ("out", "seed", "workers", "fmt", "plots", "timings"):
        v = getattr(args, key, None)
        if v is not None:
            out[key] = v
    return out


def _cmd_generate(args) -> int:
    seed = args.seed if args.seed is not None else 0
    if args.p is None:
        args.p = 0.5
    if args.kind == "planted":
        if args.clique_size is None:
            raise _ArgumentError("--clique-size is required for planted instances")
        inst = generate_planted(args.n_vertices, args.clique_size, args.p, seed, shuffle=args.shuffle)
        doc = graph_to_json(inst.graph)
        doc["clique"] = sorted(inst.clique_vertices)
        doc["p"] = inst.edge_probability
        doc["seed"] = inst.seed
    else:
        graph = generate_bernoulli_symmetric(args.n_vertices, args.p, seed)
        doc = graph_to_json(graph)
        doc["p"] = args.p
        doc["seed"] = seed
    text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        print(text, end="")
    return 0


def _load_graph_any(path):
    with open(path, "rb") as fh:
        head = fh.read(64).lstrip()
    if head.startswith(b"{"):
        return load_graph_json(path)
    return load_dimacs(path)


def _cmd_solve(args) -> int:
    seed = args.seed if args.seed is not None else 0
    ground_truth = None
    if args.input:
        graph = _load_graph_any(args.input)
        config = _solver_config(args) or SolverConfig()
    elif args.planted:
        N, n, p = int(args.planted[0]), int(args.planted[1]), args.planted[2]
        inst = generate_planted(N, n, p, seed)
        graph = inst.graph
        ground_truth = inst.ground_truth()
        config = _solver_config(args, preset=PLANTED_PRESET)
    elif args.random:
        graph = generate_bernoulli_symmetric(int(args.random[0]), args.random[1], seed)
        config = _solver_config(args) or SolverConfig()
    else:
        raise _ArgumentError("one of --input, --planted, --random is required")

    result = solve(graph, config)
    report = build_recovery_report(result.L, result.S, graph, ground_truth)
    doc = report.to_json_dict()
    doc.update(
        status=result.status,
        iterations=result.iterations,
        wall_time_s=result.wall_time_s,
        lam=result.lam,
        rho=result.rho,
        kkt=result.kkt,
    )
    if args.traces:
        doc["residual_trace"] = [float(v) for v in result.residual_trace]
        doc["objective_trace"] = [float(v) for v in result.objective_trace]
        doc["dual_residual_trace"] = [float(v) for v in result.dual_residual_trace]
    text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    print(
        f"status={result.status} iterations={result.iterations} "
        f"clique_size={len(result.clique)} valid={result.clique_valid} "
        f"observed_size={report.observed_size:.4f}"
        + (f" err_l={report.err_l:.3e}" if report.err_l is not None else "")
    )
    return 0


def _cmd_sweep(args) -> int:
    spec = ExperimentSpec(
        kind="planted_sweep",
        Ns=tuple(args.Ns),
        ns=tuple(args.ns),
        p=args.p if args.p is not None else 0.5,
        trials=args.trials if args.trials is not None else 5,
        models=tuple(args.models) if args.models else ("weighted",),
        solver=_solver_config(args, preset=PLANTED_PRESET),
        **_common_spec_kwargs(args),
    )
    outcome = run_experiment(spec)
    files = emit(spec, outcome)
    for agg in outcome["aggregates"]:
        print(
            f"model={agg['model']} N={agg['N']} n={agg['n']}: "
            f"mean_err={agg['mean_err_l']:.3e} recovery={agg['recovery_probability']:.2f}"
        )
    for f in files:
        print(f"wrote {f}")
    return 0


def _cmd_random_batch(args) -> int:
    spec = ExperimentSpec(
        kind="random_batch",
        Ns=tuple(args.Ns),
        p=args.p if args.p is not None else 0.8,
        trials=args.trials if args.trials is not None else 16,
        solver=_solver_config(args),
        **_common_spec_kwargs(args),
    )
    outcome = run_experiment(spec)
    files = emit(spec, outcome)
    for row in outcome["rows"]:
        if row["error"]:
            print(f"N={row['N']} trial={row['trial']}: failed ({row['error']})")
        else:
            print(
                f"N={row['N']} trial={row['trial']}: observed_size={row['observed_size']:.2f} "
                f"error={row['clique_size_error']:.3g} valid={row['clique_valid']}"
            )
    for f in files:
        print(f"wrote {f}")
    return 0


def _cmd_dimacs(args) -> int:
    spec = ExperimentSpec(
        kind="dimacs",
        files=tuple(args.files),
        solver=_solver_config(args),
        rho=args.rho,
        **_common_spec_kwargs(args),
    )
    outcome = run_experiment(spec)
    files = emit(spec, outcome)
    failures = 0
    for row in outcome["rows"]:
        if row["error"]:
            failures += 1
            print(f"{row['graph']}: failed ({row['error']})")
        else:
            print(
                f"{row['graph']}: decomposition_size={row['decomposition_size']:.2f} "
                f"clique_size={row['clique_size']} valid={row['clique_valid']} "
                f"iterations={row['iterations']}"
            )
    for f in files:
        print(f"wrote {f}")
    return 2 if failures == len(outcome["rows"]) else 0


def _cmd_certify(args) -> int:
    cert_overrides = {}
    if args.cert_k is not None:
        cert_overrides["K"] = args.cert_k
    if args.cert_q is not None:
        cert_overrides["q"] = args.cert_q
    if args.neumann_terms is not None:
        cert_overrides["neumann_terms"] = args.neumann_terms
    if args.gamma is not None:
        cert_overrides["gamma"] = args.gamma
    spec = ExperimentSpec(
        kind="certify",
        Ns=tuple(args.Ns),
        ns=tuple(args.ns),
        p=args.p if args.p is not None else 0.5,
        trials=args.trials if args.trials is not None else 20,
        alpha=args.alpha if args.alpha is not None else 0.054,
        certificate=CertificateConfig(**cert_overrides) if cert_overrides else None,
        **_common_spec_kwargs(args),
    )
    outcome = run_experiment(spec)
    files = emit(spec, outcome)
    rows = [r for r in outcome["rows"] if not r["error"]]
    if rows:
        rate = float(np.mean([r["overall_pass"] for r in rows]))
        mono = float(np.mean([r["golfing_monotone"] for r in rows]))
        print(f"trials={len(rows)} overall_pass_rate={rate:.2f} golfing_monotone_rate={mono:.2f}")
    for f in files:
        print(f"wrote {f}")
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "solve": _cmd_solve,
    "sweep": _cmd_sweep,
    "random-batch": _cmd_random_batch,
    "dimacs": _cmd_dimacs,
    "certify": _cmd_certify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args = _apply_config_file(args)
        return _COMMANDS[args.command](args)
    except (_ArgumentError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # solver/runtime failures
        print(f"failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
