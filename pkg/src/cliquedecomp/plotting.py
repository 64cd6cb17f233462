"""Figure rendering for experiment outputs. matplotlib is imported lazily and
only here, so the solver library carries no plotting dependency."""

from __future__ import annotations

import numpy as np


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_figures(kind: str, outcome: dict, out_base: str) -> list:
    renderer = {
        "planted_sweep": _sweep_figures,
        "random_batch": _batch_figures,
        "dimacs": _dimacs_figures,
        "certify": _certify_figures,
    }.get(kind)
    if renderer is None:
        return []
    return renderer(outcome, out_base)


def _sweep_figures(outcome: dict, out_base: str) -> list:
    plt = _plt()
    aggs = outcome.get("aggregates", [])
    if not aggs:
        return []
    written = []
    groups = sorted({(a["model"], a["N"]) for a in aggs})

    fig, ax = plt.subplots(figsize=(6, 4))
    for model, N in groups:
        pts = sorted((a["n"], max(a["mean_err_l"], 1e-300)) for a in aggs if a["model"] == model and a["N"] == N)
        ax.semilogy([x for x, _ in pts], [y for _, y in pts], marker="o", label=f"{model}, N={N}")
    ax.set_xlabel("planted clique size n")
    ax.set_ylabel("mean relative error")
    ax.legend()
    ax.grid(True, alpha=0.4)
    fig.tight_layout()
    path = out_base + "_error.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(6, 4))
    for model, N in groups:
        pts = sorted((a["n"], a["recovery_probability"]) for a in aggs if a["model"] == model and a["N"] == N)
        ax.plot([x for x, _ in pts], [y for _, y in pts], marker="s", label=f"{model}, N={N}")
    ax.set_xlabel("planted clique size n")
    ax.set_ylabel("recovery probability")
    ax.set_ylim(-0.05, 1.05)
    ax.legend()
    ax.grid(True, alpha=0.4)
    fig.tight_layout()
    path = out_base + "_recovery.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)
    return written


def _batch_figures(outcome: dict, out_base: str) -> list:
    plt = _plt()
    rows = [r for r in outcome["rows"] if not r["error"]]
    if not rows:
        return []
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    trials = [r["trial"] for r in rows]
    ax1.plot(trials, [r["observed_size"] for r in rows], "o", label="observed size")
    ax1.plot(trials, [r["spectral_norm"] for r in rows], "x", label="spectral norm")
    ax1.set_xlabel("trial")
    ax1.set_ylabel("size")
    ax1.legend()
    ax1.grid(True, alpha=0.4)
    ax2.bar(trials, [r["clique_size_error"] for r in rows])
    ax2.set_xlabel("trial")
    ax2.set_ylabel("node-count error")
    ax2.grid(True, alpha=0.4)
    fig.tight_layout()
    path = out_base + "_sizes.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return [path]


def _dimacs_figures(outcome: dict, out_base: str) -> list:
    plt = _plt()
    rows = [r for r in outcome["rows"] if not r["error"]]
    if not rows:
        return []
    fig, ax = plt.subplots(figsize=(max(6, 0.8 * len(rows)), 4))
    names = [r["graph"] for r in rows]
    x = np.arange(len(rows))
    ax.bar(x - 0.2, [r["decomposition_size"] or 0 for r in rows], width=0.4, label="decomposition size")
    ax.bar(x + 0.2, [r["clique_size"] or 0 for r in rows], width=0.4, label="verified clique size")
    ax.set_xticks(x, names, rotation=45, ha="right")
    ax.legend()
    ax.grid(True, axis="y", alpha=0.4)
    fig.tight_layout()
    path = out_base + "_cliques.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return [path]


def _certify_figures(outcome: dict, out_base: str) -> list:
    plt = _plt()
    rows = [r for r in outcome["rows"] if not r["error"]]
    if not rows:
        return []
    names = ["w_norm", "omega_residual_fro", "omega_perp_inf", "wl_norm",
             "ws_norm", "pq_norm"]
    fig, ax = plt.subplots(figsize=(7, 4))
    for name in names:
        ax.plot([r["trial"] for r in rows], [r[name] for r in rows], marker=".", label=name)
    ax.set_yscale("symlog", linthresh=1e-12)
    ax.set_xlabel("trial")
    ax.set_ylabel("measured bound value")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.4)
    fig.tight_layout()
    path = out_base + "_bounds.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return [path]
