"""Error measures, clique extraction, and structural checks on recovered factors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import Graph, GroundTruthPair


class NumericalError(RuntimeError):
    pass


def relative_error(L, L_star) -> float:
    """||L - L*||_F / ||L*||_F."""
    L = np.asarray(L, dtype=float)
    L_star = np.asarray(L_star, dtype=float)
    if L.shape != L_star.shape:
        raise ValueError(f"shape mismatch: {L.shape} vs {L_star.shape}")
    denom = np.linalg.norm(L_star, "fro")
    if denom == 0:
        raise ValueError("ground truth must be nonzero")
    return float(np.linalg.norm(L - L_star, "fro") / denom)


def clique_size_error(L) -> float:
    """| sqrt(sum of entries) - spectral norm |, zero for an exact 0/1 clique block.

    Entry sums within the -1e-6-per-entry noise floor count as zero; anything
    more negative is a genuine numerical failure.
    """
    L = np.asarray(L, dtype=float)
    total = float(L.sum())
    if total < 0:
        if total < -1e-6 * L.size:
            raise NumericalError(f"entry sum {total:.3g} is negative")
        total = 0.0
    observed = np.sqrt(total)
    spectral = float(np.linalg.norm(L, 2)) if L.size else 0.0
    return float(abs(observed - spectral))


def observed_clique_size(L) -> float:
    """sqrt(sum of entries): the node-count size read off a 0/1 rank-one block."""
    total = float(np.asarray(L, dtype=float).sum())
    return float(np.sqrt(max(total, 0.0)))


def extract_clique(L, graph) -> tuple:
    """Vertices with diagonal entry >= 1/2, plus whether they induce a complete subgraph.

    Completeness is checked against the off-diagonal adjacency, so the
    artificial self-loops never count as edges.
    """
    L = np.asarray(L, dtype=float)
    adjacency = graph.adjacency if isinstance(graph, Graph) else np.asarray(graph, dtype=float)
    vertices = np.where(np.diag(L) >= 0.5)[0]
    valid = True
    if vertices.size > 1:
        block = adjacency[np.ix_(vertices, vertices)]
        off_diag = block[~np.eye(vertices.size, dtype=bool)]
        valid = bool((off_diag == 1.0).all())
    return frozenset(int(v) for v in vertices), valid


def incoherence_check(pair: GroundTruthPair, mu0: float) -> dict:
    """The two incoherence bounds for the rank-one clique indicator.

    Both reduce to 1/n <= mu0 * r / N with r = 1: the basis-alignment bound on
    max_i ||U^T e_i||^2 and the entrywise bound on ||U U^T||_inf.
    """
    N = pair.n_vertices
    r = 1
    if not (1.0 <= mu0 <= N / r):
        raise ValueError(f"mu0={mu0} must lie in [1, N/r] = [1, {N / r}]")
    sigma = np.linalg.svd(pair.l_star, compute_uv=False)
    if sigma.size == 0 or sigma[0] == 0 or (sigma.size > 1 and sigma[1] > 1e-8 * sigma[0]):
        raise ValueError("l_star must be rank one")
    n = pair.clique_size
    bound = mu0 * r / N
    return {
        "mu0_bound_ok": bool(1.0 / n <= bound),
        "joint_bound_ok": bool(1.0 / n <= bound),
    }


def variance_spread(S) -> float:
    """Largest gap between per-column population variances of S."""
    S = np.asarray(S, dtype=float)
    variances = S.var(axis=0)
    return float(variances.max() - variances.min()) if variances.size else 0.0


@dataclass
class RecoveryReport:
    clique: frozenset
    clique_valid: bool
    clique_size: int
    observed_size: float
    spectral_norm: float
    clique_size_error: float
    err_l: float | None = None
    incoherence: dict | None = None
    variance_spread: float | None = None

    def to_json_dict(self) -> dict:
        return {
            "clique": sorted(self.clique),
            "clique_valid": self.clique_valid,
            "clique_size": self.clique_size,
            "observed_size": self.observed_size,
            "spectral_norm": self.spectral_norm,
            "clique_size_error": self.clique_size_error,
            "err_l": self.err_l,
            "incoherence": self.incoherence,
            "variance_spread": self.variance_spread,
        }


def build_recovery_report(L, S, graph, ground_truth: GroundTruthPair | None = None) -> RecoveryReport:
    """Assemble the standard per-solve report; err_l stays absent without ground truth."""
    L = np.asarray(L, dtype=float)
    clique, valid = extract_clique(L, graph)
    err = None
    inc = None
    if ground_truth is not None:
        err = relative_error(L, ground_truth.l_star)
        N = ground_truth.n_vertices
        inc = incoherence_check(ground_truth, mu0=float(N))
    return RecoveryReport(
        clique=clique,
        clique_valid=valid,
        clique_size=len(clique),
        observed_size=observed_clique_size(L),
        spectral_norm=float(np.linalg.norm(L, 2)) if L.size else 0.0,
        clique_size_error=clique_size_error(L),
        err_l=err,
        incoherence=inc,
        variance_spread=float(variance_spread(S)) if S is not None else None,
    )
