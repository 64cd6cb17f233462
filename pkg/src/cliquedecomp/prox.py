"""Thresholding operators, norms, and symmetric spectral machinery.

The singular value threshold for symmetric input goes through the symmetric
eigendecomposition: sigma_i = |lambda_i|, with the sign reapplied after
thresholding. sgn(0) = 0 throughout, which keeps every shrinkage continuous
at zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SYMMETRY_TOL = 1e-10


def _require_symmetric(X: np.ndarray, what: str) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError(f"{what} must be a square matrix, got shape {X.shape}")
    if np.abs(X - X.T).max(initial=0.0) > SYMMETRY_TOL:
        raise ValueError(f"{what} must be symmetric to {SYMMETRY_TOL:g}")
    return X


@dataclass(frozen=True)
class SpectralDecomposition:
    """Singular value decomposition of a symmetric matrix, u = v up to column signs."""

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    @property
    def rank(self) -> int:
        return int(self.sigma.size)

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.sigma) @ self.v.T


def spectral_decomposition(X: np.ndarray, rank_tol: float = 1e-12) -> SpectralDecomposition:
    """SVD of symmetric X via eigendecomposition, truncated at relative ``rank_tol``."""
    X = _require_symmetric(X, "input")
    w, V = np.linalg.eigh(X)
    order = np.argsort(-np.abs(w))
    w = w[order]
    V = V[:, order]
    sigma = np.abs(w)
    cutoff = rank_tol * max(sigma[0] if sigma.size else 0.0, 1.0)
    keep = sigma > cutoff
    return SpectralDecomposition(u=V[:, keep], sigma=sigma[keep], v=V[:, keep] * np.sign(w[keep]))


def svt(X: np.ndarray, tau: float) -> np.ndarray:
    """Singular value thresholding: shrink every singular value by tau.

    Unique minimizer of tau*||Y||_* + 0.5*||Y - X||_F^2 over symmetric Y.
    """
    out, _ = svt_with_values(X, tau)
    return out


def svt_with_values(X: np.ndarray, tau: float):
    """svt plus the surviving singular values (handy for free nuclear norms)."""
    if tau <= 0:
        raise ValueError(f"threshold tau={tau} must be positive")
    X = _require_symmetric(X, "svt input")
    w, V = np.linalg.eigh(X)
    shrunk = np.maximum(np.abs(w) - tau, 0.0)
    out = (V * (np.sign(w) * shrunk)) @ V.T
    out = (out + out.T) / 2.0
    return out, shrunk[shrunk > 0]


def soft_threshold(X: np.ndarray, tau: float) -> np.ndarray:
    """Entrywise sgn(x) * max(|x| - tau, 0)."""
    if tau <= 0:
        raise ValueError(f"threshold tau={tau} must be positive")
    X = np.asarray(X, dtype=float)
    return np.sign(X) * np.maximum(np.abs(X) - tau, 0.0)


def _check_weights(C: np.ndarray, X: np.ndarray) -> tuple:
    C = np.asarray(C, dtype=float)
    X = np.asarray(X, dtype=float)
    if C.shape != X.shape:
        raise ValueError(f"weight shape {C.shape} does not match input shape {X.shape}")
    if not (C > 0).all():
        raise ValueError("weights must be strictly positive")
    return C, X


def weighted_soft_threshold(C: np.ndarray, X: np.ndarray, tau: float) -> np.ndarray:
    """Entrywise sgn(x) * max(|x| - tau*c, 0); reduces to soft_threshold for C = ones.

    Minimizer of tau*||C o Y||_1 + 0.5*||Y - X||_F^2 (separable per entry).
    """
    if tau <= 0:
        raise ValueError(f"threshold tau={tau} must be positive")
    C, X = _check_weights(C, X)
    return np.sign(X) * np.maximum(np.abs(X) - tau * C, 0.0)


def box_weighted_soft_threshold(C: np.ndarray, X: np.ndarray, tau: float) -> np.ndarray:
    """Weighted shrinkage followed by projection onto [0, 1].

    Minimizer of tau*||C o Y||_1 + 0.5*||Y - X||_F^2 subject to 0 <= Y <= 1,
    i.e. the sparse-side prox with the model's box constraint active.
    """
    if tau <= 0:
        raise ValueError(f"threshold tau={tau} must be positive")
    C, X = _check_weights(C, X)
    return np.clip(X - tau * C, 0.0, 1.0)


def frobenius_norm(X) -> float:
    return float(np.linalg.norm(X, "fro"))


def spectral_norm(X) -> float:
    return float(np.linalg.norm(X, 2))


def nuclear_norm(X) -> float:
    return float(np.linalg.svd(np.asarray(X, dtype=float), compute_uv=False).sum())


def matrix_norms(X, weights=None) -> dict:
    """Frobenius, nuclear, spectral, entrywise l1/linf, and optional weighted l1."""
    X = np.asarray(X, dtype=float)
    if not np.isfinite(X).all():
        raise ValueError("matrix norms require finite entries")
    s = np.linalg.svd(X, compute_uv=False)
    out = {
        "frobenius": float(np.linalg.norm(X, "fro")),
        "nuclear": float(s.sum()),
        "spectral": float(s[0]) if s.size else 0.0,
        "l1_entrywise": float(np.abs(X).sum()),
        "linf_entrywise": float(np.abs(X).max(initial=0.0)),
    }
    if weights is not None:
        C, X = _check_weights(weights, X)
        out["weighted_l1"] = float(np.abs(C * X).sum())
    return out
