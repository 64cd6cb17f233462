"""Orthogonal projections onto the low-rank tangent space and sparse support."""

from __future__ import annotations

import numpy as np

ORTHONORMAL_TOL = 1e-8


def _check_factor(U: np.ndarray) -> np.ndarray:
    U = np.asarray(U, dtype=float)
    if U.ndim == 1:
        U = U[:, None]
    gram = U.T @ U
    if np.abs(gram - np.eye(U.shape[1])).max(initial=0.0) > ORTHONORMAL_TOL:
        raise ValueError("U must have orthonormal columns")
    return U


def project_tangent(U: np.ndarray, X: np.ndarray) -> np.ndarray:
    """P_R(X) = UU^T X + X UU^T - UU^T X UU^T for the span factor U."""
    U = _check_factor(U)
    X = np.asarray(X, dtype=float)
    UtX = U.T @ X
    return U @ UtX + (X @ U) @ U.T - U @ (UtX @ U) @ U.T


def project_tangent_perp(U: np.ndarray, X: np.ndarray) -> np.ndarray:
    """P_R_perp(X) = (I - UU^T) X (I - UU^T); complement of project_tangent."""
    U = _check_factor(U)
    X = np.asarray(X, dtype=float)
    Y = X - U @ (U.T @ X)
    return Y - (Y @ U) @ U.T


def project_support(mask: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Zero out every entry outside the boolean support mask."""
    mask = np.asarray(mask, dtype=bool)
    X = np.asarray(X, dtype=float)
    if mask.shape != X.shape:
        raise ValueError(f"mask shape {mask.shape} does not match input shape {X.shape}")
    return np.where(mask, X, 0.0)


def project_support_perp(mask: np.ndarray, X: np.ndarray) -> np.ndarray:
    mask = np.asarray(mask, dtype=bool)
    X = np.asarray(X, dtype=float)
    if mask.shape != X.shape:
        raise ValueError(f"mask shape {mask.shape} does not match input shape {X.shape}")
    return np.where(mask, 0.0, X)
