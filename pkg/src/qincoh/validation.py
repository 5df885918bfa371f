"""Input validation helpers used across the package.

Every check is tolerance-based and the tolerance is always an explicit
argument; nothing here compares floats for exact equality.
"""
from __future__ import annotations

import numpy as np


def max_abs(a: np.ndarray) -> float:
    """Entrywise max-norm ``max |a_ij|`` (0.0 for empty input)."""
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def as_square_matrix(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be a square 2-d array, got shape {m.shape}")
    if m.shape[0] < 1:
        raise ValueError(f"{name} must have at least one row")
    return m


def require_hermitian(m: np.ndarray, tol: float = 1e-10, name: str = "matrix") -> np.ndarray:
    m = as_square_matrix(m, name)
    dev = max_abs(m - m.conj().T)
    if dev > tol:
        raise ValueError(f"{name} is not Hermitian within {tol:g} (deviation {dev:.3e})")
    return m


def require_unitary(u: np.ndarray, tol: float = 1e-10, name: str = "matrix") -> np.ndarray:
    u = as_square_matrix(u, name)
    dev = max_abs(u.conj().T @ u - np.eye(u.shape[0]))
    if dev > tol:
        raise ValueError(f"{name} is not unitary within {tol:g} (deviation {dev:.3e})")
    return u


def require_density_matrix(rho: np.ndarray, tol: float = 1e-9, name: str = "rho") -> np.ndarray:
    rho = require_hermitian(rho, tol, name)
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > tol:
        raise ValueError(f"{name} has trace {tr:.6g}, expected 1 within {tol:g}")
    min_eig = float(np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0])
    if min_eig < -tol:
        raise ValueError(f"{name} is not positive semidefinite (min eigenvalue {min_eig:.3e})")
    return rho
