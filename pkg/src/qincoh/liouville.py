"""Column-stacking Liouville-space algebra.

A density matrix is vectorized by stacking its columns left to right, so
entry ``i + j*N`` of the vector is ``rho[i, j]``.  Under this convention a
triple product ``A @ rho @ B`` acts on the vectorized state as
``transpose(B) kron A``; in particular a unitary conjugation
``rho -> U rho U^dag`` becomes the superoperator ``conj(U) kron U``.

Superoperators and Choi matrices are plain ``N^2 x N^2`` complex ndarrays.
The Choi matrix of a superoperator ``S`` is

    C = sum_ij (E_ij kron I) S (I kron E_ij)

with ``E_ij`` the elementary matrix; on entries this is the exact index
permutation ``C[(a,b),(c,d)] = S[(d,b),(c,a)]``, which is its own inverse.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import NotCompletelyPositiveError
from .validation import as_square_matrix, max_abs, require_hermitian, require_unitary


def columnize(rho: np.ndarray) -> np.ndarray:
    """Stack the columns of a matrix into a single vector (|rho>)."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {rho.shape}")
    return rho.flatten(order="F")


def uncolumnize(vec: np.ndarray) -> np.ndarray:
    """Inverse of :func:`columnize`; the length must be a perfect square."""
    vec = np.asarray(vec, dtype=complex).ravel()
    n = math.isqrt(vec.size)
    if n * n != vec.size:
        raise ValueError(f"vector length {vec.size} is not a perfect square")
    return vec.reshape((n, n), order="F")


def unitary_superoperator(u: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Superoperator ``conj(U) kron U`` of the conjugation ``rho -> U rho U^dag``."""
    u = require_unitary(u, tol, "u")
    return np.kron(u.conj(), u)


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its first significant entry is real positive."""
    out = np.array(vectors, dtype=complex)
    for i in range(out.shape[1]):
        col = out[:, i]
        mags = np.abs(col)
        top = mags.max()
        if top == 0.0:
            continue
        lead = int(np.flatnonzero(mags > 1e-12 * top)[0])
        out[:, i] = col * (abs(col[lead]) / col[lead])
    return out


def eig_general(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a general (possibly non-normal) square matrix.

    Returns ``(eigenvalues, eigenvectors)`` with unit-norm eigenvector
    columns, ordered by (real part desc, imag part desc).  Repeated
    eigenvalues are listed with multiplicity.
    """
    m = as_square_matrix(m, "m")
    try:
        w, v = np.linalg.eig(m)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            f"eigendecomposition did not converge for {m.shape[0]}x{m.shape[1]} "
            f"matrix (max|entry| = {max_abs(m):.3e}): {exc}"
        ) from exc
    order = np.lexsort((-w.imag, -w.real))
    w = w[order]
    v = v[:, order]
    v = v / np.linalg.norm(v, axis=0, keepdims=True)
    return w, _fix_phases(v)


def eig_hermitian(m: np.ndarray, tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns real eigenvalues sorted descending and orthonormal eigenvector
    columns (phase-fixed so the first significant entry is real positive).
    """
    m = require_hermitian(m, tol, "m")
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    w = w[::-1].real
    v = v[:, ::-1]
    return w, _fix_phases(v)


def _superop_dim(mat: np.ndarray, name: str) -> int:
    mat = as_square_matrix(mat, name)
    n = math.isqrt(mat.shape[0])
    if n * n != mat.shape[0]:
        raise ValueError(f"{name} side {mat.shape[0]} is not a perfect square")
    return n


def superop_to_choi(s: np.ndarray) -> np.ndarray:
    """Choi matrix of a superoperator (pure index permutation, involutive)."""
    s = np.asarray(s, dtype=complex)
    n = _superop_dim(s, "s")
    return s.reshape(n, n, n, n).transpose(3, 1, 2, 0).reshape(n * n, n * n)


def choi_to_superop(c: np.ndarray) -> np.ndarray:
    """Inverse of :func:`superop_to_choi` (the same permutation)."""
    return superop_to_choi(c)


def is_cp(s: np.ndarray, tol: float = 1e-9) -> tuple[bool, float]:
    """Test complete positivity; returns ``(flag, min Choi eigenvalue)``.

    The flag is True when the smallest eigenvalue of the Hermitian part of
    the Choi matrix is >= -tol.
    """
    c = superop_to_choi(s)
    min_eig = float(np.linalg.eigvalsh((c + c.conj().T) / 2)[0])
    return min_eig >= -tol, min_eig


def choi_to_kraus(c: np.ndarray, rank_tol: float | None = None) -> list[np.ndarray]:
    """Kraus operators from a positive-semidefinite Choi matrix.

    Each eigenvalue above ``rank_tol`` contributes ``sqrt(lam) * uncolumnize(v)``,
    so the operator count is the numerical rank of the Choi matrix.  By default
    ``rank_tol = 1e-10 * (max eigenvalue)``.  A negative eigenvalue below
    ``-rank_tol`` raises :class:`NotCompletelyPositiveError`.
    """
    w, v = eig_hermitian(c)
    if w[0] <= 0.0:
        raise ValueError("Choi matrix has no positive spectrum")
    if rank_tol is None:
        rank_tol = 1e-10 * w[0]
    if w[-1] < -rank_tol:
        raise NotCompletelyPositiveError(float(w[-1]))
    return [np.sqrt(w[i]) * uncolumnize(v[:, i]) for i in range(w.size) if w[i] > rank_tol]


def kraus_to_superop(kraus_ops: list[np.ndarray]) -> np.ndarray:
    """Assemble ``sum_i conj(A_i) kron A_i`` (summed in list order)."""
    if not kraus_ops:
        raise ValueError("empty Kraus operator list")
    ops = [as_square_matrix(a, f"kraus_ops[{i}]") for i, a in enumerate(kraus_ops)]
    dim = ops[0].shape[0]
    if any(a.shape[0] != dim for a in ops):
        raise ValueError("Kraus operators have mismatched dimensions")
    s = np.zeros((dim * dim, dim * dim), dtype=complex)
    for a in ops:
        s += np.kron(a.conj(), a)
    return s


def cp_filter(s: np.ndarray) -> tuple[np.ndarray, float]:
    """Project to a CP map by zeroing negative Choi eigenvalues.

    The surviving spectrum is rescaled so the Choi trace equals the Hilbert
    dimension N.  Returns the filtered superoperator and the removed weight
    (sum of |negative eigenvalues|).
    """
    c = superop_to_choi(s)
    n = math.isqrt(c.shape[0])
    w, v = eig_hermitian(c)
    removed_weight = float(np.abs(w[w < 0.0]).sum())
    kept = np.clip(w, 0.0, None)
    total = float(kept.sum())
    if total <= 0.0:
        raise ValueError("entire Choi spectrum is non-positive; cannot CP-filter")
    kept = kept * (n / total)
    c_filtered = (v * kept) @ v.conj().T
    return choi_to_superop(c_filtered), removed_weight
