"""Process tomography with correlated system-environment input states.

The simulated procedure prepares four joint two-qubit states whose reduced
system inputs are ``{I/2, (I+a*sx)/2, (I+a*sy)/2, (I+a*sz)/2}`` while the
environment marginal ``(I+b*sz)/2`` is identical across the set, evolves
them under a joint unitary, reduces, and solves for the map by
right-multiplying the output-state matrix with the inverse of the
input-state matrix.  With correlations present the resulting map need not
be completely positive.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IllConditionedError, NonPhysicalStateError
from .liouville import (
    choi_to_kraus,
    columnize,
    cp_filter,
    eig_hermitian,
    is_cp,
    superop_to_choi,
)
from .validation import as_square_matrix, require_unitary

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_EYE2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class CorrelatedInputSet:
    """The four joint input states and their reduced system inputs."""

    joint_states: tuple[np.ndarray, ...]
    reduced_inputs: tuple[np.ndarray, ...]
    alpha: float
    beta: float
    gamma: float

    @property
    def environment_state(self) -> np.ndarray:
        return (_EYE2 + self.beta * SIGMA_Z) / 2


@dataclass(frozen=True)
class QPTReport:
    """Diagnostics of one simulated tomography scenario.

    ``kraus_count`` is present exactly when the reported map is CP;
    ``removed_weight`` is present exactly when CP-filtering was applied.
    """

    s_obs: np.ndarray
    choi_eigenvalues: np.ndarray
    is_cp: bool
    kraus_count: int | None
    removed_weight: float | None
    condition_number: float


def prepare_correlated_inputs(
    alpha: float,
    beta: float,
    gamma: float,
    psd_tol: float = 1e-10,
) -> CorrelatedInputSet:
    """Build the four correlated joint states and check they are physical."""
    joints = [(np.kron(_EYE2, _EYE2) + beta * np.kron(_EYE2, SIGMA_Z)) / 4]
    for sigma in (SIGMA_X, SIGMA_Y, SIGMA_Z):
        joints.append(
            (
                np.kron(_EYE2, _EYE2)
                + alpha * np.kron(sigma, _EYE2)
                + beta * np.kron(_EYE2, SIGMA_Z)
                + gamma * np.kron(sigma, SIGMA_Z)
            )
            / 4
        )
    for idx, rho in enumerate(joints, start=1):
        min_eig = float(np.linalg.eigvalsh(rho)[0])
        if min_eig < -psd_tol:
            raise NonPhysicalStateError(
                f"joint input state {idx} has negative eigenvalue {min_eig:.3e} "
                f"for (alpha, beta, gamma) = ({alpha}, {beta}, {gamma})"
            )
    reduced = tuple(partial_trace_b(rho) for rho in joints)
    return CorrelatedInputSet(tuple(joints), reduced, alpha, beta, gamma)


def partial_trace_b(rho_ab: np.ndarray, dim_b: int = 2) -> np.ndarray:
    """Trace out the (trailing) environment factor."""
    rho_ab = as_square_matrix(rho_ab, "rho_ab")
    n = rho_ab.shape[0]
    if n % dim_b != 0:
        raise ValueError(f"dimension {n} is not divisible by environment dim {dim_b}")
    da = n // dim_b
    return np.einsum("abcb->ac", rho_ab.reshape(da, dim_b, da, dim_b))


def evolve_and_reduce(u_ab: np.ndarray, rho_ab: np.ndarray) -> np.ndarray:
    """Joint unitary evolution followed by the environment partial trace."""
    u_ab = require_unitary(u_ab, 1e-10, "u_ab")
    return partial_trace_b(u_ab @ rho_ab @ u_ab.conj().T)


def environment_kraus_operators(
    u_ab: np.ndarray,
    rho_b: np.ndarray,
    weight_tol: float = 1e-12,
) -> list[np.ndarray]:
    """Kraus operators of the uncorrelated reduced dynamics.

    Built from the environment-block matrix elements ``<mu|U_AB|nu>`` with
    ``|nu>`` the eigenvectors of rho_B, each scaled by sqrt of its weight.
    """
    u_ab = require_unitary(u_ab, 1e-10, "u_ab")
    rho_b = as_square_matrix(rho_b, "rho_b")
    db = rho_b.shape[0]
    n = u_ab.shape[0]
    if n % db != 0:
        raise ValueError("u_ab dimension incompatible with rho_b")
    da = n // db
    probs, basis = eig_hermitian(rho_b)
    u4 = u_ab.reshape(da, db, da, db)
    ops = []
    for nu in range(db):
        if probs[nu] <= weight_tol:
            continue
        block = np.einsum("ambn,n->amb", u4, basis[:, nu])
        for mu in range(db):
            ops.append(np.sqrt(probs[nu]) * block[:, mu, :])
    return ops


def qpt_solve(
    input_vectors: list[np.ndarray],
    output_vectors: list[np.ndarray],
    cond_limit: float = 1e8,
) -> tuple[np.ndarray, float]:
    """Solve ``S @ In = Out`` for the observed map.

    The columns of In/Out are the vectorized input/output states; the input
    matrix must be square and its condition number below ``cond_limit``.
    Returns the map and the condition number.
    """
    in_mat = np.column_stack([np.asarray(v, dtype=complex).ravel() for v in input_vectors])
    out_mat = np.column_stack([np.asarray(v, dtype=complex).ravel() for v in output_vectors])
    if in_mat.shape[0] != in_mat.shape[1]:
        raise ValueError(
            f"need {in_mat.shape[0]} input states to invert, got {in_mat.shape[1]}"
        )
    if out_mat.shape != in_mat.shape:
        raise ValueError("inputs and outputs have mismatched shapes")
    cond = float(np.linalg.cond(in_mat))
    if not np.isfinite(cond) or cond > cond_limit:
        raise IllConditionedError(cond, "tomography input matrix")
    s_obs = np.linalg.solve(in_mat.T, out_mat.T).T
    return s_obs, cond


def run_qpt_scenario(
    u_ab: np.ndarray,
    alpha: float,
    beta: float,
    gamma: float,
    correlated: bool = True,
    apply_cp_filter: bool = False,
    cp_tol: float = 1e-9,
) -> QPTReport:
    """Simulate one full tomography scenario and collect CP diagnostics.

    With ``correlated=False`` the system-environment correlations are
    removed before evolution by replacing each joint state with the product
    of its marginals (all other parameters kept equal).
    """
    inputs = prepare_correlated_inputs(alpha, beta, gamma)
    if correlated:
        joints = inputs.joint_states
    else:
        rho_b = inputs.environment_state
        joints = tuple(np.kron(rho_a, rho_b) for rho_a in inputs.reduced_inputs)
    in_vecs = [columnize(rho_a) for rho_a in inputs.reduced_inputs]
    out_vecs = [columnize(evolve_and_reduce(u_ab, rho)) for rho in joints]
    s_obs, cond = qpt_solve(in_vecs, out_vecs)

    removed_weight = None
    if apply_cp_filter:
        s_obs, removed_weight = cp_filter(s_obs)
    choi = superop_to_choi(s_obs)
    eigenvalues, _ = eig_hermitian(choi, tol=1e-8)
    cp_flag, _ = is_cp(s_obs, cp_tol)
    # rank cutoff matches the CP tolerance so a map that just passed the CP
    # test cannot fail Kraus extraction on the same eigenvalue
    kraus_count = len(choi_to_kraus(choi, rank_tol=cp_tol)) if cp_flag else None
    return QPTReport(
        s_obs=s_obs,
        choi_eigenvalues=eigenvalues,
        is_cp=cp_flag,
        kraus_count=kraus_count,
        removed_weight=removed_weight,
        condition_number=cond,
    )
