"""Standard states and operators used throughout the package."""

from __future__ import annotations

import numpy as np

from .qcore import DensityMatrix

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def bell_phi_plus() -> DensityMatrix:
    """The maximally entangled two-qubit state (|00> + |11>)/sqrt(2)."""
    m = np.zeros((4, 4), dtype=complex)
    for i in (0, 3):
        for j in (0, 3):
            m[i, j] = 0.5
    return DensityMatrix(m, local_dims=(2, 2))


def werner(p: float) -> DensityMatrix:
    """White noise of weight p mixed with the Bell state phi+.

    Eigenvalues are 1 - 3p/4 (once) and p/4 (three times).
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"mixing weight p must lie in [0, 1], got {p}")
    m = p * np.eye(4, dtype=complex) / 4 + (1 - p) * bell_phi_plus().entries
    return DensityMatrix(m, local_dims=(2, 2))


def plus_y() -> DensityMatrix:
    """Single-qubit pure state (I + sigma_y)/2, the +1 eigenstate of sigma_y."""
    return DensityMatrix(0.5 * (np.eye(2, dtype=complex) + SIGMA_Y))


def maximally_mixed(dim: int, local_dims: tuple[int, ...] = ()) -> DensityMatrix:
    return DensityMatrix(np.eye(dim, dtype=complex) / dim, local_dims=local_dims)


def gibbs_state(omega: float, beta: float) -> DensityMatrix:
    """Thermal state exp(-beta H)/Z for the qubit Hamiltonian H = omega sigma_z."""
    if omega <= 0 or beta <= 0:
        raise ValueError(f"omega and beta must be positive, got {omega}, {beta}")
    energies = omega * np.array([1.0, -1.0])
    weights = np.exp(-beta * energies)
    return DensityMatrix(np.diag(weights / weights.sum()).astype(complex))


def basis_state(dim: int, index: int, local_dims: tuple[int, ...] = ()) -> DensityMatrix:
    m = np.zeros((dim, dim), dtype=complex)
    m[index, index] = 1.0
    return DensityMatrix(m, local_dims=local_dims)


def random_density_matrix(dim: int, rng: np.random.Generator, local_dims: tuple[int, ...] = ()) -> DensityMatrix:
    """Full-rank random state from a Ginibre matrix G via G G† / Tr."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real, local_dims=local_dims)


def random_pure_state(dim: int, rng: np.random.Generator, local_dims: tuple[int, ...] = ()) -> DensityMatrix:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    v /= np.linalg.norm(v)
    return DensityMatrix(np.outer(v, v.conj()), local_dims=local_dims)
