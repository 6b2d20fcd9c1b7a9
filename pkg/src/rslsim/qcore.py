"""Hermitian matrix calculus for small quantum states.

Everything here works on dense complex matrices of dimension 16 or less:
validated density matrices, von Neumann and relative entropies (natural
log, nats), a floor-regularized matrix logarithm, the computational-basis
dephasing map, tensor products and partial traces.

Numerical conventions, shared across the package:

* eigenvalues below ``DEFAULT_FLOOR`` are floored before taking logs of
  matrices that are meant to be full rank;
* a relative entropy is reported as ``math.inf`` only when the first
  argument has weight above ``SUPPORT_TOL`` on the null space of the
  second, which separates genuine support mismatch from round-off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
SUPPORT_TOL = 1e-10
DEFAULT_FLOOR = 1e-12


class InvalidStateError(ValueError):
    """Raised when a matrix fails the density-matrix invariants."""


class UnsupportedStateError(ValueError):
    """Raised when an oracle is asked about a state outside its domain."""


class IntegrationError(RuntimeError):
    """Raised when a trajectory integrator violates its invariants."""


def _as_complex(entries) -> np.ndarray:
    arr = np.asarray(entries, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidStateError(f"expected a square matrix, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class DensityMatrix:
    """A validated quantum state.

    ``local_dims`` records the tensor-factor structure (defaults to a
    single factor); its product must equal the matrix dimension. The
    entries are copied on construction and should be treated as
    immutable.
    """

    entries: np.ndarray
    local_dims: tuple[int, ...] = ()

    def __post_init__(self):
        arr = _as_complex(self.entries)
        dim = arr.shape[0]
        if dim > 16:
            raise InvalidStateError(f"dimension {dim} exceeds the supported maximum of 16")
        dims = tuple(self.local_dims) if self.local_dims else (dim,)
        if math.prod(dims) != dim:
            raise InvalidStateError(f"local_dims {dims} do not multiply to dim {dim}")
        herm = np.max(np.abs(arr - arr.conj().T))
        if herm > HERMITICITY_TOL:
            raise InvalidStateError(f"not Hermitian: max |A - A†| = {herm:.3e}")
        tr = arr.trace()
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"trace deviates from 1 by {abs(tr - 1.0):.3e}")
        lam_min = float(np.linalg.eigvalsh(0.5 * (arr + arr.conj().T))[0])
        if lam_min < -PSD_TOL:
            raise InvalidStateError(f"negative eigenvalue {lam_min:.3e}")
        object.__setattr__(self, "entries", arr.copy())
        object.__setattr__(self, "local_dims", dims)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class HermitianOperator:
    """A plain Hermitian matrix (observables, logarithms, generators)."""

    entries: np.ndarray

    def __post_init__(self):
        arr = _as_complex(self.entries)
        herm = np.max(np.abs(arr - arr.conj().T))
        if herm > HERMITICITY_TOL:
            raise InvalidStateError(f"not Hermitian: max |A - A†| = {herm:.3e}")
        object.__setattr__(self, "entries", arr.copy())

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def _symmetrized_eigh(A: np.ndarray):
    """Eigendecomposition of (A + A†)/2, controlling integrator round-off."""
    return np.linalg.eigh(0.5 * (A + A.conj().T))


def _entropy_from_eigenvalues(lam: np.ndarray) -> float:
    lam = np.clip(lam, 0.0, None)
    pos = lam[lam > 0]
    return float(-(pos * np.log(pos)).sum())


def _raw(state) -> np.ndarray:
    return state.entries if isinstance(state, (DensityMatrix, HermitianOperator)) else np.asarray(state, dtype=complex)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy -Tr[rho ln rho] in nats, with 0 ln 0 taken as 0."""
    lam = np.linalg.eigvalsh(_raw(rho))
    return max(0.0, _entropy_from_eigenvalues(lam))


def matrix_log_floor(A, floor: float = DEFAULT_FLOOR) -> HermitianOperator:
    """Matrix logarithm with eigenvalues floored at ``floor``.

    The input must be Hermitian PSD (within tolerance). Eigenvalues
    below the floor are replaced by it before taking logs, so singular
    matrices produce a finite, Hermitian result.
    """
    if not 0 < floor <= 1e-6:
        raise ValueError(f"floor must lie in (0, 1e-6], got {floor}")
    w, V = _symmetrized_eigh(_raw(A))
    if w[0] < -PSD_TOL:
        raise InvalidStateError(f"matrix_log_floor needs a PSD input, min eigenvalue {w[0]:.3e}")
    logw = np.log(np.clip(w, floor, None))
    return HermitianOperator((V * logw) @ V.conj().T)


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix, floor: float = DEFAULT_FLOOR) -> float:
    """Quantum relative entropy S(rho || sigma) = -S(rho) - Tr[rho ln sigma], in nats.

    Returns ``math.inf`` when rho has weight above ``SUPPORT_TOL`` on the
    null space of sigma; otherwise ln sigma is evaluated with eigenvalue
    flooring, which keeps values on singular-but-compatible supports
    finite and floor-independent.
    """
    if not 0 < floor <= 1e-6:
        raise ValueError(f"floor must lie in (0, 1e-6], got {floor}")
    r, s = _raw(rho), _raw(sigma)
    if r.shape != s.shape:
        raise InvalidStateError(f"dimension mismatch: {r.shape} vs {s.shape}")
    w, V = _symmetrized_eigh(s)
    null = V[:, w < SUPPORT_TOL]
    if null.shape[1]:
        overlap = float(np.real(np.einsum("ij,jk,ki->", null.conj().T, r, null)))
        if overlap > SUPPORT_TOL:
            return math.inf
    log_s = (V * np.log(np.clip(w, floor, None))) @ V.conj().T
    ent = _entropy_from_eigenvalues(np.linalg.eigvalsh(r))
    return -ent - float(np.real(np.trace(r @ log_s)))


def dephase(rho: DensityMatrix) -> DensityMatrix:
    """Project onto the computational-basis diagonal (all coherences dropped)."""
    diag = np.diag(np.diag(_raw(rho)).real).astype(complex)
    return DensityMatrix(diag, local_dims=getattr(rho, "local_dims", ()))


def tensor(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    """Kronecker product of two states, concatenating their factor structure."""
    return DensityMatrix(np.kron(_raw(a), _raw(b)), local_dims=a.local_dims + b.local_dims)


def partial_trace(rho: DensityMatrix, keep: int) -> DensityMatrix:
    """Reduced state on factor ``keep``, tracing out every other factor."""
    dims = rho.local_dims
    if len(dims) < 2:
        raise InvalidStateError("partial_trace needs at least two tensor factors")
    if not 0 <= keep < len(dims):
        raise IndexError(f"keep index {keep} out of range for {len(dims)} factors")
    n = len(dims)
    out = _raw(rho).reshape(dims + dims)
    removed = 0
    for axis in range(n):
        if axis == keep:
            continue
        a1 = axis - removed
        out = np.trace(out, axis1=a1, axis2=a1 + n - removed)
        removed += 1
    return DensityMatrix(out, local_dims=(dims[keep],))
