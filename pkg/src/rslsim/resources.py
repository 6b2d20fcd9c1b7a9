"""Resource theories as free-state oracles, plus a separable-state search.

An oracle maps a state to its closest free state and thereby to its
resource content, measured by the quantum relative entropy. Four
theories are built in:

* ``IncoherentOracle``: free states are computational-basis diagonal;
  the closest one is the dephased input (an exact identity, since
  S(rho || delta) = S(rho || dephase(rho)) + S(dephase(rho) || delta)
  for any diagonal delta).
* ``WernerSeparableOracle``: the dephased state again, but only on the
  family of Bell-diagonal states with a single (0,3) coherence, where
  that choice is the standard candidate. Out-of-family states raise, so
  nobody mistakes the special case for a general separability oracle.
* ``GibbsOracle``: the unique free state is the thermal state of the
  qubit Hamiltonian omega*sigma_z.
* ``FixedStateOracle``: an arbitrary single free state.

``separable_search`` independently minimizes the relative entropy over
the convex hull of two-qubit product states with a conditional-gradient
(Frank-Wolfe) loop. Its value is an upper bound on the relative entropy
of entanglement and is the tool for judging how good the dephased
candidate actually is.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .qcore import (
    DEFAULT_FLOOR,
    DensityMatrix,
    UnsupportedStateError,
    dephase,
    relative_entropy,
)
from .states import gibbs_state


class FreeStateOracle:
    """Base class: a resource theory described by its closest-free-state map."""

    kind: str = "abstract"

    def closest_free(self, rho: DensityMatrix) -> DensityMatrix:
        raise NotImplementedError

    def resource_measure(self, rho: DensityMatrix, floor: float = DEFAULT_FLOOR) -> float:
        """Relative entropy from rho to its closest free state, in nats."""
        return relative_entropy(rho, self.closest_free(rho), floor)


class IncoherentOracle(FreeStateOracle):
    kind = "incoherent"

    def closest_free(self, rho: DensityMatrix) -> DensityMatrix:
        return dephase(rho)


class WernerSeparableOracle(FreeStateOracle):
    """Dephasing as the closest-separable map on its declared family only."""

    kind = "werner-separable"
    _COHERENCE_TOL = 1e-12

    def _check_family(self, rho: DensityMatrix) -> None:
        if rho.dim != 4:
            raise UnsupportedStateError(
                f"werner-separable oracle is defined on two qubits, got dim {rho.dim}"
            )
        off = rho.entries.copy()
        np.fill_diagonal(off, 0.0)
        off[0, 3] = off[3, 0] = 0.0
        if np.max(np.abs(off)) > self._COHERENCE_TOL:
            raise UnsupportedStateError(
                "state has coherences outside the (0,3) pair; "
                "use separable_search for general two-qubit states"
            )

    def closest_free(self, rho: DensityMatrix) -> DensityMatrix:
        self._check_family(rho)
        return dephase(rho)


class GibbsOracle(FreeStateOracle):
    kind = "gibbs"

    def __init__(self, omega: float, beta: float):
        self.omega = omega
        self.beta = beta
        self._free = gibbs_state(omega, beta)

    def closest_free(self, rho: DensityMatrix) -> DensityMatrix:
        if rho.dim != self._free.dim:
            raise UnsupportedStateError(f"gibbs oracle is defined on qubits, got dim {rho.dim}")
        return self._free


class FixedStateOracle(FreeStateOracle):
    kind = "fixed"

    def __init__(self, sigma: DensityMatrix):
        self._free = sigma

    def closest_free(self, rho: DensityMatrix) -> DensityMatrix:
        if rho.dim != self._free.dim:
            raise UnsupportedStateError(
                f"fixed free state has dim {self._free.dim}, got state of dim {rho.dim}"
            )
        return self._free


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 3
    iterations: int = 300
    mixture_size: int = 24
    tolerance: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.iterations < 1:
            raise ValueError("restarts and iterations must be positive")
        if self.mixture_size < 16:
            raise ValueError(f"mixture_size must be at least dim^2 = 16, got {self.mixture_size}")
        if not 0 < self.tolerance <= 1e-2:
            raise ValueError(f"tolerance must lie in (0, 1e-2], got {self.tolerance}")


@dataclass(frozen=True)
class SearchResult:
    sigma: DensityMatrix
    value: float
    converged: bool
    gap: float


def _qre_floored(rho: np.ndarray, sigma: np.ndarray, entropy: float, floor: float) -> float:
    w, V = np.linalg.eigh(0.5 * (sigma + sigma.conj().T))
    log_s = (V * np.log(np.clip(w, floor, None))) @ V.conj().T
    return -entropy - float(np.real(np.trace(rho @ log_s)))


def _log_gradient(rho: np.ndarray, sigma: np.ndarray, floor: float) -> np.ndarray:
    # Gradient of sigma -> -Tr[rho ln sigma] is -G with G the Frechet
    # derivative of the log transposed onto rho; in sigma's eigenbasis
    # G_ij = rho_ij * phi(w_i, w_j) with the divided difference
    # phi(a, b) = (ln a - ln b)/(a - b), phi(a, a) = 1/a.
    w, V = np.linalg.eigh(0.5 * (sigma + sigma.conj().T))
    wf = np.clip(w, floor, None)
    lw = np.log(wf)
    diff = wf[:, None] - wf[None, :]
    near = np.abs(diff) < 1e-14
    phi = np.where(near, 1.0 / wf[:, None], (lw[:, None] - lw[None, :]) / np.where(near, 1.0, diff))
    rho_eig = V.conj().T @ rho @ V
    return V @ (rho_eig * phi) @ V.conj().T


def _best_product_state(G: np.ndarray, rng: np.random.Generator, tries: int = 3):
    """Product state |a>|b> maximizing <ab|G|ab>, by alternating 2x2 eigenproblems."""
    G4 = G.reshape(2, 2, 2, 2)
    best = (-np.inf, None, None)
    for attempt in range(tries):
        b = rng.normal(size=2) + 1j * rng.normal(size=2)
        b /= np.linalg.norm(b)
        val_prev = -np.inf
        a = None
        for _ in range(50):
            ma = np.einsum("ikjl,k,l->ij", G4, b.conj(), b)
            wa, va = np.linalg.eigh(0.5 * (ma + ma.conj().T))
            a = va[:, -1]
            mb = np.einsum("ikjl,i,j->kl", G4, a.conj(), a)
            wb, vb = np.linalg.eigh(0.5 * (mb + mb.conj().T))
            b = vb[:, -1]
            val = float(wb[-1])
            if abs(val - val_prev) < 1e-10:
                break
            val_prev = val
        if val > best[0]:
            best = (val, a, b)
    return best


def _mixture_matrix(atoms) -> np.ndarray:
    out = np.zeros((4, 4), dtype=complex)
    for weight, vec in atoms:
        out += weight * np.outer(vec, vec.conj())
    return out


def _compress_atoms(atoms, cap: int):
    # merge near-duplicate product vectors, then drop the lightest ones
    merged: list[list] = []
    for weight, vec in atoms:
        for entry in merged:
            if abs(np.vdot(entry[1], vec)) ** 2 > 1.0 - 1e-10:
                entry[0] += weight
                break
        else:
            merged.append([weight, vec])
    merged.sort(key=lambda e: -e[0])
    merged = merged[:cap]
    total = sum(e[0] for e in merged)
    return [(w / total, v) for w, v in merged]


def separable_search(rho: DensityMatrix, config: SearchConfig = SearchConfig(), floor: float = DEFAULT_FLOOR) -> SearchResult:
    """Minimize S(rho || sigma) over mixtures of two-qubit product states.

    Conditional-gradient descent: each iteration adds the product state
    best aligned with the current descent direction and takes an exact
    line-search step toward it. The first restart starts from the
    dephased input (lightly smoothed), so the result never exceeds the
    dephased candidate's relative entropy; the rest start from random
    product mixtures. Returns the best mixture found, its relative
    entropy, and whether the duality gap dropped below the configured
    tolerance.
    """
    if rho.local_dims != (2, 2):
        raise UnsupportedStateError(f"separable_search needs two qubits, got factors {rho.local_dims}")
    r = rho.entries
    evals = np.clip(np.linalg.eigvalsh(r), 1e-300, None)
    entropy = -float(np.sum(evals * np.log(evals)))
    best_value, best_atoms, best_gap = np.inf, None, np.inf

    basis = np.eye(4, dtype=complex)
    for restart in range(config.restarts):
        rng = np.random.default_rng(config.seed + restart)
        if restart == 0:
            delta = 1e-9
            diag = np.real(np.diag(r))
            atoms = [((1 - delta) * diag[i] + delta / 4, basis[:, i]) for i in range(4)]
        else:
            weights = rng.dirichlet(np.ones(6))
            atoms = []
            for w in weights:
                a = rng.normal(size=2) + 1j * rng.normal(size=2)
                b = rng.normal(size=2) + 1j * rng.normal(size=2)
                atoms.append((w, np.kron(a / np.linalg.norm(a), b / np.linalg.norm(b))))
        atoms = _compress_atoms(atoms, config.mixture_size)
        sigma = _mixture_matrix(atoms)
        value = _qre_floored(r, sigma, entropy, floor)
        gap = np.inf

        for _ in range(config.iterations):
            G = _log_gradient(r, sigma, floor)
            top, a, b = _best_product_state(G, rng)
            gap = top - float(np.real(np.trace(G @ sigma)))
            if gap <= config.tolerance:
                break
            vertex = np.kron(a, b)
            vmat = np.outer(vertex, vertex.conj())

            def line(s):
                return _qre_floored(r, (1 - s) * sigma + s * vmat, entropy, floor)

            res = minimize_scalar(line, bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-12})
            step = float(res.x)
            if line(step) >= value - 1e-15:
                break
            atoms = [(w * (1 - step), v) for w, v in atoms]
            atoms.append((step, vertex))
            atoms = _compress_atoms(atoms, config.mixture_size)
            sigma = _mixture_matrix(atoms)
            value = _qre_floored(r, sigma, entropy, floor)

        if value < best_value:
            best_value, best_atoms, best_gap = value, atoms, gap

    # report on a full-rank smoothing of the best mixture so the value is
    # a certified upper bound rather than a floored surrogate
    smooth = 1e-12
    sigma_best = (1 - smooth) * _mixture_matrix(best_atoms) + smooth * np.eye(4) / 4
    sigma_best = 0.5 * (sigma_best + sigma_best.conj().T)
    sigma_dm = DensityMatrix(sigma_best / np.trace(sigma_best).real, local_dims=(2, 2))
    final_value = relative_entropy(rho, sigma_dm, floor)
    return SearchResult(sigma=sigma_dm, value=final_value, converged=bool(best_gap <= config.tolerance), gap=float(best_gap))
