"""Channel families and trajectory generation.

Five dissipative families are supported. Dephasing multiplies every
computational-basis coherence by a decay factor nu(t) = exp(-Gamma(t));
depolarisation mixes the initial state toward I/dim with the same
exponent; both come in a constant-rate and a rate-modulated variant.
The thermal family integrates a qubit Lindblad equation with a fixed
Hamiltonian omega*sigma_z and raising/lowering dissipators.

For the modulated variants the decay exponent is

    Gamma(t) = gamma * t + 1 - cos(k * t),

whose instantaneous rate gamma + k*sin(k*t) dips below zero during part
of every period exactly when k > gamma. Those negative-rate windows
rebuild coherence, which is what separates these channels from their
monotonic counterparts, so the constructor rejects k <= gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qcore import (
    DEFAULT_FLOOR,
    DensityMatrix,
    HermitianOperator,
    IntegrationError,
    InvalidStateError,
    matrix_log_floor,
)
from .states import SIGMA_X, SIGMA_Y, SIGMA_Z, gibbs_state

DEPHASING = "dephasing"
DEPHASING_NM = "dephasing-nm"
DEPOLARISING = "depolarising"
DEPOLARISING_NM = "depolarising-nm"
THERMAL = "thermal"

VARIANTS = (DEPHASING, DEPHASING_NM, DEPOLARISING, DEPOLARISING_NM, THERMAL)
_MODULATED = (DEPHASING_NM, DEPOLARISING_NM)


@dataclass(frozen=True)
class ChannelSpec:
    """Parameters of one dynamics family.

    ``k`` is only meaningful (and required) for the rate-modulated
    variants; ``omega`` and ``beta`` only for the thermal one. When
    ``as_written`` is set the thermal occupation number is computed with
    the exponent 2*omega/beta instead of the default 2*beta*omega; the
    default is what makes the Gibbs state an exact fixed point.
    """

    variant: str
    gamma: float
    k: float | None = None
    omega: float | None = None
    beta: float | None = None
    as_written: bool = False

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown channel variant {self.variant!r}, expected one of {VARIANTS}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.variant in _MODULATED:
            if self.k is None:
                raise ValueError(f"{self.variant} requires a modulation frequency k")
            if not self.k > self.gamma:
                raise ValueError(
                    f"modulation is only non-monotonic for k > gamma, got k={self.k}, gamma={self.gamma}"
                )
        elif self.k is not None:
            raise ValueError(f"{self.variant} does not take a modulation frequency k")
        if self.variant == THERMAL:
            if self.omega is None or self.beta is None:
                raise ValueError("thermal channel requires omega and beta")
            if not (self.omega > 0 and self.beta > 0):
                raise ValueError(f"omega and beta must be positive, got {self.omega}, {self.beta}")
        elif self.omega is not None or self.beta is not None:
            raise ValueError(f"{self.variant} does not take omega/beta")

    @property
    def modulated(self) -> bool:
        return self.variant in _MODULATED


def decay_exponent(channel: ChannelSpec, t):
    """Accumulated decay exponent Gamma(t); vectorized over t."""
    t = np.asarray(t, dtype=float)
    if channel.modulated:
        return channel.gamma * t + 1.0 - np.cos(channel.k * t)
    return channel.gamma * t


def decay_rate(channel: ChannelSpec, t):
    """Instantaneous rate dGamma/dt; negative in recoherence windows."""
    t = np.asarray(t, dtype=float)
    if channel.modulated:
        return channel.gamma + channel.k * np.sin(channel.k * t)
    return np.full_like(t, channel.gamma)


def thermal_generator(channel: ChannelSpec) -> tuple[np.ndarray, DensityMatrix]:
    """Lindblad superoperator (acting on row-major vec(rho)) and its Gibbs fixed point.

    H = omega*sigma_z, jump operators sigma+ (absorption, rate gamma*N/2)
    and sigma- (emission, rate gamma*(N+1)/2), dissipator
    D[A](rho) = 2 A rho A† - {A†A, rho}. Detailed balance with occupation
    N = 1/(exp(2*beta*omega) - 1) pins the fixed point at exp(-beta*H)/Z.
    """
    if channel.variant != THERMAL:
        raise ValueError(f"thermal_generator needs a thermal channel, got {channel.variant}")
    omega, gamma, beta = channel.omega, channel.gamma, channel.beta
    expo = 2 * omega / beta if channel.as_written else 2 * beta * omega
    nbar = 1.0 / math.expm1(expo)
    h = omega * SIGMA_Z
    sm = 0.5 * (SIGMA_X - 1j * SIGMA_Y)
    sp = sm.conj().T
    eye = np.eye(2, dtype=complex)
    gen = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for op, rate in ((sp, gamma * nbar / 2), (sm, gamma * (nbar + 1) / 2)):
        opdop = op.conj().T @ op
        gen += rate * (2 * np.kron(op, op.conj()) - np.kron(opdop, eye) - np.kron(eye, opdop.T))
    return gen, gibbs_state(omega, beta)


@dataclass(frozen=True)
class Trajectory:
    """A discretized evolution: states and their time derivatives on a uniform grid."""

    channel: ChannelSpec | None
    tau: float
    grid: np.ndarray
    states: np.ndarray
    derivs: np.ndarray

    @property
    def points(self) -> int:
        return len(self.grid)

    @property
    def initial(self) -> np.ndarray:
        return self.states[0]

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def validate(self, trace_tol: float = 1e-9) -> None:
        """Check trace preservation and positivity of every stored state."""
        tr = np.einsum("nii->n", self.states)
        drift = float(np.max(np.abs(tr - 1.0)))
        if drift > trace_tol:
            raise IntegrationError(f"trace drift {drift:.3e} exceeds {trace_tol:.1e}")
        dtr = float(np.max(np.abs(np.einsum("nii->n", self.derivs))))
        if dtr > trace_tol:
            raise IntegrationError(f"derivative trace {dtr:.3e} exceeds {trace_tol:.1e}")
        lam_min = float(np.min(np.linalg.eigvalsh(self.states)))
        if lam_min < -1e-8:
            raise IntegrationError(f"state eigenvalue {lam_min:.3e} below tolerance; try more steps")

    def truncated(self, index: int) -> "Trajectory":
        """The restriction of this trajectory to grid[:index + 1]."""
        if not 1 <= index < self.points:
            raise IndexError(f"truncation index {index} out of range")
        return Trajectory(
            channel=self.channel,
            tau=float(self.grid[index]),
            grid=self.grid[: index + 1],
            states=self.states[: index + 1],
            derivs=self.derivs[: index + 1],
        )


def state_at(channel: ChannelSpec, rho0: DensityMatrix, t: float) -> DensityMatrix:
    """The evolved state at time t (analytic where possible)."""
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    r0 = rho0.entries
    if channel.variant == THERMAL:
        _check_thermal_dim(rho0)
        if t == 0:
            return rho0
        gen, _ = thermal_generator(channel)
        steps = max(100, int(math.ceil(2e4 * t)))
        prop = _rk4_propagator(gen, t / steps)
        v = np.linalg.matrix_power(prop, steps) @ r0.reshape(-1)
        m = v.reshape(2, 2)
        return DensityMatrix(0.5 * (m + m.conj().T), local_dims=rho0.local_dims)
    g = float(decay_exponent(channel, t))
    if channel.variant in (DEPHASING, DEPHASING_NM):
        diag = np.diag(np.diag(r0))
        out = diag + math.exp(-g) * (r0 - diag)
    else:
        dim = rho0.dim
        out = math.exp(-g) * r0 + (1.0 - math.exp(-g)) * np.eye(dim) / dim
    return DensityMatrix(out, local_dims=rho0.local_dims)


def liouvillian_at(channel: ChannelSpec, rho0: DensityMatrix, t: float) -> HermitianOperator:
    """The exact time derivative of state_at at time t (traceless)."""
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    if channel.variant == THERMAL:
        _check_thermal_dim(rho0)
        gen, _ = thermal_generator(channel)
        rt = state_at(channel, rho0, t).entries
        m = (gen @ rt.reshape(-1)).reshape(2, 2)
        return HermitianOperator(0.5 * (m + m.conj().T))
    g = float(decay_exponent(channel, t))
    gdot = float(decay_rate(channel, t))
    r0 = rho0.entries
    if channel.variant in (DEPHASING, DEPHASING_NM):
        diag = np.diag(np.diag(r0))
        return HermitianOperator(-gdot * math.exp(-g) * (r0 - diag))
    dim = rho0.dim
    return HermitianOperator(-gdot * math.exp(-g) * (r0 - np.eye(dim) / dim))


def _check_thermal_dim(rho0: DensityMatrix) -> None:
    if rho0.dim != 2:
        raise InvalidStateError(f"thermal channel is defined on qubits, got dim {rho0.dim}")


def _rk4_propagator(gen: np.ndarray, h: float) -> np.ndarray:
    # One classic RK4 step of dv/dt = gen v. For an autonomous linear
    # generator the four stages collapse to the quartic Taylor polynomial
    # of exp(h*gen), which is what gets applied below.
    dim = gen.shape[0]
    prop = np.eye(dim, dtype=complex)
    term = np.eye(dim, dtype=complex)
    hg = h * gen
    for order in range(1, 5):
        term = term @ hg / order
        prop = prop + term
    return prop


def integrate_lindblad(
    channel: ChannelSpec,
    rho0: DensityMatrix,
    tau: float,
    steps: int,
    keep_every: int = 1,
) -> Trajectory:
    """Fixed-step RK4 integration of the thermal Lindblad equation.

    Runs ``steps`` RK4 steps over [0, tau] and stores every
    ``keep_every``-th state, so the returned grid has
    steps // keep_every + 1 points. Raises IntegrationError when the
    stored states drift in trace or develop negative eigenvalues.
    """
    _check_thermal_dim(rho0)
    if steps < 100:
        raise ValueError(f"need at least 100 integration steps, got {steps}")
    if steps % keep_every:
        raise ValueError(f"keep_every={keep_every} must divide steps={steps}")
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    gen, _ = thermal_generator(channel)
    h = tau / steps
    prop = np.linalg.matrix_power(_rk4_propagator(gen, h), keep_every)
    kept = steps // keep_every
    states = np.empty((kept + 1, 2, 2), dtype=complex)
    states[0] = rho0.entries
    v = rho0.entries.reshape(-1).astype(complex)
    for i in range(1, kept + 1):
        v = prop @ v
        m = v.reshape(2, 2)
        states[i] = 0.5 * (m + m.conj().T)
    derivs = (states.reshape(kept + 1, 4) @ gen.T).reshape(kept + 1, 2, 2)
    traj = Trajectory(
        channel=channel,
        tau=tau,
        grid=np.linspace(0.0, tau, kept + 1),
        states=states,
        derivs=derivs,
    )
    traj.validate()
    return traj


def make_trajectory(
    channel: ChannelSpec,
    rho0: DensityMatrix,
    tau: float,
    points: int = 1000,
    substeps: int = 10,
) -> Trajectory:
    """Trajectory on a uniform grid of ``points`` intervals over [0, tau].

    Analytic families are evaluated exactly on the grid; the thermal one
    integrates with ``substeps`` RK4 steps per grid interval.
    """
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if points < 2:
        raise ValueError(f"need at least 2 grid intervals, got {points}")
    if channel.variant == THERMAL:
        return integrate_lindblad(channel, rho0, tau, steps=points * substeps, keep_every=substeps)
    grid = np.linspace(0.0, tau, points + 1)
    g = decay_exponent(channel, grid)
    gdot = decay_rate(channel, grid)
    nu = np.exp(-g)
    r0 = rho0.entries
    if channel.variant in (DEPHASING, DEPHASING_NM):
        base = np.diag(np.diag(r0))
        drift = r0 - base
    else:
        base = np.eye(rho0.dim, dtype=complex) / rho0.dim
        drift = r0 - base
    states = base[None] + nu[:, None, None] * drift
    states[0] = r0
    derivs = (-gdot * nu)[:, None, None] * drift
    traj = Trajectory(channel=channel, tau=tau, grid=grid, states=states, derivs=derivs)
    traj.validate()
    return traj


def unitary_trajectory(hamiltonian: np.ndarray, rho0: DensityMatrix, tau: float, points: int = 1000) -> Trajectory:
    """Exact unitary evolution under a constant Hamiltonian (for validation studies)."""
    w, V = np.linalg.eigh(0.5 * (hamiltonian + hamiltonian.conj().T))
    grid = np.linspace(0.0, tau, points + 1)
    phases = np.exp(-1j * np.outer(grid, w))
    us = np.einsum("ij,nj,kj->nik", V, phases, V.conj())
    states = np.einsum("nij,jk,nlk->nil", us, rho0.entries, us.conj())
    states[0] = rho0.entries
    comm = np.einsum("ij,njk->nik", hamiltonian, states) - np.einsum("nij,jk->nik", states, hamiltonian)
    derivs = -1j * comm
    traj = Trajectory(channel=None, tau=tau, grid=grid, states=states, derivs=derivs)
    traj.validate()
    return traj


def entropy_rate(rho: DensityMatrix, liouville: HermitianOperator, floor: float = DEFAULT_FLOOR) -> float:
    """Instantaneous entropy change -Tr[L ln rho], with the log floored."""
    l = liouville.entries if isinstance(liouville, HermitianOperator) else np.asarray(liouville)
    if abs(np.trace(l)) > 1e-9:
        raise InvalidStateError(f"Liouvillian must be traceless, got trace {np.trace(l):.3e}")
    return -float(np.real(np.trace(l @ matrix_log_floor(rho, floor).entries)))


def entropy_rate_series(traj: Trajectory, floor: float = DEFAULT_FLOOR) -> np.ndarray:
    """Vectorized -Tr[L_t ln rho_t] along a trajectory."""
    w, V = np.linalg.eigh(traj.states)
    diag_l = np.einsum("nji,njk,nki->ni", V.conj(), traj.derivs, V).real
    return -(diag_l * np.log(np.clip(w, floor, None))).sum(axis=-1)
