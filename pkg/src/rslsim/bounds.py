"""Speed-limit evaluators over trajectories.

Every bound here has the same skeleton: a relative-entropy numerator
built from the trajectory endpoints and a time-averaged denominator of
the form <|Tr[L_t ln sigma]|> (plus an entropy-rate penalty for T_M),
integrated on the trajectory grid. They differ in which reference state
sigma enters the logarithm and how the entropy change is oriented.

Sentinel conventions: a zero denominator with a nonzero numerator, an
unreachable resource-change target, or a genuinely infinite numerator
all produce ``math.inf``, never a silently saturated value.

Singular reference states are handled two ways. When the relative
entropy is finite despite the singularity (the state's support fits
inside the reference's), eigenvalue flooring gives a floor-independent
answer and is used directly. When the construction itself degenerates
(the T_tilde denominator vanishing, for instance) the reference is
perturbed into a nearby full-rank "almost free" state and the bound is
extrapolated to zero perturbation from three decreasing values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.integrate import simpson

from .dynamics import ChannelSpec, Trajectory, entropy_rate_series, make_trajectory
from .qcore import (
    DEFAULT_FLOOR,
    SUPPORT_TOL,
    DensityMatrix,
    matrix_log_floor,
    relative_entropy,
    von_neumann_entropy,
)
from .resources import FreeStateOracle

DEFAULT_EPSILON = 1e-6
MU_TOLERANCE = 1e-3


def time_average(samples: np.ndarray, tau: float, method: str = "trapezoid") -> float:
    """Time average (1/tau) * integral of |f| from uniform samples on [0, tau]."""
    samples = np.abs(np.asarray(samples, dtype=float))
    if samples.ndim != 1 or len(samples) < 2:
        raise ValueError("need at least 2 samples spanning [0, tau]")
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    dx = tau / (len(samples) - 1)
    if method == "trapezoid":
        return float(np.trapezoid(samples, dx=dx) / tau)
    if method == "simpson":
        return float(simpson(samples, dx=dx) / tau)
    raise ValueError(f"unknown quadrature method {method!r}")


def _g_series(derivs: np.ndarray, log_sigma: np.ndarray) -> np.ndarray:
    """Tr[L_t ln sigma] along the grid."""
    return np.einsum("nij,ji->n", derivs, log_sigma).real


def _wrap(state: np.ndarray) -> DensityMatrix:
    return DensityMatrix(state)


def _aitken(v1: float, v2: float, v3: float) -> float:
    # one Aitken delta-squared step; for the geometric error decay of a
    # halved perturbation this is Richardson extrapolation to zero
    dd = (v3 - v2) - (v2 - v1)
    if not np.isfinite(dd) or abs(dd) < 1e-14:
        return v3
    return v3 - (v3 - v2) ** 2 / dd


def _tm_detail(traj: Trajectory, oracle: FreeStateOracle, floor: float, method: str):
    rho0, rho_tau = _wrap(traj.initial), _wrap(traj.final)
    m_0 = relative_entropy(rho0, oracle.closest_free(rho0), floor)
    m_tau = relative_entropy(rho_tau, oracle.closest_free(rho_tau), floor)
    dM = m_tau - m_0
    x = traj.tau if dM <= 0 else 0.0
    anchor = rho_tau if dM <= 0 else rho0
    log_sigma = matrix_log_floor(oracle.closest_free(anchor), floor).entries
    g = -_g_series(traj.derivs, log_sigma) - entropy_rate_series(traj, floor)
    den = time_average(g, traj.tau, method)
    if den <= 0:
        return (math.inf if abs(dM) > 0 else 0.0), x, dM
    return abs(dM) / den, x, dM


def bound_TM(traj: Trajectory, oracle: FreeStateOracle, floor: float = DEFAULT_FLOOR, method: str = "trapezoid") -> float:
    """Resource speed limit |dM| / <|-Tr[L ln sigma_x] - dS/dt|>.

    The reference sigma_x is the closest free state of the endpoint
    selected by the sign of dM: the final state when the resource decays
    (dM <= 0, ties included), the initial one when it grows.
    """
    value, _, _ = _tm_detail(traj, oracle, floor, method)
    return value


def _perturbed_reference(sigma: np.ndarray, eps: float) -> np.ndarray:
    # the almost-free state: for a two-qubit reference lacking the (0,3)
    # coherence, inject exactly that matrix element; otherwise floor the
    # spectrum and renormalize
    if sigma.shape[0] == 4 and abs(sigma[0, 3]) < 1e-14 and sigma[0, 0].real * sigma[3, 3].real >= eps * eps:
        out = sigma.copy()
        out[0, 3] += eps
        out[3, 0] += eps
        return out
    w, v = np.linalg.eigh(sigma)
    out = (v * np.clip(w, eps, None)) @ v.conj().T
    return out / np.trace(out).real


def _ttilde_detail(traj: Trajectory, oracle: FreeStateOracle, epsilon: float, floor: float, method: str):
    if not 0 <= epsilon <= 1e-3:
        raise ValueError(f"epsilon must lie in [0, 1e-3], got {epsilon}")
    rho0, rho_tau = _wrap(traj.initial), _wrap(traj.final)
    dS = von_neumann_entropy(rho_tau) - von_neumann_entropy(rho0)
    m_0 = relative_entropy(rho0, oracle.closest_free(rho0), floor)
    m_tau = relative_entropy(rho_tau, oracle.closest_free(rho_tau), floor)
    num = m_tau - m_0 + dS
    x = traj.tau if num <= 0 else 0.0
    anchor = rho_tau if num <= 0 else rho0
    sigma = oracle.closest_free(anchor).entries
    den = time_average(_g_series(traj.derivs, matrix_log_floor(sigma, floor).entries), traj.tau, method)
    # the direct form survives unless the denominator is degenerate on
    # the scale of the answer; that is when the epsilon limit is needed
    if epsilon == 0 or den > 1e-12 * max(1.0, abs(num) / traj.tau):
        if den <= 0:
            return (math.inf if abs(num) > 0 else 0.0), x, 0.0
        return abs(num) / den, x, 0.0
    values = []
    for eps in (epsilon, epsilon / 2, epsilon / 4):
        ref = _perturbed_reference(sigma, eps)
        num_eps = abs(
            relative_entropy(rho_tau, _wrap(ref), floor)
            - relative_entropy(rho0, _wrap(ref), floor)
            + dS
        )
        den_eps = time_average(_g_series(traj.derivs, matrix_log_floor(ref, floor).entries), traj.tau, method)
        values.append(num_eps / den_eps if den_eps > 0 else math.inf)
    return _aitken(*values), x, epsilon


def bound_Ttilde(
    traj: Trajectory,
    oracle: FreeStateOracle,
    epsilon: float = DEFAULT_EPSILON,
    floor: float = DEFAULT_FLOOR,
    method: str = "trapezoid",
) -> float:
    """Penalty-free variant of bound_TM: numerator |dM + dS|, no entropy-rate term.

    When the selected free state makes the denominator degenerate (pure
    dephasing fixed points do this) the bound is evaluated at perturbed
    references with strengths epsilon, epsilon/2, epsilon/4 and
    extrapolated to zero.
    """
    value, _, _ = _ttilde_detail(traj, oracle, epsilon, floor, method)
    return value


def bound_Tg(traj: Trajectory, sigma: DensityMatrix, floor: float = DEFAULT_FLOOR, method: str = "trapezoid") -> float:
    """Generation bound |S(rho_tau || sigma) + dS| / <|Tr[L ln sigma]|>, from rho_0 = sigma.

    The numerator is evaluated with the floored logarithm throughout:
    the combination -Tr[rho_tau ln sigma] - S(rho_tau) + dS equals the
    integral of the denominator's integrand, so flooring cancels from
    both sides and no support sentinel is needed.
    """
    r0 = traj.initial
    if float(np.max(np.abs(r0 - sigma.entries))) > 1e-8:
        raise ValueError("generation bound needs the trajectory to start at sigma")
    rho_tau = traj.final
    dS = von_neumann_entropy(_wrap(rho_tau)) - von_neumann_entropy(_wrap(r0))
    log_sigma = matrix_log_floor(sigma, floor).entries
    qre = -von_neumann_entropy(_wrap(rho_tau)) - float(np.real(np.trace(rho_tau @ log_sigma)))
    num = abs(qre + dS)
    den = time_average(_g_series(traj.derivs, log_sigma), traj.tau, method)
    if den <= 0:
        return math.inf if num > 0 else 0.0
    return num / den


def bound_Td(traj: Trajectory, sigma: DensityMatrix, floor: float = DEFAULT_FLOOR, method: str = "trapezoid") -> float:
    """Degradation bound |S(rho_0 || sigma) - dS| / <|Tr[L ln sigma]|>.

    A genuine support violation (rho_0 outside the support of sigma)
    makes the resource infinite and the bound degenerates to the
    infinite sentinel.
    """
    rho0, rho_tau = _wrap(traj.initial), _wrap(traj.final)
    qre = relative_entropy(rho0, sigma, floor)
    if not math.isfinite(qre):
        return math.inf
    dS = von_neumann_entropy(rho_tau) - von_neumann_entropy(rho0)
    num = abs(qre - dS)
    den = time_average(_g_series(traj.derivs, matrix_log_floor(sigma, floor).entries), traj.tau, method)
    if den <= 0:
        return math.inf if num > 0 else 0.0
    return num / den


def _qsl_direction(traj: Trajectory, a: np.ndarray, b: np.ndarray, floor: float, epsilon: float, method: str):
    """One direction T(a, b) of the two-state QSL, or None when uninformative.

    The entropy change is oriented with the arguments, dS = S(b) - S(a),
    which makes the numerator |Tr[(b - a) ln b]| and ties it exactly to
    the integral of the denominator's integrand. A direction where a has
    weight outside the support of b carries no finite information and is
    excluded.
    """
    if not math.isfinite(relative_entropy(_wrap(a), _wrap(b), floor)):
        return None
    s_a, s_b = von_neumann_entropy(_wrap(a)), von_neumann_entropy(_wrap(b))

    def eval_at(fl: float) -> float:
        log_b = matrix_log_floor(b, fl).entries
        num = abs(-s_a - float(np.real(np.trace(a @ log_b))) - (s_b - s_a))
        den = time_average(_g_series(traj.derivs, log_b), traj.tau, method)
        return num / den if den > 0 else math.inf

    if float(np.linalg.eigvalsh(b)[0]) >= SUPPORT_TOL:
        return eval_at(floor)
    values = [eval_at(eps) for eps in (epsilon, epsilon / 2, epsilon / 4)]
    return _aitken(*values)


def bound_qsl(
    traj: Trajectory,
    floor: float = DEFAULT_FLOOR,
    epsilon: float = DEFAULT_EPSILON,
    method: str = "trapezoid",
) -> float:
    """Two-sided relative-entropy QSL: max of T(rho_0, rho_tau) and T(rho_tau, rho_0).

    Directions excluded for support violation do not enter the max; if
    both are excluded the bound is the infinite sentinel. Identical
    endpoints give 0.
    """
    a, b = traj.initial, traj.final
    if float(np.max(np.abs(a - b))) <= 1e-14:
        return 0.0
    forward = _qsl_direction(traj, a, b, floor, epsilon, method)
    backward = _qsl_direction(traj, b, a, floor, epsilon, method)
    candidates = [t for t in (forward, backward) if t is not None]
    return max(candidates) if candidates else math.inf


def min_time_mu(
    channel: ChannelSpec,
    oracle: FreeStateOracle,
    initial_family: Iterable[DensityMatrix],
    mu: float,
    tau_max: float,
    grid_sizes: Sequence[int] = (2000,),
    floor: float = DEFAULT_FLOOR,
    method: str = "trapezoid",
):
    """Minimal time for the resource to change by mu, over a family of starts.

    For each family member and each grid size, the trajectory over
    [0, tau_max] is scanned for the earliest grid time where
    |M(rho_t) - M(rho_0) - mu| <= 1e-3; bound_TM evaluated on that
    initial segment is a candidate. Returns the smallest candidate and
    its (initial, final) witness pair, or (inf, None) when no trajectory
    reaches the target change.
    """
    family = list(initial_family)
    if not family:
        raise ValueError("initial_family must not be empty")
    if mu == 0:
        raise ValueError("mu must be nonzero (use 0 time for no change)")
    if not tau_max > 0:
        raise ValueError(f"tau_max must be positive, got {tau_max}")
    best = math.inf
    witnesses = None
    for rho0 in family:
        for size in grid_sizes:
            traj = make_trajectory(channel, rho0, tau_max, points=int(size))
            measures = np.empty(traj.points)
            for i in range(traj.points):
                state = DensityMatrix(traj.states[i], local_dims=rho0.local_dims)
                measures[i] = relative_entropy(state, oracle.closest_free(state), floor)
            hits = np.nonzero(np.abs(measures - measures[0] - mu) <= MU_TOLERANCE)[0]
            hits = hits[hits >= 1]
            if hits.size == 0:
                continue
            idx = int(hits[0])
            candidate = bound_TM(traj.truncated(idx), oracle, floor, method)
            if candidate < best:
                best = candidate
                witnesses = (rho0, DensityMatrix(traj.states[idx], local_dims=rho0.local_dims))
    return best, witnesses


@dataclass(frozen=True)
class BoundReport:
    """All bounds for one trajectory, in the shape the CLI tables use."""

    tau: float
    dM: float
    dS: float
    T_M: float
    T_tilde: float
    T_qsl: float
    T_g: float | None
    T_d: float | None
    x_M: float
    x_tilde: float
    epsilon: float
    grid_points: int


def evaluate_bounds(
    traj: Trajectory,
    oracle: FreeStateOracle,
    epsilon: float = DEFAULT_EPSILON,
    floor: float = DEFAULT_FLOOR,
    degradation: bool = True,
    generation: bool = False,
    method: str = "trapezoid",
) -> BoundReport:
    """Evaluate the full bound family on one trajectory.

    The degradation bound uses the final state as its free state (the
    trajectory degrades whatever distinguishes rho_0 from rho_tau); the
    generation bound, when requested, uses the initial state, so the
    start-at-sigma precondition holds by construction. x_M and x_tilde
    record which endpoint anchored the T_M and T_tilde references.
    """
    t_m, x_m, dM = _tm_detail(traj, oracle, floor, method)
    t_tilde, x_tilde, eps_used = _ttilde_detail(traj, oracle, epsilon, floor, method)
    rho0, rho_tau = _wrap(traj.initial), _wrap(traj.final)
    dS = von_neumann_entropy(rho_tau) - von_neumann_entropy(rho0)
    t_qsl = bound_qsl(traj, floor, epsilon, method)
    t_d = bound_Td(traj, rho_tau, floor, method) if degradation else None
    t_g = bound_Tg(traj, rho0, floor, method) if generation else None
    return BoundReport(
        tau=traj.tau,
        dM=dM,
        dS=dS,
        T_M=t_m,
        T_tilde=t_tilde,
        T_qsl=t_qsl,
        T_g=t_g,
        T_d=t_d,
        x_M=x_m,
        x_tilde=x_tilde,
        epsilon=eps_used,
        grid_points=traj.points,
    )
