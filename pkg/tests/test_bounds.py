"""Speed-limit bounds: tightness spot checks, sentinels and frozen values."""

import math

import numpy as np
import pytest
from scipy.optimize import brentq

from rslsim.bounds import (
    bound_qsl,
    bound_Td,
    bound_Tg,
    bound_TM,
    bound_Ttilde,
    evaluate_bounds,
    min_time_mu,
    time_average,
)
from rslsim.dynamics import (
    DEPHASING,
    DEPHASING_NM,
    DEPOLARISING,
    THERMAL,
    ChannelSpec,
    Trajectory,
    make_trajectory,
    unitary_trajectory,
)
from rslsim.qcore import DensityMatrix, dephase
from rslsim.resources import IncoherentOracle, WernerSeparableOracle
from rslsim.states import (
    SIGMA_X,
    SIGMA_Z,
    basis_state,
    bell_phi_plus,
    gibbs_state,
    maximally_mixed,
    random_density_matrix,
    werner,
)


def _slack(tau):
    return tau * (1 + 1e-6) + 1e-8


def _binary_entropy(x):
    return -x * math.log(x) - (1 - x) * math.log(1 - x)


def _coherence_measure(p):
    def h(ws):
        return -sum(w * math.log(w) for w in ws if w > 0)

    return h([(2 - p) / 4, p / 4, p / 4, (2 - p) / 4]) - h([1 - 3 * p / 4, p / 4, p / 4, p / 4])


def _reversed(traj):
    return Trajectory(
        channel=traj.channel,
        tau=traj.tau,
        grid=traj.grid,
        states=traj.states[::-1].copy(),
        derivs=-traj.derivs[::-1].copy(),
    )


def test_time_average_values():
    grid = np.linspace(0.0, 2 * math.pi / 3, 1001)
    samples = np.sin(3 * grid) ** 2
    assert time_average(samples, 2 * math.pi / 3) == pytest.approx(0.5, abs=1e-6)
    assert time_average(np.full(11, 2.0), 1.0) == pytest.approx(2.0, abs=1e-15)
    # the average runs over |f|, so a negative constant still gives 1
    assert time_average(np.full(11, -1.0), 1.0) == pytest.approx(1.0, abs=1e-15)
    assert time_average(samples, 2 * math.pi / 3, method="simpson") == pytest.approx(0.5, abs=1e-9)


def test_time_average_validation():
    with pytest.raises(ValueError):
        time_average(np.array([1.0]), 1.0)
    with pytest.raises(ValueError):
        time_average(np.ones(5), 0.0)
    with pytest.raises(ValueError):
        time_average(np.ones(5), 1.0, method="midpoint")


def test_dephasing_report_is_tight():
    channel = ChannelSpec(variant=DEPHASING, gamma=1.0)
    traj = make_trajectory(channel, werner(0.5), 1.0, points=2000)
    rep = evaluate_bounds(traj, IncoherentOracle())
    assert abs(rep.T_M - 1.0) <= 1e-3
    assert abs(rep.T_tilde - 1.0) <= 1e-3
    assert abs(rep.T_qsl - 1.0) <= 1e-3
    assert rep.T_d is not None and rep.T_d <= _slack(1.0)
    assert rep.T_g is None
    # coherence decay keeps the diagonal fixed, so dM = -dS exactly
    assert abs(rep.dM + rep.dS) < 1e-12
    assert rep.dM < 0
    assert rep.x_M == pytest.approx(1.0)  # resource loss anchors at tau
    assert rep.epsilon == pytest.approx(1e-6)  # degenerate denominator path
    assert rep.grid_points == 2001


def test_depolarising_hierarchy():
    channel = ChannelSpec(variant=DEPOLARISING, gamma=1.0)
    traj = make_trajectory(channel, werner(0.9), 1.0, points=2000)
    rep = evaluate_bounds(traj, WernerSeparableOracle())
    assert rep.T_tilde < rep.T_M < rep.T_qsl <= _slack(1.0)
    assert abs(rep.T_qsl - 1.0) <= 1e-3
    assert rep.epsilon == 0.0  # denominator is healthy here


def test_unitary_dynamics_makes_both_resource_bounds_agree():
    ham = np.kron(SIGMA_Z, np.eye(2)) + 0.7 * np.kron(SIGMA_X, SIGMA_X)
    rho0 = random_density_matrix(4, np.random.default_rng(2), local_dims=(2, 2))
    traj = unitary_trajectory(ham, rho0, 1.0, points=2000)
    t_m = bound_TM(traj, IncoherentOracle())
    t_t = bound_Ttilde(traj, IncoherentOracle())
    assert abs(t_m - t_t) <= 1e-9
    assert t_m <= _slack(1.0)


def test_constant_trajectory_gives_zero_bounds():
    channel = ChannelSpec(variant=DEPHASING, gamma=1.0)
    frozen = dephase(werner(0.5))
    traj = make_trajectory(channel, frozen, 1.0, points=200)
    assert bound_TM(traj, IncoherentOracle()) == 0.0
    assert bound_qsl(traj) == 0.0
    assert bound_Tg(traj, frozen) == 0.0
    assert bound_Td(traj, frozen) == 0.0


def test_generation_bound_checks_the_start():
    channel = ChannelSpec(variant=DEPHASING, gamma=1.0)
    traj = make_trajectory(channel, werner(0.5), 1.0, points=200)
    with pytest.raises(ValueError, match="start"):
        bound_Tg(traj, maximally_mixed(4))


def test_generation_bound_under_unitary_entangling():
    tau = math.pi / 4
    start = basis_state(4, 0, local_dims=(2, 2))
    traj = unitary_trajectory(np.kron(SIGMA_X, SIGMA_X), start, tau, points=2000)
    t_g = bound_Tg(traj, start)
    assert t_g <= _slack(tau)
    assert t_g == pytest.approx(tau, abs=1e-4)


def test_generation_bound_on_reversed_decay():
    channel = ChannelSpec(variant=DEPHASING, gamma=1.0)
    forward = make_trajectory(channel, werner(0.5), 2.0, points=2000)
    backward = _reversed(forward)
    t_g = bound_Tg(backward, DensityMatrix(forward.final, local_dims=(2, 2)))
    assert 1.5 <= t_g <= _slack(2.0)


def test_degradation_bound_support_sentinel():
    channel = ChannelSpec(variant=DEPHASING, gamma=1.0)
    traj = make_trajectory(channel, werner(0.5), 1.0, points=200)
    assert bound_Td(traj, bell_phi_plus()) == math.inf


def test_degradation_bound_towards_gibbs():
    channel = ChannelSpec(variant=THERMAL, gamma=2.0, omega=4.0, beta=0.2)
    rho0 = DensityMatrix(np.diag([0.9, 0.1]))
    traj = make_trajectory(channel, rho0, 2.5, points=20000, substeps=1)
    t_d = bound_Td(traj, gibbs_state(4.0, 0.2))
    assert 0.95 * 2.5 <= t_d <= _slack(2.5)


def test_qsl_excludes_uninformative_direction():
    # werner(0) decays from a pure Bell state; reversing the path makes the
    # final state pure, so only one relative entropy stays finite
    channel = ChannelSpec(variant=DEPHASING, gamma=1.0)
    backward = _reversed(make_trajectory(channel, werner(0.0), 1.5, points=1500))
    t_qsl = bound_qsl(backward)
    assert math.isfinite(t_qsl)
    assert t_qsl <= _slack(1.5)


def test_qsl_sentinel_when_no_direction_is_informative():
    # two distinct pure states violate support in both directions
    tau = math.pi / 4
    start = basis_state(4, 0, local_dims=(2, 2))
    traj = unitary_trajectory(np.kron(SIGMA_X, SIGMA_X), start, tau, points=500)
    assert bound_qsl(traj) == math.inf


def test_reference_perturbation_is_stable():
    channel = ChannelSpec(variant=DEPHASING_NM, gamma=0.2, k=4.0)
    traj = make_trajectory(channel, werner(0.5), 2.0, points=4000)
    oracle = IncoherentOracle()
    t1 = bound_Ttilde(traj, oracle, epsilon=1e-6)
    t2 = bound_Ttilde(traj, oracle, epsilon=5e-7)
    assert abs(t1 - t2) <= 1e-4 * 2.0
    # with the perturbation disabled, numerator and denominator collapse
    # together under dephasing and the bound degenerates to the vacuous 0
    assert bound_Ttilde(traj, oracle, epsilon=0.0) == 0.0
    assert 0.5 <= t1 <= _slack(2.0)
    with pytest.raises(ValueError):
        bound_Ttilde(traj, oracle, epsilon=2e-3)


def test_quadrature_method_consistency():
    channel = ChannelSpec(variant=DEPOLARISING, gamma=1.0)
    traj = make_trajectory(channel, werner(0.9), 1.0, points=2000)
    trap = bound_TM(traj, WernerSeparableOracle())
    simp = bound_TM(traj, WernerSeparableOracle(), method="simpson")
    assert abs(trap - simp) <= 1e-6
    with pytest.raises(ValueError):
        bound_TM(traj, WernerSeparableOracle(), method="midpoint")


def test_min_time_mu_finds_the_fastest_family_member():
    channel = ChannelSpec(variant=DEPHASING, gamma=1.0)
    family = [werner(0.0), werner(0.25), werner(0.5)]
    t_mu, witnesses = min_time_mu(channel, IncoherentOracle(), family, mu=-0.1, tau_max=0.2)
    # for werner(0) the resource is ln2 - h((1 + e^{-t})/2), so the target
    # loss of 0.1 is first reached at the root below
    t_star = brentq(lambda t: _binary_entropy((1 + math.exp(-t)) / 2) - 0.1, 1e-3, 0.2)
    assert abs(t_mu - t_star) <= 1.5e-3
    assert t_mu <= t_star + 1e-3
    assert witnesses is not None
    assert np.allclose(witnesses[0].entries, werner(0.0).entries)
    assert np.trace(witnesses[1].entries).real == pytest.approx(1.0, abs=1e-12)


def test_min_time_mu_sentinel_cases():
    channel = ChannelSpec(variant=DEPHASING, gamma=1.0)
    oracle = IncoherentOracle()
    # full depletion of werner(0.5) is never matched within tolerance on
    # [0, 2]: the resource still holds ~3e-3 nats at tau_max
    depletion = -_coherence_measure(0.5)
    t_mu, witnesses = min_time_mu(channel, oracle, [werner(0.5)], depletion, 2.0, grid_sizes=(1000,))
    assert t_mu == math.inf and witnesses is None
    # dephasing cannot grow the resource
    t_mu, witnesses = min_time_mu(channel, oracle, [werner(0.0)], 0.1, 1.0, grid_sizes=(1000,))
    assert t_mu == math.inf and witnesses is None


def test_min_time_mu_validation():
    channel = ChannelSpec(variant=DEPHASING, gamma=1.0)
    with pytest.raises(ValueError):
        min_time_mu(channel, IncoherentOracle(), [], -0.1, 1.0)
    with pytest.raises(ValueError):
        min_time_mu(channel, IncoherentOracle(), [werner(0.0)], 0.0, 1.0)
    with pytest.raises(ValueError):
        min_time_mu(channel, IncoherentOracle(), [werner(0.0)], -0.1, 0.0)
