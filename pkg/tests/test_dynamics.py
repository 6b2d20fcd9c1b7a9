"""Channel models, trajectory generation and entropy rates."""

import math

import numpy as np
import pytest

from rslsim.dynamics import (
    DEPHASING,
    DEPHASING_NM,
    DEPOLARISING,
    THERMAL,
    ChannelSpec,
    decay_exponent,
    decay_rate,
    entropy_rate,
    entropy_rate_series,
    integrate_lindblad,
    liouvillian_at,
    make_trajectory,
    state_at,
    thermal_generator,
    unitary_trajectory,
)
from rslsim.qcore import DensityMatrix, HermitianOperator, InvalidStateError, von_neumann_entropy
from rslsim.states import SIGMA_X, basis_state, gibbs_state, plus_y, werner


def _thermal_channel(gamma=2.0, omega=4.0, beta=0.2, as_written=False):
    return ChannelSpec(variant=THERMAL, gamma=gamma, omega=omega, beta=beta, as_written=as_written)


def test_channel_spec_validation():
    with pytest.raises(ValueError):
        ChannelSpec(variant="bogus", gamma=1.0)
    with pytest.raises(ValueError):
        ChannelSpec(variant=DEPHASING, gamma=-1.0)
    with pytest.raises(ValueError):
        ChannelSpec(variant=DEPHASING_NM, gamma=1.0)  # missing k
    with pytest.raises(ValueError, match="k > gamma"):
        ChannelSpec(variant=DEPHASING_NM, gamma=1.0, k=0.5)
    with pytest.raises(ValueError):
        ChannelSpec(variant=DEPHASING, gamma=1.0, k=4.0)  # k not accepted here
    with pytest.raises(ValueError):
        ChannelSpec(variant=THERMAL, gamma=1.0)  # missing omega/beta
    with pytest.raises(ValueError):
        ChannelSpec(variant=DEPOLARISING, gamma=1.0, omega=2.0, beta=1.0)


def test_decay_exponent_and_rate():
    plain = ChannelSpec(variant=DEPHASING, gamma=0.7)
    assert decay_exponent(plain, 2.0) == pytest.approx(1.4, abs=1e-15)
    assert decay_rate(plain, 5.0) == pytest.approx(0.7, abs=1e-15)

    mod = ChannelSpec(variant=DEPHASING_NM, gamma=0.2, k=4.0)
    assert decay_exponent(mod, 2.0) == pytest.approx(0.4 + 1.0 - math.cos(8.0), abs=1e-14)
    assert decay_rate(mod, 1.0) == pytest.approx(0.2 + 4.0 * math.sin(4.0), abs=1e-14)
    # k > gamma guarantees recoherence windows where the rate is negative
    ts = np.linspace(0.0, 4.0, 2001)
    assert decay_rate(mod, ts).min() < 0
    assert decay_exponent(mod, ts).min() >= 0


def test_state_at_dephasing_closed_form():
    channel = ChannelSpec(variant=DEPHASING, gamma=1.0)
    rho = state_at(channel, werner(0.3), 0.7)
    assert rho.entries[0, 3] == pytest.approx(0.35 * math.exp(-0.7), abs=1e-14)
    assert rho.entries[0, 0] == pytest.approx(werner(0.3).entries[0, 0], abs=1e-14)


def test_state_at_depolarising_closed_form():
    channel = ChannelSpec(variant=DEPOLARISING, gamma=1.0)
    rho = state_at(channel, werner(0.3), 0.7)
    nu = math.exp(-0.7)
    assert rho.entries[0, 0] == pytest.approx(0.25 + nu * (0.425 - 0.25), abs=1e-14)
    assert rho.entries[0, 3] == pytest.approx(nu * 0.35, abs=1e-14)


def test_state_at_rejects_negative_time():
    with pytest.raises(ValueError):
        state_at(ChannelSpec(variant=DEPHASING, gamma=1.0), werner(0.3), -0.1)


def _thermal_expectations(t, gamma=2.0, omega=4.0, beta=0.2):
    # With H = omega*sigma_z and detailed-balance rates, the excited
    # population relaxes at gamma*(2N+1) towards 1/(exp(2 beta omega) + 1)
    # and the coherence decays at half that rate with phase -2 omega t.
    nbar = 1.0 / math.expm1(2 * beta * omega)
    rate = gamma * (2 * nbar + 1)
    p_inf = 1.0 / (math.exp(2 * beta * omega) + 1.0)
    p = p_inf + (0.5 - p_inf) * math.exp(-rate * t)
    c = -0.5j * math.exp(-rate * t / 2) * np.exp(-2j * omega * t)
    return p, c


def test_thermal_occupation_value():
    assert 1.0 / math.expm1(1.6) == pytest.approx(0.2529703, abs=1e-7)


def test_state_at_thermal_matches_closed_form():
    channel = _thermal_channel()
    rho = state_at(channel, plus_y(), 0.3).entries
    p, c = _thermal_expectations(0.3)
    assert rho[0, 0] == pytest.approx(p, abs=1e-10)
    assert rho[0, 1] == pytest.approx(c, abs=1e-10)


def test_integrate_lindblad_matches_closed_form():
    channel = _thermal_channel()
    traj = integrate_lindblad(channel, plus_y(), 0.4, steps=8000, keep_every=40)
    assert traj.points == 201
    p, c = _thermal_expectations(0.4)
    assert traj.final[0, 0] == pytest.approx(p, abs=1e-10)
    assert traj.final[0, 1] == pytest.approx(c, abs=1e-10)
    drift = np.abs(np.einsum("nii->n", traj.states) - 1.0).max()
    assert drift < 1e-12


def test_integrate_lindblad_validation():
    channel = _thermal_channel()
    with pytest.raises(ValueError):
        integrate_lindblad(channel, plus_y(), 1.0, steps=50)
    with pytest.raises(ValueError):
        integrate_lindblad(channel, plus_y(), 1.0, steps=100, keep_every=7)
    with pytest.raises(ValueError):
        integrate_lindblad(channel, plus_y(), -1.0, steps=100)
    with pytest.raises(InvalidStateError):
        integrate_lindblad(channel, werner(0.5), 1.0, steps=100)


def test_thermal_generator_fixed_point():
    gen, gibbs = thermal_generator(_thermal_channel())
    residual = np.abs(gen @ gibbs.entries.reshape(-1)).max()
    assert residual < 1e-12
    # the as-written exponent variant equilibrates somewhere else
    gen_aw, _ = thermal_generator(_thermal_channel(as_written=True))
    residual_aw = np.abs(gen_aw @ gibbs.entries.reshape(-1)).max()
    assert residual_aw > 1e-3


def test_make_trajectory_grid_and_exact_start():
    channel = ChannelSpec(variant=DEPHASING, gamma=1.0)
    rho0 = werner(0.5)
    traj = make_trajectory(channel, rho0, 2.0, points=400)
    assert traj.points == 401
    assert traj.grid[0] == 0.0 and traj.grid[-1] == 2.0
    assert np.array_equal(traj.initial, rho0.entries)
    # derivatives are traceless along the whole path
    assert np.abs(np.einsum("nii->n", traj.derivs)).max() < 1e-14
    with pytest.raises(ValueError):
        make_trajectory(channel, rho0, 0.0)
    with pytest.raises(ValueError):
        make_trajectory(channel, rho0, 1.0, points=1)


def test_truncated_trajectory():
    channel = ChannelSpec(variant=DEPOLARISING, gamma=1.0)
    traj = make_trajectory(channel, werner(0.9), 1.0, points=100)
    cut = traj.truncated(40)
    assert cut.points == 41
    assert cut.tau == pytest.approx(0.4, abs=1e-15)
    assert np.array_equal(cut.states, traj.states[:41])
    with pytest.raises(IndexError):
        traj.truncated(0)
    with pytest.raises(IndexError):
        traj.truncated(101)


def test_liouvillian_matches_finite_differences():
    h = 1e-6
    cases = [
        (ChannelSpec(variant=DEPHASING_NM, gamma=0.2, k=4.0), werner(0.5), 1.3),
        (ChannelSpec(variant=DEPOLARISING, gamma=1.0), werner(0.9), 0.6),
        (_thermal_channel(), plus_y(), 0.5),
    ]
    for channel, rho0, t in cases:
        lhs = liouvillian_at(channel, rho0, t).entries
        fd = (state_at(channel, rho0, t + h).entries - state_at(channel, rho0, t - h).entries) / (2 * h)
        assert np.abs(lhs - fd).max() < 1e-5


def test_unitary_trajectory_preserves_spectrum():
    ham = np.kron(SIGMA_X, SIGMA_X)
    traj = unitary_trajectory(ham, werner(0.3), 1.0, points=200)
    ent0 = von_neumann_entropy(DensityMatrix(traj.initial, local_dims=(2, 2)))
    for idx in (50, 125, 200):
        ent = von_neumann_entropy(DensityMatrix(traj.states[idx], local_dims=(2, 2)))
        assert ent == pytest.approx(ent0, abs=1e-12)


def test_entropy_rate_consistency():
    channel = ChannelSpec(variant=DEPHASING, gamma=1.0)
    traj = make_trajectory(channel, werner(0.5), 1.0, points=200)
    series = entropy_rate_series(traj)
    idx = 77
    point = entropy_rate(
        DensityMatrix(traj.states[idx], local_dims=(2, 2)),
        liouvillian_at(channel, werner(0.5), float(traj.grid[idx])),
    )
    assert point == pytest.approx(series[idx], abs=1e-12)
    # and both agree with a finite difference of the entropy itself
    h = 1e-5
    t = float(traj.grid[idx])
    fd = (
        von_neumann_entropy(state_at(channel, werner(0.5), t + h))
        - von_neumann_entropy(state_at(channel, werner(0.5), t - h))
    ) / (2 * h)
    assert point == pytest.approx(fd, abs=1e-7)


def test_entropy_rate_rejects_traced_operator():
    bad = HermitianOperator(np.diag([0.1, 0.2]))
    with pytest.raises(InvalidStateError):
        entropy_rate(basis_state(2, 0), bad)
