"""Free-state oracles and the separable search."""

import math

import numpy as np
import pytest

from rslsim.qcore import DensityMatrix, UnsupportedStateError, dephase, relative_entropy, tensor
from rslsim.resources import (
    FixedStateOracle,
    GibbsOracle,
    IncoherentOracle,
    SearchConfig,
    WernerSeparableOracle,
    separable_search,
)
from rslsim.states import (
    basis_state,
    bell_phi_plus,
    gibbs_state,
    maximally_mixed,
    plus_y,
    random_density_matrix,
    werner,
)


def _coherence_measure(p):
    # relative entropy of coherence of werner(p): S(diag) - S(rho) with the
    # eigenvalues (1 - 3p/4, p/4 x3) and diagonal ((2-p)/4, p/4, p/4, (2-p)/4)
    def h(ws):
        return -sum(w * math.log(w) for w in ws if w > 0)

    return h([(2 - p) / 4, p / 4, p / 4, (2 - p) / 4]) - h([1 - 3 * p / 4, p / 4, p / 4, p / 4])


def _isotropic_ree(p):
    # closed-form relative entropy of entanglement for Bell fidelity
    # F = 1 - 3p/4 > 1/2, obtained by twirling the closest separable state
    f = 1 - 3 * p / 4
    return f * math.log(2 * f) + (1 - f) * math.log(2 * (1 - f))


def test_incoherent_oracle_dephases():
    rho = werner(0.5)
    sigma = IncoherentOracle().closest_free(rho)
    assert np.allclose(sigma.entries, np.diag(np.diag(rho.entries)))
    assert IncoherentOracle().resource_measure(rho) == pytest.approx(_coherence_measure(0.5), abs=1e-12)


def test_incoherent_oracle_is_minimal_over_diagonal_states():
    oracle = IncoherentOracle()
    rng = np.random.default_rng(5)
    for _ in range(20):
        rho = random_density_matrix(4, rng)
        own = oracle.resource_measure(rho)
        other = DensityMatrix(np.diag(rng.dirichlet(np.ones(4))))
        assert relative_entropy(rho, other) >= own - 1e-9


def test_werner_separable_oracle_on_family():
    oracle = WernerSeparableOracle()
    for p in (0.2, 0.5, 0.9):
        rho = werner(p)
        sigma = oracle.closest_free(rho)
        assert np.allclose(sigma.entries, dephase(rho).entries)
        assert oracle.resource_measure(rho) == pytest.approx(_coherence_measure(p), abs=1e-12)


def test_werner_separable_oracle_rejects_other_states():
    oracle = WernerSeparableOracle()
    stray = tensor(plus_y(), basis_state(2, 0))  # coherence off the (0,3) slot
    with pytest.raises(UnsupportedStateError, match="separable_search"):
        oracle.closest_free(stray)
    with pytest.raises(UnsupportedStateError):
        oracle.closest_free(maximally_mixed(2))


def test_gibbs_oracle():
    oracle = GibbsOracle(4.0, 0.2)
    sigma = oracle.closest_free(maximally_mixed(2))
    assert np.allclose(sigma.entries, gibbs_state(4.0, 0.2).entries)
    assert oracle.resource_measure(gibbs_state(4.0, 0.2)) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(UnsupportedStateError):
        oracle.closest_free(werner(0.5))


def test_fixed_state_oracle():
    oracle = FixedStateOracle(maximally_mixed(4))
    assert oracle.resource_measure(bell_phi_plus()) == pytest.approx(math.log(4), abs=1e-12)
    with pytest.raises(UnsupportedStateError):
        oracle.closest_free(maximally_mixed(2))


def test_search_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(restarts=0)
    with pytest.raises(ValueError):
        SearchConfig(mixture_size=8)
    with pytest.raises(ValueError):
        SearchConfig(tolerance=0.0)
    with pytest.raises(ValueError):
        SearchConfig(tolerance=0.1)


def test_separable_search_bell():
    result = separable_search(bell_phi_plus(), SearchConfig(restarts=1, iterations=40))
    # the relative entropy of entanglement of a Bell state is ln 2; the
    # search reports a certified upper bound, so it can only sit above it
    assert result.value >= math.log(2) - 1e-9
    assert result.value == pytest.approx(math.log(2), abs=1e-3)
    assert result.sigma.local_dims == (2, 2)


def test_separable_search_improves_on_dephasing():
    for p in (0.3, 0.6):
        result = separable_search(werner(p), SearchConfig(restarts=1, iterations=120))
        assert result.value <= _coherence_measure(p) + 1e-6
        assert result.value <= _coherence_measure(p) - 1e-3
        assert result.value >= _isotropic_ree(p) - 1e-9


def test_separable_search_needs_two_qubits():
    with pytest.raises(UnsupportedStateError):
        separable_search(maximally_mixed(4))
    with pytest.raises(UnsupportedStateError):
        separable_search(maximally_mixed(2))
