import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import gamma_ts, n_bins, qubit_states
from spontaneous_qrng import oracle as O
from spontaneous_qrng import schemes as S
from spontaneous_qrng.errors import InconsistentModel
from spontaneous_qrng.numerics import von_neumann_entropy
from spontaneous_qrng.states import QubitDensity, to_matrix

LN2 = math.log(2)


def test_post_measurement_probabilities_by_hand():
    branches = O.build_post_measurement(QubitDensity(0.5, 0.5), S.single_photon_model(S.SinglePhoton(LN2)))
    assert [p for p, _ in branches] == pytest.approx([0.75, 0.25], abs=1e-15)
    _, tau1 = branches[1]
    expected = np.zeros((4, 4))
    expected[1, 1] = 1.0  # |g><g| (x) |1><1|
    assert np.allclose(tau1.matrix, expected, atol=1e-15)
    assert tau1.dims == (2, 2)


def test_post_measurement_no_decay():
    rho = QubitDensity(0.4, 0.6, 0.3j)
    branches = O.build_post_measurement(rho, S.single_photon_model(S.SinglePhoton(0.0)))
    assert len(branches) == 1
    prob, tau = branches[0]
    assert prob == pytest.approx(1.0)
    flag = np.diag([1.0, 0.0])
    assert np.allclose(tau.matrix, np.kron(to_matrix(rho), flag), atol=1e-15)


@given(qubit_states(), gamma_ts, n_bins)
def test_post_measurement_probabilities_sum_to_one(rho, gamma_t, n):
    branches = O.build_post_measurement(rho, S.temporal_model(S.Temporal(gamma_t, n)))
    assert sum(p for p, _ in branches) == pytest.approx(1.0, abs=1e-12)
    for _, tau in branches:
        assert np.trace(tau.matrix).real == pytest.approx(1.0, abs=1e-12)


def test_inconsistent_model_rejected():
    good = S.single_photon_model(S.SinglePhoton(1.0))
    bad = S.MeasurementModel(good.povm, (good.kraus[0], 2 * good.kraus[1]))
    with pytest.raises(InconsistentModel):
        O.build_post_measurement(QubitDensity(0.5, 0.5), bad)
    incomplete = S.MeasurementModel(good.povm[:1], good.kraus[:1])
    with pytest.raises(InconsistentModel):
        O.oracle_randomness(QubitDensity(0.5, 0.5), incomplete)


def test_oracle_pure_state_no_decay_is_zero():
    rho = QubitDensity.pure(0.6, 0.8)
    assert O.oracle_randomness(rho, S.single_photon_model(S.SinglePhoton(0.0))) == pytest.approx(0, abs=1e-12)


@given(qubit_states(), gamma_ts)
def test_oracle_matches_single_photon(rho, gamma_t):
    params = S.SinglePhoton(gamma_t)
    assert O.oracle_randomness(rho, S.single_photon_model(params)) == pytest.approx(
        S.single_photon_exact(rho, params).exact_bits, abs=1e-10
    )


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_oracle_matches_temporal(n, rng):
    for _ in range(30):
        rho11 = rng.random()
        c = math.sqrt(rho11 * (1 - rho11)) * rng.random()
        rho = QubitDensity(1 - rho11, rho11, c * np.exp(1j * rng.uniform(0, 2 * np.pi)))
        params = S.Temporal(rng.exponential(2.0), n)
        assert O.oracle_randomness(rho, S.temporal_model(params)) == pytest.approx(
            S.temporal_exact(rho, params).exact_bits, abs=1e-9
        )


@given(qubit_states(), gamma_ts, st.integers(1, 3))
def test_compact_ancilla_equals_qubit_register(rho, gamma_t, n):
    model = S.temporal_model(S.Temporal(gamma_t, n))
    compact = O.oracle_randomness(rho, model)
    full = O.oracle_randomness(rho, model, 2**n, O.qubit_register_flags(n))
    assert full == pytest.approx(compact, abs=1e-10)


def test_qubit_register_flags():
    assert O.qubit_register_flags(3) == [0, 4, 2, 1]


@given(qubit_states(), gamma_ts, n_bins)
def test_dephased_state_is_block_orthogonal(rho, gamma_t, n):
    joint = O.dephased_joint_state(rho, S.temporal_model(S.Temporal(gamma_t, n)))
    m = joint.matrix.reshape(2, n + 1, 2, n + 1)
    for i in range(n + 1):
        for j in range(n + 1):
            if i != j:
                assert np.all(m[:, i, :, j] == 0)


@given(qubit_states(), gamma_ts, n_bins)
def test_dephasing_never_lowers_entropy(rho, gamma_t, n):
    joint = O.dephased_joint_state(rho, S.temporal_model(S.Temporal(gamma_t, n)))
    assert von_neumann_entropy(joint.matrix) >= von_neumann_entropy(to_matrix(rho)) - 1e-10


@given(qubit_states(), gamma_ts)
def test_adversary_i_check_is_zero(rho, gamma_t):
    params = S.SinglePhoton(gamma_t)
    rho_r = O.adversary_i_field_state(rho, params)
    assert rho_r[0, 1] == 0 and rho_r[1, 0] == 0
    q = -math.expm1(-gamma_t)
    assert rho_r[1, 1].real == pytest.approx(rho.rho11 * q, abs=1e-12)
    assert O.adversary_i_check(rho, params) == 0.0


def test_adversary_i_ground_state_field_is_vacuum():
    rho_r = O.adversary_i_field_state(QubitDensity(1, 0), S.SinglePhoton(2.0))
    assert np.array_equal(rho_r, np.diag([1.0, 0.0]))
