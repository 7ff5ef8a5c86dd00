import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import gamma_ts, n_bins, qubit_states
from spontaneous_qrng import schemes as S
from spontaneous_qrng.errors import DegenerateBin, InvalidParams, MissingState
from spontaneous_qrng.numerics import binary_entropy
from spontaneous_qrng.oracle import oracle_randomness
from spontaneous_qrng.states import QubitDensity, to_matrix

LN2 = math.log(2)


def test_single_photon_model_limits():
    m = S.single_photon_model(S.SinglePhoton(0.0))
    assert np.array_equal(m.povm[0], np.eye(2))
    assert np.array_equal(m.povm[1], np.zeros((2, 2)))
    m = S.single_photon_model(S.SinglePhoton(math.inf))
    assert np.array_equal(m.povm[1], np.diag([0, 1]))
    m = S.single_photon_model(S.SinglePhoton(LN2))
    assert m.povm[0] == pytest.approx(np.diag([1, 0.5]), abs=1e-15)
    assert m.kraus[1] == pytest.approx(np.array([[0, math.sqrt(0.5)], [0, 0]]), abs=1e-15)


def test_temporal_model_n1_reduces_to_single_photon():
    for g in (0.0, 0.3, LN2, 4.0):
        a = S.temporal_model(S.Temporal(g, 1))
        b = S.single_photon_model(S.SinglePhoton(g))
        for x, y in zip(a.povm + a.kraus, b.povm + b.kraus):
            assert np.array_equal(x, y)


def test_temporal_model_second_bin():
    p = 1 - 2**-0.5
    assert S.Temporal(LN2, 2).bin_prob == pytest.approx(p, abs=1e-15)
    assert p == pytest.approx(0.292893, abs=1e-6)
    e2 = S.temporal_model(S.Temporal(LN2, 2)).povm[2]
    assert e2 == pytest.approx(np.diag([0, p * (1 - p)]), abs=1e-15)


@given(gamma_ts, st.integers(1, 64))
def test_models_complete_and_kraus_consistent(gamma_t, n):
    for model in (S.temporal_model(S.Temporal(gamma_t, n)), S.single_photon_model(S.SinglePhoton(gamma_t))):
        assert model.completeness_error() <= 1e-12
        assert model.kraus_error() <= 1e-12


@given(qubit_states(), gamma_ts, n_bins)
def test_outcome_probs_match_povm_traces(rho, gamma_t, n):
    params = S.Temporal(gamma_t, n)
    report = S.temporal_exact(rho, params)
    traces = [np.trace(to_matrix(rho) @ e).real for e in S.temporal_model(params).povm]
    assert report.outcome_probs == pytest.approx(traces, abs=1e-12)
    assert sum(report.outcome_probs) == pytest.approx(1, abs=1e-9)
    p = params.bin_prob
    assert report.outcome_probs[0] == pytest.approx(1 - rho.rho11 + (1 - p) ** n * rho.rho11, abs=1e-12)


def test_single_photon_exact_spot_values():
    r = S.single_photon_exact(QubitDensity(0.5, 0.5), S.SinglePhoton(LN2))
    assert r.exact_bits == pytest.approx(0.5, abs=1e-10)
    assert r.outcome_probs == pytest.approx((0.75, 0.25))
    assert r.adversary is S.Adversary.II
    pure = S.single_photon_exact(QubitDensity.pure(1, 1), S.SinglePhoton(LN2))
    # mu1 = 3/4, mu2 = 0, click weight 1/4: h(1/4)
    assert pure.exact_bits == pytest.approx(binary_entropy(0.25), abs=1e-12)
    assert pure.exact_bits == pytest.approx(0.811278, abs=1e-6)
    assert S.single_photon_exact(QubitDensity(1, 0), S.SinglePhoton(2.0)).exact_bits == 0


def test_single_photon_lower_bound():
    assert S.single_photon_lower_bound(0.5, S.SinglePhoton(LN2)) == pytest.approx(0.5, abs=1e-15)
    assert S.single_photon_lower_bound(0.0, S.SinglePhoton(LN2)) == 0
    assert S.single_photon_lower_bound(0.8, S.SinglePhoton(800.0)) == pytest.approx(0, abs=1e-300)


@given(st.floats(0, 1), gamma_ts)
def test_single_lower_bound_equals_exact_without_coherence(rho11, gamma_t):
    params = S.SinglePhoton(gamma_t)
    exact = S.single_photon_exact(QubitDensity(1 - rho11, rho11), params).exact_bits
    assert S.single_photon_lower_bound(rho11, params) == pytest.approx(exact, abs=1e-10)


@given(qubit_states(), gamma_ts, n_bins)
def test_exact_at_least_lower_bound(rho, gamma_t, n):
    for r in (S.single_photon_exact(rho, S.SinglePhoton(gamma_t)), S.temporal_exact(rho, S.Temporal(gamma_t, n))):
        assert r.lower_bound_bits <= r.exact_bits + 1e-9


@given(qubit_states(), gamma_ts)
def test_temporal_n1_is_single_photon(rho, gamma_t):
    a = S.temporal_exact(rho, S.Temporal(gamma_t, 1))
    b = S.single_photon_exact(rho, S.SinglePhoton(gamma_t))
    assert a.exact_bits == pytest.approx(b.exact_bits, abs=1e-12)
    assert a.lower_bound_bits == pytest.approx(b.lower_bound_bits, abs=1e-12)


def test_temporal_exact_against_oracle_spot():
    params = S.Temporal(LN2, 2)
    rho = QubitDensity(0.5, 0.5)
    expected = oracle_randomness(rho, S.temporal_model(params))
    assert S.temporal_exact(rho, params).exact_bits == pytest.approx(expected, abs=1e-12)
    assert S.temporal_exact(QubitDensity(1, 0), params).exact_bits == 0


def test_temporal_lower_bound_spot_value():
    p = 1 - 2**-0.5
    hand = 0.5 * (0.5 / p) * binary_entropy(p)
    value = S.temporal_lower_bound(0.5, S.Temporal(LN2, 2))
    assert value == pytest.approx(hand, abs=1e-14)
    assert value == pytest.approx(S.temporal_lower_bound_series(0.5, S.Temporal(LN2, 2)), abs=1e-12)
    assert value == pytest.approx(0.74475, abs=1e-4)


@given(st.floats(0, 1), st.floats(1e-6, 30.0), st.integers(1, 64))
def test_lower_bound_closed_form_equals_series(rho11, gamma_t, n):
    params = S.Temporal(gamma_t, n)
    assert S.temporal_lower_bound(rho11, params) == pytest.approx(
        S.temporal_lower_bound_series(rho11, params), abs=1e-12
    )


@given(st.floats(0.01, 1), st.floats(0.01, 20.0))
def test_lower_bound_nondecreasing_in_bins(rho11, gamma_t):
    vals = [S.temporal_lower_bound(rho11, S.Temporal(gamma_t, n)) for n in range(1, 65)]
    assert np.all(np.diff(vals) >= -1e-12)


def test_temporal_lower_bound_n1_reduction():
    for r, g in [(0.3, 0.2), (1.0, LN2), (0.7, 5.0)]:
        assert S.temporal_lower_bound(r, S.Temporal(g, 1)) == pytest.approx(
            S.single_photon_lower_bound(r, S.SinglePhoton(g)), abs=1e-14
        )


def test_spatial():
    assert S.spatial_randomness(S.Spatial((0.25,) * 4)).exact_bits == 2.0
    assert S.spatial_randomness(S.Spatial((1.0,))).lower_bound_bits == 0.0
    r = S.spatial_randomness(S.Spatial((0.5, 0.25, 0.25)))
    assert r.exact_bits == r.lower_bound_bits == pytest.approx(1.5)
    with pytest.raises(InvalidParams):
        S.Spatial((0.5, 0.6))


def _phase(x):
    return S.PhaseFluct(a=4 * math.pi * x, P=1.0, tau_c=1.0, A_param=1.0, tau=1.0)


def test_phase_fluct_one_bit():
    assert _phase(0.674489750196).scaled_width == pytest.approx(0.674489750196, rel=1e-15)
    assert S.phase_fluct_randomness(_phase(0.674489750196)).exact_bits == pytest.approx(1.0, abs=1e-9)


def test_phase_fluct_lambda_formula():
    p = S.PhaseFluct(a=2.0, P=0.5, tau_c=3.0, A_param=1.5, tau=4.0)
    assert p.lam == pytest.approx(2.0 / (4 * math.pi * 0.5) * math.sqrt(2.0))
    assert p.scaled_width == pytest.approx(p.lam / 2)


def test_phase_fluct_wide_interval_and_monotonicity():
    assert S.phase_fluct_randomness(_phase(40.0)).exact_bits == 0.0
    a = S.phase_fluct_randomness(_phase(0.8)).exact_bits
    b = S.phase_fluct_randomness(_phase(0.4)).exact_bits
    assert b > a


def test_phase_fluct_degenerate():
    with pytest.raises(DegenerateBin):
        S.phase_fluct_randomness(_phase(1e-310))
    r = S.phase_fluct_randomness(_phase(1e-310), allow_unbounded=True)
    assert r.unbounded
    assert r.to_json()["lower_bound_bits"] is None


def test_phase_fluct_rejects_nonpositive():
    with pytest.raises(InvalidParams):
        S.PhaseFluct(a=0.0, P=1, tau_c=1, A_param=1, tau=1)


@pytest.mark.parametrize("scheme", [S.SinglePhoton(1.3), S.Temporal(1.3, 5)])
def test_dispatch_adversary_i_is_zero(scheme):
    for rho in (None, QubitDensity.pure(1, 1), QubitDensity(0.2, 0.8)):
        r = S.table_i_dispatch(scheme, "I", rho)
        assert r.exact_bits == 0.0 and r.lower_bound_bits == 0.0
        assert "adversary I" in r.notes


def test_dispatch_adversary_ii():
    rho = QubitDensity(0.5, 0.5, 0.2)
    r = S.table_i_dispatch(S.Temporal(1.0, 3), S.Adversary.II, rho)
    assert r == S.temporal_exact(rho, S.Temporal(1.0, 3))
    with pytest.raises(MissingState):
        S.table_i_dispatch(S.SinglePhoton(1.0), "II")


@pytest.mark.parametrize("scheme", [S.Spatial((0.25,) * 4), _phase(0.5), S.Spatial((0.7, 0.3))])
def test_dispatch_adversary_independent(scheme):
    one = S.table_i_dispatch(scheme, "I").to_json()
    two = S.table_i_dispatch(scheme, "II").to_json()
    one.pop("adversary"), two.pop("adversary")
    assert one == two


def test_spatial_uniform_four_both_adversaries():
    assert S.table_i_dispatch(S.Spatial((0.25,) * 4), "I").exact_bits == 2.0
    assert S.table_i_dispatch(S.Spatial((0.25,) * 4), "II").exact_bits == 2.0


def test_prop1_scan_examples():
    assert S.prop1_monotonicity_scan(0.5, S.SinglePhoton(LN2), 256) > 0
    assert S.prop1_monotonicity_scan(0.5, S.Temporal(LN2, 4), 256) > 0
    with pytest.raises(InvalidParams):
        S.prop1_monotonicity_scan(0.5, S.SinglePhoton(1.0), 8)


def test_prop1_endpoint_is_pure_state():
    c = math.sqrt(0.25)
    at_edge = S.single_photon_exact(QubitDensity(0.5, 0.5, c), S.SinglePhoton(LN2)).exact_bits
    pure = S.single_photon_exact(QubitDensity.pure(1, 1), S.SinglePhoton(LN2)).exact_bits
    assert at_edge == pytest.approx(pure, abs=1e-12)


def test_scheme_json_round_trip():
    for p in (S.SinglePhoton(1.0), S.Temporal(2.0, 4), S.Spatial((0.5, 0.5)),
              S.PhaseFluct(1.0, 2.0, 3.0, 4.0, 5.0)):
        assert S.scheme_from_json(p.to_json()) == p
    with pytest.raises(InvalidParams):
        S.scheme_from_json({"scheme": "temporal", "gamma_t": 1.0, "n_bins": 2, "extra": 1})
    with pytest.raises(InvalidParams):
        S.scheme_from_json({"scheme": "nope"})


def test_report_json_null_exact():
    r = S.RandomnessReport("x", S.Adversary.I, None, 0.2, (1.0,))
    assert r.to_json()["exact_bits"] is None
