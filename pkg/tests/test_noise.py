import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dqdqft.circuits import build_qft_circuit
from dqdqft.device import DeviceParams
from dqdqft.lowering import lower
from dqdqft.noise import (
    CSV_HEADER,
    FidelityReport,
    NoiseModel,
    analytic_gate_fidelity,
    gate_average_fidelity,
    gate_process_fidelity,
    monte_carlo_gate_fidelity,
    monte_carlo_qft_fidelity,
    reports_to_csv,
    sample_delta_phi,
    sample_delta_phis,
)


def test_model_validation():
    with pytest.raises(ValueError):
        NoiseModel(-0.1)
    with pytest.raises(ValueError):
        NoiseModel(math.nan)
    with pytest.raises(ValueError):
        NoiseModel(0.1, seed=-1)


def test_zero_sigma_draws_are_zero():
    m = NoiseModel(0.0, 5)
    assert sample_delta_phi(m, 0) == 0.0
    assert not sample_delta_phis(m, 10, 50).any()


def test_draws_are_reproducible_and_order_independent():
    m = NoiseModel(0.2, 1234)
    batch = sample_delta_phis(m, 0, 100)
    singles = [sample_delta_phi(m, i) for i in reversed(range(100))][::-1]
    np.testing.assert_array_equal(batch, singles)
    np.testing.assert_array_equal(sample_delta_phis(m, 40, 10), batch[40:50])
    assert sample_delta_phi(NoiseModel(0.2, 1235), 0) != batch[0]


def test_draw_statistics():
    sigma, count = 0.1, 100_000
    x = sample_delta_phis(NoiseModel(sigma, 42), 0, count)
    assert abs(x.mean()) < 3 * sigma / math.sqrt(count)
    assert x.std(ddof=1) == pytest.approx(sigma, rel=0.02)


def test_draws_look_gaussian():
    from scipy import stats

    x = sample_delta_phis(NoiseModel(1.0, 7), 0, 20_000)
    assert stats.kstest(x, "norm").pvalue > 1e-3


def test_process_fidelity_values():
    assert gate_process_fidelity(0.0) == 1.0
    assert gate_process_fidelity(math.pi) == pytest.approx(0.25, abs=1e-15)
    f = gate_process_fidelity(0.03 * math.pi)
    assert f == pytest.approx(0.998335, abs=1e-6)
    assert f > 0.96
    with pytest.raises(ValueError):
        gate_process_fidelity(math.inf)


def test_process_fidelity_matches_trace_formula():
    rng = np.random.default_rng(3)
    for dphi, theta in rng.uniform(-4, 4, size=(20, 2)):
        ideal = np.diag([1, 1, 1, np.exp(1j * theta)])
        noisy = np.diag([1, 1, 1, np.exp(1j * theta) * np.exp(-1j * dphi)])
        direct = abs(np.trace(ideal.conj().T @ noisy)) ** 2 / 16
        assert gate_process_fidelity(dphi) == pytest.approx(direct, abs=1e-14)


@given(st.floats(-100, 100, allow_nan=False))
def test_process_fidelity_even(x):
    assert gate_process_fidelity(x) == gate_process_fidelity(-x)
    assert 0.25 <= gate_process_fidelity(x) <= 1.0


def test_average_fidelity_relation():
    assert gate_average_fidelity(0.0) == 1.0
    assert gate_average_fidelity(math.pi) == pytest.approx((4 * 0.25 + 1) / 5)


def test_mc_zero_sigma():
    r = monte_carlo_gate_fidelity(NoiseModel(0.0, 1), 100)
    assert r.mean_fidelity == 1.0 and r.std_error == 0.0 and r.trials == 100


def test_mc_single_trial():
    r = monte_carlo_gate_fidelity(NoiseModel(0.1, 1), 1)
    assert r.trials == 1 and r.std_error == 0.0
    with pytest.raises(ValueError):
        monte_carlo_gate_fidelity(NoiseModel(0.1, 1), 0)
    with pytest.raises(ValueError):
        monte_carlo_gate_fidelity(NoiseModel(0.1, 1), 5, metric="diamond")


@pytest.mark.parametrize("sigma", [0.01 * math.pi, 0.03 * math.pi, 0.1 * math.pi])
def test_mc_matches_analytic(sigma):
    r = monte_carlo_gate_fidelity(NoiseModel(sigma, 2024), 10_000)
    assert abs(r.mean_fidelity - analytic_gate_fidelity(sigma)) < 3 * r.std_error


def test_mc_bound_at_paper_sigma():
    r = monte_carlo_gate_fidelity(NoiseModel(0.03 * math.pi, 0), 10_000)
    assert r.mean_fidelity >= 0.96


def test_mc_deterministic():
    m = NoiseModel(0.05, 77)
    assert monte_carlo_gate_fidelity(m, 5000) == monte_carlo_gate_fidelity(m, 5000)


def test_report_serialization():
    r = FidelityReport(0.1, 10, 0.99, 0.001, "process")
    assert r.to_dict() == {"sigma": 0.1, "trials": 10, "mean_fidelity": 0.99, "std_error": 0.001, "metric_name": "process"}
    lines = reports_to_csv([r]).splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[1] == "0.1,10,0.99,0.001,process"


@pytest.fixture(scope="module")
def schedule3():
    return lower(build_qft_circuit(3), DeviceParams())


def test_qft_mc_zero_sigma(schedule3):
    assert monte_carlo_qft_fidelity(schedule3, [1, 0, 1], NoiseModel(0.0, 3), 20).mean_fidelity == 1.0


def test_qft_mc_no_windows():
    s = lower(build_qft_circuit(1), DeviceParams())
    assert monte_carlo_qft_fidelity(s, [1], NoiseModel(0.5, 3), 20).mean_fidelity == 1.0


def test_qft_mc_deterministic(schedule3):
    m = NoiseModel(0.1, 9)
    assert monte_carlo_qft_fidelity(schedule3, [0, 1, 1], m, 50) == monte_carlo_qft_fidelity(schedule3, [0, 1, 1], m, 50)


def test_qft_mc_degrades_with_sigma(schedule3):
    prev = None
    for sigma in (0.02, 0.04, 0.08, 0.16, 0.32):
        r = monte_carlo_qft_fidelity(schedule3, [1, 1, 0], NoiseModel(sigma, 5), 300)
        assert r.mean_fidelity < 1.0
        if prev is not None:
            assert r.mean_fidelity <= prev.mean_fidelity + 3 * math.hypot(r.std_error, prev.std_error)
        prev = r
