import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dqdqft.statevector import (
    MAX_QUBITS,
    StateVector,
    apply_cz,
    apply_hadamard,
    apply_ising_evolution,
    apply_phase,
    basis_state,
    max_amplitude_error,
    random_state,
    state_fidelity,
)

S = 1 / math.sqrt(2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.mark.parametrize(
    "n, bits, index",
    [(1, [0], 0), (2, [1, 0], 2), (3, [1, 1, 1], 7), (4, [0, 1, 0, 1], 5)],
)
def test_basis_state_index_convention(n, bits, index):
    state = basis_state(n, bits)
    expected = np.zeros(2 ** n, dtype=complex)
    expected[index] = 1
    np.testing.assert_array_equal(state.amplitudes, expected)


@pytest.mark.parametrize("n", [0, MAX_QUBITS + 1])
def test_basis_state_rejects_bad_sizes(n):
    with pytest.raises(ValueError):
        basis_state(n, [0] * n)


def test_basis_state_rejects_bad_bits():
    with pytest.raises(ValueError):
        basis_state(2, [0, 2])
    with pytest.raises(ValueError):
        basis_state(2, [0])


def test_max_qubits_is_configurable():
    with pytest.raises(ValueError):
        basis_state(3, [0, 0, 0], max_qubits=2)


def test_statevector_rejects_non_power_of_two():
    with pytest.raises(ValueError):
        StateVector([1, 0, 0])


def test_hadamard_on_zero():
    out = apply_hadamard(basis_state(1, [0]), 1)
    np.testing.assert_allclose(out.amplitudes, [S, S], atol=1e-15)


def test_hadamard_first_qubit_of_10():
    out = apply_hadamard(basis_state(2, [1, 0]), 1)
    # (|00> - |10>)/sqrt2
    np.testing.assert_allclose(out.amplitudes, [S, 0, -S, 0], atol=1e-15)


def test_hadamard_twice_is_identity(rng):
    for n in (1, 3, 5):
        psi = random_state(n, rng)
        for q in range(1, n + 1):
            out = apply_hadamard(apply_hadamard(psi, q), q)
            assert np.max(np.abs(out.amplitudes - psi.amplitudes)) < 1e-12


def test_hadamard_does_not_mutate_input(rng):
    psi = random_state(3, rng)
    before = psi.amplitudes.copy()
    apply_hadamard(psi, 2)
    np.testing.assert_array_equal(psi.amplitudes, before)


def test_phase_examples(rng):
    psi = random_state(3, rng)
    np.testing.assert_array_equal(apply_phase(psi, 2, 0.0).amplitudes, psi.amplitudes)
    out = apply_phase(basis_state(1, [1]), 1, math.pi / 4)
    assert out.amplitudes[1] == pytest.approx(np.exp(1j * math.pi / 4), abs=1e-15)
    twice = apply_phase(apply_phase(psi, 3, math.pi), 3, math.pi)
    assert np.max(np.abs(twice.amplitudes - psi.amplitudes)) < 1e-12


def test_phase_touches_only_set_bit(rng):
    psi = random_state(3, rng)
    out = apply_phase(psi, 2, 0.7)
    for idx in range(8):
        if (idx >> 1) & 1:
            assert out.amplitudes[idx] == pytest.approx(psi.amplitudes[idx] * np.exp(0.7j), abs=1e-15)
        else:
            assert out.amplitudes[idx] == psi.amplitudes[idx]


def test_phase_errors():
    psi = basis_state(2, [0, 0])
    with pytest.raises(IndexError):
        apply_phase(psi, 3, 0.1)
    with pytest.raises(IndexError):
        apply_phase(psi, 0, 0.1)
    with pytest.raises(ValueError):
        apply_phase(psi, 1, math.inf)


def test_ising_cz_point():
    out = apply_ising_evolution(basis_state(2, [1, 1]), 1, 2, math.pi)
    np.testing.assert_allclose(out.amplitudes, [0, 0, 0, -1], atol=1e-15)


@pytest.mark.parametrize("bits", [[0, 0], [0, 1], [1, 0]])
def test_ising_leaves_other_sectors(bits):
    psi = basis_state(2, bits)
    for phase in (0.3, math.pi, 2.5):
        np.testing.assert_array_equal(apply_ising_evolution(psi, 1, 2, phase).amplitudes, psi.amplitudes)


def test_ising_with_phase_error():
    out = apply_ising_evolution(basis_state(2, [1, 1]), 1, 2, math.pi, 0.03 * math.pi)
    # -1 * exp(-i 0.03 pi), evaluated directly
    expected = complex(-math.cos(0.03 * math.pi), math.sin(0.03 * math.pi))
    assert abs(out.amplitudes[3] - expected) < 1e-15


def test_ising_errors():
    psi = basis_state(3, [0, 0, 0])
    with pytest.raises(ValueError):
        apply_ising_evolution(psi, 2, 2, math.pi)
    with pytest.raises(IndexError):
        apply_ising_evolution(psi, 1, 4, math.pi)
    with pytest.raises(ValueError):
        apply_ising_evolution(psi, 1, 2, math.nan)


def test_ising_composition(rng):
    psi = random_state(4, rng)
    for p1, p2 in [(0.3, 1.1), (math.pi, -2.0), (5.0, 7.5)]:
        two = apply_ising_evolution(apply_ising_evolution(psi, 1, 3, p1), 1, 3, p2)
        one = apply_ising_evolution(psi, 1, 3, p1 + p2)
        assert np.max(np.abs(two.amplitudes - one.amplitudes)) < 1e-12


def test_ising_argument_order_irrelevant(rng):
    psi = random_state(4, rng)
    a = apply_ising_evolution(psi, 1, 4, 0.9)
    b = apply_ising_evolution(psi, 4, 1, 0.9)
    np.testing.assert_array_equal(a.amplitudes, b.amplitudes)


def test_cz_examples(rng):
    np.testing.assert_array_equal(apply_cz(basis_state(2, [1, 1]), 1, 2).amplitudes, [0, 0, 0, -1])
    np.testing.assert_array_equal(apply_cz(basis_state(2, [1, 0]), 1, 2).amplitudes, [0, 0, 1, 0])
    psi = random_state(3, rng)
    np.testing.assert_array_equal(apply_cz(apply_cz(psi, 2, 3), 2, 3).amplitudes, psi.amplitudes)


def test_fidelity_examples(rng):
    psi = random_state(3, rng)
    assert state_fidelity(psi, psi) == pytest.approx(1.0, abs=1e-14)
    alpha = rng.uniform(0, 2 * math.pi)
    rotated = StateVector(psi.amplitudes * np.exp(1j * alpha))
    assert state_fidelity(psi, rotated) == pytest.approx(1.0, abs=1e-14)
    assert state_fidelity(basis_state(1, [0]), basis_state(1, [1])) == 0.0
    with pytest.raises(ValueError):
        state_fidelity(basis_state(1, [0]), basis_state(2, [0, 0]))


def test_max_amplitude_error_ignores_global_phase(rng):
    psi = random_state(3, rng)
    rotated = StateVector(psi.amplitudes * np.exp(2.1j))
    assert max_amplitude_error(rotated, psi) < 1e-15
    assert max_amplitude_error(rotated, psi, up_to_phase=False) > 0.1


gate_choice = st.tuples(
    st.sampled_from(["h", "phase", "ising"]),
    st.integers(1, 4),
    st.integers(1, 4),
    st.floats(-10, 10, allow_nan=False),
)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), gates=st.lists(gate_choice, min_size=1, max_size=20))
def test_norm_conserved_and_untouched_entries_exact(seed, gates):
    psi = random_state(4, np.random.default_rng(seed))
    for kind, q1, q2, angle in gates:
        before = psi.amplitudes.copy()
        if kind == "h":
            psi = apply_hadamard(psi, q1)
        elif kind == "phase":
            psi = apply_phase(psi, q1, angle)
            untouched = [i for i in range(16) if not (i >> (4 - q1)) & 1]
            np.testing.assert_array_equal(psi.amplitudes[untouched], before[untouched])
        elif q1 != q2:
            psi = apply_ising_evolution(psi, q1, q2, angle)
            untouched = [i for i in range(16) if not ((i >> (4 - q1)) & 1 and (i >> (4 - q2)) & 1)]
            np.testing.assert_array_equal(psi.amplitudes[untouched], before[untouched])
        assert abs(psi.norm_squared() - 1) < 1e-12


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), q=st.integers(1, 5), phi=st.floats(-20, 20, allow_nan=False))
def test_phase_inverse(seed, q, phi):
    psi = random_state(5, np.random.default_rng(seed))
    out = apply_phase(apply_phase(psi, q, phi), q, -phi)
    assert np.max(np.abs(out.amplitudes - psi.amplitudes)) < 1e-12
