"""Dense statevector over the singlet/triplet computational basis.

Molecule ``l`` (1-based) is qubit ``l`` and carries bit weight ``2**(n - l)``,
so ``|j1 j2 ... jn>`` lives at index ``sum(j_l * 2**(n - l))``. Singlet is
``|0>``, triplet is ``|1>``.

Public ``apply_*`` functions return a new state. The ``*_inplace`` kernels
mutate a raw amplitude array and are what the simulators loop over.
"""
from __future__ import annotations

from math import isfinite, sqrt
from typing import Sequence

import numpy as np

MAX_QUBITS = 26

_SQRT1_2 = 1.0 / sqrt(2.0)


class StateVector:
    """Owned ``complex128`` amplitude array of length ``2**num_qubits``."""

    __slots__ = ("num_qubits", "amplitudes")

    def __init__(self, amplitudes, num_qubits: int | None = None, max_qubits: int = MAX_QUBITS):
        amps = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        size = amps.shape[0]
        n = size.bit_length() - 1
        if size < 2 or (1 << n) != size:
            raise ValueError(f"amplitude count {size} is not a power of two >= 2")
        if num_qubits is not None and num_qubits != n:
            raise ValueError(f"num_qubits={num_qubits} does not match {size} amplitudes")
        _check_qubit_count(n, max_qubits)
        self.num_qubits = n
        self.amplitudes = amps

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy())

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def __len__(self) -> int:
        return self.amplitudes.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.amplitudes
        return self.amplitudes.astype(dtype)

    def __repr__(self) -> str:
        return f"StateVector(num_qubits={self.num_qubits})"


def _check_qubit_count(n: int, max_qubits: int = MAX_QUBITS) -> None:
    if n < 1:
        raise ValueError("need at least one qubit")
    if n > max_qubits:
        raise ValueError(f"{n} qubits exceeds the configured maximum of {max_qubits}")


def _check_qubit(n: int, q: int) -> None:
    if not 1 <= q <= n:
        raise IndexError(f"qubit index {q} out of range 1..{n}")


def basis_index(bits: Sequence[int]) -> int:
    """Index of ``|j1 ... jn>``; ``bits[0]`` is the most significant."""
    index = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"bits must be 0 or 1, got {b!r}")
        index = (index << 1) | int(b)
    return index


def index_to_bits(index: int, n: int) -> list[int]:
    if not 0 <= index < (1 << n):
        raise ValueError(f"index {index} out of range for {n} qubits")
    return [(index >> (n - l)) & 1 for l in range(1, n + 1)]


def basis_state(n: int, bits: Sequence[int], max_qubits: int = MAX_QUBITS) -> StateVector:
    _check_qubit_count(n, max_qubits)
    if len(bits) != n:
        raise ValueError(f"expected {n} bits, got {len(bits)}")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[basis_index(bits)] = 1.0
    return StateVector(amps, max_qubits=max_qubits)


# -- in-place kernels -------------------------------------------------------

def hadamard_inplace(amps: np.ndarray, n: int, q: int) -> None:
    v = amps.reshape(1 << (q - 1), 2, 1 << (n - q))
    a = v[:, 0, :].copy()
    b = v[:, 1, :]
    v[:, 0, :] = (a + b) * _SQRT1_2
    v[:, 1, :] = (a - b) * _SQRT1_2


def phase_inplace(amps: np.ndarray, n: int, q: int, phi: float) -> None:
    if phi == 0.0:
        return
    v = amps.reshape(1 << (q - 1), 2, 1 << (n - q))
    v[:, 1, :] *= np.exp(1j * phi)


def diagonal11_inplace(amps: np.ndarray, n: int, q1: int, q2: int, factor: complex) -> None:
    """Multiply every amplitude whose bits ``q1`` and ``q2`` are both 1 by ``factor``."""
    lo, hi = min(q1, q2), max(q1, q2)
    v = amps.reshape(1 << (lo - 1), 2, 1 << (hi - lo - 1), 2, 1 << (n - hi))
    v[:, 1, :, 1, :] *= factor


def ising_factor(phase: float, delta_phi: float = 0.0) -> complex:
    """``exp(-i (phase + delta_phi))``, snapped to exactly -1 or 1 on multiples of pi."""
    total = phase + delta_phi
    turns = total / np.pi
    if delta_phi == 0.0 and turns == round(turns):
        return -1.0 + 0j if int(round(turns)) % 2 else 1.0 + 0j
    return complex(np.exp(-1j * total))


# -- public gate functions --------------------------------------------------

def apply_hadamard(state: StateVector, q: int) -> StateVector:
    _check_qubit(state.num_qubits, q)
    out = state.copy()
    hadamard_inplace(out.amplitudes, out.num_qubits, q)
    return out


def apply_phase(state: StateVector, q: int, phi: float) -> StateVector:
    """Put ``exp(i*phi)`` on every amplitude with bit ``q`` set."""
    _check_qubit(state.num_qubits, q)
    if not isfinite(phi):
        raise ValueError(f"phase angle must be finite, got {phi}")
    out = state.copy()
    phase_inplace(out.amplitudes, out.num_qubits, q, phi)
    return out


def apply_ising_evolution(
    state: StateVector, q1: int, q2: int, phase: float, delta_phi: float = 0.0
) -> StateVector:
    """Evolve under the ``|11><11|`` coupling for accumulated ``phase = E t / hbar``.

    The ``|11>`` amplitudes pick up ``exp(-i (phase + delta_phi))``; the other
    three two-qubit sectors are left untouched.
    """
    n = state.num_qubits
    _check_qubit(n, q1)
    _check_qubit(n, q2)
    if q1 == q2:
        raise ValueError("Ising evolution needs two distinct qubits")
    if not (isfinite(phase) and isfinite(delta_phi)):
        raise ValueError("Ising phase and phase error must be finite")
    out = state.copy()
    diagonal11_inplace(out.amplitudes, n, q1, q2, ising_factor(phase, delta_phi))
    return out


def apply_cz(state: StateVector, q1: int, q2: int) -> StateVector:
    return apply_ising_evolution(state, q1, q2, np.pi, 0.0)


# -- comparison -------------------------------------------------------------

def _check_same_size(a: StateVector, b: StateVector) -> None:
    if a.num_qubits != b.num_qubits:
        raise ValueError(f"dimension mismatch: {a.num_qubits} vs {b.num_qubits} qubits")


def state_fidelity(a: StateVector, b: StateVector) -> float:
    """``|<a|b>|**2`` clipped to [0, 1]."""
    _check_same_size(a, b)
    overlap = np.vdot(a.amplitudes, b.amplitudes)
    return float(min(1.0, max(0.0, abs(overlap) ** 2)))


def align_global_phase(state: StateVector, reference: StateVector) -> StateVector:
    """Rotate ``state`` so its phase matches ``reference`` at the reference's largest amplitude."""
    _check_same_size(state, reference)
    k = int(np.argmax(np.abs(reference.amplitudes)))
    here = state.amplitudes[k]
    if here == 0:
        return state.copy()
    rot = (reference.amplitudes[k] / here)
    rot /= abs(rot)
    return StateVector(state.amplitudes * rot)


def max_amplitude_error(state: StateVector, reference: StateVector, up_to_phase: bool = True) -> float:
    if up_to_phase:
        state = align_global_phase(state, reference)
    else:
        _check_same_size(state, reference)
    return float(np.max(np.abs(state.amplitudes - reference.amplitudes)))


def random_state(n: int, rng: np.random.Generator) -> StateVector:
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(amps / np.linalg.norm(amps))
