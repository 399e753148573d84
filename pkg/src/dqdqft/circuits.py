"""Logical QFT circuits, the DFT reference state, and controlled-phase lowering.

Gate indices are 1-based molecule numbers. A circuit is applied left to right.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import isfinite, pi
from typing import Sequence, Union

import numpy as np

from .statevector import (
    StateVector,
    _check_qubit_count,
    diagonal11_inplace,
    hadamard_inplace,
    ising_factor,
    phase_inplace,
)


@dataclass(frozen=True)
class Hadamard:
    q: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.q,)


@dataclass(frozen=True)
class Phase:
    q: int
    phi: float

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.q,)


@dataclass(frozen=True)
class CZ:
    q1: int
    q2: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.q1, self.q2)


@dataclass(frozen=True)
class ControlledPhase:
    """``diag(1, 1, 1, exp(i*theta))``; symmetric, roles are bookkeeping only."""

    control: int
    target: int
    theta: float

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.control, self.target)


Gate = Union[Hadamard, Phase, CZ, ControlledPhase]


def _check_gate(gate: Gate, n: int) -> None:
    qs = gate.qubits
    for q in qs:
        if not isinstance(q, (int, np.integer)) or not 1 <= q <= n:
            raise ValueError(f"{gate!r}: qubit index out of range 1..{n}")
    if len(qs) == 2 and qs[0] == qs[1]:
        raise ValueError(f"{gate!r}: two-qubit gate needs distinct qubits")
    angle = getattr(gate, "phi", getattr(gate, "theta", 0.0))
    if not isfinite(angle):
        raise ValueError(f"{gate!r}: angle must be finite")


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple = ()

    def __post_init__(self):
        _check_qubit_count(self.num_qubits)
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if not isinstance(g, (Hadamard, Phase, CZ, ControlledPhase)):
                raise TypeError(f"not a gate: {g!r}")
            _check_gate(g, self.num_qubits)

    def __len__(self) -> int:
        return len(self.gates)


def build_qft_circuit(n: int) -> Circuit:
    """QFT without terminal swaps.

    Molecule ``l`` gets a Hadamard and then a controlled phase of ``pi / 2**(i - l)``
    from every later molecule ``i``; afterwards molecule ``l`` holds the binary
    fraction ``0.j_l ... j_n``.
    """
    if n < 1:
        raise ValueError("QFT needs at least one qubit")
    gates: list[Gate] = []
    for l in range(1, n + 1):
        gates.append(Hadamard(l))
        for i in range(l + 1, n + 1):
            gates.append(ControlledPhase(control=i, target=l, theta=pi / 2 ** (i - l)))
    return Circuit(n, gates)


def decompose_controlled_phase(g: ControlledPhase) -> list[Gate]:
    """Rewrite a controlled phase over {H, Phase, CZ}, in execution order.

    ``H_t CZ H_t`` is a CNOT onto the target, so this is
    ``P_t(theta/2) CNOT P_t(-theta/2) CNOT P_c(theta/2)`` read right to left.
    """
    c, t, half = g.control, g.target, g.theta / 2
    return [
        Phase(c, half),
        Hadamard(t),
        CZ(c, t),
        Hadamard(t),
        Phase(t, -half),
        Hadamard(t),
        CZ(c, t),
        Hadamard(t),
        Phase(t, half),
    ]


def expand_circuit(c: Circuit) -> Circuit:
    gates: list[Gate] = []
    for g in c.gates:
        if isinstance(g, ControlledPhase):
            gates.extend(decompose_controlled_phase(g))
        else:
            gates.append(g)
    return Circuit(c.num_qubits, gates)


def dft_reference_state(j: int, n: int) -> StateVector:
    """``exp(2 pi i j k / 2**n) / 2**(n/2)`` for every ``k``."""
    _check_qubit_count(n)
    size = 1 << n
    if not 0 <= j < size:
        raise ValueError(f"input index {j} out of range for {n} qubits")
    k = np.arange(size, dtype=np.int64)
    residue = (j * k) % size
    return StateVector(np.exp(2j * np.pi * residue / size) / np.sqrt(size))


def binary_fraction(bits: Sequence[int]) -> float:
    """``0.b1 b2 ... = b1/2 + b2/4 + ...``"""
    return sum(b / 2 ** (p + 1) for p, b in enumerate(bits))


def product_form_state(bits: Sequence[int]) -> StateVector:
    """Tensor product ``(|0> + exp(2 pi i 0.j_{n+1-p}...j_n)|1>)/sqrt(2)`` over positions p = 1..n.

    Position ``p`` is molecule ``n + 1 - p``, so this is the register read out
    from molecule ``n`` down to molecule 1.
    """
    bits = list(bits)
    n = len(bits)
    _check_qubit_count(n)
    if any(b not in (0, 1) for b in bits):
        raise ValueError("bits must be 0 or 1")
    amps = np.ones(1, dtype=np.complex128)
    for p in range(1, n + 1):
        frac = binary_fraction(bits[n - p:])
        factor = np.array([1.0, np.exp(2j * np.pi * frac)]) / np.sqrt(2.0)
        amps = np.kron(amps, factor)
    return StateVector(amps)


def bit_reversal_permutation(n: int) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    rev = np.zeros_like(idx)
    for b in range(n):
        rev |= ((idx >> b) & 1) << (n - 1 - b)
    return rev


def readout_reversal(state: StateVector) -> StateVector:
    """Relabel molecule ``l`` as ``n + 1 - l`` (bit-reverse every index)."""
    perm = bit_reversal_permutation(state.num_qubits)
    return StateVector(state.amplitudes[perm])


def apply_gate_inplace(amps: np.ndarray, n: int, g: Gate) -> None:
    if isinstance(g, Hadamard):
        hadamard_inplace(amps, n, g.q)
    elif isinstance(g, Phase):
        phase_inplace(amps, n, g.q, g.phi)
    elif isinstance(g, CZ):
        diagonal11_inplace(amps, n, g.q1, g.q2, -1.0 + 0j)
    elif isinstance(g, ControlledPhase):
        # exp(-i * (-theta)) on |11>
        diagonal11_inplace(amps, n, g.control, g.target, ising_factor(-g.theta))
    else:
        raise TypeError(f"not a gate: {g!r}")


def simulate_circuit(c: Circuit, input: StateVector) -> StateVector:
    if input.num_qubits != c.num_qubits:
        raise ValueError(f"circuit has {c.num_qubits} qubits, state has {input.num_qubits}")
    out = input.copy()
    for g in c.gates:
        apply_gate_inplace(out.amplitudes, c.num_qubits, g)
    return out


# -- serialization ----------------------------------------------------------

def gate_to_dict(g: Gate) -> dict:
    if isinstance(g, Hadamard):
        return {"type": "h", "q": g.q}
    if isinstance(g, Phase):
        return {"type": "phase", "q": g.q, "phi_rad": g.phi}
    if isinstance(g, CZ):
        return {"type": "cz", "q1": g.q1, "q2": g.q2}
    if isinstance(g, ControlledPhase):
        return {"type": "cp", "control": g.control, "target": g.target, "theta_rad": g.theta}
    raise TypeError(f"not a gate: {g!r}")


def gate_from_dict(d: dict) -> Gate:
    kind = d.get("type")
    if kind == "h":
        return Hadamard(int(d["q"]))
    if kind == "phase":
        return Phase(int(d["q"]), float(d["phi_rad"]))
    if kind == "cz":
        return CZ(int(d["q1"]), int(d["q2"]))
    if kind == "cp":
        return ControlledPhase(int(d["control"]), int(d["target"]), float(d["theta_rad"]))
    raise ValueError(f"unknown gate type {kind!r}")


def circuit_to_dict(c: Circuit) -> dict:
    return {"n": c.num_qubits, "gates": [gate_to_dict(g) for g in c.gates]}


def circuit_from_dict(d: dict) -> Circuit:
    return Circuit(int(d["n"]), [gate_from_dict(g) for g in d["gates"]])
