"""Lower a logical QFT circuit to a serial pulse schedule and run it.

Hadamards and single-molecule phases become :class:`SingleQubitPulse` steps.
Each controlled phase expands to the nine-step CZ sandwich, with both CZs
realized as :class:`IsingWindow` steps timed so that ``E t / hbar`` is an odd
multiple of pi. Only one step is active at a time; every other molecule is
assumed shielded.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from math import pi
from typing import Mapping, Sequence, Union

import numpy as np

from .circuits import (
    CZ,
    Circuit,
    ControlledPhase,
    Hadamard,
    Phase,
    decompose_controlled_phase,
)
from .device import DeviceParams, coulomb_energy, cz_duration, max_qubits
from .noise import NoiseModel, sample_delta_phis
from .statevector import (
    StateVector,
    basis_state,
    diagonal11_inplace,
    hadamard_inplace,
    ising_factor,
    phase_inplace,
)

DURATION_RTOL = 1e-12


class UnsupportedProgramError(ValueError):
    """The circuit contains gates the QFT lowering does not handle."""


class FeasibilityWarning(UserWarning):
    """The molecule count exceeds what the coupling-energy threshold allows."""


@dataclass(frozen=True)
class SingleQubitPulse:
    molecule: int
    kind: str  # "h" or "phase"
    phi: float = 0.0
    start: float = 0.0
    duration: float = 0.0


@dataclass(frozen=True)
class IsingWindow:
    gamma: int
    iota: int
    energy: float  # J
    mu: int
    duration: float  # s
    start: float = 0.0

    @property
    def separation(self) -> int:
        return self.iota - self.gamma

    @property
    def nominal_phase(self) -> float:
        return (2 * self.mu + 1) * pi


PulseStep = Union[SingleQubitPulse, IsingWindow]


@dataclass(frozen=True)
class PulseSchedule:
    num_molecules: int
    params: DeviceParams
    steps: tuple
    mu: int = 0
    total_interaction_time: float = 0.0
    warnings: tuple = field(default=(), compare=False)

    @property
    def windows(self) -> list[IsingWindow]:
        return [s for s in self.steps if isinstance(s, IsingWindow)]

    @property
    def num_windows(self) -> int:
        return sum(1 for s in self.steps if isinstance(s, IsingWindow))

    @property
    def num_pulses(self) -> int:
        return sum(1 for s in self.steps if isinstance(s, SingleQubitPulse))


def _mu_for(mu, d: int) -> int:
    if isinstance(mu, Mapping):
        return int(mu.get(d, mu.get("default", 0)))
    return int(mu)


def lower(
    circuit: Circuit,
    params: DeviceParams | None = None,
    mu: int | Mapping = 0,
    pulse_duration: float = 0.0,
    feasibility_threshold: float = 1e-3,
) -> PulseSchedule:
    """Compile ``circuit`` into a serial pulse schedule.

    ``mu`` is either one pulse order for every window or a mapping from
    separation to pulse order (key ``"default"`` covers the rest).
    ``pulse_duration`` is the time charged to each single-molecule pulse; it
    shifts start times but never counts as interaction time.
    """
    params = params or DeviceParams()
    if pulse_duration < 0:
        raise ValueError("pulse duration must be >= 0")
    n = circuit.num_qubits
    steps: list[PulseStep] = []
    clock = 0.0
    total = 0.0

    def pulse(molecule, kind, phi=0.0):
        nonlocal clock
        steps.append(SingleQubitPulse(molecule, kind, phi, clock, pulse_duration))
        clock += pulse_duration

    for gate in circuit.gates:
        if isinstance(gate, Hadamard):
            pulse(gate.q, "h")
        elif isinstance(gate, ControlledPhase):
            for prim in decompose_controlled_phase(gate):
                if isinstance(prim, Hadamard):
                    pulse(prim.q, "h")
                elif isinstance(prim, Phase):
                    pulse(prim.q, "phase", prim.phi)
                else:
                    gamma, iota = sorted((prim.q1, prim.q2))
                    d = iota - gamma
                    order = _mu_for(mu, d)
                    duration = cz_duration(params, d, order)
                    steps.append(IsingWindow(gamma, iota, coulomb_energy(params, d), order, duration, clock))
                    clock += duration
                    total += duration
        else:
            raise UnsupportedProgramError(
                f"cannot lower {type(gate).__name__}; expected only Hadamard and ControlledPhase"
            )

    notes = []
    if n >= 2:
        limit = max_qubits(params, feasibility_threshold)
        if n > limit:
            msg = (
                f"{n} molecules exceeds the {limit} allowed by coupling-energy "
                f"threshold {feasibility_threshold:g}"
            )
            notes.append(msg)
            warnings.warn(msg, FeasibilityWarning, stacklevel=2)

    default_mu = _mu_for(mu, 0) if isinstance(mu, Mapping) else int(mu)
    return PulseSchedule(n, params, tuple(steps), default_mu, total, tuple(notes))


def _initial_amplitudes(schedule: PulseSchedule, input_bits) -> np.ndarray:
    if isinstance(input_bits, StateVector):
        if input_bits.num_qubits != schedule.num_molecules:
            raise ValueError("input state size does not match the schedule")
        return input_bits.amplitudes.copy()
    bits = list(input_bits)
    if len(bits) != schedule.num_molecules:
        raise ValueError(f"expected {schedule.num_molecules} input bits, got {len(bits)}")
    return basis_state(schedule.num_molecules, bits).amplitudes


def simulate_schedule(
    schedule: PulseSchedule,
    input_bits,
    noise: NoiseModel | None = None,
    trial: int = 0,
    delta_phis: Sequence[float] | None = None,
    phase_offset: float = 0.0,
) -> StateVector:
    """Execute the schedule on ``|input_bits>`` (or a given state).

    Window ``k`` of trial ``t`` gets phase error ``delta_phis[k]`` if given,
    else noise draw ``t * W + k``. ``phase_offset`` is added to every nominal
    window phase and exists for fault injection. Readout reversal is left to
    the caller.
    """
    n = schedule.num_molecules
    amps = _initial_amplitudes(schedule, input_bits)
    w = schedule.num_windows
    if delta_phis is not None:
        errors = np.asarray(delta_phis, dtype=np.float64)
        if errors.shape != (w,):
            raise ValueError(f"need {w} phase errors, got {errors.shape}")
    elif noise is not None:
        errors = sample_delta_phis(noise, trial * w, w)
    else:
        errors = np.zeros(w)

    k = 0
    for step in schedule.steps:
        if isinstance(step, IsingWindow):
            factor = ising_factor(step.nominal_phase + phase_offset, float(errors[k]))
            diagonal11_inplace(amps, n, step.gamma, step.iota, factor)
            k += 1
        elif step.kind == "h":
            hadamard_inplace(amps, n, step.molecule)
        else:
            phase_inplace(amps, n, step.molecule, step.phi)
    return StateVector(amps)


@dataclass(frozen=True)
class TimingReport:
    total_interaction_time: float
    coherence_time: float
    ratio: float
    breakdown: dict  # separation -> {"windows": int, "duration_s": float}
    single_qubit_pulses: int
    total_with_pulses: float | None = None

    def to_dict(self) -> dict:
        out = {
            "total_interaction_time_s": self.total_interaction_time,
            "coherence_time_s": self.coherence_time,
            "ratio": self.ratio,
            "breakdown": [
                {"separation": d, **row} for d, row in sorted(self.breakdown.items())
            ],
            "single_qubit_pulses": self.single_qubit_pulses,
        }
        if self.total_with_pulses is not None:
            out["total_with_pulses_s"] = self.total_with_pulses
        return out


def timing_report(
    schedule: PulseSchedule,
    params: DeviceParams | None = None,
    pulse_duration: float | None = None,
) -> TimingReport:
    """Interaction-time budget; ``pulse_duration`` adds a sensitivity column."""
    params = params or schedule.params
    breakdown: dict[int, dict] = {}
    for win in schedule.windows:
        row = breakdown.setdefault(win.separation, {"windows": 0, "duration_s": 0.0})
        row["windows"] += 1
        row["duration_s"] += win.duration
    total = sum(win.duration for win in schedule.windows)
    pulses = schedule.num_pulses
    with_pulses = None if pulse_duration is None else total + pulses * pulse_duration
    return TimingReport(total, params.coherence_time, total / params.coherence_time, breakdown, pulses, with_pulses)


def validate_schedule(schedule: PulseSchedule) -> list[str]:
    n = schedule.num_molecules
    params = schedule.params
    problems = []
    prev_end = None
    total = 0.0
    for i, step in enumerate(schedule.steps):
        if isinstance(step, IsingWindow):
            if not 1 <= step.gamma < step.iota <= n:
                problems.append(f"step {i}: window molecules ({step.gamma}, {step.iota}) invalid for n={n}")
            elif step.mu < 0:
                problems.append(f"step {i}: negative pulse order {step.mu}")
            else:
                expected_e = coulomb_energy(params, step.separation)
                if abs(step.energy - expected_e) > DURATION_RTOL * expected_e:
                    problems.append(f"step {i}: energy {step.energy!r} J does not match device coupling {expected_e!r} J")
                expected_t = step.nominal_phase * params.hbar / step.energy if step.energy > 0 else float("inf")
                if not step.duration > 0 or abs(step.duration - expected_t) > DURATION_RTOL * expected_t:
                    problems.append(f"step {i}: duration {step.duration!r} s, expected {expected_t!r} s")
            total += step.duration
        else:
            if not 1 <= step.molecule <= n:
                problems.append(f"step {i}: molecule {step.molecule} out of range 1..{n}")
            if step.kind not in ("h", "phase"):
                problems.append(f"step {i}: unknown pulse kind {step.kind!r}")
            if step.duration < 0:
                problems.append(f"step {i}: negative pulse duration")
        if prev_end is not None and step.start < prev_end * (1 - 1e-12):
            problems.append(f"step {i}: starts at {step.start!r} s before previous step ends at {prev_end!r} s (overlap)")
        prev_end = step.start + step.duration
    if abs(total - schedule.total_interaction_time) > DURATION_RTOL * max(total, 1e-300):
        problems.append(
            f"total_interaction_time {schedule.total_interaction_time!r} s != window sum {total!r} s"
        )
    return problems


# -- JSON -------------------------------------------------------------------

def schedule_to_dict(schedule: PulseSchedule) -> dict:
    params = schedule.params
    steps = []
    for s in schedule.steps:
        if isinstance(s, IsingWindow):
            steps.append({
                "type": "ising",
                "gamma": s.gamma,
                "iota": s.iota,
                "mu": s.mu,
                "energy_ev": params.joules_to_ev(s.energy),
                "duration_s": s.duration,
                "start_s": s.start,
            })
        elif s.kind == "h":
            steps.append({"type": "h", "molecule": s.molecule, "start_s": s.start, "pulse_s": s.duration})
        else:
            steps.append({"type": "phase", "molecule": s.molecule, "phi_rad": s.phi, "start_s": s.start, "pulse_s": s.duration})
    return {
        "n": schedule.num_molecules,
        "params": params.to_units(),
        "mu": schedule.mu,
        "steps": steps,
        "total_interaction_time_s": schedule.total_interaction_time,
    }


def schedule_from_dict(data: dict) -> PulseSchedule:
    params = DeviceParams.from_units(**data["params"])
    steps: list[PulseStep] = []
    for i, s in enumerate(data["steps"]):
        kind = s.get("type")
        start = float(s.get("start_s", 0.0))
        if kind == "ising":
            steps.append(IsingWindow(
                int(s["gamma"]), int(s["iota"]), params.ev_to_joules(float(s["energy_ev"])),
                int(s.get("mu", data.get("mu", 0))), float(s["duration_s"]), start,
            ))
        elif kind in ("h", "phase"):
            steps.append(SingleQubitPulse(
                int(s["molecule"]), kind, float(s.get("phi_rad", 0.0)), start, float(s.get("pulse_s", 0.0))
            ))
        else:
            raise ValueError(f"step {i}: unknown step type {kind!r}")
    return PulseSchedule(
        int(data["n"]), params, tuple(steps), int(data.get("mu", 0)), float(data["total_interaction_time_s"])
    )


def dumps_schedule(schedule: PulseSchedule, indent: int | None = 2) -> str:
    return json.dumps(schedule_to_dict(schedule), indent=indent)


def loads_schedule(text: str) -> PulseSchedule:
    return schedule_from_dict(json.loads(text))
