"""Compile and simulate the quantum Fourier transform on a line of coupled double quantum dots."""
from .circuits import (
    CZ,
    Circuit,
    ControlledPhase,
    Hadamard,
    Phase,
    build_qft_circuit,
    decompose_controlled_phase,
    dft_reference_state,
    expand_circuit,
    product_form_state,
    readout_reversal,
    simulate_circuit,
)
from .device import (
    DeviceParams,
    InteractionSpec,
    controlled_phase_theta,
    coulomb_energy,
    cz_duration,
    energy_ratio,
    interaction_spec,
    max_qubits,
)
from .lowering import (
    IsingWindow,
    PulseSchedule,
    SingleQubitPulse,
    lower,
    simulate_schedule,
    timing_report,
    validate_schedule,
)
from .noise import (
    FidelityReport,
    NoiseModel,
    gate_process_fidelity,
    monte_carlo_gate_fidelity,
    monte_carlo_qft_fidelity,
    sample_delta_phi,
)
from .statevector import (
    StateVector,
    apply_cz,
    apply_hadamard,
    apply_ising_evolution,
    apply_phase,
    basis_state,
    state_fidelity,
)

__version__ = "0.1.0"
