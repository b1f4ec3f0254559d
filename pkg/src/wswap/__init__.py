"""Deterministic W-state entanglement swapping: density-matrix and gate-level
simulation of the protocol, its noise models and weak-measurement purification."""

from .channels import (
    DampingParams,
    GateNoiseParams,
    KrausChannel,
    WeakMeasurementParams,
    amplitude_damping,
    apply_channel,
    apply_selective,
    noisy_cnot_apply,
    noisy_readout,
    r_from_rate,
    weak_measurement_ops,
)
from .protocol import (
    OracleReport,
    SwapOutcome,
    SwapResult,
    apply_correction,
    charlie_measure,
    combined_state,
    damped_swap,
    full_pipeline,
    ideal_swap,
    oracle,
    purify,
)
from .qlinalg import (
    Branch,
    DensityMatrix,
    StateVector,
    embed,
    kron,
    partial_trace,
    permute_qubits,
    pure_fidelity,
    trace_distance,
)
from .states import WFamilyParams, charlie_basis, pauli, prototype_w, w_family, w_state

__version__ = "0.1.0"
