"""qeclab: a desk-scale quantum error-correction laboratory.

Dense state-vector simulation of the Shor 9-qubit and Steane 7-qubit
codes, an error catalog covering discrete flips, continuous unitary
errors, amplitude decay, and correlated placement statistics, and a
seeded Monte Carlo harness for measuring the residual error that
survives syndrome-based correction.
"""

from .codes import (
    CODE_NAMES,
    CodeSpec,
    LogicalQubit,
    SyndromeResult,
    extract_syndrome,
    get_code,
    logical_fidelity,
    pauli_strings_commute,
    recover,
    shor_code,
    steane_code,
    uncoded,
)
from .errors import (
    ALL_QUBITS,
    ERROR_KINDS,
    DecayModel,
    ErrorModel,
    GeneralErrorParams,
    Placement,
    RotationErrorParams,
    apply_error_model,
    bose_einstein_pattern_prob,
    build_general_unitary,
    decoherence_prob,
    fermi_pattern_prob,
    pauli_unitary,
    rotation_unitary,
    sample_placement,
    sample_rotation_angle,
)
from .experiments import (
    ExperimentConfig,
    SweepResult,
    SweepRow,
    fit_power_law,
    model_for,
    proliferation_experiment,
    run_trial,
    sensitivity_experiment,
    sweep_theta,
)
from .statevec import (
    MAX_QUBITS,
    StateVector,
    apply_1q,
    apply_controlled,
    apply_pauli_string,
    basis_state,
    fidelity,
    measure_pauli_string,
    measure_qubit,
    support_size,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_QUBITS",
    "CODE_NAMES",
    "CodeSpec",
    "DecayModel",
    "ERROR_KINDS",
    "ErrorModel",
    "ExperimentConfig",
    "GeneralErrorParams",
    "LogicalQubit",
    "MAX_QUBITS",
    "Placement",
    "RotationErrorParams",
    "StateVector",
    "SweepResult",
    "SweepRow",
    "SyndromeResult",
    "apply_1q",
    "apply_controlled",
    "apply_error_model",
    "apply_pauli_string",
    "basis_state",
    "bose_einstein_pattern_prob",
    "build_general_unitary",
    "decoherence_prob",
    "extract_syndrome",
    "fermi_pattern_prob",
    "fidelity",
    "fit_power_law",
    "get_code",
    "logical_fidelity",
    "measure_pauli_string",
    "measure_qubit",
    "model_for",
    "pauli_strings_commute",
    "pauli_unitary",
    "proliferation_experiment",
    "recover",
    "rotation_unitary",
    "run_trial",
    "sample_placement",
    "sample_rotation_angle",
    "sensitivity_experiment",
    "shor_code",
    "steane_code",
    "support_size",
    "sweep_theta",
    "uncoded",
]
