"""Coherence-consuming quantum error correction, simulated exactly.

Dense simulation of a family of error-correcting protocols whose only
nonclassical resource is maximally coherent |+> qubits and whose every
operation is incoherent: a two-qubit partial-protection primitive, a
three-qubit phase-flip code, and a nine-qubit code correcting arbitrary
single-qubit errors, together with the coherence bookkeeping that certifies
the incoherence claims and a sweep engine for noisy-input fidelity studies.
"""

from .states import (
    DensityMatrix,
    KrausSet,
    Operator,
    PureState,
    apply_kraus,
    embed_and_apply,
    fidelity,
    ket,
    partial_trace,
    tensor,
)
from .coherence import (
    IncoherenceDiagnostic,
    MonotonicityReport,
    is_incoherent_kraus_set,
    is_incoherent_state,
    l1_coherence,
    monotonicity_audit,
    random_density_matrix,
)
from .gates import (
    GateSpec,
    cluster_cz,
    cluster_encode_u1,
    cnot,
    computational_projectors,
    cz_132,
    cz_pm,
    logical_x,
    logical_z,
    measurement_kraus,
    pauli,
)
from .channels import (
    ErrorModel,
    apply_error_model,
    depolarizing,
    depolarizing_error,
    no_error,
    noisy_plus,
    pauli_error,
    superposed_error,
    superposed_phase_error,
)
from .codes import (
    CodeProtocol,
    ErrorTableRow,
    NineQubitResult,
    SyndromeRule,
    cluster_basis_state,
    data_state,
    error_table_nine,
    error_table_three,
    logical_state_nine,
    logical_state_three,
    nine_qubit_pipeline,
    nine_qubit_protocol,
    three_qubit_pipeline,
    two_qubit_pipeline,
)
from .experiments import SweepConfig, SweepRecord, emit_csv, run_sweep

__version__ = "0.1.0"

__all__ = [
    "DensityMatrix",
    "KrausSet",
    "Operator",
    "PureState",
    "apply_kraus",
    "embed_and_apply",
    "fidelity",
    "ket",
    "partial_trace",
    "tensor",
    "IncoherenceDiagnostic",
    "MonotonicityReport",
    "is_incoherent_kraus_set",
    "is_incoherent_state",
    "l1_coherence",
    "monotonicity_audit",
    "random_density_matrix",
    "GateSpec",
    "cluster_cz",
    "cluster_encode_u1",
    "cnot",
    "computational_projectors",
    "cz_132",
    "cz_pm",
    "logical_x",
    "logical_z",
    "measurement_kraus",
    "pauli",
    "ErrorModel",
    "apply_error_model",
    "depolarizing",
    "depolarizing_error",
    "no_error",
    "noisy_plus",
    "pauli_error",
    "superposed_error",
    "superposed_phase_error",
    "CodeProtocol",
    "ErrorTableRow",
    "NineQubitResult",
    "SyndromeRule",
    "cluster_basis_state",
    "data_state",
    "error_table_nine",
    "error_table_three",
    "logical_state_nine",
    "logical_state_three",
    "nine_qubit_pipeline",
    "nine_qubit_protocol",
    "three_qubit_pipeline",
    "two_qubit_pipeline",
    "SweepConfig",
    "SweepRecord",
    "emit_csv",
    "run_sweep",
    "__version__",
]
