"""The three error-correcting protocols, as explicit pipelines.

* Two-qubit primitive: one coherent ancilla, partial phase-flip protection.
* Three-qubit code: two coherent ancillas, full single phase-flip protection
  with an incoherent syndrome measurement and feed-forward.
* Nine-qubit code: three clusters of three qubits (register order
  a1 a2 a3 b1 b2 b3 c1 c2 c3, data at b2), six coherent ancillas and two
  classical |0> ancillas, correcting arbitrary single-qubit errors.

Measurement plus feed-forward is evaluated as a deterministic sum over all
outcome branches with the conditional correction applied per branch, so the
returned states and fidelities are exact expectations and every run is
reproducible. Each syndrome rule that observes its (1, 1) trigger applies
its own correction Pauli; two fired phase rules therefore cancel, which is
what lets simultaneous phase flips on two different clusters decode
correctly.

Mixed inputs force density-matrix simulation; a pure-state fast path is used
only when all inputs are pure and the error is a single branch.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .channels import ErrorModel, _apply_error_model_arr, depolarizing, noisy_plus
from .gates import (
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    cluster_cz,
    cluster_encode_u1,
    cnot,
    computational_projectors,
    cz_pm,
    logical_x,
    logical_z,
    measurement_kraus,
    pauli,
)
from .states import (
    DensityMatrix,
    KrausSet,
    Operator,
    PureState,
    _apply_matrix_density,
    _apply_matrix_pure,
    _apply_to_axes,
    embed_and_apply,
    fidelity,
    ket,
    partial_trace,
    tensor,
)

__all__ = [
    "CLUSTER_A",
    "CLUSTER_B",
    "CLUSTER_C",
    "DATA_QUBIT",
    "PHASE_SYNDROME_PAIRS",
    "BIT_SYNDROME_PAIR",
    "CodeProtocol",
    "SyndromeRule",
    "ErrorTableRow",
    "TWO_QUBIT_PROTOCOL",
    "THREE_QUBIT_PROTOCOL",
    "NINE_QUBIT_PROTOCOL",
    "THREE_SYNDROME_RULES",
    "NINE_SYNDROME_RULES",
    "cluster_basis_state",
    "logical_state_three",
    "logical_state_nine",
    "data_state",
    "two_qubit_pipeline",
    "three_qubit_pipeline",
    "error_table_three",
    "error_table_nine",
    "reference_table_three",
    "reference_table_nine",
    "NineQubitResult",
    "nine_qubit_pipeline",
    "nine_qubit_protocol",
    "protocol_channel_zoo",
]

# Register layout of the nine-qubit code.
CLUSTER_A = (1, 2, 3)
CLUSTER_B = (4, 5, 6)
CLUSTER_C = (7, 8, 9)
DATA_QUBIT = 5
PHASE_SYNDROME_PAIRS = ((1, 3), (4, 6), (7, 9))
BIT_SYNDROME_PAIR = (2, 8)
_ALL_NINE = tuple(range(1, 10))


@dataclass(frozen=True)
class CodeProtocol:
    """Descriptor of one encode/error/decode/measure/correct pipeline."""

    name: str
    data_qubit: int
    ancilla_spec: tuple[tuple[int, str], ...]  # (position, initial state)


@dataclass(frozen=True)
class SyndromeRule:
    """Apply ``correction`` on ``target`` when the measured pair reads (1, 1)."""

    measured_pair: tuple[int, int]
    correction: str
    target: int
    trigger_outcome: tuple[int, int] = (1, 1)


TWO_QUBIT_PROTOCOL = CodeProtocol("TWO", 2, ((1, "+"),))
THREE_QUBIT_PROTOCOL = CodeProtocol("THREE", 2, ((1, "+"), (3, "+")))
NINE_QUBIT_PROTOCOL = CodeProtocol(
    "NINE",
    DATA_QUBIT,
    (
        (1, "noisy+"),
        (2, "0"),
        (3, "noisy+"),
        (4, "noisy+"),
        (6, "noisy+"),
        (7, "noisy+"),
        (8, "0"),
        (9, "noisy+"),
    ),
)

THREE_SYNDROME_RULES = (SyndromeRule((1, 3), "Z", 2),)
NINE_SYNDROME_RULES = (
    SyndromeRule((1, 3), "Z", DATA_QUBIT),
    SyndromeRule((4, 6), "Z", DATA_QUBIT),
    SyndromeRule((7, 9), "Z", DATA_QUBIT),
    SyndromeRule((2, 8), "X", DATA_QUBIT),
)


def data_state(theta: float) -> PureState:
    """cos(theta/2)|0> + sin(theta/2)|1>, the state being protected."""
    return PureState(1, np.array([np.cos(theta / 2.0), np.sin(theta / 2.0)]))


def cluster_basis_state(logical: int, left: str, right: str) -> PureState:
    """Encoded 3-qubit cluster state: the first-layer encoder applied to
    |left>|logical>|right> with left, right in {+, -}."""
    if logical not in (0, 1):
        raise ValueError("logical value must be 0 or 1")
    if left not in "+-" or right not in "+-":
        raise ValueError("sign marks must be '+' or '-'")
    base = ket(f"{left}{logical}{right}")
    return embed_and_apply(cluster_encode_u1((1, 2, 3)), [1, 2, 3], base)


def logical_state_three(logical: int) -> PureState:
    """|0_l> or |1_l> of the three-qubit phase-flip code."""
    return cluster_basis_state(logical, "+", "+")


def logical_state_nine(logical: int) -> PureState:
    """|0_L> or |1_L> of the nine-qubit code (triple of encoded clusters)."""
    c = logical_state_three(logical)
    return tensor([c, c, c])


# ---------------------------------------------------------------------------
# Deterministic measurement branching.
#
# Every measurement used by the protocols has rank-1 Kraus operators of the
# form |j><v_j| (|0><+|, |1><-| for the coherence-destroying measurement and
# |0><0|, |1><1| for the classical one), so summing the post-measurement
# branches reduces to contracting the bra vectors <v_j| into the state, one
# outcome axis per measured qubit. The ancillas collapse onto computational
# basis states, which is also what makes the post-measurement register state
# block-diagonal.
# ---------------------------------------------------------------------------

_SQRT2_INV = 1.0 / np.sqrt(2.0)
# Row o holds the bra <v_o| defining measurement outcome o.
_MEASUREMENT_BRAS = {
    "pm": np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) * _SQRT2_INV,
    "comp": np.eye(2, dtype=np.complex128),
}

_LETTERS = string.ascii_lowercase + string.ascii_uppercase

Plan = tuple[tuple[int, str], ...]

THREE_MEASUREMENT_PLAN: Plan = ((1, "pm"), (3, "pm"))
NINE_MEASUREMENT_PLAN: Plan = (
    (1, "pm"),
    (2, "comp"),
    (3, "pm"),
    (4, "pm"),
    (6, "pm"),
    (7, "pm"),
    (8, "comp"),
    (9, "pm"),
)


def _measurement_branches_pure(amps: np.ndarray, n: int, plan: Plan) -> np.ndarray:
    """Amplitudes per joint outcome: A[o, s] = <v_o| psi restricted to the
    kept qubits. Returns shape (2^m, 2^k) with outcomes in plan order."""
    m = len(plan)
    row = _LETTERS[:n]
    olet = _LETTERS[n : n + m]
    subs, operands = [], []
    for idx, (q, kind) in enumerate(plan):
        subs.append(olet[idx] + row[q - 1])
        operands.append(_MEASUREMENT_BRAS[kind])
    measured = {q for q, _ in plan}
    kept = [q for q in range(1, n + 1) if q not in measured]
    out = olet + "".join(row[q - 1] for q in kept)
    expr = ",".join(subs) + "," + row + "->" + out
    res = np.einsum(expr, *operands, amps.reshape((2,) * n), optimize=True)
    return res.reshape(2**m, 2 ** len(kept))


def _measurement_branches_density(rho: np.ndarray, n: int, plan: Plan) -> np.ndarray:
    """Unnormalized post-branch states of the kept qubits:
    W[o] = <v_o| rho |v_o> (partial inner product over the measured qubits).
    Returns shape (2^m, 2^k, 2^k); tr W[o] is the outcome probability."""
    m = len(plan)
    row = _LETTERS[:n]
    col = _LETTERS[n : 2 * n]
    olet = _LETTERS[2 * n : 2 * n + m]
    subs, operands = [], []
    for idx, (q, kind) in enumerate(plan):
        bras = _MEASUREMENT_BRAS[kind]
        operands.append(np.einsum("os,ot->ost", bras, np.conj(bras)))
        subs.append(olet[idx] + row[q - 1] + col[q - 1])
    measured = {q for q, _ in plan}
    kept = [q for q in range(1, n + 1) if q not in measured]
    out = olet + "".join(row[q - 1] for q in kept) + "".join(col[q - 1] for q in kept)
    expr = ",".join(subs) + "," + row + col + "->" + out
    res = np.einsum(expr, *operands, rho.reshape((2,) * (2 * n)), optimize=True)
    k = len(kept)
    return res.reshape(2**m, 2**k, 2**k)


def _correction_masks(plan: Plan, rules: Sequence[SyndromeRule]) -> tuple[np.ndarray, np.ndarray]:
    """Boolean masks over joint outcomes: apply Z (resp. X) on the data qubit
    when an odd number of the corresponding rules fired."""
    m = len(plan)
    pos = {q: k for k, (q, _) in enumerate(plan)}
    o = np.arange(2**m)
    bits = (o[:, None] >> np.arange(m - 1, -1, -1)) & 1
    z_mask = np.zeros(2**m, dtype=bool)
    x_mask = np.zeros(2**m, dtype=bool)
    for rule in rules:
        q1, q2 = rule.measured_pair
        t1, t2 = rule.trigger_outcome
        fired = (bits[:, pos[q1]] == t1) & (bits[:, pos[q2]] == t2)
        if rule.correction == "Z":
            z_mask ^= fired
        elif rule.correction == "X":
            x_mask ^= fired
        else:
            raise ValueError(f"unsupported correction {rule.correction!r}")
    return z_mask, x_mask


_Z_CONJ_SIGNS = np.array([[1.0, -1.0], [-1.0, 1.0]])


def _correct_branches_density(W: np.ndarray, z_mask: np.ndarray, x_mask: np.ndarray) -> np.ndarray:
    out = W.copy()
    out[z_mask] *= _Z_CONJ_SIGNS
    out[x_mask] = out[x_mask][:, ::-1, ::-1]
    return out


def _correct_branches_pure(A: np.ndarray, z_mask: np.ndarray, x_mask: np.ndarray) -> np.ndarray:
    out = A.copy()
    out[z_mask, 1] *= -1.0
    out[x_mask] = out[x_mask][:, ::-1]
    return out


# ---------------------------------------------------------------------------
# Two-qubit primitive
# ---------------------------------------------------------------------------

_TWO_QUBIT_ERROR_KINDS = ("none", "pauli", "superposed_phase")


def _single_branch_matrix(model: ErrorModel) -> np.ndarray | None:
    """2x2 branch matrix for single-branch error kinds, None for 'none'."""
    if model.kind == "none":
        return None
    if model.kind == "pauli":
        return {"X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}[model.pauli]
    if model.kind == "superposed_phase":
        return np.diag([model.a + model.b, model.a - model.b]).astype(np.complex128)
    raise ValueError(f"{model.kind!r} is not a single-branch error")


def two_qubit_pipeline(psi: PureState, error: ErrorModel) -> tuple[DensityMatrix, DensityMatrix]:
    """Encode |+>_1 |psi>_2 with CNOT_12, apply the error, decode with
    CZ_12 CNOT_12. Returns (recovered data qubit 2, absorbing ancilla 1).

    Supports phase-type errors only: a Z on either qubit or the superposed
    branch a*I + b*Z. A phase flip on qubit 2 is fully absorbed by the
    ancilla; one on qubit 1 propagates to the data instead.
    """
    if psi.n_qubits != 1:
        raise ValueError("two-qubit pipeline protects a single-qubit state")
    if error.kind not in _TWO_QUBIT_ERROR_KINDS:
        raise ValueError(f"unsupported error kind {error.kind!r} for this pipeline")
    if error.kind == "pauli" and error.pauli != "Z":
        raise ValueError("only Z errors are meaningful for the two-qubit primitive")
    if error.kind != "none" and error.position not in (1, 2):
        raise ValueError(f"error position {error.position} outside the two-qubit code")

    state = tensor([ket("+"), psi])
    state = embed_and_apply(cnot(1, 2), [1, 2], state)
    branch = _single_branch_matrix(error)
    if branch is not None:
        op = Operator(1, branch, unitary_flag=error.kind == "pauli")
        state = embed_and_apply(op, [error.position], state)
    state = embed_and_apply(cnot(1, 2), [1, 2], state)
    state = embed_and_apply(cz_pm(1, 2), [1, 2], state)
    rho = state.to_density()
    return partial_trace(rho, [2]), partial_trace(rho, [1])


# ---------------------------------------------------------------------------
# Three-qubit phase-flip code
# ---------------------------------------------------------------------------


def three_qubit_pipeline(psi: PureState, error: ErrorModel) -> DensityMatrix:
    """Encode alpha|0_l> + beta|1_l> on |+>_1 |psi>_2 |+>_3, apply the error,
    decode, measure qubits 1 and 3 with the coherence-destroying measurement
    and feed a Z onto the data qubit when the joint outcome is (1, 1).

    The recovered data state equals the input exactly for every supported
    error (no error, one Z anywhere, or a superposed phase branch).
    """
    if psi.n_qubits != 1:
        raise ValueError("three-qubit pipeline protects a single-qubit state")
    if error.kind not in _TWO_QUBIT_ERROR_KINDS:
        raise ValueError(f"unsupported error kind {error.kind!r} for this pipeline")
    if error.kind == "pauli" and error.pauli != "Z":
        raise ValueError("the three-qubit code corrects phase flips only")
    if error.kind != "none" and error.position not in (1, 2, 3):
        raise ValueError(f"error position {error.position} outside the three-qubit code")

    u1 = cluster_encode_u1((1, 2, 3))
    state = tensor([ket("+"), psi, ket("+")])
    state = embed_and_apply(u1, [1, 2, 3], state)
    branch = _single_branch_matrix(error)
    if branch is not None:
        op = Operator(1, branch, unitary_flag=error.kind == "pauli")
        state = embed_and_apply(op, [error.position], state)
    state = embed_and_apply(u1.dagger(), [1, 2, 3], state)

    A = _measurement_branches_pure(state.amplitudes, 3, THREE_MEASUREMENT_PLAN)
    z_mask, x_mask = _correction_masks(THREE_MEASUREMENT_PLAN, THREE_SYNDROME_RULES)
    A = _correct_branches_pure(A, z_mask, x_mask)
    recovered = np.einsum("os,ot->st", A, np.conj(A))
    return DensityMatrix(1, recovered)


# ---------------------------------------------------------------------------
# Error tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ErrorTableRow:
    """One row of a decode table.

    The two columns hold the decoded states for the two logical basis inputs
    (|0_l>, |1_l> for the phase table; |+_L>, |-_L> for the bit table).
    ``sign`` is the global sign of the second column relative to the
    canonical product form whose first nonzero amplitude is positive.
    """

    error_label: str
    decoded_on_zero: PureState
    decoded_on_one: PureState
    sign: int


def _global_sign(state: PureState) -> int:
    amps = state.amplitudes
    idx = int(np.argmax(np.abs(amps) > 1e-9))
    return 1 if amps[idx].real >= 0 else -1


def error_table_three() -> list[ErrorTableRow]:
    """Decode table of the three-qubit code: the inverse encoder applied to
    E |i_l> for E in {I, Z_1, Z_2, Z_3}."""
    u1_dag = cluster_encode_u1((1, 2, 3)).dagger()
    rows = []
    for label, position in (("I", None), ("Z_1", 1), ("Z_2", 2), ("Z_3", 3)):
        decoded = []
        for logical in (0, 1):
            state = logical_state_three(logical)
            if position is not None:
                state = embed_and_apply(pauli("Z"), [position], state)
            decoded.append(embed_and_apply(u1_dag, [1, 2, 3], state))
        rows.append(ErrorTableRow(label, decoded[0], decoded[1], _global_sign(decoded[1])))
    return rows


def _logical_pm_nine(sign: int) -> PureState:
    zero = logical_state_nine(0).amplitudes
    one = logical_state_nine(1).amplitudes
    return PureState(9, (zero + sign * one) * _SQRT2_INV)


def error_table_nine() -> list[ErrorTableRow]:
    """Decode table of the nine-qubit code: CZ_ab CZ_cb applied to
    X_{x_i} |+/-_L> for each cluster x. The three within-cluster positions i
    produce identical rows; a mismatch raises."""
    cz_ab = cluster_cz(CLUSTER_A, CLUSTER_B)
    cz_cb = cluster_cz(CLUSTER_C, CLUSTER_B)
    targets_ab = list(CLUSTER_A + CLUSTER_B)
    targets_cb = list(CLUSTER_C + CLUSTER_B)

    def decode(state: PureState) -> PureState:
        state = embed_and_apply(cz_cb, targets_cb, state)
        return embed_and_apply(cz_ab, targets_ab, state)

    rows = []
    for label, cluster in (("I", None), ("X_a_i", CLUSTER_A), ("X_b_i", CLUSTER_B), ("X_c_i", CLUSTER_C)):
        decoded_by_position: list[tuple[PureState, PureState]] = []
        positions = (None,) if cluster is None else cluster
        for position in positions:
            cols = []
            for sign in (+1, -1):
                state = _logical_pm_nine(sign)
                if position is not None:
                    state = embed_and_apply(pauli("X"), [position], state)
                cols.append(decode(state))
            decoded_by_position.append((cols[0], cols[1]))
        first = decoded_by_position[0]
        for other in decoded_by_position[1:]:
            for a, b in zip(first, other):
                dev = float(np.max(np.abs(a.amplitudes - b.amplitudes)))
                if dev > 1e-12:
                    raise AssertionError(
                        f"row {label}: within-cluster positions disagree by {dev:.3e}"
                    )
        rows.append(ErrorTableRow(label, first[0], first[1], _global_sign(first[1])))
    return rows


# Transcribed decode tables the computed ones are diffed against.
# Three-qubit: (label, column kets, sign of the |1_l> column).
_REFERENCE_THREE = (
    ("I", "+0+", "+1+", +1),
    ("Z_1", "-0+", "-1+", +1),
    ("Z_2", "-0-", "-1-", -1),
    ("Z_3", "+0-", "+1-", +1),
)
# Nine-qubit: (label, logical value of cluster a, of cluster c, sign of the
# |-_L> column); the middle cluster holds the logical +/- state.
_REFERENCE_NINE = (
    ("I", 0, 0, +1),
    ("X_a_i", 1, 0, +1),
    ("X_b_i", 1, 1, -1),
    ("X_c_i", 0, 1, +1),
)


def reference_table_three() -> list[tuple[str, np.ndarray, np.ndarray, int]]:
    """(label, expected column 0, expected column 1, sign) per row."""
    out = []
    for label, k0, k1, sign in _REFERENCE_THREE:
        out.append((label, ket(k0).amplitudes, sign * ket(k1).amplitudes, sign))
    return out


def reference_table_nine() -> list[tuple[str, np.ndarray, np.ndarray, int]]:
    out = []
    mid_plus = (logical_state_three(0).amplitudes + logical_state_three(1).amplitudes) * _SQRT2_INV
    mid_minus = (logical_state_three(0).amplitudes - logical_state_three(1).amplitudes) * _SQRT2_INV
    for label, ia, ic, sign in _REFERENCE_NINE:
        outer_a = cluster_basis_state(ia, "+", "+").amplitudes
        outer_c = cluster_basis_state(ic, "+", "+").amplitudes
        col0 = np.kron(outer_a, np.kron(mid_plus, outer_c))
        col1 = sign * np.kron(outer_a, np.kron(mid_minus, outer_c))
        out.append((label, col0, col1, sign))
    return out


# ---------------------------------------------------------------------------
# Nine-qubit protocol
# ---------------------------------------------------------------------------


@lru_cache(maxsize=1)
def _nine_circuit() -> tuple[tuple[np.ndarray, tuple[int, ...]], ...]:
    """Encoding gate sequence (first layer per cluster, then the two
    cluster-pair CZs), as (matrix, 0-based targets) in application order."""
    u1 = cluster_encode_u1((1, 2, 3)).entries
    cz_ab = cluster_cz(CLUSTER_A, CLUSTER_B).entries
    cz_cb = cluster_cz(CLUSTER_C, CLUSTER_B).entries
    return (
        (u1, (0, 1, 2)),
        (u1, (3, 4, 5)),
        (u1, (6, 7, 8)),
        (cz_ab, (0, 1, 2, 3, 4, 5)),
        (cz_cb, (6, 7, 8, 3, 4, 5)),
    )


@lru_cache(maxsize=1)
def _nine_masks() -> tuple[np.ndarray, np.ndarray]:
    return _correction_masks(NINE_MEASUREMENT_PLAN, NINE_SYNDROME_RULES)


# Bit weight of each register qubit in a 9-bit basis index.
_QUBIT_WEIGHT = {q: 2 ** (9 - q) for q in range(1, 10)}


@dataclass(frozen=True)
class NineQubitResult:
    """Everything the nine-qubit pipeline produces for one configuration."""

    fidelity: float
    data_state: DensityMatrix
    outcome_probabilities: np.ndarray
    register_state: DensityMatrix | None = None


def _normalize_errors(error) -> tuple[ErrorModel, ...]:
    if error is None:
        return ()
    if isinstance(error, ErrorModel):
        return (error,)
    return tuple(error)


def _is_single_branch(errors: tuple[ErrorModel, ...]) -> bool:
    return all(e.kind in ("none", "pauli", "superposed_phase") for e in errors)


def _assemble_register(W: np.ndarray, plan: Plan) -> DensityMatrix:
    """Rebuild the full post-measurement register state from the per-outcome
    data blocks. Measured ancillas are collapsed onto |outcome>, so the
    matrix is block diagonal over the ancilla computational basis."""
    m = len(plan)
    full = np.zeros((512, 512), dtype=np.complex128)
    data_weight = _QUBIT_WEIGHT[DATA_QUBIT]
    for o in range(2**m):
        base = 0
        for k, (q, _) in enumerate(plan):
            bit = (o >> (m - 1 - k)) & 1
            base += bit * _QUBIT_WEIGHT[q]
        for s in (0, 1):
            for t in (0, 1):
                full[base + s * data_weight, base + t * data_weight] = W[o, s, t]
    return DensityMatrix(9, full)


def nine_qubit_pipeline(
    theta: float,
    e: float,
    error,
    *,
    keep_register_state: bool = False,
) -> NineQubitResult:
    """Run the full nine-qubit protocol for one configuration.

    Steps: initialize the data state at b2 with |0> at a2, c2 and noisy
    coherent resources elsewhere; first-layer encode each cluster; apply the
    two cluster-pair CZs; apply the error model(s); invert the encoding;
    measure the six +/- ancillas and the two classical ancillas as a
    deterministic branch sum; apply the feed-forward corrections per branch;
    reduce to the data qubit and compare with the input.

    ``error`` is an ErrorModel, a sequence of ErrorModels applied in order,
    or None.
    """
    if not 0.0 <= theta <= np.pi + 1e-12:
        raise ValueError(f"theta = {theta!r} not in [0, pi]")
    if not 0.0 <= e <= 1.0:
        raise ValueError(f"e = {e!r} not in [0, 1]")
    errors = _normalize_errors(error)
    psi = data_state(theta)
    circuit = _nine_circuit()
    z_mask, x_mask = _nine_masks()

    if e == 0.0 and _is_single_branch(errors):
        plus = ket("+").amplitudes
        zero = ket("0").amplitudes
        slots = [plus, zero, plus, plus, psi.amplitudes, plus, plus, zero, plus]
        amps = slots[0]
        for s in slots[1:]:
            amps = np.kron(amps, s)
        for mat, targets in circuit:
            amps = _apply_matrix_pure(amps, 9, mat, targets)
        for model in errors:
            branch = _single_branch_matrix(model)
            if branch is not None:
                if not 1 <= model.position <= 9:
                    raise ValueError(f"error position {model.position} outside the register")
                amps = _apply_matrix_pure(amps, 9, branch, [model.position - 1])
        for mat, targets in reversed(circuit):
            amps = _apply_matrix_pure(amps, 9, mat.conj().T, targets)
        A = _measurement_branches_pure(amps, 9, NINE_MEASUREMENT_PLAN)
        A = _correct_branches_pure(A, z_mask, x_mask)
        W = np.einsum("os,ot->ost", A, np.conj(A))
    else:
        plus_rho = noisy_plus(e).entries
        zero_rho = np.diag([1.0, 0.0]).astype(np.complex128)
        slots = [
            plus_rho,
            zero_rho,
            plus_rho,
            plus_rho,
            psi.to_density().entries,
            plus_rho,
            plus_rho,
            zero_rho,
            plus_rho,
        ]
        rho = slots[0]
        for s in slots[1:]:
            rho = np.kron(rho, s)
        for mat, targets in circuit:
            rho = _apply_matrix_density(rho, 9, mat, targets)
        for model in errors:
            rho = _apply_error_model_arr(model, rho, 9, _ALL_NINE)
        for mat, targets in reversed(circuit):
            rho = _apply_matrix_density(rho, 9, mat.conj().T, targets)
        W = _measurement_branches_density(rho, 9, NINE_MEASUREMENT_PLAN)
        W = _correct_branches_density(W, z_mask, x_mask)

    probabilities = np.einsum("oss->o", W).real
    total = float(probabilities.sum())
    if abs(total - 1.0) > 1e-9:
        raise AssertionError(f"branch probabilities sum to {total!r}, expected 1")
    data = W.sum(axis=0)
    data = (data + data.conj().T) / 2.0
    data_dm = DensityMatrix(1, data)
    fid = fidelity(psi, data_dm)
    register = _assemble_register(W, NINE_MEASUREMENT_PLAN) if keep_register_state else None
    return NineQubitResult(fid, data_dm, probabilities, register)


def nine_qubit_protocol(theta: float, e: float, error) -> float:
    """Fidelity of the recovered data qubit with the initial state."""
    return nine_qubit_pipeline(theta, e, error).fidelity


# ---------------------------------------------------------------------------
# Incoherence inventory
# ---------------------------------------------------------------------------


def protocol_channel_zoo() -> list[tuple[str, KrausSet]]:
    """Every gate, channel and measurement the protocols use, as Kraus sets
    ready for the structural incoherence check. The conditional phase flip
    counterexample is intentionally not included; it is the one operation in
    the problem domain that fails the check."""
    u1 = cluster_encode_u1((1, 2, 3))
    zoo: list[tuple[str, KrausSet]] = [
        ("pauli_x", KrausSet.from_unitary(pauli("X"))),
        ("pauli_y", KrausSet.from_unitary(pauli("Y"))),
        ("pauli_z", KrausSet.from_unitary(pauli("Z"))),
        ("cnot", KrausSet.from_unitary(cnot(1, 2))),
        ("cz_pm", KrausSet.from_unitary(cz_pm(1, 2))),
        ("measurement_pm", measurement_kraus()),
        ("measurement_computational", computational_projectors()),
        ("depolarizing_0.30", depolarizing(0.30)),
        ("cluster_encoder", KrausSet.from_unitary(u1)),
        ("logical_x", KrausSet.from_unitary(logical_x((1, 2, 3)))),
        ("logical_z", KrausSet.from_unitary(logical_z((1, 2, 3)))),
        ("cluster_pair_cz", KrausSet.from_unitary(cluster_cz(CLUSTER_A, CLUSTER_B))),
    ]
    # Composed encode unitary of the nine-qubit code, certified as a whole.
    full = np.eye(512, dtype=np.complex128)
    for mat, targets in _nine_circuit():
        full = _compose_full(full, mat, targets)
    zoo.append(("nine_qubit_encoder", KrausSet.from_unitary(Operator(9, full))))
    return zoo


def _compose_full(acc: np.ndarray, mat: np.ndarray, targets0: tuple[int, ...]) -> np.ndarray:
    # Left-multiply the embedded gate: contract on the row axes, with the
    # column index carried along as a trailing batch axis.
    t = acc.reshape((2,) * 9 + (512,))
    return _apply_to_axes(t, mat, targets0).reshape(512, 512)
