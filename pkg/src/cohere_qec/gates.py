"""Constructors for the operators used by the coherence-consuming codes.

Index conventions:

* ``cnot(m, n)``: qubit m controls, qubit n is the target,
  |0>_m |psi>_n -> |0>_m |psi>_n and |1>_m |psi>_n -> |1>_m X|psi>_n.
* ``cz_pm(m, n)``: controlled phase flip in the |+>/|-> basis of qubit m,
  |+>_m |psi>_n -> |+>_m |psi>_n and |->_m |psi>_n -> |->_m Z|psi>_n.
  On computational basis states this acts as |i>_m |j>_n -> |i xor j>_m |j>_n,
  which is the same matrix as ``cnot(n, m)``.

Every constructor returns the matrix in the factor order of the indices it
was given; apply it with the same index list, e.g.
``embed_and_apply(cnot(4, 5), [4, 5], state)``. Composite operators (the
first-layer cluster encoder, logical bit/phase flips, the cluster-pair CZ)
are always built from the one- and two-qubit primitives so that any
convention bug surfaces in the table tests, never hard-coded.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .states import KrausSet, Operator, _embed_matrix

__all__ = [
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "IDENTITY_2",
    "HADAMARD",
    "pauli",
    "identity",
    "cnot",
    "cz_pm",
    "measurement_kraus",
    "computational_projectors",
    "cluster_encode_u1",
    "logical_x",
    "logical_z",
    "cluster_cz",
    "cz_132",
    "GateSpec",
]

IDENTITY_2 = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)

_PAULIS = {"I": IDENTITY_2, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}

# Basis order (00, 01, 10, 11) with the first index as the first factor.
_CNOT_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)
# |i>|j> -> |i xor j>|j>
_CZ_PM_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=np.complex128
)

_KET_PLUS = np.array([1, 1], dtype=np.complex128) / np.sqrt(2.0)
_KET_MINUS = np.array([1, -1], dtype=np.complex128) / np.sqrt(2.0)


def pauli(name: str) -> Operator:
    """Single-qubit Pauli operator ``X``, ``Y``, ``Z`` (or ``I``)."""
    try:
        return Operator(1, _PAULIS[name.upper()])
    except KeyError:
        raise ValueError(f"unknown Pauli {name!r}") from None


def identity(arity: int = 1) -> Operator:
    return Operator(arity, np.eye(2**arity, dtype=np.complex128))


def _require_distinct(indices: Sequence[int], what: str) -> None:
    if len(set(indices)) != len(indices):
        raise ValueError(f"{what} requires distinct qubit indices, got {list(indices)}")
    if any(i < 1 for i in indices):
        raise ValueError(f"{what} indices must be >= 1, got {list(indices)}")


def cnot(control: int, target: int) -> Operator:
    """CNOT with the first index as control; apply on [control, target]."""
    _require_distinct((control, target), "cnot")
    return Operator(2, _CNOT_MATRIX)


def cz_pm(control: int, target: int) -> Operator:
    """Controlled phase flip in the +/- basis of the first index."""
    _require_distinct((control, target), "cz_pm")
    return Operator(2, _CZ_PM_MATRIX)


def measurement_kraus() -> KrausSet:
    """The coherence-destroying measurement {K0 = |0><+|, K1 = |1><-|}."""
    k0 = np.outer(np.array([1, 0], dtype=np.complex128), _KET_PLUS.conj())
    k1 = np.outer(np.array([0, 1], dtype=np.complex128), _KET_MINUS.conj())
    return KrausSet(
        (Operator(1, k0, unitary_flag=False), Operator(1, k1, unitary_flag=False)),
        ("0", "1"),
    )


def computational_projectors() -> KrausSet:
    """Projective measurement {|0><0|, |1><1|} in the computational basis."""
    p0 = np.diag([1.0, 0.0]).astype(np.complex128)
    p1 = np.diag([0.0, 1.0]).astype(np.complex128)
    return KrausSet(
        (Operator(1, p0, unitary_flag=False), Operator(1, p1, unitary_flag=False)),
        ("0", "1"),
    )


def cluster_encode_u1(cluster: Sequence[int]) -> Operator:
    """First-layer encoder of a 3-qubit cluster (x1, x2, x3).

    Returns CNOT_{x3 x2} CNOT_{x1 x2} in the factor order (x1, x2, x3), so
    that it maps |j>_x1 |i>_x2 |k>_x3 to the encoded cluster basis state with
    logical value i and sign marks (j, k).
    """
    if len(cluster) != 3:
        raise ValueError("cluster must contain exactly 3 qubit indices")
    _require_distinct(cluster, "cluster_encode_u1")
    first = _embed_matrix(_CNOT_MATRIX, [0, 1], 3)  # control x1, target x2
    second = _embed_matrix(_CNOT_MATRIX, [2, 1], 3)  # control x3, target x2
    return Operator(3, second @ first)


def logical_x(cluster: Sequence[int]) -> Operator:
    """Bit flip on the logical index of a cluster: U1 X_{x2} U1^dag."""
    u1 = cluster_encode_u1(cluster).entries
    mid_x = _embed_matrix(PAULI_X, [1], 3)
    return Operator(3, u1 @ mid_x @ u1.conj().T)


def logical_z(cluster: Sequence[int]) -> Operator:
    """Phase flip on the logical index of a cluster: U1 Z_{x2} U1^dag."""
    u1 = cluster_encode_u1(cluster).entries
    mid_z = _embed_matrix(PAULI_Z, [1], 3)
    return Operator(3, u1 @ mid_z @ u1.conj().T)


def cluster_cz(a: Sequence[int], b: Sequence[int]) -> Operator:
    """Controlled phase flip between two 3-qubit clusters.

    Built as (U1_a U1_b) CZ_{a2 b2} (U1_a U1_b)^dag in the factor order
    (a1, a2, a3, b1, b2, b3). On cluster basis states it acts only on the
    logical indices: (i, l) -> (i xor l, l), leaving all sign marks intact.
    """
    indices = tuple(a) + tuple(b)
    if len(a) != 3 or len(b) != 3:
        raise ValueError("cluster_cz needs two clusters of exactly 3 qubits")
    _require_distinct(indices, "cluster_cz")
    u1a = _embed_matrix(cluster_encode_u1((1, 2, 3)).entries, [0, 1, 2], 6)
    u1b = _embed_matrix(cluster_encode_u1((1, 2, 3)).entries, [3, 4, 5], 6)
    mid = _embed_matrix(_CZ_PM_MATRIX, [1, 4], 6)  # control a2, target b2
    u1 = u1a @ u1b
    return Operator(6, u1 @ mid @ u1.conj().T)


def cz_132(q1: int, q2: int, q3: int) -> Operator:
    """Conditional phase flip on the middle qubit when qubits 1 and 3 are
    both |->; identity on the other three +/- sign sectors.

    This operation is *not* incoherent: acting on |0>|1>|0> it produces an
    entangled coherent state.
    """
    _require_distinct((q1, q2, q3), "cz_132")
    p_minus = np.outer(_KET_MINUS, _KET_MINUS.conj())
    mat = np.eye(8, dtype=np.complex128) + np.kron(
        p_minus, np.kron(PAULI_Z - IDENTITY_2, p_minus)
    )
    return Operator(3, mat)


_GATE_ARITIES = {
    "X": 1,
    "Y": 1,
    "Z": 1,
    "CNOT": 2,
    "CZ_PM": 2,
    "MEAS": 1,
    "U1_CLUSTER": 3,
    "U2_CLUSTER": 6,
    "LOGICAL_X": 3,
    "LOGICAL_Z": 3,
    "CZ_132": 3,
}


@dataclass(frozen=True)
class GateSpec:
    """A named gate with the qubit indices it acts on."""

    kind: str
    targets: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.kind not in _GATE_ARITIES:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        want = _GATE_ARITIES[self.kind]
        if len(self.targets) != want:
            raise ValueError(
                f"{self.kind} acts on {want} qubits, got targets {list(self.targets)}"
            )
        object.__setattr__(self, "targets", tuple(self.targets))

    def build(self) -> Operator | KrausSet:
        kind, t = self.kind, self.targets
        if kind in ("X", "Y", "Z"):
            return pauli(kind)
        if kind == "CNOT":
            return cnot(*t)
        if kind == "CZ_PM":
            return cz_pm(*t)
        if kind == "MEAS":
            return measurement_kraus()
        if kind == "U1_CLUSTER":
            return cluster_encode_u1(t)
        if kind == "U2_CLUSTER":
            return cluster_cz(t[:3], t[3:])
        if kind == "LOGICAL_X":
            return logical_x(t)
        if kind == "LOGICAL_Z":
            return logical_z(t)
        return cz_132(*t)
