"""Dense state-vector and density-matrix primitives for small qubit registers.

Conventions used throughout the package:

* Qubit positions are 1-based.
* Qubit 1 is the leftmost tensor factor, i.e. the most significant bit of a
  basis index: the state |b1 b2 ... bn> sits at index sum_m b_m * 2**(n - m).
  This makes every ket written in left-to-right order directly transcribable
  into an amplitude vector.
* Gate application embeds operators by index arithmetic (tensordot over the
  target axes) instead of padding with explicit identity factors, so one
  k-qubit gate on an n-qubit register costs O(4^k * 2^n) rather than O(4^n).

All values are immutable after construction; every operation returns a new
value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

__all__ = [
    "PureState",
    "DensityMatrix",
    "Operator",
    "KrausSet",
    "ket",
    "tensor",
    "embed_and_apply",
    "apply_kraus",
    "partial_trace",
    "fidelity",
    "NORM_ATOL",
    "HERMITIAN_ATOL",
    "TRACE_ATOL",
    "EIGENVALUE_FLOOR",
    "UNITARY_ATOL",
    "KRAUS_COMPLETENESS_ATOL",
]

NORM_ATOL = 1e-12
HERMITIAN_ATOL = 1e-12
TRACE_ATOL = 1e-12
# Kraus arithmetic introduces rounding at the 1e-14 scale, so positivity is
# checked against a small negative floor instead of exact zero.
EIGENVALUE_FLOOR = -1e-10
UNITARY_ATOL = 1e-12
KRAUS_COMPLETENESS_ATOL = 1e-10


def _freeze(array: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(array, dtype=np.complex128)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class PureState:
    """Normalized complex amplitude vector over ``n_qubits`` qubits.

    ``normalized=False`` marks an intermediate state produced by a
    non-unitary branch operator; such states skip the norm check.
    ``pre_norm`` records the norm the state had before an explicit
    renormalization, when one was requested.
    """

    n_qubits: int
    amplitudes: np.ndarray
    normalized: bool = True
    pre_norm: float | None = None

    def __post_init__(self) -> None:
        amps = _freeze(np.asarray(self.amplitudes).reshape(-1))
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        if amps.shape != (2**self.n_qubits,):
            raise ValueError(
                f"amplitude vector has length {amps.shape[0]}, "
                f"expected {2**self.n_qubits}"
            )
        if self.normalized:
            sumsq = float(np.sum(np.abs(amps) ** 2))
            if abs(sumsq - 1.0) > 1e-9:
                raise ValueError(f"state is not normalized: sum |a|^2 = {sumsq!r}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def to_density(self) -> "DensityMatrix":
        outer = np.outer(self.amplitudes, np.conj(self.amplitudes))
        return DensityMatrix(self.n_qubits, outer, normalized=self.normalized)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian unit-trace matrix over ``n_qubits`` qubits.

    Hermiticity and trace are validated at construction. Positivity is a
    class invariant but is only verified on demand (``validate_positive``)
    because it needs an eigendecomposition.
    """

    n_qubits: int
    entries: np.ndarray
    normalized: bool = True

    def __post_init__(self) -> None:
        mat = _freeze(np.asarray(self.entries))
        dim = 2**self.n_qubits
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        if mat.shape != (dim, dim):
            raise ValueError(f"matrix has shape {mat.shape}, expected {(dim, dim)}")
        herm_dev = float(np.max(np.abs(mat - mat.conj().T)))
        if herm_dev > 1e-9:
            raise ValueError(f"matrix is not Hermitian: max deviation {herm_dev:.3e}")
        if self.normalized:
            tr = complex(np.trace(mat))
            if abs(tr - 1.0) > 1e-9:
                raise ValueError(f"trace is {tr!r}, expected 1")
        object.__setattr__(self, "entries", mat)

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def validate_positive(self, floor: float = EIGENVALUE_FLOOR) -> float:
        """Return the smallest eigenvalue; raise if it is below ``floor``."""
        smallest = float(np.linalg.eigvalsh(self.entries)[0])
        if smallest < floor:
            raise ValueError(f"density matrix has eigenvalue {smallest:.3e} < {floor}")
        return smallest


@dataclass(frozen=True)
class Operator:
    """A 2^arity x 2^arity matrix acting on ``arity`` qubits.

    The matrix is stored in its canonical factor order; the qubits it acts
    on are supplied as an explicit target list at application time.
    """

    arity: int
    entries: np.ndarray
    unitary_flag: bool = True

    def __post_init__(self) -> None:
        mat = _freeze(np.asarray(self.entries))
        dim = 2**self.arity
        if mat.shape != (dim, dim):
            raise ValueError(f"matrix has shape {mat.shape}, expected {(dim, dim)}")
        if self.unitary_flag:
            dev = float(np.max(np.abs(mat.conj().T @ mat - np.eye(dim))))
            if dev > UNITARY_ATOL:
                raise ValueError(f"matrix is not unitary: max deviation {dev:.3e}")
        object.__setattr__(self, "entries", mat)

    def dagger(self) -> "Operator":
        return Operator(self.arity, self.entries.conj().T, self.unitary_flag)


@dataclass(frozen=True)
class KrausSet:
    """Ordered Kraus operators forming a completely positive trace-preserving
    map, with one outcome label per operator."""

    operators: tuple[Operator, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        ops = tuple(self.operators)
        if not ops:
            raise ValueError("Kraus set must contain at least one operator")
        arity = ops[0].arity
        if any(op.arity != arity for op in ops):
            raise ValueError("Kraus operators must act on the same qubit count")
        labels = tuple(self.labels) if self.labels else tuple(str(i) for i in range(len(ops)))
        if len(labels) != len(ops):
            raise ValueError("need exactly one label per Kraus operator")
        dev = kraus_completeness_deviation(ops)
        if dev > KRAUS_COMPLETENESS_ATOL:
            raise ValueError(
                f"Kraus set is not complete: ||sum K^dag K - I||_max = {dev:.3e}"
            )
        object.__setattr__(self, "operators", ops)
        object.__setattr__(self, "labels", labels)

    @property
    def arity(self) -> int:
        return self.operators[0].arity

    @classmethod
    def from_unitary(cls, op: Operator, label: str = "u") -> "KrausSet":
        return cls((op,), (label,))


State = Union[PureState, DensityMatrix]


def kraus_completeness_deviation(ops: Sequence[Operator]) -> float:
    dim = 2 ** ops[0].arity
    acc = np.zeros((dim, dim), dtype=np.complex128)
    for op in ops:
        acc += op.entries.conj().T @ op.entries
    return float(np.max(np.abs(acc - np.eye(dim))))


_KET_CHARS = {
    "0": np.array([1.0, 0.0], dtype=np.complex128),
    "1": np.array([0.0, 1.0], dtype=np.complex128),
    "+": np.array([1.0, 1.0], dtype=np.complex128) / np.sqrt(2.0),
    "-": np.array([1.0, -1.0], dtype=np.complex128) / np.sqrt(2.0),
}


def ket(spec: str) -> PureState:
    """Build a product state from a character string, e.g. ``ket("+0-")``.

    Characters: ``0``, ``1``, ``+``, ``-``. The first character is qubit 1.
    """
    if not spec:
        raise ValueError("ket spec must contain at least one character")
    amps = np.array([1.0], dtype=np.complex128)
    for ch in spec:
        try:
            amps = np.kron(amps, _KET_CHARS[ch])
        except KeyError:
            raise ValueError(f"unknown ket character {ch!r}; expected one of 01+-") from None
    return PureState(len(spec), amps)


def tensor(factors: Sequence[State]) -> State:
    """Tensor product of states, in left-to-right (qubit 1 first) order."""
    if not factors:
        raise ValueError("tensor needs at least one factor")
    kinds = {type(f) for f in factors}
    if len(kinds) != 1:
        raise ValueError("cannot tensor mixed state kinds (pure and density)")
    n = sum(f.n_qubits for f in factors)
    if isinstance(factors[0], PureState):
        amps = factors[0].amplitudes
        for f in factors[1:]:
            amps = np.kron(amps, f.amplitudes)
        normalized = all(f.normalized for f in factors)
        return PureState(n, amps, normalized=normalized)
    mat = factors[0].entries
    for f in factors[1:]:
        mat = np.kron(mat, f.entries)
    normalized = all(f.normalized for f in factors)
    return DensityMatrix(n, mat, normalized=normalized)


# ---------------------------------------------------------------------------
# Array-level kernels. These work on bare ndarrays with 0-based targets and
# are shared by the typed API below and by the pipeline code, which avoids
# re-validating wrapper invariants at every intermediate step.
# ---------------------------------------------------------------------------


def _apply_to_axes(tensor_in: np.ndarray, mat: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    """Contract a 2^k x 2^k matrix into the given axes of a rank-m tensor."""
    k = len(axes)
    op = mat.reshape((2,) * (2 * k))
    out = np.tensordot(op, tensor_in, axes=(tuple(range(k, 2 * k)), tuple(axes)))
    return np.moveaxis(out, tuple(range(k)), tuple(axes))


def _apply_matrix_pure(amps: np.ndarray, n: int, mat: np.ndarray, targets0: Sequence[int]) -> np.ndarray:
    t = amps.reshape((2,) * n)
    return _apply_to_axes(t, mat, targets0).reshape(-1)


def _apply_matrix_density(
    rho: np.ndarray, n: int, mat: np.ndarray, targets0: Sequence[int]
) -> np.ndarray:
    # rho -> M rho M^dag: contract M on the row axes, conj(M) on the column axes.
    t = rho.reshape((2,) * (2 * n))
    t = _apply_to_axes(t, mat, targets0)
    t = _apply_to_axes(t, np.conj(mat), [n + q for q in targets0])
    return t.reshape(2**n, 2**n)


def _embed_matrix(mat: np.ndarray, targets0: Sequence[int], n: int) -> np.ndarray:
    """Materialize a k-qubit matrix as a full 2^n x 2^n matrix."""
    eye = np.eye(2**n, dtype=np.complex128).reshape((2,) * (2 * n))
    return _apply_to_axes(eye, mat, targets0).reshape(2**n, 2**n)


def _partial_trace_arr(rho: np.ndarray, n: int, keep0: Sequence[int]) -> np.ndarray:
    import string

    letters = string.ascii_lowercase + string.ascii_uppercase
    if 2 * n > len(letters):
        raise ValueError("too many qubits for partial trace")
    row = list(letters[:n])
    col = list(letters[n : 2 * n])
    for q in range(n):
        if q not in keep0:
            col[q] = row[q]
    kept = sorted(keep0)
    out = "".join(row[q] for q in kept) + "".join(col[q] for q in kept)
    sub = "".join(row) + "".join(col)
    k = len(kept)
    reduced = np.einsum(f"{sub}->{out}", rho.reshape((2,) * (2 * n)))
    return reduced.reshape(2**k, 2**k)


def _validate_targets(targets: Sequence[int], arity: int, n: int) -> list[int]:
    if len(targets) != arity:
        raise ValueError(f"operator acts on {arity} qubits but {len(targets)} targets given")
    if len(set(targets)) != len(targets):
        raise ValueError(f"target qubits must be distinct, got {list(targets)}")
    for t in targets:
        if not 1 <= t <= n:
            raise ValueError(f"target qubit {t} out of range 1..{n}")
    return [t - 1 for t in targets]


# ---------------------------------------------------------------------------
# Typed operations
# ---------------------------------------------------------------------------


def embed_and_apply(
    op: Operator,
    targets: Sequence[int],
    state: State,
    *,
    renormalize: bool = False,
) -> State:
    """Apply ``op`` to the given 1-based target qubits of ``state``.

    Unitary operators map pure states to pure states and density matrices as
    rho -> U rho U^dag. A non-unitary operator is applied as a single branch;
    the pre-application norm (or trace) is recorded and the result is divided
    by it only when ``renormalize`` is set.
    """
    n = state.n_qubits
    targets0 = _validate_targets(targets, op.arity, n)
    if isinstance(state, PureState):
        amps = _apply_matrix_pure(state.amplitudes, n, op.entries, targets0)
        if op.unitary_flag:
            return PureState(n, amps, normalized=state.normalized)
        norm = float(np.linalg.norm(amps))
        if renormalize:
            if norm == 0.0:
                raise ValueError("cannot renormalize a zero-amplitude branch")
            return PureState(n, amps / norm, pre_norm=norm)
        is_unit = state.normalized and abs(norm - 1.0) <= 1e-10
        return PureState(n, amps, normalized=is_unit, pre_norm=norm)
    mat = _apply_matrix_density(state.entries, n, op.entries, targets0)
    if op.unitary_flag:
        return DensityMatrix(n, mat, normalized=state.normalized)
    tr = float(np.trace(mat).real)
    if renormalize:
        if tr <= 0.0:
            raise ValueError("cannot renormalize a zero-trace branch")
        return DensityMatrix(n, mat / tr)
    is_unit = state.normalized and abs(tr - 1.0) <= 1e-10
    return DensityMatrix(n, mat, normalized=is_unit)


def apply_kraus(
    channel: KrausSet | Sequence[Operator],
    targets: Sequence[int],
    rho: DensityMatrix,
) -> DensityMatrix:
    """Apply a CPTP map on the target qubits: rho -> sum_l K_l rho K_l^dag."""
    ops = channel.operators if isinstance(channel, KrausSet) else tuple(channel)
    dev = kraus_completeness_deviation(ops)
    if dev > KRAUS_COMPLETENESS_ATOL:
        raise ValueError(
            f"Kraus set is not complete: ||sum K^dag K - I||_max = {dev:.3e}"
        )
    n = rho.n_qubits
    targets0 = _validate_targets(targets, ops[0].arity, n)
    acc = np.zeros_like(rho.entries)
    for op in ops:
        acc = acc + _apply_matrix_density(rho.entries, n, op.entries, targets0)
    return DensityMatrix(n, acc, normalized=rho.normalized)


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Reduced density matrix on ``keep`` (1-based), in original qubit order."""
    if not keep:
        raise ValueError("keep list must not be empty")
    if len(set(keep)) != len(keep):
        raise ValueError("keep qubits must be distinct")
    for q in keep:
        if not 1 <= q <= rho.n_qubits:
            raise ValueError(f"keep qubit {q} out of range 1..{rho.n_qubits}")
    keep0 = [q - 1 for q in keep]
    reduced = _partial_trace_arr(rho.entries, rho.n_qubits, keep0)
    return DensityMatrix(len(keep), reduced, normalized=rho.normalized)


def fidelity(psi: PureState, rho: DensityMatrix) -> float:
    """Fidelity <psi| rho |psi> between a pure state and a density matrix."""
    if psi.n_qubits != rho.n_qubits:
        raise ValueError(
            f"dimension mismatch: state has {psi.n_qubits} qubits, "
            f"density matrix has {rho.n_qubits}"
        )
    val = np.vdot(psi.amplitudes, rho.entries @ psi.amplitudes)
    return float(val.real)
