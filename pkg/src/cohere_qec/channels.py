"""Error models and noisy resource-state preparation.

The single-qubit depolarizing channel is the stand-in for an arbitrary
single-qubit error. A "random qubit" error placement is evaluated as the
deterministic uniform average over positions, which is the exact expectation
and keeps every sweep reproducible; a seeded sampling mode is available for
Monte Carlo cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .gates import PAULI_X, PAULI_Y, PAULI_Z, IDENTITY_2
from .states import (
    DensityMatrix,
    KrausSet,
    Operator,
    _apply_matrix_density,
)

__all__ = [
    "ErrorModel",
    "no_error",
    "pauli_error",
    "superposed_error",
    "depolarizing_error",
    "noisy_plus",
    "depolarizing",
    "superposed_phase_error",
    "apply_error_model",
]

_PAULI_MATS = {"X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}


@dataclass(frozen=True)
class ErrorModel:
    """One error event applied between encode and decode.

    kind "none"             -- identity.
    kind "pauli"            -- the Pauli ``pauli`` at ``position``.
    kind "superposed_phase" -- the branch operator a*I + b*Z at ``position``,
                               with |a|^2 + |b|^2 = 1.
    kind "depolarizing"     -- strength ``d``; ``placement`` is a fixed
                               position, or None for the uniform average
                               over all code qubits.
    """

    kind: str
    pauli: str | None = None
    position: int | None = None
    a: complex = 1.0
    b: complex = 0.0
    d: float = 0.0
    placement: int | None = None

    def __post_init__(self) -> None:
        if self.kind == "none":
            return
        if self.kind == "pauli":
            if self.pauli not in _PAULI_MATS:
                raise ValueError(f"unknown Pauli {self.pauli!r}")
            if self.position is None or self.position < 1:
                raise ValueError("pauli error needs a 1-based position")
            return
        if self.kind == "superposed_phase":
            weight = abs(self.a) ** 2 + abs(self.b) ** 2
            if abs(weight - 1.0) > 1e-10:
                raise ValueError(f"|a|^2 + |b|^2 = {weight!r}, expected 1")
            if self.position is None or self.position < 1:
                raise ValueError("superposed error needs a 1-based position")
            return
        if self.kind == "depolarizing":
            if not 0.0 <= self.d <= 1.0:
                raise ValueError(f"depolarizing strength d = {self.d!r} not in [0, 1]")
            if self.placement is not None and self.placement < 1:
                raise ValueError("placement must be a 1-based position or None")
            return
        raise ValueError(f"unknown error kind {self.kind!r}")


def no_error() -> ErrorModel:
    return ErrorModel("none")


def pauli_error(name: str, position: int) -> ErrorModel:
    return ErrorModel("pauli", pauli=name.upper(), position=position)


def superposed_error(a: complex, b: complex, position: int) -> ErrorModel:
    return ErrorModel("superposed_phase", a=complex(a), b=complex(b), position=position)


def depolarizing_error(d: float, placement: int | None = None) -> ErrorModel:
    """Depolarizing at a fixed position, or averaged over the code when
    ``placement`` is None."""
    return ErrorModel("depolarizing", d=float(d), placement=placement)


def noisy_plus(e: float) -> DensityMatrix:
    """(1 - e) |+><+| + e I/2, the noisy coherent resource state."""
    if not 0.0 <= e <= 1.0:
        raise ValueError(f"noise parameter e = {e!r} not in [0, 1]")
    off = (1.0 - e) / 2.0
    return DensityMatrix(1, np.array([[0.5, off], [off, 0.5]], dtype=np.complex128))


def depolarizing(d: float) -> KrausSet:
    """Kraus set of the depolarizing channel
    rho -> (1-d) rho + d/3 (X rho X + Y rho Y + Z rho Z)."""
    if not 0.0 <= d <= 1.0:
        raise ValueError(f"depolarizing strength d = {d!r} not in [0, 1]")
    ops = (
        Operator(1, np.sqrt(1.0 - d) * IDENTITY_2, unitary_flag=False),
        Operator(1, np.sqrt(d / 3.0) * PAULI_X, unitary_flag=False),
        Operator(1, np.sqrt(d / 3.0) * PAULI_Y, unitary_flag=False),
        Operator(1, np.sqrt(d / 3.0) * PAULI_Z, unitary_flag=False),
    )
    return KrausSet(ops, ("I", "X", "Y", "Z"))


def superposed_phase_error(a: complex, b: complex) -> Operator:
    """The branch operator a*I + b*Z = diag(a+b, a-b), |a|^2 + |b|^2 = 1.

    Applied as a single linear branch, not a two-outcome channel. On a
    properly encoded register it preserves the norm without renormalization.
    """
    weight = abs(a) ** 2 + abs(b) ** 2
    if abs(weight - 1.0) > 1e-10:
        raise ValueError(f"|a|^2 + |b|^2 = {weight!r}, expected 1")
    mat = np.diag([a + b, a - b]).astype(np.complex128)
    return Operator(1, mat, unitary_flag=False)


# ---------------------------------------------------------------------------
# Application on raw arrays (shared with the code pipelines). Single-qubit
# Pauli conjugation is a bit permutation plus a sign pattern, so it is done
# with index arithmetic instead of tensor contractions.
# ---------------------------------------------------------------------------


_Z_SIGN = np.array([1.0, -1.0])
# Entries where the row and column bits of the target qubit agree.
_Z_EVEN_MASK = (_Z_SIGN[None, :, None, None, None, None] * _Z_SIGN[None, None, None, None, :, None] + 1.0) / 2.0


def _pauli_sandwich_arr(rho: np.ndarray, n: int, name: str, q0: int) -> np.ndarray:
    """P_q rho P_q^dag for a single-qubit Pauli: a single-bit row/column flip
    (X), a sign pattern (Z), or both (Y), applied on strided views."""
    dim = 2**n
    lead = 2**q0
    rest = 2 ** (n - 1 - q0)
    r = rho.reshape(lead, 2, rest, lead, 2, rest)
    if name == "X":
        return np.ascontiguousarray(r[:, ::-1, :, :, ::-1, :]).reshape(dim, dim)
    zs_row = _Z_SIGN[None, :, None, None, None, None]
    zs_col = _Z_SIGN[None, None, None, None, :, None]
    if name == "Z":
        return (r * zs_row * zs_col).reshape(dim, dim)
    if name == "Y":  # Y = i X Z, so Y rho Y^dag = X (Z rho Z) X
        signed = r * zs_row * zs_col
        return np.ascontiguousarray(signed[:, ::-1, :, :, ::-1, :]).reshape(dim, dim)
    raise ValueError(f"unknown Pauli {name!r}")


def _depolarize_at(rho: np.ndarray, n: int, q0: int, d: float) -> np.ndarray:
    # Split rho into the Z-even/Z-odd parts E and O at qubit q: then
    # Z rho Z = E - O, X rho X = flip(E) + flip(O), Y rho Y = flip(E) - flip(O),
    # so the channel output is (1 - 2d/3) E + (1 - 4d/3) O + (2d/3) flip(E).
    dim = 2**n
    lead = 2**q0
    rest = 2 ** (n - 1 - q0)
    r = rho.reshape(lead, 2, rest, lead, 2, rest)
    even = r * _Z_EVEN_MASK
    odd = r - even
    flipped_even = even[:, ::-1, :, :, ::-1, :]
    out = (1.0 - 2.0 * d / 3.0) * even
    out += (1.0 - 4.0 * d / 3.0) * odd
    out += (2.0 * d / 3.0) * flipped_even
    return out.reshape(dim, dim)


def _apply_error_model_arr(
    model: ErrorModel,
    rho: np.ndarray,
    n: int,
    code_qubits: Sequence[int],
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    if model.kind == "none":
        return rho
    if model.kind == "pauli":
        if model.position not in code_qubits:
            raise ValueError(f"position {model.position} is not a code qubit")
        return _pauli_sandwich_arr(rho, n, model.pauli, model.position - 1)
    if model.kind == "superposed_phase":
        if model.position not in code_qubits:
            raise ValueError(f"position {model.position} is not a code qubit")
        mat = np.diag([model.a + model.b, model.a - model.b]).astype(np.complex128)
        return _apply_matrix_density(rho, n, mat, [model.position - 1])
    # depolarizing
    if model.placement is not None:
        if model.placement not in code_qubits:
            raise ValueError(f"placement {model.placement} is not a code qubit")
        return _depolarize_at(rho, n, model.placement - 1, model.d)
    if rng is not None:
        q = int(rng.choice(np.asarray(code_qubits)))
        return _depolarize_at(rho, n, q - 1, model.d)
    acc = np.zeros_like(rho)
    for q in code_qubits:
        acc = acc + _depolarize_at(rho, n, q - 1, model.d)
    return acc / len(code_qubits)


def apply_error_model(
    model: ErrorModel,
    rho: DensityMatrix,
    code_qubits: Sequence[int],
    rng: np.random.Generator | None = None,
) -> DensityMatrix:
    """Apply an error model to the given code qubits.

    A depolarizing model without a fixed placement is evaluated as the
    uniform average over ``code_qubits``. Passing ``rng`` switches that case
    to sampling a single position instead (Monte Carlo mode).
    """
    if not code_qubits:
        raise ValueError("code_qubits must not be empty")
    for q in code_qubits:
        if not 1 <= q <= rho.n_qubits:
            raise ValueError(f"code qubit {q} out of range 1..{rho.n_qubits}")
    out = _apply_error_model_arr(model, rho.entries, rho.n_qubits, list(code_qubits), rng)
    normalized = rho.normalized and model.kind != "superposed_phase"
    if model.kind == "superposed_phase":
        normalized = rho.normalized and abs(float(np.trace(out).real) - 1.0) <= 1e-10
    return DensityMatrix(rho.n_qubits, out, normalized=normalized)
