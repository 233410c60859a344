"""Coherence quantification and incoherence verification.

The concrete coherence measure is the l1 norm of coherence, the sum of the
magnitudes of all off-diagonal density-matrix entries in the computational
basis. It vanishes exactly on diagonal (incoherent) states, is convex, and
is non-increasing under incoherent operations.

An operation is structurally incoherent when each of its Kraus matrices has
at most one nonzero entry per column, i.e. maps every basis state to a
single basis ray. The structural test is authoritative; a behavioral
cross-check (diagonal in, diagonal out on every basis state) is provided
but a structural failure always wins.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .states import DensityMatrix, KrausSet, apply_kraus

__all__ = [
    "l1_coherence",
    "is_incoherent_state",
    "IncoherenceDiagnostic",
    "is_incoherent_kraus_set",
    "is_incoherent_channel_behavioral",
    "MonotonicityReport",
    "monotonicity_audit",
    "random_density_matrix",
]


def l1_coherence(rho: DensityMatrix) -> float:
    """Sum of |rho_ij| over all off-diagonal entries; 0 iff diagonal."""
    mat = rho.entries
    return float(np.sum(np.abs(mat)) - np.sum(np.abs(np.diag(mat))))


def is_incoherent_state(rho: DensityMatrix, tol: float = 1e-12) -> bool:
    """True iff every off-diagonal entry has magnitude <= tol."""
    mat = np.abs(rho.entries.copy())
    np.fill_diagonal(mat, 0.0)
    return bool(np.max(mat) <= tol)


@dataclass(frozen=True)
class IncoherenceDiagnostic:
    """Result of the structural incoherence check.

    ``offending`` lists (operator index, column) pairs whose column maps a
    basis state onto a superposition of more than one basis ray.
    """

    ok: bool
    offending: tuple[tuple[int, int], ...]

    def __bool__(self) -> bool:
        return self.ok


def is_incoherent_kraus_set(channel: KrausSet, tol: float = 1e-12) -> IncoherenceDiagnostic:
    """Structural incoherence: at most one entry of magnitude > tol per column
    of every Kraus matrix."""
    offending: list[tuple[int, int]] = []
    for idx, op in enumerate(channel.operators):
        counts = np.sum(np.abs(op.entries) > tol, axis=0)
        for col in np.nonzero(counts > 1)[0]:
            offending.append((idx, int(col)))
    return IncoherenceDiagnostic(not offending, tuple(offending))


def is_incoherent_channel_behavioral(channel: KrausSet, tol: float = 1e-10) -> bool:
    """Cross-check: does the channel map every basis state to a diagonal
    state? Necessary but not authoritative; use the structural test."""
    dim = 2**channel.arity
    targets = list(range(1, channel.arity + 1))
    for i in range(dim):
        mat = np.zeros((dim, dim), dtype=np.complex128)
        mat[i, i] = 1.0
        out = apply_kraus(channel, targets, DensityMatrix(channel.arity, mat))
        if not is_incoherent_state(out, tol):
            return False
    return True


def random_density_matrix(n_qubits: int, rng: np.random.Generator) -> DensityMatrix:
    """Full-rank random state: G G^dag / tr(G G^dag) with G complex Gaussian."""
    dim = 2**n_qubits
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    mat = g @ g.conj().T
    mat /= np.trace(mat).real
    # Symmetrize away the last few ulps so construction checks never trip.
    mat = (mat + mat.conj().T) / 2.0
    return DensityMatrix(n_qubits, mat)


@dataclass(frozen=True)
class MonotonicityReport:
    """Outcome of a sampled check that a channel never increases coherence."""

    samples: int
    max_increase: float
    violations: int
    tolerance: float


def monotonicity_audit(
    channel: KrausSet,
    targets: Sequence[int],
    n_qubits: int,
    n_samples: int = 100,
    seed: int = 0,
    tol: float = 1e-9,
) -> MonotonicityReport:
    """Sample random states, apply the channel, and report the largest
    observed l1-coherence increase.

    Only meaningful for structurally incoherent channels; for anything else
    the audit would be vacuous, so it refuses to run.
    """
    diag = is_incoherent_kraus_set(channel)
    if not diag.ok:
        raise ValueError(
            "channel is not structurally incoherent (offending columns: "
            f"{diag.offending}); a monotonicity audit would be vacuous"
        )
    rng = np.random.default_rng(seed)
    max_increase = -np.inf
    violations = 0
    for _ in range(n_samples):
        rho = random_density_matrix(n_qubits, rng)
        before = l1_coherence(rho)
        after = l1_coherence(apply_kraus(channel, targets, rho))
        increase = after - before
        max_increase = max(max_increase, increase)
        if increase > tol:
            violations += 1
    return MonotonicityReport(n_samples, float(max_increase), violations, tol)
