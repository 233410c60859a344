"""Shared test utilities."""

from __future__ import annotations

import numpy as np

from cohere_qec import DensityMatrix, PureState


def random_pure_state(n_qubits: int, rng: np.random.Generator) -> PureState:
    v = rng.standard_normal(2**n_qubits) + 1j * rng.standard_normal(2**n_qubits)
    v /= np.linalg.norm(v)
    return PureState(n_qubits, v)


def random_density(n_qubits: int, rng: np.random.Generator) -> DensityMatrix:
    dim = 2**n_qubits
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    mat = g @ g.conj().T
    mat /= np.trace(mat).real
    mat = (mat + mat.conj().T) / 2.0
    return DensityMatrix(n_qubits, mat)


def random_phase_pair(rng: np.random.Generator) -> tuple[complex, complex]:
    """(a, b) with |a|^2 + |b|^2 = 1."""
    v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    v /= np.linalg.norm(v)
    return complex(v[0]), complex(v[1])


def assert_states_equal(actual, expected, atol: float = 1e-12) -> None:
    a = actual.amplitudes if isinstance(actual, PureState) else np.asarray(actual)
    b = expected.amplitudes if isinstance(expected, PureState) else np.asarray(expected)
    np.testing.assert_allclose(a, b, atol=atol, rtol=0)


def assert_density_equal(actual, expected, atol: float = 1e-12) -> None:
    a = actual.entries if isinstance(actual, DensityMatrix) else np.asarray(actual)
    b = expected.entries if isinstance(expected, DensityMatrix) else np.asarray(expected)
    np.testing.assert_allclose(a, b, atol=atol, rtol=0)
