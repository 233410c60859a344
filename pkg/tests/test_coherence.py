import numpy as np
import pytest

from cohere_qec import (
    DensityMatrix,
    KrausSet,
    cnot,
    cz_132,
    is_incoherent_kraus_set,
    is_incoherent_state,
    ket,
    l1_coherence,
    measurement_kraus,
    monotonicity_audit,
    noisy_plus,
    random_density_matrix,
)
from cohere_qec.coherence import is_incoherent_channel_behavioral
from cohere_qec.codes import protocol_channel_zoo

from helpers import random_density


class TestL1Coherence:
    def test_maximally_coherent_qubit(self):
        assert l1_coherence(ket("+").to_density()) == pytest.approx(1.0, abs=1e-12)

    def test_diagonal_states_have_none(self):
        rng = np.random.default_rng(1)
        for _ in range(5):
            p = rng.dirichlet(np.ones(4))
            rho = DensityMatrix(2, np.diag(p).astype(complex))
            assert l1_coherence(rho) == 0.0

    def test_noisy_plus_interpolates(self):
        for e in (0.0, 0.3, 0.8, 1.0):
            assert l1_coherence(noisy_plus(e)) == pytest.approx(1.0 - e, abs=1e-12)

    def test_zero_iff_incoherent(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            rho = random_density(2, rng)
            assert (l1_coherence(rho) < 1e-12) == is_incoherent_state(rho, 1e-12)
            diag = DensityMatrix(2, np.diag(np.diag(rho.entries)) / rho.entries.trace().real)
            assert (l1_coherence(diag) < 1e-12) == is_incoherent_state(diag, 1e-12)

    def test_convexity(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            rho, sigma = random_density(2, rng), random_density(2, rng)
            lam = rng.uniform()
            mix = DensityMatrix(2, lam * rho.entries + (1 - lam) * sigma.entries)
            bound = lam * l1_coherence(rho) + (1 - lam) * l1_coherence(sigma)
            assert l1_coherence(mix) <= bound + 1e-12


class TestIncoherentState:
    def test_white_noise(self):
        assert is_incoherent_state(DensityMatrix(1, np.eye(2) / 2))

    def test_plus_state_is_coherent(self):
        assert not is_incoherent_state(ket("+").to_density())

    def test_fully_noisy_resource(self):
        assert is_incoherent_state(noisy_plus(1.0))


class TestStructuralCheck:
    def test_cnot_is_incoherent(self):
        assert is_incoherent_kraus_set(KrausSet.from_unitary(cnot(1, 2))).ok

    def test_measurement_pair_is_incoherent(self):
        assert is_incoherent_kraus_set(measurement_kraus()).ok

    def test_cz_132_fails_with_diagnostics(self):
        diag = is_incoherent_kraus_set(KrausSet.from_unitary(cz_132(1, 2, 3)))
        assert not diag.ok
        assert not bool(diag)
        assert all(op_idx == 0 for op_idx, _ in diag.offending)
        assert len(diag.offending) > 0

    def test_protocol_zoo_all_pass(self):
        for name, channel in protocol_channel_zoo():
            assert is_incoherent_kraus_set(channel).ok, name

    def test_behavioral_cross_check_agrees_on_small_channels(self):
        for name, channel in protocol_channel_zoo():
            if channel.arity > 3:
                continue
            assert is_incoherent_channel_behavioral(channel), name
        assert not is_incoherent_channel_behavioral(KrausSet.from_unitary(cz_132(1, 2, 3)))


class TestMonotonicity:
    def test_cnot_audit_clean(self):
        report = monotonicity_audit(KrausSet.from_unitary(cnot(1, 2)), [1, 2], 2, n_samples=100, seed=7)
        assert report.violations == 0
        assert report.samples == 100

    def test_identity_channel_never_increases(self):
        from cohere_qec import Operator

        chan = KrausSet((Operator(1, np.eye(2)),))
        report = monotonicity_audit(chan, [1], 1, n_samples=50, seed=11)
        assert report.max_increase <= 1e-12

    def test_measurement_on_subsystem(self):
        report = monotonicity_audit(measurement_kraus(), [1], 2, n_samples=100, seed=13)
        assert report.violations == 0

    def test_report_invariant(self):
        report = monotonicity_audit(measurement_kraus(), [1], 1, n_samples=30, seed=17)
        assert (report.violations == 0) == (report.max_increase <= report.tolerance)

    def test_refuses_non_incoherent_channel(self):
        with pytest.raises(ValueError, match="vacuous"):
            monotonicity_audit(KrausSet.from_unitary(cz_132(1, 2, 3)), [1, 2, 3], 3)

    def test_selective_outcome_monotonicity(self):
        # average coherence over measurement outcomes never exceeds the input
        from cohere_qec.states import _apply_matrix_density

        chan = measurement_kraus()
        rng = np.random.default_rng(19)
        for _ in range(50):
            rho = random_density(2, rng)
            before = l1_coherence(rho)
            avg = 0.0
            for op in chan.operators:
                out = _apply_matrix_density(rho.entries, 2, op.entries, [0])
                p = float(np.trace(out).real)
                if p > 1e-12:
                    avg += p * l1_coherence(DensityMatrix(2, out / p))
            assert avg <= before + 1e-9

    def test_random_density_matrix_is_reproducible(self):
        a = random_density_matrix(2, np.random.default_rng(5))
        b = random_density_matrix(2, np.random.default_rng(5))
        np.testing.assert_array_equal(a.entries, b.entries)
        a.validate_positive()
