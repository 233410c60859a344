import numpy as np
import pytest

from cohere_qec import (
    Operator,
    cluster_basis_state,
    data_state,
    depolarizing_error,
    embed_and_apply,
    error_table_nine,
    error_table_three,
    fidelity,
    ket,
    l1_coherence,
    logical_state_nine,
    logical_state_three,
    nine_qubit_pipeline,
    nine_qubit_protocol,
    no_error,
    partial_trace,
    pauli_error,
    superposed_error,
    tensor,
    three_qubit_pipeline,
    two_qubit_pipeline,
)
from cohere_qec import codes
from cohere_qec.states import _apply_matrix_pure

from helpers import (
    assert_density_equal,
    assert_states_equal,
    random_phase_pair,
    random_pure_state,
)

SQ2 = 1.0 / np.sqrt(2.0)


class TestTwoQubitPipeline:
    def test_phase_flip_on_data_fully_corrected(self):
        rng = np.random.default_rng(1)
        for _ in range(5):
            psi = random_pure_state(1, rng)
            recovered, absorbed = two_qubit_pipeline(psi, pauli_error("Z", 2))
            assert_density_equal(recovered, psi.to_density(), atol=1e-12)
            assert_density_equal(absorbed, ket("-").to_density(), atol=1e-12)

    def test_no_error_roundtrip(self):
        rng = np.random.default_rng(2)
        psi = random_pure_state(1, rng)
        recovered, absorbed = two_qubit_pipeline(psi, no_error())
        assert_density_equal(recovered, psi.to_density(), atol=1e-12)
        assert_density_equal(absorbed, ket("+").to_density(), atol=1e-12)

    def test_ancilla_phase_flip_propagates_to_data(self):
        rng = np.random.default_rng(3)
        psi = random_pure_state(1, rng)
        recovered, absorbed = two_qubit_pipeline(psi, pauli_error("Z", 1))
        flipped = psi.amplitudes * np.array([1.0, -1.0])
        assert_density_equal(recovered, np.outer(flipped, flipped.conj()), atol=1e-12)
        assert_density_equal(absorbed, ket("-").to_density(), atol=1e-12)

    def test_superposed_error_absorbed_by_ancilla(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            a, b = random_phase_pair(rng)
            psi = random_pure_state(1, rng)
            recovered, absorbed = two_qubit_pipeline(psi, superposed_error(a, b, 2))
            assert_density_equal(recovered, psi.to_density(), atol=1e-10)
            expected = a * ket("+").amplitudes + b * ket("-").amplitudes
            assert_density_equal(absorbed, np.outer(expected, expected.conj()), atol=1e-10)

    def test_unsupported_errors_rejected(self):
        psi = ket("0")
        with pytest.raises(ValueError, match="unsupported error kind"):
            two_qubit_pipeline(psi, depolarizing_error(0.5))
        with pytest.raises(ValueError, match="Z errors"):
            two_qubit_pipeline(psi, pauli_error("X", 2))
        with pytest.raises(ValueError, match="position"):
            two_qubit_pipeline(psi, pauli_error("Z", 3))


class TestThreeQubitPipeline:
    @pytest.mark.parametrize(
        "error",
        [
            no_error(),
            pauli_error("Z", 1),
            pauli_error("Z", 2),
            pauli_error("Z", 3),
        ],
        ids=["none", "z1", "z2", "z3"],
    )
    def test_all_phase_errors_corrected(self, error):
        rng = np.random.default_rng(5)
        for _ in range(5):
            psi = random_pure_state(1, rng)
            recovered = three_qubit_pipeline(psi, error)
            assert fidelity(psi, recovered) == pytest.approx(1.0, abs=1e-10)
            assert_density_equal(recovered, psi.to_density(), atol=1e-10)

    def test_superposed_error_any_position(self):
        rng = np.random.default_rng(6)
        for position in (1, 2, 3):
            a, b = random_phase_pair(rng)
            psi = random_pure_state(1, rng)
            recovered = three_qubit_pipeline(psi, superposed_error(a, b, position))
            assert_density_equal(recovered, psi.to_density(), atol=1e-10)

    def test_z2_on_logical_one_carries_the_sign_and_feed_forward_restores(self):
        # encoded |1_l> with a middle phase flip decodes to -|->|1>|->;
        # the (1,1) branch then needs the Z feed-forward to cancel the sign
        psi = ket("1")
        recovered = three_qubit_pipeline(psi, pauli_error("Z", 2))
        assert_density_equal(recovered, psi.to_density(), atol=1e-12)

    def test_unsupported_errors_rejected(self):
        with pytest.raises(ValueError, match="phase flips"):
            three_qubit_pipeline(ket("0"), pauli_error("X", 2))
        with pytest.raises(ValueError, match="position"):
            three_qubit_pipeline(ket("0"), pauli_error("Z", 4))


class TestLogicalStates:
    def test_three_qubit_logicals(self):
        z0 = np.zeros(8)
        z0[[0, 3, 5, 6]] = 0.5
        assert_states_equal(logical_state_three(0), z0)
        z1 = np.zeros(8)
        z1[[7, 4, 2, 1]] = 0.5
        assert_states_equal(logical_state_three(1), z1)

    def test_nine_qubit_logicals_are_cluster_products(self):
        for i in (0, 1):
            c = logical_state_three(i).amplitudes
            expected = np.kron(c, np.kron(c, c))
            assert_states_equal(logical_state_nine(i), expected)

    def test_nine_qubit_logicals_match_the_encoding_circuit(self):
        # running the actual two-layer encoder on the protocol inputs must
        # produce the same states as the product form
        for i, mid in ((0, "0"), (1, "1")):
            amps = ket(f"+0+ +{mid}+ +0+".replace(" ", "")).amplitudes
            for mat, targets in codes._nine_circuit():
                amps = _apply_matrix_pure(amps, 9, mat, targets)
            assert_states_equal(logical_state_nine(i), amps)

    def test_cluster_basis_state_validation(self):
        with pytest.raises(ValueError, match="logical"):
            cluster_basis_state(2, "+", "+")
        with pytest.raises(ValueError, match="sign marks"):
            cluster_basis_state(0, "x", "+")


class TestErrorTables:
    def test_three_qubit_table_matches_reference(self):
        rows = error_table_three()
        reference = codes.reference_table_three()
        assert [r.error_label for r in rows] == [r[0] for r in reference]
        for row, (_, col0, col1, sign) in zip(rows, reference):
            assert_states_equal(row.decoded_on_zero, col0, atol=1e-12)
            assert_states_equal(row.decoded_on_one, col1, atol=1e-12)
            assert row.sign == sign

    def test_nine_qubit_table_matches_reference(self):
        rows = error_table_nine()
        reference = codes.reference_table_nine()
        assert [r.error_label for r in rows] == [r[0] for r in reference]
        for row, (_, col0, col1, sign) in zip(rows, reference):
            assert_states_equal(row.decoded_on_zero, col0, atol=1e-12)
            assert_states_equal(row.decoded_on_one, col1, atol=1e-12)
            assert row.sign == sign

    def test_signed_rows(self):
        three = {r.error_label: r.sign for r in error_table_three()}
        assert three == {"I": 1, "Z_1": 1, "Z_2": -1, "Z_3": 1}
        nine = {r.error_label: r.sign for r in error_table_nine()}
        assert nine == {"I": 1, "X_a_i": 1, "X_b_i": -1, "X_c_i": 1}

    def test_table_amplitudes_are_dyadic(self):
        for row in error_table_three():
            for state in (row.decoded_on_zero, row.decoded_on_one):
                mags = np.abs(state.amplitudes)
                nonzero = mags[mags > 1e-12]
                assert np.allclose(nonzero, nonzero[0], atol=1e-12)


class TestNineQubitProtocol:
    def test_roundtrip_without_error(self):
        result = nine_qubit_pipeline(1.234, 0.0, no_error(), keep_register_state=True)
        assert result.fidelity == pytest.approx(1.0, abs=1e-12)
        # the coherent ancillas return to |+> before measurement destroys
        # them; afterwards each measured ancilla is incoherent
        for q in (1, 2, 3, 4, 6, 7, 8, 9):
            reduced = partial_trace(result.register_state, [q])
            assert l1_coherence(reduced) <= 1e-10

    @pytest.mark.parametrize("name", ["X", "Y", "Z"])
    def test_single_pauli_errors_sample(self, name):
        for q in (1, 2, 4, 5, 8, 9):
            fid = nine_qubit_protocol(0.9, 0.0, pauli_error(name, q))
            assert fid == pytest.approx(1.0, abs=1e-9), (name, q)

    def test_two_cluster_phase_flips(self):
        for i in (1, 2, 3):
            for j in (4, 5, 6):
                fid = nine_qubit_protocol(np.pi / 3, 0.0, (pauli_error("Z", i), pauli_error("Z", j)))
                assert fid == pytest.approx(1.0, abs=1e-9), (i, j)

    def test_classical_input_immune_to_noise(self):
        assert nine_qubit_protocol(0.0, 0.7, depolarizing_error(0.9)) == pytest.approx(1.0, abs=1e-9)

    def test_superposed_bit_and_phase_flip_on_two_qubits(self):
        # one branch operator (Z_a1 + X_c2)/sqrt(2): both components correct
        # independently and land in orthogonal syndrome sectors
        theta = 1.1
        psi = data_state(theta)
        amps = tensor(
            [ket("+"), ket("0"), ket("+"), ket("+"), psi, ket("+"), ket("+"), ket("0"), ket("+")]
        ).amplitudes
        for mat, targets in codes._nine_circuit():
            amps = _apply_matrix_pure(amps, 9, mat, targets)
        z_gate = np.diag([1.0, -1.0]).astype(complex)
        x_gate = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
        branch = (
            _apply_matrix_pure(amps, 9, z_gate, [0]) + _apply_matrix_pure(amps, 9, x_gate, [7])
        ) * SQ2
        assert abs(np.linalg.norm(branch) - 1.0) < 1e-12
        for mat, targets in reversed(codes._nine_circuit()):
            branch = _apply_matrix_pure(branch, 9, mat.conj().T, targets)
        A = codes._measurement_branches_pure(branch, 9, codes.NINE_MEASUREMENT_PLAN)
        z_mask, x_mask = codes._nine_masks()
        A = codes._correct_branches_pure(A, z_mask, x_mask)
        fid = float(np.sum(np.abs(A @ psi.amplitudes.conj()) ** 2))
        assert fid == pytest.approx(1.0, abs=1e-9)

    def test_density_and_pure_paths_agree(self):
        # appending a zero-strength depolarizing model forces the density
        # path; the result must match the pure fast path exactly
        theta = 0.77
        for err in (pauli_error("Y", 6), pauli_error("Z", 2)):
            pure = nine_qubit_protocol(theta, 0.0, err)
            dense = nine_qubit_protocol(theta, 0.0, (err, depolarizing_error(0.0)))
            assert dense == pytest.approx(pure, abs=1e-12)

    def test_register_state_consistent_with_data_state(self):
        result = nine_qubit_pipeline(0.6, 0.4, depolarizing_error(0.3), keep_register_state=True)
        assert result.register_state.trace() == pytest.approx(1.0, abs=1e-9)
        reduced = partial_trace(result.register_state, [codes.DATA_QUBIT])
        assert_density_equal(reduced, result.data_state, atol=1e-10)
        assert result.outcome_probabilities.sum() == pytest.approx(1.0, abs=1e-9)

    def test_measured_ancillas_lose_all_coherence(self):
        result = nine_qubit_pipeline(np.pi / 4, 0.5, depolarizing_error(0.5), keep_register_state=True)
        for q in (1, 2, 3, 4, 6, 7, 8, 9):
            reduced = partial_trace(result.register_state, [q])
            assert l1_coherence(reduced) <= 1e-10, q

    def test_parameter_validation(self):
        with pytest.raises(ValueError, match="theta"):
            nine_qubit_protocol(4.0, 0.0, no_error())
        with pytest.raises(ValueError, match="e ="):
            nine_qubit_protocol(0.5, 1.5, no_error())
        with pytest.raises(ValueError, match="position"):
            nine_qubit_protocol(0.5, 0.0, pauli_error("X", 12))

    def test_false_detection_lowers_fidelity(self):
        fid = nine_qubit_protocol(np.pi / 4, 0.5, depolarizing_error(0.0))
        assert fid < 1.0 - 1e-3
        assert fid == pytest.approx(0.91748046875, abs=1e-12)


class TestProtocolDescriptors:
    def test_ancilla_budgets(self):
        assert len(codes.TWO_QUBIT_PROTOCOL.ancilla_spec) == 1
        assert len(codes.THREE_QUBIT_PROTOCOL.ancilla_spec) == 2
        nine = codes.NINE_QUBIT_PROTOCOL
        coherent = [s for s in nine.ancilla_spec if s[1] == "noisy+"]
        classical = [s for s in nine.ancilla_spec if s[1] == "0"]
        assert len(coherent) == 6 and len(classical) == 2
        assert {pos for pos, _ in classical} == {2, 8}

    def test_syndrome_rules(self):
        pairs = [r.measured_pair for r in codes.NINE_SYNDROME_RULES]
        assert pairs == [(1, 3), (4, 6), (7, 9), (2, 8)]
        assert all(r.trigger_outcome == (1, 1) for r in codes.NINE_SYNDROME_RULES)
        assert [r.correction for r in codes.NINE_SYNDROME_RULES] == ["Z", "Z", "Z", "X"]
