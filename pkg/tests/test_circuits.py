import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from qsteer.circuits import (
    CNOT,
    Circuit,
    Gate,
    PHASE,
    QUBIT_QUTRIT_CNOT,
    RX,
    RZ,
    SUBSPACE_RX12,
    SUBSPACE_RZ12,
    U3,
    emit_text,
    evaluate_circuit,
    parse_text,
    synth_kak_circuit,
    synth_pauli_string_circuit,
    synth_qutrit_circuit,
    u3_matrix,
    zxz_angles,
    zyz_angles,
)
from qsteer.circuits import rx_matrix, rz_matrix
from qsteer.errors import ConfigError
from qsteer.linalg import expm_i_herm, phase_invariant_distance
from qsteer.states import (
    QubitTarget,
    QutritTarget,
    QUTRIT_EQUAL_TARGET,
    pauli_string_matrix,
    stabilizer_catalog,
)
from qsteer.steering import TargetSpec, build_qubit_hamiltonian, build_qutrit_hamiltonian

from conftest import haar_unitary


class TestGateValidation:
    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            Gate("ry", (0.1,), (0,))

    def test_wire_checks(self):
        with pytest.raises(ConfigError):
            Circuit((2, 2), (Gate(SUBSPACE_RX12, (0.1,), (0,)),))
        with pytest.raises(ConfigError):
            Circuit((2, 2), (Gate(QUBIT_QUTRIT_CNOT, (), (0, 1)),))
        with pytest.raises(ConfigError):
            Circuit((2,), (Gate(RX, (0.1,), (1,)),))
        Circuit((2, 3), (Gate(QUBIT_QUTRIT_CNOT, (), (0, 1)),))

    def test_duplicate_wires(self):
        with pytest.raises(ConfigError):
            Gate(CNOT, (), (0, 0))

    def test_nonfinite_param(self):
        with pytest.raises(ConfigError):
            Gate(RX, (float("nan"),), (0,))


class TestEvaluate:
    def test_empty_circuit(self):
        assert np.allclose(evaluate_circuit(Circuit((2, 2), ())), np.eye(4))

    def test_double_cnot_cancels(self):
        c = Circuit((2, 2), (Gate(CNOT, (), (0, 1)), Gate(CNOT, (), (0, 1))))
        assert np.allclose(evaluate_circuit(c), np.eye(4), atol=1e-14)

    def test_reversed_cnot_embedding(self):
        c = Circuit((2, 2), (Gate(CNOT, (), (1, 0)),))
        got = evaluate_circuit(c)
        want = np.eye(4)[:, [0, 3, 2, 1]]  # control on wire 1
        assert np.allclose(got, want, atol=1e-14)

    def test_qutrit_cx23_truth_table(self):
        c = Circuit((2, 3), (Gate(QUBIT_QUTRIT_CNOT, (), (0, 1)),))
        got = evaluate_circuit(c)
        # identity on the six basis states except |1,2> -> i |1,2>
        want = np.diag([1, 1, 1, 1, 1, 1j]).astype(complex)
        assert np.allclose(got, want, atol=1e-15)

    def test_subspace_rotations_do_not_touch_other_level(self):
        c = Circuit((3,), (Gate(SUBSPACE_RX12, (0.7,), (0,)),))
        got = evaluate_circuit(c)
        assert got[0, 0] == 1.0 and np.allclose(got[0, 1:], 0)
        c = Circuit((3,), (Gate(RX, (0.7,), (0,)),))
        got = evaluate_circuit(c)
        assert got[2, 2] == 1.0 and np.allclose(got[2, :2], 0)

    def test_phase_gate(self):
        c = Circuit((2,), (Gate(PHASE, (0.5,), ()),))
        assert np.allclose(evaluate_circuit(c), np.exp(0.5j) * np.eye(2))

    def test_gate_order_is_application_order(self):
        c = Circuit((2,), (Gate(RX, (math.pi,), (0,)), Gate(RZ, (math.pi,), (0,))))
        want = rz_matrix(math.pi) @ rx_matrix(math.pi)
        assert np.allclose(evaluate_circuit(c), want, atol=1e-14)


class TestAngleExtraction:
    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=150, deadline=None)
    def test_zyz_reconstructs(self, seed):
        u = haar_unitary(2, np.random.default_rng(seed))
        theta, phi, lam, g = zyz_angles(u)
        rec = np.exp(1j * g) * u3_matrix(theta, phi, lam)
        assert np.max(np.abs(rec - u)) < 1e-11

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=150, deadline=None)
    def test_zxz_reconstructs(self, seed):
        u = haar_unitary(2, np.random.default_rng(seed))
        alpha, beta, xi, g = zxz_angles(u)
        rec = np.exp(1j * g) * rz_matrix(alpha) @ rx_matrix(beta) @ rz_matrix(xi)
        assert np.max(np.abs(rec - u)) < 1e-11

    def test_diagonal_edge_cases(self):
        for u in (np.eye(2, dtype=complex), rz_matrix(1.3), -1j * np.diag([1, -1]).astype(complex)):
            theta, phi, lam, g = zyz_angles(u)
            assert np.max(np.abs(np.exp(1j * g) * u3_matrix(theta, phi, lam) - u)) < 1e-12


class TestKakSynthesis:
    def test_plus_target_exact(self):
        spec = TargetSpec(QubitTarget(math.pi / 2, 0.0), math.pi / 2, "+")
        c = synth_kak_circuit(spec)
        u = expm_i_herm(build_qubit_hamiltonian(math.pi / 2, 0.0, math.pi / 2))
        assert phase_invariant_distance(evaluate_circuit(c), u) < 1e-9

    def test_zero_coupling_identity(self):
        c = synth_kak_circuit(TargetSpec(QubitTarget(0.4, 0.8), 0.0))
        assert phase_invariant_distance(evaluate_circuit(c), np.eye(4)) < 1e-9
        assert c.count(CNOT) == 2

    def test_catalog_grid(self):
        for e in stabilizer_catalog():
            for coupling in np.linspace(0.05, math.pi / 2, 20):
                spec = TargetSpec(e.target, float(coupling), e.label)
                c = synth_kak_circuit(spec)
                u = expm_i_herm(build_qubit_hamiltonian(e.theta, e.phi, float(coupling)))
                assert phase_invariant_distance(evaluate_circuit(c), u) <= 1e-9
                assert c.count(CNOT) == 2
                single = sum(1 for g in c.gates if g.kind in (RX, RZ, U3))
                assert single <= 7

    def test_qutrit_target_rejected(self):
        with pytest.raises(ConfigError):
            synth_kak_circuit(TargetSpec(QUTRIT_EQUAL_TARGET, 0.4))


class TestPauliStringSynthesis:
    def test_commuting_pair_exact(self):
        coupling = 0.8
        c = synth_pauli_string_circuit([(coupling / 2, "XZ"), (-coupling / 2, "YY")])
        want = scipy.linalg.expm(
            -1j * (coupling / 2) * (pauli_string_matrix("XZ") - pauli_string_matrix("YY"))
        )
        assert np.max(np.abs(evaluate_circuit(c) - want)) < 1e-12

    def test_single_zz_ladder(self):
        theta = 0.37
        c = synth_pauli_string_circuit([(theta / 2, "ZZ")])
        kinds = [g.kind for g in c.gates]
        assert kinds == [CNOT, RZ, CNOT]
        want = scipy.linalg.expm(-1j * (theta / 2) * pauli_string_matrix("ZZ"))
        assert np.max(np.abs(evaluate_circuit(c) - want)) < 1e-14

    def test_identity_string_is_phase(self):
        c = synth_pauli_string_circuit([(0.4, "II")])
        assert np.allclose(evaluate_circuit(c), np.exp(-0.4j) * np.eye(4), atol=1e-14)

    @pytest.mark.parametrize("steps,bound", [(64, 1e-3), (1024, 1e-4)])
    def test_noncommuting_trotter_error(self, steps, bound):
        terms = [(-0.35, "XX"), (0.42, "XZ")]
        h = sum(coeff * pauli_string_matrix(s) for coeff, s in terms)
        want = scipy.linalg.expm(-1j * h)
        c = synth_pauli_string_circuit(terms, trotter_steps=steps)
        assert phase_invariant_distance(evaluate_circuit(c), want) <= bound

    def test_trotter_error_shrinks_linearly(self):
        terms = [(-0.35, "XX"), (0.42, "XZ")]
        h = sum(coeff * pauli_string_matrix(s) for coeff, s in terms)
        want = scipy.linalg.expm(-1j * h)
        errs = [
            phase_invariant_distance(
                evaluate_circuit(synth_pauli_string_circuit(terms, trotter_steps=r)), want
            )
            for r in (32, 64, 128)
        ]
        assert errs[0] > errs[1] > errs[2]
        assert errs[0] / errs[2] > 8  # better than O(1/r) would need

    def test_bad_string_rejected(self):
        with pytest.raises(ConfigError):
            synth_pauli_string_circuit([(0.1, "XQ")])


class TestQutritSynthesis:
    def test_cx23_rows(self):
        c = Circuit((2, 3), (Gate(QUBIT_QUTRIT_CNOT, (), (0, 1)),))
        u = evaluate_circuit(c)
        for k in range(3):
            ket = np.zeros(6, dtype=complex)
            ket[k] = 1.0  # |0,k>
            assert np.allclose(u @ ket, ket, atol=1e-15)
        ket12 = np.zeros(6, dtype=complex)
        ket12[5] = 1.0
        assert np.allclose(u @ ket12, 1j * ket12, atol=1e-15)

    @pytest.mark.parametrize("coupling", [0.3, math.pi / 4, math.pi / 2])
    def test_equal_superposition_circuit(self, coupling):
        spec = TargetSpec(QUTRIT_EQUAL_TARGET, coupling, "qutrit-equal")
        c = synth_qutrit_circuit(spec)
        want = expm_i_herm(coupling * build_qutrit_hamiltonian(QUTRIT_EQUAL_TARGET))
        assert phase_invariant_distance(evaluate_circuit(c), want) <= 1e-6
        assert c.count(QUBIT_QUTRIT_CNOT) > 0
        assert all(g.kind != CNOT for g in c.gates)

    def test_general_target(self):
        t = QutritTarget(1.2, 0.9, 1.0, 5.0)
        c = synth_qutrit_circuit(TargetSpec(t, 0.8))
        want = expm_i_herm(0.8 * build_qutrit_hamiltonian(t))
        assert phase_invariant_distance(evaluate_circuit(c), want) <= 1e-6

    def test_qubit_target_rejected(self):
        with pytest.raises(ConfigError):
            synth_qutrit_circuit(TargetSpec(QubitTarget(0.1, 0.1), 0.3))


class TestTextFormat:
    def test_single_rx_line(self):
        c = Circuit((2,), (Gate(RX, (math.pi / 2,), (0,)),))
        text = emit_text(c)
        assert "rx(1.5707963267948966) w0;" in text.splitlines()

    def test_cnot_line(self):
        c = Circuit((2, 2), (Gate(CNOT, (), (0, 1)),))
        assert "cx w0, w1;" in emit_text(c).splitlines()

    def test_header_and_dims(self):
        c = Circuit((2, 3), (), 0.25)
        lines = emit_text(c).splitlines()
        assert lines[0] == "wires: 2;"
        assert lines[1] == "wire w0: dim 2;"
        assert lines[2] == "wire w1: dim 3;"
        assert lines[-1] == "phase(0.25);"

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=60, deadline=None)
    def test_roundtrip_random_circuits(self, seed):
        rng = np.random.default_rng(seed)
        dims = (2, 3)
        pool = [
            lambda: Gate(RX, (rng.uniform(-7, 7),), (int(rng.integers(2)),)),
            lambda: Gate(RZ, (rng.uniform(-7, 7),), (int(rng.integers(2)),)),
            lambda: Gate(U3, tuple(rng.uniform(-7, 7, 3)), (int(rng.integers(2)),)),
            lambda: Gate(SUBSPACE_RX12, (rng.uniform(-7, 7),), (1,)),
            lambda: Gate(SUBSPACE_RZ12, (rng.uniform(-7, 7),), (1,)),
            lambda: Gate(QUBIT_QUTRIT_CNOT, (), (0, 1)),
            lambda: Gate(PHASE, (rng.uniform(-7, 7),), ()),
        ]
        gates = tuple(pool[int(rng.integers(len(pool)))]() for _ in range(int(rng.integers(0, 12))))
        c = Circuit(dims, gates, float(rng.uniform(-3, 3)))
        text = emit_text(c)
        c2 = parse_text(text)
        assert emit_text(c2) == text
        assert c2.wire_dims == c.wire_dims
        assert c2.gates == c.gates
        assert c2.global_phase == c.global_phase

    def test_parse_rejects_garbage(self):
        with pytest.raises(ConfigError):
            parse_text("")
        with pytest.raises(ConfigError):
            parse_text("wires: 1;\nwire w0: dim 2;\nfoo(1) w0;\nphase(0);\n")
        with pytest.raises(ConfigError):
            parse_text("wires: 1;\nwire w0: dim 2;\nrx(0.1) w0;\n")  # missing phase line
