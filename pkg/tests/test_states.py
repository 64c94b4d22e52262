import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsteer.errors import ConfigError, DimensionMismatchError
from qsteer.states import (
    DensityState,
    GELL_MANN,
    QubitTarget,
    QutritTarget,
    QUTRIT_EQUAL_KET,
    QUTRIT_EQUAL_TARGET,
    bloch_vector,
    fidelity,
    from_bloch_vector,
    from_gellmann_vector,
    gellmann_vector,
    pure_state,
    random_density,
    stabilizer_catalog,
    target_ket,
)

from conftest import ginibre_density


class TestTargetKet:
    def test_ground_state(self):
        assert np.allclose(target_ket(QubitTarget(0.0, 0.0)), [1, 0])

    def test_plus_state(self):
        assert np.allclose(target_ket(QubitTarget(math.pi / 2, 0.0)), np.array([1, 1]) / np.sqrt(2))

    def test_qutrit_equal_superposition_parameters(self):
        ket = target_ket(QUTRIT_EQUAL_TARGET)
        assert np.allclose(ket, QUTRIT_EQUAL_KET, atol=1e-15)

    def test_out_of_range_rejected(self):
        with pytest.raises(ConfigError):
            QubitTarget(-0.1, 0.0)
        with pytest.raises(ConfigError):
            QubitTarget(0.1, 7.0)
        with pytest.raises(ConfigError):
            QutritTarget(4.0, 0.0, 0.0, 0.0)

    def test_qutrit_phase_interval_closed(self):
        # 2pi is accepted and canonicalized to 0
        t = QutritTarget(1.0, 1.0, 2 * math.pi, 2 * math.pi)
        assert t.phi01 == 0.0 and t.phi02 == 0.0

    def test_global_phase_convention(self):
        ket = target_ket(QubitTarget(math.pi, 0.5))
        assert abs(ket[0]) < 1e-15
        assert ket[1].imag == pytest.approx(0.0, abs=1e-15)
        assert ket[1].real > 0

    @given(
        st.floats(0.0, math.pi),
        st.floats(0.0, 2 * math.pi, exclude_max=True),
    )
    @settings(max_examples=200, deadline=None)
    def test_qubit_norm(self, theta, phi):
        assert abs(np.linalg.norm(target_ket(QubitTarget(theta, phi))) - 1.0) <= 1e-14

    @given(
        st.floats(0.0, math.pi),
        st.floats(0.0, math.pi),
        st.floats(0.0, 2 * math.pi),
        st.floats(0.0, 2 * math.pi),
    )
    @settings(max_examples=200, deadline=None)
    def test_qutrit_norm(self, xi, theta, p1, p2):
        assert abs(np.linalg.norm(target_ket(QutritTarget(xi, theta, p1, p2))) - 1.0) <= 1e-14


class TestBloch:
    def test_maximally_mixed(self):
        rho = DensityState(matrix=np.eye(2, dtype=complex) / 2, dims=(2,))
        assert np.allclose(bloch_vector(rho), [0, 0, 0], atol=1e-15)

    def test_plus_state(self):
        rho = pure_state(target_ket(QubitTarget(math.pi / 2, 0.0)))
        assert np.allclose(bloch_vector(rho), [1, 0, 0], atol=1e-14)

    def test_minus_i_state(self):
        rho = pure_state(target_ket(QubitTarget(math.pi / 2, 3 * math.pi / 2)))
        assert np.allclose(bloch_vector(rho), [0, -1, 0], atol=1e-14)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=200, deadline=None)
    def test_roundtrip(self, seed):
        rho = random_density(2, seed)
        back = from_bloch_vector(bloch_vector(rho))
        assert np.max(np.abs(back.matrix - rho.matrix)) <= 1e-12

    def test_wrong_dimension(self):
        rho = DensityState(matrix=np.eye(3, dtype=complex) / 3, dims=(3,))
        with pytest.raises(DimensionMismatchError):
            bloch_vector(rho)


class TestGellMann:
    def test_orthonormality(self):
        for i, a in enumerate(GELL_MANN):
            assert np.allclose(a, a.conj().T)
            for j, b in enumerate(GELL_MANN):
                want = 2.0 if i == j else 0.0
                assert abs(np.trace(a @ b).real - want) < 1e-14

    def test_maximally_mixed(self):
        rho = DensityState(matrix=np.eye(3, dtype=complex) / 3, dims=(3,))
        assert np.allclose(gellmann_vector(rho), np.zeros(8), atol=1e-15)

    def test_ground_state_coordinates(self):
        rho = pure_state(np.array([1, 0, 0], dtype=complex))
        n = gellmann_vector(rho)
        want = np.zeros(8)
        want[2] = 0.5
        want[7] = 1 / (2 * math.sqrt(3))
        assert np.allclose(n, want, atol=1e-14)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=200, deadline=None)
    def test_roundtrip(self, seed):
        rho = random_density(3, seed)
        back = from_gellmann_vector(gellmann_vector(rho))
        assert np.max(np.abs(back.matrix - rho.matrix)) <= 1e-12

    def test_equal_superposition_roundtrip_fidelity(self):
        rho = pure_state(QUTRIT_EQUAL_KET)
        back = from_gellmann_vector(gellmann_vector(rho))
        assert fidelity(back, QUTRIT_EQUAL_KET) >= 1 - 1e-12


class TestStabilizerCatalog:
    def test_six_rows_with_expected_axes(self):
        cat = stabilizer_catalog()
        assert [e.label for e in cat] == ["0", "1", "+", "-", "i", "-i"]
        blochs = {e.label: e.bloch for e in cat}
        assert blochs["0"] == (0, 0, 1)
        assert blochs["+"] == (1, 0, 0)
        assert blochs["-i"] == (0, -1, 0)

    def test_bloch_matches_ket(self):
        for e in stabilizer_catalog():
            rho = pure_state(target_ket(e.target))
            assert np.allclose(bloch_vector(rho), e.bloch, atol=1e-12)
            assert fidelity(from_bloch_vector(np.array(e.bloch)), target_ket(e.target)) >= 1 - 1e-12

    def test_terms_match_hamiltonian_builder(self):
        from qsteer.states import pauli_string_matrix
        from qsteer.steering import build_qubit_hamiltonian

        coupling = 0.83
        for e in stabilizer_catalog():
            h_terms = (coupling / 2) * sum(
                sign * pauli_string_matrix(s) for sign, s in e.hamiltonian_terms
            )
            h_built = build_qubit_hamiltonian(e.theta, e.phi, coupling)
            assert np.max(np.abs(h_terms - h_built)) <= 1e-12


class TestFidelity:
    def test_pure_match(self):
        ket = target_ket(QubitTarget(math.pi / 2, 0.0))
        assert fidelity(pure_state(ket), ket) == pytest.approx(1.0, abs=1e-15)

    def test_maximally_mixed_half(self):
        rho = DensityState(matrix=np.eye(2, dtype=complex) / 2, dims=(2,))
        assert fidelity(rho, np.array([1, 0], dtype=complex)) == pytest.approx(0.5)

    def test_qutrit_third(self):
        rho = DensityState(matrix=np.eye(3, dtype=complex) / 3, dims=(3,))
        assert fidelity(rho, QUTRIT_EQUAL_KET) == pytest.approx(1 / 3)

    def test_dimension_mismatch(self):
        rho = DensityState(matrix=np.eye(2, dtype=complex) / 2, dims=(2,))
        with pytest.raises(DimensionMismatchError):
            fidelity(rho, QUTRIT_EQUAL_KET)


class TestRandomDensity:
    def test_deterministic_per_seed(self):
        a = random_density(4, 123)
        b = random_density(4, 123)
        assert np.array_equal(a.matrix, b.matrix)
        c = random_density(4, 124)
        assert not np.allclose(a.matrix, c.matrix)

    def test_statistics_sane(self):
        norms = []
        for seed in range(10_000):
            rho = random_density(2, seed)
            evs = np.linalg.eigvalsh(rho.matrix)
            assert evs.min() >= -1e-12
            norms.append(np.linalg.norm(bloch_vector(rho)))
        mean_norm = float(np.mean(norms))
        assert 0.0 < mean_norm < 1.0

    def test_purity_bounds(self):
        for dim in (2, 3, 4, 6):
            for seed in range(25):
                rho = random_density(dim, seed)
                purity = float(np.trace(rho.matrix @ rho.matrix).real)
                assert 1.0 / dim - 1e-12 <= purity <= 1.0 + 1e-12

    def test_unsupported_dim(self):
        with pytest.raises(DimensionMismatchError):
            random_density(5, 0)


class TestDensityState:
    def test_validation(self, rng):
        with pytest.raises(DimensionMismatchError):
            DensityState(matrix=np.eye(2, dtype=complex), dims=(2,))  # trace 2
        with pytest.raises(DimensionMismatchError):
            DensityState(matrix=np.array([[0.5, 0.5], [0.4, 0.5]]), dims=(2,))
        bad = np.diag([1.5, -0.5]).astype(complex)
        with pytest.raises(DimensionMismatchError):
            DensityState(matrix=bad, dims=(2,))
        mat = ginibre_density(6, rng)
        with pytest.raises(DimensionMismatchError):
            DensityState(matrix=mat, dims=(2, 2))
        DensityState(matrix=mat, dims=(2, 3))
