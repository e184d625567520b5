import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from su2holonomy.hamiltonian import SystemParams, build_hamiltonian, ket
from su2holonomy.spectrum import (LEVEL_MINUS_J, LEVEL_ZERO, aux_quantities,
                                  closed_form_degenerate_states, closed_form_eigenvalues,
                                  eigenframe, level_gap, numeric_eigendecomposition,
                                  rotation_axis)


class TestAuxQuantities:
    def test_zero_field_limit(self):
        aux = aux_quantities(0.0, 1.0)
        assert (aux.A, aux.A_prime, aux.K, aux.L) == pytest.approx((1.5, 1.5, 8.0, 8.0))

    def test_L_vanishes_at_2g(self):
        assert aux_quantities(2.0, 1.0).L == 0.0
        assert aux_quantities(3.0, 1.5).L == 0.0

    def test_hadamard_root_is_quarter(self):
        assert aux_quantities(1.9587, 1.0).A == pytest.approx(0.25, abs=1e-3)

    def test_vectorised(self):
        aux = aux_quantities(np.array([0.0, 2.0]), 1.0)
        assert aux.K.shape == (2,)
        assert np.allclose(aux.L, [8.0, 0.0])

    @settings(max_examples=60, deadline=None)
    @given(B=st.floats(0, 20), g=st.floats(0.05, 5))
    def test_positivity_and_axis_norm(self, B, g):
        aux = aux_quantities(B, g)
        assert aux.A_prime > 0 and aux.K > 0
        lhs = (2 * g * B**3) ** 2 + aux.L**2
        assert lhs == pytest.approx(aux.K**2, rel=1e-12)
        assert np.linalg.norm(rotation_axis(B, g)) == pytest.approx(1.0, abs=1e-12)


class TestClosedFormEigenvalues:
    def test_degenerate_levels(self):
        for B, phi in [(0.3, 0.0), (1.0, 2.0), (3.5, 5.0)]:
            energies, labels = closed_form_eigenvalues(SystemParams(1.0, 0.5, B, phi))
            assert np.sum(energies == 0.0) == 2
            assert np.sum(energies == -0.5) == 2
            assert labels.count(LEVEL_ZERO) == 2 and labels.count(LEVEL_MINUS_J) == 2

    def test_zero_J_zero_B(self):
        energies, labels = closed_form_eigenvalues(SystemParams(1.0, 0.0, 0.0))
        simple = sorted(e for e, lbl in zip(energies, labels) if lbl == "nondegenerate")
        r2 = np.sqrt(2)
        assert simple == pytest.approx([-r2, -r2, r2, r2])

    def test_frozen_values(self):
        # sqrt(J^2 + 4(2 +/- 2 + 1)) at J = 0.5, B = g = 1: sqrt(20.25), sqrt(4.25)
        energies, _ = closed_form_eigenvalues(SystemParams(1.0, 0.5, 1.0))
        s = np.sqrt(4.25)
        expected = [-2.0, (0.5 - s) / 2, -0.5, -0.5, 0.0, 0.0, (0.5 + s) / 2, 2.5]
        assert energies == pytest.approx(expected, abs=1e-15)

    def test_matches_dense_solver(self):
        p = SystemParams(1.0, 0.3, 1.2, 0.4)
        closed, _ = closed_form_eigenvalues(p)
        assert np.max(np.abs(np.linalg.eigvalsh(build_hamiltonian(p)) - closed)) < 1e-10


class TestDegenerateStates:
    def test_chi3_is_fixed(self):
        expected = (ket("001") - ket("010")) / np.sqrt(2)
        for args in [(0.5, 0.1, 1.0), (3.0, 4.0, 0.7)]:
            assert np.allclose(closed_form_degenerate_states(*args)[2], expected)

    def test_orthonormal(self):
        chis = np.column_stack(closed_form_degenerate_states(1.0, 0.3, 1.0))
        assert np.max(np.abs(chis.conj().T @ chis - np.eye(4))) < 1e-12

    def test_null_vectors(self):
        p = SystemParams(1.0, 0.7, 1.5, 1.1)
        H = build_hamiltonian(p)
        chi1, chi2, chi3, chi4 = closed_form_degenerate_states(p.B, p.phi, p.g)
        assert np.linalg.norm(H @ chi1) <= 1e-10
        assert np.linalg.norm(H @ chi2) <= 1e-10
        assert np.linalg.norm(H @ chi3 + p.J * chi3) <= 1e-10
        assert np.linalg.norm(H @ chi4 + p.J * chi4) <= 1e-10

    def test_zero_field_limit(self):
        chi1, chi2, _, _ = closed_form_degenerate_states(0.0, 0.0, 1.0)
        assert np.allclose(chi1, ket("000"))
        assert np.allclose(chi2, ket("111"))

    def test_gauge_convention(self):
        chi1, chi2, _, _ = closed_form_degenerate_states(1.3, 0.8, 1.0)
        assert abs(chi1[0].imag) < 1e-15
        assert abs(chi2[7].imag) < 1e-15 and chi2[7].real > 0

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            closed_form_degenerate_states(1.0, 0.0, 0.0)


class TestNumericEigendecomposition:
    def test_zero_operator(self):
        frame = numeric_eigendecomposition(np.zeros((8, 8)))
        assert frame.group_sizes() == [8]

    def test_group_structure(self):
        frame = numeric_eigendecomposition(build_hamiltonian(SystemParams(1.0, 0.3, 1.0)))
        assert sorted(frame.group_sizes()) == [1, 1, 1, 1, 2, 2]

    def test_projector_matches_closed_form(self):
        p = SystemParams(1.0, 0.3, 1.0, 0.0)
        frame = numeric_eigendecomposition(build_hamiltonian(p))
        P = frame.projector(frame.find_group(0.0))
        chi1, chi2, _, _ = closed_form_degenerate_states(p.B, p.phi, p.g)
        P_closed = np.outer(chi1, chi1.conj()) + np.outer(chi2, chi2.conj())
        assert np.max(np.abs(P - P_closed)) <= 1e-9

    def test_ambiguous_gap_raises(self):
        with pytest.raises(ValueError, match="ambiguous"):
            numeric_eigendecomposition(np.diag([0.0, 5e-8, 1, 2, 3, 4, 5, 6]))

    def test_reference_alignment(self):
        p = SystemParams(1.0, 0.5, 1.3, 0.9)
        frame = eigenframe(p)
        zero = frame.groups[frame.find_group(0.0)]
        chi1, chi2, _, _ = closed_form_degenerate_states(p.B, p.phi, p.g)
        assert np.allclose(frame.states[:, zero[0]], chi1, atol=1e-9)
        assert np.allclose(frame.states[:, zero[1]], chi2, atol=1e-9)
        H = build_hamiltonian(p)
        for k in range(8):
            v = frame.states[:, k]
            assert np.linalg.norm(H @ v - frame.energies[k] * v) <= 1e-10

    def test_gauge_covariance(self):
        chi1, chi2, _, _ = closed_form_degenerate_states(1.2, 0.4, 1.0)
        P = np.outer(chi1, chi1.conj()) + np.outer(chi2, chi2.conj())
        chi1 = np.exp(0.37j) * chi1
        P2 = np.outer(chi1, chi1.conj()) + np.outer(chi2, chi2.conj())
        assert np.max(np.abs(P - P2)) < 1e-15


class TestLevelGap:
    def test_reference_point(self):
        # other levels at (1, 0.5, 1): -0.5 and the four simple levels, nearest is -J
        assert level_gap(SystemParams(1.0, 0.5, 1.0)) == pytest.approx(0.5)

    def test_closes_with_J(self):
        assert level_gap(SystemParams(1.0, 1e-9, 1.0)) == pytest.approx(1e-9)

    def test_phi_independent(self):
        gaps = {level_gap(SystemParams(1.0, 0.4, 1.7, phi)) for phi in (0.0, 1.0, 4.0)}
        assert len(gaps) == 1

    def test_positive_on_grid(self):
        for B in np.linspace(0.1, 4, 40):
            assert level_gap(SystemParams(1.0, 0.3, B)) > 0
