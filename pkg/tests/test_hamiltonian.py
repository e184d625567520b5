import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from su2holonomy.hamiltonian import (SystemParams, basis_bits, basis_index,
                                     build_hamiltonian, is_hermitian, ket, pauli_embed)
from su2holonomy.spectrum import closed_form_eigenvalues


def bitwise_hamiltonian(g, J, B, phi):
    """Independent builder: XY exchange as flip-flops, drive as single flips."""
    H = np.zeros((8, 8), dtype=complex)
    bx, by = B * np.cos(phi), B * np.sin(phi)
    for idx in range(8):
        bits = {3: (idx >> 2) & 1, 2: (idx >> 1) & 1, 1: idx & 1}
        # (Bx sx + By sy)/2 on qubits 1, 2: sy|0> = i|1>, sy|1> = -i|0>
        for q in (1, 2):
            new = idx ^ (1 << (q - 1))
            amp = (bx - 1j * by) if bits[q] == 1 else (bx + 1j * by)
            H[new, idx] += amp / 2
        # (sx sx + sy sy)/2 = flip-flop with amplitude 1 between |01> and |10>
        for (a, b), c in (((3, 2), g), ((3, 1), g), ((2, 1), J)):
            if bits[a] != bits[b]:
                new = idx ^ (1 << (a - 1)) ^ (1 << (b - 1))
                H[new, idx] += c
    return H


class TestBasis:
    def test_index_roundtrip(self):
        seen = set()
        for bits in itertools.product((0, 1), repeat=3):
            k = basis_index(*bits)
            assert basis_bits(k) == bits
            seen.add(k)
        assert seen == set(range(8))

    def test_ket_label_order(self):
        assert np.argmax(np.abs(ket("001"))) == 1
        assert np.argmax(np.abs(ket("100"))) == 4

    def test_bad_label(self):
        with pytest.raises(ValueError):
            ket("012")


class TestPauliEmbed:
    def test_z_on_qubit1(self):
        Z1 = pauli_embed("z", 1)
        v = ket("001")
        assert np.allclose(Z1 @ v, -v)
        assert np.allclose(Z1 @ ket("110"), ket("110"))

    @pytest.mark.parametrize("axis", "xyz")
    @pytest.mark.parametrize("qubit", [1, 2, 3])
    def test_involution_and_hermitian(self, axis, qubit):
        P = pauli_embed(axis, qubit)
        assert is_hermitian(P)
        assert np.allclose(P @ P, np.eye(8))

    def test_different_qubits_commute(self):
        X1, Y2 = pauli_embed("x", 1), pauli_embed("y", 2)
        assert np.allclose(X1 @ Y2 - Y2 @ X1, 0)

    def test_same_qubit_anticommute(self):
        X3, Y3 = pauli_embed("x", 3), pauli_embed("y", 3)
        assert np.allclose(X3 @ Y3 + Y3 @ X3, 0)

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            pauli_embed("w", 1)
        with pytest.raises(ValueError):
            pauli_embed("x", 4)


class TestBuildHamiltonian:
    @pytest.mark.parametrize("pt", [(1, 0.5, 1.0, 0.0), (1.3, -0.4, 2.7, 1.9), (0.7, 0.2, 0.0, 3.0)])
    def test_matches_bitwise_builder(self, pt):
        assert np.allclose(build_hamiltonian(SystemParams(*pt)), bitwise_hamiltonian(*pt),
                           atol=1e-14)

    def test_singlet_at_zero_field(self):
        H = build_hamiltonian(SystemParams(1.0, 0.5, 0.0, 0.0))
        chi3 = (ket("001") - ket("010")) / np.sqrt(2)
        assert np.allclose(H @ chi3, -0.5 * chi3, atol=1e-14)

    def test_pure_J_coupling(self):
        H = build_hamiltonian(SystemParams(0.0, 0.8, 0.0, 0.0))
        expected = 0.4 * (pauli_embed("x", 2) @ pauli_embed("x", 1)
                          + pauli_embed("y", 2) @ pauli_embed("y", 1))
        assert np.allclose(H, expected)
        assert abs(np.trace(H)) < 1e-15

    def test_spectrum_at_reference_point(self):
        p = SystemParams(1.0, 0.3, 1.2, 0.7)
        numeric = np.linalg.eigvalsh(build_hamiltonian(p))
        closed, _ = closed_form_eigenvalues(p)
        assert np.max(np.abs(numeric - closed)) < 1e-10


@settings(max_examples=40, deadline=None)
@given(g=st.floats(0.1, 3), J=st.floats(-2, 2), B=st.floats(0, 5), phi=st.floats(-7, 7))
def test_hamiltonian_properties(g, J, B, phi):
    H = build_hamiltonian(SystemParams(g, J, B, phi))
    assert is_hermitian(H)
    assert abs(np.trace(H)) < 1e-12
    # complex conjugation reverses the drive angle
    assert np.allclose(H.conj(), build_hamiltonian(SystemParams(g, J, B, -phi)), atol=1e-13)
    # the drive angle is a unitary (collective z) rotation
    e_phi = np.linalg.eigvalsh(H)
    e_0 = np.linalg.eigvalsh(build_hamiltonian(SystemParams(g, J, B, 0.0)))
    assert np.max(np.abs(e_phi - e_0)) < 1e-10


class TestValidation:
    def test_guards(self):
        with pytest.raises(ValueError):
            SystemParams(0.0, 0.5, 1.0).validate()
        with pytest.raises(ValueError):
            SystemParams(1.0, 0.0, 1.0).validate()
        with pytest.raises(ValueError):
            SystemParams(1.0, 0.5, -1.0).validate()
        with pytest.raises(ValueError, match="2g"):
            SystemParams(1.0, 0.5, 2.0).validate()
        SystemParams(1.0, 0.5, 2.0).validate(allow_forbidden_field=True)

    def test_scaled(self):
        p = SystemParams(2.0, 1.0, 3.0, 0.1).scaled()
        assert (p.g, p.J, p.B, p.phi) == (1.0, 0.5, 1.5, 0.1)
