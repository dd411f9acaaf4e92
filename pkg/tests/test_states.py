import itertools

import numpy as np
import pytest

from unlockable import states
from unlockable.analysis import ppt_check
from unlockable.errors import ArgumentError, CapacityError
from unlockable.states import BellKind, WeylLabel
from unlockable.tensor import (
    Cut,
    StateVector,
    SubsystemLayout,
    fidelity_pure,
    frobenius_distance,
    hermitian_eigenvalues,
    partial_trace,
)

from oracles import brute_gram, ket

S = 1 / np.sqrt(2)


def apply_local(op_a, op_b, vec):
    return np.kron(op_a, op_b) @ vec


def shift_clock_loops(d):
    x = np.zeros((d, d), dtype=complex)
    z = np.zeros((d, d), dtype=complex)
    for k in range(d):
        x[(k + 1) % d, k] = 1
        z[k, k] = np.exp(2j * np.pi * k / d)
    return x, z


class TestBell:
    def test_phi_plus(self):
        assert np.allclose(states.bell_state(BellKind.PHI_PLUS).amplitudes, [S, 0, 0, S])

    def test_psi_minus(self):
        assert np.allclose(states.bell_state(BellKind.PSI_MINUS).amplitudes, [0, S, -S, 0])

    def test_gram_identity(self):
        vecs = [states.bell_state(k).amplitudes for k in BellKind]
        assert np.allclose(brute_gram(vecs), np.eye(4), atol=1e-15)

    def test_parse(self):
        assert BellKind.parse("PsiMinus") is BellKind.PSI_MINUS
        assert BellKind.parse("PHI_PLUS") is BellKind.PHI_PLUS
        with pytest.raises(ArgumentError):
            BellKind.parse("Omega")


class TestSigma:
    def test_listing(self):
        assert np.array_equal(states.pauli_sigma(0), np.eye(2))
        assert np.array_equal(states.pauli_sigma(1), [[1, 0], [0, -1]])
        assert np.array_equal(states.pauli_sigma(2), [[0, -1], [1, 0]])
        assert np.array_equal(states.pauli_sigma(3), [[0, 1], [1, 0]])

    @pytest.mark.parametrize("i", range(4))
    def test_unitary_and_self_inverse_up_to_phase(self, i):
        s = states.pauli_sigma(i)
        assert np.allclose(s @ s.conj().T, np.eye(2))
        sq = s @ s
        assert np.allclose(sq, sq[0, 0] * np.eye(2)) and abs(abs(sq[0, 0]) - 1) < 1e-15

    def test_psi_plus_to_psi_minus(self):
        out = apply_local(np.eye(2), states.pauli_sigma(1), states.bell_state(BellKind.PSI_PLUS).amplitudes)
        assert abs(np.vdot(states.singlet().amplitudes, out)) ** 2 == pytest.approx(1)

    @pytest.mark.parametrize("i", range(4))
    @pytest.mark.parametrize("side", ["left", "right"])
    def test_correction_table_both_sides(self, i, side):
        s = states.pauli_sigma(i)
        ops = (s, np.eye(2)) if side == "left" else (np.eye(2), s)
        out = apply_local(*ops, states.bell_state(states.BELL_FOR_SIGMA[i]).amplitudes)
        psi = StateVector(SubsystemLayout.uniform("AB"), out)
        assert fidelity_pure(psi.density(), states.singlet()) == pytest.approx(1, abs=1e-12)

    def test_bad_index(self):
        with pytest.raises(ArgumentError):
            states.pauli_sigma(4)

    def test_composition_table(self):
        for a, b in itertools.product(range(4), repeat=2):
            prod = states.pauli_sigma(a) @ states.pauli_sigma(b)
            ref = states.pauli_sigma(states.sigma_compose(a, b))
            # entrywise proportional with a unit-modulus constant
            ratio = [prod[i, j] / ref[i, j] for i in range(2) for j in range(2) if ref[i, j] != 0]
            assert all(abs(r - ratio[0]) < 1e-15 for r in ratio)
            assert np.allclose(prod[ref == 0], 0)
            assert abs(abs(ratio[0]) - 1) < 1e-15

    def test_composition_is_klein_group(self):
        t = states.SIGMA_COMPOSITION
        assert all(t[0][a] == a and t[a][a] == 0 for a in range(4))
        assert all(t[a][b] == t[b][a] for a in range(4) for b in range(4))


class TestWeyl:
    def test_identity(self):
        assert np.allclose(states.heisenberg_weyl(WeylLabel(2, 0, 0)), np.eye(2))

    def test_bit_flip(self):
        assert np.allclose(states.heisenberg_weyl(WeylLabel(2, 1, 0)), [[0, 1], [1, 0]])

    def test_matches_loop_construction(self):
        for d in (2, 3, 4, 5):
            x, z = shift_clock_loops(d)
            for lab in WeylLabel.all(d):
                ref = np.linalg.matrix_power(x, lab.a) @ np.linalg.matrix_power(z, lab.b)
                assert np.allclose(states.heisenberg_weyl(lab), ref)

    def test_trace_orthogonality_d3(self):
        labels = WeylLabel.all(3)
        table = np.zeros((9, 9), dtype=complex)
        for (i, p), (j, q) in itertools.product(enumerate(labels), repeat=2):
            wp, wq = states.heisenberg_weyl(p), states.heisenberg_weyl(q)
            table[i, j] = sum(np.conj(wp[k, m]) * wq[k, m] for k in range(3) for m in range(3))
        assert table.shape == (9, 9)
        assert np.allclose(table, 3 * np.eye(9), atol=1e-12)

    def test_label_validation(self):
        with pytest.raises(ArgumentError):
            WeylLabel(3, 3, 0)
        with pytest.raises(ArgumentError):
            WeylLabel(1, 0, 0)
        assert WeylLabel.wrap(3, -1, 4) == WeylLabel(3, 2, 1)
        assert len(WeylLabel.all(4)) == 16

    def test_d2_matches_rotation_set(self):
        # X^1 Z^1 is exactly the listed sigma_2, X^0 Z^1 sigma_1
        assert np.allclose(states.heisenberg_weyl(WeylLabel(2, 1, 1)), states.pauli_sigma(2))
        assert np.allclose(states.heisenberg_weyl(WeylLabel(2, 0, 1)), states.pauli_sigma(1))


class TestGeneralizedBell:
    def test_canonical(self):
        assert np.allclose(states.generalized_bell_state(WeylLabel(2, 0, 0)).amplitudes, [S, 0, 0, S])

    def test_d2_correspondence_exact(self):
        for kind, (a, b) in states.WEYL_FOR_BELL.items():
            v = states.generalized_bell_state(WeylLabel(2, a, b)).amplitudes
            assert np.allclose(v, states.bell_state(kind).amplitudes, atol=1e-15)

    @pytest.mark.parametrize("d", [3, 4])
    def test_orthonormal_basis(self, d):
        vecs = [states.generalized_bell_state(l).amplitudes for l in WeylLabel.all(d)]
        assert np.allclose(brute_gram(vecs), np.eye(d * d), atol=1e-12)

    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_reduced_states_maximally_mixed(self, d):
        for lab in WeylLabel.all(d):
            rho = states.generalized_bell_state(lab).density()
            for side in "AB":
                assert np.allclose(partial_trace(rho, {side}).matrix, np.eye(d) / d, atol=1e-12)

    def test_explicit_amplitudes_d3(self):
        # (I (x) X Z)|Phi> = sum_k w^k |k, k+1> / sqrt 3
        w = np.exp(2j * np.pi / 3)
        ref = np.zeros(9, dtype=complex)
        for k in range(3):
            ref[3 * k + (k + 1) % 3] = w**k / np.sqrt(3)
        assert np.allclose(states.generalized_bell_state(WeylLabel(3, 1, 1)).amplitudes, ref)


class TestFourPartyState:
    def test_trace_and_spectrum(self):
        rho = states.smolin_state()
        assert rho.trace() == pytest.approx(1, abs=1e-12)
        assert np.allclose(hermitian_eigenvalues(rho), [0.25] * 4 + [0] * 12, atol=1e-14)

    def test_entries_from_written_out_vectors(self):
        # the four product vectors written in the computational basis
        written = [
            ket("0000") + ket("0011") + ket("1100") + ket("1111"),
            ket("0000") - ket("0011") - ket("1100") + ket("1111"),
            ket("0101") + ket("0110") + ket("1001") + ket("1010"),
            ket("0101") - ket("0110") - ket("1001") + ket("1010"),
        ]
        oracle = sum(np.outer(v / 2, v / 2) for v in written) / 4
        assert oracle[0, 0] == pytest.approx(1 / 8) and oracle[0, 15] == pytest.approx(1 / 8)
        rho = states.smolin_state().matrix
        assert rho[0, 0] == pytest.approx(1 / 8, abs=1e-15)
        assert rho[0, 15] == pytest.approx(1 / 8, abs=1e-15)
        assert np.allclose(rho, oracle, atol=1e-15)

    def test_pauli_expansion(self):
        # (1/16) (I + XXXX + YYYY + ZZZZ), a known closed form
        x = np.array([[0, 1], [1, 0]])
        y = np.array([[0, -1j], [1j, 0]])
        z = np.diag([1, -1])

        def four(p):
            return np.kron(np.kron(p, p), np.kron(p, p))

        closed = (np.eye(16) + four(x) + four(y) + four(z)) / 16
        assert np.allclose(states.smolin_state().matrix, closed, atol=1e-15)

    def test_labels(self):
        assert states.smolin_state(("P", "Q", "R", "S")).labels == ("P", "Q", "R", "S")


class TestQudit:
    def test_d2_equals_qubit_state(self):
        assert frobenius_distance(states.smolin_qudit_state(2), states.smolin_state()) <= 1e-12

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_trace_rank(self, d):
        rho = states.smolin_qudit_state(d)
        assert rho.trace() == pytest.approx(1, abs=1e-10)
        assert int(np.sum(hermitian_eigenvalues(rho) > 1e-9)) == d * d

    def test_d3_ppt_ab_cd(self):
        rep = ppt_check(states.smolin_qudit_state(3), Cut.parse("AB:CD"))
        assert rep.is_ppt and rep.min_eigenvalue >= -1e-10

    @pytest.mark.parametrize("d", [1, 6])
    def test_range(self, d):
        with pytest.raises(CapacityError):
            states.smolin_qudit_state(d)

    def test_d5_fits_cap(self):
        assert states.smolin_qudit_state(5).layout.total_dim == 625
