import numpy as np
import pytest

from wswap.qlinalg import StateVector, kron, permute_qubits
from wswap.states import WFamilyParams, charlie_basis, pauli, prototype_w, w_family, w_state

SQ2 = np.sqrt(2)


def ket(**amps):
    v = np.zeros(8, dtype=complex)
    for label, a in amps.items():
        v[int(label[1:], 2)] = a
    return v


class TestWState:
    def test_basis_probabilities(self):
        p = w_state().probabilities()
        assert p[0b100] == pytest.approx(0.25)
        assert p[0b010] == pytest.approx(0.25)
        assert p[0b001] == pytest.approx(0.5)
        assert p.sum() == pytest.approx(1.0, abs=1e-15)

    def test_is_family_member(self):
        np.testing.assert_allclose(w_family(WFamilyParams(1, 0, 0)).amplitudes, w_state().amplitudes)

    def test_family_substitution(self):
        out = w_family(WFamilyParams(n=2, gamma=np.pi, delta=0))
        expected = ket(b100=1, b010=-SQ2, b001=np.sqrt(3)) / np.sqrt(6)
        np.testing.assert_allclose(out.amplitudes, expected, atol=1e-15)

    @pytest.mark.parametrize("n", [0.1, 0.5, 1, 2, 5, 40])
    def test_family_normalised(self, n):
        assert w_family(WFamilyParams(n, 0.3, -1.1)).norm == pytest.approx(1, abs=1e-14)

    @pytest.mark.parametrize("n", [0, -1])
    def test_family_rejects_nonpositive(self, n):
        with pytest.raises(ValueError):
            WFamilyParams(n)


class TestPrototype:
    def test_uniform(self):
        np.testing.assert_allclose(prototype_w().probabilities()[[4, 2, 1]], [1 / 3] * 3)

    def test_overlap_with_w(self):
        # (1/2 + 1/2 + sqrt2/2)^2 / 3
        expected = (1 + SQ2 / 2) ** 2 / 3
        assert abs(prototype_w().inner(w_state())) ** 2 == pytest.approx(expected, abs=1e-14)
        assert expected == pytest.approx(0.9714, abs=1e-4)


class TestCharlieBasis:
    def test_eta_plus_n1(self):
        b = charlie_basis()
        expected = ket(b010=1, b001=1, b100=SQ2) / 2
        np.testing.assert_allclose(b.outcomes[0].amplitudes, expected, atol=1e-15)

    def test_all_outcomes_n1(self):
        b = charlie_basis()
        expected = [
            ket(b010=1, b001=1, b100=SQ2) / 2,
            ket(b010=1, b001=1, b100=-SQ2) / 2,
            ket(b110=1, b101=1, b000=SQ2) / 2,
            ket(b110=1, b101=1, b000=-SQ2) / 2,
        ]
        for got, exp in zip(b.outcomes, expected):
            np.testing.assert_allclose(got.amplitudes, exp, atol=1e-15)

    def test_named_overlaps(self):
        eta_p, eta_m, xi_p, _ = charlie_basis().outcomes
        assert abs(eta_p.inner(eta_m)) < 1e-15
        assert abs(eta_p.inner(xi_p)) < 1e-15

    def test_n1_completion(self):
        comp = charlie_basis().completion
        expected = [
            ket(b010=1, b001=-1) / SQ2,
            ket(b110=1, b101=-1) / SQ2,
            ket(b011=1),
            ket(b111=1),
        ]
        for got, exp in zip(comp, expected):
            np.testing.assert_allclose(got.amplitudes, exp, atol=1e-15)

    def test_gram_schmidt_reproduces_n1_span(self):
        # Gram-Schmidt on the n=1 outcomes (forced via a tiny phase) must span
        # the same complement as the analytic set.
        b = charlie_basis(WFamilyParams(1, 0, 1e-300))
        analytic = np.array([v.amplitudes for v in charlie_basis().completion])
        gs = np.array([v.amplitudes for v in b.completion])
        proj_a = analytic.T @ analytic.conj()
        proj_g = gs.T @ gs.conj()
        np.testing.assert_allclose(proj_a, proj_g, atol=1e-12)

    @pytest.mark.parametrize("n", [0.5, 1, 2, 5])
    def test_orthonormal_random_phases(self, n):
        rng = np.random.default_rng(int(n * 10))
        for _ in range(5):
            g, d = rng.uniform(-np.pi, np.pi, 2)
            gram = charlie_basis(WFamilyParams(n, g, d)).gram()
            assert np.max(np.abs(gram - np.eye(8))) < 1e-12

    def test_basis_matrix_maps_outcomes(self):
        b = charlie_basis()
        u = b.matrix()
        for i, v in enumerate(b.outcomes):
            np.testing.assert_allclose(u @ v.amplitudes, np.eye(8)[i], atol=1e-15)


class TestPauli:
    def test_x_flips(self):
        np.testing.assert_array_equal(pauli("X") @ [1, 0], [0, 1])

    def test_z_phase(self):
        np.testing.assert_array_equal(pauli("Z") @ [0, 1], [0, -1])

    def test_xz_squares_to_minus_identity(self):
        xz = pauli("XZ")
        np.testing.assert_array_equal(xz @ xz, -np.eye(2))
        np.testing.assert_array_equal(xz.conj().T @ xz, np.eye(2))

    def test_unknown(self):
        with pytest.raises(ValueError):
            pauli("Y")


def test_decomposition_identity_n1():
    """Hand-expanded nine-term regrouping onto qubits (3,4,5 | 1,2,6)."""
    w = w_state().amplitudes
    combined = StateVector(kron(w, w))
    # old qubit order 1..6 -> new positions: 3,4,5 first, then 1,2,6
    reordered = permute_qubits(combined, [3, 4, 0, 1, 2, 5]).amplitudes

    # nine terms: |abc>_{345} |def>_{126} with coefficient /4
    terms = {
        ("010", "100"): 1, ("001", "100"): 1, ("000", "101"): SQ2,
        ("010", "010"): 1, ("001", "010"): 1, ("000", "011"): SQ2,
        ("110", "000"): SQ2, ("101", "000"): SQ2, ("100", "001"): 2,
    }
    by_hand = np.zeros(64, dtype=complex)
    for (c, s), a in terms.items():
        by_hand[int(c + s, 2)] = a / 4
    np.testing.assert_allclose(reordered, by_hand, atol=1e-12)

    b = charlie_basis()
    x, z = pauli("X"), pauli("Z")

    def regroup(xi_minus_op):
        ops = [pauli("I"), z, x, xi_minus_op]
        return sum(0.5 * kron(v.amplitudes, kron(np.eye(4), op) @ w) for v, op in zip(b.outcomes, ops))

    # sigma_x then sigma_z on Bob's qubit (matrix Z @ X) regroups exactly
    assert np.max(np.abs(regroup(z @ x) - reordered)) < 1e-12
    # the matrix product X @ Z differs only by a sign on that one term,
    # which is a global phase of the xi- branch
    assert np.max(np.abs(regroup(-(x @ z)) - reordered)) < 1e-12
    np.testing.assert_array_equal(pauli("XZ"), x @ z)
