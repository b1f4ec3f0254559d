import numpy as np
import pytest

from wswap import circuit as qc
from wswap.channels import GateNoiseParams, weak_measurement_ops
from wswap.protocol import (
    damped_shared_state,
    ideal_swap,
    pipeline_state,
    purified_shared_state,
)
from wswap.qlinalg import DensityMatrix, StateVector, embed, is_unitary, partial_trace, pure_fidelity, trace_distance
from wswap.states import charlie_basis, w_state

ETA_BITS = {0: 0, 1: 0}


def eta_select(bits):
    return qc.is_eta(bits)


def strip_phase(v):
    i = np.argmax(np.abs(v))
    return v * np.exp(-1j * np.angle(v[i]))


class TestGateOp:
    def test_cu_matches_printed_matrix(self):
        th, ph, la = 0.7, 0.3, -1.1
        c, s = np.cos(th / 2), np.sin(th / 2)
        printed = np.array(
            [
                [1, 0, 0, 0],
                [0, np.exp(-0.5j * (ph + la)) * c, 0, -np.exp(-0.5j * (ph - la)) * s],
                [0, 0, 1, 0],
                [0, np.exp(0.5j * (ph - la)) * s, 0, np.exp(0.5j * (ph + la)) * c],
            ]
        )
        np.testing.assert_array_equal(qc.cu_matrix(th, ph, la, 0.0), printed)

    def test_cu_control_is_first_qubit(self):
        c = qc.Circuit(2).cu(np.pi, 0, 0, 0, 0, 1)
        out = qc.run_statevector(c, StateVector.from_label("10")).amplitudes
        np.testing.assert_allclose(out, StateVector.from_label("11").amplitudes, atol=1e-15)
        out = qc.run_statevector(c, StateVector.from_label("01")).amplitudes
        np.testing.assert_allclose(out, StateVector.from_label("01").amplitudes, atol=1e-15)

    @pytest.mark.parametrize(
        "op",
        [
            qc.GateOp("X", (0,)),
            qc.GateOp("H", (0,)),
            qc.GateOp("RX", (0,), (0.3,)),
            qc.GateOp("RY", (0,), (1.2,)),
            qc.GateOp("CNOT", (0, 1)),
            qc.GateOp("CU", (0, 1), (0.4, 0.1, 0.2, 0.3)),
        ],
    )
    def test_unitary(self, op):
        assert is_unitary(op.unitary(), atol=1e-12)

    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError):
            qc.GateOp("UNITARY", (0,), matrix=np.diag([1, 2]))

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            qc.GateOp("TOFFOLI", (0, 1, 2))


class TestStatevector:
    def test_empty(self):
        np.testing.assert_array_equal(qc.run_statevector(qc.Circuit(1)).amplitudes, [1, 0])

    def test_double_x(self):
        c = qc.Circuit(1).x(0).x(0)
        np.testing.assert_array_equal(qc.run_statevector(c).amplitudes, [1, 0])

    def test_w_prep(self):
        out = strip_phase(qc.run_statevector(qc.w_prep_circuit()).amplitudes)
        np.testing.assert_allclose(out, w_state().amplitudes, atol=1e-10)
        assert np.linalg.norm(out) == pytest.approx(1, abs=1e-14)

    def test_w_prep_density(self):
        res = qc.run_density(qc.w_prep_circuit())
        ((bits, b),) = res
        assert trace_distance(b.state, w_state().to_density()) < 1e-10

    def test_noise_unsupported(self):
        with pytest.raises(qc.UnsupportedModeError):
            qc.run_statevector(qc.swap_circuit(damping=0.3))
        with pytest.raises(qc.UnsupportedModeError):
            qc.statevector_branches(qc.swap_circuit(GateNoiseParams(0.9, 1.0)))

    def test_measurement_needs_branches(self):
        with pytest.raises(qc.UnsupportedModeError):
            qc.run_statevector(qc.swap_circuit())


class TestBasisChange:
    @pytest.mark.parametrize("decompose", [False, True])
    def test_named_vectors(self, decompose):
        b = charlie_basis()
        for i, v in enumerate(b.outcomes):
            out = qc.run_statevector(basis := qc.basis_change_circuit(decompose), v)
            np.testing.assert_allclose(np.abs(out.amplitudes), np.eye(8)[i], atol=1e-10)
        assert basis.cnot_count == (5 if decompose else 0)

    def test_eta_plus_to_zero(self):
        out = qc.run_statevector(qc.basis_change_circuit(), charlie_basis().outcomes[0])
        np.testing.assert_allclose(out.amplitudes, np.eye(8)[0], atol=1e-12)

    def test_unitary(self):
        u = qc.basis_change_circuit().ops[0].unitary()
        assert is_unitary(u, atol=1e-12)

    @pytest.mark.parametrize("decompose", [False, True])
    def test_completion_to_upper_half(self, decompose):
        for v in charlie_basis().completion:
            out = qc.run_statevector(qc.basis_change_circuit(decompose), v).amplitudes
            assert np.sum(np.abs(out[4:]) ** 2) == pytest.approx(1, abs=1e-12)


class TestGadget:
    def test_q0_identity(self):
        k0, k1 = qc.gadget_operators(0.0)
        np.testing.assert_allclose(np.abs(k0), np.eye(2), atol=1e-12)
        np.testing.assert_allclose(k1, 0, atol=1e-12)

    def test_angle(self):
        assert qc.weak_measurement_angle(0.64) == pytest.approx(2 * np.arctan(0.8 / 0.6), abs=1e-14)
        assert qc.weak_measurement_angle(0.64) == pytest.approx(1.85459, abs=1e-5)
        assert qc.weak_measurement_angle(1.0) == pytest.approx(np.pi)

    @pytest.mark.parametrize("q", [0.1, 0.36, 0.64, 0.9, 1.0])
    def test_effective_operators(self, q):
        k0, k1 = qc.gadget_operators(q)
        m, mbar = weak_measurement_ops(q).operators
        # fix the global phase from the two RX(pi) gates
        phase = k0[1, 1] / m[1, 1]
        np.testing.assert_allclose(k0 / phase, m, atol=1e-10)
        np.testing.assert_allclose(np.abs(k1), mbar, atol=1e-10)
        comp = k0.conj().T @ k0 + k1.conj().T @ k1
        np.testing.assert_allclose(comp, np.eye(2), atol=1e-10)

    def test_dilation_trace_preserving(self):
        rng = np.random.default_rng(0)
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        rho = a @ a.conj().T
        rho /= np.trace(rho)
        q = 0.36
        res = qc.run_density(qc.weak_measurement_gadget(q), initial=DensityMatrix(np.kron(rho, np.diag([1, 0]))))
        mixed = sum(b.probability * partial_trace(b.state, [0]).matrix for _, b in res)
        m, mbar = weak_measurement_ops(q).operators
        expected = m @ rho @ m.conj().T + mbar @ rho @ mbar.conj().T
        np.testing.assert_allclose(mixed, expected, atol=1e-10)


class TestSwapCircuit:
    def test_ideal_branches(self):
        res = qc.run_density(qc.swap_circuit())
        assert [bits for bits, _ in res] == ["000", "001", "010", "011"]
        for _, b in res:
            assert b.probability == pytest.approx(0.25, abs=1e-12)
            red = partial_trace(b.state, qc.SHARED_QUBITS)
            assert pure_fidelity(w_state(), red) == pytest.approx(1, abs=1e-10)

    def test_decomposed_ideal(self):
        res = qc.run_density(qc.swap_circuit(decompose=True))
        for _, b in res:
            red = partial_trace(b.state, qc.SHARED_QUBITS)
            assert pure_fidelity(w_state(), red) == pytest.approx(1, abs=1e-10)

    def test_density_matches_statevector_branches(self):
        c = qc.swap_circuit()
        dens = qc.run_density(c)
        pure = qc.statevector_branches(c)
        assert [b for b, _ in dens] == [b for b, _, _ in pure]
        for (_, b), (_, p, s) in zip(dens, pure):
            assert b.probability == pytest.approx(p, abs=1e-12)
            np.testing.assert_allclose(b.state.matrix, s.to_density().matrix, atol=1e-12)

    def test_noiseless_params_are_ideal(self):
        f = qc.gate_noise_fidelity(1.0, 1.0)
        assert f == pytest.approx(1, abs=1e-10)

    @pytest.mark.parametrize("r", [0.1, 0.3, 0.5])
    def test_damped_matches_matrix_pipeline(self, r):
        res = qc.run_density(qc.swap_circuit(damping=r), postselect=ETA_BITS)
        b = qc.reduce_branches(res, qc.SHARED_QUBITS)
        assert b.probability == pytest.approx((1 - r * r) / 2, abs=1e-12)
        assert trace_distance(b.state, damped_shared_state(r)) < 1e-9

    @pytest.mark.parametrize("q", [0.3, 0.64])
    def test_purified_matches_matrix_pipeline(self, q):
        r = 0.3
        sel = {0: 0, 1: 0, 3: 0, 4: 0, 5: 0}
        res = qc.run_density(qc.swap_circuit(damping=r, purify_q=q), postselect=sel)
        b = qc.reduce_branches(res, qc.SHARED_QUBITS)
        assert trace_distance(b.state, pipeline_state(r, q)) < 1e-9
        assert trace_distance(b.state, purified_shared_state(r, q)) < 1e-9

    def test_postselect_equals_filter(self):
        c = qc.swap_circuit(damping=0.2)
        a = qc.reduce_branches(qc.run_density(c, postselect=ETA_BITS), qc.SHARED_QUBITS)
        b = qc.reduce_branches(qc.run_density(c), qc.SHARED_QUBITS, eta_select)
        assert a.probability == pytest.approx(b.probability, abs=1e-14)
        np.testing.assert_allclose(a.state.matrix, b.state.matrix, atol=1e-14)

    def test_ideal_protocol_and_circuit_agree(self):
        res = qc.run_density(qc.swap_circuit())
        avg = qc.reduce_branches(res, qc.SHARED_QUBITS).state
        assert trace_distance(avg, ideal_swap().average_state()) < 1e-9

    def test_metadata(self):
        assert qc.swap_circuit(decompose=True).metadata["cnot_count"] == 11
        assert qc.swap_circuit().metadata["cnot_count"] == 6


class TestSerialization:
    @pytest.mark.parametrize(
        "c",
        [
            qc.swap_circuit(),
            qc.swap_circuit(damping=0.3, purify_q=0.64, measure_output=True),
            qc.swap_circuit(decompose=True),
        ],
    )
    def test_round_trip(self, c):
        back = qc.Circuit.loads(c.dumps())
        assert back.num_qubits == c.num_qubits and back.num_classical == c.num_classical
        assert back.dumps() == c.dumps()
        for a, b in zip(back.ops, c.ops):
            assert a == b
            if a.kind == "UNITARY":
                np.testing.assert_array_equal(a.matrix, b.matrix)

    def test_line_format(self):
        text = qc.swap_circuit(damping=0.3).dumps()
        assert "MEASURE 2 -> 0" in text
        assert "CONDITIONAL 2 Z 5" in text
        assert "AD 2 0.3" in text
        assert text.endswith("\n") and "\r" not in text

    def test_validate_conditional_order(self):
        c = qc.Circuit(1, 1)
        c.c_if(0, qc.GateOp("X", (0,)))
        with pytest.raises(ValueError):
            c.validate()


class TestShots:
    def test_single_shot(self):
        r = qc.sample_shots(qc.swap_circuit(), 1, seed=3)
        assert sum(r.counts.values()) == 1

    def test_deterministic(self):
        c = qc.swap_circuit(measure_output=True)
        assert qc.sample_shots(c, 5000, 11) == qc.sample_shots(c, 5000, 11)

    def test_total(self):
        r = qc.sample_shots(qc.swap_circuit(), 777, seed=1)
        assert sum(r.counts.values()) == 777 and r.shots == 777

    def test_frequency_of_001(self):
        shots = 100_000
        r = qc.sample_shots(qc.swap_circuit(measure_output=True), shots, seed=7)
        eta = r.frequency(eta_select)
        f = sum(n for b, n in r.counts.items() if eta_select(b) and b[3:6] == "001") / shots / eta
        assert abs(f - 0.5) < 3 * np.sqrt(0.25 / (shots * eta))

    def test_total_variation(self):
        shots = 20_000
        c = qc.swap_circuit(damping=0.3, measure_output=True)
        exact = {bits: b.probability for bits, b in qc.run_density(c)}
        r = qc.sample_shots(c, shots, seed=5)
        tv = 0.5 * sum(abs(r.counts.get(k, 0) / shots - p) for k, p in exact.items())
        assert tv < 5 * np.sqrt(len(exact) / shots)

    def test_bad_shots(self):
        with pytest.raises(ValueError):
            qc.sample_shots(qc.swap_circuit(), 0, seed=1)
