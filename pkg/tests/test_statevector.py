# tests/test_statevector.py
import math

import numpy as np
import pytest

from utils.errors import ArgumentError, ConfigurationError, ResourceLimitError
from utils.statevector import (Circuit, Gate, GateKind, Statevector, adjoint, apply_circuit, circuit_from_dict,
                               circuit_to_dict, circuit_unitary, gate_matrix, inner_product, probability_all_zeros,
                               sample_all_zeros, sample_zero_counts, zero_state)


def single_qubit_kron(matrix, qubit, num_qubits):
    """Operador completo little-endian: qubit 0 é o fator mais à direita."""
    full = np.eye(1, dtype=complex)
    for q in reversed(range(num_qubits)):
        full = np.kron(full, matrix if q == qubit else np.eye(2))
    return full


KINDS = list(GateKind)


def random_circuit(rng, num_qubits, depth):
    gates = []
    for _ in range(depth):
        kind = KINDS[int(rng.integers(len(KINDS)))]
        if kind in (GateKind.CX, GateKind.CZ):
            if num_qubits < 2:
                continue
            a, b = rng.choice(num_qubits, size=2, replace=False)
            gates.append(Gate(kind, (a, b)))
        elif kind in (GateKind.P, GateKind.RZ, GateKind.RX, GateKind.RY):
            gates.append(Gate(kind, (rng.integers(num_qubits),), rng.uniform(-math.pi, math.pi)))
        else:
            gates.append(Gate(kind, (rng.integers(num_qubits),)))
    return Circuit(num_qubits, gates)


class TestGates:
    @pytest.mark.parametrize("kind", [k for k in GateKind])
    def test_matrices_are_unitary(self, kind):
        targets = (0, 1) if kind in (GateKind.CX, GateKind.CZ) else (0,)
        angle = 0.731 if kind in (GateKind.P, GateKind.RZ, GateKind.RX, GateKind.RY) else None
        m = gate_matrix(Gate(kind, targets, angle))
        np.testing.assert_allclose(m.conj().T @ m, np.eye(m.shape[0]), atol=1e-12)

    def test_rz_convention(self):
        theta = 0.9
        m = gate_matrix(Gate(GateKind.RZ, (0,), theta))
        np.testing.assert_allclose(np.diag(m), [np.exp(-1j * theta / 2), np.exp(1j * theta / 2)])

    def test_sx_squared_is_x(self):
        sx = gate_matrix(Gate(GateKind.SX, (0,)))
        np.testing.assert_allclose(sx @ sx, gate_matrix(Gate(GateKind.X, (0,))), atol=1e-12)

    def test_parametric_gate_requires_angle(self):
        with pytest.raises(ConfigurationError):
            Gate(GateKind.RX, (0,))

    @pytest.mark.parametrize("kind,targets", [(GateKind.CX, (0,)), (GateKind.H, (0, 1)), (GateKind.CZ, (1, 1))])
    def test_wrong_arity_or_repeated_targets(self, kind, targets):
        with pytest.raises(ConfigurationError):
            Gate(kind, targets)


class TestApplyCircuit:
    def test_hadamard_on_qubit_zero_sets_low_bit(self):
        state = apply_circuit(zero_state(2), Circuit(2, [Gate(GateKind.H, (0,))]))
        np.testing.assert_allclose(state.amplitudes, [1 / math.sqrt(2), 1 / math.sqrt(2), 0, 0], atol=1e-12)

    def test_x_on_qubit_one(self):
        state = apply_circuit(zero_state(2), Circuit(2, [Gate(GateKind.X, (1,))]))
        np.testing.assert_allclose(state.amplitudes, [0, 0, 1, 0])

    def test_cx_control_is_first_target(self):
        circuit = Circuit(2, [Gate(GateKind.X, (0,)), Gate(GateKind.CX, (0, 1))])
        state = apply_circuit(zero_state(2), circuit)
        np.testing.assert_allclose(state.amplitudes, [0, 0, 0, 1])

    def test_input_state_is_not_modified(self):
        start = zero_state(3)
        before = start.amplitudes.copy()
        apply_circuit(start, Circuit(3, [Gate(GateKind.H, (q,)) for q in range(3)]))
        np.testing.assert_array_equal(start.amplitudes, before)

    def test_norm_is_preserved(self, rng):
        state = apply_circuit(zero_state(4), random_circuit(rng, 4, 40))
        assert state.norm() == pytest.approx(1.0, abs=1e-12)

    def test_qubit_mismatch(self):
        with pytest.raises(ConfigurationError):
            apply_circuit(zero_state(2), Circuit(3, []))

    def test_target_out_of_range(self):
        with pytest.raises(ConfigurationError):
            apply_circuit(zero_state(2), Circuit(2, [Gate(GateKind.H, (2,))]))

    def test_statevector_length_checked(self):
        with pytest.raises(ConfigurationError):
            Statevector(2, np.ones(3))


class TestUnitary:
    def test_single_qubit_gates_match_kron(self, rng):
        for _ in range(10):
            n = int(rng.integers(1, 4))
            q = int(rng.integers(n))
            gate = Gate(GateKind.RY, (q,), rng.uniform(-3, 3))
            expected = single_qubit_kron(gate_matrix(gate), q, n)
            np.testing.assert_allclose(circuit_unitary(Circuit(n, [gate])), expected, atol=1e-12)

    def test_columns_match_basis_state_evolution(self, rng):
        circuit = random_circuit(rng, 3, 25)
        unitary = circuit_unitary(circuit)
        for index in range(8):
            basis = np.zeros(8, dtype=complex)
            basis[index] = 1
            evolved = apply_circuit(Statevector(3, basis), circuit)
            np.testing.assert_allclose(unitary[:, index], evolved.amplitudes, atol=1e-12)

    def test_adjoint_inverts(self, rng):
        circuit = random_circuit(rng, 3, 30)
        product = circuit_unitary(circuit.compose(adjoint(circuit)))
        np.testing.assert_allclose(product, np.eye(8), atol=1e-10)

    def test_resource_limit(self):
        with pytest.raises(ResourceLimitError):
            circuit_unitary(Circuit(11, []))


class TestMeasurement:
    def test_inner_product_is_conjugate_linear_in_first(self):
        a = Statevector(1, [1j, 0])
        b = Statevector(1, [1, 0])
        assert inner_product(a, b) == pytest.approx(-1j)

    def test_probability_all_zeros(self):
        state = apply_circuit(zero_state(1), Circuit(1, [Gate(GateKind.H, (0,))]))
        assert probability_all_zeros(state) == pytest.approx(0.5)

    def test_sampling_is_reproducible(self):
        assert sample_zero_counts(0.37, 1000, 7) == sample_zero_counts(0.37, 1000, 7)

    def test_sampling_ignores_floating_point_noise(self):
        for seed in range(20):
            assert sample_zero_counts(0.37 + 3e-15, 1000, seed) == sample_zero_counts(0.37 - 3e-15, 1000, seed)

    @pytest.mark.parametrize("probability,expected", [(0.0, 0), (1.0, 500)])
    def test_sampling_degenerate_probabilities(self, probability, expected):
        assert sample_zero_counts(probability, 500, 3) == expected

    def test_sampling_requires_positive_shots(self):
        with pytest.raises(ArgumentError):
            sample_zero_counts(0.5, 0, 1)

    def test_sample_all_zeros_is_a_fraction(self):
        state = apply_circuit(zero_state(2), Circuit(2, [Gate(GateKind.H, (0,)), Gate(GateKind.H, (1,))]))
        estimate = sample_all_zeros(state, 4000, 11)
        assert estimate == sample_zero_counts(probability_all_zeros(state), 4000, 11) / 4000
        assert abs(estimate - 0.25) < 0.05


def test_circuit_dict_roundtrip_keeps_exact_angles():
    circuit = Circuit(2, [Gate(GateKind.RZ, (1,), 0.1 + 0.2), Gate(GateKind.CX, (0, 1)), Gate(GateKind.SX, (0,))])
    restored = circuit_from_dict(circuit_to_dict(circuit))
    assert restored == circuit
    assert restored.gates[0].angle == 0.1 + 0.2
