# tests/test_feature_maps.py
import math

import numpy as np
import pytest
from scipy.linalg import expm

from utils.errors import ArgumentError, UnsupportedCombinationError
from utils.feature_maps import (DATA_MAP_SINE_ZZPHI, FeatureMapSpec, build_feature_map, data_map_value, gate_count,
                                index_sets, pauli_evolution_block, preset_spec, register_data_map, spec_hash)
from utils.statevector import Circuit, apply_circuit, circuit_unitary, zero_state

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
}
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def pauli_operator(labels_by_qubit: dict, num_qubits: int) -> np.ndarray:
    full = np.eye(1, dtype=complex)
    for q in reversed(range(num_qubits)):
        full = np.kron(full, PAULI[labels_by_qubit.get(q, "I")])
    return full


def oracle_state(spec: FeatureMapSpec, x) -> np.ndarray:
    """|φ(x)> via exponenciais densas de strings de Pauli (scipy.linalg.expm)."""
    n = spec.num_qubits
    hadamards = np.eye(1, dtype=complex)
    for _ in range(n):
        hadamards = np.kron(hadamards, HADAMARD)
    state = np.zeros(2 ** n, dtype=complex)
    state[0] = 1
    for _ in range(spec.reps):
        state = hadamards @ state
        for pauli in spec.paulis:
            for indices in index_sets(spec, len(pauli)):
                angle = spec.angle_scale * data_map_value(spec.data_map, indices, x)
                operator = pauli_operator(dict(zip(indices, pauli)), n)
                state = expm(1j * angle * operator) @ state
    return state


class TestPresets:
    @pytest.mark.parametrize("name,paulis", [("z", ("Z",)), ("zz", ("Z", "ZZ")), ("pauli", ("X", "Y", "ZZ")),
                                             ("zzphi", ("Z", "ZZ"))])
    def test_preset_paulis(self, name, paulis):
        spec = preset_spec(name, 3)
        assert spec.paulis == paulis
        assert spec.reps == 2

    def test_unknown_preset(self):
        with pytest.raises(ArgumentError):
            preset_spec("xyz", 2)

    @pytest.mark.parametrize("name", ["z", "zz", "pauli", "zzphi"])
    @pytest.mark.parametrize("entanglement", ["full", "linear"])
    def test_single_qubit_drops_pair_terms(self, name, entanglement):
        spec = preset_spec(name, 1, entanglement=entanglement)
        assert index_sets(spec, 2) == []
        circuit = build_feature_map(spec, [0.7])
        assert len(circuit.gates) == gate_count(spec)
        assert all(len(gate.targets) == 1 for gate in circuit.gates)
        np.testing.assert_allclose(apply_circuit(zero_state(1), circuit).amplitudes, oracle_state(spec, [0.7]),
                                   atol=1e-12)

    def test_single_qubit_zz_equals_z(self):
        x = [1.3]
        zz = apply_circuit(zero_state(1), build_feature_map(preset_spec("zz", 1), x)).amplitudes
        z = apply_circuit(zero_state(1), build_feature_map(preset_spec("z", 1), x)).amplitudes
        np.testing.assert_allclose(zz, z, atol=1e-12)


class TestBuildFeatureMap:
    @pytest.mark.parametrize("name,num_qubits,entanglement", [
        ("z", 1, "full"), ("zz", 3, "full"), ("zz", 4, "linear"), ("pauli", 2, "full"), ("zzphi", 3, "linear"),
    ])
    def test_matches_dense_exponential_oracle(self, rng, name, num_qubits, entanglement):
        spec = preset_spec(name, num_qubits, entanglement=entanglement)
        for _ in range(5):
            x = rng.uniform(0, 2 * math.pi, num_qubits)
            state = apply_circuit(zero_state(num_qubits), build_feature_map(spec, x))
            np.testing.assert_allclose(state.amplitudes, oracle_state(spec, x), atol=1e-10)

    def test_angle_scale_multiplies_every_angle(self, rng):
        x = rng.uniform(0, math.pi, 3)
        spec = FeatureMapSpec(3, reps=1, angle_scale=2.0)
        state = apply_circuit(zero_state(3), build_feature_map(spec, x))
        np.testing.assert_allclose(state.amplitudes, oracle_state(spec, x), atol=1e-10)

    def test_explicit_entanglement_pairs(self, rng):
        spec = FeatureMapSpec(3, reps=1, entanglement=[(0, 2)])
        assert index_sets(spec, 2) == [(0, 2)]
        x = rng.uniform(0, math.pi, 3)
        state = apply_circuit(zero_state(3), build_feature_map(spec, x))
        np.testing.assert_allclose(state.amplitudes, oracle_state(spec, x), atol=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(ArgumentError):
            build_feature_map(preset_spec("zz", 3), [0.1, 0.2])

    @pytest.mark.parametrize("name,num_qubits,entanglement", [
        ("z", 2, "full"), ("zz", 4, "full"), ("zz", 5, "linear"), ("pauli", 3, "full"), ("zzphi", 4, "full"),
    ])
    def test_gate_count_closed_form(self, name, num_qubits, entanglement):
        spec = preset_spec(name, num_qubits, reps=3, entanglement=entanglement)
        assert gate_count(spec) == len(build_feature_map(spec, np.full(num_qubits, 0.5)))

    def test_identity_labels_are_skipped(self, rng):
        spec = FeatureMapSpec(2, reps=1, paulis=("ZI",))
        x = rng.uniform(0, math.pi, 2)
        circuit = build_feature_map(spec, x)
        assert circuit.two_qubit_count() == 0
        assert len(circuit) == gate_count(spec)
        np.testing.assert_allclose(apply_circuit(zero_state(2), circuit).amplitudes, oracle_state(spec, x), atol=1e-10)


class TestPauliEvolutionBlock:
    @pytest.mark.parametrize("pauli", ["Z", "X", "Y", "ZZ", "XY", "YZX"])
    def test_block_is_pauli_exponential(self, pauli):
        angle = 0.417
        n = len(pauli)
        circuit = Circuit(n, pauli_evolution_block(pauli, angle, range(n)))
        expected = expm(1j * angle * pauli_operator(dict(enumerate(pauli)), n))
        np.testing.assert_allclose(circuit_unitary(circuit), expected, atol=1e-10)

    def test_weight_must_match_targets(self):
        with pytest.raises(ArgumentError):
            pauli_evolution_block("ZZ", 0.1, [0])


class TestDataMaps:
    def test_product_default(self):
        x = [0.5, 1.5, 2.5]
        assert data_map_value("product", (1,), x) == 1.5
        assert data_map_value("product", (0, 2), x) == pytest.approx((math.pi - 0.5) * (math.pi - 2.5))

    def test_sine_zzphi(self):
        x = [0.3, 1.2]
        assert data_map_value(DATA_MAP_SINE_ZZPHI, (0, 1), x) == pytest.approx(math.sin(0.3) * math.sin(1.2))

    def test_sine_zzphi_rejects_triples(self):
        spec = FeatureMapSpec(3, paulis=("ZZZ",), data_map=DATA_MAP_SINE_ZZPHI)
        with pytest.raises(UnsupportedCombinationError):
            build_feature_map(spec, [0.1, 0.2, 0.3])

    def test_unknown_data_map(self):
        with pytest.raises(ArgumentError):
            data_map_value("nope", (0,), [0.1])

    def test_register_custom_map(self):
        register_data_map("double", lambda indices, x: 2 * sum(x[i] for i in indices))
        assert data_map_value("double", (0, 1), [0.25, 0.5]) == 1.5

    def test_builtin_cannot_be_replaced(self):
        with pytest.raises(ArgumentError):
            register_data_map("product", lambda indices, x: 0.0)


class TestSpecHash:
    def test_hash_ignores_name(self):
        assert spec_hash(preset_spec("zz", 3)) == spec_hash(FeatureMapSpec(3))

    def test_hash_changes_with_reps(self):
        assert spec_hash(preset_spec("zz", 3, reps=1)) != spec_hash(preset_spec("zz", 3, reps=2))

    def test_dict_roundtrip(self):
        spec = FeatureMapSpec(3, reps=1, entanglement=[(0, 1), (1, 2)], angle_scale=0.5, name="meu")
        restored = FeatureMapSpec.from_dict(spec.to_dict())
        assert restored == spec
        assert restored.name == "meu"

    @pytest.mark.parametrize("kwargs", [{"reps": 0}, {"paulis": ("ZQ",)}, {"paulis": ("II",)},
                                        {"entanglement": "circular"}, {"entanglement": [(0, 5)]}])
    def test_invalid_specs(self, kwargs):
        with pytest.raises(ArgumentError):
            FeatureMapSpec(3, **kwargs)
