# utils/statevector.py
"""
Simulação densa de statevector para o conjunto de portas usado pelos feature maps.

Ordenação little-endian: o qubit 0 é o bit menos significativo do índice da amplitude.
Convenção de rotação: RZ(θ) = exp(-iθZ/2), idem para RX e RY.
"""
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

import config
from utils.errors import ArgumentError, ConfigurationError, ResourceLimitError


class GateKind(str, Enum):
    H = "h"
    P = "p"      # PhaseRotation: diag(1, e^{iθ})
    RZ = "rz"
    RX = "rx"
    RY = "ry"
    CX = "cx"
    CZ = "cz"
    X = "x"
    SX = "sx"


PARAMETRIC_KINDS = frozenset({GateKind.P, GateKind.RZ, GateKind.RX, GateKind.RY})
TWO_QUBIT_KINDS = frozenset({GateKind.CX, GateKind.CZ})

_SQRT2_INV = 1 / math.sqrt(2)
_FIXED_MATRICES = {
    GateKind.H: np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV,
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.SX: 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex),
    # Base local |b1 b0>, b0 = bit do primeiro alvo (controle)
    GateKind.CX: np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex),
    GateKind.CZ: np.diag([1, 1, 1, -1]).astype(complex),
}


def _parametric_matrix(kind: GateKind, theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    if kind == GateKind.P:
        return np.array([[1, 0], [0, np.exp(1j * theta)]], dtype=complex)
    if kind == GateKind.RZ:
        return np.array([[np.exp(-1j * theta / 2), 0], [0, np.exp(1j * theta / 2)]], dtype=complex)
    if kind == GateKind.RX:
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    return np.array([[c, -s], [s, c]], dtype=complex)  # RY


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    targets: tuple
    angle: float = None

    def __post_init__(self):
        kind = GateKind(self.kind)
        targets = tuple(int(t) for t in self.targets)
        arity = 2 if kind in TWO_QUBIT_KINDS else 1
        if len(targets) != arity:
            raise ConfigurationError(f"Porta {kind.value} espera {arity} alvo(s), recebeu {targets}")
        if len(set(targets)) != len(targets):
            raise ConfigurationError(f"Alvos repetidos na porta {kind.value}: {targets}")
        if any(t < 0 for t in targets):
            raise ConfigurationError(f"Índice de qubit negativo na porta {kind.value}: {targets}")
        if kind in PARAMETRIC_KINDS:
            if self.angle is None:
                raise ConfigurationError(f"Porta {kind.value} exige ângulo")
            angle = float(self.angle)
        else:
            angle = None
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "angle", angle)

    def adjoint(self) -> list:
        """Portas que implementam a inversa exata desta porta."""
        if self.kind in PARAMETRIC_KINDS:
            return [Gate(self.kind, self.targets, -self.angle)]
        if self.kind == GateKind.SX:
            # SX^-1 = SX^3 = X·SX
            return [Gate(GateKind.SX, self.targets), Gate(GateKind.X, self.targets)]
        return [self]


def gate_matrix(gate: Gate) -> np.ndarray:
    """Matriz local da porta (2x2 ou 4x4, base little-endian dos alvos)."""
    if gate.kind in PARAMETRIC_KINDS:
        return _parametric_matrix(gate.kind, gate.angle)
    return _FIXED_MATRICES[gate.kind]


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if int(self.num_qubits) < 1:
            raise ConfigurationError(f"Circuito precisa de ao menos 1 qubit, recebeu {self.num_qubits}")
        object.__setattr__(self, "num_qubits", int(self.num_qubits))
        object.__setattr__(self, "gates", tuple(self.gates))

    def __len__(self):
        return len(self.gates)

    def compose(self, other: "Circuit") -> "Circuit":
        """Aplica `self` e depois `other`."""
        if other.num_qubits != self.num_qubits:
            raise ConfigurationError(f"Circuitos com {self.num_qubits} e {other.num_qubits} qubits não podem ser compostos")
        return Circuit(self.num_qubits, self.gates + other.gates)

    def gate_kinds(self) -> set:
        return {g.kind for g in self.gates}

    def two_qubit_count(self) -> int:
        return sum(1 for g in self.gates if g.kind in TWO_QUBIT_KINDS)


def adjoint(circuit: Circuit) -> Circuit:
    """Circuito inverso: ordem reversa, ângulos negados, portas auto-inversas mantidas."""
    gates = []
    for gate in reversed(circuit.gates):
        gates.extend(gate.adjoint())
    return Circuit(circuit.num_qubits, gates)


@dataclass(frozen=True, eq=False)
class Statevector:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amplitudes.shape[0] != 2 ** int(self.num_qubits):
            raise ConfigurationError(
                f"Statevector de {self.num_qubits} qubits exige {2 ** int(self.num_qubits)} amplitudes, recebeu {amplitudes.shape[0]}")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "num_qubits", int(self.num_qubits))
        object.__setattr__(self, "amplitudes", amplitudes)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def zero_state(num_qubits: int) -> Statevector:
    amplitudes = np.zeros(2 ** num_qubits, dtype=np.complex128)
    amplitudes[0] = 1.0
    return Statevector(num_qubits, amplitudes)


def _apply_local(tensor: np.ndarray, matrix: np.ndarray, targets: tuple, num_qubits: int) -> np.ndarray:
    # tensor tem forma [2]*n + [lote]; o eixo do qubit q é n-1-q
    k = len(targets)
    axes = [num_qubits - 1 - t for t in reversed(targets)]
    psi = np.moveaxis(tensor, axes, list(range(k)))
    local = matrix.reshape([2] * (2 * k))
    psi = np.tensordot(local, psi, axes=(list(range(k, 2 * k)), list(range(k))))
    return np.moveaxis(psi, list(range(k)), axes)


def _run_gates(columns: np.ndarray, circuit: Circuit) -> np.ndarray:
    n = circuit.num_qubits
    batch = columns.shape[1]
    tensor = columns.reshape([2] * n + [batch])
    for gate in circuit.gates:
        if max(gate.targets) >= n:
            raise ConfigurationError(f"Porta {gate.kind.value} em {gate.targets} fora do intervalo para {n} qubits")
        tensor = _apply_local(tensor, gate_matrix(gate), gate.targets, n)
    return tensor.reshape(2 ** n, batch)


def apply_circuit(state: Statevector, circuit: Circuit) -> Statevector:
    """Aplica o circuito e devolve um novo estado; o estado de entrada não é alterado."""
    if circuit.num_qubits != state.num_qubits:
        raise ConfigurationError(
            f"Circuito de {circuit.num_qubits} qubits aplicado a estado de {state.num_qubits} qubits")
    columns = np.array(state.amplitudes, dtype=np.complex128).reshape(-1, 1)
    return Statevector(state.num_qubits, _run_gates(columns, circuit)[:, 0])


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Matriz densa 2^n x 2^n do circuito (oráculo para testes do transpilador)."""
    if circuit.num_qubits > config.MAX_UNITARY_QUBITS:
        raise ResourceLimitError(
            f"circuit_unitary limitado a {config.MAX_UNITARY_QUBITS} qubits, recebeu {circuit.num_qubits}")
    identity = np.eye(2 ** circuit.num_qubits, dtype=np.complex128)
    return _run_gates(identity, circuit)


def inner_product(a: Statevector, b: Statevector) -> complex:
    """<a|b>, conjugado-linear no primeiro argumento."""
    if a.num_qubits != b.num_qubits:
        raise ConfigurationError(f"Produto interno entre estados de {a.num_qubits} e {b.num_qubits} qubits")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def probability_all_zeros(state: Statevector) -> float:
    return float(min(1.0, abs(state.amplitudes[0]) ** 2))


def make_rng(seed: int) -> np.random.Generator:
    """Gerador Philox (baseado em contador), reprodutível entre plataformas para a mesma semente."""
    return np.random.Generator(np.random.Philox(int(seed)))


def sample_zero_counts(probability: float, shots: int, seed: int) -> int:
    """
    Número de resultados |0^n> em `shots` repetições para a probabilidade dada.
    p é arredondada a `PROBABILITY_DECIMALS` casas: circuitos equivalentes (ex.: original e transpilado)
    diferem só no ruído de ponto flutuante e sorteiam as mesmas contagens com a mesma semente.
    """
    if int(shots) < 1:
        raise ArgumentError(f"shots deve ser >= 1, recebeu {shots}")
    p = round(min(max(float(probability), 0.0), 1.0), config.PROBABILITY_DECIMALS)
    return int(make_rng(seed).binomial(int(shots), p))


def sample_all_zeros(state: Statevector, shots: int, seed: int) -> float:
    """Fração de medições |0^n> observada com `shots` repetições."""
    return sample_zero_counts(probability_all_zeros(state), shots, seed) / int(shots)


def circuit_to_dict(circuit: Circuit) -> dict:
    """Formato JSON de circuito; ângulos como strings decimais (repr) para ida e volta exata."""
    gates = []
    for gate in circuit.gates:
        entry = {"kind": gate.kind.value, "targets": list(gate.targets)}
        if gate.angle is not None:
            entry["angle"] = repr(gate.angle)
        gates.append(entry)
    return {"num_qubits": circuit.num_qubits, "gates": gates}


def circuit_from_dict(data: dict) -> Circuit:
    gates = [
        Gate(GateKind(g["kind"]), tuple(g["targets"]), float(g["angle"]) if "angle" in g else None)
        for g in data["gates"]
    ]
    return Circuit(int(data["num_qubits"]), gates)
