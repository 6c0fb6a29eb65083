# utils/quantum_kernel.py
"""
Kernel de fidelidade k(x, y) = |<φ(x)|φ(y)>|² e montagem das matrizes de treino (n x n) e teste (m x n).

Dois métodos:
  - ExactOverlap: sobreposição exata dos statevectors.
  - ComputeUncompute: fração de medições |0^n> do circuito U_φ(x) seguido de U_φ(y)†, com `shots`
    repetições. Cada entrada da matriz recebe uma semente derivada de (semente base, bloco, i, j),
    de modo que a execução paralela, a serial e a do backend simulado produzem os mesmos valores.
"""
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

import config
from utils.errors import ArgumentError
from utils.feature_maps import FeatureMapSpec, build_feature_map, spec_hash
from utils.statevector import (Circuit, adjoint, apply_circuit, inner_product, sample_all_zeros,
                               sample_zero_counts, zero_state)

KERNEL_TRAIN = "train"
KERNEL_TEST = "test"
_BLOCK_CODES = {KERNEL_TRAIN: 0, KERNEL_TEST: 1}


@dataclass(frozen=True)
class ExactOverlap:
    name = "exact"

    def to_dict(self) -> dict:
        return {"name": self.name}


@dataclass(frozen=True)
class ComputeUncompute:
    shots: int = config.SHOTS_DEFAULT
    seed: int = config.SEED_DEFAULT
    name = "sampled"

    def __post_init__(self):
        if int(self.shots) < 1:
            raise ArgumentError(f"shots deve ser >= 1, recebeu {self.shots}")
        if int(self.seed) < 0:
            raise ArgumentError(f"A semente deve ser não negativa, recebeu {self.seed}")
        object.__setattr__(self, "shots", int(self.shots))
        object.__setattr__(self, "seed", int(self.seed))

    def to_dict(self) -> dict:
        return {"name": self.name, "shots": self.shots, "seed": self.seed}


def method_from_dict(data):
    if data is None:
        return None
    if data["name"] == ExactOverlap.name:
        return ExactOverlap()
    if data["name"] == ComputeUncompute.name:
        return ComputeUncompute(shots=data["shots"], seed=data["seed"])
    raise ArgumentError(f"Método de fidelidade desconhecido: {data['name']}")


@dataclass(eq=False)
class KernelMatrix:
    values: np.ndarray
    kind: str
    method: object = None                 # ExactOverlap, ComputeUncompute ou None (kernel clássico)
    feature_map: FeatureMapSpec = None
    shots_used: int = None
    kernel_name: str = "quantum"
    spec_hash: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise ArgumentError(f"Matriz de kernel deve ser 2D, recebeu forma {self.values.shape}")
        if self.kind not in _BLOCK_CODES:
            raise ArgumentError(f"Tipo de matriz desconhecido: '{self.kind}'")
        if not self.spec_hash and self.feature_map is not None:
            self.spec_hash = spec_hash(self.feature_map)

    @property
    def shape(self) -> tuple:
        return self.values.shape

    def provenance(self) -> dict:
        return {
            "kind": self.kind,
            "shape": list(self.values.shape),
            "method": self.method.to_dict() if self.method is not None else None,
            "feature_map": self.feature_map.to_dict() if self.feature_map is not None else None,
            "shots_used": self.shots_used,
            "kernel_name": self.kernel_name,
            "spec_hash": self.spec_hash,
            "metadata": self.metadata,
        }


def entry_seed(base_seed: int, block: str, i: int, j: int) -> int:
    """Semente determinística da entrada (i, j) do bloco `train`/`test`."""
    sequence = np.random.SeedSequence(int(base_seed), spawn_key=(_BLOCK_CODES[block], int(i), int(j)))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def count_jobs(n_train: int, n_test: int) -> int:
    """Jobs no esquema um-job-por-entrada: triângulo superior estrito do treino + matriz de teste."""
    if n_train < 1 or n_test < 0:
        raise ArgumentError(f"Tamanhos inválidos: n_train={n_train}, n_test={n_test}")
    return n_train * (n_train - 1) // 2 + n_test * n_train


def encode(spec: FeatureMapSpec, x):
    """Estado |φ(x)> = U_φ(x)|0^n>."""
    return apply_circuit(zero_state(spec.num_qubits), build_feature_map(spec, x))


def compute_uncompute_circuit(spec: FeatureMapSpec, x, y) -> Circuit:
    """U_φ(x) seguido de U_φ(y)†; a probabilidade de |0^n> é |<φ(y)|φ(x)>|²."""
    return build_feature_map(spec, x).compose(adjoint(build_feature_map(spec, y)))


def kernel_entries(n_train: int, n_test: int) -> list:
    """(bloco, i, j) na ordem de submissão: triângulo superior do treino, depois o teste linha a linha."""
    entries = [(KERNEL_TRAIN, i, j) for i in range(n_train) for j in range(i + 1, n_train)]
    entries += [(KERNEL_TEST, i, j) for i in range(n_test) for j in range(n_train)]
    return entries


def fidelity_circuits(X_train, X_test, spec: FeatureMapSpec) -> list:
    """Circuitos compute-uncompute de cada entrada estimada: [(bloco, i, j, Circuit)]."""
    if len(X_train) == 0:
        raise ArgumentError("Conjunto de treino vazio")
    for x in list(X_train) + list(X_test):
        _check_vector(x, spec)
    encoded_train = [build_feature_map(spec, x) for x in X_train]
    encoded_test = [build_feature_map(spec, y) for y in X_test]
    inverse = {KERNEL_TRAIN: [adjoint(c) for c in encoded_train], KERNEL_TEST: [adjoint(c) for c in encoded_test]}
    circuits = []
    for block, i, j in kernel_entries(len(X_train), len(X_test)):
        # Entrada (i, j) = |<φ(x_i)|φ(x_j)>|²: U_φ(x_j) seguido de U_φ(x_i)†
        circuits.append((block, i, j, encoded_train[j].compose(inverse[block][i])))
    return circuits


def _check_vector(x, spec: FeatureMapSpec):
    if len(x) != spec.num_qubits:
        raise ArgumentError(f"Vetor de dimensão {len(x)} para feature map de {spec.num_qubits} qubits")


def fidelity(x, y, spec: FeatureMapSpec, method) -> float:
    _check_vector(x, spec)
    _check_vector(y, spec)
    if isinstance(method, ComputeUncompute):
        state = apply_circuit(zero_state(spec.num_qubits), compute_uncompute_circuit(spec, x, y))
        return sample_all_zeros(state, method.shots, method.seed)
    overlap = inner_product(encode(spec, x), encode(spec, y))
    return float(min(1.0, abs(overlap) ** 2))


def _encode_all(X, spec: FeatureMapSpec, max_workers=None) -> np.ndarray:
    if len(X) == 0:
        raise ArgumentError("Conjunto de vetores vazio")
    for x in X:
        _check_vector(x, spec)
    encode_one = lambda x: encode(spec, x).amplitudes
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return np.array(list(pool.map(encode_one, X)))
    return np.array([encode_one(x) for x in X])


def _overlap_probabilities(rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    return np.minimum(np.abs(rows.conj() @ cols.T) ** 2, 1.0)


def _sample_entries(probabilities, entries, block, method: ComputeUncompute, max_workers=None) -> list:
    def draw(entry):
        i, j = entry
        counts = sample_zero_counts(probabilities[i, j], method.shots, entry_seed(method.seed, block, i, j))
        return counts / method.shots
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(draw, entries))
    return [draw(e) for e in entries]


def evaluate_train_matrix(X, spec: FeatureMapSpec, method, max_workers=None, psd_clip=False) -> KernelMatrix:
    """Matriz de treino: estima apenas o triângulo superior estrito, diagonal 1, espelha o inferior."""
    states = _encode_all(X, spec, max_workers)
    n = len(states)
    probabilities = _overlap_probabilities(states, states)
    upper = [(i, j) for i in range(n) for j in range(i + 1, n)]
    values = np.eye(n)
    if isinstance(method, ComputeUncompute):
        estimates = _sample_entries(probabilities, upper, KERNEL_TRAIN, method, max_workers)
    else:
        estimates = [probabilities[i, j] for i, j in upper]
    for (i, j), value in zip(upper, estimates):
        values[i, j] = values[j, i] = value
    if psd_clip:
        values = clip_negative_eigenvalues(values)
    return KernelMatrix(values, KERNEL_TRAIN, method, spec,
                        shots_used=method.shots if isinstance(method, ComputeUncompute) else None)


def evaluate_test_matrix(Y, X, spec: FeatureMapSpec, method, max_workers=None) -> KernelMatrix:
    """Matriz de teste m x n: linha = amostra de teste, coluna = amostra de treino."""
    rows = _encode_all(Y, spec, max_workers)
    cols = _encode_all(X, spec, max_workers)
    probabilities = _overlap_probabilities(rows, cols)
    if isinstance(method, ComputeUncompute):
        entries = [(i, j) for i in range(len(rows)) for j in range(len(cols))]
        values = np.array(_sample_entries(probabilities, entries, KERNEL_TEST, method, max_workers))
        values = values.reshape(len(rows), len(cols))
    else:
        values = probabilities
    return KernelMatrix(values, KERNEL_TEST, method, spec,
                        shots_used=method.shots if isinstance(method, ComputeUncompute) else None)


def assemble_kernel_matrices(results: dict, n_train: int, n_test: int, spec: FeatureMapSpec, method) -> tuple:
    """
    Monta as matrizes a partir de {(bloco, i, j): fidelidade} com as mesmas regras de
    evaluate_*: diagonal de treino 1 e triângulo inferior espelhado.
    """
    train = np.eye(n_train)
    for i in range(n_train):
        for j in range(i + 1, n_train):
            train[i, j] = train[j, i] = results[(KERNEL_TRAIN, i, j)]
    test = np.zeros((n_test, n_train))
    for i in range(n_test):
        for j in range(n_train):
            test[i, j] = results[(KERNEL_TEST, i, j)]
    shots = method.shots if isinstance(method, ComputeUncompute) else None
    return (KernelMatrix(train, KERNEL_TRAIN, method, spec, shots_used=shots),
            KernelMatrix(test, KERNEL_TEST, method, spec, shots_used=shots))


def clip_negative_eigenvalues(values: np.ndarray) -> np.ndarray:
    """Reparo PSD opcional para matrizes amostradas: zera autovalores negativos."""
    eigenvalues, eigenvectors = np.linalg.eigh((values + values.T) / 2)
    repaired = (eigenvectors * np.clip(eigenvalues, 0.0, None)) @ eigenvectors.T
    return (repaired + repaired.T) / 2


def sidecar_path(path: str) -> str:
    return os.path.splitext(path)[0] + config.KERNEL_SIDECAR_SUFFIX


def save_kernel_matrix(matrix: KernelMatrix, path: str):
    """CSV linha a linha com cabeçalho de proveniência + sidecar JSON completo."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    method_name = matrix.method.name if matrix.method is not None else matrix.kernel_name
    header = f"# kind={matrix.kind};method={method_name};shots={matrix.shots_used};spec_hash={matrix.spec_hash}\n"
    with open(path, "w", newline="") as f:
        f.write(header)
        pd.DataFrame(matrix.values).to_csv(f, header=False, index=False, float_format="%.17g")
    with open(sidecar_path(path), "w") as f:
        json.dump(matrix.provenance(), f, indent=2, sort_keys=True)


def load_kernel_matrix(path: str) -> KernelMatrix:
    try:
        with open(sidecar_path(path)) as f:
            provenance = json.load(f)
    except FileNotFoundError:
        raise ArgumentError(f"Sidecar de proveniência não encontrado para '{path}'")
    rows, cols = provenance["shape"]
    if rows == 0:
        values = np.zeros((0, cols))
    else:
        values = pd.read_csv(path, header=None, skiprows=1, float_precision="round_trip").to_numpy(dtype=float)
    feature_map = provenance.get("feature_map")
    return KernelMatrix(
        values=values,
        kind=provenance["kind"],
        method=method_from_dict(provenance.get("method")),
        feature_map=FeatureMapSpec.from_dict(feature_map) if feature_map else None,
        shots_used=provenance.get("shots_used"),
        kernel_name=provenance.get("kernel_name", "quantum"),
        spec_hash=provenance.get("spec_hash", ""),
        metadata=provenance.get("metadata", {}),
    )
