# utils/feature_maps.py
"""
Construção dos circuitos de codificação U_φ(x) da família Pauli (Z, ZZ, Pauli, ZZphi).

Cada repetição aplica Hadamard em todos os qubits seguido de exp(i·s·φ_S(x)·Π P_i) para cada
conjunto de índices S, onde s é o `angle_scale` do `FeatureMapSpec` (1.0 segue a fórmula literal).
Ordem dentro da repetição: Paulis na ordem declarada; para cada uma, os conjuntos S em ordem
crescente/lexicográfica (singletons antes de pares com a lista padrão).
"""
import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field

import config
from utils.errors import ArgumentError, UnsupportedCombinationError
from utils.statevector import Circuit, Gate, GateKind

DATA_MAP_PRODUCT = "product"
DATA_MAP_SINE_ZZPHI = "sine_zzphi"
PAULI_LABELS = "IXYZ"


def _product_default(indices, x):
    if len(indices) == 1:
        return float(x[indices[0]])
    return math.prod(math.pi - float(x[j]) for j in indices)


def _sine_zzphi(indices, x):
    # Escrito como sin(π - x_i)·sin(π - x_j), igual a sin(x_i)·sin(x_j)
    if len(indices) == 1:
        return float(x[indices[0]])
    if len(indices) == 2:
        i, j = indices
        return math.sin(math.pi - float(x[i])) * math.sin(math.pi - float(x[j]))
    raise UnsupportedCombinationError(f"Mapa {DATA_MAP_SINE_ZZPHI} definido apenas para |S| em {{1, 2}}, recebeu |S| = {len(indices)}")


_DATA_MAPS = {
    DATA_MAP_PRODUCT: _product_default,
    DATA_MAP_SINE_ZZPHI: _sine_zzphi,
}


def register_data_map(name: str, fn):
    """Registra uma função φ_S(x) personalizada; `fn(indices, x) -> float` em radianos."""
    if name in (DATA_MAP_PRODUCT, DATA_MAP_SINE_ZZPHI):
        raise ArgumentError(f"'{name}' é um mapa embutido e não pode ser substituído")
    _DATA_MAPS[name] = fn


def registered_data_maps() -> list:
    return sorted(_DATA_MAPS)


def data_map_value(kind: str, indices, x) -> float:
    """φ_S(x) para o mapa `kind`."""
    if kind not in _DATA_MAPS:
        raise ArgumentError(f"Mapa de dados desconhecido: '{kind}'. Registrados: {registered_data_maps()}")
    indices = tuple(indices)
    if not indices:
        raise ArgumentError("Conjunto de índices vazio")
    if any(i < 0 or i >= len(x) for i in indices):
        raise ArgumentError(f"Índices {indices} inválidos para vetor de dimensão {len(x)}")
    return float(_DATA_MAPS[kind](indices, x))


@dataclass(frozen=True)
class FeatureMapSpec:
    num_qubits: int
    reps: int = config.REPS_DEFAULT
    paulis: tuple = ("Z", "ZZ")
    entanglement: object = config.ENTANGLEMENT_DEFAULT   # "full", "linear" ou pares explícitos
    data_map: str = DATA_MAP_PRODUCT
    angle_scale: float = config.ANGLE_SCALE_DEFAULT
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        if int(self.num_qubits) < 1:
            raise ArgumentError(f"num_qubits deve ser >= 1, recebeu {self.num_qubits}")
        if int(self.reps) < 1:
            raise ArgumentError(f"reps deve ser >= 1, recebeu {self.reps}")
        paulis = tuple(str(p).upper() for p in self.paulis)
        if not paulis:
            raise ArgumentError("Lista de Paulis vazia")
        for pauli in paulis:
            if not pauli or any(c not in PAULI_LABELS for c in pauli) or set(pauli) == {"I"}:
                raise ArgumentError(f"String de Pauli inválida: '{pauli}'")
        entanglement = self.entanglement
        if isinstance(entanglement, str):
            if entanglement not in config.ENTANGLEMENT_OPTIONS:
                raise ArgumentError(f"Emaranhamento desconhecido: '{entanglement}'")
        else:
            entanglement = tuple(tuple(int(i) for i in group) for group in entanglement)
            for group in entanglement:
                if len(set(group)) != len(group) or any(i < 0 or i >= self.num_qubits for i in group):
                    raise ArgumentError(f"Conjunto de emaranhamento inválido: {group}")
        object.__setattr__(self, "num_qubits", int(self.num_qubits))
        object.__setattr__(self, "reps", int(self.reps))
        object.__setattr__(self, "paulis", paulis)
        object.__setattr__(self, "entanglement", entanglement)
        object.__setattr__(self, "angle_scale", float(self.angle_scale))

    def to_dict(self) -> dict:
        entanglement = self.entanglement if isinstance(self.entanglement, str) else [list(g) for g in self.entanglement]
        return {
            "name": self.name,
            "num_qubits": self.num_qubits,
            "reps": self.reps,
            "paulis": list(self.paulis),
            "entanglement": entanglement,
            "data_map": self.data_map,
            "angle_scale": self.angle_scale,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FeatureMapSpec":
        return cls(
            num_qubits=data["num_qubits"],
            reps=data.get("reps", config.REPS_DEFAULT),
            paulis=tuple(data.get("paulis", ("Z", "ZZ"))),
            entanglement=data.get("entanglement", config.ENTANGLEMENT_DEFAULT),
            data_map=data.get("data_map", DATA_MAP_PRODUCT),
            angle_scale=data.get("angle_scale", config.ANGLE_SCALE_DEFAULT),
            name=data.get("name", "custom"),
        )


def preset_spec(name: str, num_qubits: int, reps: int = config.REPS_DEFAULT,
                entanglement=config.ENTANGLEMENT_DEFAULT, angle_scale: float = config.ANGLE_SCALE_DEFAULT) -> FeatureMapSpec:
    """Specs nomeadas usadas na CLI e nos experimentos: z, zz, pauli, zzphi."""
    if name not in config.FEATURE_MAP_PAULIS:
        raise ArgumentError(f"Feature map desconhecido: '{name}'. Opções: {config.FEATURE_MAP_OPTIONS}")
    data_map = DATA_MAP_SINE_ZZPHI if name == "zzphi" else DATA_MAP_PRODUCT
    return FeatureMapSpec(num_qubits=num_qubits, reps=reps, paulis=tuple(config.FEATURE_MAP_PAULIS[name]),
                          entanglement=entanglement, data_map=data_map, angle_scale=angle_scale, name=name)


def spec_hash(spec: FeatureMapSpec) -> str:
    payload = spec.to_dict()
    payload.pop("name")
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode("utf-8")).hexdigest()[:16]


def index_sets(spec: FeatureMapSpec, size: int) -> list:
    """Conjuntos S de tamanho `size` gerados pelo emaranhamento; vazio quando size > num_qubits."""
    n = spec.num_qubits
    if size == 1:
        return [(i,) for i in range(n)]
    if spec.entanglement == "full":
        return list(itertools.combinations(range(n), size))
    if spec.entanglement == "linear":
        return [tuple(range(i, i + size)) for i in range(n - size + 1)]
    return [group for group in spec.entanglement if len(group) == size]


def pauli_evolution_block(pauli: str, angle: float, targets) -> list:
    """
    Portas que implementam exp(i·angle·Π P_i) sobre `targets`.
    Fatores X e Y são levados à base Z (H e RX(π/2)); depois escada de CX,
    RZ(-2·angle) no último alvo e a escada reversa.
    """
    pauli = str(pauli).upper()
    targets = tuple(targets)
    if not pauli:
        raise ArgumentError("String de Pauli vazia")
    if len(targets) != len(pauli):
        raise ArgumentError(f"Pauli '{pauli}' tem peso {len(pauli)} mas recebeu {len(targets)} alvo(s)")
    basis, unbasis = [], []
    for label, q in zip(pauli, targets):
        if label == "X":
            basis.append(Gate(GateKind.H, (q,)))
            unbasis.append(Gate(GateKind.H, (q,)))
        elif label == "Y":
            basis.append(Gate(GateKind.RX, (q,), math.pi / 2))
            unbasis.append(Gate(GateKind.RX, (q,), -math.pi / 2))
        elif label != "Z":
            raise ArgumentError(f"Rótulo '{label}' inválido no bloco de evolução (use apenas X, Y, Z)")
    ladder = [Gate(GateKind.CX, (targets[k], targets[k + 1])) for k in range(len(targets) - 1)]
    rotation = Gate(GateKind.RZ, (targets[-1],), -2.0 * angle)
    return basis + ladder + [rotation] + list(reversed(ladder)) + unbasis


def build_feature_map(spec: FeatureMapSpec, x) -> Circuit:
    """Circuito U_φ(x) com `spec.reps` repetições."""
    if len(x) != spec.num_qubits:
        raise ArgumentError(f"Vetor de dimensão {len(x)} para feature map de {spec.num_qubits} qubits")
    gates = []
    for _ in range(spec.reps):
        gates.extend(Gate(GateKind.H, (q,)) for q in range(spec.num_qubits))
        for pauli in spec.paulis:
            for indices in index_sets(spec, len(pauli)):
                active = [(label, q) for label, q in zip(pauli, indices) if label != "I"]
                angle = spec.angle_scale * data_map_value(spec.data_map, indices, x)
                gates.extend(pauli_evolution_block("".join(a[0] for a in active), angle, [a[1] for a in active]))
    return Circuit(spec.num_qubits, gates)


def gate_count(spec: FeatureMapSpec) -> int:
    """Contagem fechada de portas de build_feature_map(spec, x)."""
    per_rep = spec.num_qubits
    for pauli in spec.paulis:
        weight = sum(1 for c in pauli if c != "I")
        non_z = sum(1 for c in pauli if c in "XY")
        per_rep += len(index_sets(spec, len(pauli))) * (2 * (weight - 1) + 1 + 2 * non_z)
    return spec.reps * per_rep
