# utils/transpiler.py
"""
Reescrita de circuitos para o conjunto de portas (ISA) do backend, por substituição a partir de
uma tabela fixa de regras. Não há etapa de roteamento/layout: conectividade total é assumida.

Cada regra vale a menos de uma fase global. Como as substituições são feitas porta a porta,
a fase acumulada continua global e não altera probabilidades de medição.
"""
import math

from utils.errors import UnsupportedISAError
from utils.statevector import Circuit, Gate, GateKind

_HALF_PI = math.pi / 2


def _h_via_rz_sx(g):
    q = g.targets
    return [Gate(GateKind.RZ, q, _HALF_PI), Gate(GateKind.SX, q), Gate(GateKind.RZ, q, _HALF_PI)]


def _h_via_rz_ry(g):
    # H = RY(π/2)·Z
    q = g.targets
    return [Gate(GateKind.RZ, q, math.pi), Gate(GateKind.RY, q, _HALF_PI)]


def _rx_via_h_rz(g):
    q = g.targets
    return [Gate(GateKind.H, q), Gate(GateKind.RZ, q, g.angle), Gate(GateKind.H, q)]


def _ry_via_rz_rx(g):
    # RY(θ) = S·RX(θ)·S†
    q = g.targets
    return [Gate(GateKind.RZ, q, -_HALF_PI), Gate(GateKind.RX, q, g.angle), Gate(GateKind.RZ, q, _HALF_PI)]


def _p_via_rz(g):
    return [Gate(GateKind.RZ, g.targets, g.angle)]


def _rz_via_p(g):
    return [Gate(GateKind.P, g.targets, g.angle)]


def _rz_via_h_rx(g):
    q = g.targets
    return [Gate(GateKind.H, q), Gate(GateKind.RX, q, g.angle), Gate(GateKind.H, q)]


def _cz_via_cx(g):
    target = (g.targets[1],)
    return [Gate(GateKind.H, target), Gate(GateKind.CX, g.targets), Gate(GateKind.H, target)]


def _cx_via_cz(g):
    target = (g.targets[1],)
    return [Gate(GateKind.H, target), Gate(GateKind.CZ, g.targets), Gate(GateKind.H, target)]


def _x_via_sx(g):
    return [Gate(GateKind.SX, g.targets), Gate(GateKind.SX, g.targets)]


def _x_via_rx(g):
    return [Gate(GateKind.RX, g.targets, math.pi)]


def _sx_via_rx(g):
    return [Gate(GateKind.RX, g.targets, _HALF_PI)]


# Alternativas por tipo de porta, em ordem de preferência, com os tipos que cada uma emite
RULES = {
    GateKind.H: [({GateKind.RZ, GateKind.SX}, _h_via_rz_sx), ({GateKind.RZ, GateKind.RY}, _h_via_rz_ry)],
    GateKind.RX: [({GateKind.H, GateKind.RZ}, _rx_via_h_rz)],
    GateKind.RY: [({GateKind.RZ, GateKind.RX}, _ry_via_rz_rx)],
    GateKind.P: [({GateKind.RZ}, _p_via_rz)],
    GateKind.RZ: [({GateKind.P}, _rz_via_p), ({GateKind.H, GateKind.RX}, _rz_via_h_rx)],
    GateKind.CZ: [({GateKind.H, GateKind.CX}, _cz_via_cx)],
    GateKind.CX: [({GateKind.H, GateKind.CZ}, _cx_via_cz)],
    GateKind.X: [({GateKind.SX}, _x_via_sx), ({GateKind.RX}, _x_via_rx)],
    GateKind.SX: [({GateKind.RX}, _sx_via_rx)],
}


def normalize_isa(isa) -> frozenset:
    try:
        kinds = frozenset(GateKind(k) for k in isa)
    except ValueError as e:
        raise UnsupportedISAError(f"Porta desconhecida no ISA: {e}")
    if not kinds:
        raise UnsupportedISAError("ISA vazio")
    return kinds


def resolution_table(isa) -> dict:
    """
    Para cada tipo de porta expressável no ISA, a regra escolhida (None = nativa).
    Ponto fixo: um tipo passa a ser resolvível quando alguma alternativa usa apenas tipos já resolvidos,
    o que garante expansão finita.
    """
    table = {kind: None for kind in normalize_isa(isa)}
    changed = True
    while changed:
        changed = False
        for kind, alternatives in RULES.items():
            if kind in table:
                continue
            for emitted, rule in alternatives:
                if emitted <= table.keys():
                    table[kind] = rule
                    changed = True
                    break
    return table


def isa_violations(circuit: Circuit, isa) -> list:
    """Tipos de porta do circuito fora do ISA, em ordem de primeira ocorrência."""
    allowed = normalize_isa(isa)
    seen = []
    for gate in circuit.gates:
        if gate.kind not in allowed and gate.kind not in seen:
            seen.append(gate.kind)
    return seen


def _expand(gate: Gate, table: dict) -> list:
    rule = table[gate.kind]
    if rule is None:
        return [gate]
    gates = []
    for sub in rule(gate):
        gates.extend(_expand(sub, table))
    return gates


def transpile(circuit: Circuit, isa) -> Circuit:
    """Circuito equivalente (a menos de fase global) usando apenas portas do ISA."""
    table = resolution_table(isa)
    missing = sorted({g.kind.value for g in circuit.gates if g.kind not in table})
    if missing:
        raise UnsupportedISAError(
            f"ISA {sorted(k.value for k in normalize_isa(isa))} não expressa as portas {missing}")
    if not isa_violations(circuit, isa):
        return circuit
    gates = []
    for gate in circuit.gates:
        gates.extend(_expand(gate, table))
    return Circuit(circuit.num_qubits, gates)
