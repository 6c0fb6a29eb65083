# utils/experiment.py
"""
Grade de experimentos (tamanhos x qubits x kernels) em dados sintéticos, no formato das tabelas de
acurácia e F1: linhas (dados treino/teste, qubits), uma coluna por kernel.
Uma seção opcional `hardware` executa o kernel quântico pelo backend simulado e relata jobs e tempo quântico.
"""
import json
import os
from dataclasses import dataclass, field

import pandas as pd

import config
from utils import backend as qbackend
from utils.errors import ArgumentError
from utils.event_logger import record_log, warn_event
from utils.feature_maps import preset_spec
from utils.html_generator import build_experiment_report
from utils.metrics import accuracy, confusion, f1
from utils.preprocess import generate_synthetic, reduce_dataset
from utils.quantum_kernel import ComputeUncompute, ExactOverlap, evaluate_test_matrix, evaluate_train_matrix
from utils.svm import ClassicalKernel, classical_kernel_matrix, fit_precomputed, predict

STAGE = "Experimento"
CELL_COLUMNS = ["data", "qubits", "kernel", "repeat", "status", "accuracy", "f1", "tp", "tn", "fp", "fn", "detail"]
HARDWARE_COLUMNS = ["data", "system", "job_time", "status", "jobs", "quantum_minutes", "accuracy", "f1", "detail"]


@dataclass(frozen=True)
class ExperimentGrid:
    sizes: tuple = ()                 # pares (n_train, n_test)
    qubits: tuple = ()
    kernels: tuple = ()               # feature maps quânticos e/ou kernels clássicos
    reps: int = config.REPS_DEFAULT
    method: str = "exact"
    shots: int = config.SHOTS_DEFAULT
    seed: int = config.SEED_DEFAULT
    separation: float = config.EXPERIMENT_SEPARATION_DEFAULT
    data_dims: int = config.EXPERIMENT_DATA_DIMS_DEFAULT
    angle_range: tuple = config.EXPERIMENT_ANGLE_RANGE_DEFAULT
    repeats: int = config.EXPERIMENT_REPEATS_DEFAULT
    C: float = config.SVM_C_DEFAULT
    entanglement: str = config.ENTANGLEMENT_DEFAULT
    hardware: dict = field(default=None, compare=False)

    def __post_init__(self):
        known = config.FEATURE_MAP_OPTIONS + config.CLASSICAL_KERNEL_OPTIONS
        unknown = [k for k in self.kernels if k not in known]
        if unknown:
            raise ArgumentError(f"Kernels desconhecidos na grade: {unknown}. Opções: {known}")
        if self.method not in config.KERNEL_METHOD_OPTIONS:
            raise ArgumentError(f"Método desconhecido: '{self.method}'")
        if int(self.repeats) < 1:
            raise ArgumentError(f"repeats deve ser >= 1, recebeu {self.repeats}")
        object.__setattr__(self, "sizes", tuple(tuple(int(v) for v in s) for s in self.sizes))
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "kernels", tuple(self.kernels))
        object.__setattr__(self, "angle_range", tuple(float(v) for v in self.angle_range))

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentGrid":
        allowed = set(cls.__dataclass_fields__)
        extra = set(data) - allowed
        if extra:
            raise ArgumentError(f"Chaves desconhecidas na grade: {sorted(extra)}")
        return cls(**data)

    def cell_count(self) -> int:
        return len(self.sizes) * len(self.qubits) * len(self.kernels)


def load_grid(path: str) -> ExperimentGrid:
    try:
        with open(path) as f:
            return ExperimentGrid.from_dict(json.load(f))
    except FileNotFoundError:
        raise ArgumentError(f"Arquivo de grade não encontrado: '{path}'")
    except json.JSONDecodeError as e:
        raise ArgumentError(f"Grade JSON inválida em '{path}': {e}")


def size_label(n_train: int, n_test: int) -> str:
    return f"{n_train}/{n_test}"


def prepare_features(n_train: int, n_test: int, qubits: int, grid: ExperimentGrid, seed: int) -> tuple:
    """Dados sintéticos -> divisão balanceada -> PCA (ajustado no treino) -> ângulos."""
    dataset = generate_synthetic(n_train + n_test, grid.data_dims, grid.separation, seed)
    train, test, _ = reduce_dataset(dataset, qubits, angle_range=grid.angle_range, seed=seed, n_train=n_train, n_test=n_test)
    return train.features, train.labels, test.features, test.labels


def _kernel_matrices(kernel: str, X_train, X_test, grid: ExperimentGrid, qubits: int, seed: int) -> tuple:
    if kernel in config.CLASSICAL_KERNEL_OPTIONS:
        spec = ClassicalKernel(kernel)
        return classical_kernel_matrix(X_train, kernel=spec), classical_kernel_matrix(X_test, X_train, spec)
    spec = preset_spec(kernel, qubits, reps=grid.reps, entanglement=grid.entanglement)
    method = ComputeUncompute(grid.shots, seed) if grid.method == "sampled" else ExactOverlap()
    return evaluate_train_matrix(X_train, spec, method), evaluate_test_matrix(X_test, X_train, spec, method)


def _score(K_train, y_train, K_test, y_test, grid: ExperimentGrid, seed: int) -> dict:
    model = fit_precomputed(K_train, y_train, C=grid.C, seed=seed)
    counts = confusion(y_test, predict(model, K_test))
    return {"accuracy": accuracy(counts), "f1": f1(counts), "tp": counts.tp, "tn": counts.tn,
            "fp": counts.fp, "fn": counts.fn}


def run_cell(n_train: int, n_test: int, qubits: int, kernel: str, grid: ExperimentGrid, repeat: int) -> dict:
    seed = grid.seed + repeat
    X_train, y_train, X_test, y_test = prepare_features(n_train, n_test, qubits, grid, seed)
    K_train, K_test = _kernel_matrices(kernel, X_train, X_test, grid, qubits, seed)
    return _score(K_train, y_train, K_test, y_test, grid, seed)


def run_grid(grid: ExperimentGrid, run_id: str = None) -> pd.DataFrame:
    """Executa todas as células; falhas são registradas na linha da célula e a execução continua."""
    rows = []
    for n_train, n_test in grid.sizes:
        for qubits in grid.qubits:
            for kernel in grid.kernels:
                for repeat in range(grid.repeats):
                    base = {"data": size_label(n_train, n_test), "qubits": qubits, "kernel": kernel, "repeat": repeat}
                    try:
                        result = run_cell(n_train, n_test, qubits, kernel, grid, repeat)
                        rows.append({**base, "status": "ok", **result, "detail": ""})
                        record_log(run_id, None, STAGE, "Célula Concluída",
                                   f"{base['data']} q={qubits} {kernel} r={repeat}: acc={result['accuracy']:.4f} f1={result['f1']:.4f}")
                    except Exception as e:
                        detail = f"{type(e).__name__}: {e}"
                        rows.append({**base, "status": "erro", "detail": detail})
                        warn_event(STAGE, f"Célula {base['data']} q={qubits} {kernel} falhou: {detail}", run_id=run_id)
    return pd.DataFrame(rows, columns=CELL_COLUMNS)


def summary_table(cells: pd.DataFrame, metric: str, kernels) -> pd.DataFrame:
    """Tabela no formato acurácia/F1: média das repetições bem-sucedidas por (dados, qubits) e kernel."""
    columns = ["data", "qubits"] + list(kernels)
    ok = cells[cells["status"] == "ok"]
    if ok.empty:
        return pd.DataFrame(columns=columns)
    table = ok.pivot_table(index=["data", "qubits"], columns="kernel", values=metric, aggfunc="mean", sort=False)
    table = table.reindex(columns=list(kernels)).reset_index()
    table.columns.name = None
    return table[columns]


def run_hardware(hardware: dict, grid: ExperimentGrid, sessions_dir: str, run_id: str = None) -> pd.DataFrame:
    """
    Kernel quântico amostrado pelo backend simulado (um job por entrada) para cada sistema e tamanho.
    Campos: backends, sizes, qubits, kernel, shots.
    """
    rows = []
    kernel = hardware.get("kernel", "zz")
    qubits = int(hardware.get("qubits", 3))
    shots = int(hardware.get("shots", grid.shots))
    for backend_name in hardware.get("backends", [config.BACKEND_DEFAULT]):
        profile = qbackend.get_profile(backend_name)
        for n_train, n_test in hardware.get("sizes", []):
            data = size_label(n_train, n_test)
            try:
                X_train, y_train, X_test, y_test = prepare_features(n_train, n_test, qubits, grid, grid.seed)
                spec = preset_spec(kernel, qubits, reps=grid.reps, entanglement=grid.entanglement)
                method = ComputeUncompute(shots, grid.seed)
                store = qbackend.JobStore(os.path.join(sessions_dir, f"{profile.name}-{n_train}-{n_test}"))
                with store.lock():
                    session = qbackend.open_session(store, f"{profile.name}-{n_train}-{n_test}", profile, {
                        "n_train": n_train, "n_test": n_test,
                        "feature_map": spec.to_dict(), "method": method.to_dict(),
                    })
                    if not session.job_ids:
                        pairs = qbackend.prepare_kernel_pairs(X_train, X_test, spec, profile, grid.seed)
                        qbackend.submit_kernel_jobs(pairs, profile, shots, store, session)
                    qbackend.run_pending(store, profile)
                    K_train, K_test = qbackend.assemble_session_matrices(store)
                    report = qbackend.session_report(store)
                scores = _score(K_train, y_train, K_test, y_test, grid, grid.seed)
                rows.append({"data": data, "system": profile.name, "job_time": profile.seconds_per_job,
                             "status": "ok", "jobs": report["jobs"], "quantum_minutes": report["quantum_minutes"],
                             "accuracy": scores["accuracy"], "f1": scores["f1"], "detail": ""})
            except Exception as e:
                detail = f"{type(e).__name__}: {e}"
                rows.append({"data": data, "system": profile.name, "job_time": profile.seconds_per_job,
                             "status": "erro", "detail": detail})
                warn_event(STAGE, f"Execução em {profile.name} ({data}) falhou: {detail}", run_id=run_id)
    return pd.DataFrame(rows, columns=HARDWARE_COLUMNS)


def run_experiment(grid: ExperimentGrid, out_dir: str, run_id: str = None) -> dict:
    """Executa a grade e grava accuracy.csv, f1.csv, cells.csv, report.html (e hardware.csv se houver)."""
    os.makedirs(out_dir, exist_ok=True)
    record_log(run_id, None, STAGE, "Grade Iniciada", f"{grid.cell_count()} célula(s), {grid.repeats} repetição(ões)")
    cells = run_grid(grid, run_id)
    tables = {
        "accuracy": summary_table(cells, "accuracy", grid.kernels),
        "f1": summary_table(cells, "f1", grid.kernels),
        "cells": cells,
    }
    if grid.hardware:
        tables["hardware"] = run_hardware(grid.hardware, grid, os.path.join(out_dir, "sessions"), run_id)
    for name, table in tables.items():
        table.to_csv(os.path.join(out_dir, f"{name}.csv"), index=False, float_format="%.6f")
    with open(os.path.join(out_dir, "report.html"), "w", encoding="utf-8") as f:
        f.write(build_experiment_report(tables))
    failed = int((cells["status"] == "erro").sum()) if not cells.empty else 0
    record_log(run_id, None, STAGE, "Grade Concluída", f"{len(cells)} execução(ões), {failed} falha(s)")
    return tables
