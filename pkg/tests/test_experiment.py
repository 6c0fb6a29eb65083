# tests/test_experiment.py
import json

import pandas as pd
import pytest

from utils.errors import ArgumentError
from utils.experiment import (CELL_COLUMNS, HARDWARE_COLUMNS, ExperimentGrid, load_grid, prepare_features,
                              run_experiment, run_grid, run_hardware, summary_table)


@pytest.fixture
def grid():
    return ExperimentGrid(sizes=[[20, 10]], qubits=[2], kernels=["zz", "rbf"], data_dims=4, seed=1)


class TestGrid:
    def test_cell_count(self, grid):
        assert grid.cell_count() == 2

    def test_unknown_key(self):
        with pytest.raises(ArgumentError):
            ExperimentGrid.from_dict({"sizes": [[4, 2]], "qbits": [2]})

    def test_unknown_kernel(self):
        with pytest.raises(ArgumentError):
            ExperimentGrid(kernels=["zz", "laplacian"])

    def test_load_grid(self, tmp_path):
        path = tmp_path / "grade.json"
        path.write_text(json.dumps({"sizes": [[20, 10]], "qubits": [2, 3], "kernels": ["z"], "repeats": 2}))
        grid = load_grid(str(path))
        assert grid.sizes == ((20, 10),)
        assert grid.cell_count() == 2

    def test_missing_grid_file(self, tmp_path):
        with pytest.raises(ArgumentError):
            load_grid(str(tmp_path / "nada.json"))


def test_prepare_features_shapes_and_range(grid):
    X_train, y_train, X_test, y_test = prepare_features(20, 10, 2, grid, seed=1)
    assert X_train.shape == (20, 2) and X_test.shape == (10, 2)
    assert X_train.min() >= grid.angle_range[0] and X_train.max() <= grid.angle_range[1]
    assert sorted(set(y_train)) == [-1, 1]


def test_run_grid_records_every_cell(grid):
    cells = run_grid(grid)
    assert list(cells.columns) == CELL_COLUMNS
    assert len(cells) == 2
    assert (cells["status"] == "ok").all()
    assert cells["accuracy"].between(0, 1).all()


def test_failed_cell_does_not_stop_the_grid():
    grid = ExperimentGrid(sizes=[[20, 10]], qubits=[2, 5], kernels=["linear"], data_dims=4)
    cells = run_grid(grid)
    assert cells["status"].tolist() == ["ok", "erro"]
    assert "ArgumentError" in cells.loc[1, "detail"]
    table = summary_table(cells, "accuracy", grid.kernels)
    assert table["qubits"].tolist() == [2]


def test_summary_table_layout():
    cells = pd.DataFrame([
        {"data": "20/10", "qubits": 2, "kernel": "rbf", "repeat": 0, "status": "ok", "accuracy": 0.8},
        {"data": "20/10", "qubits": 2, "kernel": "zz", "repeat": 0, "status": "ok", "accuracy": 0.6},
        {"data": "20/10", "qubits": 2, "kernel": "zz", "repeat": 1, "status": "ok", "accuracy": 0.7},
    ])
    table = summary_table(cells, "accuracy", ["zz", "rbf"])
    assert list(table.columns) == ["data", "qubits", "zz", "rbf"]
    assert table.loc[0, "zz"] == pytest.approx(0.65)


def test_summary_table_without_results():
    cells = pd.DataFrame([{"data": "4/2", "qubits": 2, "kernel": "zz", "status": "erro"}])
    table = summary_table(cells, "f1", ["zz"])
    assert table.empty and list(table.columns) == ["data", "qubits", "zz"]


def test_run_experiment_writes_tables(tmp_path):
    grid = ExperimentGrid(sizes=[[12, 6]], qubits=[2], kernels=["z", "linear"], data_dims=3, seed=2,
                          hardware={"backends": ["torino"], "sizes": [[4, 2]], "qubits": 2, "kernel": "zz", "shots": 200})
    tables = run_experiment(grid, str(tmp_path / "saida"))
    for name in ("accuracy.csv", "f1.csv", "cells.csv", "hardware.csv", "report.html"):
        assert (tmp_path / "saida" / name).exists()
    hardware = tables["hardware"]
    assert list(hardware.columns) == HARDWARE_COLUMNS
    assert hardware.loc[0, "jobs"] == 14
    assert hardware.loc[0, "quantum_minutes"] == pytest.approx(3.5)
    assert "Acurácia por kernel" in (tmp_path / "saida" / "report.html").read_text(encoding="utf-8")


def test_failed_hardware_run_is_recorded(tmp_path):
    grid = ExperimentGrid(data_dims=3, seed=2)
    hardware = {"backends": ["torino"], "sizes": [[4, 2], [4, 3]], "qubits": 2, "kernel": "zz", "shots": 100}
    table = run_hardware(hardware, grid, str(tmp_path / "sessions"))
    assert list(table.columns) == HARDWARE_COLUMNS
    assert table["status"].tolist() == ["ok", "erro"]
    assert table.loc[0, "jobs"] == 14
    assert table.loc[1, "data"] == "4/3" and table.loc[1, "system"] == "torino"
    assert "ArgumentError" in table.loc[1, "detail"]
    assert pd.isna(table.loc[1, "accuracy"])
