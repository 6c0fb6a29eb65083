# tests/conftest.py
import numpy as np
import pytest

import config


@pytest.fixture(autouse=True)
def isolated_event_log(tmp_path, monkeypatch):
    """Cada teste grava o log de eventos no próprio diretório temporário, sem espelho no Google Sheets."""
    path = tmp_path / "logs" / "eventos.csv"
    monkeypatch.setattr(config, "EVENT_LOG_CSV", str(path))
    monkeypatch.setattr(config, "EVENT_LOG_ENABLED", True)
    monkeypatch.setattr(config, "GSHEET_LOGGING_ENABLED", False)
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
