import logging
import os

import pytest

from models.errors import BudgetExceededError, ensure_budget
from utils.config import DEFAULT_BUDGET, DEFAULT_WORKERS, configure_logging, load_settings


@pytest.fixture(autouse=True)
def isolated_env(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    for name in ("ZSP_BUDGET", "ZSP_WORKERS", "ZSP_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)


def test_defaults():
    settings = load_settings()
    assert settings.budget == DEFAULT_BUDGET
    assert settings.workers == DEFAULT_WORKERS
    assert settings.log_level == "WARNING"


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("ZSP_BUDGET", "5000")
    monkeypatch.setenv("ZSP_WORKERS", "4")
    monkeypatch.setenv("ZSP_LOG_LEVEL", "debug")
    settings = load_settings()
    assert (settings.budget, settings.workers, settings.log_level) == (5000, 4, "DEBUG")


@pytest.mark.parametrize("raw", ["abc", "-3", "0", " "])
def test_invalid_integers_fall_back(monkeypatch, raw):
    monkeypatch.setenv("ZSP_BUDGET", raw)
    assert load_settings().budget == DEFAULT_BUDGET


def test_dotenv_file_is_read(tmp_path):
    (tmp_path / ".env").write_text("ZSP_WORKERS=3\n", encoding="utf-8")
    try:
        assert load_settings().workers == 3
    finally:
        os.environ.pop("ZSP_WORKERS", None)


def test_configure_logging():
    configure_logging("info")
    assert logging.getLogger().level == logging.INFO
    configure_logging("nonsense")
    assert logging.getLogger().level == logging.WARNING


def test_ensure_budget():
    ensure_budget(10, 10)
    with pytest.raises(BudgetExceededError) as excinfo:
        ensure_budget(11, 10)
    assert (excinfo.value.required, excinfo.value.budget) == (11, 10)
