# tests/conftest.py

import os
import tempfile

# Логи тестов пишутся во временный каталог; переменная должна быть задана до импорта ptorus
os.environ.setdefault("PTORUS_LOG_DIR", tempfile.mkdtemp(prefix="ptorus-logs-"))
os.environ.setdefault("PTORUS_WORKERS", "1")

import numpy as np
import pytest
from hypothesis import settings

from ptorus.services.maskit import MaskitSliceService

settings.register_profile("ptorus", deadline=None, database=None, max_examples=100)
settings.load_profile("ptorus")


@pytest.fixture(scope="session")
def log_dir() -> str:
    """Каталог логов тестового прогона."""
    return os.environ["PTORUS_LOG_DIR"]


@pytest.fixture(scope="session")
def slice_service() -> MaskitSliceService:
    """Общий сервис слайса: кэш касп переиспользуется между тестами."""
    return MaskitSliceService()


@pytest.fixture
def interior_points() -> np.ndarray:
    """Точки глубоко внутри слайса Маскита (Im >= 3)."""
    rng = np.random.default_rng(7)
    return rng.uniform(-1.0, 1.0, 40) + 1j * rng.uniform(3.0, 4.0, 40)


@pytest.fixture
def samples_csv(tmp_path, interior_points) -> str:
    """CSV выборки с колонками re, im и строкой-комментарием."""
    path = tmp_path / "samples.csv"
    lines = ["# выборка слайса", "re,im"]
    lines += [f"{float(z.real)!r},{float(z.imag)!r}" for z in interior_points]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)
