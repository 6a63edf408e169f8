# ptorus/adapters/samples_loader.py

import os

import numpy as np
import pandas as pd

from ptorus.adapters.exceptions import SpecLoadError
from ptorus.utils.logging import get_job_logger


class SamplesLoader:
    """Чтение выборки точек слайса из CSV с колонками re, im (строки-комментарии '#' допустимы)."""

    REQUIRED_COLUMNS = ("re", "im")

    def __init__(self):
        self.job_logger = get_job_logger(self.__class__.__name__)

    def load(self, file_path: str) -> np.ndarray:
        """
        :param file_path: Путь к CSV
        :return: Массив complex128
        :raises SpecLoadError: если файла нет, нет нужных колонок или значения не числовые
        """
        if not os.path.exists(file_path):
            raise SpecLoadError(f"Файл выборки не найден: {file_path}")
        try:
            df = pd.read_csv(file_path, comment="#", skipinitialspace=True)
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
            raise SpecLoadError(f"Ошибка чтения выборки {file_path}: {e}")

        df.columns = [str(c).strip().lower() for c in df.columns]
        missing = [c for c in self.REQUIRED_COLUMNS if c not in df.columns]
        if missing:
            raise SpecLoadError(f"В {file_path} нет колонок: {missing}")
        values = df[list(self.REQUIRED_COLUMNS)].apply(pd.to_numeric, errors="coerce")
        bad = values.isnull().any(axis=1)
        if bad.any():
            raise SpecLoadError(f"Нечисловые значения в строках {list(df.index[bad] + 1)} файла {file_path}")

        points = values["re"].to_numpy(dtype=float) + 1j * values["im"].to_numpy(dtype=float)
        self.job_logger.log_detail(f"Загружено точек: {len(points)} из {file_path}")
        return points
