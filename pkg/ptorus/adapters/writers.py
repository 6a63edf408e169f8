# ptorus/adapters/writers.py

import io
import json
import os
import sys
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from ptorus.config import numeric_settings, output_schema_config, runtime_settings
from ptorus.domain.models.job import JobConfig
from ptorus.utils.logging import get_job_logger, setup_logger

# Настройка логгера
logger = setup_logger(__name__)


def tolerances_json() -> str:
    return json.dumps(numeric_settings.model_dump(), sort_keys=True, separators=(",", ":"))


def header_fields(job: JobConfig) -> Dict[str, Any]:
    """Поля заголовка результата: версия схемы, команда, хэш конфигурации, seed, допуски."""
    return {
        "schema": output_schema_config.SCHEMA_VERSION,
        "command": job.command.value,
        "config_hash": job.config_hash,
        "seed": job.seed,
        "tolerances": numeric_settings.model_dump(),
    }


def header_lines(job: JobConfig) -> List[str]:
    return [
        f"# ptorus schema={output_schema_config.SCHEMA_VERSION} command={job.command.value}",
        f"# config_hash={job.config_hash}",
        f"# seed={job.seed}",
        f"# tolerances={tolerances_json()}",
    ]


class ResultWriter:
    """
    Запись результатов: CSV с заголовком-комментарием, JSON с объектом header, PPM (P3), PNG по желанию.
    Каждый файл пишется один раз; путь None означает stdout.
    """

    def __init__(self):
        self.job_logger = get_job_logger(self.__class__.__name__)

    def _resolve(self, path: str) -> str:
        if os.path.isabs(path) or runtime_settings.output_dir in ("", "."):
            return path
        return os.path.join(runtime_settings.output_dir, path)

    def _emit(self, path: Optional[str], text: str) -> Optional[str]:
        if path is None:
            sys.stdout.write(text)
            return None
        target = self._resolve(path)
        folder = os.path.dirname(target)
        if folder:
            os.makedirs(folder, exist_ok=True)
        with open(target, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        self.job_logger.log_detail(f"Записан файл: {target} ({len(text)} символов)")
        return target

    def write_csv(self, path: Optional[str], frame: pd.DataFrame, job: JobConfig,
                  table_type: Optional[str] = None) -> Optional[str]:
        """
        :param path: Путь к CSV или None
        :param frame: Таблица
        :param job: Конфигурация запуска (для заголовка)
        :param table_type: Схема из OutputSchemaConfig, задаёт порядок колонок
        """
        if table_type:
            columns = output_schema_config.columns(table_type)
            frame = frame[[c for c in columns if c in frame.columns]]
        buffer = io.StringIO()
        buffer.write("\n".join(header_lines(job)) + "\n")
        frame.to_csv(buffer, index=False, float_format="%.17g", lineterminator="\n")
        return self._emit(path, buffer.getvalue())

    def write_json(self, path: Optional[str], payload: Dict[str, Any], job: JobConfig) -> Optional[str]:
        document = {"header": header_fields(job), **payload}
        return self._emit(path, json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False) + "\n")

    def write_ppm(self, path: str, pixels: np.ndarray) -> Optional[str]:
        """Plain PPM (P3): точка - чёрный пиксель, фон - белый."""
        height, width = pixels.shape
        lines = ["P3", f"{width} {height}", "255"]
        for row in pixels:
            lines.append(" ".join("0 0 0" if v else "255 255 255" for v in row))
        return self._emit(path, "\n".join(lines) + "\n")

    def write_png(self, path: str, points: np.ndarray, box=None) -> Optional[str]:
        """Точечный график через matplotlib; без matplotlib шаг пропускается с предупреждением."""
        try:
            import matplotlib
            matplotlib.use("Agg")
            import matplotlib.pyplot as plt
        except ImportError:
            logger.warning("matplotlib не установлен: PNG не записан")
            return None
        target = self._resolve(path)
        fig, ax = plt.subplots(figsize=(6, 6), dpi=100)
        ax.scatter(points.real, points.imag, s=0.2, c="black", marker=".")
        if box is not None:
            ax.set_xlim(box[0], box[1])
            ax.set_ylim(box[2], box[3])
        ax.set_aspect("equal")
        fig.savefig(target, metadata={"Software": None})
        plt.close(fig)
        self.job_logger.log_detail(f"Записан PNG: {target}")
        return target
