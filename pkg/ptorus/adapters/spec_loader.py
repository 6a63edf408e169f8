# ptorus/adapters/spec_loader.py

import json
import os
from typing import Any, Dict

from ptorus.adapters.exceptions import SpecLoadError
from ptorus.domain.models.sequences import SequenceBatch
from ptorus.utils.logging import get_job_logger, setup_logger

# Настройка логгера
logger = setup_logger(__name__)


class SpecLoader:
    """
    Адаптер для чтения входных JSON-документов: спецификаций последовательностей и файлов конфигурации.
    """

    def __init__(self):
        self.job_logger = get_job_logger(self.__class__.__name__)

    def read_document(self, file_path: str) -> Any:
        """
        Читает JSON-документ.

        :param file_path: Путь к файлу
        :return: Разобранный документ
        :raises SpecLoadError: если файл не найден или не является JSON
        """
        if not os.path.exists(file_path):
            raise SpecLoadError(f"Файл не найден: {file_path}")
        self.job_logger.log_detail(f"Чтение документа: {file_path} ({os.path.getsize(file_path)} байт)")
        try:
            with open(file_path, "r", encoding="utf-8") as handle:
                return json.load(handle)
        except json.JSONDecodeError as e:
            raise SpecLoadError(f"Некорректный JSON в {file_path}: строка {e.lineno}, {e.msg}")
        except OSError as e:
            raise SpecLoadError(f"Ошибка чтения {file_path}: {e}")

    def load_batch(self, file_path: str) -> SequenceBatch:
        """
        Загружает набор спецификаций: объект {"specs": [...]} или список спецификаций.
        Ошибки валидации pydantic пробрасываются как есть (перечень полей нужен вызывающему).

        :param file_path: Путь к JSON
        :return: SequenceBatch
        """
        document = self.read_document(file_path)
        if isinstance(document, list):
            document = {"specs": document}
        if not isinstance(document, dict):
            raise SpecLoadError(f"Ожидался объект или список спецификаций в {file_path}")
        batch = SequenceBatch.model_validate(document)
        self.job_logger.log_detail(f"Загружено спецификаций: {len(batch.specs)}")
        return batch

    def load_config(self, file_path: str) -> Dict[str, Any]:
        """Файл конфигурации запуска: плоский JSON-объект, значения перекрывают флаги."""
        document = self.read_document(file_path)
        if not isinstance(document, dict):
            raise SpecLoadError(f"Файл конфигурации должен содержать JSON-объект: {file_path}")
        return document
