# ptorus/pipelines/base.py

from abc import ABC, abstractmethod
from contextlib import contextmanager
from typing import Any, Dict, Iterator, Optional

from ptorus.adapters.writers import ResultWriter
from ptorus.domain.models.job import JobConfig, PipelineResult
from ptorus.domain.models.types import coerce_complex
from ptorus.utils.logging import get_job_logger


class Pipeline(ABC):
    """
    Абстрактный базовый класс для всех пайплайнов команд.
    """

    @abstractmethod
    def run(self, job: JobConfig) -> PipelineResult:
        """
        Выполняет команду.

        :param job: Конфигурация запуска
        :return: PipelineResult
        """
        pass


class BasePipeline(Pipeline):
    """
    Общая логика: блок логирования задания, нумерованные шаги, запись результатов одним писателем.
    """

    def __init__(self, writer: ResultWriter):
        self.writer = writer
        self.job_logger = get_job_logger(self.__class__.__name__)
        self.job_logger.log_detail(f"Инициализирован {self.__class__.__name__}")

    @contextmanager
    def step(self, step_num: int, step_name: str) -> Iterator[Dict[str, str]]:
        """
        Шаг пайплайна: ошибка логируется и пробрасывается, успех логируется с деталями из state["details"].
        """
        state = {"details": ""}
        try:
            yield state
        except Exception as e:
            self.job_logger.log_step_error(step_num, step_name, e)
            raise
        self.job_logger.log_step_ok(step_num, step_name, state["details"])

    @staticmethod
    def param(job: JobConfig, name: str, default: Any = None) -> Any:
        return job.params.get(name, default)

    @staticmethod
    def complex_param(job: JobConfig, name: str, default: Optional[complex] = None) -> Optional[complex]:
        value = job.params.get(name)
        return default if value is None else complex(coerce_complex(value))

    @abstractmethod
    def _execute(self, job: JobConfig) -> PipelineResult:
        pass

    def run(self, job: JobConfig) -> PipelineResult:
        self.job_logger.start_job_block(job.command.value, {**job.params, "seed": job.seed})
        try:
            result = self._execute(job)
        except Exception as e:
            self.job_logger.end_job_block(error=e)
            raise
        self.job_logger.log_result_summary(result.summary, total=result.total)
        self.job_logger.end_job_block()
        return result
