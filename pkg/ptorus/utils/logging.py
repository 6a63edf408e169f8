# ptorus/utils/logging.py
from __future__ import annotations

import json
import logging
import os
import time
import uuid
from pathlib import Path
from logging.handlers import RotatingFileHandler
from typing import Any, Dict, Optional, Tuple
from contextvars import ContextVar

# Глобальные переменные для единого логгера
_unified_logger: Optional[logging.Logger] = None
_summary_logger: Optional[logging.Logger] = None
_current_job_var: ContextVar[Tuple[Optional[str], Optional[str]]] = ContextVar("job", default=(None, None))


def _log_dir() -> Path:
    """
    Каталог логов. Переопределяется переменной PTORUS_LOG_DIR, создаётся при первом обращении.
    """
    override = os.environ.get("PTORUS_LOG_DIR")
    if override:
        log_dir = Path(override)
    else:
        from ptorus.config import runtime_settings
        log_dir = Path(runtime_settings.log_dir)
    log_dir.mkdir(parents=True, exist_ok=True)
    return log_dir


def _build_formatter() -> logging.Formatter:
    """
    Форматтер для логов.
    """
    fmt = (
        "%(asctime)s | %(levelname)s | "
        "%(name)s/%(filename)s:%(funcName)s:%(lineno)d | %(message)s"
    )
    return logging.Formatter(fmt, datefmt="%Y-%m-%d %H:%M:%S")


def _get_unified_logger() -> logging.Logger:
    """
    Создает или возвращает единый логгер для всего приложения.
    """
    global _unified_logger

    if _unified_logger is not None:
        return _unified_logger

    _unified_logger = logging.getLogger("ptorus")
    _unified_logger.setLevel(logging.DEBUG)

    # Если обработчики уже есть, не добавляем новые
    if _unified_logger.handlers:
        return _unified_logger

    formatter = _build_formatter()

    # ── терминал (stderr, чтобы не смешиваться с выводом команд) ───────────────
    sh = logging.StreamHandler()
    sh.setLevel(logging.INFO)
    sh.setFormatter(formatter)
    _unified_logger.addHandler(sh)

    # ── единый файл логов ───────────────────────────────────────────────────────
    log_file = _log_dir() / "ptorus.log"
    fh = RotatingFileHandler(
        log_file,
        maxBytes=5 * 1024 * 1024,  # 5MB
        backupCount=3,
        encoding="utf-8",
    )
    fh.setLevel(logging.DEBUG)
    fh.setFormatter(formatter)
    _unified_logger.addHandler(fh)

    _unified_logger.propagate = False  # исключаем дублирование

    _unified_logger.debug(f"Единый логгер инициализирован. Файл: {log_file}")
    return _unified_logger


# Параметры задания, которые выносятся в заголовок блока (в этом порядке)
_DOMAIN_KEYS = ("slope", "q_max", "mu", "nu", "guess", "w", "p", "q", "depth", "rank", "seed")


class _JobContextFilter(logging.Filter):
    """Подставляет в запись job_id и команду текущего задания из контекста."""

    def filter(self, record: logging.LogRecord) -> bool:
        job_id, command = _current_job_var.get()
        if not hasattr(record, "job_id"):
            record.job_id = job_id or "-"
        if not hasattr(record, "command"):
            record.command = command or "-"
        return True


def _get_summary_logger() -> logging.Logger:
    """
    Логгер краткой сводки: по строке на событие задания (START, STEP, RESULT, END),
    в каждой строке job_id и команда.
    """
    global _summary_logger

    if _summary_logger is not None:
        return _summary_logger

    _summary_logger = logging.getLogger("ptorus_summary")
    _summary_logger.setLevel(logging.INFO)

    if _summary_logger.handlers:
        return _summary_logger

    fmt = "%(asctime)s | %(levelname)s | job=%(job_id)s cmd=%(command)s | %(message)s"
    formatter = logging.Formatter(fmt, datefmt="%Y-%m-%d %H:%M:%S")

    summary_file = _log_dir() / "ptorus_summary.log"
    fh = RotatingFileHandler(summary_file, maxBytes=5 * 1024 * 1024, backupCount=3, encoding="utf-8")
    fh.setLevel(logging.INFO)
    fh.setFormatter(formatter)
    fh.addFilter(_JobContextFilter())
    _summary_logger.addHandler(fh)
    _summary_logger.propagate = False

    return _summary_logger


def reset_loggers() -> None:
    """
    Снимает обработчики и сбрасывает кэш логгеров (нужно тестам, меняющим PTORUS_LOG_DIR).
    """
    global _unified_logger, _summary_logger
    for lg in (_unified_logger, _summary_logger):
        if lg is None:
            continue
        for handler in list(lg.handlers):
            handler.close()
            lg.removeHandler(handler)
    _unified_logger = None
    _summary_logger = None


def setup_logger(name: str, **kwargs) -> logging.Logger:
    """
    Возвращает единый логгер для всего приложения.

    :param name: имя модуля (игнорируется, логгер один)
    :return: единый логгер приложения
    """
    return _get_unified_logger()


def _format_value(value: Any) -> str:
    if isinstance(value, complex):
        return f"{value.real:.10g}{value.imag:+.10g}i"
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(isinstance(v, (int, float)) for v in value):
        return f"{value[0]:.10g}{value[1]:+.10g}i"
    return str(value)


def domain_fields(params: Dict[str, Any]) -> str:
    """
    Ключевые параметры задания одной строкой: slope=1/2 q_max=50 mu=1+1.732i.
    Отсутствующие и пустые значения пропускаются.

    :param params: Параметры задания
    :return: Строка "ключ=значение" через пробел, "-" если ключевых параметров нет
    """
    parts = [f"{key}={_format_value(params[key])}" for key in _DOMAIN_KEYS if params.get(key) is not None]
    return " ".join(parts) or "-"


def _describe_error(error: BaseException) -> str:
    """Тип ошибки, наклон (если ошибка его несёт) и сообщение."""
    slope = getattr(error, "slope", None)
    where = f" slope={slope}" if slope else ""
    return f"{type(error).__name__}{where}: {error}"


class JobLogger:
    """
    Логгер заданий CLI: заголовок с командой и ключевыми параметрами (наклон, q_max, mu, ...),
    нумерованные шаги, итог с кодом выхода.
    """

    def __init__(self, logger_name: str):
        self.logger = _get_unified_logger()
        self.summary = _get_summary_logger()
        self.logger_name = logger_name
        self.job_id: Optional[str] = None
        self.command: Optional[str] = None
        self.domain = "-"
        self.start_time: Optional[float] = None
        self._job_token = None

    @staticmethod
    def _short(text: Optional[str], limit: int = 160) -> str:
        if not text:
            return ""
        t = str(text).replace("\n", " ")
        return t if len(t) <= limit else (t[:limit] + "...")

    def _current_id(self) -> Optional[str]:
        return self.job_id or _current_job_var.get()[0]

    def _tag(self) -> str:
        return self._current_id() or "-"

    def start_job_block(self, command: str, params: Dict[str, Any]) -> str:
        """
        Открывает блок задания: заголовок в основном логе, строка START в сводке.

        :param command: Имя команды (maskit-trace, seq-classify, ...)
        :param params: Параметры задания; slope, q_max, mu и др. выносятся в заголовок
        :return: ID задания
        """
        self.job_id = uuid.uuid4().hex[:8]
        self.command = command
        self.domain = domain_fields(params)
        self._job_token = _current_job_var.set((self.job_id, command))
        self.start_time = time.perf_counter()

        from ptorus.config import app_settings
        params_text = json.dumps(params, sort_keys=True, default=str, ensure_ascii=False)

        self.logger.info("─" * 72)
        self.logger.info(f"[{self.job_id}] {command} | {self.domain}")
        if app_settings.debug:
            self.logger.info(f"[{self.job_id}] все параметры: {self._short(params_text, 400)}")

        self.summary.info(f"START | {self.domain} | params={params_text}")
        return self.job_id

    def end_job_block(self, error: Optional[BaseException] = None):
        """
        Закрывает блок задания: код выхода, длительность, при ошибке - её тип и наклон.

        :param error: Исключение, прервавшее задание (None при успехе)
        """
        duration = time.perf_counter() - self.start_time if self.start_time else 0.0
        success = error is None
        exit_code = 0 if success else getattr(error, "exit_code", 1)

        if success:
            self.logger.info(f"[{self.job_id}] {self.command} готово за {duration:.2f}с | {self.domain}")
            self.summary.info(f"END | success=True | exit=0 | {duration:.2f}s")
        else:
            self.logger.error(
                f"[{self.job_id}] {self.command} прервано за {duration:.2f}с (код {exit_code}) | "
                f"{self.domain} | {_describe_error(error)}"
            )
            self.summary.info(
                f"END | success=False | exit={exit_code} | {duration:.2f}s | {self._short(_describe_error(error))}"
            )

        try:
            if self._job_token is not None:
                _current_job_var.reset(self._job_token)
        except ValueError:
            _current_job_var.set((None, None))
        self.job_id = None
        self.command = None
        self.domain = "-"
        self.start_time = None
        self._job_token = None

    def log_step_ok(self, step_num: int, step_name: str, details: str = ""):
        """
        Шаг выполнен. Детали попадают в основной лог только в DEBUG, в сводку всегда.

        :param step_num: Номер шага
        :param step_name: Название шага
        :param details: Результат шага (каспа, число точек, вердикт)
        """
        from ptorus.config import app_settings

        tail = f": {details}" if app_settings.debug and details else ""
        self.logger.info(f"[{self._tag()}] шаг {step_num} {step_name} - ок{tail}")
        self.summary.info(f"STEP | {step_num} {step_name} | {self._short(details)}")

    def log_step_error(self, step_num: int, step_name: str, error: BaseException):
        """
        Шаг прерван исключением.

        :param step_num: Номер шага
        :param step_name: Название шага
        :param error: Исключение шага
        """
        self.logger.error(f"[{self._tag()}] шаг {step_num} {step_name} - ошибка {_describe_error(error)}")

    def log_detail(self, message: str, level: str = "INFO"):
        """
        Подробность (только в DEBUG режиме).

        :param message: Сообщение
        :param level: Уровень (INFO, DEBUG, WARNING, ERROR)
        """
        from ptorus.config import app_settings

        if not app_settings.debug:
            return
        self.logger.log(getattr(logging, level.upper(), logging.INFO), f"[{self._tag()}] {message}")

    def log_result_summary(self, summary: str, total: int):
        """
        Строка RESULT в сводке.

        :param summary: Текст резюме (обрезается)
        :param total: Количество строк/точек/вердиктов в результате
        """
        self.summary.info(f"RESULT | total={total} | {self._short(summary)}")


def get_job_logger(name: str) -> JobLogger:
    """
    Создает логгер задания.

    :param name: Имя логгера
    :return: Экземпляр JobLogger
    """
    return JobLogger(name)
