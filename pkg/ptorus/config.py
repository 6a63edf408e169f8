# ptorus/config.py

from pathlib import Path
from typing import Dict, Type, Optional, Any, Callable, List

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class BaseAppSettings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file='.env',
        extra='allow',
        env_prefix=''
    )


class AppSettings(BaseAppSettings):
    """Основные настройки приложения."""
    model_config = SettingsConfigDict(
        env_file='.env',
        extra='allow',
        env_prefix='PTORUS_APP_'
    )

    app_name: str = "ptorus"
    environment: str = "local"
    debug: bool = False


class NumericSettings(BaseAppSettings):
    """Допуски и параметры численных алгоритмов. Все допуски строго положительны."""
    model_config = SettingsConfigDict(
        env_file='.env',
        extra='allow',
        env_prefix='PTORUS_NUM_'
    )

    parabolic_tol: float = Field(1e-9, gt=0)  # |tr^2 - 4| ниже порога -> параболический
    det_tol: float = Field(1e-12, gt=0)  # допуск на ad - bc = 1
    markov_tol: float = Field(1e-9, gt=0)  # допуск на невязку Маркова и tr[A,B] = -2
    newton_tol: float = Field(1e-12, gt=0)  # |tr_s(mu) -/+ 2| для остановки Ньютона
    newton_max_iter: int = Field(200, gt=0)
    newton_damping: float = Field(0.5, gt=0, lt=1)  # множитель шага при перелёте
    cusp_accept_radius: float = Field(0.75, gt=0)  # насколько корень может уйти от начального приближения
    cusp_ray_steps: int = Field(200, gt=0)  # шаги гомотопии вдоль луча вещественного следа
    bowditch_depth: int = Field(24, gt=0)
    bowditch_bound: float = Field(10.0, gt=2)
    bowditch_max_regions: int = Field(20000, gt=0)
    membership_margin: float = Field(0.05, gt=0)  # запас над границей для вердикта Inside
    membership_qmax: int = Field(16, ge=1)  # глубина трассировки границы для проверки принадлежности
    shimizu_word_length: int = Field(6, ge=1)  # длина слов в проверке Шимизу–Лейтбехера
    exponent_window: int = Field(2, gt=0)  # окно поиска показателя j = a*m + b +/- window
    trend_tol: float = Field(1e-2, gt=0)  # порог "стремится к нулю" в отчётах о геометрической сходимости


class RenderSettings(BaseAppSettings):
    """Настройки отрисовки предельного множества."""
    model_config = SettingsConfigDict(
        env_file='.env',
        extra='allow',
        env_prefix='PTORUS_RENDER_'
    )

    contraction_threshold: float = Field(1e-4, gt=0)
    width: int = Field(512, gt=0)
    height: int = Field(512, gt=0)
    point_budget: int = Field(200000, ge=1)
    png: bool = False  # дополнительный PNG через matplotlib


class RuntimeSettings(BaseAppSettings):
    """Настройки выполнения: число воркеров, каталоги логов и результатов."""
    model_config = SettingsConfigDict(
        env_file='.env',
        extra='allow',
        env_prefix='PTORUS_'
    )

    workers: int = Field(1, ge=1)  # PTORUS_WORKERS
    log_dir: Path = Path(__file__).resolve().parent.parent / "LOGS"
    output_dir: Path = Path(".")


# Создание экземпляров настроек
app_settings = AppSettings()
numeric_settings = NumericSettings()
render_settings = RenderSettings()
runtime_settings = RuntimeSettings()


# DI контейнер
class Container:
    """Простой контейнер для управления зависимостями."""
    def __init__(self):
        self._instances: Dict[Type, Any] = {}
        self._factories: Dict[Type, Callable[[], Any]] = {}

    def register(self, cls: Type, instance: Any) -> None:
        """Регистрирует экземпляр класса в контейнере."""
        self._instances[cls] = instance

    def register_factory(self, cls: Type, factory: Callable[[], Any]) -> None:
        """Регистрирует фабрику для создания экземпляров."""
        self._factories[cls] = factory

    def get(self, cls: Type) -> Optional[Any]:
        """Возвращает экземпляр класса из контейнера."""
        # Сначала проверяем существующие экземпляры
        if cls in self._instances:
            return self._instances[cls]

        # Если есть фабрика, используем её
        if cls in self._factories:
            instance = self._factories[cls]()
            self._instances[cls] = instance
            return instance

        return None

    def clear(self) -> None:
        """Очищает контейнер."""
        self._instances.clear()
        self._factories.clear()


container = Container()


class OutputSchemaConfig:
    """Схемы выходных таблиц по командам: версия и порядок колонок."""

    SCHEMA_VERSION = 1

    MASKIT_TRACE = {
        "columns": ["p", "q", "re_mu", "im_mu", "trace_sign", "residual"],
        "description": "Точки касп на границе слайса Маскита",
    }

    GEOM_CHECK = {
        "columns": ["n", "m_n", "residual_abs", "residual_rel", "sup_residual", "spurious_margin"],
        "description": "Невязки степеней A_n^{m_n} и условия сходимости по Хаусдорфу",
    }

    CLOUD = {
        "columns": ["re", "im", "tag", "branch", "mu_index", "nu_index", "p", "q"],
        "description": "Облака параметров M(p), B_G, B_y(1)",
    }

    LIMIT_SET = {
        "columns": ["re", "im"],
        "description": "Точки предельного множества",
    }

    @classmethod
    def get_config(cls, table_type: str) -> Dict[str, Any]:
        """
        Получает схему для указанного типа таблицы.

        :param table_type: Тип таблицы (maskit_trace, geom_check, ...)
        :return: Словарь со схемой
        """
        return getattr(cls, table_type.upper(), {})

    @classmethod
    def columns(cls, table_type: str) -> List[str]:
        return list(cls.get_config(table_type).get("columns", []))


output_schema_config = OutputSchemaConfig()
