# ptorus/pipelines/__init__.py

from typing import Callable, Dict, Type

from ptorus.adapters.samples_loader import SamplesLoader
from ptorus.adapters.spec_loader import SpecLoader
from ptorus.adapters.writers import ResultWriter
from ptorus.config import container
from ptorus.domain.enums import CommandType
from ptorus.pipelines.base import Pipeline
from ptorus.pipelines.clouds_pipeline import BersCloudPipeline, BumpCloudPipeline
from ptorus.pipelines.geometry_pipeline import GeomCheckPipeline
from ptorus.pipelines.maskit_pipeline import MaskitCuspPipeline, MaskitMemberPipeline, MaskitTracePipeline
from ptorus.pipelines.render_pipeline import RenderLimitSetPipeline
from ptorus.pipelines.sequences_pipeline import SeqClassifyPipeline, SeqLimitPipeline
from ptorus.services.clouds import CloudBuilder
from ptorus.services.geometry import GeometricLimitChecker
from ptorus.services.limits import LimitClassifier
from ptorus.services.maskit import MaskitSliceService
from ptorus.services.render import LimitSetRenderer
from ptorus.utils.logging import setup_logger

# Настройка логгера
logger = setup_logger(__name__)

# Словарь соответствия команд и классов пайплайнов
COMMAND_TO_PIPELINE: Dict[CommandType, Type[Pipeline]] = {
    CommandType.MASKIT_TRACE: MaskitTracePipeline,
    CommandType.MASKIT_CUSP: MaskitCuspPipeline,
    CommandType.MASKIT_MEMBER: MaskitMemberPipeline,
    CommandType.SEQ_CLASSIFY: SeqClassifyPipeline,
    CommandType.SEQ_LIMIT: SeqLimitPipeline,
    CommandType.GEOM_CHECK: GeomCheckPipeline,
    CommandType.BUMP_CLOUD: BumpCloudPipeline,
    CommandType.BERS_CLOUD: BersCloudPipeline,
    CommandType.RENDER_LIMITSET: RenderLimitSetPipeline,
}


def init_container() -> None:
    """
    Регистрирует фабрики адаптеров и сервисов в контейнере.
    Сервисы со слайсом Маскита получают один общий экземпляр MaskitSliceService.
    """
    # Адаптеры
    container.register_factory(ResultWriter, lambda: ResultWriter())
    container.register_factory(SpecLoader, lambda: SpecLoader())
    container.register_factory(SamplesLoader, lambda: SamplesLoader())

    # Сервисы
    container.register_factory(MaskitSliceService, lambda: MaskitSliceService())
    container.register_factory(
        LimitClassifier,
        lambda: LimitClassifier(container.get(MaskitSliceService))
    )
    container.register_factory(GeometricLimitChecker, lambda: GeometricLimitChecker())
    container.register_factory(
        CloudBuilder,
        lambda: CloudBuilder(container.get(MaskitSliceService))
    )
    container.register_factory(LimitSetRenderer, lambda: LimitSetRenderer())

    logger.debug("Контейнер с зависимостями инициализирован")


def get_pipeline(command: CommandType) -> Pipeline:
    """
    Создаёт пайплайн для команды, беря зависимости из контейнера.

    :param command: Команда CLI
    :return: Экземпляр пайплайна
    :raises ValueError: если команда не поддерживается
    """
    if command not in COMMAND_TO_PIPELINE:
        logger.error(f"Команда {command} не поддерживается")
        raise ValueError(f"Команда {command} не поддерживается")

    writer = container.get(ResultWriter)
    if writer is None:
        init_container()
        writer = container.get(ResultWriter)

    pipeline_factories: Dict[CommandType, Callable[[], Pipeline]] = {
        CommandType.MASKIT_TRACE: lambda: MaskitTracePipeline(writer, container.get(MaskitSliceService)),
        CommandType.MASKIT_CUSP: lambda: MaskitCuspPipeline(writer, container.get(MaskitSliceService)),
        CommandType.MASKIT_MEMBER: lambda: MaskitMemberPipeline(writer, container.get(MaskitSliceService)),
        CommandType.SEQ_CLASSIFY: lambda: SeqClassifyPipeline(
            writer, container.get(SpecLoader), container.get(LimitClassifier)
        ),
        CommandType.SEQ_LIMIT: lambda: SeqLimitPipeline(writer),
        CommandType.GEOM_CHECK: lambda: GeomCheckPipeline(writer, container.get(GeometricLimitChecker)),
        CommandType.BUMP_CLOUD: lambda: BumpCloudPipeline(
            writer, container.get(SamplesLoader), container.get(CloudBuilder), container.get(MaskitSliceService)
        ),
        CommandType.BERS_CLOUD: lambda: BersCloudPipeline(
            writer, container.get(SamplesLoader), container.get(CloudBuilder), container.get(MaskitSliceService)
        ),
        CommandType.RENDER_LIMITSET: lambda: RenderLimitSetPipeline(writer, container.get(LimitSetRenderer)),
    }

    pipeline = pipeline_factories[command]()
    logger.debug(f"Создан пайплайн для команды {command.value}")
    return pipeline
