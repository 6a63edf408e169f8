# ptorus/main.py

import argparse
import sys
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv
from pydantic import ValidationError

from ptorus.adapters.exceptions import NumericalError, UsageError
from ptorus.adapters.spec_loader import SpecLoader
from ptorus.config import app_settings, runtime_settings
from ptorus.domain.enums import ApproachKind, CommandType
from ptorus.domain.models.job import JobConfig
from ptorus.domain.models.markov import FareySlope
from ptorus.domain.models.types import coerce_complex
from ptorus.pipelines import get_pipeline, init_container
from ptorus.utils.logging import setup_logger

# Загрузка переменных окружения (уже заданные переменные не перекрываются)
load_dotenv(dotenv_path=".env", override=False)

# Настройка логгера
logger = setup_logger(__name__)

# Ключи, которые относятся к путям вывода, а не к численным параметрам
OUTPUT_KEYS = ("out", "image", "points")
RUNTIME_KEYS = ("seed", "workers")


# ── разбор значений аргументов ────────────────────────────────────────────────
def complex_arg(text: str) -> List[float]:
    """'RE,IM' -> [re, im]; некорректная строка превращается в ошибку argparse."""
    try:
        value = complex(coerce_complex(text))
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"ожидалось комплексное число RE,IM, получено {text!r}")
    return [value.real, value.imag]


def slope_arg(text: str) -> str:
    try:
        return str(FareySlope.parse(text))
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"ожидался наклон P/Q, получено {text!r}")


def int_list_arg(text: str) -> List[int]:
    try:
        return [int(float(v)) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"ожидался список целых через запятую, получено {text!r}")


def box_arg(text: str) -> List[float]:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        values = []
    if len(values) != 4:
        raise argparse.ArgumentTypeError(f"ожидалось XMIN,XMAX,YMIN,YMAX, получено {text!r}")
    return values


def build_parser() -> argparse.ArgumentParser:
    """Дерево команд: группа (maskit, seq, geom, bump, bers, render) и действие."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="JSON-файл конфигурации; его значения перекрывают флаги")
    common.add_argument("--seed", type=int, default=None, help="seed для выборок (по умолчанию 0)")
    common.add_argument("--workers", type=int, default=None, help="число процессов (по умолчанию PTORUS_WORKERS)")

    parser = argparse.ArgumentParser(
        prog="ptorus",
        description="Группы проколотого тора: слайс Маскита, последовательности скручиваний, геометрические пределы.",
    )
    groups = parser.add_subparsers(dest="group", metavar="GROUP")
    groups.required = True

    # maskit
    maskit = groups.add_parser("maskit", help="слайс Маскита").add_subparsers(dest="action", metavar="ACTION")
    maskit.required = True
    p = maskit.add_parser("trace", parents=[common], help="граница слайса по каспам")
    p.add_argument("--qmax", dest="q_max", type=int, required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--image", default=None, help="PPM-изображение границы")
    p.set_defaults(command=CommandType.MASKIT_TRACE)

    p = maskit.add_parser("cusp", parents=[common], help="одна каспа P/Q")
    p.add_argument("slope", type=slope_arg)
    p.add_argument("--guess", type=complex_arg, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(command=CommandType.MASKIT_CUSP)

    p = maskit.add_parser("member", parents=[common], help="принадлежность слайсу")
    p.add_argument("--mu", type=complex_arg, required=True)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(command=CommandType.MASKIT_MEMBER)

    # seq
    seq = groups.add_parser("seq", help="последовательности скручиваний").add_subparsers(dest="action", metavar="ACTION")
    seq.required = True
    p = seq.add_parser("classify", parents=[common], help="вердикты по файлу спецификаций")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(command=CommandType.SEQ_CLASSIFY)

    p = seq.add_parser("limit", parents=[common], help="предельный параметр xi")
    p.add_argument("--mu", type=complex_arg, required=True)
    p.add_argument("--nu", type=complex_arg, required=True)
    p.add_argument("-p", dest="p", type=int, required=True)
    p.add_argument("-q", dest="q", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(command=CommandType.SEQ_LIMIT)

    # geom
    geom = groups.add_parser("geom", help="геометрические пределы").add_subparsers(dest="action", metavar="ACTION")
    geom.required = True
    p = geom.add_parser("check", parents=[common], help="сходимость степеней и по Хаусдорфу")
    p.add_argument("--w", type=complex_arg, required=True)
    p.add_argument("--m-list", dest="m_list", type=int_list_arg, required=True)
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--max-index", dest="max_index", type=int, default=None)
    p.add_argument("--rank", type=int, choices=(1, 2), default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(command=CommandType.GEOM_CHECK)

    # bump
    bump = groups.add_parser("bump", help="облака M(p)").add_subparsers(dest="action", metavar="ACTION")
    bump.required = True
    p = bump.add_parser("cloud", parents=[common], help="облако M(p) или B_y(1)")
    p.add_argument("-p", dest="p", type=int, required=True)
    p.add_argument("--samples", required=True)
    p.add_argument("--slope", type=slope_arg, default=None)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--no-membership-check", dest="check_membership", action="store_false", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(command=CommandType.BUMP_CLOUD)

    # bers
    bers = groups.add_parser("bers", help="предельный слайс Берса").add_subparsers(dest="action", metavar="ACTION")
    bers.required = True
    p = bers.add_parser("cloud", parents=[common], help="облако M ⊔ (M* + 2 nu_bar)")
    p.add_argument("--nu", type=complex_arg, required=True)
    p.add_argument("--samples", default=None)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--approach", choices=[a.value for a in ApproachKind], default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(command=CommandType.BERS_CLOUD)

    # render
    render = groups.add_parser("render", help="предельные множества").add_subparsers(dest="action", metavar="ACTION")
    render.required = True
    p = render.add_parser("limitset", parents=[common], help="точки предельного множества <T_2, U_mu>")
    p.add_argument("--mu", type=complex_arg, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--box", type=box_arg, default=None, help="XMIN,XMAX,YMIN,YMAX")
    p.add_argument("--png", action="store_true", default=None)
    p.add_argument("--out", default=None, help="PPM-изображение")
    p.add_argument("--points", default=None, help="CSV с точками")
    p.set_defaults(command=CommandType.RENDER_LIMITSET)

    return parser


def build_job(args: argparse.Namespace, spec_loader: Optional[SpecLoader] = None) -> JobConfig:
    """
    Собирает JobConfig из флагов; значения файла --config перекрывают флаги.
    Незаданные флаги в параметры не попадают, чтобы хэш конфигурации не зависел от умолчаний.
    """
    skip = {"group", "action", "command", "config", *RUNTIME_KEYS, *OUTPUT_KEYS}
    params: Dict[str, Any] = {k: v for k, v in vars(args).items() if k not in skip and v is not None}
    outputs: Dict[str, Optional[str]] = {k: getattr(args, k) for k in OUTPUT_KEYS if getattr(args, k, None)}
    seed, workers = args.seed, args.workers

    if args.config:
        document = (spec_loader or SpecLoader()).load_config(args.config)
        for key, value in document.items():
            key = key.replace("-", "_")
            if key == "command":
                continue
            if key == "seed":
                seed = value
            elif key == "workers":
                workers = value
            elif key in OUTPUT_KEYS:
                outputs[key] = value
            else:
                params[key] = value

    return JobConfig(
        command=args.command, params=params, outputs=outputs,
        seed=0 if seed is None else seed,
        workers=runtime_settings.workers if workers is None else workers,
    )


def _report(message: str) -> None:
    sys.stderr.write(message.rstrip("\n") + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    """
    Точка входа CLI.

    :param argv: Аргументы командной строки (по умолчанию sys.argv[1:])
    :return: Код выхода: 0 - успех, 1 - численная ошибка, 2 - ошибка использования или валидации
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        job = build_job(args)
        init_container()
        result = get_pipeline(job.command).run(job)
    except ValidationError as e:
        fields = ", ".join(".".join(str(part) for part in err["loc"]) or "<root>" for err in e.errors())
        _report(f"ptorus: ошибка валидации ({e.error_count()}): {fields}")
        return 2
    except UsageError as e:
        _report(f"ptorus: ошибка использования: {e}")
        return 2
    except NumericalError as e:
        slope = getattr(e, "slope", None)
        where = f" [наклон {slope}]" if slope else ""
        _report(f"ptorus: численная ошибка {e.__class__.__name__}{where}: {e}")
        return 1
    except Exception as e:
        logger.exception(f"Непредвиденная ошибка: {e}")
        if app_settings.debug:
            raise
        _report(f"ptorus: внутренняя ошибка {e.__class__.__name__}: {e}")
        return 1

    _report(f"{job.command.value}: {result.summary}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
