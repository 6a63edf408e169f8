# ptorus/utils/parallel.py

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from ptorus.config import runtime_settings

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(workers: Optional[int] = None) -> int:
    """Число воркеров: явное значение или PTORUS_WORKERS."""
    value = workers if workers is not None else runtime_settings.workers
    return max(1, int(value))


def parallel_map(fn: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> List[R]:
    """
    Применяет fn к элементам с сохранением порядка. При одном воркере работает последовательно.
    fn должна быть функцией уровня модуля (её передают в дочерние процессы).

    :param fn: Функция одного аргумента
    :param items: Входные элементы
    :param workers: Число процессов (по умолчанию из настроек)
    :return: Результаты в порядке входа
    """
    items = list(items)
    n = resolve_workers(workers)
    if n == 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))
