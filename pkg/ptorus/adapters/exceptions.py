# ptorus/adapters/exceptions.py

from typing import Optional


class PtorusError(Exception):
    """Базовое исключение библиотеки."""
    exit_code = 1


class NumericalError(PtorusError):
    """Численная ошибка: вычисление не может дать корректный результат (код выхода 1)."""
    exit_code = 1


class NotLoxodromic(NumericalError):
    """Комплексная длина сдвига определена только для локсодромических элементов."""


class IdentityMap(NumericalError):
    """Тождественное отображение не имеет выделенных неподвижных точек."""


class NotInUpperHalfPlane(NumericalError):
    """Точка не лежит в верхней полуплоскости."""


class InconsistentBase(NumericalError):
    """Базовая тройка следов не удовлетворяет соотношению Маркова."""


class ElementaryPair(NumericalError):
    """Пара порождает элементарную группу (общая неподвижная точка или тождество)."""


class NewtonDiverged(NumericalError):
    """Метод Ньютона не сошёлся для наклона."""

    def __init__(self, message: str, slope: Optional[str] = None):
        super().__init__(message)
        self.slope = slope


class NoUpperHalfPlaneRoot(NumericalError):
    """Найденный корень не лежит в верхней полуплоскости."""

    def __init__(self, message: str, slope: Optional[str] = None):
        super().__init__(message)
        self.slope = slope


class ZeroMultiplier(NumericalError):
    """Нулевая комплексная длина (параболический элемент)."""


class DegenerateTarget(NumericalError):
    """Вырожденный целевой сдвиг w = 0."""


class NonCommuting(NumericalError):
    """Элементы не коммутируют."""


class NotParabolic(NumericalError):
    """Элемент не параболический."""


class RadiusMismatch(NumericalError):
    """Снимки шаров построены для разных радиусов."""


class EmptyOutput(NumericalError):
    """В окне отрисовки нет ни одной точки."""

    def __init__(self, message: str, degenerate: bool = False):
        super().__init__(message)
        self.degenerate = degenerate


class NotConvergingToInfinity(NumericalError):
    """Последовательность не стремится к бесконечности."""


class WrongCloudTag(NumericalError):
    """Облако точек имеет неподходящий тег."""


class UsageError(PtorusError):
    """Ошибка использования: неверные аргументы или конфигурация (код выхода 2)."""
    exit_code = 2


class SpecLoadError(UsageError):
    """Не удалось прочитать или разобрать входной документ."""


class SingularMatrix(NumericalError):
    """Матрица с нулевым определителем не задаёт преобразование Мёбиуса."""
