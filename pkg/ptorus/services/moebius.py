# ptorus/services/moebius.py

import cmath
import math
from typing import List, Optional

import numpy as np

from ptorus.adapters.exceptions import IdentityMap, NotInUpperHalfPlane, NotLoxodromic
from ptorus.config import numeric_settings
from ptorus.domain.enums import IsometryClass
from ptorus.domain.models.moebius import INFINITY, MoebiusMap, RiemannPoint, matrix_distance


# ── конструкторы ──────────────────────────────────────────────────────────────
def identity_map() -> MoebiusMap:
    return MoebiusMap(np.eye(2), normalize=False)


def translation(z: complex) -> MoebiusMap:
    """T_z: w -> w + z."""
    return MoebiusMap([[1, z], [0, 1]], normalize=False)


def maskit_generator(mu: complex) -> MoebiusMap:
    """U_mu = [[i*mu, i], [i, 0]], определитель равен 1 при любом mu."""
    return MoebiusMap([[1j * mu, 1j], [1j, 0]], normalize=False)


def diagonal(k: complex) -> MoebiusMap:
    """diag(k, 1/k): w -> k^2 w."""
    return MoebiusMap([[k, 0], [0, 1 / k]], normalize=False)


def compose(f: MoebiusMap, g: MoebiusMap) -> MoebiusMap:
    """Композиция f∘g: произведение матриц с перенормировкой det = 1."""
    return f @ g


def is_identity(f: MoebiusMap, tol: Optional[float] = None) -> bool:
    tol = numeric_settings.parabolic_tol if tol is None else tol
    return matrix_distance(f, identity_map()) <= tol


def classify(f: MoebiusMap, tol: Optional[float] = None) -> IsometryClass:
    """
    Классификация по tr^2: 4 -> параболический или тождество, вещественный в [0, 4) -> эллиптический,
    иначе локсодромический. Не зависит от выбора знака матрицы.

    :param f: Отображение
    :param tol: Допуск на |tr^2 - 4| (по умолчанию parabolic_tol)
    :return: IsometryClass
    """
    tol = numeric_settings.parabolic_tol if tol is None else tol
    t2 = f.trace ** 2
    if abs(t2 - 4) < tol:
        return IsometryClass.IDENTITY if is_identity(f, tol) else IsometryClass.PARABOLIC
    if abs(t2.imag) < tol and 0 <= t2.real < 4:
        return IsometryClass.ELLIPTIC
    return IsometryClass.LOXODROMIC


def fixed_points(f: MoebiusMap, tol: Optional[float] = None) -> List[RiemannPoint]:
    """
    Неподвижные точки: корни cz^2 + (d - a)z - b = 0 на сфере Римана.
    Для параболических отображений корень один.

    :param f: Отображение, отличное от тождественного
    :return: Одна или две точки
    :raises IdentityMap: для тождественного отображения
    """
    tol = numeric_settings.parabolic_tol if tol is None else tol
    if is_identity(f, tol):
        raise IdentityMap("Тождественное отображение фиксирует все точки")
    a, b, c, d = f.a, f.b, f.c, f.d
    small = numeric_settings.det_tol
    if abs(c) <= small:
        if abs(d - a) <= small:
            return [INFINITY]
        return [INFINITY, RiemannPoint.finite(b / (d - a))]
    disc = f.trace ** 2 - 4
    if abs(disc) < tol:
        return [RiemannPoint.finite((a - d) / (2 * c))]
    root = cmath.sqrt(disc)
    return [
        RiemannPoint.finite(((a - d) - root) / (2 * c)),
        RiemannPoint.finite(((a - d) + root) / (2 * c)),
    ]


def complex_translation_length(f: MoebiusMap, tol: Optional[float] = None) -> complex:
    """
    Комплексная длина сдвига lambda = l + i*theta: логарифм производной в отталкивающей неподвижной точке.
    l > 0, theta в (-pi, pi].

    :param f: Локсодромическое отображение
    :return: lambda
    :raises NotLoxodromic: для тождественного, параболического и эллиптического
    """
    kind = classify(f, tol)
    if kind != IsometryClass.LOXODROMIC:
        raise NotLoxodromic(f"Отображение {kind.value}, длина сдвига не определена")
    a, d = f.a, f.d
    points = fixed_points(f, tol)
    derivative: Optional[complex] = None
    for point in points:
        if point.is_infinity:
            # в карте w = 1/z: производная в ∞ равна d/a
            candidate = d / a
        else:
            candidate = f.derivative_at(point.value)
        if abs(candidate) > 1:
            derivative = candidate
    if derivative is None:
        derivative = f.multiplier()
    lam = cmath.log(derivative)
    if lam.imag == -math.pi:
        lam = complex(lam.real, math.pi)
    return lam


def hyperbolic_distance(z: complex, w: complex) -> float:
    """
    Гиперболическое расстояние в верхней полуплоскости: cosh d = 1 + |z - w|^2 / (2 Im z Im w).

    :raises NotInUpperHalfPlane: если Im z <= 0 или Im w <= 0
    """
    if z.imag <= 0 or w.imag <= 0:
        raise NotInUpperHalfPlane(f"Точки должны лежать в H: {z}, {w}")
    return 2.0 * math.asinh(abs(z - w) / (2.0 * math.sqrt(z.imag * w.imag)))


def commutator(f: MoebiusMap, g: MoebiusMap) -> MoebiusMap:
    """[f, g] = f g f^-1 g^-1."""
    return f @ g @ f.inverse() @ g.inverse()
