# ptorus/domain/models/moebius.py

from __future__ import annotations

import cmath
from typing import Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from ptorus.adapters.exceptions import SingularMatrix
from ptorus.config import numeric_settings

_EPS = float(np.finfo(float).eps)


class RiemannPoint(BaseModel):
    """Точка сферы Римана: комплексное число или бесконечность (value=None)."""
    model_config = ConfigDict(frozen=True)

    value: Optional[complex] = None  # None означает точку ∞

    @classmethod
    def finite(cls, z: Union[complex, float]) -> "RiemannPoint":
        return cls(value=complex(z))

    @classmethod
    def infinity(cls) -> "RiemannPoint":
        return cls(value=None)

    @property
    def is_infinity(self) -> bool:
        return self.value is None

    def __repr__(self) -> str:
        return "RiemannPoint(∞)" if self.is_infinity else f"RiemannPoint({self.value!r})"


INFINITY = RiemannPoint.infinity()


class MoebiusMap:
    """
    Проективная матрица 2x2 над C с определителем 1.
    Неизменяемая: матрица хранится как read-only массив numpy, M и -M задают одно отображение.
    """

    __slots__ = ("_m",)

    def __init__(self, matrix, normalize: bool = True):
        # явная матрица приводится к det = 1; произведения идут через from_product
        m = np.array(matrix, dtype=np.complex128).reshape(2, 2)
        if normalize:
            det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
            if det == 0:
                raise SingularMatrix(f"Нулевой определитель: {m.tolist()}")
            m = m / cmath.sqrt(det)
        m.setflags(write=False)
        self._m = m

    @classmethod
    def from_product(cls, m: np.ndarray) -> "MoebiusMap":
        """Произведение матриц с определителем 1: перенормировка без исключений, см. _renormalize."""
        return cls(_renormalize(np.asarray(m, dtype=np.complex128)), normalize=False)

    # ── элементы матрицы ───────────────────────────────────────────────────────
    @property
    def a(self) -> complex:
        return complex(self._m[0, 0])

    @property
    def b(self) -> complex:
        return complex(self._m[0, 1])

    @property
    def c(self) -> complex:
        return complex(self._m[1, 0])

    @property
    def d(self) -> complex:
        return complex(self._m[1, 1])

    @property
    def matrix(self) -> np.ndarray:
        return self._m

    @property
    def trace(self) -> complex:
        return complex(self._m[0, 0] + self._m[1, 1])

    @property
    def det(self) -> complex:
        m = self._m
        return complex(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])

    # ── групповые операции ─────────────────────────────────────────────────────
    def __matmul__(self, other: "MoebiusMap") -> "MoebiusMap":
        return MoebiusMap.from_product(self._m @ other._m)

    def inverse(self) -> "MoebiusMap":
        m = self._m
        return MoebiusMap([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]], normalize=False)

    def power(self, k: int) -> "MoebiusMap":
        """
        Степень k (k может быть отрицательным) бинарным возведением с проверкой определителя на каждом шаге.

        :param k: Показатель
        :return: Отображение f^k
        """
        base = self if k >= 0 else self.inverse()
        k = abs(int(k))
        result = np.eye(2, dtype=np.complex128)
        acc = base._m.copy()
        while k:
            if k & 1:
                result = _renormalize(result @ acc)
            k >>= 1
            if k:
                acc = _renormalize(acc @ acc)
        return MoebiusMap.from_product(result)

    def sign_normalized(self) -> "MoebiusMap":
        """Представитель с Re tr >= 0 (при нулевом следе: первый ненулевой элемент в правой полуплоскости)."""
        t = self.trace
        if t != 0:
            flip = t.real < 0 or (t.real == 0 and t.imag < 0)
        else:
            lead = next((complex(e) for e in self._m.ravel() if e != 0), 1 + 0j)
            flip = lead.real < 0 or (lead.real == 0 and lead.imag < 0)
        return MoebiusMap(-self._m, normalize=False) if flip else self

    # ── действие на сфере Римана ───────────────────────────────────────────────
    def apply(self, point: Union[RiemannPoint, complex]) -> RiemannPoint:
        """
        Образ точки сферы Римана. Случаи c = 0 и z = ∞ разобраны явно.

        :param point: RiemannPoint или комплексное число
        :return: Образ точки
        """
        if not isinstance(point, RiemannPoint):
            point = RiemannPoint.finite(point)
        a, b, c, d = self.a, self.b, self.c, self.d
        if point.is_infinity:
            if c == 0:
                return INFINITY
            return RiemannPoint.finite(a / c)
        z = point.value
        denom = c * z + d
        if denom == 0:
            return INFINITY
        return RiemannPoint.finite((a * z + b) / denom)

    def derivative_at(self, z: complex) -> complex:
        """Производная f'(z) = 1/(cz+d)^2 в конечной точке z."""
        denom = self.c * z + self.d
        if denom == 0:
            return complex("inf")
        return 1.0 / (denom * denom)

    def multiplier(self) -> complex:
        """Отношение собственных значений lambda1/lambda2 с |lambda1| >= |lambda2|."""
        t = self.trace
        root = cmath.sqrt(t * t - 4)
        l1, l2 = (t + root) / 2, (t - root) / 2
        if abs(l1) < abs(l2):
            l1, l2 = l2, l1
        return l1 / l2

    # ── сравнение ─────────────────────────────────────────────────────────────
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MoebiusMap):
            return NotImplemented
        return bool(np.array_equal(self._m, other._m) or np.array_equal(self._m, -other._m))

    def __hash__(self) -> int:
        return hash(self.sign_normalized()._m.tobytes())

    def isclose(self, other: "MoebiusMap", tol: float = 1e-12) -> bool:
        """Проективное равенство с допуском по метрике Фробениуса."""
        return matrix_distance(self, other) <= tol

    def __repr__(self) -> str:
        return f"MoebiusMap({self._m.tolist()})"


def _renormalize(m: np.ndarray) -> np.ndarray:
    """
    Делит на sqrt(det), только если отклонение det от 1 больше det_tol и различимо
    на фоне ошибки округления в ad - bc. При больших элементах det не вычислим точно, матрица не меняется.
    """
    ad = m[0, 0] * m[1, 1]
    bc = m[0, 1] * m[1, 0]
    det = ad - bc
    noise = 8 * _EPS * (abs(ad) + abs(bc))
    if det == 0 or abs(det - 1) <= max(numeric_settings.det_tol, noise):
        return m
    return m / np.sqrt(det)


def matrix_distance(f: MoebiusMap, g: MoebiusMap) -> float:
    """
    Расстояние Фробениуса между проективными классами.
    Оба представителя нормализованы по знаку следа; из g и -g берётся ближайший.

    :param f: Первое отображение
    :param g: Второе отображение
    :return: Неотрицательное расстояние
    """
    fm = f.sign_normalized().matrix
    gm = g.sign_normalized().matrix
    return float(min(np.linalg.norm(fm - gm), np.linalg.norm(fm + gm)))
