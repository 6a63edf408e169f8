# ptorus/domain/models/geometry.py

import cmath
import math
import sys
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from ptorus.domain.models.moebius import MoebiusMap
from ptorus.domain.models.sequences import AffineSequence, IntegerSequenceSpec, sequence_value
from ptorus.domain.models.types import ComplexValue

_EPS = sys.float_info.epsilon
_MULTIPLIER_MAX_ITER = 30


class SyntheticFamily(BaseModel):
    """
    Модельное семейство A_n(z) = e^{lambda_n} z + 2, lambda_n = (2*pi*i + 2*x_n) / m_n.
    В главном порядке x_n = pi*i*w / (2 m_n), т.е. lambda_n = (2*pi*i + pi*i*w/m_n) / m_n;
    x_n уточняется так, что сдвиг нормированной матрицы A_n^{m_n} равен w в точности.
    Степени A_n^{m_n} сходятся к трансляции T_w, сами A_n сходятся к T_2.
    """
    w: ComplexValue
    m: IntegerSequenceSpec = AffineSequence(a=1, b=0)

    def m_at(self, n: int) -> int:
        value = sequence_value(self.m, n)
        if value == 0:
            raise ValueError(f"m_{n} = 0")
        return value

    def multiplier(self, n: int) -> complex:
        """
        Комплексная длина lambda_n. Уравнение на x: sinh x = w (e^lambda - 1) / 4
        (элемент b матрицы A^m при mlambda/2 = pi*i + x), решается Ньютоном от главного порядка.
        """
        m = self.m_at(n)
        w = complex(self.w)
        x = 1j * math.pi * w / (2 * m)
        for _ in range(_MULTIPLIER_MAX_ITER):
            growth = cmath.exp((2j * math.pi + 2 * x) / m)
            g = cmath.sinh(x) - w * (growth - 1) / 4
            dg = cmath.cosh(x) - w * growth / (2 * m)
            step = g / dg
            x -= step
            if abs(step) <= 4 * _EPS * max(abs(x), _EPS):
                break
        return (2j * math.pi + 2 * x) / m

    def member(self, n: int) -> MoebiusMap:
        lam = self.multiplier(n)
        half = cmath.exp(lam / 2)
        return MoebiusMap([[half, 2 / half], [0, 1 / half]], normalize=False)


class BallElement(BaseModel):
    """Элемент шара: отображение и его метка (a, b) для delta_hat^a delta^b."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    label: Tuple[int, int]
    element: MoebiusMap
    norm: float  # расстояние до тождества


class GroupBallSnapshot(BaseModel):
    """Элементы группы на расстоянии не больше radius от тождества."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    radius: float = Field(ge=0)
    elements: List[BallElement]

    @field_validator("elements")
    @classmethod
    def _unique_labels(cls, value: List[BallElement]) -> List[BallElement]:
        labels = [e.label for e in value]
        if len(labels) != len(set(labels)):
            raise ValueError("Метки элементов шара должны быть уникальны")
        return value

    def __len__(self) -> int:
        return len(self.elements)


class PowerLimitRow(BaseModel):
    """Строка таблицы сходимости степеней A_n^{m_n} -> T_w."""
    n: int
    m_n: int
    lam: ComplexValue
    residual: float  # ||A_n^{m_n} - T_w||_F
    relative_residual: float  # residual / ||T_w||_F


class PowerLimitTable(BaseModel):
    w: ComplexValue
    rows: List[PowerLimitRow]
    horocyclic_multipliers: bool  # хвост lambda_n в круге |z - eps| <= eps

    @property
    def ratios(self) -> List[float]:
        rel = [r.relative_residual for r in self.rows]
        return [b / a for a, b in zip(rel, rel[1:]) if a > 0]


class GeomCheckRow(BaseModel):
    """Условия геометрической сходимости для одного n."""
    n: int
    m_n: int
    sup_residual: float = Field(ge=0)  # условие 1, относительная невязка
    sup_residual_abs: float = Field(ge=0)
    spurious_margin: float = Field(ge=0)  # условие 2, худшее удаление от решётки
    exponents_scanned: int
    widened: bool = False


class GeomConvergenceReport(BaseModel):
    """Отчёт о сходимости циклических групп <A_n> к решётке <T_2, T_w>."""
    w: ComplexValue
    radius: float
    rank: int
    rows: List[GeomCheckRow]
    trend_decreasing: bool
    converging: bool
    note: str = ""


class DrilledGroup(BaseModel):
    """Порождающие (T_2, U_mu, U_nu_bar) и параболическая пара (T_2, T_{mu - nu_bar})."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    mu: ComplexValue
    nu: ComplexValue
    generators: Tuple[MoebiusMap, MoebiusMap, MoebiusMap]
    cusp_pair: Tuple[MoebiusMap, MoebiusMap]

    @property
    def cusp_translation(self) -> complex:
        return self.mu - self.nu.conjugate()


class LimitRepresentation(BaseModel):
    """Предельная пара (T_2, T_{mu - nu_bar}^p T_2^q U_mu) и её совпадение с (T_2, U_xi)."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    p: int
    q: int
    xi: ComplexValue
    generators: Tuple[MoebiusMap, MoebiusMap]
    residual: float
    matches: bool
    note: Optional[str] = None
