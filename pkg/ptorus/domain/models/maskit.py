# ptorus/domain/models/maskit.py

from typing import List, Literal, Optional

from pydantic import BaseModel

from ptorus.domain.enums import BowditchVerdictKind, MembershipVerdict
from ptorus.domain.models.markov import FareySlope
from ptorus.domain.models.types import ComplexValue


class CuspPoint(BaseModel):
    """Точка каспа на границе слайса Маскита: tr W_s(mu) = trace_sign."""
    slope: FareySlope
    mu: ComplexValue
    trace_sign: Literal[-2, 2]
    residual: float = 0.0  # |tr_s(mu) - trace_sign|
    iterations: int = 0  # итерации Ньютона
    via_ray: bool = False  # корень найден через продолжение вдоль луча


class BoundaryTrace(BaseModel):
    """Упорядоченный список касп p/q, 0 <= p/q < 1, q <= q_max."""
    q_max: int
    cusps: List[CuspPoint]  # отсортированы по значению наклона
    min_im: float

    @property
    def min_cusp(self) -> Optional[CuspPoint]:
        return min(self.cusps, key=lambda c: c.mu.imag) if self.cusps else None


class MembershipReport(BaseModel):
    """Трёхзначный ответ о принадлежности mu слайсу M с обоснованием."""
    mu: ComplexValue
    verdict: MembershipVerdict
    bowditch: Optional[BowditchVerdictKind] = None
    boundary_im: Optional[float] = None  # высота трассированной границы над Re mu
    reason: str = ""
