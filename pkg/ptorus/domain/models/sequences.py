# ptorus/domain/models/sequences.py

from __future__ import annotations

from math import gcd
from typing import Annotated, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ptorus.domain.enums import DivergenceReason, VerdictKind
from ptorus.domain.models.types import ComplexValue


class QuasiPolynomial(BaseModel):
    """
    Нормальная форма целочисленной последовательности: многочлен + периодическая добавка, начиная с n >= start.
    """
    model_config = ConfigDict(frozen=True)

    poly: Tuple[int, ...] = (0,)  # коэффициенты c0 + c1 n + c2 n^2 + ...
    periodic: Tuple[int, ...] = (0,)  # добавка offsets[n mod period]
    start: int = 0

    @property
    def degree(self) -> int:
        nz = [i for i, c in enumerate(self.poly) if c != 0]
        return nz[-1] if nz else 0

    @property
    def period(self) -> int:
        return len(self.periodic)

    def coeff(self, j: int) -> int:
        return self.poly[j] if j < len(self.poly) else 0

    def constant_part(self, residue: int) -> int:
        """c0 + offsets[residue mod period]."""
        return self.coeff(0) + self.periodic[residue % self.period]

    def __call__(self, n: int) -> int:
        return sum(c * n ** i for i, c in enumerate(self.poly)) + self.periodic[n % self.period]

    @property
    def is_eventually_constant(self) -> bool:
        return self.degree == 0 and len(set(self.periodic)) == 1

    @property
    def is_bounded(self) -> bool:
        return self.degree == 0


class AffineSequence(BaseModel):
    """n -> a*n + b."""
    kind: Literal["affine"] = "affine"
    a: int
    b: int = 0

    def normalized(self) -> QuasiPolynomial:
        return QuasiPolynomial(poly=(self.b, self.a))


class PolynomialSequence(BaseModel):
    """n -> c0 + c1 n + c2 n^2 + ... (целые коэффициенты)."""
    kind: Literal["polynomial"] = "polynomial"
    coeffs: List[int] = Field(min_length=1)

    def normalized(self) -> QuasiPolynomial:
        return QuasiPolynomial(poly=tuple(self.coeffs))


class PeriodicOffsetSequence(BaseModel):
    """n -> a*n + b + offsets[n mod len(offsets)]."""
    kind: Literal["periodic_offset"] = "periodic_offset"
    a: int
    b: int = 0
    offsets: List[int] = Field(min_length=1)

    def normalized(self) -> QuasiPolynomial:
        return QuasiPolynomial(poly=(self.b, self.a), periodic=tuple(self.offsets))


TailRule = Annotated[Union[AffineSequence, PeriodicOffsetSequence], Field(discriminator="kind")]


class TableSequence(BaseModel):
    """Явные значения для n = 0..len-1, далее правило хвоста (affine или periodic_offset)."""
    kind: Literal["table"] = "table"
    values: List[int]
    tail: TailRule

    def normalized(self) -> QuasiPolynomial:
        q = self.tail.normalized()
        return QuasiPolynomial(poly=q.poly, periodic=q.periodic, start=len(self.values))

    def __call__(self, n: int) -> int:
        return self.values[n] if n < len(self.values) else self.tail.normalized()(n)


IntegerSequenceSpec = Annotated[
    Union[AffineSequence, PolynomialSequence, PeriodicOffsetSequence, TableSequence],
    Field(discriminator="kind"),
]


def sequence_value(spec: Union[AffineSequence, PolynomialSequence, PeriodicOffsetSequence, TableSequence], n: int) -> int:
    """Значение последовательности в точке n."""
    if isinstance(spec, TableSequence):
        return spec(n)
    return spec.normalized()(n)


class AffineEndpoint(BaseModel):
    """Явная последовательность x_n = a*n + b в замкнутой верхней полуплоскости."""
    kind: Literal["affine"] = "affine"
    a: ComplexValue
    b: ComplexValue = 0j


class InfinityEndpoint(BaseModel):
    """Постоянная последовательность x_n = ∞."""
    kind: Literal["infinity"] = "infinity"


EndpointSequence = Annotated[Union[AffineEndpoint, InfinityEndpoint], Field(discriminator="kind")]


class TwistSequenceSpec(BaseModel):
    """
    Описание пары последовательностей концевых инвариантов.
    Форма орбиты скручивания: x_n = u - k_n, y_n = v - l_n; явная форма: x, y.
    """
    name: Optional[str] = None
    u: ComplexValue = 0j  # предел u_n (конечная точка)
    v: ComplexValue = 0j  # предел v_n (конечная точка)
    k: Optional[IntegerSequenceSpec] = None
    l: Optional[IntegerSequenceSpec] = None
    x: Optional[EndpointSequence] = None
    y: Optional[EndpointSequence] = None
    mu: Optional[ComplexValue] = None  # m(u); заполняется каспой, если u рационально
    nu: Optional[ComplexValue] = None  # m(v)
    limit_point: Literal["infinity", "irrational"] = "infinity"

    @model_validator(mode="after")
    def _check_form(self) -> "TwistSequenceSpec":
        twist = self.k is not None or self.l is not None
        explicit = self.x is not None or self.y is not None
        if self.limit_point == "irrational":
            return self
        if twist and explicit:
            raise ValueError("Нельзя смешивать форму орбиты скручивания (k, l) и явную форму (x, y)")
        if twist and (self.k is None or self.l is None):
            raise ValueError("Для формы орбиты скручивания нужны обе последовательности k и l")
        if explicit and (self.x is None or self.y is None):
            raise ValueError("Для явной формы нужны обе последовательности x и y")
        if not twist and not explicit:
            raise ValueError("Нужна форма орбиты скручивания (k, l) или явная форма (x, y)")
        return self

    @property
    def is_twist_form(self) -> bool:
        return self.k is not None and self.l is not None


class SequenceBatch(BaseModel):
    """Входной документ команды seq classify."""
    specs: List[TwistSequenceSpec] = Field(min_length=1)


class SubsequenceLimit(BaseModel):
    """Предел вдоль класса вычетов n = residue (mod period)."""
    residue: int
    period: int
    p: Optional[int] = None
    q: Optional[int] = None
    xi: Optional[ComplexValue] = None


class ConvergenceVerdict(BaseModel):
    """Исход классификатора: тег вердикта, p, q, xi и причина."""
    name: Optional[str] = None
    kind: VerdictKind
    p: Optional[int] = None
    q: Optional[int] = None
    xi: Optional[ComplexValue] = None
    reason: Optional[DivergenceReason] = None
    note: str = ""
    subsequences: List[SubsequenceLimit] = []

    @model_validator(mode="after")
    def _exotic_p(self) -> "ConvergenceVerdict":
        if self.kind == VerdictKind.CONVERGES_EXOTIC and self.p in (0, -1):
            raise ValueError("Экзотический предел требует p не из {0, -1}")
        return self


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)
