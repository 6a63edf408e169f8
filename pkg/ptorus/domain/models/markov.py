# ptorus/domain/models/markov.py

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from ptorus.domain.enums import BowditchVerdictKind
from ptorus.domain.models.moebius import MoebiusMap

# Буквы слов: a = alpha, A = alpha^-1, b = beta, B = beta^-1
LETTERS = ("a", "A", "b", "B")
_INVERSE_LETTER = {"a": "A", "A": "a", "b": "B", "B": "b"}


class FareySlope(BaseModel):
    """Наклон p/q простой замкнутой кривой; 1/0 = ∞."""
    model_config = ConfigDict(frozen=True)

    p: int  # числитель
    q: int  # знаменатель, q >= 0

    @model_validator(mode="after")
    def _check_reduced(self) -> "FareySlope":
        if self.q < 0:
            raise ValueError("Знаменатель наклона должен быть неотрицательным")
        if gcd(abs(self.p), self.q) != 1:
            raise ValueError(f"Наклон {self.p}/{self.q} не несократим")
        if self.q == 0 and self.p != 1:
            raise ValueError("Единственный наклон со знаменателем 0: 1/0")
        return self

    @classmethod
    def of(cls, p: int, q: int) -> "FareySlope":
        """Нормализует знаки и сокращает: of(-2, -4) = 1/2, of(-1, 0) = 1/0."""
        if p == 0 and q == 0:
            raise ValueError("Нулевой вектор не задаёт наклон")
        g = gcd(abs(p), abs(q))
        p, q = p // g, q // g
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        return cls(p=p, q=q)

    @classmethod
    def parse(cls, text: str) -> "FareySlope":
        """Разбирает строку вида 'P/Q', 'P' или 'inf'."""
        raw = text.strip()
        if raw.lower() in ("inf", "∞", "infinity"):
            return cls(p=1, q=0)
        if "/" in raw:
            num, den = raw.split("/", 1)
            return cls.of(int(num), int(den))
        return cls.of(int(raw), 1)

    @property
    def is_infinity(self) -> bool:
        return self.q == 0

    @property
    def value(self) -> Optional[Fraction]:
        return None if self.is_infinity else Fraction(self.p, self.q)

    def shifted(self, k: int) -> "FareySlope":
        """Наклон p/q + k (действие скручивания на наклонах)."""
        if self.is_infinity:
            return self
        return FareySlope(p=self.p + k * self.q, q=self.q)

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"


INFINITE_SLOPE = FareySlope(p=1, q=0)


class FareyWord(BaseModel):
    """Свободно несократимое слово в буквах alpha^{±1}, beta^{±1}."""
    model_config = ConfigDict(frozen=True)

    letters: Tuple[str, ...] = ()

    @field_validator("letters")
    @classmethod
    def _check_letters(cls, value: Tuple[str, ...]) -> Tuple[str, ...]:
        for i, letter in enumerate(value):
            if letter not in LETTERS:
                raise ValueError(f"Неизвестная буква: {letter!r}")
            if i and _INVERSE_LETTER[letter] == value[i - 1]:
                raise ValueError("Слово не является несократимым")
        return value

    @classmethod
    def from_string(cls, text: str) -> "FareyWord":
        return cls.reduce(tuple(text))

    @classmethod
    def reduce(cls, letters: Tuple[str, ...]) -> "FareyWord":
        stack: List[str] = []
        for letter in letters:
            if stack and stack[-1] == _INVERSE_LETTER[letter]:
                stack.pop()
            else:
                stack.append(letter)
        return cls(letters=tuple(stack))

    def __mul__(self, other: "FareyWord") -> "FareyWord":
        return FareyWord.reduce(self.letters + other.letters)

    def inverse(self) -> "FareyWord":
        return FareyWord(letters=tuple(_INVERSE_LETTER[x] for x in reversed(self.letters)))

    def abelianization(self) -> Tuple[int, int]:
        """Класс в H_1: (показатель alpha, показатель beta)."""
        ea = sum(1 if x == "a" else -1 for x in self.letters if x in "aA")
        eb = sum(1 if x == "b" else -1 for x in self.letters if x in "bB")
        return ea, eb

    @property
    def is_cyclically_reduced(self) -> bool:
        if len(self.letters) < 2:
            return True
        return _INVERSE_LETTER[self.letters[0]] != self.letters[-1]

    def __str__(self) -> str:
        return "".join(self.letters)

    def __len__(self) -> int:
        return len(self.letters)


class TraceTriple(BaseModel):
    """Следы на наклонах 1/0, 0/1, 1/1: (tr A, tr B, tr A^-1 B)."""
    model_config = ConfigDict(frozen=True)

    x: complex  # tr_{1/0}
    y: complex  # tr_{0/1}
    z: complex  # tr_{1/1}


class Representation(BaseModel):
    """Пара образующих (A, B) = (rho(alpha), rho(beta))."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    A: MoebiusMap
    B: MoebiusMap

    def conjugate(self, g: MoebiusMap) -> "Representation":
        g_inv = g.inverse()
        return Representation(A=g @ self.A @ g_inv, B=g @ self.B @ g_inv)


class BowditchVerdict(BaseModel):
    """Результат поиска по дереву Фарея."""
    kind: BowditchVerdictKind
    witness: List[FareySlope] = []  # путь наклонов от стока до региона-свидетеля
    reason: str = ""
    regions_visited: int = 0


class ShimizuReport(BaseModel):
    """Проверка Шимизу–Лейтбехера для групп с трансляцией T_2."""
    applicable: bool  # первая образующая равна T_2
    words_checked: int = 0
    violation: Optional[str] = None  # слово с 0 < |c| < 1/2
    min_abs_c: Optional[float] = None  # наименьшее ненулевое |c| среди слов
