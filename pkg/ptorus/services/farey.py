# ptorus/services/farey.py

from typing import Dict, Iterator, List, Optional, Tuple

from ptorus.adapters.exceptions import InconsistentBase
from ptorus.config import numeric_settings
from ptorus.domain.models.markov import INFINITE_SLOPE, FareySlope, FareyWord, TraceTriple

# Соглашение о словах: 1/0 -> alpha, n/1 -> alpha^{-n} beta, медианта -> W_L * W_R
# (L, R - соседи по дереву Штерна–Броко внутри [n, n+1]).

ZERO_SLOPE = FareySlope(p=0, q=1)
ONE_SLOPE = FareySlope(p=1, q=1)


def mediant(left: FareySlope, right: FareySlope) -> FareySlope:
    return FareySlope(p=left.p + right.p, q=left.q + right.q)


def stern_brocot_path(slope: FareySlope) -> Tuple[int, str]:
    """
    Путь спуска к наклону p/q (q >= 2) от пары (n/1, (n+1)/1), n = floor(p/q).

    :param slope: Наклон
    :return: (n, строка направлений 'L'/'R'); для целых и 1/0 путь пуст
    """
    if slope.q <= 1:
        return (slope.p if slope.q == 1 else 0), ""
    n = slope.p // slope.q
    lp, lq, rp, rq = n, 1, n + 1, 1
    steps: List[str] = []
    while True:
        mp, mq = lp + rp, lq + rq
        cmp = slope.p * mq - mp * slope.q
        if cmp == 0:
            return n, "".join(steps)
        if cmp < 0:
            steps.append("L")
            rp, rq = mp, mq
        else:
            steps.append("R")
            lp, lq = mp, mq


def _descend(slope: FareySlope) -> Iterator[Tuple[str, FareySlope, FareySlope, FareySlope]]:
    """Состояния спуска: (направление, L, R, медианта) до самого наклона включительно."""
    n, path = stern_brocot_path(slope)
    left, right = FareySlope(p=n, q=1), FareySlope(p=n + 1, q=1)
    for direction in path + "=":
        mid = mediant(left, right)
        yield direction, left, right, mid
        if direction == "L":
            right = mid
        elif direction == "R":
            left = mid


def farey_parents(slope: FareySlope) -> Optional[Tuple[FareySlope, FareySlope]]:
    """
    Родители наклона в дереве Штерна–Броко (медиантой которых он является).
    Для 1/0 и 0/1 родителей нет.
    """
    if slope.is_infinity or (slope.q == 1 and slope.p == 0):
        return None
    if slope.q == 1:
        step = -1 if slope.p > 0 else 1
        return FareySlope(p=slope.p + step, q=1), INFINITE_SLOPE
    *_, (_, left, right, _) = _descend(slope)
    return left, right


def farey_neighbors(slope: FareySlope) -> List[FareySlope]:
    """Родители наклона и две медианты с ними (все соседи по графу Фарея)."""
    if slope.is_infinity:
        return [FareySlope(p=-1, q=1), ZERO_SLOPE, ONE_SLOPE]
    parents = farey_parents(slope)
    if parents is None:
        return [INFINITE_SLOPE, FareySlope(p=-1, q=1), ONE_SLOPE]
    left, right = parents
    result = [left, right]
    for other in (left, right):
        result.append(FareySlope.of(slope.p + other.p, slope.q + other.q))
    return result


def _integer_word(n: int) -> FareyWord:
    return FareyWord(letters=("A",) * n + ("b",) if n >= 0 else ("a",) * (-n) + ("b",))


def farey_word(slope: FareySlope) -> FareyWord:
    """
    Слово W_s: 1/0 -> alpha, 0/1 -> beta, 1/1 -> alpha^-1 beta, медианты склеиваются слева направо.
    Абелианизация W_{p/q} равна (-p, q).
    """
    if slope.is_infinity:
        return FareyWord(letters=("a",))
    if slope.q == 1:
        return _integer_word(slope.p)
    n, _ = stern_brocot_path(slope)
    w_left, w_right = _integer_word(n), _integer_word(n + 1)
    for direction, _, _, _ in _descend(slope):
        w_mid = w_left * w_right
        if direction == "=":
            return w_mid
        if direction == "L":
            w_right = w_mid
        else:
            w_left = w_mid
    raise AssertionError("unreachable")


def markov_residual(t: TraceTriple) -> complex:
    """x^2 + y^2 + z^2 - xyz."""
    return t.x * t.x + t.y * t.y + t.z * t.z - t.x * t.y * t.z


class FareyTraceTable:
    """
    Следы (и производные по параметру) слов Фарея одного представления.
    Значения кэшируются по наклону в пределах одного обхода.
    """

    def __init__(
        self,
        base: TraceTriple,
        derivative: Optional[TraceTriple] = None,
        check: bool = True,
        tol: Optional[float] = None,
    ):
        """
        :param base: Следы на 1/0, 0/1, 1/1
        :param derivative: Производные базовых следов по параметру (для метода Ньютона)
        :param check: Проверять соотношение Маркова
        :param tol: Относительный допуск невязки Маркова
        """
        if check:
            tol = numeric_settings.markov_tol if tol is None else tol
            scale = max(1.0, abs(base.x) ** 2 + abs(base.y) ** 2 + abs(base.z) ** 2)
            residual = markov_residual(base)
            if abs(residual) > tol * scale:
                raise InconsistentBase(f"Невязка Маркова {abs(residual):.3e} превышает допуск")
        self.x = base.x
        self.dx = derivative.x if derivative else 0j
        self._memo: Dict[Tuple[int, int], Tuple[complex, complex]] = {
            (1, 0): (base.x, derivative.x if derivative else 0j),
            (0, 1): (base.y, derivative.y if derivative else 0j),
            (1, 1): (base.z, derivative.z if derivative else 0j),
        }

    def _integer(self, n: int) -> Tuple[complex, complex]:
        key = (n, 1)
        if key in self._memo:
            return self._memo[key]
        x, dx = self.x, self.dx
        if n > 1:
            prev, cur = self._memo[(0, 1)], self._memo[(1, 1)]
            for k in range(2, n + 1):
                nxt = (x * cur[0] - prev[0], dx * cur[0] + x * cur[1] - prev[1])
                self._memo.setdefault((k, 1), nxt)
                prev, cur = cur, nxt
        else:
            nxt_, cur = self._memo[(1, 1)], self._memo[(0, 1)]
            for k in range(-1, n - 1, -1):
                prev = (x * cur[0] - nxt_[0], dx * cur[0] + x * cur[1] - nxt_[1])
                self._memo.setdefault((k, 1), prev)
                nxt_, cur = cur, prev
        return self._memo[key]

    def trace_with_derivative(self, slope: FareySlope) -> Tuple[complex, complex]:
        """След W_s и его производная по параметру."""
        key = (slope.p, slope.q)
        if key in self._memo:
            return self._memo[key]
        if slope.q == 1:
            return self._integer(slope.p)
        n, _ = stern_brocot_path(slope)
        t_left, t_right = self._integer(n), self._integer(n + 1)
        t_other = self._memo[(1, 0)]
        for direction, _, _, mid in _descend(slope):
            mid_key = (mid.p, mid.q)
            t_mid = self._memo.get(mid_key)
            if t_mid is None:
                t_mid = (
                    t_left[0] * t_right[0] - t_other[0],
                    t_left[1] * t_right[0] + t_left[0] * t_right[1] - t_other[1],
                )
                self._memo[mid_key] = t_mid
            if direction == "=":
                return t_mid
            if direction == "L":
                t_left, t_right, t_other = t_left, t_mid, t_right
            else:
                t_left, t_right, t_other = t_mid, t_right, t_left
        raise AssertionError("unreachable")

    def trace(self, slope: FareySlope) -> complex:
        return self.trace_with_derivative(slope)[0]


def trace_of_slope(base: TraceTriple, slope: FareySlope) -> complex:
    """
    След слова W_s через соотношение вершин дерева Фарея tr_{a+b} = tr_a tr_b - tr_{a-b}.

    :param base: Согласованная тройка (tr_{1/0}, tr_{0/1}, tr_{1/1})
    :param slope: Наклон
    :return: tr W_s
    :raises InconsistentBase: если невязка Маркова не мала
    """
    return FareyTraceTable(base).trace(slope)
