# ptorus/services/markov.py

from typing import List, Optional, Tuple

import numpy as np

from ptorus.adapters.exceptions import ElementaryPair, IdentityMap
from ptorus.config import numeric_settings
from ptorus.domain.enums import FilterResult
from ptorus.domain.models.markov import FareyWord, Representation, ShimizuReport, TraceTriple
from ptorus.domain.models.moebius import MoebiusMap, RiemannPoint
from ptorus.services.moebius import commutator, fixed_points, is_identity, translation
from ptorus.utils.logging import setup_logger

# Настройка логгера
logger = setup_logger(__name__)


def commutator_trace(r: Representation) -> complex:
    """tr(A B A^-1 B^-1); для групп проколотого тора равен -2."""
    return commutator(r.A, r.B).trace


def trace_triple(r: Representation) -> TraceTriple:
    """Следы на наклонах 1/0, 0/1, 1/1: (tr A, tr B, tr A^-1 B)."""
    return TraceTriple(x=r.A.trace, y=r.B.trace, z=(r.A.inverse() @ r.B).trace)


def twist_action(r: Representation, k: int) -> Representation:
    """Скручивание Дена: (A, B) -> (A, A^k B)."""
    if k == 0:
        return r
    return Representation(A=r.A, B=r.A.power(k) @ r.B)


def word_matrix(r: Representation, word: FareyWord) -> MoebiusMap:
    """Образ слова при представлении."""
    letters = {"a": r.A, "A": r.A.inverse(), "b": r.B, "B": r.B.inverse()}
    m = np.eye(2, dtype=np.complex128)
    for letter in word.letters:
        m = m @ letters[letter].matrix
    return MoebiusMap.from_product(m)


def _same_point(p1: RiemannPoint, p2: RiemannPoint, tol: float) -> bool:
    if p1.is_infinity or p2.is_infinity:
        return p1.is_infinity and p2.is_infinity
    return abs(p1.value - p2.value) <= tol * max(1.0, abs(p1.value))


def jorgensen_value(r: Representation) -> float:
    """|tr^2 A - 4| + |tr[A,B] - 2|."""
    return abs(r.A.trace ** 2 - 4) + abs(commutator_trace(r) - 2)


def jorgensen_filter(r: Representation) -> FilterResult:
    """
    Необходимое условие дискретности Йоргенсена: |tr^2 A - 4| + |tr[A,B] - 2| >= 1.

    :param r: Неэлементарная пара
    :return: FilterResult.PASS или FilterResult.FAIL
    :raises ElementaryPair: если одна из образующих тождественна или у образующих общая неподвижная точка
    """
    tol = numeric_settings.parabolic_tol
    if is_identity(r.A) or is_identity(r.B):
        raise ElementaryPair("Одна из образующих тождественна")
    try:
        fa, fb = fixed_points(r.A), fixed_points(r.B)
    except IdentityMap as exc:
        raise ElementaryPair(str(exc)) from exc
    if any(_same_point(p, q, tol) for p in fa for q in fb):
        raise ElementaryPair("Образующие имеют общую неподвижную точку")
    value = jorgensen_value(r)
    logger.debug(f"Неравенство Йоргенсена: значение {value:.6g}")
    return FilterResult.PASS if value >= 1 else FilterResult.FAIL


def _is_translation_by_two(f: MoebiusMap) -> bool:
    return f.isclose(translation(2), 1e-9) or f.isclose(translation(-2), 1e-9)


def enumerate_reduced_words(r: Representation, max_length: int) -> List[Tuple[str, np.ndarray]]:
    """Все несократимые слова длины 1..max_length с матрицами (обход в глубину)."""
    gens = {"a": r.A.matrix, "A": r.A.inverse().matrix, "b": r.B.matrix, "B": r.B.inverse().matrix}
    inverse = {"a": "A", "A": "a", "b": "B", "B": "b"}
    out: List[Tuple[str, np.ndarray]] = []
    stack: List[Tuple[str, np.ndarray]] = [(letter, gens[letter]) for letter in reversed("aAbB")]
    while stack:
        word, m = stack.pop()
        out.append((word, m))
        if len(word) >= max_length:
            continue
        for letter in reversed("aAbB"):
            if letter == inverse[word[-1]]:
                continue
            stack.append((word + letter, m @ gens[letter]))
    return out


def shimizu_leutbecher_filter(r: Representation, word_length: int = 6) -> ShimizuReport:
    """
    Лемма Шимизу–Лейтбехера для групп, содержащих T_2: каждый элемент с c != 0 обязан иметь |c| >= 1/2.
    Нарушение на любом перебранном слове свидетельствует о недискретности.

    :param r: Представление; применимо, если A = T_{±2}
    :param word_length: Максимальная длина слов
    :return: ShimizuReport
    """
    if not _is_translation_by_two(r.A):
        return ShimizuReport(applicable=False)
    tol = 1e-9
    words = enumerate_reduced_words(r, word_length)
    min_c: Optional[float] = None
    violation: Optional[str] = None
    for word, m in words:
        c = abs(m[1, 0])
        if c <= tol:
            continue
        if min_c is None or c < min_c:
            min_c = float(c)
        if c < 0.5 - tol and violation is None:
            violation = word
    return ShimizuReport(applicable=True, words_checked=len(words), violation=violation, min_abs_c=min_c)
