# ptorus/services/geometry.py

import cmath
import math
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ptorus.adapters.exceptions import DegenerateTarget, NonCommuting, NotParabolic, RadiusMismatch, UsageError
from ptorus.config import numeric_settings
from ptorus.domain.enums import IsometryClass
from ptorus.domain.models.geometry import (
    BallElement,
    DrilledGroup,
    GeomCheckRow,
    GeomConvergenceReport,
    GroupBallSnapshot,
    LimitRepresentation,
    PowerLimitRow,
    PowerLimitTable,
    SyntheticFamily,
)
from ptorus.domain.models.moebius import MoebiusMap, matrix_distance
from ptorus.services.limits import multiplier_horocyclic_check, predict_limit
from ptorus.services.moebius import classify, commutator, identity_map, is_identity, maskit_generator, translation
from ptorus.utils.logging import setup_logger
from ptorus.utils.parallel import parallel_map

# Настройка логгера
logger = setup_logger(__name__)


# ── группы предела ────────────────────────────────────────────────────────────
def drilled_group(mu: complex, nu: complex) -> DrilledGroup:
    """
    Группа (T_2, U_mu, U_nu_bar) с параболической подгруппой ранга 2 (T_2, T_{mu - nu_bar}).

    :param mu: Параметр Маскита первой стороны
    :param nu: Параметр Маскита второй стороны
    :return: DrilledGroup
    """
    nu_bar = nu.conjugate()
    return DrilledGroup(
        mu=mu, nu=nu,
        generators=(translation(2), maskit_generator(mu), maskit_generator(nu_bar)),
        cusp_pair=(translation(2), translation(mu - nu_bar)),
    )


def limit_representation(mu: complex, nu: complex, p: int, q: int) -> LimitRepresentation:
    """
    Предельная пара (T_2, T_{mu - nu_bar}^p T_2^q U_mu), сверенная с (T_2, U_xi).
    """
    w = mu - nu.conjugate()
    second = translation(w).power(p) @ translation(2).power(q) @ maskit_generator(mu)
    xi = predict_limit(mu, nu, p, q)
    residual = matrix_distance(second, maskit_generator(xi))
    tol = 1e-12 * max(1.0, abs(xi))
    return LimitRepresentation(
        p=p, q=q, xi=xi, generators=(translation(2), second),
        residual=residual, matches=residual <= tol,
    )


# ── степени семейства ─────────────────────────────────────────────────────────
def closed_form_power(lam: complex, k: int) -> MoebiusMap:
    """
    A^k для A(z) = e^lam z + 2 в замкнутой форме:
    диагональ e^{+-k lam/2}, сдвиг 2 sinh(k lam/2) / (e^{lam/2} sinh(lam/2)).
    """
    half = cmath.exp(k * lam / 2)
    shift = 2 * cmath.sinh(k * lam / 2) / (cmath.exp(lam / 2) * cmath.sinh(lam / 2))
    return MoebiusMap([[half, shift], [0, 1 / half]], normalize=False)


def _closed_form_entries(lam: complex, exponents: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Векторная версия closed_form_power: (a_j, b_j, d_j) со знаком Re tr >= 0."""
    z = exponents.astype(np.complex128) * (lam / 2)
    a = np.exp(z)
    d = 1 / a
    b = 2 * np.sinh(z) / (np.exp(lam / 2) * np.sinh(lam / 2))
    flip = (a + d).real < 0
    sign = np.where(flip, -1.0, 1.0)
    return a * sign, b * sign, d * sign


def _translation_distance(a, b, d, z) -> np.ndarray:
    """Расстояние Фробениуса от [[a, b], [0, d]] до T_z с учётом обоих знаков."""
    plus = np.sqrt(np.abs(a - 1) ** 2 + np.abs(b - z) ** 2 + np.abs(d - 1) ** 2)
    minus = np.sqrt(np.abs(a + 1) ** 2 + np.abs(b + z) ** 2 + np.abs(d + 1) ** 2)
    return np.minimum(plus, minus)


def power_limit_check(fam: SyntheticFamily, n_list: Iterable[int]) -> PowerLimitTable:
    """
    Невязки ||A_n^{m_n} - T_w|| для заданных n (степень считается бинарным возведением).

    :param fam: Модельное семейство
    :param n_list: Индексы n
    :return: PowerLimitTable
    :raises DegenerateTarget: если w = 0
    """
    if fam.w == 0:
        raise DegenerateTarget("w = 0: предел степеней вырождается в тождество")
    target = translation(fam.w)
    norm = math.sqrt(2 + abs(fam.w) ** 2)
    rows: List[PowerLimitRow] = []
    lams: List[complex] = []
    for n in n_list:
        m = fam.m_at(n)
        lam = fam.multiplier(n)
        lams.append(lam)
        residual = matrix_distance(fam.member(n).power(m), target)
        rows.append(PowerLimitRow(
            n=n, m_n=m, lam=lam, residual=residual, relative_residual=residual / norm,
        ))
    logger.debug(f"power_limit_check: w={fam.w}, строк {len(rows)}")
    eps = max((abs(lam) for lam in lams), default=1.0)
    return PowerLimitTable(w=fam.w, rows=rows, horocyclic_multipliers=multiplier_horocyclic_check(lams, eps))


# ── решётка ───────────────────────────────────────────────────────────────────
def _parabolic_translation(f: MoebiusMap) -> complex:
    """Сдвиг параболического отображения, фиксирующего ∞."""
    g = f.sign_normalized()
    if abs(g.c) > numeric_settings.det_tol:
        raise NotParabolic("Ожидалось параболическое отображение с неподвижной точкой ∞")
    return g.b / g.d


def _index_bounds(s: complex, t: Optional[complex], radius: float) -> Tuple[int, int]:
    """Границы |a|, |b| для |a t + b s| <= radius по наименьшему собственному значению матрицы Грама."""
    if t is None:
        return 0, int(math.floor(radius / abs(s))) if s != 0 else 0
    gram = np.array([[abs(t) ** 2, (t * s.conjugate()).real], [(t * s.conjugate()).real, abs(s) ** 2]])
    low = float(np.linalg.eigvalsh(gram)[0])
    if low <= 1e-12 * float(np.trace(gram)):
        return -1, -1
    bound = int(math.floor(radius / math.sqrt(low)))
    return bound, bound


def lattice_ball(
    delta: MoebiusMap, delta_hat: Optional[MoebiusMap], radius: float, max_index: Optional[int] = None
) -> GroupBallSnapshot:
    """
    Элементы delta_hat^a delta^b группы <delta, delta_hat> на расстоянии не больше radius от тождества.

    :param delta: Параболическое отображение с неподвижной точкой ∞
    :param delta_hat: Второе параболическое (None: подгруппа ранга 1)
    :param radius: Радиус шара в метрике Фробениуса
    :param max_index: Дополнительное ограничение |a|, |b| <= max_index
    :return: GroupBallSnapshot
    :raises NonCommuting: если образующие не коммутируют
    :raises NotParabolic: если образующая не параболическая
    """
    generators = [delta] if delta_hat is None else [delta, delta_hat]
    for g in generators:
        if classify(g) != IsometryClass.PARABOLIC:
            raise NotParabolic(f"Образующая {g!r} не параболическая")
    if delta_hat is not None and not is_identity(commutator(delta, delta_hat)):
        raise NonCommuting("Образующие решётки не коммутируют")

    s = _parabolic_translation(delta)
    t = _parabolic_translation(delta_hat) if delta_hat is not None else None
    a_max, b_max = _index_bounds(s, t, radius)
    if a_max < 0:
        if max_index is None:
            raise UsageError("Образующие вещественно зависимы: требуется max_index")
        a_max = b_max = max_index
    elif max_index is not None:
        a_max, b_max = min(a_max, max_index), min(b_max, max_index)

    identity = identity_map()
    elements: List[BallElement] = []
    for a in range(-a_max, a_max + 1):
        for b in range(-b_max, b_max + 1):
            element = delta.power(b) if delta_hat is None else delta_hat.power(a) @ delta.power(b)
            norm = matrix_distance(element, identity)
            if norm <= radius:
                elements.append(BallElement(label=(a, b), element=element, norm=norm))
    return GroupBallSnapshot(radius=radius, elements=elements)


def hausdorff_distance_ball(s1: GroupBallSnapshot, s2: GroupBallSnapshot) -> float:
    """
    Симметричное расстояние Хаусдорфа между конечными шарами одного радиуса.

    :raises RadiusMismatch: если радиусы различны
    """
    if s1.radius != s2.radius:
        raise RadiusMismatch(f"Радиусы шаров различны: {s1.radius} и {s2.radius}")
    if not s1.elements and not s2.elements:
        return 0.0
    if not s1.elements or not s2.elements:
        return math.inf
    d = np.array([[matrix_distance(x.element, y.element) for y in s2.elements] for x in s1.elements])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


# ── геометрическая сходимость ─────────────────────────────────────────────────
def _lattice_translations(w: complex, radius: float, rank: int, max_index: Optional[int]) -> List[Tuple[Tuple[int, int], complex]]:
    snapshot = lattice_ball(translation(2), translation(w) if rank == 2 else None, radius, max_index)
    return [(e.label, e.label[0] * w + 2 * e.label[1]) for e in snapshot.elements]


class GeometricLimitChecker:
    """
    Проверка двух условий хаусдорфовой сходимости циклических групп <A_n> к решётке <T_2, T_w>
    (или к <T_2> при rank=1).
    """

    def __init__(self, window: Optional[int] = None, trend_tol: Optional[float] = None):
        self.window = window or numeric_settings.exponent_window
        self.trend_tol = trend_tol or numeric_settings.trend_tol

    def _condition_one(self, lam: complex, m: int, targets) -> Tuple[float, float, bool]:
        """Для каждого элемента решётки ищется показатель j около a*m + b; возвращает sup невязок."""
        sup_rel, sup_abs, widened = 0.0, 0.0, False
        for (a, b), z in targets:
            center = a * m + b
            window = self.window
            while True:
                j = np.arange(center - window, center + window + 1)
                dist = _translation_distance(*_closed_form_entries(lam, j), z)
                best = int(np.argmin(dist))
                if 0 < best < len(j) - 1 or window >= 64 * self.window:
                    break
                logger.warning(f"Минимум на краю окна показателей (a={a}, b={b}, m={m}); окно расширено")
                window *= 4
                widened = True
            err = float(dist[best])
            sup_abs = max(sup_abs, err)
            sup_rel = max(sup_rel, err / math.sqrt(2 + abs(z) ** 2))
        return sup_rel, sup_abs, widened

    @staticmethod
    def _condition_two(lam: complex, m: int, w: complex, radius: float, reference) -> Tuple[float, int]:
        """Степени A^j в шаре радиуса radius, далёкие от решётки: худшее относительное удаление."""
        a_max, b_max = _index_bounds(2 + 0j, w, radius + 1)
        if a_max < 0:
            a_max = b_max = int(math.ceil(radius)) + 1
        j_max = (a_max + 1) * abs(m) + b_max + 2
        j = np.arange(-j_max, j_max + 1)
        a, b, d = _closed_form_entries(lam, j)
        norm = np.sqrt(np.abs(a - 1) ** 2 + np.abs(b) ** 2 + np.abs(d - 1) ** 2)
        inside = norm <= radius
        if not inside.any():
            return 0.0, len(j)
        a, b, d = a[inside], b[inside], d[inside]
        zs = np.array([z for _, z in reference], dtype=np.complex128)
        dist = _translation_distance(a[:, None], b[:, None], d[:, None], zs[None, :])
        nearest = dist.argmin(axis=1)
        rel = dist[np.arange(len(nearest)), nearest] / np.sqrt(2 + np.abs(zs[nearest]) ** 2)
        return float(rel.max()), len(j)

    def check_member(self, fam: SyntheticFamily, n: int, radius: float, rank: int,
                     max_index: Optional[int]) -> GeomCheckRow:
        m = fam.m_at(n)
        lam = fam.multiplier(n)
        targets = _lattice_translations(fam.w, radius, rank, max_index)
        reference = _lattice_translations(fam.w, radius + 2, rank, None)
        sup_rel, sup_abs, widened = self._condition_one(lam, m, targets)
        margin, scanned = self._condition_two(lam, m, fam.w, radius, reference)
        return GeomCheckRow(
            n=n, m_n=m, sup_residual=sup_rel, sup_residual_abs=sup_abs,
            spurious_margin=margin, exponents_scanned=scanned, widened=widened,
        )

    def _trend(self, values: Sequence[float]) -> bool:
        return all(b <= a * (1 + 1e-9) + 1e-15 for a, b in zip(values, values[1:]))

    def check(self, fam: SyntheticFamily, radius: float, n_list: Iterable[int], rank: int = 2,
              max_index: Optional[int] = None, workers: Optional[int] = None) -> GeomConvergenceReport:
        """
        Условие 1: каждый элемент решётки в шаре приближается степенью A_n.
        Условие 2: степени A_n в шаре не накапливаются вне решётки.

        :param fam: Модельное семейство
        :param radius: Радиус шара
        :param n_list: Индексы n
        :param rank: 2 для <T_2, T_w>, 1 для <T_2>
        :param max_index: Ограничение |a|, |b| для условия 1
        :param workers: Число процессов
        :return: GeomConvergenceReport
        """
        if rank not in (1, 2):
            raise UsageError(f"rank должен быть 1 или 2, получено {rank}")
        if fam.w == 0:
            raise DegenerateTarget("w = 0: решётка вырождена")
        tasks = [(self, fam, n, radius, rank, max_index) for n in n_list]
        rows = parallel_map(_check_task, tasks, workers)
        sup = [r.sup_residual for r in rows]
        margins = [r.spurious_margin for r in rows]
        decreasing = self._trend(sup) and self._trend(margins)
        converging = bool(rows) and decreasing and sup[-1] <= self.trend_tol and margins[-1] <= self.trend_tol
        note = "" if converging else "условия сходимости не выполняются на последнем n или не убывают"
        logger.info(f"Геометрическая сходимость: rank={rank}, w={fam.w}, сходится={converging}")
        return GeomConvergenceReport(
            w=fam.w, radius=radius, rank=rank, rows=rows,
            trend_decreasing=decreasing, converging=converging, note=note,
        )


def _check_task(task) -> GeomCheckRow:
    checker, fam, n, radius, rank, max_index = task
    return checker.check_member(fam, n, radius, rank, max_index)


def cyclic_geom_limit_check(fam: SyntheticFamily, radius: float, n_list: Iterable[int], rank: int = 2,
                            max_index: Optional[int] = None, workers: Optional[int] = None) -> GeomConvergenceReport:
    return GeometricLimitChecker().check(fam, radius, n_list, rank=rank, max_index=max_index, workers=workers)
