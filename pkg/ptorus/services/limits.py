# ptorus/services/limits.py

import cmath
import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from ptorus.adapters.exceptions import NotConvergingToInfinity, ZeroMultiplier
from ptorus.domain.enums import ApproachKind, DivergenceReason, VerdictKind
from ptorus.domain.models.markov import FareySlope
from ptorus.domain.models.sequences import (
    AffineEndpoint,
    AffineSequence,
    ConvergenceVerdict,
    InfinityEndpoint,
    QuasiPolynomial,
    SubsequenceLimit,
    TwistSequenceSpec,
    lcm,
)
from ptorus.services.moebius import hyperbolic_distance
from ptorus.utils.logging import setup_logger
from ptorus.utils.parallel import parallel_map

# Настройка логгера
logger = setup_logger(__name__)


# ── формулы пределов ──────────────────────────────────────────────────────────
def predict_limit(mu: complex, nu: complex, p: int, q: int) -> complex:
    """xi = (p+1) mu - p conj(nu) + 2q."""
    return (p + 1) * mu - p * nu.conjugate() + 2 * q


def reindex_invariance_check(
    mu: complex, nu: complex, p: int, q: int, u_shift: int, v_shift: int, tol: float = 1e-14
) -> bool:
    """
    Перенумерация mu' = mu + 2u, nu' = nu + 2v, q' = q - (p+1)u + p v не меняет xi.
    """
    mu2, nu2 = mu + 2 * u_shift, nu + 2 * v_shift
    q2 = q - (p + 1) * u_shift + p * v_shift
    xi, xi2 = predict_limit(mu, nu, p, q), predict_limit(mu2, nu2, p, q2)
    scale = max(1.0, abs(p + 1) * abs(mu2) + abs(p) * abs(nu2) + 2 * abs(q2))
    return abs(xi - xi2) <= tol * scale


def pivot_estimate(lam: complex) -> complex:
    """Оценка x - conj(y) по комплексной длине: 2*pi*i/lambda - i."""
    if lam == 0:
        raise ZeroMultiplier("lambda = 0: элемент параболический")
    return 2j * math.pi / lam - 1j


def pivot_distance(lam: complex, x: complex, y: complex) -> float:
    """d_H(2*pi*i/lambda, x - conj(y) + i)."""
    if lam == 0:
        raise ZeroMultiplier("lambda = 0: элемент параболический")
    return hyperbolic_distance(2j * math.pi / lam, x - y.conjugate() + 1j)


def multiplier_horocyclic_check(lambdas: Sequence[complex], eps: float) -> bool:
    """Хвост (последняя четверть) последовательности лежит в замкнутом круге |z - eps| <= eps."""
    if not lambdas:
        return False
    tail = list(lambdas)[-max(1, len(lambdas) // 4):]
    return all(abs(z - eps) <= eps * (1 + 1e-12) for z in tail)


# ── решение (p+1) k_n - p l_n + q = 0 ─────────────────────────────────────────
def _normalize(seq) -> QuasiPolynomial:
    return seq if isinstance(seq, QuasiPolynomial) else seq.normalized()


def _ratio_p(k_coef: int, l_coef: int) -> Tuple[bool, Optional[Fraction]]:
    """
    Ограничение на p из (p+1) k_j - p l_j = 0.

    :return: (совместно, значение p или None если ограничения нет)
    """
    if k_coef == l_coef:
        return k_coef == 0, None
    return True, Fraction(k_coef, l_coef - k_coef)


def _polynomial_p(k: QuasiPolynomial, l: QuasiPolynomial) -> Tuple[bool, Optional[Fraction]]:
    """p, убирающий растущую часть невязки; (False, None) - такого p нет."""
    p: Optional[Fraction] = None
    for j in range(1, max(k.degree, l.degree) + 1):
        ok, value = _ratio_p(k.coeff(j), l.coeff(j))
        if not ok:
            return False, None
        if value is None:
            continue
        if p is not None and p != value:
            return False, None
        p = value
    return True, p


def _residual_constants(k: QuasiPolynomial, l: QuasiPolynomial, p: int) -> List[int]:
    period = lcm(k.period, l.period)
    return [(p + 1) * k.constant_part(r) - p * l.constant_part(r) for r in range(period)]


def solve_pq(k, l) -> Optional[Tuple[int, int]]:
    """
    Единственная целая пара (p, q) с (p+1) k_n - p l_n + q = 0 для всех достаточно больших n.

    :param k: Спецификация или нормальная форма k_n
    :param l: Спецификация или нормальная форма l_n
    :return: (p, q) или None
    """
    kq, lq = _normalize(k), _normalize(l)
    ok, p = _polynomial_p(kq, lq)
    if not ok:
        return None
    if p is None:
        # обе последовательности ограничены: p определяется периодической частью
        period = lcm(kq.period, lq.period)
        k0, l0 = kq.constant_part(0), lq.constant_part(0)
        for r in range(1, period):
            okr, value = _ratio_p(kq.constant_part(r) - k0, lq.constant_part(r) - l0)
            if not okr:
                return None
            if value is None:
                continue
            if p is not None and p != value:
                return None
            p = value
        if p is None:
            return None  # обе постоянны: p не единственно
    if p.denominator != 1:
        return None
    p_int = int(p)
    constants = set(_residual_constants(kq, lq, p_int))
    if len(constants) != 1:
        return None
    return p_int, -constants.pop()


# ── характер приближения к ∞ ──────────────────────────────────────────────────
def approach_of_affine(a: complex, b: complex) -> ApproachKind:
    """
    x_n = a n + b: Im a > 0 -> горо-циклически, Im a = 0 и Re a != 0 -> по касательной.

    :raises NotConvergingToInfinity: если a = 0 или последовательность уходит из замкнутой полуплоскости
    """
    if a == 0:
        raise NotConvergingToInfinity(f"x_n = {b} постоянна")
    if a.imag < 0 or (a.imag == 0 and b.imag < 0):
        raise NotConvergingToInfinity("Последовательность покидает замкнутую верхнюю полуплоскость")
    return ApproachKind.HOROCYCLIC if a.imag > 0 else ApproachKind.TANGENTIAL


def classify_boundary_approach(samples: Sequence[Optional[complex]]) -> ApproachKind:
    """
    Характер приближения к ∞ по выборке x_1, ..., x_N (None означает ∞).
    Горо-циклически: Im x_n -> ∞; по касательной: Im ограничена и |Re x_n| -> ∞; иначе смешанный.

    :raises NotConvergingToInfinity: если |x_n| не растёт
    """
    values = list(samples)
    if not values:
        raise NotConvergingToInfinity("Пустая выборка")
    if all(z is None for z in values):
        return ApproachKind.HOROCYCLIC
    finite = [z for z in values if z is not None]
    if len(finite) < 4:
        raise NotConvergingToInfinity("Слишком мало конечных точек для вывода")
    quarter = max(1, len(finite) // 4)
    head, tail = finite[:quarter], finite[-quarter:]
    head_abs = max(abs(z) for z in head)
    if min(abs(z) for z in tail) <= 4 * max(1.0, head_abs):
        raise NotConvergingToInfinity("|x_n| не растёт")
    head_im = max(abs(z.imag) for z in head)
    tail_im_min = min(z.imag for z in tail)
    tail_im_max = max(z.imag for z in tail)
    if tail_im_min > 4 * max(1.0, head_im):
        return ApproachKind.HOROCYCLIC
    head_re = max(abs(z.real) for z in head)
    if tail_im_max <= 2 * max(1.0, head_im) and min(abs(z.real) for z in tail) > 4 * max(1.0, head_re):
        return ApproachKind.TANGENTIAL
    return ApproachKind.MIXED


# ── классификатор ─────────────────────────────────────────────────────────────
def anderson_canary_spec(p: int, u: complex = 0j, v: complex = 0j,
                         mu: Optional[complex] = None, nu: Optional[complex] = None) -> TwistSequenceSpec:
    """k_n = -p n, l_n = -(p+1) n."""
    return TwistSequenceSpec(
        name=f"anderson-canary p={p}", u=u, v=v,
        k=AffineSequence(a=-p, b=0), l=AffineSequence(a=-(p + 1), b=0),
        mu=mu, nu=nu,
    )


def realizing_spec(p: int, q: int, mu: Optional[complex] = None, nu: Optional[complex] = None,
                   u: complex = 0j, v: complex = 0j) -> TwistSequenceSpec:
    """
    Спецификация, вердикт которой - предел с параметрами (p, q).
    p не из {0, -1}: k_n = -p n - q, l_n = -(p+1) n - q; p = 0: k постоянна; p = -1: l постоянна.
    """
    if p == 0:
        k, l = AffineSequence(a=0, b=-q), AffineSequence(a=-1, b=0)
    elif p == -1:
        k, l = AffineSequence(a=1, b=0), AffineSequence(a=0, b=-q)
    else:
        k, l = AffineSequence(a=-p, b=-q), AffineSequence(a=-(p + 1), b=-q)
    return TwistSequenceSpec(name=f"realizing p={p} q={q}", u=u, v=v, k=k, l=l, mu=mu, nu=nu)


class _Side:
    """Поведение одной стороны: к ∞ (горо/касательно), стабилизация или ограниченные колебания."""

    def __init__(self, approach: Optional[ApproachKind], seq: Optional[QuasiPolynomial] = None,
                 explicit_real_slope: Optional[float] = None):
        self.approach = approach  # None: сторона не уходит в ∞
        self.seq = seq
        self.explicit_real_slope = explicit_real_slope

    @property
    def diverges(self) -> bool:
        return self.approach is not None


class LimitClassifier:
    """
    Классификатор последовательностей скручиваний: горо-циклическое приближение -> расходимость,
    касательное с обеих сторон -> критерий (p+1) k_n - p l_n + q = 0, одна сторона стабильна -> стандартный предел.
    """

    def __init__(self, slice_service=None):
        """
        :param slice_service: MaskitSliceService для заполнения mu, nu каспами рациональных u, v
        """
        self.slice_service = slice_service

    # ── подготовка ─────────────────────────────────────────────────────────────
    @staticmethod
    def _rational_slope(point: complex) -> Optional[FareySlope]:
        if point.imag != 0 or not math.isfinite(point.real):
            return None
        frac = Fraction(point.real).limit_denominator(10 ** 6)
        if abs(float(frac) - point.real) > 1e-12:
            return None
        return FareySlope.of(frac.numerator, frac.denominator)

    def _fill_parameter(self, value: Optional[complex], point: complex) -> Optional[complex]:
        if value is not None or self.slice_service is None:
            return value
        slope = self._rational_slope(point)
        if slope is None:
            return None
        return self.slice_service.rational_end_invariant(slope).mu

    def _side(self, explicit, seq) -> _Side:
        if explicit is None:
            qp = seq.normalized()
            if qp.is_bounded:
                return _Side(None, qp)
            return _Side(ApproachKind.TANGENTIAL, qp)
        if isinstance(explicit, InfinityEndpoint):
            return _Side(ApproachKind.HOROCYCLIC)
        assert isinstance(explicit, AffineEndpoint)
        if explicit.a == 0:
            return _Side(None)
        kind = approach_of_affine(explicit.a, explicit.b)
        return _Side(kind, explicit_real_slope=explicit.a.real if kind == ApproachKind.TANGENTIAL else None)

    @staticmethod
    def _to_twist(spec: TwistSequenceSpec) -> Optional[TwistSequenceSpec]:
        """Явная касательная форма x_n = a n + b с целым вещественным a -> u = b, k_n = -a n."""
        parts = []
        for ep in (spec.x, spec.y):
            if not isinstance(ep, AffineEndpoint) or ep.a.imag != 0 or ep.a.real != int(ep.a.real):
                return None
            parts.append((ep.b, AffineSequence(a=-int(ep.a.real), b=0)))
        (u, k), (v, l) = parts
        return TwistSequenceSpec(name=spec.name, u=u, v=v, k=k, l=l, mu=spec.mu, nu=spec.nu)

    def _xi(self, mu, nu, p, q) -> Optional[complex]:
        if mu is None or nu is None:
            return None
        return predict_limit(mu, nu, p, q)

    # ── основной вход ──────────────────────────────────────────────────────────
    def classify_sequence(self, spec: TwistSequenceSpec) -> ConvergenceVerdict:
        """
        Вердикт для спецификации.

        :param spec: TwistSequenceSpec
        :return: ConvergenceVerdict
        """
        name = spec.name
        if spec.limit_point == "irrational":
            return ConvergenceVerdict(
                name=name, kind=VerdictKind.DIVERGES, reason=DivergenceReason.IRRATIONAL_LIMIT,
                note="предельная точка иррациональна",
            )
        try:
            x_side = self._side(spec.x, spec.k)
            y_side = self._side(spec.y, spec.l)
        except NotConvergingToInfinity as exc:
            return ConvergenceVerdict(name=name, kind=VerdictKind.UNKNOWN, note=str(exc))

        horocyclic = ApproachKind.HOROCYCLIC in (x_side.approach, y_side.approach)
        if horocyclic and x_side.diverges and y_side.diverges:
            return ConvergenceVerdict(
                name=name, kind=VerdictKind.DIVERGES, reason=DivergenceReason.HOROCYCLIC,
                note="горо-циклическое приближение к ∞",
            )

        if not spec.is_twist_form:
            if x_side.diverges != y_side.diverges:
                return ConvergenceVerdict(
                    name=name, kind=VerdictKind.CONVERGES_STANDARD,
                    note="к ∞ уходит только одна сторона; предел в слайсе",
                )
            if not x_side.diverges:
                return ConvergenceVerdict(
                    name=name, kind=VerdictKind.CONVERGES_STANDARD, note="обе стороны стабильны",
                )
            converted = self._to_twist(spec)
            if converted is None:
                return ConvergenceVerdict(
                    name=name, kind=VerdictKind.UNKNOWN,
                    note="касательная явная форма не сводится к орбите скручивания",
                )
            spec = converted
            x_side = self._side(None, spec.k)
            y_side = self._side(None, spec.l)

        mu = self._fill_parameter(spec.mu, spec.u)
        nu = self._fill_parameter(spec.nu, spec.v)
        k, l = x_side.seq, y_side.seq
        note = "" if mu is not None and nu is not None else "mu или nu не заданы: xi не вычислен"

        if not x_side.diverges or not y_side.diverges:
            return self._standard(name, k, l, mu, nu, note)

        pq = solve_pq(k, l)
        if pq is not None:
            p, q = pq
            return ConvergenceVerdict(
                name=name, kind=VerdictKind.CONVERGES_EXOTIC, p=p, q=q,
                xi=self._xi(mu, nu, p, q), note=note,
            )
        ok, p = _polynomial_p(k, l)
        if ok and p is not None and p.denominator == 1:
            p_int = int(p)
            constants = _residual_constants(k, l, p_int)
            period = len(constants)
            subs = [
                SubsequenceLimit(residue=r, period=period, p=p_int, q=-c, xi=self._xi(mu, nu, p_int, -c))
                for r, c in enumerate(constants)
            ]
            return ConvergenceVerdict(
                name=name, kind=VerdictKind.SPLITS_BY_SUBSEQUENCE, p=p_int, subsequences=subs,
                note=f"невязка при p={p_int} ограничена, но не постоянна",
            )
        return ConvergenceVerdict(
            name=name, kind=VerdictKind.DIVERGES, reason=DivergenceReason.TANDIV,
            note="(p+1)k_n - p l_n расходится при любом целом p",
        )

    def _standard(self, name, k: QuasiPolynomial, l: QuasiPolynomial, mu, nu, note: str) -> ConvergenceVerdict:
        """Хотя бы одна сторона ограничена: стандартный предел (p = 0 или p = -1) или колебания."""
        if k.is_bounded and l.is_bounded:
            if k.is_eventually_constant and l.is_eventually_constant:
                return ConvergenceVerdict(
                    name=name, kind=VerdictKind.CONVERGES_STANDARD, note="обе последовательности стабилизируются",
                )
            return ConvergenceVerdict(
                name=name, kind=VerdictKind.SPLITS_BY_SUBSEQUENCE, note="ограниченные колебания k_n или l_n",
            )
        p = 0 if k.is_bounded else -1
        bounded = k if k.is_bounded else l
        if bounded.is_eventually_constant:
            q = -bounded.constant_part(0)
            return ConvergenceVerdict(
                name=name, kind=VerdictKind.CONVERGES_STANDARD, p=p, q=q, xi=self._xi(mu, nu, p, q), note=note,
            )
        subs = [
            SubsequenceLimit(residue=r, period=bounded.period, p=p, q=-bounded.constant_part(r),
                             xi=self._xi(mu, nu, p, -bounded.constant_part(r)))
            for r in range(bounded.period)
        ]
        return ConvergenceVerdict(
            name=name, kind=VerdictKind.SPLITS_BY_SUBSEQUENCE, p=p, subsequences=subs,
            note="ограниченная сторона периодична",
        )

    def classify_batch(self, specs: Sequence[TwistSequenceSpec], workers: Optional[int] = None) -> List[ConvergenceVerdict]:
        """Вердикты по набору спецификаций в исходном порядке."""
        verdicts = parallel_map(_classify_task, [(self, spec) for spec in specs], workers)
        logger.debug(f"Классифицировано спецификаций: {len(verdicts)}")
        return verdicts


def _classify_task(task) -> ConvergenceVerdict:
    classifier, spec = task
    return classifier.classify_sequence(spec)
