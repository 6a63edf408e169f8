# ptorus/services/clouds.py

from typing import Iterable, Optional

import numpy as np

from ptorus.adapters.exceptions import UsageError, WrongCloudTag
from ptorus.config import numeric_settings
from ptorus.domain.enums import ApproachKind, CloudBranch, CloudTag, MembershipVerdict
from ptorus.domain.models.clouds import BersLimitKind, BumpBoundReport, RegionCloud, SlopeChart, SubsetWitness
from ptorus.domain.models.maskit import BoundaryTrace
from ptorus.domain.models.markov import FareySlope
from ptorus.services.farey import farey_parents
from ptorus.services.limits import predict_limit
from ptorus.utils.logging import setup_logger

# Настройка логгера
logger = setup_logger(__name__)


def _require_m(cloud: RegionCloud) -> None:
    if cloud.tag != CloudTag.M:
        raise WrongCloudTag(f"Ожидалось облако с тегом M, получено {cloud.tag.value}")


# ── M(p) ──────────────────────────────────────────────────────────────────────
def bump_set(p: int, m_samples: RegionCloud) -> RegionCloud:
    """
    Облако M(p) = {(p+1) mu - p nu_bar : mu, nu из выборки}.

    :param p: p >= 0
    :param m_samples: Облако с тегом M
    :return: RegionCloud с тегом Mp
    """
    _require_m(m_samples)
    if p < 0:
        raise UsageError(f"p должно быть неотрицательным, получено {p}")
    mu = m_samples.points
    if p == 0:
        return RegionCloud(
            tag=CloudTag.MP, parameter="0", points=mu,
            branch=[CloudBranch.BUMP.value] * len(mu), mu_index=m_samples.mu_index,
        )
    xi = (p + 1) * mu[:, None] - p * np.conj(mu)[None, :]
    mu_idx, nu_idx = np.meshgrid(m_samples.mu_index, m_samples.mu_index, indexing="ij")
    size = xi.size
    logger.debug(f"M({p}): {len(mu)} образцов -> {size} точек")
    return RegionCloud(
        tag=CloudTag.MP, parameter=str(p), points=xi.ravel(),
        branch=[CloudBranch.BUMP.value] * size,
        mu_index=mu_idx.ravel(), nu_index=nu_idx.ravel(),
        p=np.full(size, p), q=np.zeros(size, dtype=np.int64),
    )


# ── предельный слайс Берса ────────────────────────────────────────────────────
def bers_geom_limit_kind(approach: ApproachKind) -> BersLimitKind:
    """
    Касательное приближение к рациональной точке: M и (M* + 2 nu_bar);
    горо-циклическое: только M.
    """
    if approach == ApproachKind.HOROCYCLIC:
        return BersLimitKind(branches=[CloudBranch.SLICE], strictly_larger=False)
    if approach == ApproachKind.TANGENTIAL:
        return BersLimitKind(branches=[CloudBranch.SLICE, CloudBranch.CONJUGATE_SHIFT], strictly_larger=True)
    raise UsageError("Для смешанного приближения предельный слайс не определён")


def bers_geom_limit_cloud(nu: complex, m_samples: RegionCloud,
                          approach: ApproachKind = ApproachKind.TANGENTIAL) -> RegionCloud:
    """
    Облако M ⊔ (M* + 2 nu_bar). Точка второй ветви conj(mu) + 2 nu_bar записывается
    как предел с p = -2, q = 0 для пары (-conj(mu), nu).

    :param nu: Параметр второй стороны
    :param m_samples: Облако с тегом M
    :param approach: Характер приближения
    :return: RegionCloud с тегом BersGeom
    """
    _require_m(m_samples)
    kind = bers_geom_limit_kind(approach)
    mu = m_samples.points
    size = len(mu)
    points = [mu]
    branch = [CloudBranch.SLICE.value] * size
    mu_index = [m_samples.mu_index]
    p = [np.zeros(size, dtype=np.int64)]
    if CloudBranch.CONJUGATE_SHIFT in kind.branches:
        points.append(np.conj(mu) + 2 * np.conj(nu))
        branch += [CloudBranch.CONJUGATE_SHIFT.value] * size
        mu_index.append(m_samples.mu_index)
        p.append(np.full(size, -2))
    return RegionCloud(
        tag=CloudTag.BERS_GEOM, parameter=f"{nu.real!r},{nu.imag!r}",
        points=np.concatenate(points), branch=branch,
        mu_index=np.concatenate(mu_index), p=np.concatenate(p),
        note="вторая ветвь: p=-2, q=0 для пары (-conj(mu), nu)",
    )


# ── карты наклонов и B_y(1) ───────────────────────────────────────────────────
def sigma_chart(y: FareySlope) -> SlopeChart:
    """
    Карта sigma_y: первый столбец (p, q), второй - родитель Фарея с меньшим знаменателем
    (знак выбран так, чтобы det = 1). 1/0 -> тождество, n/1 -> [[n, -1], [1, 0]].
    """
    if y.is_infinity:
        return SlopeChart(y=y, sigma=((1, 0), (0, 1)))
    parents = farey_parents(y) or (FareySlope(p=1, q=0),)
    candidates = []
    for parent in parents:
        for sign in (1, -1):
            r, s = sign * parent.p, sign * parent.q
            if y.p * s - r * y.q == 1:
                candidates.append((abs(s), r, s))
    _, r, s = min(candidates, key=lambda c: c[0])
    return SlopeChart(y=y, sigma=((y.p, r), (y.q, s)))


def bump_boundary_set(y: FareySlope, m_samples: RegionCloud) -> RegionCloud:
    """
    Облако B_y(1) в плоскости mu: M(1) по выборке, помеченное картой sigma_y.
    Карта переносит метки, значения mu от наклона не зависят.
    """
    chart = sigma_chart(y)
    base = bump_set(1, m_samples)
    return RegionCloud(
        tag=CloudTag.BUMP_SET, parameter=str(y), points=base.points, branch=base.branch,
        mu_index=base.mu_index, nu_index=base.nu_index, p=base.p, q=base.q,
        note=f"sigma_y={list(map(list, chart.sigma))}",
    )


def bump_bound_report(samples: Optional[RegionCloud], boundary_min_im: float) -> BumpBoundReport:
    """
    Оценка min Im M(1) >= 3 min Im M и сравнение с 1.
    Непересекаемость множеств B_y(1) при этом не проверяется.
    """
    bound = 3 * boundary_min_im
    sample_min = samples.min_im if samples is not None and len(samples) else None
    cloud_min = bump_set(1, samples).min_im if sample_min is not None else None
    return BumpBoundReport(
        boundary_min_im=boundary_min_im, sample_min_im=sample_min, cloud_min_im=cloud_min,
        bound=bound, exceeds_one=bound > 1,
        note="проверена только оценка Im; непересекаемость множеств B_y(1) не проверяется",
    )


class CloudBuilder:
    """Построение облаков по выборкам слайса Маскита с проверкой принадлежности."""

    def __init__(self, slice_service=None):
        self.slice_service = slice_service

    def maskit_samples(self, points: Iterable[complex], depth: Optional[int] = None, check: bool = True) -> RegionCloud:
        """
        Облако M из точек: точки с вердиктом Outside отбрасываются, Inside и Unknown остаются.
        """
        values = np.asarray(list(points), dtype=np.complex128)
        if self.slice_service is None or not check:
            return RegionCloud.from_samples(values)
        keep = []
        for z in values:
            report = self.slice_service.membership(complex(z), depth=depth)
            keep.append(report.verdict != MembershipVerdict.OUTSIDE)
        mask = np.array(keep, dtype=bool)
        dropped = int((~mask).sum())
        if dropped:
            logger.warning(f"Отброшено точек вне слайса: {dropped} из {len(values)}")
        return RegionCloud.from_samples(values[mask])

    def draw_interior_samples(self, trace: BoundaryTrace, count: int, seed: int,
                              margin: Optional[float] = None) -> RegionCloud:
        """
        Равномерная выборка из [-1, 1] x [h + margin, h + 2], h - наибольшая высота трассированной границы.
        """
        if count < 1:
            raise UsageError(f"count должен быть положительным, получено {count}")
        margin = numeric_settings.membership_margin if margin is None else margin
        top = max(c.mu.imag for c in trace.cusps)
        rng = np.random.default_rng(seed)
        re = rng.uniform(-1.0, 1.0, count)
        im = rng.uniform(top + margin, top + 2.0, count)
        return RegionCloud.from_samples(re + 1j * im, note=f"seed={seed}")

    def subset_witness(self, mu: complex, nu: complex, p: int, depth: Optional[int] = None) -> SubsetWitness:
        """
        Свидетель вложения M(p) в M(1): mu' = mu, nu_bar' = (k+1) nu_bar - k mu, k = p - 1.
        Кандидат (k+1) nu - k mu_bar проверяется на принадлежность M (трёхзначно).

        :param mu: Точка M
        :param nu: Точка M
        :param p: p >= 2
        :return: SubsetWitness
        """
        if p < 2:
            raise UsageError(f"p должно быть не меньше 2, получено {p}")
        k = p - 1
        nu_bar_prime = (k + 1) * nu.conjugate() - k * mu
        m_side = nu_bar_prime.conjugate()
        lhs = predict_limit(mu, nu, p, 0)
        rhs = 2 * mu - nu_bar_prime
        residual = abs(lhs - rhs)
        scale = max(1.0, abs(p + 1) * abs(mu) + abs(p) * abs(nu))
        verdict = None
        if self.slice_service is not None:
            verdict = self.slice_service.membership(m_side, depth=depth).verdict
        return SubsetWitness(
            mu=mu, nu=nu, p=p, mu_prime=mu, nu_bar_prime=nu_bar_prime, m_side_candidate=m_side,
            membership=verdict, identity_residual=residual, identity_holds=residual <= 1e-14 * scale,
        )
