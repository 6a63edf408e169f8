# ptorus/pipelines/geometry_pipeline.py

import math
from typing import List, Optional

import pandas as pd

from ptorus.adapters.exceptions import UsageError
from ptorus.adapters.writers import ResultWriter
from ptorus.domain.enums import CommandType
from ptorus.domain.models.job import JobConfig, PipelineResult
from ptorus.domain.models.geometry import SyntheticFamily
from ptorus.domain.models.sequences import AffineSequence, TableSequence
from ptorus.pipelines.base import BasePipeline
from ptorus.services.geometry import GeometricLimitChecker, power_limit_check


def covering_radius(w: complex, max_index: int) -> float:
    """Радиус шара, содержащего T_{a w + 2 b} при |a|, |b| <= max_index."""
    reach = max(abs(a * w + 2 * b) for a in range(-max_index, max_index + 1) for b in range(-max_index, max_index + 1))
    return reach + 0.5


def family_from_list(w: complex, m_list: List[int]) -> SyntheticFamily:
    return SyntheticFamily(w=w, m=TableSequence(values=list(m_list), tail=AffineSequence(a=1, b=0)))


class GeomCheckPipeline(BasePipeline):
    """
    ptorus geom check --w RE,IM --m-list ...: невязки степеней и условия хаусдорфовой сходимости.
    """

    def __init__(self, writer: ResultWriter, checker: GeometricLimitChecker):
        super().__init__(writer)
        self.checker = checker

    def _execute(self, job: JobConfig) -> PipelineResult:
        w = self.complex_param(job, "w")
        m_list = [int(m) for m in self.param(job, "m_list", [])]
        if w is None or not m_list:
            raise UsageError("Нужны --w и непустой --m-list")
        if any(m <= 0 for m in m_list):
            raise UsageError(f"Значения m_n должны быть положительны: {m_list}")
        max_index = int(self.param(job, "max_index", 2))
        radius: Optional[float] = self.param(job, "radius")
        radius = covering_radius(w, max_index) if radius is None else float(radius)
        rank = int(self.param(job, "rank", 2))
        fam = family_from_list(w, m_list)
        n_list = list(range(len(m_list)))

        # ШАГ 1: Степени A_n^{m_n}
        with self.step(1, "Сходимость степеней") as s:
            power = power_limit_check(fam, n_list)
            s["details"] = ", ".join(f"m={r.m_n}: {r.relative_residual:.3e}" for r in power.rows)

        # ШАГ 2: Условия сходимости по Хаусдорфу
        with self.step(2, "Геометрическая сходимость") as s:
            report = self.checker.check(fam, radius, n_list, rank=rank, max_index=max_index, workers=job.workers)
            s["details"] = f"rank={rank}, R={radius:.6g}, сходится={report.converging}"

        # ШАГ 3: Запись
        with self.step(3, "Запись CSV") as s:
            frame = pd.DataFrame({
                "n": n_list,
                "m_n": m_list,
                "residual_abs": [r.residual for r in power.rows],
                "residual_rel": [r.relative_residual for r in power.rows],
                "sup_residual": [r.sup_residual for r in report.rows],
                "spurious_margin": [r.spurious_margin for r in report.rows],
            })
            written = self.writer.write_csv(job.outputs.get("out"), frame, job, "geom_check")
            s["details"] = written or "stdout"

        return PipelineResult(
            command=CommandType.GEOM_CHECK,
            summary=f"w={w!r} converging={report.converging} decreasing={report.trend_decreasing}",
            total=len(n_list), outputs=[written] if written else [],
            payload={
                "ratios": power.ratios,
                "converging": report.converging,
                "horocyclic_multipliers": power.horocyclic_multipliers,
                "radius": radius if math.isfinite(radius) else None,
            },
        )
