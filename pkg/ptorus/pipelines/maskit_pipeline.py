# ptorus/pipelines/maskit_pipeline.py

import os

import numpy as np
import pandas as pd

from ptorus.adapters.exceptions import UsageError
from ptorus.adapters.writers import ResultWriter
from ptorus.config import render_settings
from ptorus.domain.enums import CommandType
from ptorus.domain.models.job import JobConfig, PipelineResult
from ptorus.domain.models.maskit import BoundaryTrace
from ptorus.domain.models.markov import FareySlope
from ptorus.pipelines.base import BasePipeline
from ptorus.services.maskit import MaskitSliceService
from ptorus.services.render import rasterize


def boundary_frame(trace: BoundaryTrace) -> pd.DataFrame:
    return pd.DataFrame({
        "p": [c.slope.p for c in trace.cusps],
        "q": [c.slope.q for c in trace.cusps],
        "re_mu": [c.mu.real for c in trace.cusps],
        "im_mu": [c.mu.imag for c in trace.cusps],
        "trace_sign": [c.trace_sign for c in trace.cusps],
        "residual": [c.residual for c in trace.cusps],
    })


class MaskitTracePipeline(BasePipeline):
    """
    ptorus maskit trace: граница слайса по каспам p/q, q <= q_max; CSV и изображение по желанию.
    """

    def __init__(self, writer: ResultWriter, slice_service: MaskitSliceService):
        super().__init__(writer)
        self.slice_service = slice_service

    def _execute(self, job: JobConfig) -> PipelineResult:
        q_max = int(self.param(job, "q_max", 0))
        if q_max < 1:
            raise UsageError(f"--qmax должен быть >= 1, получено {q_max}")
        outputs = []

        # ШАГ 1: Трассировка границы
        with self.step(1, "Трассировка границы") as s:
            trace = self.slice_service.trace_boundary(q_max, workers=job.workers)
            s["details"] = f"касп {len(trace.cusps)}, min Im = {trace.min_im:.12f}"

        # ШАГ 2: Таблица касп
        with self.step(2, "Запись CSV") as s:
            written = self.writer.write_csv(job.outputs.get("out"), boundary_frame(trace), job, "maskit_trace")
            outputs += [written] if written else []
            s["details"] = written or "stdout"

        # ШАГ 3: Изображение
        image_path = job.outputs.get("image")
        if image_path:
            with self.step(3, "Изображение границы") as s:
                points = np.array([c.mu for c in trace.cusps], dtype=np.complex128)
                top = float(points.imag.max()) + 0.5
                box = (-0.05, 2.05, 0.0, top)
                pixels = rasterize(np.concatenate([points, points + 2]), box, render_settings.width, render_settings.height)
                outputs.append(self.writer.write_ppm(image_path, pixels))
                if render_settings.png:
                    png = self.writer.write_png(os.path.splitext(image_path)[0] + ".png", points, box)
                    outputs += [png] if png else []
                s["details"] = image_path

        return PipelineResult(
            command=CommandType.MASKIT_TRACE,
            summary=f"q_max={q_max} cusps={len(trace.cusps)} min_im={trace.min_im:.12f}",
            total=len(trace.cusps), outputs=outputs,
            payload={"min_im": trace.min_im},
        )


class MaskitCuspPipeline(BasePipeline):
    """ptorus maskit cusp P/Q: одна каспа (через предков или от заданного приближения)."""

    def __init__(self, writer: ResultWriter, slice_service: MaskitSliceService):
        super().__init__(writer)
        self.slice_service = slice_service

    def _execute(self, job: JobConfig) -> PipelineResult:
        slope = FareySlope.parse(str(self.param(job, "slope", "")))
        guess = self.complex_param(job, "guess")

        # ШАГ 1: Решение уравнения следа
        with self.step(1, "Каспа") as s:
            if guess is None:
                cusp = self.slice_service.cusp_by_continuation(slope)
            else:
                cusp = self.slice_service.solver.solve(slope, guess)
            s["details"] = f"{slope}: mu = {cusp.mu}"

        # ШАГ 2: Запись
        with self.step(2, "Запись JSON"):
            payload = {"cusp": cusp.model_dump(mode="json")}
            written = self.writer.write_json(job.outputs.get("out"), payload, job)

        return PipelineResult(
            command=CommandType.MASKIT_CUSP, summary=f"{slope} mu={cusp.mu!r}", total=1,
            outputs=[written] if written else [], payload=payload,
        )


class MaskitMemberPipeline(BasePipeline):
    """ptorus maskit member --mu RE,IM: трёхзначный ответ о принадлежности слайсу."""

    def __init__(self, writer: ResultWriter, slice_service: MaskitSliceService):
        super().__init__(writer)
        self.slice_service = slice_service

    def _execute(self, job: JobConfig) -> PipelineResult:
        mu = self.complex_param(job, "mu")
        if mu is None:
            raise UsageError("Не задан --mu")
        depth = self.param(job, "depth")

        # ШАГ 1: Проверка принадлежности
        with self.step(1, "Принадлежность") as s:
            report = self.slice_service.membership(mu, depth=depth)
            s["details"] = f"{report.verdict.value}: {report.reason}"

        # ШАГ 2: Запись
        with self.step(2, "Запись JSON"):
            payload = {"membership": report.model_dump(mode="json")}
            written = self.writer.write_json(job.outputs.get("out"), payload, job)

        return PipelineResult(
            command=CommandType.MASKIT_MEMBER, summary=f"mu={mu!r} verdict={report.verdict.value}", total=1,
            outputs=[written] if written else [], payload=payload,
        )
