# ptorus/pipelines/render_pipeline.py

import os

import pandas as pd

from ptorus.adapters.exceptions import UsageError
from ptorus.adapters.writers import ResultWriter
from ptorus.config import render_settings
from ptorus.domain.enums import CommandType
from ptorus.domain.models.job import JobConfig, PipelineResult
from ptorus.pipelines.base import BasePipeline
from ptorus.services.render import LimitSetRenderer, maskit_target


class RenderLimitSetPipeline(BasePipeline):
    """
    ptorus render limitset --mu RE,IM --depth D: точки предельного множества группы <T_2, U_mu>,
    изображение PPM и таблица точек. Без путей вывода таблица пишется в stdout.
    """

    def __init__(self, writer: ResultWriter, renderer: LimitSetRenderer):
        super().__init__(writer)
        self.renderer = renderer

    def _execute(self, job: JobConfig) -> PipelineResult:
        mu = self.complex_param(job, "mu")
        if mu is None:
            raise UsageError("Не задан --mu")
        depth = int(self.param(job, "depth", 8))
        if depth < 1:
            raise UsageError(f"--depth должен быть >= 1, получено {depth}")
        box = self.param(job, "box")
        box = tuple(float(v) for v in box) if box is not None else None
        image_path = job.outputs.get("out")
        points_path = job.outputs.get("points")
        outputs = []

        # ШАГ 1: Обход слов
        with self.step(1, "Обход приведённых слов") as s:
            image = self.renderer.render(maskit_target(mu, depth, box), workers=job.workers)
            s["details"] = f"точек {len(image.points)}, слов {image.words_visited}, обрезано {image.words_pruned}"

        # ШАГ 2: Изображение
        if image_path:
            with self.step(2, "Запись PPM") as s:
                outputs.append(self.writer.write_ppm(image_path, image.pixels))
                if render_settings.png or self.param(job, "png", False):
                    png = self.writer.write_png(os.path.splitext(image_path)[0] + ".png", image.points, box)
                    outputs += [png] if png else []
                s["details"] = image_path

        # ШАГ 3: Таблица точек
        if points_path or not image_path:
            with self.step(3, "Запись CSV") as s:
                frame = pd.DataFrame({"re": image.points.real, "im": image.points.imag})
                written = self.writer.write_csv(points_path, frame, job, "limit_set")
                outputs += [written] if written else []
                s["details"] = written or "stdout"

        return PipelineResult(
            command=CommandType.RENDER_LIMITSET,
            summary=f"mu={mu!r} depth={depth} points={len(image.points)} truncated={image.truncated}",
            total=len(image.points), outputs=outputs,
            payload={"words_visited": image.words_visited, "words_pruned": image.words_pruned},
        )
