# ptorus/pipelines/clouds_pipeline.py

from ptorus.adapters.exceptions import UsageError
from ptorus.adapters.samples_loader import SamplesLoader
from ptorus.adapters.writers import ResultWriter
from ptorus.config import numeric_settings
from ptorus.domain.enums import ApproachKind, CloudBranch, CommandType
from ptorus.domain.models.job import JobConfig, PipelineResult
from ptorus.domain.models.markov import FareySlope
from ptorus.pipelines.base import BasePipeline
from ptorus.services.clouds import (
    CloudBuilder,
    bers_geom_limit_cloud,
    bump_bound_report,
    bump_boundary_set,
    bump_set,
)
from ptorus.services.maskit import MaskitSliceService


class BumpCloudPipeline(BasePipeline):
    """
    ptorus bump cloud -p P --samples FILE [--slope Y]: облако M(p) или B_y(1) и оценка Im.
    """

    def __init__(self, writer: ResultWriter, samples_loader: SamplesLoader,
                 builder: CloudBuilder, slice_service: MaskitSliceService):
        super().__init__(writer)
        self.samples_loader = samples_loader
        self.builder = builder
        self.slice_service = slice_service

    def _execute(self, job: JobConfig) -> PipelineResult:
        samples_path = self.param(job, "samples")
        if not samples_path:
            raise UsageError("Не задан --samples")
        p = int(self.param(job, "p", 1))
        slope_text = self.param(job, "slope")
        if slope_text is not None and p != 1:
            raise UsageError("Облако B_y(1) строится только для p = 1")

        # ШАГ 1: Загрузка выборки
        with self.step(1, "Загрузка выборки") as s:
            points = self.samples_loader.load(samples_path)
            samples = self.builder.maskit_samples(
                points, depth=self.param(job, "depth"), check=bool(self.param(job, "check_membership", True))
            )
            s["details"] = f"{len(samples)} точек из {len(points)}"
        if len(samples) == 0:
            raise UsageError("После проверки принадлежности выборка пуста")

        # ШАГ 2: Построение облака
        with self.step(2, "Облако") as s:
            if slope_text is None:
                cloud = bump_set(p, samples)
            else:
                cloud = bump_boundary_set(FareySlope.parse(str(slope_text)), samples)
            s["details"] = f"{cloud.tag.value}({cloud.parameter}): {len(cloud)} точек, min Im = {cloud.min_im:.6f}"

        # ШАГ 3: Оценка Im
        with self.step(3, "Оценка Im") as s:
            boundary = self.slice_service.trace_boundary(numeric_settings.membership_qmax, workers=job.workers)
            bound = bump_bound_report(samples, boundary.min_im)
            s["details"] = f"3 * {bound.boundary_min_im:.6f} = {bound.bound:.6f}"

        # ШАГ 4: Запись
        with self.step(4, "Запись CSV") as s:
            written = self.writer.write_csv(job.outputs.get("out"), cloud.to_frame(), job, "cloud")
            s["details"] = written or "stdout"

        return PipelineResult(
            command=CommandType.BUMP_CLOUD,
            summary=f"{cloud.tag.value} points={len(cloud)} min_im={cloud.min_im:.6f} bound={bound.bound:.6f}",
            total=len(cloud), outputs=[written] if written else [],
            payload={"min_im": cloud.min_im, "sample_min_im": samples.min_im, "bound": bound.model_dump(mode="json")},
        )


class BersCloudPipeline(BasePipeline):
    """ptorus bers cloud --nu RE,IM: двухветвенное облако M ⊔ (M* + 2 nu_bar)."""

    def __init__(self, writer: ResultWriter, samples_loader: SamplesLoader,
                 builder: CloudBuilder, slice_service: MaskitSliceService):
        super().__init__(writer)
        self.samples_loader = samples_loader
        self.builder = builder
        self.slice_service = slice_service

    def _execute(self, job: JobConfig) -> PipelineResult:
        nu = self.complex_param(job, "nu")
        if nu is None:
            raise UsageError("Не задан --nu")
        approach = ApproachKind(self.param(job, "approach", ApproachKind.TANGENTIAL.value))
        samples_path = self.param(job, "samples")

        # ШАГ 1: Выборка слайса
        with self.step(1, "Выборка слайса") as s:
            if samples_path:
                samples = self.builder.maskit_samples(self.samples_loader.load(samples_path))
                s["details"] = f"{len(samples)} точек из {samples_path}"
            else:
                trace = self.slice_service.trace_boundary(numeric_settings.membership_qmax, workers=job.workers)
                count = int(self.param(job, "count", 200))
                samples = self.builder.draw_interior_samples(trace, count, job.seed)
                s["details"] = f"{count} точек, seed={job.seed}"

        # ШАГ 2: Облако
        with self.step(2, "Облако") as s:
            cloud = bers_geom_limit_cloud(nu, samples, approach)
            second = cloud.select(CloudBranch.CONJUGATE_SHIFT)
            s["details"] = f"{len(cloud)} точек, вторая ветвь {len(second)}"

        # ШАГ 3: Запись
        with self.step(3, "Запись CSV") as s:
            written = self.writer.write_csv(job.outputs.get("out"), cloud.to_frame(), job, "cloud")
            s["details"] = written or "stdout"

        return PipelineResult(
            command=CommandType.BERS_CLOUD,
            summary=f"nu={nu!r} points={len(cloud)} branches={sorted(set(cloud.branch))}",
            total=len(cloud), outputs=[written] if written else [],
            payload={"second_branch_max_im": float(second.imag.max()) if len(second) else None},
        )
