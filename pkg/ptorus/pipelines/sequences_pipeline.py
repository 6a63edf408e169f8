# ptorus/pipelines/sequences_pipeline.py

from collections import Counter

from ptorus.adapters.exceptions import UsageError
from ptorus.adapters.spec_loader import SpecLoader
from ptorus.adapters.writers import ResultWriter
from ptorus.domain.enums import CommandType
from ptorus.domain.models.job import JobConfig, PipelineResult
from ptorus.pipelines.base import BasePipeline
from ptorus.services.geometry import limit_representation
from ptorus.services.limits import LimitClassifier, predict_limit, reindex_invariance_check


class SeqClassifyPipeline(BasePipeline):
    """
    ptorus seq classify --spec FILE: вердикты по спецификациям последовательностей скручиваний.
    """

    def __init__(self, writer: ResultWriter, spec_loader: SpecLoader, classifier: LimitClassifier):
        super().__init__(writer)
        self.spec_loader = spec_loader
        self.classifier = classifier

    def _execute(self, job: JobConfig) -> PipelineResult:
        spec_path = self.param(job, "spec")
        if not spec_path:
            raise UsageError("Не задан --spec")

        # ШАГ 1: Загрузка спецификаций
        with self.step(1, "Загрузка спецификаций") as s:
            batch = self.spec_loader.load_batch(spec_path)
            s["details"] = f"{len(batch.specs)} спецификаций из {spec_path}"

        # ШАГ 2: Классификация
        with self.step(2, "Классификация") as s:
            verdicts = self.classifier.classify_batch(batch.specs, workers=job.workers)
            counts = Counter(v.kind.value for v in verdicts)
            s["details"] = ", ".join(f"{k}={n}" for k, n in sorted(counts.items()))

        # ШАГ 3: Запись
        with self.step(3, "Запись JSON"):
            payload = {"verdicts": [v.model_dump(mode="json") for v in verdicts]}
            written = self.writer.write_json(job.outputs.get("out"), payload, job)

        return PipelineResult(
            command=CommandType.SEQ_CLASSIFY,
            summary=", ".join(f"{k}={n}" for k, n in sorted(counts.items())),
            total=len(verdicts), outputs=[written] if written else [], payload=payload,
        )


class SeqLimitPipeline(BasePipeline):
    """ptorus seq limit --mu --nu -p -q: предельный параметр xi и проверка предельной пары."""

    def _execute(self, job: JobConfig) -> PipelineResult:
        mu, nu = self.complex_param(job, "mu"), self.complex_param(job, "nu")
        if mu is None or nu is None:
            raise UsageError("Нужны --mu и --nu")
        p, q = int(self.param(job, "p", 0)), int(self.param(job, "q", 0))

        # ШАГ 1: Формула предела
        with self.step(1, "Предельный параметр") as s:
            xi = predict_limit(mu, nu, p, q)
            rep = limit_representation(mu, nu, p, q)
            invariant = all(
                reindex_invariance_check(mu, nu, p, q, du, dv) for du, dv in ((1, 0), (0, 1), (-1, 1))
            )
            s["details"] = f"xi = {xi}, пара совпадает: {rep.matches}"

        # ШАГ 2: Запись
        with self.step(2, "Запись JSON"):
            payload = {
                "limit": {
                    "p": p, "q": q, "xi": [xi.real, xi.imag],
                    "exotic": p not in (0, -1),
                    "representation_matches": rep.matches,
                    "representation_residual": rep.residual,
                    "reindex_invariant": invariant,
                },
            }
            written = self.writer.write_json(job.outputs.get("out"), payload, job)

        return PipelineResult(
            command=CommandType.SEQ_LIMIT, summary=f"xi={xi!r}", total=1,
            outputs=[written] if written else [], payload=payload,
        )
