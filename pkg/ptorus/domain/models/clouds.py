# ptorus/domain/models/clouds.py

from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, model_validator

from ptorus.domain.enums import CloudBranch, CloudTag, MembershipVerdict
from ptorus.domain.models.markov import FareySlope
from ptorus.domain.models.types import ComplexValue


class RegionCloud(BaseModel):
    """
    Конечная выборка точек множества параметров с происхождением каждой точки.
    Массивы одной длины, после создания только для чтения.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    tag: CloudTag
    parameter: Optional[str] = None  # p для Mp, nu для BersGeom, y для BumpSet
    points: np.ndarray  # complex128
    branch: np.ndarray  # значения CloudBranch
    mu_index: np.ndarray  # индекс mu в исходной выборке
    nu_index: np.ndarray  # индекс nu, -1 если не используется
    p: np.ndarray
    q: np.ndarray
    note: str = ""

    @model_validator(mode="before")
    @classmethod
    def _coerce_arrays(cls, data: Dict) -> Dict:
        if not isinstance(data, dict):
            return data
        points = np.asarray(data.get("points", []), dtype=np.complex128).ravel()
        size = len(points)
        data = dict(data)
        data["points"] = points
        data["branch"] = np.asarray(data.get("branch", [CloudBranch.SLICE.value] * size), dtype=object)
        for key, fill in (("mu_index", None), ("nu_index", -1), ("p", 0), ("q", 0)):
            default = np.arange(size) if fill is None else np.full(size, fill)
            data[key] = np.asarray(data.get(key, default), dtype=np.int64)
        return data

    @model_validator(mode="after")
    def _check_lengths(self) -> "RegionCloud":
        arrays = (self.points, self.branch, self.mu_index, self.nu_index, self.p, self.q)
        if len({len(a) for a in arrays}) != 1:
            raise ValueError("Массивы облака должны иметь одинаковую длину")
        for a in arrays:
            a.setflags(write=False)
        return self

    @classmethod
    def from_samples(cls, points, note: str = "") -> "RegionCloud":
        """Облако точек слайса M: происхождение - собственный индекс."""
        return cls(tag=CloudTag.M, points=points, note=note)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def min_im(self) -> float:
        return float(self.points.imag.min()) if len(self) else float("nan")

    def select(self, branch: CloudBranch) -> np.ndarray:
        return self.points[self.branch == branch.value]

    def to_frame(self) -> pd.DataFrame:
        """Таблица re, im, tag, branch, mu_index, nu_index, p, q."""
        return pd.DataFrame({
            "re": self.points.real,
            "im": self.points.imag,
            "tag": self.tag.value,
            "branch": self.branch,
            "mu_index": self.mu_index,
            "nu_index": self.nu_index,
            "p": self.p,
            "q": self.q,
        })


class SlopeChart(BaseModel):
    """Целочисленная матрица sigma_y, det = 1, переводящая 1/0 в y."""
    model_config = ConfigDict(frozen=True)

    y: FareySlope
    sigma: Tuple[Tuple[int, int], Tuple[int, int]]

    @model_validator(mode="after")
    def _check(self) -> "SlopeChart":
        (a, b), (c, d) = self.sigma
        if a * d - b * c != 1:
            raise ValueError(f"Определитель sigma равен {a * d - b * c}, ожидалась 1")
        if FareySlope.of(a, c) != self.y:
            raise ValueError(f"sigma переводит 1/0 в {a}/{c}, а не в {self.y}")
        return self

    def act(self, slope: FareySlope) -> FareySlope:
        """Действие sigma на наклонах: p/q -> (a p + b q)/(c p + d q)."""
        (a, b), (c, d) = self.sigma
        return FareySlope.of(a * slope.p + b * slope.q, c * slope.p + d * slope.q)

    def compose_twist(self, k: int) -> "SlopeChart":
        """sigma * tau^k: та же карта с другим представителем."""
        (a, b), (c, d) = self.sigma
        return SlopeChart(y=self.y, sigma=((a, a * k + b), (c, c * k + d)))


class SubsetWitness(BaseModel):
    """Свидетель (p+1)mu - p nu_bar = 2 mu' - nu_bar' для вложения M(p) в M(1)."""
    mu: ComplexValue
    nu: ComplexValue
    p: int
    mu_prime: ComplexValue
    nu_bar_prime: ComplexValue
    m_side_candidate: ComplexValue  # (k+1) nu - k mu_bar, должен лежать в M
    membership: Optional[MembershipVerdict] = None
    identity_residual: float
    identity_holds: bool


class BumpBoundReport(BaseModel):
    """Оценка снизу Im на облаке M(1) через минимальную высоту слайса."""
    boundary_min_im: float
    sample_min_im: Optional[float] = None
    cloud_min_im: Optional[float] = None
    bound: float  # 3 * boundary_min_im
    exceeds_one: bool
    note: str


class BersLimitKind(BaseModel):
    """Ветви предельного слайса Берса для заданного характера приближения."""
    branches: List[CloudBranch]
    strictly_larger: bool  # предельный слайс строго больше слайса предельной точки
