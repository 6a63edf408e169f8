# ptorus/domain/models/render.py

from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ptorus.domain.models.moebius import MoebiusMap


class RenderTarget(BaseModel):
    """Параметры отрисовки предельного множества."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    generators: List[MoebiusMap] = Field(min_length=1)
    max_depth: int = Field(ge=1)
    width: int = Field(ge=1)
    height: int = Field(ge=1)
    box: Tuple[float, float, float, float] = (-3.0, 5.0, -3.0, 3.0)  # xmin, xmax, ymin, ymax
    point_budget: int = Field(ge=1)
    contraction_threshold: float = Field(gt=0)

    @field_validator("box")
    @classmethod
    def _nonempty_box(cls, value: Tuple[float, float, float, float]) -> Tuple[float, float, float, float]:
        xmin, xmax, ymin, ymax = value
        if not (xmin < xmax and ymin < ymax):
            raise ValueError(f"Пустая область отрисовки: {value}")
        return value


class LimitSetImage(BaseModel):
    """Точки предельного множества и растровое изображение (1 - точка, 0 - фон)."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    points: np.ndarray  # complex128, отсортированы
    pixels: np.ndarray  # uint8, shape (height, width)
    words_visited: int
    words_pruned: int
    truncated: bool  # достигнут бюджет точек
