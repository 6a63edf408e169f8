# ptorus/services/render.py

from typing import List, Optional, Tuple

import numpy as np

from ptorus.adapters.exceptions import EmptyOutput
from ptorus.config import render_settings
from ptorus.domain.enums import IsometryClass
from ptorus.domain.models.moebius import MoebiusMap, RiemannPoint
from ptorus.domain.models.render import LimitSetImage, RenderTarget
from ptorus.services.moebius import classify, commutator, fixed_points, maskit_generator, translation
from ptorus.utils.logging import setup_logger
from ptorus.utils.parallel import parallel_map

# Настройка логгера
logger = setup_logger(__name__)


def maskit_target(mu: complex, depth: int, box: Optional[Tuple[float, float, float, float]] = None) -> RenderTarget:
    """Цель отрисовки для группы <T_2, U_mu> с параметрами из render_settings."""
    kwargs = {} if box is None else {"box": box}
    return RenderTarget(
        generators=[translation(2), maskit_generator(mu)], max_depth=depth,
        width=render_settings.width, height=render_settings.height,
        point_budget=render_settings.point_budget,
        contraction_threshold=render_settings.contraction_threshold, **kwargs,
    )


def base_points(generators: List[MoebiusMap]) -> List[RiemannPoint]:
    """Неподвижные точки параболических образующих и их коммутаторов."""
    candidates = list(generators)
    for i, g in enumerate(generators):
        for h in generators[i + 1:]:
            candidates.append(commutator(g, h))
    points: List[RiemannPoint] = []
    for f in candidates:
        if classify(f) == IsometryClass.PARABOLIC:
            for point in fixed_points(f):
                if point not in points:
                    points.append(point)
    return points


def _alphabet(generators: List[MoebiusMap]) -> List[np.ndarray]:
    """Буквы g_1, g_1^-1, g_2, g_2^-1, ...; буква 2k+1 обратна букве 2k."""
    letters = []
    for g in generators:
        letters.append(g.matrix)
        letters.append(g.inverse().matrix)
    return letters


def _images(m: np.ndarray, finite: np.ndarray, has_infinity: bool) -> Tuple[np.ndarray, np.ndarray]:
    """Образы базовых точек и |производная| в конечных базовых точках."""
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    denom = c * finite + d
    with np.errstate(divide="ignore", invalid="ignore"):
        images = (a * finite + b) / denom
        deriv = 1.0 / np.abs(denom) ** 2
    if has_infinity and c != 0:
        images = np.append(images, a / c)
    return images, deriv


def _walk_branch(task) -> Tuple[List[complex], int, int, bool]:
    """Обход в глубину приведённых слов, начинающихся с буквы first."""
    letters, first, finite, has_infinity, depth, threshold, budget = task
    inverse = [i ^ 1 for i in range(len(letters))]
    out: List[complex] = []
    visited = pruned = 0
    stack = [(letters[first], first, 1)]
    while stack:
        m, last, length = stack.pop()
        visited += 1
        images, deriv = _images(m, finite, has_infinity)
        out.extend(complex(z) for z in images if np.isfinite(z))
        if len(out) >= budget:
            return out[:budget], visited, pruned, True
        if length >= depth:
            continue
        if deriv.size and np.nanmax(deriv) < threshold:
            pruned += 1
            continue
        # обратный порядок, чтобы буквы обходились по возрастанию
        for nxt in reversed(range(len(letters))):
            if nxt == inverse[last]:
                continue
            stack.append((m @ letters[nxt], nxt, length + 1))
    return out, visited, pruned, False


def rasterize(points: np.ndarray, box: Tuple[float, float, float, float], width: int, height: int) -> np.ndarray:
    """Растр (height, width): 1 в пикселях с точками, строка 0 - верх области."""
    xmin, xmax, ymin, ymax = box
    pixels = np.zeros((height, width), dtype=np.uint8)
    if len(points) == 0:
        return pixels
    col = ((points.real - xmin) / (xmax - xmin) * width).astype(np.int64)
    row = ((ymax - points.imag) / (ymax - ymin) * height).astype(np.int64)
    keep = (col >= 0) & (col < width) & (row >= 0) & (row < height)
    pixels[row[keep], col[keep]] = 1
    return pixels


class LimitSetRenderer:
    """
    Точки предельного множества: образы неподвижных точек параболических элементов под приведёнными словами.
    Ветвь обхода обрывается, когда производная слова во всех конечных базовых точках меньше порога.
    """

    def __init__(self, workers: Optional[int] = None):
        self.workers = workers

    def render(self, target: RenderTarget, workers: Optional[int] = None) -> LimitSetImage:
        """
        :param target: RenderTarget
        :param workers: Число процессов (по умолчанию заданное в конструкторе)
        :return: LimitSetImage
        :raises EmptyOutput: если в области нет ни одной точки
        """
        bases = base_points(target.generators)
        finite = np.array([p.value for p in bases if not p.is_infinity], dtype=np.complex128)
        has_infinity = any(p.is_infinity for p in bases)
        letters = _alphabet(target.generators)
        tasks = [
            (letters, first, finite, has_infinity, target.max_depth, target.contraction_threshold, target.point_budget)
            for first in range(len(letters))
        ]
        branches = parallel_map(_walk_branch, tasks, workers or self.workers)

        merged: List[complex] = [p.value for p in bases if not p.is_infinity]
        visited = pruned = 0
        truncated = False
        for out, v, pr, cut in branches:
            merged.extend(out)
            visited += v
            pruned += pr
            truncated = truncated or cut
        if len(merged) > target.point_budget:
            merged, truncated = merged[:target.point_budget], True

        if not merged:
            raise EmptyOutput("Орбита базовых точек состоит только из ∞", degenerate=True)
        points = np.array(merged, dtype=np.complex128)
        points = np.unique(np.round(points.real, 12) + 1j * np.round(points.imag, 12))
        xmin, xmax, ymin, ymax = target.box
        inside = (points.real >= xmin) & (points.real <= xmax) & (points.imag >= ymin) & (points.imag <= ymax)
        if not inside.any():
            raise EmptyOutput(f"Нет точек в области {target.box}", degenerate=False)
        points = points[inside]
        logger.info(f"Предельное множество: {len(points)} точек, слов {visited}, обрезано ветвей {pruned}")
        return LimitSetImage(
            points=points, pixels=rasterize(points, target.box, target.width, target.height),
            words_visited=visited, words_pruned=pruned, truncated=truncated,
        )
