# ptorus/services/bowditch.py

from collections import deque
from typing import Dict, List, Optional, Tuple

from ptorus.config import numeric_settings
from ptorus.domain.enums import BowditchVerdictKind
from ptorus.domain.models.markov import BowditchVerdict, FareySlope, Representation, TraceTriple
from ptorus.services.markov import trace_triple
from ptorus.utils.logging import setup_logger

# Настройка логгера
logger = setup_logger(__name__)

Vector = Tuple[int, int]


def _slope(v: Vector) -> FareySlope:
    return FareySlope.of(v[0], v[1])


def _key(v: Vector) -> Vector:
    s = _slope(v)
    return s.p, s.q


def _add(u: Vector, v: Vector, k: int = 1) -> Vector:
    return u[0] + k * v[0], u[1] + k * v[1]


class BowditchTester:
    """
    Поиск по дереву Фарея только по следам: спуск к стоку, затем обход регионов с |tr| <= bound.
    Отвергает представление, если найден эллиптический след или регион с |tr| < 2,
    вокруг которого соседние следы не растут.
    """

    def __init__(
        self,
        depth: Optional[int] = None,
        bound: Optional[float] = None,
        max_regions: Optional[int] = None,
        tol: Optional[float] = None,
    ):
        self.depth = depth or numeric_settings.bowditch_depth
        self.bound = bound or numeric_settings.bowditch_bound
        self.max_regions = max_regions or numeric_settings.bowditch_max_regions
        self.tol = tol or numeric_settings.parabolic_tol
        self.walk_cap = max(4 * self.depth, 100)

    def test(self, r: Representation) -> BowditchVerdict:
        return self.test_traces(trace_triple(r))

    # ── правила отбраковки ──────────────────────────────────────────────────────
    def _is_elliptic(self, t: complex) -> bool:
        return abs(t.imag) <= self.tol and abs(t.real) < 2 - self.tol

    def _bounded_fan(self, x: complex, w_prev: complex, w_cur: complex) -> bool:
        """Соседи региона со следом x остаются ограниченными на depth шагов в обе стороны."""
        a, b = w_prev, w_cur
        for _ in range(self.depth):
            a, b = b, x * b - a
            if abs(b) > self.bound:
                return False
        a, b = w_cur, w_prev
        for _ in range(self.depth):
            a, b = b, x * b - a
            if abs(b) > self.bound:
                return False
        return True

    def _fan(self, x: complex, w0: complex, w1: complex) -> Optional[Dict[int, Tuple[complex, complex]]]:
        """
        Следы соседей t_j = u + j v в обе стороны, пока они не выйдут за границу и не начнут расти.

        :return: {j: (w_j, w_{j+1})} или None, если обход упёрся в walk_cap
        """
        fan: Dict[int, Tuple[complex, complex]] = {0: (w0, w1)}
        prev, cur, j = w0, w1, 1
        for _ in range(self.walk_cap):
            nxt = x * cur - prev
            fan[j] = (cur, nxt)
            if abs(cur) > self.bound and abs(nxt) >= abs(cur):
                break
            prev, cur, j = cur, nxt, j + 1
        else:
            return None
        after, cur, j = w1, w0, -1
        for _ in range(self.walk_cap):
            before = x * cur - after
            fan[j] = (before, cur)
            if abs(before) > self.bound and abs(before) >= abs(cur):
                break
            after, cur, j = cur, before, j - 1
        else:
            return None
        return fan

    def _path(self, parents: Dict[Vector, Optional[Vector]], key: Vector) -> List[FareySlope]:
        path: List[FareySlope] = []
        cur: Optional[Vector] = key
        while cur is not None:
            path.append(FareySlope(p=cur[0], q=cur[1]))
            cur = parents.get(cur)
        return list(reversed(path))

    # ── спуск ──────────────────────────────────────────────────────────────────
    def _descend(self, base: TraceTriple):
        """
        Спуск по треугольникам: заменяем регион с наибольшим |tr| на противоположный, пока след уменьшается.

        :return: (треугольник [(вектор, след)] x3, путь спуска, число шагов)
        """
        tri = [((1, 0), base.x), ((0, 1), base.y), ((1, 1), base.z)]
        path: List[FareySlope] = [_slope(v) for v, _ in tri]
        steps = 0
        while True:
            idx = max(range(3), key=lambda i: abs(tri[i][1]))
            (u, tu), (v, tv) = [tri[i] for i in range(3) if i != idx]
            w, tw = tri[idx]
            plus = _add(u, v)
            flipped = _add(u, v, -1) if _key(plus) == _key(w) else plus
            t_new = tu * tv - tw
            if abs(t_new) >= abs(tw):
                return tri, path, steps
            tri[idx] = (flipped, t_new)
            path.append(_slope(flipped))
            steps += 1
            if steps > self.depth:
                return tri, path, steps

    def test_traces(self, base: TraceTriple) -> BowditchVerdict:
        """
        Вердикт по тройке следов.

        :param base: (tr_{1/0}, tr_{0/1}, tr_{1/1})
        :return: BowditchVerdict: NotRejected | Rejected(свидетель) | Inconclusive
        """
        tri, descent_path, steps = self._descend(base)
        if steps > self.depth:
            worst = max(abs(t) for _, t in tri)
            if worst <= self.bound:
                return BowditchVerdict(
                    kind=BowditchVerdictKind.REJECTED,
                    witness=descent_path,
                    reason=f"бесконечный спуск: более {self.depth} шагов с ограниченными следами",
                )
            return BowditchVerdict(
                kind=BowditchVerdictKind.INCONCLUSIVE,
                witness=descent_path,
                reason="спуск не завершился за отведённую глубину",
            )

        parents: Dict[Vector, Optional[Vector]] = {}
        queue = deque()
        for i in range(3):
            v, tv = tri[i]
            u, tu = tri[(i + 1) % 3]
            w, tw = tri[(i + 2) % 3]
            # знак v выбираем так, чтобы третий регион был u + v
            if _key(_add(u, v)) != _key(w):
                v = (-v[0], -v[1])
            key = _key(v)
            if key in parents:
                continue
            parents[key] = None
            queue.append((v, tv, u, tu, tw))

        visited = 0
        while queue:
            v, x, u, w0, w1 = queue.popleft()
            key = _key(v)
            visited += 1
            if visited > self.max_regions:
                return BowditchVerdict(
                    kind=BowditchVerdictKind.INCONCLUSIVE,
                    reason=f"превышен бюджет регионов {self.max_regions}",
                    regions_visited=visited,
                )
            if self._is_elliptic(x):
                return BowditchVerdict(
                    kind=BowditchVerdictKind.REJECTED,
                    witness=self._path(parents, key),
                    reason=f"эллиптический след {x.real:.6g} на наклоне {_slope(v)}",
                    regions_visited=visited,
                )
            if abs(x) < 2 - self.tol and self._bounded_fan(x, w0, w1):
                return BowditchVerdict(
                    kind=BowditchVerdictKind.REJECTED,
                    witness=self._path(parents, key),
                    reason=f"|tr| = {abs(x):.6g} < 2 на наклоне {_slope(v)}, соседние следы не растут",
                    regions_visited=visited,
                )
            fan = self._fan(x, w0, w1)
            if fan is None:
                return BowditchVerdict(
                    kind=BowditchVerdictKind.INCONCLUSIVE,
                    witness=self._path(parents, key),
                    reason=f"обход соседей наклона {_slope(v)} не вышел за границу {self.bound}",
                    regions_visited=visited,
                )
            for j, (w_j, w_next) in sorted(fan.items()):
                if abs(w_j) > self.bound:
                    continue
                t_j = _add(u, v, j)
                nkey = _key(t_j)
                if nkey in parents:
                    continue
                parents[nkey] = key
                # контекст региона t_j: сосед v (след x), сумма t_j + v (след w_{j+1})
                queue.append((t_j, w_j, v, x, w_next))

        logger.debug(f"Поиск Боудича: посещено регионов {visited}")
        return BowditchVerdict(
            kind=BowditchVerdictKind.NOT_REJECTED,
            reason=f"нарушений не найдено (глубина {self.depth}, граница {self.bound})",
            regions_visited=visited,
        )
