# ptorus/services/maskit.py

from typing import Dict, List, Optional, Tuple

import numpy as np

from ptorus.adapters.exceptions import NewtonDiverged, NoUpperHalfPlaneRoot, UsageError
from ptorus.config import numeric_settings
from ptorus.domain.enums import BowditchVerdictKind, MembershipVerdict
from ptorus.domain.models.markov import FareySlope, Representation, TraceTriple
from ptorus.domain.models.maskit import BoundaryTrace, CuspPoint, MembershipReport
from ptorus.services.bowditch import BowditchTester
from ptorus.services.farey import FareyTraceTable, ONE_SLOPE, ZERO_SLOPE, mediant, stern_brocot_path
from ptorus.services.markov import shimizu_leutbecher_filter
from ptorus.services.moebius import maskit_generator, translation
from ptorus.utils.logging import setup_logger
from ptorus.utils.parallel import parallel_map

# Настройка логгера
logger = setup_logger(__name__)

_EPS = np.finfo(float).eps
_MASKIT_DERIVATIVE = TraceTriple(x=0j, y=1j, z=1j)


def maskit_rep(mu: complex) -> Representation:
    """rho_mu: alpha -> T_2, beta -> U_mu."""
    return Representation(A=translation(2), B=maskit_generator(mu))


def maskit_base_triple(mu: complex) -> TraceTriple:
    """(tr_{1/0}, tr_{0/1}, tr_{1/1}) = (2, i*mu, i*(mu - 2))."""
    return TraceTriple(x=2 + 0j, y=1j * mu, z=1j * (mu - 2))


def maskit_trace(slope: FareySlope, mu: complex) -> Tuple[complex, complex]:
    """След W_s(mu) и производная по mu (многочлен по mu, тождество Маркова выполнено точно)."""
    table = FareyTraceTable(maskit_base_triple(mu), _MASKIT_DERIVATIVE, check=False)
    return table.trace_with_derivative(slope)


class CuspSolver:
    """
    Решатель уравнения tr W_s(mu) = ±2: продолжение вдоль луча вещественного следа и Ньютон с демпфированием.
    Корень принимается, если он в верхней полуплоскости, между Re касп родителей
    и луч вещественного следа |tr| > 2, выходящий из него, идёт вверх.
    """

    def __init__(
        self,
        tol: Optional[float] = None,
        max_iter: Optional[int] = None,
        damping: Optional[float] = None,
        accept_radius: Optional[float] = None,
        ray_steps: Optional[int] = None,
    ):
        self.tol = tol or numeric_settings.newton_tol
        self.max_iter = max_iter or numeric_settings.newton_max_iter
        self.damping = damping or numeric_settings.newton_damping
        self.accept_radius = accept_radius or numeric_settings.cusp_accept_radius
        self.ray_steps = ray_steps or numeric_settings.cusp_ray_steps

    def newton(self, slope: FareySlope, target: complex, guess: complex) -> Tuple[complex, float, int]:
        """
        Ньютон для tr_s(mu) = target; шаг делится на damping, пока невязка не уменьшится.

        :return: (корень, |невязка|, число итераций)
        :raises NewtonDiverged: если нет сходимости за max_iter итераций
        """
        mu = complex(guess)
        t, dt = maskit_trace(slope, mu)
        f = t - target
        for it in range(self.max_iter):
            if abs(f) <= self.tol:
                return mu, abs(f), it
            if dt == 0:
                break
            step = f / dt
            lam = 1.0
            while True:
                cand = mu - lam * step
                tc, dtc = maskit_trace(slope, cand)
                fc = tc - target
                if abs(fc) < abs(f) or lam < 1e-8:
                    break
                lam *= self.damping
            if abs(lam * step) <= 4 * _EPS * max(1.0, abs(mu)):
                # стагнация: невязка на уровне ошибок округления
                if abs(fc) <= 1e-10 * max(1.0, abs(dtc) * abs(cand)):
                    return cand, abs(fc), it + 1
                break
            mu, t, dt, f = cand, tc, dtc, fc
        raise NewtonDiverged(f"Ньютон не сошёлся для наклона {slope} (target={target.real:+g})", slope=str(slope))

    @staticmethod
    def ray_points_up(slope: FareySlope, mu: complex, target: complex) -> bool:
        """Луч вещественного следа с |tr| > 2 уходит из mu в верхнюю полуплоскость: Im(t0 / tr'(mu)) > 0."""
        _, dt = maskit_trace(slope, mu)
        return dt != 0 and (target / dt).imag > 0

    def _accept(self, slope: FareySlope, mu: complex, target: complex, guess: Optional[complex],
                bounds: Optional[Tuple[float, float]] = None) -> bool:
        if mu.imag <= 0:
            return False
        if guess is not None and abs(mu - guess) > self.accept_radius:
            return False
        if bounds is not None:
            lo, hi = bounds
            slack = 1e-9 * max(1.0, abs(lo), abs(hi))
            if not lo - slack < mu.real < hi + slack:
                return False
        return self.ray_points_up(slope, mu, target)

    def ray_solve(self, slope: FareySlope, target: complex) -> Tuple[complex, float, int]:
        """
        Продолжение вдоль луча: от 2p/q + iH решаем tr = s * target, уменьшая s геометрически до 1.
        """
        start = 2 * slope.p / slope.q + 3j
        t0, _ = maskit_trace(slope, start)
        s0 = max(abs(t0) / 2, 2.0)
        ratio = s0 ** (1.0 / self.ray_steps)
        mu = start
        total = 0
        for k in range(self.ray_steps + 1):
            s = s0 / ratio ** k if k < self.ray_steps else 1.0
            mu, residual, its = self.newton(slope, s * target, mu)
            total += its
        return mu, residual, total

    def solve(self, slope: FareySlope, guess: Optional[complex] = None,
              bounds: Optional[Tuple[float, float]] = None) -> CuspPoint:
        """
        Каспа наклона. Основной путь - продолжение вдоль луча вещественного следа со знаком
        +2 для чётного q и -2 для нечётного; если луч не дал корня, Ньютон от guess (знак -2, затем +2).

        :param slope: Наклон с q >= 1
        :param guess: Начальное приближение в верхней полуплоскости (запасной путь)
        :param bounds: Интервал Re mu между каспами родителей; корень вне него отвергается
        :return: CuspPoint
        :raises NoUpperHalfPlaneRoot: если приближение не в верхней полуплоскости или корень ниже оси
        :raises NewtonDiverged: если каспа не найдена ни одним путём
        """
        if slope.is_infinity:
            raise UsageError("Наклон 1/0 не задаёт каспу слайса Маскита")
        if guess is not None and guess.imag <= 0:
            raise NoUpperHalfPlaneRoot(f"Начальное приближение {guess} не в верхней полуплоскости", slope=str(slope))

        sign = 2 if slope.q % 2 == 0 else -2
        try:
            mu, residual, its = self.ray_solve(slope, complex(sign))
            if self._accept(slope, mu, complex(sign), None, bounds):
                return CuspPoint(slope=slope, mu=mu, trace_sign=sign, residual=residual, iterations=its, via_ray=True)
            logger.debug(f"Каспа {slope}: луч дал {mu}, корень отвергнут (интервал {bounds})")
        except NewtonDiverged:
            logger.debug(f"Каспа {slope}: продолжение вдоль луча не сошлось")

        if guess is None:
            raise NewtonDiverged(f"Продолжение вдоль луча для {slope} не дало каспы", slope=str(slope))
        below: Optional[complex] = None
        for sign in (-2, 2):
            try:
                mu, residual, its = self.newton(slope, complex(sign), guess)
            except NewtonDiverged:
                continue
            if self._accept(slope, mu, complex(sign), guess, bounds):
                return CuspPoint(slope=slope, mu=mu, trace_sign=sign, residual=residual, iterations=its)
            if mu.imag <= 0:
                below = mu
        if below is not None:
            raise NoUpperHalfPlaneRoot(f"Для наклона {slope} найден только корень {below} вне H", slope=str(slope))
        raise NewtonDiverged(f"Ни луч, ни приближение {guess} не дали каспы наклона {slope}", slope=str(slope))


def cusp_solve(slope: FareySlope, guess: Optional[complex] = None) -> CuspPoint:
    """Каспа наклона с настройками по умолчанию."""
    return CuspSolver().solve(slope, guess)


def _solve_task(task: Tuple[FareySlope, complex, Tuple[float, float]]) -> CuspPoint:
    slope, guess, bounds = task
    return CuspSolver().solve(slope, guess, bounds)


def boundary_max_im(trace: BoundaryTrace, re: float) -> float:
    """
    Высота трассированной границы над Re mu: кусочно-линейная интерполяция по каспам с периодом 2.
    """
    xs = np.array([c.mu.real for c in trace.cusps])
    ys = np.array([c.mu.imag for c in trace.cusps])
    xs = np.concatenate([xs - 2, xs, xs + 2])
    ys = np.concatenate([ys, ys, ys])
    order = np.argsort(xs)
    re_mod = float(np.mod(re, 2.0))
    return float(np.interp(re_mod, xs[order], ys[order]))


class MaskitSliceService:
    """
    Слайс Маскита: трассировка границы по каспам, принадлежность, рациональная тень отображения m.
    """

    def __init__(self, solver: Optional[CuspSolver] = None):
        self.solver = solver or CuspSolver()
        self._cusps: Dict[Tuple[int, int], CuspPoint] = {}
        self._boundaries: Dict[int, BoundaryTrace] = {}

    def _solve_cached(self, slope: FareySlope, guess: complex,
                      bounds: Optional[Tuple[float, float]] = None) -> CuspPoint:
        key = (slope.p, slope.q)
        if key not in self._cusps:
            self._cusps[key] = self.solver.solve(slope, guess, bounds)
        return self._cusps[key]

    def trace_boundary(self, q_max: int, workers: Optional[int] = None) -> BoundaryTrace:
        """
        Каспы всех p/q из [0, 1) с q <= q_max. Обход Штерна–Броко по уровням от (0/1, 1/1):
        каспа медианты ищется вдоль луча и должна лежать между Re касп родителей,
        середина касп родителей - запасное приближение. Уровни решаются параллельно.

        :param q_max: Наибольший знаменатель (>= 1)
        :param workers: Число процессов
        :return: BoundaryTrace
        """
        if q_max < 1:
            raise UsageError(f"q_max должен быть >= 1, получено {q_max}")
        if q_max in self._boundaries:
            return self._boundaries[q_max]
        solved: Dict[Tuple[int, int], CuspPoint] = {
            (0, 1): self._solve_cached(ZERO_SLOPE, 2j),
            (1, 1): self._solve_cached(ONE_SLOPE, 2 + 2j),
        }
        level: List[Tuple[FareySlope, FareySlope]] = [(ZERO_SLOPE, ONE_SLOPE)]
        depth = 0
        while level:
            tasks: List[Tuple[FareySlope, complex, Tuple[float, float]]] = []
            pairs: List[Tuple[FareySlope, FareySlope, FareySlope]] = []
            for left, right in level:
                mid = mediant(left, right)
                if mid.q > q_max:
                    continue
                key = (mid.p, mid.q)
                if key in self._cusps:
                    solved[key] = self._cusps[key]
                else:
                    lo, hi = solved[(left.p, left.q)].mu, solved[(right.p, right.q)].mu
                    tasks.append((mid, (lo + hi) / 2, (lo.real, hi.real)))
                pairs.append((left, mid, right))
            for cusp in parallel_map(_solve_task, tasks, workers):
                self._cusps[(cusp.slope.p, cusp.slope.q)] = cusp
                solved[(cusp.slope.p, cusp.slope.q)] = cusp
            level = [pair for left, mid, right in pairs for pair in ((left, mid), (mid, right))]
            depth += 1
            logger.debug(f"Уровень {depth}: решено касп {len(tasks)}")

        cusps = sorted(
            (c for key, c in solved.items() if key != (1, 1)),
            key=lambda c: c.slope.value,
        )
        trace = BoundaryTrace(q_max=q_max, cusps=cusps, min_im=min(c.mu.imag for c in cusps))
        self._boundaries[q_max] = trace
        logger.info(f"Граница слайса: {len(cusps)} касп, q_max={q_max}, min Im = {trace.min_im:.10f}")
        return trace

    def cusp_by_continuation(self, slope: FareySlope) -> CuspPoint:
        """
        Каспа наклона через предков в дереве Штерна–Броко; наклоны вне [0, 1) сдвигаются на период (mu + 2).
        """
        if slope.is_infinity:
            raise UsageError("Наклон 1/0 не задаёт каспу слайса Маскита")
        n = slope.p // slope.q
        base = slope.shifted(-n)
        left = self._solve_cached(ZERO_SLOPE, 2j)
        right = self._solve_cached(ONE_SLOPE, 2 + 2j)
        cusp = left
        if base.q > 1:
            _, path = stern_brocot_path(base)
            lo, hi = ZERO_SLOPE, ONE_SLOPE
            for direction in path + "=":
                mid = mediant(lo, hi)
                cusp = self._solve_cached(mid, (left.mu + right.mu) / 2, (left.mu.real, right.mu.real))
                if direction == "L":
                    hi, right = mid, cusp
                elif direction == "R":
                    lo, left = mid, cusp
        if n == 0:
            return cusp
        return CuspPoint(
            slope=slope,
            mu=cusp.mu + 2 * n,
            trace_sign=cusp.trace_sign,
            residual=cusp.residual,
            iterations=cusp.iterations,
            via_ray=cusp.via_ray,
        )

    def rational_end_invariant(self, x: FareySlope) -> CuspPoint:
        """Вычислимая тень отображения m на рациональных точках: каспа наклона x (x != 1/0)."""
        return self.cusp_by_continuation(x)

    def membership(self, mu: complex, depth: Optional[int] = None, q_max: Optional[int] = None) -> MembershipReport:
        """
        Принадлежность mu слайсу M: Outside, если Im mu <= 0 или найден свидетель недискретности;
        Inside, если поиск Боудича не отверг и mu выше трассированной границы с запасом; иначе Unknown.
        """
        mu = complex(mu)
        if mu.imag <= 0:
            return MembershipReport(mu=mu, verdict=MembershipVerdict.OUTSIDE, reason="Im mu <= 0")
        rep = maskit_rep(mu)
        bowditch = BowditchTester(depth=depth).test(rep)
        if bowditch.kind == BowditchVerdictKind.REJECTED:
            return MembershipReport(
                mu=mu, verdict=MembershipVerdict.OUTSIDE, bowditch=bowditch.kind,
                reason=f"Боудич: {bowditch.reason}",
            )
        shimizu = shimizu_leutbecher_filter(rep, numeric_settings.shimizu_word_length)
        if shimizu.violation is not None:
            return MembershipReport(
                mu=mu, verdict=MembershipVerdict.OUTSIDE, bowditch=bowditch.kind,
                reason=f"Шимизу–Лейтбехер: слово {shimizu.violation} имеет |c| < 1/2",
            )
        boundary = self.trace_boundary(q_max or numeric_settings.membership_qmax)
        height = boundary_max_im(boundary, mu.real)
        if bowditch.kind == BowditchVerdictKind.NOT_REJECTED and mu.imag > height + numeric_settings.membership_margin:
            return MembershipReport(
                mu=mu, verdict=MembershipVerdict.INSIDE, bowditch=bowditch.kind, boundary_im=height,
                reason="выше трассированной границы, нарушений не найдено",
            )
        return MembershipReport(
            mu=mu, verdict=MembershipVerdict.UNKNOWN, bowditch=bowditch.kind, boundary_im=height,
            reason="вблизи границы или поиск не дал ответа",
        )
