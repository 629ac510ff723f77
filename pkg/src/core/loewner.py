"""
Уравнение Лёвнера для кусочно-постоянных полей Херглотца

∂v/∂t = -h(v, t), v(s) = z интегрируется вложенной парой Рунге-Кутты-Фельберга
4(5): решение продвигается формулой 4-го порядка, разность с 5-м порядком
служит оценкой локальной ошибки. Границы кусков поля всегда являются
концами шагов.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import config
from src.core.automorphisms import AutomorphismWord, normalize
from src.core.criteria import spirallike_test
from src.core.errors import (
    FieldRejectedError,
    IntegrationFailureError,
    InvalidInputError,
    PreconditionViolatedError,
    SingularJacobianError,
    ToleranceUnreachableError,
)
from src.core.operator_analysis import as_operator, matrix_exp, numerical_range_extrema
from src.core.polymap import PolyMap, evaluate, jacobian, solve_linear
from src.core.sampling import BallSample, make_sample
from src.models.enums import GeneratorKind
from src.models.loewner_models import FieldPiece, FlowResult, HerglotzField, ParametricLimitResult
from src.models.operator_models import Operator
from src.utils.icons import Icon
from src.utils.logger import get_logger

logger = get_logger(__name__)

Generator = Callable[[np.ndarray], np.ndarray]

# Таблица Бутчера RKF45: узлы (поле автономно на куске, узлы нужны для
# времени сбоя), коэффициенты стадий, веса 4-го порядка,
# разность весов 5-го и 4-го порядков
_NODES = (0.0, 1 / 4, 3 / 8, 12 / 13, 1.0, 1 / 2)
_STAGES = (
    (),
    (1 / 4,),
    (3 / 32, 9 / 32),
    (1932 / 2197, -7200 / 2197, 7296 / 2197),
    (439 / 216, -8.0, 3680 / 513, -845 / 4104),
    (-8 / 27, 2.0, -3554 / 2565, 1859 / 4104, -11 / 40),
)
_WEIGHTS = (25 / 216, 0.0, 1408 / 2565, 2197 / 4104, -1 / 5, 0.0)
_ERROR = (1 / 360, 0.0, -128 / 4275, -2197 / 75240, 1 / 50, 2 / 55)

# Шаг удваивается, если ошибка меньше tol/_GROWTH_MARGIN
_GROWTH_MARGIN = 32.0


# ============================================================================
# ГЕНЕРАТОРЫ
# ============================================================================

def piece_generator(piece: FieldPiece, A: Operator) -> Generator:
    """
    h(·) на куске: Az или Df(z)^{-1} A f(z)

    Raises (при вызове):
        SingularJacobianError: Df(z) вырождена
    """
    if piece.kind == GeneratorKind.LINEAR:
        return lambda v: A.entries @ v

    f = piece.map

    def spirallike(v: np.ndarray) -> np.ndarray:
        return solve_linear(jacobian(f, v), A.entries @ evaluate(f, v), point=v)

    return spirallike


# ============================================================================
# ИНТЕГРАТОР
# ============================================================================

class LoewnerIntegrator:
    """
    Адаптивный RKF45 для ∂v/∂t = -h(v, t) на кусочно-постоянном поле

    Шаг делится пополам при отказе и удваивается при запасе точности.
    Ошибка шага сравнивается с tol·||v||: при ||v|| < 1 это не слабее
    абсолютного допуска и сохраняет относительную точность при v → 0,
    где e^{tA} усиливает ошибку.

    Example:
        >>> integrator = LoewnerIntegrator(field, tol=1e-10)
        >>> result = integrator.run(np.array([0.3, 0.1]), 0.0, 1.0)
    """

    def __init__(self, field: HerglotzField, tol: float = None, max_steps: int = None):
        self.field = field
        self.tol = config.FLOW_TOL if tol is None else float(tol)
        self.max_steps = config.FLOW_MAX_STEPS if max_steps is None else int(max_steps)
        if not (math.isfinite(self.tol) and self.tol > 0):
            raise InvalidInputError(f"Допуск должен быть > 0, получено {tol}")
        self._generators = [piece_generator(piece, field.A) for piece in field.pieces]

        self.steps = 0
        self.rejected = 0
        self.max_local_error = 0.0
        self.max_norm_increase = -math.inf
        self.notes: List[str] = []

    def run(self, z, s: float, t: float) -> FlowResult:
        """
        v(z, s, t)

        Raises:
            InvalidInputError: ||z|| >= 1, s/t вне [0, T] или s > t
            IntegrationFailureError: Вырожденная Df в текущем состоянии
            ToleranceUnreachableError: Исчезновение шага или исчерпан лимит шагов
        """
        z = self._check_start(z)
        s, t = self._check_interval(s, t)
        start_norm = float(np.linalg.norm(z))
        v = z.copy()

        if t > s:
            boundaries = self.field.boundaries
            step = (t - s) / config.FLOW_INITIAL_DIVISOR
            for index, piece in enumerate(self.field.pieces):
                left, right = max(boundaries[index], s), min(boundaries[index + 1], t)
                if right <= left:
                    continue
                v, step = self._integrate_piece(self._generators[index], v, left, right, step)

        if self.max_norm_increase == -math.inf:
            self.max_norm_increase = 0.0
        value_norm = float(np.linalg.norm(v))
        if value_norm > start_norm + self.tol:
            self._note(f"Нарушено свойство Шварца: ||v|| = {value_norm:.12g} > ||z|| = {start_norm:.12g}")

        return FlowResult(
            value=v,
            steps=self.steps,
            max_local_error=self.max_local_error,
            rejected_steps=self.rejected,
            start_norm=start_norm,
            max_norm_increase=self.max_norm_increase,
            s=s,
            t=t,
            notes=tuple(self.notes),
        )

    def _check_start(self, z) -> np.ndarray:
        z = np.array(z, dtype=complex)
        if z.shape != (self.field.dim,) or not np.all(np.isfinite(z)):
            raise InvalidInputError(f"Начальная точка должна быть конечным вектором размерности {self.field.dim}")
        if not np.linalg.norm(z) < 1:
            raise InvalidInputError(f"Начальная точка вне шара: ||z|| = {np.linalg.norm(z):.6g}")
        return z

    def _check_interval(self, s: float, t: float) -> Tuple[float, float]:
        s, t = float(s), float(t)
        total = self.field.total_time
        slack = 1e-12 * max(total, 1.0)
        if not (0 <= s <= t <= total + slack):
            raise InvalidInputError(f"Требуется 0 <= s <= t <= T: s={s}, t={t}, T={total}")
        return s, min(t, total)

    def _note(self, message: str) -> None:
        if message not in self.notes:
            self.notes.append(message)
            logger.warning(f"{Icon.WARNING} {message}")

    def _stages(self, rhs: Generator, v: np.ndarray, k1: np.ndarray, h: float, time: float) -> List[np.ndarray]:
        slopes = [k1]
        for node, row in zip(_NODES[1:], _STAGES[1:]):
            point = v + h * sum(a * k for a, k in zip(row, slopes))
            slopes.append(self._slope(rhs, point, time + node * h))
        return slopes

    def _slope(self, rhs: Generator, v: np.ndarray, time: float) -> np.ndarray:
        try:
            return -rhs(v)
        except SingularJacobianError as exc:
            raise IntegrationFailureError(
                f"Вырожденная матрица Якоби генератора при t={time:.6g}", time=time, state=v,
            ) from exc

    def _integrate_piece(
        self,
        rhs: Generator,
        v: np.ndarray,
        left: float,
        right: float,
        step: float,
    ) -> Tuple[np.ndarray, float]:
        """Интегрирование на [left, right]; возвращает состояние и номинальный шаг"""
        time = left
        while time < right:
            if self.steps + self.rejected >= self.max_steps:
                raise ToleranceUnreachableError(f"Исчерпан лимит шагов {self.max_steps} при t={time:.6g}")

            # k1 зависит только от начала шага и переиспользуется после отказа
            k1 = self._slope(rhs, v, time)
            while True:
                if step < 1e-14 * max(1.0, abs(time)):
                    raise ToleranceUnreachableError(
                        f"Шаг {step:.3e} меньше машинной точности при t={time:.6g}, tol={self.tol:.1e}"
                    )
                last = step >= right - time
                h = right - time if last else step
                slopes = self._stages(rhs, v, k1, h, time)
                candidate = v + h * sum(b * k for b, k in zip(_WEIGHTS, slopes))
                error = float(np.linalg.norm(h * sum(e * k for e, k in zip(_ERROR, slopes))))
                if not (np.all(np.isfinite(candidate)) and math.isfinite(error)):
                    raise IntegrationFailureError(
                        f"Нефинитное состояние при t={time:.6g}", time=time, state=v,
                    )
                scale = max(float(np.linalg.norm(v)), float(np.linalg.norm(candidate)))
                if error <= self.tol * scale:
                    break
                self.rejected += 1
                step /= 2

            increase = float(np.linalg.norm(candidate) - np.linalg.norm(v))
            self.max_norm_increase = max(self.max_norm_increase, increase)
            if increase > 10 * self.tol:
                self._note(f"Рост нормы на шаге: {increase:.3e} при t={time:.6g}")

            self.max_local_error = max(self.max_local_error, error)
            self.steps += 1
            v = candidate
            time = right if last else time + h
            if error <= self.tol * scale / _GROWTH_MARGIN:
                step *= 2
        return v, step


# ============================================================================
# ОПЕРАЦИИ
# ============================================================================

def flow(field: HerglotzField, z, s: float = 0.0, t: float = None, tol: float = None) -> FlowResult:
    """
    Переходное отображение v(z, s, t) поля Херглотца

    Args:
        field: Поле
        z: Начальная точка, ||z|| < 1
        s: Начальный момент
        t: Конечный момент (по умолчанию T)
        tol: Допуск локальной ошибки

    Returns:
        FlowResult
    """
    t = field.total_time if t is None else t
    result = LoewnerIntegrator(field, tol).run(z, s, t)
    logger.debug(
        f"{Icon.FLOW} v(z,{result.s:g},{result.t:g}): {result.steps} шагов, "
        f"{result.rejected_steps} отказов, ошибка {result.max_local_error:.2e}"
    )
    return result


def flow_many(
    field: HerglotzField,
    points,
    s: float = 0.0,
    t: float = None,
    tol: float = None,
    jobs: int = None,
) -> List[FlowResult]:
    """Потоки из нескольких начальных точек; порядок результатов совпадает с порядком точек"""
    points = np.atleast_2d(np.asarray(points, dtype=complex))
    workers = config.resolve_jobs(jobs)
    if workers == 1 or len(points) == 1:
        return [flow(field, z, s, t, tol) for z in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda z: flow(field, z, s, t, tol), points))


def reachable_eval(field: HerglotzField, z, tol: float = None) -> np.ndarray:
    """Элемент достижимого семейства: e^{TA} v(z, 0, T)"""
    value = flow(field, z, 0.0, field.total_time, tol).value
    return matrix_exp(field.A, field.total_time).apply(value)


def reachable_growth_bound(A, T: float, z) -> np.ndarray:
    """
    Оценка e^{T(k(A) - m(A))} ||z|| / (1 - ||z||)^2 для элементов достижимого семейства

    Args:
        A: Оператор
        T: Время
        z: Точка (n,) или пакет (N, n)
    """
    m, k = numerical_range_extrema(as_operator(A))
    r = np.linalg.norm(np.asarray(z, dtype=complex), axis=-1)
    return math.exp(T * (k - m)) * r / (1 - r) ** 2


def _doubling_times(t_max: float) -> List[float]:
    times, t = [], 1.0
    while t < t_max:
        times.append(t)
        t *= 2
    times.append(float(t_max))
    return times


def parametric_limit(
    field: HerglotzField,
    z,
    t_max: float = None,
    tol: float = None,
    flow_tol: float = None,
) -> ParametricLimitResult:
    """
    Предел e^{tA} v(z, 0, t) при t → ∞ на конечном горизонте

    После T поле продолжается линейным генератором h(z) = Az. Значения
    берутся при t = 1, 2, 4, ..., t_max; состояние переносится от точки
    к точке по полугрупповому свойству.

    Args:
        field: Поле на [0, T]
        z: Точка
        t_max: Горизонт (по умолчанию PARAMETRIC_T_MAX)
        tol: Допуск сходимости соседних значений
        flow_tol: Допуск интегрирования

    Returns:
        ParametricLimitResult; converged=False, если допуск не достигнут к t_max
    """
    t_max = config.PARAMETRIC_T_MAX if t_max is None else float(t_max)
    tol = config.PARAMETRIC_TOL if tol is None else float(tol)
    if not t_max > 0:
        raise InvalidInputError(f"Горизонт должен быть > 0, получено {t_max}")
    extended = field.extended(t_max - field.total_time) if t_max > field.total_time else field

    v = np.array(z, dtype=complex)
    previous_time, previous_value = 0.0, None
    value = v
    history: List[Tuple[float, float]] = []
    converged = False
    for time in _doubling_times(t_max):
        v = flow(extended, v, previous_time, time, flow_tol).value
        value = matrix_exp(field.A, time).apply(v)
        if previous_value is not None:
            difference = float(np.linalg.norm(value - previous_value))
            history.append((time, difference))
            if difference < tol:
                converged = True
                previous_time = time
                break
        previous_time, previous_value = time, value

    if not converged:
        logger.warning(f"{Icon.WARNING} parametric_limit не сошелся к t={t_max:g} (tol={tol:.1e})")
    return ParametricLimitResult(value=value, converged=converged, t=previous_time, history=tuple(history))


def semigroup_check(field: HerglotzField, z, s: float, t: float, u: float, tol: float = None) -> float:
    """
    ||v(z,s,u) - v(v(z,s,t),t,u)||

    Raises:
        InvalidInputError: Нарушено 0 <= s <= t <= u <= T
    """
    if not (0 <= s <= t <= u):
        raise InvalidInputError(f"Требуется 0 <= s <= t <= u: s={s}, t={t}, u={u}")
    tol = config.FLOW_TOL if tol is None else tol
    direct = flow(field, z, s, u, tol).value
    middle = flow(field, z, s, t, tol).value
    composed = flow(field, middle, t, u, tol).value
    residual = float(np.linalg.norm(direct - composed))
    if residual > 10 * tol:
        logger.warning(f"{Icon.WARNING} Невязка полугруппы {residual:.3e} > 10·tol")
    return residual


def _field_sample(dim: int, sample: Optional[BallSample]) -> BallSample:
    if sample is not None:
        return sample
    return make_sample(dim, per_sphere=config.FIELD_PER_SPHERE, tangent_count=0)


def subordination_check(
    f: PolyMap,
    A,
    z,
    t: float,
    tol: float = None,
    sample: BallSample = None,
) -> float:
    """
    ||f(v(z,0,t)) - e^{-tA} f(z)|| для поля h = Df^{-1}Af

    Raises:
        PreconditionViolatedError: f не проходит spirallike_test относительно A
    """
    A = as_operator(A)
    report = spirallike_test(f, A, _field_sample(f.dim, sample), refine=False)
    if report.failed:
        raise PreconditionViolatedError(
            f"f не спиралеобразно относительно A (запас {report.min_margin:.6g})"
        )
    if t == 0:
        return 0.0
    field = HerglotzField(A, (FieldPiece(t, GeneratorKind.SPIRALLIKE, map=f),))
    value = flow(field, z, 0.0, t, tol).value
    residual = float(np.linalg.norm(evaluate(f, value) - matrix_exp(A, -t).apply(evaluate(f, z))))
    tol = config.FLOW_TOL if tol is None else tol
    if residual > 10 * tol:
        logger.warning(f"{Icon.WARNING} Невязка подчинения {residual:.3e} > 10·tol при t={t:g}")
    return residual


# ============================================================================
# ПОСТРОЕНИЕ ПОЛЕЙ
# ============================================================================

def verify_field(field: HerglotzField, sample: BallSample = None) -> HerglotzField:
    """
    Проверка каждого спиралеобразного куска на выборке

    Raises:
        FieldRejectedError: Кусок не проходит spirallike_test (с отчетом и номером куска)
    """
    sample = _field_sample(field.dim, sample)
    for index, piece in enumerate(field.pieces):
        if piece.kind != GeneratorKind.SPIRALLIKE:
            continue
        report = spirallike_test(piece.map, field.A, sample, refine=False)
        if report.failed:
            raise FieldRejectedError(
                f"Кусок {index} отклонен: запас спиралеобразности {report.min_margin:.6g}",
                report=report,
                piece_index=index,
            )
    logger.info(f"{Icon.SUCCESS} Поле принято: {len(field.pieces)} кусков, T={field.total_time:g}")
    return field


def field_from_automorphisms(
    pieces: Sequence[Tuple[float, AutomorphismWord]],
    A,
    sample: BallSample = None,
) -> HerglotzField:
    """
    Поле из нормированных автоморфизмов: h(z) = Dα(z)^{-1} A α(z) на каждом куске

    Тождественное α дает линейный кусок h(z) = Az.

    Raises:
        FieldRejectedError: Какое-то α не спиралеобразно относительно A
    """
    A = as_operator(A)
    built = []
    for duration, word in pieces:
        normalized = word if word.normalized else normalize(word)
        alpha = normalized.polymap
        if alpha.max_degree <= 1:
            built.append(FieldPiece(duration, GeneratorKind.LINEAR, word=normalized))
        else:
            built.append(FieldPiece(duration, GeneratorKind.SPIRALLIKE, map=alpha, word=normalized))
    return verify_field(HerglotzField(A, tuple(built)), sample)
