"""
Проверка критериев принадлежности на выборке в шаре

Критерии:
- caratheodory_test / verify_growth_bounds: класс N_A и оценки роста
- spirallike_test / starlike_test: Df(z)h(z) = Af(z), Re<h(z), z> > 0
- g_starlike_test: <Df(z)^{-1}f(z), z>/||z||² ∈ g(U)
- convexity_test / compute_delta: 1 - Re<Df^{-1}D²f(v,v), z> > 0
- q_class_test / qtilde_test / ktilde_test: классы Q, Q̃, K̃

Провал на выборке доказывает непринадлежность (свидетель: контрпример),
успех лишь подтверждается выборкой.
"""
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from config.settings import config
from src.core.errors import InvariantViolationError, PreconditionViolatedError
from src.core.operator_analysis import as_operator, numerical_radius, numerical_range_extrema
from src.core.polymap import (
    HomogeneousExpansion,
    NormEstimate,
    PolyMap,
    coefficient_functionals,
    evaluate,
    homogeneous_parts,
    jacobian,
    jacobian_solve_batch,
    second_derivative,
)
from src.core.sampling import BallSample, inner, make_sample, tangent_vectors
from src.models.enums import CriterionKind
from src.models.operator_models import Operator
from src.models.report_models import CriterionReport, GRegion
from src.utils.icons import Icon
from src.utils.logger import get_logger

logger = get_logger(__name__)

PointMargin = Callable[[np.ndarray], np.ndarray]
PairMargin = Callable[[np.ndarray, np.ndarray], np.ndarray]


# ============================================================================
# УТОЧНЕНИЕ СВИДЕТЕЛЯ
# ============================================================================

def _unit(x: np.ndarray, dim: int) -> Optional[np.ndarray]:
    vector = x[:dim] + 1j * x[dim:2 * dim]
    norm = np.linalg.norm(vector)
    return vector / norm if norm > 0 else None


def _refine_on_spheres(margin_fn: PointMargin, points: np.ndarray, margins: np.ndarray, starts: int):
    """Нелдер-Мид по сфере каждой из худших точек; возвращает (запас, точка)"""
    dim = points.shape[1]
    best_index = int(np.argmin(margins))
    best_margin, best_point = float(margins[best_index]), points[best_index]
    for index in np.argsort(margins, kind="stable")[:starts]:
        rho = float(np.linalg.norm(points[index]))

        def objective(x, rho=rho):
            unit = _unit(x, dim)
            if unit is None:
                return math.inf
            value = float(margin_fn((rho * unit)[None, :])[0])
            return value if math.isfinite(value) else math.inf

        start = points[index] / rho
        result = minimize(objective, np.concatenate([start.real, start.imag]), method="Nelder-Mead",
                          options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 300 * dim})
        if result.fun < best_margin:
            best_margin, best_point = float(result.fun), rho * _unit(result.x, dim)
    return best_margin, best_point


def _refine_pairs(margin_fn: PairMargin, points: np.ndarray, vectors: np.ndarray, margins: np.ndarray, starts: int):
    """То же для касательных пар (z, v): z на своей сфере, v касателен"""
    dim = points.shape[1]
    best_index = int(np.argmin(margins))
    best = (float(margins[best_index]), points[best_index], vectors[best_index])
    for index in np.argsort(margins, kind="stable")[:starts]:
        rho = float(np.linalg.norm(points[index]))

        def unpack(x, rho=rho):
            unit = _unit(x[:2 * dim], dim)
            raw = x[2 * dim:]
            direction = raw[:dim] + 1j * raw[dim:]
            if unit is None or np.linalg.norm(direction) == 0:
                return None, None
            z = rho * unit
            v = tangent_vectors(z[None, :], direction[None, :])[0]
            return z, v

        def objective(x):
            z, v = unpack(x)
            if z is None:
                return math.inf
            value = float(margin_fn(z[None, :], v[None, :])[0])
            return value if math.isfinite(value) else math.inf

        z0, v0 = points[index] / rho, vectors[index]
        start = np.concatenate([z0.real, z0.imag, v0.real, v0.imag])
        result = minimize(objective, start, method="Nelder-Mead",
                          options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 600 * dim})
        if result.fun < best[0]:
            z, v = unpack(result.x)
            best = (float(result.fun), z, v)
    return best


def _resolve(refine: Optional[bool], tau: Optional[float]) -> Tuple[bool, float]:
    return (config.REFINE_WITNESS if refine is None else refine), (config.TAU_CRIT if tau is None else tau)


def _point_report(
    criterion: CriterionKind,
    margin_fn: PointMargin,
    sample: BallSample,
    refine: bool,
    tau: float,
    details: Optional[Dict] = None,
) -> CriterionReport:
    """Общая редукция min/argmin по точкам выборки"""
    points = sample.points
    margins = margin_fn(points)
    singular = ~np.isfinite(margins)
    details = dict(details or {})
    if np.any(singular):
        witness = points[int(np.argmax(singular))]
        return CriterionReport.failure(
            criterion, "вырожденная матрица Якоби: отображение не локально биголоморфно",
            witness=witness, sample_count=sample.size, radii=sample.radii, details=details,
        )

    index = int(np.argmin(margins))
    margin, witness = float(margins[index]), points[index]
    if refine:
        refined, point = _refine_on_spheres(margin_fn, points, margins, config.REFINE_STARTS)
        details["refinement_gap"] = margin - refined
        margin, witness = refined, point
    report = CriterionReport.from_margin(
        criterion, margin, tau, witness=witness, sample_count=sample.size, radii=sample.radii, details=details,
    )
    _log_report(report)
    return report


def _log_report(report: CriterionReport) -> None:
    logger.info(
        f"{report.verdict.to_icon()} {report.criterion.value}: min margin {report.min_margin:.6g} "
        f"на {report.sample_count} точках"
    )


def _coefficient_failure(criterion: CriterionKind, f: PolyMap, sample: Optional[BallSample]) -> CriterionReport:
    report = CriterionReport.failure(
        criterion, "отображение не нормировано: f(0) != 0 или Df(0) != I",
        sample_count=0, radii=sample.radii if sample is not None else (),
    )
    _log_report(report)
    return report


# ============================================================================
# КЛАСС КАРАТЕОДОРИ И ОЦЕНКИ РОСТА
# ============================================================================

def caratheodory_test(h: PolyMap, A, sample: BallSample, refine: bool = None, tau: float = None) -> CriterionReport:
    """
    h ∈ N_A: h(0) = 0, Dh(0) = A (по коэффициентам) и Re<h(z), z> >= 0

    Args:
        h: Векторное поле
        A: Оператор
        sample: Выборка
        refine: Уточнять свидетеля
        tau: Порог пограничного вердикта
    """
    A = as_operator(A)
    refine, tau = _resolve(refine, tau)
    if h.dim != A.dim or sample.dim != A.dim:
        raise PreconditionViolatedError("Размерности h, A и выборки не совпадают")
    if np.any(h.constant_term != 0) or not np.array_equal(h.linear_part, A.entries):
        return CriterionReport.failure(
            CriterionKind.CARATHEODORY, "h(0) != 0 или Dh(0) != A",
            sample_count=0, radii=sample.radii,
        )

    def margin_fn(points):
        return np.real(inner(evaluate(h, points), points))

    margins = margin_fn(sample.points)
    normalized = margins / np.sum(np.abs(sample.points) ** 2, axis=1)
    return _point_report(
        CriterionKind.CARATHEODORY, margin_fn, sample, refine, tau,
        details={"normalized_margin": float(np.min(normalized))},
    )


def verify_growth_bounds(h: PolyMap, A, sample: BallSample, tau: float = None) -> CriterionReport:
    """
    Оценки роста для h ∈ N_A

    m||z||²(1-||z||)/(1+||z||) <= Re<h(z),z> <= k||z||²(1+||z||)/(1-||z||)
    ||h(z)|| <= 4||z||/(1-||z||)²·|V(A)|

    minMargin: наихудший запас из трех неравенств.
    """
    A = as_operator(A)
    _, tau = _resolve(False, tau)
    membership = caratheodory_test(h, A, sample, refine=False, tau=tau)
    if membership.reason is not None:
        return CriterionReport.failure(
            CriterionKind.GROWTH, f"h не в N_A: {membership.reason}", sample_count=0, radii=sample.radii,
        )

    m, k = numerical_range_extrema(A)
    vr = numerical_radius(A)
    points = sample.points
    r = np.linalg.norm(points, axis=1)
    values = evaluate(h, points)
    real_part = np.real(inner(values, points))
    lower = real_part - m * r ** 2 * (1 - r) / (1 + r)
    upper = k * r ** 2 * (1 + r) / (1 - r) - real_part
    norm_bound = 4 * r / (1 - r) ** 2 * vr - np.linalg.norm(values, axis=1)
    slacks = np.stack([lower, upper, norm_bound])
    worst = np.min(slacks, axis=0)
    index = int(np.argmin(worst))

    report = CriterionReport.from_margin(
        CriterionKind.GROWTH, float(worst[index]), tau,
        witness=points[index], sample_count=sample.size, radii=sample.radii,
        details={
            "lower_slack": float(np.min(lower)),
            "upper_slack": float(np.min(upper)),
            "norm_slack": float(np.min(norm_bound)),
            "caratheodory_verdict": membership.verdict.value,
        },
    )
    _log_report(report)
    return report


# ============================================================================
# СПИРАЛЕОБРАЗНОСТЬ, ЗВЕЗДНОСТЬ, g-ЗВЕЗДНОСТЬ
# ============================================================================

def spirallike_field(f: PolyMap, A: Operator, points: np.ndarray) -> np.ndarray:
    """h(z) = Df(z)^{-1} A f(z); NaN в вырожденных точках"""
    solutions, _ = jacobian_solve_batch(f, points, A.apply(evaluate(f, points)))
    return solutions


def spirallike_test(
    f: PolyMap,
    A,
    sample: BallSample,
    refine: bool = None,
    tau: float = None,
    criterion: CriterionKind = CriterionKind.SPIRALLIKE,
) -> CriterionReport:
    """
    Спиралеобразность относительно A: Re<Df(z)^{-1}Af(z), z> > 0

    Dh(0) = A следует из Df(0) = I, поэтому проверяется только нормировка.

    Raises:
        PreconditionViolatedError: m(A) <= 0
    """
    A = as_operator(A)
    refine, tau = _resolve(refine, tau)
    if not f.normalized:
        return _coefficient_failure(criterion, f, sample)
    m, _ = numerical_range_extrema(A)
    if m <= 0:
        raise PreconditionViolatedError(f"Спиралеобразность требует m(A) > 0, получено {m:.6g}")

    def margin_fn(points):
        return np.real(inner(spirallike_field(f, A, points), points))

    margins = margin_fn(sample.points)
    normalized = margins / np.sum(np.abs(sample.points) ** 2, axis=1)
    details = {"m": m, "dh0_equals_a": True}
    if np.all(np.isfinite(normalized)):
        details["normalized_margin"] = float(np.min(normalized))
    return _point_report(criterion, margin_fn, sample, refine, tau, details=details)


def starlike_test(f: PolyMap, sample: BallSample, refine: bool = None, tau: float = None) -> CriterionReport:
    """Звездность: спиралеобразность относительно I"""
    return spirallike_test(f, Operator.identity(f.dim), sample, refine, tau, criterion=CriterionKind.STARLIKE)


def g_quotient(f: PolyMap, points: np.ndarray) -> np.ndarray:
    """q(z) = <Df(z)^{-1}f(z), z>/||z||²"""
    solutions, _ = jacobian_solve_batch(f, points, evaluate(f, points))
    return inner(solutions, points) / np.sum(np.abs(points) ** 2, axis=1)


def g_starlike_test(
    f: PolyMap,
    region: GRegion,
    sample: BallSample,
    refine: bool = None,
    tau: float = None,
) -> CriterionReport:
    """
    g-звездность: q(z) ∈ g(U)

    - полуплоскость: Re q
    - диск порядка α: 1/(2α) - |q - 1/(2α)|
    - сектор порядка α: απ/2 - |arg q|
    """
    refine, tau = _resolve(refine, tau)
    region = region or GRegion()
    if not f.normalized:
        return _coefficient_failure(CriterionKind.G_STARLIKE, f, sample)

    def margin_fn(points):
        return region.margin(g_quotient(f, points))

    quotients = g_quotient(f, sample.points)
    details = {"region": region.to_dict()}
    if np.all(np.isfinite(quotients)):
        details["max_abs_arg"] = float(np.max(np.abs(np.angle(quotients))))
    return _point_report(CriterionKind.G_STARLIKE, margin_fn, sample, refine, tau, details=details)


# ============================================================================
# ВЫПУКЛОСТЬ
# ============================================================================

def convexity_quantity(f: PolyMap, points: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Re<Df(z)^{-1}D²f(z)(v,v), z>; NaN в вырожденных точках"""
    solutions, _ = jacobian_solve_batch(f, points, second_derivative(f, points, vectors))
    return np.real(inner(solutions, points))


def convexity_test(f: PolyMap, sample: BallSample, refine: bool = None, tau: float = None) -> CriterionReport:
    """
    Выпуклость: 1 - Re<Df(z)^{-1}D²f(z)(v,v), z> > 0, ||v|| = 1, Re<z,v> = 0

    Raises:
        PreconditionViolatedError: В выборке нет касательных пар
    """
    refine, tau = _resolve(refine, tau)
    points, vectors = sample.tangent_points, sample.tangent_vectors
    if points.shape[0] == 0:
        raise PreconditionViolatedError("Проверка выпуклости требует касательных пар")
    if not f.normalized:
        return _coefficient_failure(CriterionKind.CONVEX, f, sample)

    def margin_fn(z, v):
        return 1 - convexity_quantity(f, z, v)

    margins = margin_fn(points, vectors)
    count = points.shape[0]
    if np.any(~np.isfinite(margins)):
        index = int(np.argmax(~np.isfinite(margins)))
        return CriterionReport.failure(
            CriterionKind.CONVEX, "вырожденная матрица Якоби: отображение не локально биголоморфно",
            witness=points[index], witness_vector=vectors[index], sample_count=count, radii=sample.radii,
        )

    index = int(np.argmin(margins))
    margin, witness, witness_vector = float(margins[index]), points[index], vectors[index]
    details: Dict = {}
    if refine:
        refined, z, v = _refine_pairs(margin_fn, points, vectors, margins, config.REFINE_STARTS)
        details["refinement_gap"] = margin - refined
        margin, witness, witness_vector = refined, z, v
    report = CriterionReport.from_margin(
        CriterionKind.CONVEX, margin, tau, witness=witness, witness_vector=witness_vector,
        sample_count=count, radii=sample.radii, details=details,
    )
    _log_report(report)
    return report


def estimate_delta(
    f: PolyMap,
    r: float,
    budget: int = 4000,
    seed: int = None,
    spheres: int = 8,
    starts: int = None,
) -> NormEstimate:
    """
    δ = max Re<Df(z)^{-1}D²f(z)(v,v), z> по ||z|| <= r, ||v|| = 1, Re<z,v> = 0

    Выборка касательных пар на сферах радиусов r/spheres, ..., r и
    уточнение Нелдер-Мидом. Значение: нижняя граница.

    Raises:
        PreconditionViolatedError: r вне (0, 1)
    """
    if not 0 < r < 1:
        raise PreconditionViolatedError(f"Радиус должен быть в (0, 1), получено {r}")
    starts = config.REFINE_STARTS if starts is None else starts
    radii = tuple(r * (i + 1) / spheres for i in range(spheres))
    sample = make_sample(f.dim, radii, per_sphere=1, tangent_count=max(budget // spheres, 1), seed=seed)
    values = convexity_quantity(f, sample.tangent_points, sample.tangent_vectors)
    if np.any(~np.isfinite(values)):
        return NormEstimate(math.inf, math.inf, 0.0, False)
    sampled = float(np.max(values))

    refined, _, _ = _refine_pairs(
        lambda z, v: -convexity_quantity(f, z, v),
        sample.tangent_points, sample.tangent_vectors, -values, starts,
    )
    value = max(sampled, -refined)
    return NormEstimate(value, sampled, value - sampled, False)


def compute_delta(f: PolyMap, r: float, budget: int = 4000, seed: int = None) -> float:
    """δ(r): см. estimate_delta"""
    delta = estimate_delta(f, r, budget=budget, seed=seed).value
    logger.debug(f"{Icon.STAT} δ({r:.6g}) = {delta:.10g}")
    return delta


# ============================================================================
# КЛАССЫ Q, Q̃, K̃
# ============================================================================

def derivative_deviation(f: PolyMap, points: np.ndarray) -> np.ndarray:
    """||Df(z) - I|| (спектральная норма) в каждой точке"""
    deviations = jacobian(f, points) - np.eye(f.dim)[None, :, :]
    return np.linalg.norm(deviations, ord=2, axis=(1, 2))


def q_class_test(f: PolyMap, sample: BallSample, refine: bool = None, tau: float = None) -> CriterionReport:
    """Класс Q: 1 - ||Df(z) - I|| > 0; также sup-отклонение и флаг квазирегулярности"""
    refine, tau = _resolve(refine, tau)
    if not f.normalized:
        return _coefficient_failure(CriterionKind.Q_CLASS, f, sample)

    def margin_fn(points):
        return 1 - derivative_deviation(f, points)

    deviation = float(np.max(derivative_deviation(f, sample.points)))
    report = _point_report(CriterionKind.Q_CLASS, margin_fn, sample, refine, tau,
                           details={"sup_deviation": deviation})
    report.details["sup_deviation"] = max(deviation, 1 - report.min_margin)
    report.details["quasiregular"] = report.details["sup_deviation"] < 1
    return report


def _coefficient_report(
    criterion: CriterionKind,
    f: PolyMap,
    expansion: Optional[HomogeneousExpansion],
    tau: Optional[float],
) -> Tuple[CriterionReport, float, float]:
    _, tau = _resolve(False, tau)
    if not f.normalized:
        return _coefficient_failure(criterion, f, None), math.nan, math.nan
    expansion = expansion or homogeneous_parts(f)
    sum_k, sum_k2 = coefficient_functionals(f, expansion)
    margin = 1 - (sum_k if criterion == CriterionKind.QTILDE else sum_k2)
    report = CriterionReport.from_margin(
        criterion, margin, tau,
        details={
            "sum_k": sum_k,
            "sum_k2": sum_k2,
            "degrees": list(expansion.degrees),
            "norms": [estimate.to_dict() for estimate in expansion.norm_estimates],
            "exact_norms": all(estimate.exact for estimate in expansion.norm_estimates),
        },
    )
    _log_report(report)
    return report, sum_k, sum_k2


def qtilde_test(f: PolyMap, expansion: HomogeneousExpansion = None, tau: float = None) -> CriterionReport:
    """Класс Q̃: 1 - Σ k||A_k|| >= 0"""
    report, _, _ = _coefficient_report(CriterionKind.QTILDE, f, expansion, tau)
    return report


def ktilde_test(f: PolyMap, expansion: HomogeneousExpansion = None, tau: float = None) -> CriterionReport:
    """
    Класс K̃: 1 - Σ k²||A_k|| >= 0

    Для членов K̃ проверяется следствие Σ k||A_k|| <= 1/2.

    Raises:
        InvariantViolationError: Член K̃ с Σ k||A_k|| > 1/2
    """
    _, tau_value = _resolve(False, tau)
    report, sum_k, sum_k2 = _coefficient_report(CriterionKind.KTILDE, f, expansion, tau)
    if not report.failed and sum_k > 0.5 + tau_value:
        raise InvariantViolationError(f"Член K̃ с Σ k||A_k|| = {sum_k:.12g} > 1/2")
    return report


# ============================================================================
# ОТКРЫТЫЙ ВОПРОС Q̃ ⊆ S*
# ============================================================================

@dataclass
class CounterexampleCandidate:
    """Отображение из Q̃, не прошедшее проверку звездности (численное свидетельство)"""
    index: int
    qtilde: CriterionReport
    starlike: CriterionReport

    def to_dict(self) -> Dict:
        return {"index": self.index, "qtilde": self.qtilde.to_dict(), "starlike": self.starlike.to_dict()}


def search_qtilde_starlike_counterexample(
    maps: Sequence[PolyMap],
    sample: BallSample,
    refine: bool = None,
) -> List[CounterexampleCandidate]:
    """
    Поиск отображений с Q̃ pass и starlike fail

    Найденные кандидаты: лишь численное свидетельство, не доказательство.
    """
    candidates: List[CounterexampleCandidate] = []
    for index, f in enumerate(maps):
        qtilde = qtilde_test(f)
        if qtilde.failed:
            continue
        starlike = starlike_test(f, sample, refine=refine)
        if starlike.failed:
            logger.warning(f"{Icon.FIND} Кандидат #{index}: Q̃ pass, starlike fail")
            candidates.append(CounterexampleCandidate(index, qtilde, starlike))
    logger.info(f"{Icon.FIND} Проверено {len(maps)} отображений, кандидатов: {len(candidates)}")
    return candidates
