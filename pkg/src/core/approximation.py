"""
Аппроксимация растяжениями автоморфизмов

На шаге m выбирается индекс k_m >= k_{m-1}, для которого
φ_m(z) = ψ_{k_m}(r_m z)/r_m проходит критерий; затем измеряется
равномерное расстояние φ_m до цели f на тестовых радиусах.

Селекторы:
- select_spirallike / select_g_starlike: по запасу критерия растяжения
- select_convex: δ(r) и порог 1 - δ для отклонения вторых производных
- select_q: ||Dψ(rz) - I|| <= (1 + r)/2
- select_qtilde / select_ktilde: бюджет равномерного расстояния ε(r)

Все селекторы перепроверяют выбранное растяжение модулем criteria.
"""
import math
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from config.settings import config
from src.core.automorphisms import AutomorphismWord, ShearFactor, normalize
from src.core.criteria import (
    compute_delta,
    convexity_test,
    derivative_deviation,
    g_starlike_test,
    ktilde_test,
    q_class_test,
    qtilde_test,
    spirallike_test,
    starlike_test,
)
from src.core.errors import (
    BallChainError,
    InvalidInputError,
    PreconditionViolatedError,
    UnsupportedOperationError,
)
from src.core.polymap import (
    PolyMap,
    compose,
    dilate,
    jacobian_solve_batch,
    second_derivative,
    sup_distance,
)
from src.core.sampling import BallSample, make_sample, sphere_directions
from src.models.approximation_models import (
    NO_ADMISSIBLE_INDEX,
    ApproximationRun,
    CriterionSpec,
    DilationSchedule,
    Selection,
)
from src.models.enums import CriterionKind, FactorKind
from src.models.report_models import CriterionReport
from src.utils.icons import Icon
from src.utils.logger import LogBlock, get_logger

logger = get_logger(__name__)

Candidate = Union[AutomorphismWord, PolyMap]
# (отклонение кандидата, отчет проверки растяжения) для индекса k
Assessment = Callable[[PolyMap, PolyMap], Tuple[Optional[float], CriterionReport]]


# ============================================================================
# КАНДИДАТЫ
# ============================================================================

def candidate_map(candidate: Candidate) -> PolyMap:
    """
    ψ_k как нормированное PolyMap

    Слово нормируется (normalize), PolyMap должно быть нормировано.

    Raises:
        PreconditionViolatedError: PolyMap не нормировано
    """
    if isinstance(candidate, AutomorphismWord):
        word = candidate if candidate.normalized else normalize(candidate)
        return word.polymap
    if not candidate.normalized:
        raise PreconditionViolatedError("Кандидат должен быть нормированным: f(0) = 0, Df(0) = I")
    return candidate


def perturbed_candidates(
    word: AutomorphismWord,
    scales: Sequence[float],
    seed: int = None,
) -> List[AutomorphismWord]:
    """
    Слова с возмущенными коэффициентами сдвигов

    Для каждого масштаба ε к каждому коэффициенту сдвига прибавляется
    ε·u, |u| = 1, со случайной фазой. Линейные множители не меняются.

    Examples:
        >>> words = perturbed_candidates(shear(2, 0, {(0, 2): 0.3}), [1e-3, 0.0])
        >>> len(words)
        2
    """
    seed = config.DEFAULT_SEED if seed is None else seed
    result = []
    for index, scale in enumerate(scales):
        rng = np.random.default_rng([seed, index])
        factors = []
        for factor in word.factors:
            if factor.kind == FactorKind.LINEAR:
                factors.append(factor)
                continue
            poly = {
                exponent: coefficient + scale * np.exp(2j * math.pi * rng.random())
                for exponent, coefficient in sorted(factor.poly.items())
            }
            factors.append(ShearFactor(factor.kind, factor.dim, axis=factor.axis, poly=poly, scale=factor.scale))
        result.append(AutomorphismWord(word.dim, tuple(factors), word.normalized))
    return result


def truncated_candidates(f: PolyMap) -> List[PolyMap]:
    """Тейлоровские срезки f степеней 2..deg f (последняя совпадает с f)"""
    if not f.normalized:
        raise PreconditionViolatedError("Срезки строятся для нормированных отображений")
    return [f.truncate(degree) for degree in range(2, max(f.max_degree, 2) + 1)]


# ============================================================================
# БЮДЖЕТЫ ε(r) ДЛЯ Q̃ И K̃
# ============================================================================

def qtilde_series(x: float) -> float:
    """Σ_{k>=2} k x^k = x²(2 - x)/(1 - x)²"""
    return x * x * (2 - x) / (1 - x) ** 2


def ktilde_series(x: float) -> float:
    """Σ_{k>=2} k² x^k = x(1 + x)/(1 - x)³ - x"""
    return x * (1 + x) / (1 - x) ** 3 - x


def _series_argument(r: float) -> float:
    if not 0 < r < 1:
        raise InvalidInputError(f"Радиус должен быть в (0, 1), получено {r}")
    return 2 * r / (1 + r)


def qtilde_epsilon(r: float) -> float:
    """
    ε(r) из (ε/r)·Σ_{k>=2} k x^k = (1 - r)/2, x = 2r/(1 + r)

    Examples:
        >>> round(qtilde_epsilon(1 / 3), 12) == round(2 / 27, 12)
        True
    """
    return r * (1 - r) / (2 * qtilde_series(_series_argument(r)))


def ktilde_epsilon(r: float) -> float:
    """ε(r) из (ε/r)·Σ_{k>=2} k² x^k = (1 - r)/2"""
    return r * (1 - r) / (2 * ktilde_series(_series_argument(r)))


# ============================================================================
# ОБЩИЙ ЦИКЛ ВЫБОРА
# ============================================================================

def _require_target(report: CriterionReport, name: str) -> None:
    if not report.passed:
        raise PreconditionViolatedError(
            f"Цель не проходит критерий {name}: вердикт {report.verdict.value}, запас {report.min_margin:.6g}"
        )


def _within(discrepancy: Optional[float], threshold: float, strict: bool) -> bool:
    if discrepancy is None:
        return False
    return discrepancy < threshold if strict else discrepancy <= threshold


def _select(
    candidates: Sequence[Candidate],
    r: float,
    start: int,
    assess: Assessment,
    threshold: Optional[float] = None,
    step: int = 0,
    strict: bool = False,
) -> Selection:
    """
    Наименьший k >= start, для которого assess допускает кандидата

    assess возвращает отклонение (None, если порог не применяется) и отчет
    проверки растяжения; кандидат допускается, если отклонение в пределах
    порога (строго при strict) и отчет PASS.
    """
    for k in range(max(start, 0), len(candidates)):
        psi = candidate_map(candidates[k])
        phi = dilate(psi, r)
        discrepancy, report = assess(psi, phi)
        if threshold is not None and not _within(discrepancy, threshold, strict):
            logger.debug(f"{Icon.SELECT} r={r:.6g}: k={k} отклонен, отклонение {discrepancy} > {threshold:.6g}")
            continue
        if report is not None and not report.passed:
            logger.debug(f"{Icon.SELECT} r={r:.6g}: k={k} отклонен, запас {report.min_margin:.6g}")
            continue
        logger.info(f"{Icon.SELECT} r={r:.6g}: выбран k={k}")
        return Selection(
            step=step, radius=r, index=k,
            margin=report.min_margin if report is not None else None,
            threshold=threshold, discrepancy=discrepancy, report=report,
        )
    logger.info(f"{Icon.SELECT} r={r:.6g}: допустимого индекса нет")
    return Selection(step=step, radius=r, threshold=threshold, reason=NO_ADMISSIBLE_INDEX)


def _default_sample(dim: int, sample: Optional[BallSample]) -> BallSample:
    return sample if sample is not None else make_sample(dim)


# ============================================================================
# СЕЛЕКТОРЫ
# ============================================================================

def select_spirallike(
    f: PolyMap,
    candidates: Sequence[Candidate],
    A,
    r: float,
    sample: BallSample = None,
    start: int = 0,
    verify_target: bool = True,
    step: int = 0,
) -> Selection:
    """
    Наименьший k >= start с dilate(ψ_k, r), спиралеобразным относительно A

    Raises:
        PreconditionViolatedError: f не спиралеобразно относительно A
    """
    sample = _default_sample(f.dim, sample)
    if verify_target:
        _require_target(spirallike_test(f, A, sample, refine=False), "spirallike")
    return _select(candidates, r, start, lambda psi, phi: (None, spirallike_test(phi, A, sample, refine=False)),
                   step=step)


def select_starlike(
    f: PolyMap,
    candidates: Sequence[Candidate],
    r: float,
    sample: BallSample = None,
    start: int = 0,
    verify_target: bool = True,
    step: int = 0,
) -> Selection:
    """Спиралеобразность относительно I"""
    sample = _default_sample(f.dim, sample)
    if verify_target:
        _require_target(starlike_test(f, sample, refine=False), "starlike")
    return _select(candidates, r, start, lambda psi, phi: (None, starlike_test(phi, sample, refine=False)),
                   step=step)


def select_g_starlike(
    f: PolyMap,
    candidates: Sequence[Candidate],
    region,
    r: float,
    sample: BallSample = None,
    start: int = 0,
    verify_target: bool = True,
    step: int = 0,
) -> Selection:
    """Наименьший k >= start с g-звездным dilate(ψ_k, r); используются измеренные запасы"""
    sample = _default_sample(f.dim, sample)
    if verify_target:
        _require_target(g_starlike_test(f, region, sample, refine=False), "g-starlike")
    return _select(candidates, r, start,
                   lambda psi, phi: (None, g_starlike_test(phi, region, sample, refine=False)), step=step)


def second_order_discrepancy(psi: PolyMap, f: PolyMap, r: float, sample: BallSample) -> float:
    """
    max ||Dψ^{-1}D²ψ(v,v) - Df^{-1}D²f(v,v)|| по ||z|| <= r, ||v|| = 1

    Точки z: выборка, сжатая в r; направления v: отдельный поток Соболя.
    Бесконечность, если одна из матриц Якоби вырождена.
    """
    points = sample.scaled(r).points
    directions = sphere_directions(f.dim, len(points), sample.seed, stream=3)
    mine, singular_mine = jacobian_solve_batch(psi, points, second_derivative(psi, points, directions))
    theirs, singular_theirs = jacobian_solve_batch(f, points, second_derivative(f, points, directions))
    if np.any(singular_mine) or np.any(singular_theirs):
        return math.inf
    return float(np.max(np.linalg.norm(mine - theirs, axis=1)))


def select_convex(
    f: PolyMap,
    candidates: Sequence[Candidate],
    r: float,
    sample: BallSample = None,
    start: int = 0,
    verify_target: bool = True,
    step: int = 0,
) -> Selection:
    """
    Порог 1 - δ(r) для отклонения вторых производных

    Raises:
        PreconditionViolatedError: f не выпукло или δ(r) >= 1
    """
    sample = _default_sample(f.dim, sample)
    if verify_target:
        _require_target(convexity_test(f, sample, refine=False), "convex")
    delta = compute_delta(f, r, seed=sample.seed)
    if delta >= 1:
        raise PreconditionViolatedError(f"δ({r:.6g}) = {delta:.6g} >= 1: цель не выпукла строго на радиусе r")

    def assess(psi, phi):
        return second_order_discrepancy(psi, f, r, sample), convexity_test(phi, sample, refine=False)

    return _select(candidates, r, start, assess, threshold=1 - delta, step=step, strict=True)


def select_q(
    f: PolyMap,
    candidates: Sequence[Candidate],
    r: float,
    sample: BallSample = None,
    start: int = 0,
    verify_target: bool = True,
    step: int = 0,
) -> Selection:
    """Допуск при max ||Dψ_k(rz) - I|| <= (1 + r)/2 на выборке"""
    sample = _default_sample(f.dim, sample)
    if verify_target:
        _require_target(q_class_test(f, sample, refine=False), "q")

    def assess(psi, phi):
        deviation = float(np.max(derivative_deviation(psi, r * sample.points)))
        return deviation, q_class_test(phi, sample, refine=False)

    return _select(candidates, r, start, assess, threshold=(1 + r) / 2, step=step)


def _coefficient_selector(
    test: Callable[[PolyMap], CriterionReport],
    epsilon: float,
    f: PolyMap,
    candidates: Sequence[Candidate],
    r: float,
    start: int,
    step: int,
) -> Selection:
    rho = (1 + r) / 2

    def assess(psi, phi):
        distance = sup_distance(psi, f, rho)
        return distance.upper, test(phi)

    return _select(candidates, r, start, assess, threshold=epsilon, step=step)


def select_qtilde(
    f: PolyMap,
    candidates: Sequence[Candidate],
    r: float,
    start: int = 0,
    verify_target: bool = True,
    step: int = 0,
) -> Selection:
    """
    Допуск при sup_{||z|| <= (1+r)/2} ||ψ_k - f|| <= ε(r)

    Расстояние берется по верхней оценке Σ ||P_k|| ρ^k, растяжение
    перепроверяется qtilde_test.
    """
    if verify_target:
        _require_target(qtilde_test(f), "qtilde")
    return _coefficient_selector(qtilde_test, qtilde_epsilon(r), f, candidates, r, start, step)


def select_ktilde(
    f: PolyMap,
    candidates: Sequence[Candidate],
    r: float,
    start: int = 0,
    verify_target: bool = True,
    step: int = 0,
) -> Selection:
    """То же для K̃ с рядом Σ k² x^k"""
    if verify_target:
        _require_target(ktilde_test(f), "ktilde")
    return _coefficient_selector(ktilde_test, ktilde_epsilon(r), f, candidates, r, start, step)


# ============================================================================
# ПРОГОН
# ============================================================================

def criterion_report(
    f: PolyMap,
    criterion: CriterionSpec,
    sample: BallSample,
    refine: bool = False,
    tau: float = None,
) -> CriterionReport:
    """Проверка f выбранным критерием"""
    kind = criterion.kind
    if kind == CriterionKind.SPIRALLIKE:
        return spirallike_test(f, criterion.operator, sample, refine=refine, tau=tau)
    if kind == CriterionKind.STARLIKE:
        return starlike_test(f, sample, refine=refine, tau=tau)
    if kind == CriterionKind.G_STARLIKE:
        return g_starlike_test(f, criterion.region, sample, refine=refine, tau=tau)
    if kind == CriterionKind.CONVEX:
        return convexity_test(f, sample, refine=refine, tau=tau)
    if kind == CriterionKind.Q_CLASS:
        return q_class_test(f, sample, refine=refine, tau=tau)
    if kind == CriterionKind.QTILDE:
        return qtilde_test(f, tau=tau)
    if kind == CriterionKind.KTILDE:
        return ktilde_test(f, tau=tau)
    raise UnsupportedOperationError(f"Критерий {kind.value} не применяется к отображениям")


def _run_selector(
    f: PolyMap,
    candidates: Sequence[Candidate],
    criterion: CriterionSpec,
    r: float,
    sample: BallSample,
    start: int,
    step: int,
) -> Selection:
    kind = criterion.kind
    common = {"start": start, "verify_target": False, "step": step}
    if kind == CriterionKind.SPIRALLIKE:
        return select_spirallike(f, candidates, criterion.operator, r, sample, **common)
    if kind == CriterionKind.STARLIKE:
        return select_starlike(f, candidates, r, sample, **common)
    if kind == CriterionKind.G_STARLIKE:
        return select_g_starlike(f, candidates, criterion.region, r, sample, **common)
    if kind == CriterionKind.CONVEX:
        return select_convex(f, candidates, r, sample, **common)
    if kind == CriterionKind.Q_CLASS:
        return select_q(f, candidates, r, sample, **common)
    if kind == CriterionKind.QTILDE:
        return select_qtilde(f, candidates, r, **common)
    if kind == CriterionKind.KTILDE:
        return select_ktilde(f, candidates, r, **common)
    raise UnsupportedOperationError(f"Для критерия {kind.value} нет селектора")


def run_approximation(
    f: PolyMap,
    candidates: Sequence[Candidate],
    criterion: CriterionSpec,
    schedule: DilationSchedule = None,
    test_radii: Sequence[float] = None,
    sample: BallSample = None,
    refine: bool = False,
) -> ApproximationRun:
    """
    Полный прогон: выбор k_m по расписанию и расстояния φ_m до f

    Ошибки селектора на шаге m записываются в Selection.reason, прогон
    продолжается. Индексы не убывают по m.

    Raises:
        PreconditionViolatedError: f не проходит критерий
    """
    schedule = schedule or DilationSchedule.default(config.SCHEDULE_LENGTH)
    test_radii = tuple(config.TEST_RADII if test_radii is None else test_radii)
    sample = _default_sample(f.dim, sample)

    target_report = criterion_report(f, criterion, sample, refine=refine)
    _require_target(target_report, criterion.kind.value)
    run = ApproximationRun(
        target=f,
        criterion=criterion,
        schedule=schedule,
        candidate_count=len(candidates),
        test_radii=test_radii,
        target_report=target_report,
    )

    previous = 0
    with LogBlock(f"Аппроксимация ({criterion.kind.value}, {len(candidates)} кандидатов)"):
        for step, r in enumerate(schedule.radii, start=1):
            try:
                selection = _run_selector(f, candidates, criterion, r, sample, previous, step)
            except BallChainError as exc:
                logger.warning(f"{Icon.WARNING} Шаг {step}: {exc}")
                selection = Selection(step=step, radius=r, reason=str(exc))
            run.selections.append(selection)

            if not selection.selected:
                run.approximants.append(None)
                run.distances.append([])
                continue
            previous = selection.index
            phi = dilate(candidate_map(candidates[selection.index]), r)
            run.approximants.append(phi)
            run.distances.append([sup_distance(phi, f, rho, seed=sample.seed) for rho in test_radii])

    logger.info(
        f"{Icon.DONE} Выбрано {sum(s.selected for s in run.selections)}/{len(run.selections)} шагов"
    )
    return run


def lift_run(run: ApproximationRun, word: AutomorphismWord) -> ApproximationRun:
    """
    Подъем прогона композицией с нормированным автоморфизмом Φ

    Цель Φ∘f, приближения Φ∘φ_m; расстояния пересчитываются на тех же радиусах.
    """
    lift = candidate_map(word)
    if lift.dim != run.target.dim:
        raise InvalidInputError(f"Размерность Φ {lift.dim} не совпадает с целью {run.target.dim}")
    target = compose(lift, run.target)
    lifted = ApproximationRun(
        target=target,
        criterion=run.criterion,
        schedule=run.schedule,
        candidate_count=run.candidate_count,
        selections=list(run.selections),
        test_radii=run.test_radii,
        target_report=run.target_report,
        extras={"lifted_by": word.to_dict()},
    )
    for phi in run.approximants:
        if phi is None:
            lifted.approximants.append(None)
            lifted.distances.append([])
            continue
        composed = compose(lift, phi)
        lifted.approximants.append(composed)
        lifted.distances.append([sup_distance(composed, target, rho) for rho in run.test_radii])
    return lifted
