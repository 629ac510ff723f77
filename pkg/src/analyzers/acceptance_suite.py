"""
Набор приемочных проверок

Каждая проверка воспроизводит одно вычислимое утверждение о шаре:
инварианты оператора, точность потоков Лёвнера, запасы критериев в
замкнутой форме и сходимость аппроксимации растяжениями.

Проверки независимы и выполняются пулом потоков; результаты собираются
в порядке объявления, поэтому отчет детерминирован при фиксированном сиде.

Examples:
    >>> suite = AcceptanceSuite(seed=7)
    >>> result = suite.run(["triangular-operator", "diagonal-resonance"])
    >>> result.passed
    True
"""
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from config.settings import config
from src.core.approximation import (
    candidate_map,
    criterion_report,
    ktilde_series,
    perturbed_candidates,
    qtilde_series,
    run_approximation,
    select_qtilde,
)
from src.core.catalog import (
    DIAGONAL_NONRESONANT,
    DIAGONAL_RESONANT,
    TRIANGULAR_KPLUS,
    TRIANGULAR_M,
    builtin_fields,
    closed_form_shear_flow,
    criterion_examples,
    diagonal_operator,
    shear_map,
    shear_word,
    triangular_operator,
)
from src.core.criteria import convexity_test, q_class_test, qtilde_test, starlike_test
from src.core.errors import BallChainError, InvalidInputError
from src.core.loewner import (
    flow,
    flow_many,
    parametric_limit,
    reachable_eval,
    reachable_growth_bound,
    semigroup_check,
    subordination_check,
)
from src.core.operator_analysis import analyze_resonance, matrix_exp, operator_profile
from src.core.polymap import dilate, evaluate
from src.core.sampling import make_sample, sphere_directions
from src.models.approximation_models import CriterionSpec, DilationSchedule
from src.models.enums import CriterionKind, GeneratorKind, ResonanceKind
from src.models.loewner_models import FieldPiece, HerglotzField
from src.models.operator_models import Operator
from src.models.report_models import CheckResult, SuiteResult
from src.utils.icons import Icon
from src.utils.logger import get_logger

logger = get_logger(__name__)

CheckOutcome = Tuple[bool, Dict]

ORACLE_POINTS = 100_000
SERIES_POINTS = tuple(round(0.1 * i, 1) for i in range(1, 10))
GROWTH_TIMES = (0.1, 0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0)
GROWTH_SLACK = 1e-9


@dataclass(frozen=True)
class SuiteSettings:
    """
    Параметры прогона набора

    Attributes:
        seed: Сид всех выборок
        flow_tol: Допуск интегратора
        per_sphere: Точек на сферу в проверках критериев
        jobs: Размер пула потоков
        matrices: Число случайных операторов для цепочки неравенств
        growth_operators: Число операторов для оценок роста e^{tA}
    """
    seed: int
    flow_tol: float
    per_sphere: int
    jobs: int
    matrices: int = 1000
    growth_operators: int = 50

    def to_dict(self) -> Dict:
        return {
            "seed": self.seed,
            "flow_tol": self.flow_tol,
            "per_sphere": self.per_sphere,
            "matrices": self.matrices,
            "growth_operators": self.growth_operators,
        }


def _random_operator(rng: np.random.Generator, dim: int) -> np.ndarray:
    return rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))


def _ball_points(dim: int, count: int, seed: int, radius: float, stream: int) -> np.ndarray:
    """count точек с ||z|| = radius·u, u равномерно из [0.1, 1]"""
    directions = sphere_directions(dim, count, seed, stream=stream)
    scales = np.random.default_rng([seed, stream]).uniform(0.1, 1.0, size=count)
    return directions * (radius * scales)[:, None]


# ============================================================================
# ОПЕРАТОРЫ
# ============================================================================

def check_triangular_operator(settings: SuiteSettings) -> CheckOutcome:
    profile = operator_profile(triangular_operator())
    verdict = analyze_resonance(triangular_operator())
    details = {
        "m": profile.m,
        "kplus": profile.kplus,
        "m_error": abs(profile.m - TRIANGULAR_M),
        "kplus_error": abs(profile.kplus - TRIANGULAR_KPLUS),
        "kplus_minus_2m": abs(profile.kplus - 2 * profile.m),
        "resonance": verdict.kind.value,
    }
    passed = (
        details["m_error"] <= 1e-9
        and details["kplus_error"] <= 1e-9
        and details["kplus_minus_2m"] <= 1e-9
        and verdict.kind == ResonanceKind.NONRESONANT
    )
    return passed, details


def _witness_holds(eigenvalues: Sequence[complex], witness) -> bool:
    combination = sum(m * value for m, value in zip(witness.multi_index, eigenvalues))
    return witness.order >= 2 and abs(eigenvalues[witness.index] - combination) <= 1e-12


def check_diagonal_resonance(settings: SuiteSettings) -> CheckOutcome:
    verdicts = {}
    passed = True
    for q in DIAGONAL_NONRESONANT + DIAGONAL_RESONANT:
        exact = q if q == math.e else Fraction(q).limit_denominator(10)
        verdict = analyze_resonance(diagonal_operator(exact))
        expect_resonant = q in DIAGONAL_RESONANT
        ok = verdict.kind == (ResonanceKind.RESONANT if expect_resonant else ResonanceKind.NONRESONANT)
        if expect_resonant:
            ok = ok and verdict.witness is not None and _witness_holds((1.0, float(q)), verdict.witness)
        passed = passed and ok
        verdicts[f"{q:g}"] = {
            "kind": verdict.kind.value,
            "witness": verdict.witness.to_dict() if verdict.witness else None,
        }
    return passed, {"verdicts": verdicts}


def _rayleigh_extrema(entries: np.ndarray, directions: np.ndarray) -> Tuple[float, float]:
    """min/max Re<Az,z> по плотной выборке сферы с доводкой BFGS"""
    dim = entries.shape[0]
    values = np.real(np.sum((directions @ entries.T) * np.conj(directions), axis=1))

    def quotient(x: np.ndarray) -> float:
        z = x[:dim] + 1j * x[dim:]
        return float(np.real(np.vdot(z, entries @ z)) / np.real(np.vdot(z, z)))

    extrema = []
    for sign, index in ((1.0, int(np.argmin(values))), (-1.0, int(np.argmax(values)))):
        start = np.concatenate([directions[index].real, directions[index].imag])
        result = minimize(lambda x: sign * quotient(x), start, method="BFGS", options={"gtol": 1e-10})
        extrema.append(sign * min(sign * values[index], float(result.fun)))
    return extrema[0], extrema[1]


def check_inequality_chain(settings: SuiteSettings) -> CheckOutcome:
    rng = np.random.default_rng([settings.seed, 3])
    directions = {dim: sphere_directions(dim, ORACLE_POINTS, settings.seed, stream=5) for dim in (2, 3)}
    worst_chain, worst_oracle = -math.inf, 0.0
    for index in range(settings.matrices):
        dim = 2 + index % 2
        entries = _random_operator(rng, dim)
        profile = operator_profile(Operator(entries), tol=1e-7)
        chain = (
            profile.m - profile.kplus,
            profile.kplus - profile.vr,
            profile.vr - profile.opnorm,
            profile.opnorm - 2 * profile.vr,
        )
        worst_chain = max(worst_chain, max(chain))
        m, k = _rayleigh_extrema(entries, directions[dim])
        worst_oracle = max(worst_oracle, abs(m - profile.m), abs(k - profile.k))
    details = {"matrices": settings.matrices, "worst_chain_gap": worst_chain, "worst_oracle_error": worst_oracle}
    return worst_chain <= 1e-7 and worst_oracle <= 1e-4, details


def check_growth_exp(settings: SuiteSettings) -> CheckOutcome:
    rng = np.random.default_rng([settings.seed, 4])
    worst = -math.inf
    for _ in range(settings.growth_operators):
        dim = int(rng.integers(2, 4))
        entries = _random_operator(rng, dim)
        shift = rng.uniform(0.1, 1.0) - operator_profile(Operator(entries)).m
        entries = entries + shift * np.eye(dim)
        profile = operator_profile(Operator(entries))
        u = rng.standard_normal((8, dim)) + 1j * rng.standard_normal((8, dim))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        for t in GROWTH_TIMES:
            norms = np.linalg.norm(u @ matrix_exp(Operator(entries), t).entries.T, axis=1)
            lower, upper = math.exp(profile.m * t), math.exp(profile.k * t)
            # относительные нарушения каждой из границ
            below = float(np.max(lower - norms)) / lower
            above = float(np.max(norms - upper)) / upper
            worst = max(worst, below, above)
    details = {
        "operators": settings.growth_operators,
        "times": list(GROWTH_TIMES),
        "worst_relative_violation": worst,
    }
    return worst <= GROWTH_SLACK, details


# ============================================================================
# ПОТОКИ ЛЁВНЕРА
# ============================================================================

def check_linear_flow_exactness(settings: SuiteSettings) -> CheckOutcome:
    points = _ball_points(2, 100, settings.seed, 0.95, stream=6)
    worst = 0.0
    for A in (Operator.identity(2), triangular_operator()):
        field = HerglotzField(A, (FieldPiece(5.0, GeneratorKind.LINEAR),))
        for t in (0.5, 2.0, 5.0):
            results = flow_many(field, points, 0.0, t, settings.flow_tol, settings.jobs)
            exact = points @ matrix_exp(A, -t).entries.T
            values = np.array([result.value for result in results])
            worst = max(worst, float(np.max(np.linalg.norm(values - exact, axis=1))))
    return worst <= 1e-8, {"points": len(points), "max_error": worst}


def check_spirallike_flow(settings: SuiteSettings) -> CheckOutcome:
    a = 0.3
    f = shear_map(a)
    A = Operator.identity(2)
    points = _ball_points(2, 8, settings.seed, 0.5, stream=7)
    sample = make_sample(2, per_sphere=config.FIELD_PER_SPHERE, tangent_count=0, seed=settings.seed)

    worst_residual, worst_closed_form = 0.0, 0.0
    for t in (0.5, 1.0, 2.0):
        for z in points:
            worst_residual = max(worst_residual, subordination_check(f, A, z, t, settings.flow_tol, sample))
            value = flow(HerglotzField(A, (FieldPiece(t, GeneratorKind.SPIRALLIKE, map=f),)), z, 0.0, t,
                         settings.flow_tol).value
            worst_closed_form = max(worst_closed_form, float(np.linalg.norm(value - closed_form_shear_flow(a, z, t))))

    horizon = 20.0
    field = HerglotzField(A, (FieldPiece(horizon, GeneratorKind.SPIRALLIKE, map=f),))
    worst_limit = 0.0
    for z in points:
        limit = parametric_limit(field, z, t_max=horizon, flow_tol=settings.flow_tol)
        worst_limit = max(worst_limit, float(np.linalg.norm(limit.value - evaluate(f, z))))

    details = {
        "max_subordination_residual": worst_residual,
        "max_closed_form_error": worst_closed_form,
        "max_limit_error": worst_limit,
    }
    return worst_residual <= 1e-8 and worst_limit <= 1e-4, details


def check_semigroup_schwarz(settings: SuiteSettings) -> CheckOutcome:
    points = _ball_points(2, 6, settings.seed, 0.9, stream=8)
    worst_residual, worst_increase = 0.0, -math.inf
    for name, field in builtin_fields().items():
        T = field.total_time
        grid = np.linspace(0.0, T, 9)
        for z in points:
            worst_residual = max(worst_residual, semigroup_check(field, z, 0.0, T / 3, T, settings.flow_tol))
            norms = [float(np.linalg.norm(z))]
            v = np.array(z)
            for s, t in zip(grid, grid[1:]):
                v = flow(field, v, float(s), float(t), settings.flow_tol).value
                norms.append(float(np.linalg.norm(v)))
            worst_increase = max(worst_increase, float(np.max(np.diff(norms))))
    details = {"fields": len(builtin_fields()), "max_semigroup_residual": worst_residual,
               "max_norm_increase": worst_increase}
    return worst_residual <= 1e-7 and worst_increase <= 1e-9, details


def check_reachable_growth(settings: SuiteSettings) -> CheckOutcome:
    points = _ball_points(2, 12, settings.seed, 0.9, stream=9)
    worst = -math.inf
    for field in builtin_fields().values():
        bounds = reachable_growth_bound(field.A, field.total_time, points)
        for z, bound in zip(points, bounds):
            value = reachable_eval(field, z, settings.flow_tol)
            worst = max(worst, float(np.linalg.norm(value)) - bound * (1 + 1e-9))
    return worst <= 0, {"fields": len(builtin_fields()), "worst_excess": worst}


# ============================================================================
# КРИТЕРИИ
# ============================================================================

def starlike_shear_margin(a: float, r: float) -> float:
    """Минимум Re<Df^{-1}f(z), z> для (z_1 + a z_2², z_2) на сфере радиуса r"""
    return r * r - 2 * abs(a) * r ** 3 / (3 * math.sqrt(3))


def check_criteria_closed_form(settings: SuiteSettings) -> CheckOutcome:
    sphere = make_sample(2, radii=(0.99,), per_sphere=settings.per_sphere, seed=settings.seed)
    starlike = starlike_test(shear_map(0.5), sphere, refine=True)
    expected = starlike_shear_margin(0.5, 0.99)

    per_radius = []
    for r in (0.5, 0.9, 0.99, 0.999):
        single = make_sample(2, radii=(r,), per_sphere=1, tangent_count=settings.per_sphere, seed=settings.seed)
        report = convexity_test(shear_map(0.4), single, refine=True)
        per_radius.append({"radius": r, "margin": report.min_margin, "exact": 1 - 0.8 * r})
    convex_margin = min(row["margin"] for row in per_radius)
    convex_ok = convex_margin >= 0.2 - config.TAU_CRIT and all(
        row["exact"] - 1e-9 <= row["margin"] <= row["exact"] + 0.02 for row in per_radius
    )
    details = {
        "starlike_margin": starlike.min_margin,
        "starlike_expected": expected,
        "convex_margin": convex_margin,
        "convex_by_radius": per_radius,
    }
    return abs(starlike.min_margin - expected) <= 5e-3 and convex_ok, details


def check_class_chain(settings: SuiteSettings) -> CheckOutcome:
    sample = make_sample(2, per_sphere=settings.per_sphere, tangent_count=0, seed=settings.seed)
    rows = []
    passed = True
    for example in criterion_examples():
        kind = example.criterion.kind
        if kind not in (CriterionKind.KTILDE, CriterionKind.QTILDE):
            continue
        q_report = q_class_test(example.map, sample, refine=False)
        row = {"example": example.name, "q": q_report.verdict.value}
        ok = q_report.passed
        if kind == CriterionKind.KTILDE:
            qtilde = qtilde_test(example.map)
            row["qtilde_margin"] = qtilde.min_margin
            ok = ok and qtilde.passed and qtilde.min_margin >= 0.5
        passed = passed and ok
        rows.append(row)
    return passed and bool(rows), {"examples": rows}


def check_dilation_stability(settings: SuiteSettings) -> CheckOutcome:
    """Растяжение φ = ψ(r·)/r проходящего примера не ухудшает запас на сжатых радиусах"""
    sample = make_sample(2, per_sphere=settings.per_sphere, seed=settings.seed)
    schedule = DilationSchedule.default(config.SCHEDULE_LENGTH)
    rows = []
    passed = True
    for example in criterion_examples():
        for r in schedule.radii:
            parent = criterion_report(example.map, example.criterion, sample.scaled(r))
            child = criterion_report(dilate(example.map, r), example.criterion, sample)
            gap = child.min_margin - parent.min_margin
            ok = child.passed and gap >= -1e-9 * max(1.0, abs(parent.min_margin))
            passed = passed and ok
            if not ok:
                rows.append({"example": example.name, "radius": r, "parent": parent.min_margin,
                             "dilation": child.min_margin})
    return passed, {"examples": len(criterion_examples()), "radii": len(schedule), "violations": rows}


# ============================================================================
# АППРОКСИМАЦИЯ
# ============================================================================

def check_approximation_convergence(settings: SuiteSettings) -> CheckOutcome:
    a, rho = 0.5, 0.5
    f = shear_map(a)
    sample = make_sample(2, per_sphere=settings.per_sphere, tangent_count=0, seed=settings.seed)
    run = run_approximation(f, [f], CriterionSpec(CriterionKind.STARLIKE), test_radii=(rho,), sample=sample)
    errors, last = [], math.inf
    for r, row in zip(run.schedule.radii, run.distances):
        if not row:
            return False, {"reason": f"шаг r={r:g} без выбора"}
        last = row[0].value
        errors.append(abs(last - a * (1 - r) * rho ** 2))
    worst = max(errors)
    return worst <= 1e-10 and last < 1e-3, {"max_error": worst, "final_distance": last}


def _partial_sum(x: float, power: int) -> float:
    """Σ_{k>=2} k^power x^k: не менее 200 членов и до исчезновения хвоста"""
    terms = []
    k = 2
    while k <= 200 or k ** power * x ** k > 1e-18:
        terms.append(k ** power * x ** k)
        k += 1
    return math.fsum(terms)


def check_epsilon_series(settings: SuiteSettings) -> CheckOutcome:
    worst = 0.0
    for x in SERIES_POINTS:
        for closed, power in ((qtilde_series(x), 1), (ktilde_series(x), 2)):
            worst = max(worst, abs(closed - _partial_sum(x, power)) / max(1.0, closed))

    f = shear_map(0.3)
    candidates = perturbed_candidates(shear_word(0.3), (0.2, 0.05, 0.01, 0.0), seed=settings.seed)
    admitted, recheck_ok, start = 0, True, 0
    for step, r in enumerate(DilationSchedule.default(config.SCHEDULE_LENGTH).radii, start=1):
        selection = select_qtilde(f, candidates, r, start=start, step=step)
        if not selection.selected:
            continue
        start = selection.index
        admitted += 1
        phi = dilate(candidate_map(candidates[selection.index]), r)
        recheck_ok = recheck_ok and qtilde_test(phi).passed
    details = {"max_relative_series_error": worst, "admitted": admitted}
    return worst <= 1e-12 and admitted > 0 and recheck_ok, details


# ============================================================================
# НАБОР
# ============================================================================

CHECKS: Tuple[Tuple[str, Callable[[SuiteSettings], CheckOutcome]], ...] = (
    ("triangular-operator", check_triangular_operator),
    ("diagonal-resonance", check_diagonal_resonance),
    ("inequality-chain", check_inequality_chain),
    ("growth-exp", check_growth_exp),
    ("linear-flow-exactness", check_linear_flow_exactness),
    ("spirallike-flow", check_spirallike_flow),
    ("semigroup-schwarz", check_semigroup_schwarz),
    ("reachable-growth", check_reachable_growth),
    ("criteria-closed-form", check_criteria_closed_form),
    ("class-chain", check_class_chain),
    ("dilation-stability", check_dilation_stability),
    ("approximation-convergence", check_approximation_convergence),
    ("epsilon-series", check_epsilon_series),
)


class AcceptanceSuite:
    """
    Набор именованных приемочных проверок

    Args:
        seed: Сид (по умолчанию DEFAULT_SEED)
        flow_tol: Допуск интегратора (по умолчанию FLOW_TOL)
        per_sphere: Точек на сферу
        jobs: Размер пула (--jobs / BALLCHAIN_JOBS / число ядер)
    """

    def __init__(
        self,
        seed: Optional[int] = None,
        flow_tol: Optional[float] = None,
        per_sphere: Optional[int] = None,
        jobs: Optional[int] = None,
        matrices: int = 1000,
        growth_operators: int = 50,
    ):
        self.settings = SuiteSettings(
            seed=config.DEFAULT_SEED if seed is None else seed,
            flow_tol=config.FLOW_TOL if flow_tol is None else flow_tol,
            per_sphere=config.PER_SPHERE if per_sphere is None else per_sphere,
            jobs=config.resolve_jobs(jobs),
            matrices=matrices,
            growth_operators=growth_operators,
        )

    @staticmethod
    def names() -> List[str]:
        return [name for name, _ in CHECKS]

    def _run_check(self, name: str, check: Callable[[SuiteSettings], CheckOutcome]) -> CheckResult:
        started = time.perf_counter()
        try:
            passed, details = check(self.settings)
            result = CheckResult(name=name, passed=bool(passed), details=details)
        except (BallChainError, ArithmeticError, ValueError, np.linalg.LinAlgError) as e:
            logger.error(f"{Icon.ERROR} {name}: {type(e).__name__}: {e}")
            result = CheckResult(name=name, passed=False, error=f"{type(e).__name__}: {e}")
        result.duration = time.perf_counter() - started
        icon = Icon.PASS if result.passed else Icon.FAIL
        logger.info(f"{icon} {name} ({result.duration:.2f} с)")
        return result

    def run(self, names: Optional[Sequence[str]] = None) -> SuiteResult:
        """
        Выполнить проверки

        Args:
            names: Подмножество имен (по умолчанию все, в порядке объявления)

        Raises:
            InvalidInputError: Неизвестное имя проверки
        """
        registry = dict(CHECKS)
        selected = list(names) if names else self.names()
        unknown = [name for name in selected if name not in registry]
        if unknown:
            raise InvalidInputError(f"Неизвестные проверки: {', '.join(unknown)}. Доступны: {', '.join(registry)}")

        logger.info(f"{Icon.TEST} Приемочный набор: {len(selected)} проверок, потоков: {self.settings.jobs}")
        if self.settings.jobs == 1:
            checks = [self._run_check(name, registry[name]) for name in selected]
        else:
            with ThreadPoolExecutor(max_workers=self.settings.jobs) as pool:
                checks = list(pool.map(lambda name: self._run_check(name, registry[name]), selected))

        result = SuiteResult(checks=checks)
        if result.passed:
            logger.info(f"{Icon.DONE} Все проверки пройдены")
        else:
            logger.warning(f"{Icon.WARNING} Не пройдены: {', '.join(result.failed_names)}")
        return result
