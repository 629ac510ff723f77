"""
Анализ линейного оператора A ∈ L(C^n)

Скалярные инварианты:
- m(A), k(A): экстремумы Re<Az,z> на единичной сфере (с.з. эрмитовой части)
- |V(A)|: численный радиус
- k_-(A), k_+(A): min/max Re λ по спектру
- ||A||: операторная норма

А также матричная экспонента e^{tA} и поиск (вещественных) резонансов.
"""
import itertools
import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
import sympy
from scipy import linalg
from scipy.optimize import minimize_scalar

from config.settings import config
from src.core.errors import (
    InvalidInputError,
    InvariantViolationError,
    MatrixRangeError,
    PreconditionViolatedError,
    ResourceLimitError,
    UnsupportedOperationError,
)
from src.models.enums import ResonanceKind
from src.models.operator_models import (
    Operator,
    OperatorProfile,
    ResonanceVerdict,
    ResonanceWitness,
    SpectralSummary,
)
from src.utils.icons import Icon
from src.utils.logger import get_logger

logger = get_logger(__name__)

# Предел числа перебираемых мультииндексов при поиске резонансов
RESONANCE_ENUMERATION_CAP = 2_000_000


def as_operator(value) -> Operator:
    """Привести матрицу (или Operator) к Operator"""
    if isinstance(value, Operator):
        return value
    return Operator(np.asarray(value, dtype=complex))


def _exact_entry(value):
    if isinstance(value, bool) or isinstance(value, float):
        raise InvalidInputError(f"Точный режим не принимает числа с плавающей точкой: {value!r}")
    if isinstance(value, Fraction):
        return sympy.Rational(value.numerator, value.denominator)
    if isinstance(value, str):
        try:
            return sympy.sympify(value, rational=True)
        except (sympy.SympifyError, SyntaxError, TypeError) as e:
            raise InvalidInputError(f"Не удалось разобрать точный элемент {value!r}: {e}") from e
    return sympy.sympify(value)


def exact_operator(rows) -> Operator:
    """
    Оператор с точными элементами: int, Fraction, строки "p/q" или sympy-выражения

    Examples:
        >>> exact_operator([[1, 0], [0, "5/2"]]).is_exact
        True
    """
    exact = tuple(tuple(_exact_entry(value) for value in row) for row in rows)
    try:
        numeric = [[complex(sympy.N(value, 30)) for value in row] for row in exact]
    except TypeError as e:
        raise InvalidInputError(f"Элемент оператора не является числом: {e}") from e
    return Operator(np.array(numeric, dtype=complex), exact_entries=exact)


# ============================================================================
# ЧИСЛЕННЫЙ ОБРАЗ
# ============================================================================

def numerical_range_extrema(A) -> Tuple[float, float]:
    """
    m(A) и k(A): минимум и максимум Re<Az,z> на единичной сфере

    Re<Az,z> = <Hz,z> с эрмитовой H = (A + A*)/2, поэтому экстремумы равны
    крайние собственные значения H.

    Args:
        A: Оператор или матрица n×n

    Returns:
        (m, k)

    Raises:
        InvalidInputError: Нефинитные элементы
    """
    A = as_operator(A)
    eigenvalues = linalg.eigvalsh(A.hermitian_part)
    return float(eigenvalues[0]), float(eigenvalues[-1])


def _rotated_top_eigenvalue(entries: np.ndarray, theta: float) -> float:
    rotated = np.exp(1j * theta) * entries
    hermitian = (rotated + rotated.conj().T) / 2
    return float(linalg.eigvalsh(hermitian)[-1])


def numerical_radius(A, angle_grid: int = None, tol: float = 1e-12) -> float:
    """
    Численный радиус |V(A)| = max_θ λ_max((e^{iθ}A + e^{-iθ}A*)/2)

    Максимум по равномерной сетке углов уточняется ограниченной
    одномерной оптимизацией на соседних узлах.

    Args:
        A: Оператор
        angle_grid: Число углов сетки (>= 8)
        tol: Точность уточнения по θ

    Returns:
        |V(A)|
    """
    A = as_operator(A)
    angle_grid = angle_grid or config.ANGLE_GRID
    if angle_grid < 8:
        raise InvalidInputError(f"angle_grid должен быть >= 8, получено {angle_grid}")

    step = 2 * math.pi / angle_grid
    thetas = np.arange(angle_grid) * step
    values = np.array([_rotated_top_eigenvalue(A.entries, theta) for theta in thetas])
    best = int(np.argmax(values))

    result = minimize_scalar(
        lambda theta: -_rotated_top_eigenvalue(A.entries, theta),
        bounds=(thetas[best] - step, thetas[best] + step),
        method="bounded",
        options={"xatol": tol},
    )
    radius = max(float(values[best]), float(-result.fun))
    logger.debug(f"{Icon.MATRIX} |V(A)| = {radius:.12g} (сетка {angle_grid})")
    return radius


# ============================================================================
# СПЕКТР И ЭКСПОНЕНТА
# ============================================================================

def matrix_exp(A, t: float) -> Operator:
    """
    e^{tA} (масштабирование и возведение в квадрат, scipy.linalg.expm)

    Args:
        A: Оператор
        t: Конечное время

    Returns:
        Оператор e^{tA}; при t = 0: ровно единичная матрица

    Raises:
        InvalidInputError: Нефинитное t
        MatrixRangeError: Переполнение результата
    """
    A = as_operator(A)
    if not math.isfinite(t):
        raise InvalidInputError(f"Время должно быть конечным, получено {t}")
    if t == 0:
        return Operator.identity(A.dim)

    with np.errstate(over="ignore", invalid="ignore"):
        result = linalg.expm(t * A.entries)
    if not np.all(np.isfinite(result)):
        raise MatrixRangeError(f"Переполнение e^{{tA}} при t={t}, ||A||={np.linalg.norm(A.entries, 2):.3g}")
    return Operator(result)


def _sorted_eigenvalues(entries: np.ndarray) -> List[complex]:
    eigenvalues = linalg.eigvals(entries)
    return sorted((complex(v) for v in eigenvalues), key=lambda v: (v.real, v.imag))


def spectral_abscissa(A, cap: int = None) -> SpectralSummary:
    """
    k_+(A) = max Re λ, k_-(A) = min Re λ и спектр

    Дополнительно сверяет k_+ с пределом log||e^{tA}||/t при большом t:
    расхождение фиксируется в limit_consistent и пишется в лог.

    Args:
        A: Оператор
        cap: Максимальная размерность (по умолчанию SMALL_N_CAP)

    Raises:
        UnsupportedOperationError: Размерность выше предела
    """
    A = as_operator(A)
    cap = cap or config.SMALL_N_CAP
    if A.dim > cap:
        raise UnsupportedOperationError(f"Размерность {A.dim} выше предела {cap}")

    eigenvalues = _sorted_eigenvalues(A.entries)
    kplus = max(v.real for v in eigenvalues)
    kminus = min(v.real for v in eigenvalues)

    # log||e^{T(A - k_+ I)}||/T мал, если k_+ верен
    horizon = config.LIMIT_CHECK_HORIZON
    shifted = A.entries - kplus * np.eye(A.dim)
    try:
        norm = np.linalg.norm(matrix_exp(shifted, horizon).entries, 2)
        limit_estimate = kplus + math.log(norm) / horizon if norm > 0 else -math.inf
    except MatrixRangeError:
        limit_estimate = math.inf
    limit_consistent = abs(limit_estimate - kplus) <= config.LIMIT_CHECK_TOL
    if not limit_consistent:
        logger.warning(
            f"{Icon.WARNING} k_+ = {kplus:.10g} расходится с пределом log||e^{{tA}}||/t = {limit_estimate:.10g}"
        )

    return SpectralSummary(
        kplus=kplus,
        kminus=kminus,
        eigenvalues=tuple(eigenvalues),
        limit_estimate=limit_estimate,
        limit_consistent=limit_consistent,
    )


# ============================================================================
# РЕЗОНАНСЫ
# ============================================================================

def _exact_value(value) -> Optional[Tuple[Fraction, Fraction]]:
    """Гауссово рациональное как пара дробей (None для чисел с плавающей точкой)"""
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, Fraction)):
        return Fraction(value), Fraction(0)
    if isinstance(value, sympy.Basic):
        re_part, im_part = sympy.sympify(value).as_real_imag()
        if re_part.is_Rational and im_part.is_Rational:
            return (
                Fraction(int(re_part.p), int(re_part.q)),
                Fraction(int(im_part.p), int(im_part.q)),
            )
    return None


def _multi_indices(n: int, order: int):
    """Все мультииндексы длины n с суммой order (детерминированный порядок)"""
    for combo in itertools.combinations_with_replacement(range(n), order):
        counts = [0] * n
        for j in combo:
            counts[j] += 1
        yield tuple(counts)


def _search(values, bound: int, matches) -> Optional[ResonanceWitness]:
    n = len(values)
    for order in range(2, bound + 1):
        indices = list(_multi_indices(n, order))
        for s in range(n):
            for multi_index in indices:
                residual = matches(s, multi_index)
                if residual is not None:
                    return ResonanceWitness(index=s, multi_index=multi_index, residual=residual)
    return None


def detect_resonance(
    eigenvalues: Sequence,
    tol: float = None,
    m: Optional[float] = None,
    tol_lin: float = None,
) -> ResonanceVerdict:
    """
    Поиск резонансов λ_s = Σ m_j λ_j, Σ m_j >= 2

    Перебор полон: резонанс влечет Re λ_s = Σ m_j Re λ_j >= (Σ m_j)·min Re λ_j,
    поэтому достаточно Σ m_j <= floor(k_+ / min Re λ_j) + 1.

    Точный режим включается, если все собственные значения заданы
    как int / Fraction / sympy-рациональные (в т.ч. гауссовы).

    Args:
        eigenvalues: Собственные значения
        tol: Относительный допуск |λ_s - Σ m_j λ_j| <= tol·(1 + |λ_s|)
        m: m(A) для сверки с критерием «k_+ = 2m» (опционально)
        tol_lin: Допуск сверки |k_+ - 2m|

    Returns:
        ResonanceVerdict

    Raises:
        PreconditionViolatedError: Есть Re λ_j <= 0
        ResourceLimitError: Перебор слишком велик

    Examples:
        >>> detect_resonance([1, 2]).witness.multi_index
        (2, 0)
    """
    tol = config.TAU_RES if tol is None else tol
    tol_lin = config.TAU_LIN if tol_lin is None else tol_lin
    if len(eigenvalues) == 0:
        raise InvalidInputError("Пустой список собственных значений")

    exact_values = [_exact_value(v) for v in eigenvalues]
    exact = all(v is not None for v in exact_values)
    numeric = np.array([complex(v) for v in eigenvalues])
    if not np.all(np.isfinite(numeric)):
        raise InvalidInputError("Собственные значения должны быть конечными")
    if np.any(numeric.real <= 0):
        raise PreconditionViolatedError("Поиск резонансов требует Re λ_j > 0 для всех j")

    n = len(eigenvalues)
    if exact:
        min_re = min(v[0] for v in exact_values)
        max_re = max(v[0] for v in exact_values)
        bound = math.floor(max_re / min_re) + 1
    else:
        bound = math.floor(numeric.real.max() / numeric.real.min()) + 1
    if math.comb(n + bound, n) > RESONANCE_ENUMERATION_CAP:
        raise ResourceLimitError(f"Перебор мультииндексов до порядка {bound} при n={n} слишком велик")

    if exact:
        def complex_match(s, multi_index):
            re_sum = sum(k * exact_values[j][0] for j, k in enumerate(multi_index))
            im_sum = sum(k * exact_values[j][1] for j, k in enumerate(multi_index))
            return 0.0 if (re_sum, im_sum) == exact_values[s] else None

        def real_match(s, multi_index):
            re_sum = sum(k * exact_values[j][0] for j, k in enumerate(multi_index))
            return 0.0 if re_sum == exact_values[s][0] else None
    else:
        def complex_match(s, multi_index):
            residual = abs(numeric[s] - np.dot(multi_index, numeric))
            return float(residual) if residual <= tol * (1 + abs(numeric[s])) else None

        def real_match(s, multi_index):
            residual = abs(numeric[s].real - np.dot(multi_index, numeric.real))
            return float(residual) if residual <= tol * (1 + abs(numeric[s].real)) else None

    witness = _search(numeric, bound, complex_match)
    real_witness = _search(numeric, bound, real_match)

    if witness is None:
        kind = ResonanceKind.NONRESONANT
    elif exact:
        kind = ResonanceKind.RESONANT
    else:
        kind = ResonanceKind.RESONANT_WITHIN_TOLERANCE

    notes: List[str] = []
    boundary_consistent = None
    if m is not None:
        kplus = float(numeric.real.max())
        boundary_consistent = _check_real_resonance_boundary(
            kplus, m, real_witness is not None, tol_lin, notes
        )

    logger.debug(f"{Icon.RESONANCE} {kind.value}, граница перебора {bound}")
    return ResonanceVerdict(
        kind=kind,
        witness=witness,
        real_resonant=real_witness is not None,
        real_witness=real_witness,
        search_bound=bound,
        boundary_consistent=boundary_consistent,
        notes=notes,
    )


def _check_real_resonance_boundary(
    kplus: float, m: float, real_resonant: bool, tol_lin: float, notes: List[str]
) -> Optional[bool]:
    """
    Сверка с критерием «при k_+ <= 2m вещественный резонанс ⇔ k_+ = 2m»

    Направление «резонанс ⇒ k_+ = 2m» следует из Re λ_s >= 2·k_- >= 2m и
    проверяется как инвариант. Обратное направление лишь фиксируется:
    оно требует k_- = m, что выполняется не всегда.
    """
    if kplus > 2 * m + tol_lin:
        return None
    on_boundary = abs(kplus - 2 * m) <= tol_lin
    if real_resonant and not on_boundary:
        raise InvariantViolationError(
            f"Вещественный резонанс при k_+ = {kplus:.12g} < 2m = {2 * m:.12g}"
        )
    if on_boundary and not real_resonant:
        notes.append("k_+ = 2m, но вещественных резонансов нет (k_- > m)")
        logger.warning(f"{Icon.WARNING} k_+ = 2m без вещественного резонанса")
        return False
    return True


def _exact_eigenvalues(A: Operator) -> Optional[List]:
    """Точные собственные значения, если все они гауссовы рациональные"""
    if not A.is_exact:
        return None
    try:
        eigenvalues = sympy.Matrix(A.exact_entries).eigenvals(multiple=True)
    except (NotImplementedError, ValueError, TypeError) as e:
        logger.debug(f"{Icon.WARNING} Точный спектр недоступен: {e}")
        return None
    if any(_exact_value(v) is None for v in eigenvalues):
        return None
    return sorted(eigenvalues, key=lambda v: tuple(float(p) for p in sympy.sympify(v).as_real_imag()))


def analyze_resonance(A, tol: float = None) -> ResonanceVerdict:
    """
    Резонансы оператора со сверкой по m(A) и k_+(A)

    Для точного оператора использует точный спектр (sympy), если он
    гауссово рациональный; иначе спектр с плавающей точкой.
    """
    A = as_operator(A)
    m, _ = numerical_range_extrema(A)
    eigenvalues = _exact_eigenvalues(A)
    if eigenvalues is None:
        eigenvalues = list(spectral_abscissa(A).eigenvalues)
    return detect_resonance(eigenvalues, tol=tol, m=m)


# ============================================================================
# ПРОФИЛЬ
# ============================================================================

def operator_profile(A, tol: float = None) -> OperatorProfile:
    """
    Полный профиль оператора с проверкой цепочки неравенств

    m <= k_+ <= |V| <= ||A|| <= 2|V|,  m <= k_- <= k_+

    Args:
        A: Оператор
        tol: Допуск tau_lin

    Raises:
        UnsupportedOperationError: Размерность выше предела
        InvariantViolationError: Нарушена цепочка неравенств
    """
    A = as_operator(A)
    tol = config.TAU_LIN if tol is None else tol

    m, k = numerical_range_extrema(A)
    vr = numerical_radius(A)
    spectrum = spectral_abscissa(A)
    opnorm = float(linalg.svdvals(A.entries)[0])
    kplus, kminus = spectrum.kplus, spectrum.kminus

    chain = [
        ("m <= k_-", m, kminus),
        ("k_- <= k_+", kminus, kplus),
        ("k_+ <= |V|", kplus, vr),
        ("|V| <= ||A||", vr, opnorm),
        ("||A|| <= 2|V|", opnorm, 2 * vr),
    ]
    for label, lower, upper in chain:
        if lower > upper + tol:
            raise InvariantViolationError(f"Нарушено {label}: {lower:.12g} > {upper:.12g}")

    is_hermitian = np.allclose(A.entries, A.adjoint, atol=tol, rtol=0)
    profile = OperatorProfile(
        m=m,
        k=k,
        kminus=kminus,
        kplus=kplus,
        vr=vr,
        opnorm=opnorm,
        eigenvalues=spectrum.eigenvalues,
        kplus_below_2m=kplus < 2 * m - tol,
        hermitian_positive_definite=bool(is_hermitian and m > tol),
        scalar_hermitian_part=bool(k - m <= tol and m > tol),
    )
    logger.debug(f"{Icon.MATRIX} Профиль: m={m:.10g}, k_+={kplus:.10g}, |V|={vr:.10g}, ||A||={opnorm:.10g}")
    return profile
