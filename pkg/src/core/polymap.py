"""
Полиномиальные отображения C^n -> C^n

Коэффициенты хранятся разреженно: для каждой выходной координаты хранится
словарь {мультииндекс: комплексный коэффициент}. Нулевые коэффициенты
не хранятся.

Операции:
- evaluate / jacobian / second_derivative / jacobian_solve
- compose (с усечением по степени) и dilate (φ(z) = f(rz)/r)
- homogeneous_parts, coefficient_functionals, sup_distance
"""
import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg
from scipy.optimize import minimize

from config.settings import config
from src.core.errors import (
    InvalidInputError,
    PreconditionViolatedError,
    ResourceLimitError,
    SingularJacobianError,
)
from src.core.sampling import sphere_directions
from src.utils.icons import Icon
from src.utils.logger import get_logger

logger = get_logger(__name__)

Exponent = Tuple[int, ...]
Terms = Dict[Exponent, complex]


@dataclass(frozen=True)
class MultiIndex:
    """
    Мультииндекс (e_1, ..., e_n), e_j >= 0

    Examples:
        >>> MultiIndex((1, 2)).degree
        3
    """
    exponents: Exponent

    def __post_init__(self):
        exponents = tuple(int(e) for e in self.exponents)
        if any(e < 0 for e in exponents):
            raise InvalidInputError(f"Отрицательный показатель в мультииндексе {exponents}")
        object.__setattr__(self, "exponents", exponents)

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    @classmethod
    def unit(cls, dim: int, j: int) -> "MultiIndex":
        """Мультииндекс переменной z_j"""
        return cls(tuple(1 if i == j else 0 for i in range(dim)))

    def __str__(self) -> str:
        return "·".join(f"z{j + 1}^{e}" if e > 1 else f"z{j + 1}" for j, e in enumerate(self.exponents) if e) or "1"


def _degree(exponent: Exponent) -> int:
    return sum(exponent)


def _clean(terms: Mapping, dim: int) -> Terms:
    cleaned: Terms = {}
    for exponent, coefficient in terms.items():
        key = MultiIndex(exponent).exponents
        if len(key) != dim:
            raise InvalidInputError(f"Мультииндекс {key} не соответствует размерности {dim}")
        value = complex(coefficient)
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise InvalidInputError(f"Нефинитный коэффициент при {key}")
        if value != 0:
            cleaned[key] = cleaned.get(key, 0j) + value
    return {k: v for k, v in cleaned.items() if v != 0}


@dataclass(frozen=True, eq=False)
class PolyMap:
    """
    Полиномиальное отображение f: C^n -> C^n

    Attributes:
        dim: Размерность n
        coords: Для каждой координаты: {мультииндекс: коэффициент}

    Examples:
        >>> f = PolyMap(2, ({(1, 0): 1, (0, 2): 0.5}, {(0, 1): 1}))
        >>> f(np.array([0, 1]))
        array([0.5+0.j, 1. +0.j])
    """
    dim: int
    coords: Tuple[Mapping[Exponent, complex], ...]

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidInputError(f"Размерность должна быть >= 1, получено {self.dim}")
        if len(self.coords) != self.dim:
            raise InvalidInputError(f"Ожидалось {self.dim} координат, получено {len(self.coords)}")
        frozen = tuple(MappingProxyType(_clean(terms, self.dim)) for terms in self.coords)
        object.__setattr__(self, "coords", frozen)

    # ------------------------------------------------------------------
    # Конструкторы
    # ------------------------------------------------------------------

    @classmethod
    def identity(cls, dim: int) -> "PolyMap":
        return cls(dim, tuple({MultiIndex.unit(dim, i).exponents: 1} for i in range(dim)))

    @classmethod
    def zero(cls, dim: int) -> "PolyMap":
        return cls(dim, tuple({} for _ in range(dim)))

    @classmethod
    def from_linear(cls, matrix) -> "PolyMap":
        """Линейное отображение z -> Mz"""
        matrix = np.asarray(matrix, dtype=complex)
        dim = matrix.shape[0]
        return cls(dim, tuple(
            {MultiIndex.unit(dim, j).exponents: matrix[i, j] for j in range(dim)} for i in range(dim)
        ))

    @classmethod
    def constant(cls, vector) -> "PolyMap":
        vector = np.asarray(vector, dtype=complex)
        dim = vector.shape[0]
        return cls(dim, tuple({(0,) * dim: vector[i]} for i in range(dim)))

    # ------------------------------------------------------------------
    # Свойства
    # ------------------------------------------------------------------

    @cached_property
    def max_degree(self) -> int:
        degrees = [_degree(e) for terms in self.coords for e in terms]
        return max(degrees) if degrees else 0

    @property
    def constant_term(self) -> np.ndarray:
        zero = (0,) * self.dim
        return np.array([terms.get(zero, 0j) for terms in self.coords], dtype=complex)

    @property
    def linear_part(self) -> np.ndarray:
        """Матрица Df(0)"""
        return np.array([
            [terms.get(MultiIndex.unit(self.dim, j).exponents, 0j) for j in range(self.dim)]
            for terms in self.coords
        ], dtype=complex)

    @property
    def normalized(self) -> bool:
        """f(0) = 0 и Df(0) = I (точно по коэффициентам)"""
        return bool(np.all(self.constant_term == 0) and np.array_equal(self.linear_part, np.eye(self.dim)))

    @property
    def is_zero(self) -> bool:
        return all(not terms for terms in self.coords)

    def terms(self) -> Iterator[Tuple[int, MultiIndex, complex]]:
        """Все ненулевые члены (координата, мультииндекс, коэффициент)"""
        for i, terms in enumerate(self.coords):
            for exponent in sorted(terms, key=lambda e: (_degree(e), e)):
                yield i, MultiIndex(exponent), terms[exponent]

    @cached_property
    def _table(self) -> Tuple[np.ndarray, np.ndarray]:
        exponents = sorted({e for terms in self.coords for e in terms}, key=lambda e: (_degree(e), e))
        powers = np.array(exponents, dtype=int).reshape(len(exponents), self.dim)
        coefficients = np.array(
            [[terms.get(e, 0j) for terms in self.coords] for e in exponents], dtype=complex
        ).reshape(len(exponents), self.dim)
        return powers, coefficients

    @cached_property
    def _partials(self) -> Tuple["PolyMap", ...]:
        return tuple(self.partial(j) for j in range(self.dim))

    @cached_property
    def _second_partials(self) -> Tuple[Tuple["PolyMap", ...], ...]:
        return tuple(tuple(first.partial(k) for k in range(self.dim)) for first in self._partials)

    # ------------------------------------------------------------------
    # Вычисление
    # ------------------------------------------------------------------

    def __call__(self, z) -> np.ndarray:
        return evaluate(self, z)

    def _evaluate_batch(self, points: np.ndarray) -> np.ndarray:
        powers, coefficients = self._table
        if powers.shape[0] == 0:
            return np.zeros(points.shape, dtype=complex)
        monomials = np.prod(points[:, None, :] ** powers[None, :, :], axis=2)
        return monomials @ coefficients

    def partial(self, j: int) -> "PolyMap":
        """∂f/∂z_j"""
        coords = []
        for terms in self.coords:
            derived: Terms = {}
            for exponent, coefficient in terms.items():
                if exponent[j] == 0:
                    continue
                lowered = list(exponent)
                lowered[j] -= 1
                derived[tuple(lowered)] = coefficient * exponent[j]
            coords.append(derived)
        return PolyMap(self.dim, tuple(coords))

    # ------------------------------------------------------------------
    # Алгебра
    # ------------------------------------------------------------------

    def __add__(self, other: "PolyMap") -> "PolyMap":
        _check_same_dim(self, other)
        coords = []
        for mine, theirs in zip(self.coords, other.coords):
            merged = dict(mine)
            for exponent, coefficient in theirs.items():
                merged[exponent] = merged.get(exponent, 0j) + coefficient
            coords.append(merged)
        return PolyMap(self.dim, tuple(coords))

    def scale(self, factor: complex) -> "PolyMap":
        return PolyMap(self.dim, tuple({e: factor * c for e, c in terms.items()} for terms in self.coords))

    def subtract(self, other: "PolyMap") -> "PolyMap":
        return self + other.scale(-1)

    __sub__ = subtract

    def split_by_degree(self) -> Dict[int, "PolyMap"]:
        """Однородные компоненты всех степеней (в т.ч. 0 и 1)"""
        by_degree: Dict[int, List[Terms]] = {}
        for i, terms in enumerate(self.coords):
            for exponent, coefficient in terms.items():
                coords = by_degree.setdefault(_degree(exponent), [dict() for _ in range(self.dim)])
                coords[i][exponent] = coefficient
        return {degree: PolyMap(self.dim, tuple(coords)) for degree, coords in sorted(by_degree.items())}

    def truncate(self, max_degree: int) -> "PolyMap":
        """Отбросить члены степени > max_degree"""
        return PolyMap(self.dim, tuple(
            {e: c for e, c in terms.items() if _degree(e) <= max_degree} for terms in self.coords
        ))

    def single_monomial(self) -> Optional[Tuple[Exponent, np.ndarray]]:
        """(e, c), если все члены имеют один мультииндекс e: f(z) = c·z^e"""
        exponents = {e for terms in self.coords for e in terms}
        if len(exponents) != 1:
            return None
        exponent = exponents.pop()
        return exponent, np.array([terms.get(exponent, 0j) for terms in self.coords], dtype=complex)

    def to_dict(self) -> Dict:
        """JSON-формат {"dim", "coords": [{"terms": [{"exp", "re", "im"}]}]}"""
        return {
            "dim": self.dim,
            "coords": [
                {"terms": [
                    {"exp": list(e), "re": float(terms[e].real), "im": float(terms[e].imag)}
                    for e in sorted(terms, key=lambda e: (_degree(e), e))
                ]}
                for terms in self.coords
            ],
        }


def _check_same_dim(f: PolyMap, g: PolyMap) -> None:
    if f.dim != g.dim:
        raise InvalidInputError(f"Размерности не совпадают: {f.dim} и {g.dim}")


def _as_points(f: PolyMap, z) -> Tuple[np.ndarray, bool]:
    points = np.asarray(z, dtype=complex)
    single = points.ndim == 1
    points = np.atleast_2d(points)
    if points.ndim != 2 or points.shape[1] != f.dim:
        raise InvalidInputError(f"Ожидались точки размерности {f.dim}, получено {np.shape(z)}")
    return points, single


# ============================================================================
# ДИФФЕРЕНЦИАЛЬНОЕ ИСЧИСЛЕНИЕ
# ============================================================================

def evaluate(f: PolyMap, z) -> np.ndarray:
    """
    f(z) для точки (n,) или пакета точек (N, n)

    Raises:
        InvalidInputError: Несовпадение размерностей
    """
    points, single = _as_points(f, z)
    values = f._evaluate_batch(points)
    return values[0] if single else values


def jacobian(f: PolyMap, z) -> np.ndarray:
    """
    Df(z): матрица n×n (или пакет N×n×n)

    Examples:
        >>> jacobian(PolyMap.identity(2), [0.1, 0.2])
        array([[1.+0.j, 0.+0.j],
               [0.+0.j, 1.+0.j]])
    """
    points, single = _as_points(f, z)
    columns = [partial._evaluate_batch(points) for partial in f._partials]
    matrices = np.stack(columns, axis=2)
    return matrices[0] if single else matrices


def second_derivative(f: PolyMap, z, v) -> np.ndarray:
    """D²f(z)(v, v) = Σ_{j,k} v_j v_k ∂²f/∂z_j∂z_k"""
    points, single = _as_points(f, z)
    directions, _ = _as_points(f, v)
    if directions.shape[0] != points.shape[0]:
        directions = np.broadcast_to(directions, points.shape)
    result = np.zeros(points.shape, dtype=complex)
    for j in range(f.dim):
        for k in range(f.dim):
            weight = directions[:, j] * directions[:, k]
            result += weight[:, None] * f._second_partials[j][k]._evaluate_batch(points)
    return result[0] if single else result


def solve_linear(matrix: np.ndarray, rhs: np.ndarray, point=None, threshold: float = None) -> np.ndarray:
    """
    Решение M·u = w через LU с частичным выбором ведущего элемента

    Raises:
        SingularJacobianError: Наименьший |ведущий элемент| < threshold
    """
    threshold = config.PIVOT_THRESHOLD if threshold is None else threshold
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", linalg.LinAlgWarning)
        lu, pivots = linalg.lu_factor(matrix, check_finite=False)
    smallest = float(np.min(np.abs(np.diag(lu))))
    if not smallest >= threshold:
        raise SingularJacobianError(
            f"Вырожденная матрица Якоби (ведущий элемент {smallest:.3e})", point=point, pivot=smallest
        )
    return linalg.lu_solve((lu, pivots), rhs, check_finite=False)


def jacobian_solve(f: PolyMap, z, w) -> np.ndarray:
    """
    u с Df(z)·u = w

    Raises:
        SingularJacobianError: f не локально биголоморфно в z
    """
    point = np.asarray(z, dtype=complex)
    if point.ndim != 1:
        raise InvalidInputError("jacobian_solve принимает одну точку")
    return solve_linear(jacobian(f, point), np.asarray(w, dtype=complex), point=point)


def jacobian_solve_batch(f: PolyMap, points, rhs) -> Tuple[np.ndarray, np.ndarray]:
    """
    Df(z_i)·u_i = w_i для пакета точек

    Returns:
        (решения, маска вырожденных точек); для вырожденных решения NaN
    """
    points, _ = _as_points(f, points)
    rhs = np.asarray(rhs, dtype=complex).reshape(points.shape)
    matrices = jacobian(f, points)
    solutions = np.full(points.shape, np.nan, dtype=complex)
    singular = np.zeros(points.shape[0], dtype=bool)
    for i, matrix in enumerate(matrices):
        try:
            solutions[i] = solve_linear(matrix, rhs[i], point=points[i])
        except SingularJacobianError:
            singular[i] = True
    return solutions, singular


# ============================================================================
# КОМПОЗИЦИЯ И РАСТЯЖЕНИЕ
# ============================================================================

def _multiply(p: Terms, q: Terms, cap: Optional[int]) -> Terms:
    product: Terms = {}
    for e1, c1 in p.items():
        d1 = _degree(e1)
        for e2, c2 in q.items():
            if cap is not None and d1 + _degree(e2) > cap:
                continue
            exponent = tuple(a + b for a, b in zip(e1, e2))
            product[exponent] = product.get(exponent, 0j) + c1 * c2
    return product


def compose(f: PolyMap, g: PolyMap, degree_cap: Optional[int] = None) -> PolyMap:
    """
    f∘g на уровне коэффициентов

    Args:
        f: Внешнее отображение
        g: Внутреннее отображение
        degree_cap: Отбросить члены степени выше (опционально)

    Raises:
        ResourceLimitError: Степень результата может превысить DEGREE_HARD_CAP
    """
    _check_same_dim(f, g)
    bound = f.max_degree * max(g.max_degree, 1)
    effective = bound if degree_cap is None else min(bound, degree_cap)
    if effective > config.DEGREE_HARD_CAP:
        raise ResourceLimitError(
            f"Степень композиции до {bound} превышает предел {config.DEGREE_HARD_CAP}"
        )

    dim = f.dim
    one: Terms = {(0,) * dim: 1 + 0j}
    powers: List[List[Terms]] = [[one] for _ in range(dim)]

    def power(j: int, k: int) -> Terms:
        while len(powers[j]) <= k:
            powers[j].append(_multiply(powers[j][-1], dict(g.coords[j]), degree_cap))
        return powers[j][k]

    monomial_cache: Dict[Exponent, Terms] = {}

    def monomial(exponent: Exponent) -> Terms:
        if exponent not in monomial_cache:
            result = one
            for j, e in enumerate(exponent):
                if e:
                    result = _multiply(result, power(j, e), degree_cap)
            monomial_cache[exponent] = result
        return monomial_cache[exponent]

    coords = []
    for terms in f.coords:
        accumulated: Terms = {}
        for exponent, coefficient in terms.items():
            for e, c in monomial(exponent).items():
                accumulated[e] = accumulated.get(e, 0j) + coefficient * c
        coords.append(accumulated)
    result = PolyMap(dim, tuple(coords))
    logger.debug(f"{Icon.POLY} compose: deg {f.max_degree}∘{g.max_degree} -> {result.max_degree}")
    return result


def dilate(f: PolyMap, r: float) -> PolyMap:
    """
    φ(z) = f(rz)/r: коэффициент степени k умножается на r^{k-1}

    Raises:
        InvalidInputError: r вне (0, 1]
        PreconditionViolatedError: f не нормировано
    """
    if not 0 < r <= 1:
        raise InvalidInputError(f"Радиус растяжения должен быть в (0, 1], получено {r}")
    if not f.normalized:
        raise PreconditionViolatedError("Растяжение определено для нормированных отображений")
    if r == 1:
        return f
    return PolyMap(f.dim, tuple(
        {e: c * r ** (_degree(e) - 1) for e, c in terms.items()} for terms in f.coords
    ))


# ============================================================================
# НОРМЫ ОДНОРОДНЫХ ЧАСТЕЙ
# ============================================================================

@dataclass(frozen=True)
class NormEstimate:
    """
    Оценка sup_{||z||=1} ||P(z)||

    Attributes:
        value: Итоговая оценка (нижняя граница, если не exact)
        sampled: Максимум по выборке до уточнения
        gap: value - sampled (вклад уточнения)
        exact: Значение вычислено в замкнутой форме
    """
    value: float
    sampled: float
    gap: float
    exact: bool

    def to_dict(self) -> Dict:
        return {"value": self.value, "sampled": self.sampled, "gap": self.gap, "exact": self.exact}


def sphere_sup(
    func: Callable[[np.ndarray], np.ndarray],
    dim: int,
    samples: int = None,
    restarts: int = None,
    seed: int = None,
) -> Tuple[float, float, np.ndarray]:
    """
    Максимум func на единичной сфере: выборка Соболя + Нелдер-Мид из лучших точек

    Args:
        func: Векторизованная функция (N×n единичных векторов) -> N вещественных
        dim: Размерность
        samples: Размер выборки
        restarts: Число уточняемых стартов
        seed: Сид

    Returns:
        (уточненный максимум, максимум по выборке, точка максимума)
    """
    samples = config.NORM_SAMPLES if samples is None else samples
    restarts = config.NORM_RESTARTS if restarts is None else restarts
    seed = config.DEFAULT_SEED if seed is None else seed

    directions = sphere_directions(dim, samples, seed, stream=7)
    values = func(directions)
    order = np.argsort(-values, kind="stable")
    sampled = float(values[order[0]])
    best_value, best_point = sampled, directions[order[0]]

    def to_sphere(x: np.ndarray) -> np.ndarray:
        vector = x[:dim] + 1j * x[dim:]
        norm = np.linalg.norm(vector)
        return vector / norm if norm > 0 else directions[order[0]]

    def objective(x: np.ndarray) -> float:
        return -float(func(to_sphere(x)[None, :])[0])

    for index in order[:restarts]:
        start = np.concatenate([directions[index].real, directions[index].imag])
        result = minimize(objective, start, method="Nelder-Mead",
                          options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 400 * dim})
        if -result.fun > best_value:
            best_value, best_point = -float(result.fun), to_sphere(result.x)
    return best_value, sampled, best_point


def homogeneous_norm(part: PolyMap, samples: int = None, restarts: int = None, seed: int = None) -> NormEstimate:
    """
    ||P|| = sup_{||z||=1} ||P(z)|| однородного отображения

    Если все члены имеют общий мультииндекс e (P(z) = c·z^e), значение точное:
    ||c||·Π (e_j/|e|)^{e_j/2}.
    """
    if part.is_zero:
        return NormEstimate(0.0, 0.0, 0.0, True)
    monomial = part.single_monomial()
    if monomial is not None:
        exponent, coefficients = monomial
        degree = _degree(exponent)
        value = float(np.linalg.norm(coefficients))
        for e in exponent:
            if e:
                value *= (e / degree) ** (e / 2)
        return NormEstimate(value, value, 0.0, True)
    if part.max_degree == 1 and np.all(part.constant_term == 0):
        value = float(linalg.svdvals(part.linear_part)[0])
        return NormEstimate(value, value, 0.0, True)

    value, sampled, _ = sphere_sup(
        lambda u: np.linalg.norm(part._evaluate_batch(u), axis=1),
        part.dim, samples=samples, restarts=restarts, seed=seed,
    )
    return NormEstimate(value, sampled, value - sampled, False)


@dataclass(frozen=True)
class HomogeneousExpansion:
    """
    f(z) = z + Σ_k A_k(z^k)

    Attributes:
        dim: Размерность
        degrees: Степени k (>= 2) ненулевых частей
        parts: Однородные части A_k
        norm_estimates: Оценки ||A_k||
    """
    dim: int
    degrees: Tuple[int, ...]
    parts: Tuple[PolyMap, ...]
    norm_estimates: Tuple[NormEstimate, ...]

    @property
    def norms(self) -> Tuple[float, ...]:
        return tuple(estimate.value for estimate in self.norm_estimates)

    def reconstruct(self) -> PolyMap:
        """id + Σ A_k"""
        result = PolyMap.identity(self.dim)
        for part in self.parts:
            result = result + part
        return result

    def to_dict(self) -> Dict:
        return {
            "degrees": list(self.degrees),
            "norms": [estimate.to_dict() for estimate in self.norm_estimates],
        }


def homogeneous_parts(f: PolyMap, samples: int = None, restarts: int = None, seed: int = None) -> HomogeneousExpansion:
    """
    Разложение нормированного f на однородные части A_k, k >= 2

    Raises:
        PreconditionViolatedError: f не нормировано
    """
    if not f.normalized:
        raise PreconditionViolatedError("Однородное разложение строится для нормированных отображений")
    split = {k: part for k, part in f.split_by_degree().items() if k >= 2}
    estimates = tuple(homogeneous_norm(part, samples, restarts, seed) for part in split.values())
    return HomogeneousExpansion(
        dim=f.dim,
        degrees=tuple(split),
        parts=tuple(split.values()),
        norm_estimates=estimates,
    )


def coefficient_functionals(f: PolyMap, expansion: HomogeneousExpansion = None) -> Tuple[float, float]:
    """
    (Σ k||A_k||, Σ k²||A_k||)

    Examples:
        >>> f = PolyMap(2, ({(1, 0): 1, (2, 0): 0.4}, {(0, 1): 1}))
        >>> coefficient_functionals(f)
        (0.8, 1.6)
    """
    expansion = expansion or homogeneous_parts(f)
    sum_k = sum(k * norm for k, norm in zip(expansion.degrees, expansion.norms))
    sum_k2 = sum(k * k * norm for k, norm in zip(expansion.degrees, expansion.norms))
    return float(sum_k), float(sum_k2)


# ============================================================================
# РАССТОЯНИЕ НА ШАРЕ
# ============================================================================

@dataclass(frozen=True)
class SupDistance:
    """
    max_{||z||<=ρ} ||f(z) - g(z)||

    Attributes:
        rho: Радиус
        value: Лучшая оценка (точная, если exact)
        lower: Нижняя граница (максимум по сфере радиуса ρ)
        upper: Σ_k ||P_k|| ρ^k по однородным частям разности
        exact: Разность однородна и ее норма известна точно
    """
    rho: float
    value: float
    lower: float
    upper: float
    exact: bool

    def to_dict(self) -> Dict:
        return {"rho": self.rho, "value": self.value, "lower": self.lower,
                "upper": self.upper, "exact": self.exact}


def sup_distance(
    f: PolyMap,
    g: PolyMap,
    rho: float,
    samples: int = None,
    restarts: int = None,
    seed: int = None,
) -> SupDistance:
    """
    Равномерное расстояние между f и g на шаре радиуса ρ

    Максимум достигается на сфере ||z|| = ρ (принцип максимума для ||f - g||).
    """
    _check_same_dim(f, g)
    if not 0 < rho < 1 + 1e-15:
        raise InvalidInputError(f"Радиус должен быть в (0, 1], получено {rho}")
    difference = f - g
    if difference.is_zero:
        return SupDistance(rho, 0.0, 0.0, 0.0, True)

    parts = difference.split_by_degree()
    estimates = {k: homogeneous_norm(part, samples=samples, restarts=restarts, seed=seed) for k, part in parts.items()}
    upper = float(sum(estimate.value * rho ** k for k, estimate in estimates.items()))

    if len(parts) == 1:
        (degree, estimate), = estimates.items()
        if estimate.exact:
            value = estimate.value * rho ** degree
            return SupDistance(rho, value, value, value, True)

    lower, _, _ = sphere_sup(
        lambda u: np.linalg.norm(difference._evaluate_batch(rho * u), axis=1),
        f.dim, samples=samples, restarts=restarts, seed=seed,
    )
    return SupDistance(rho, float(lower), float(lower), max(upper, float(lower)), False)
