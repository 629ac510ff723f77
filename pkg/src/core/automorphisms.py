"""
Полиномиальные автоморфизмы C^n как слова из сдвигов и линейных множителей

Множители применяются в порядке списка: слово [F_1, ..., F_k] задает
Φ = F_k ∘ ... ∘ F_1. Обратное слово: [F_k^{-1}, ..., F_1^{-1}].
"""
from dataclasses import dataclass, field, replace
from functools import cached_property
from types import MappingProxyType
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from src.core.errors import InvalidInputError, InvariantViolationError, UnsupportedOperationError
from src.core.operator_analysis import matrix_exp
from src.core.polymap import Exponent, MultiIndex, PolyMap, compose
from src.models.enums import FactorKind, GeneratorKind
from src.models.loewner_models import HerglotzField
from src.utils.icons import Icon
from src.utils.logger import get_logger

logger = get_logger(__name__)

# Допуск привязки линейной части нормированного слова к I
NORMALIZATION_SNAP = 1e-10


def _invertible(matrix: np.ndarray) -> bool:
    singular_values = linalg.svdvals(matrix)
    return bool(singular_values[-1] > 1e-12 * max(singular_values[0], 1.0))


@dataclass(frozen=True, eq=False)
class ShearFactor:
    """
    Множитель слова автоморфизма

    - SHEAR: z_j -> z_j + p(ẑ_j)
    - OVERSHEAR: z_j -> scale·z_j + p(ẑ_j), scale != 0
    - LINEAR: z -> Mz, M обратима

    Attributes:
        kind: Тип множителя
        dim: Размерность n
        axis: Координата j (для сдвигов)
        poly: Полином от переменных без z_j {мультииндекс: коэффициент}
        scale: Множитель при z_j (для OVERSHEAR)
        matrix: Матрица M (для LINEAR)
    """
    kind: FactorKind
    dim: int
    axis: int = 0
    poly: Mapping[Exponent, complex] = field(default_factory=dict)
    scale: complex = 1.0
    matrix: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind == FactorKind.LINEAR:
            if self.matrix is None:
                raise InvalidInputError("Линейный множитель требует матрицу")
            matrix = np.array(self.matrix, dtype=complex)
            if matrix.shape != (self.dim, self.dim) or not np.all(np.isfinite(matrix)):
                raise InvalidInputError(f"Матрица множителя должна быть конечной {self.dim}×{self.dim}")
            if not _invertible(matrix):
                raise InvalidInputError("Линейный множитель должен быть обратимым")
            matrix.setflags(write=False)
            object.__setattr__(self, "matrix", matrix)
            return

        if not 0 <= self.axis < self.dim:
            raise InvalidInputError(f"Ось {self.axis} вне диапазона 0..{self.dim - 1}")
        poly: Dict[Exponent, complex] = {}
        for exponent, coefficient in self.poly.items():
            key = MultiIndex(exponent).exponents
            if len(key) != self.dim or key[self.axis] != 0:
                raise InvalidInputError(f"Полином сдвига не должен зависеть от z_{self.axis + 1}: {key}")
            if complex(coefficient) != 0:
                poly[key] = complex(coefficient)
        object.__setattr__(self, "poly", MappingProxyType(poly))
        if self.kind == FactorKind.OVERSHEAR and complex(self.scale) == 0:
            raise InvalidInputError("Множитель overshear должен быть ненулевым")
        object.__setattr__(self, "scale", complex(self.scale) if self.kind == FactorKind.OVERSHEAR else 1 + 0j)

    def to_polymap(self) -> PolyMap:
        if self.kind == FactorKind.LINEAR:
            return PolyMap.from_linear(self.matrix)
        coords = []
        for i in range(self.dim):
            unit = MultiIndex.unit(self.dim, i).exponents
            if i != self.axis:
                coords.append({unit: 1})
            else:
                terms = dict(self.poly)
                terms[unit] = terms.get(unit, 0j) + self.scale
                coords.append(terms)
        return PolyMap(self.dim, tuple(coords))

    def inverse(self) -> "ShearFactor":
        if self.kind == FactorKind.LINEAR:
            return replace(self, matrix=linalg.inv(self.matrix))
        if self.kind == FactorKind.SHEAR:
            return replace(self, poly={e: -c for e, c in self.poly.items()})
        # z_j = (w_j - p(ŵ_j))/scale
        return replace(self, scale=1 / self.scale, poly={e: -c / self.scale for e, c in self.poly.items()})

    def to_dict(self) -> Dict:
        if self.kind == FactorKind.LINEAR:
            return {
                "kind": self.kind.value,
                "matrix": [[{"re": float(c.real), "im": float(c.imag)} for c in row] for row in self.matrix],
            }
        data = {
            "kind": self.kind.value,
            "axis": self.axis,
            "poly": {"terms": [
                {"exp": list(e), "re": float(c.real), "im": float(c.imag)} for e, c in sorted(self.poly.items())
            ]},
        }
        if self.kind == FactorKind.OVERSHEAR:
            data["scale"] = {"re": float(self.scale.real), "im": float(self.scale.imag)}
        return data


@dataclass(frozen=True, eq=False)
class AutomorphismWord:
    """
    Слово автоморфизма Φ = F_k ∘ ... ∘ F_1

    Attributes:
        dim: Размерность n
        factors: Множители в порядке применения
        normalized: Слово построено normalize(): Φ(0) = 0, DΦ(0) = I
    """
    dim: int
    factors: Tuple[ShearFactor, ...] = ()
    normalized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        for factor in self.factors:
            if factor.dim != self.dim:
                raise InvalidInputError(f"Множитель размерности {factor.dim} в слове размерности {self.dim}")

    def __len__(self) -> int:
        return len(self.factors)

    @cached_property
    def polymap(self) -> PolyMap:
        return to_polymap(self)

    def to_dict(self) -> Dict:
        return {"dim": self.dim, "factors": [factor.to_dict() for factor in self.factors]}


# ============================================================================
# КОНСТРУКТОРЫ
# ============================================================================

def identity_word(dim: int) -> AutomorphismWord:
    return AutomorphismWord(dim, ())


def shear(dim: int, axis: int, poly: Mapping[Exponent, complex]) -> AutomorphismWord:
    """
    Слово из одного сдвига z_axis -> z_axis + poly

    Examples:
        >>> shear(2, 0, {(0, 2): 0.5}).polymap(np.array([0, 1]))
        array([0.5+0.j, 1. +0.j])
    """
    return AutomorphismWord(dim, (ShearFactor(FactorKind.SHEAR, dim, axis=axis, poly=poly),))


def overshear(dim: int, axis: int, scale: complex, poly: Mapping[Exponent, complex]) -> AutomorphismWord:
    return AutomorphismWord(dim, (ShearFactor(FactorKind.OVERSHEAR, dim, axis=axis, poly=poly, scale=scale),))


def linear_word(matrix) -> AutomorphismWord:
    matrix = np.asarray(matrix, dtype=complex)
    return AutomorphismWord(matrix.shape[0], (ShearFactor(FactorKind.LINEAR, matrix.shape[0], matrix=matrix),))


def translation_word(vector) -> AutomorphismWord:
    """z -> z + c как набор постоянных сдвигов"""
    vector = np.asarray(vector, dtype=complex)
    dim = vector.shape[0]
    zero = (0,) * dim
    return AutomorphismWord(dim, tuple(
        ShearFactor(FactorKind.SHEAR, dim, axis=i, poly={zero: vector[i]}) for i in range(dim) if vector[i] != 0
    ))


def compose_words(outer: AutomorphismWord, inner: AutomorphismWord) -> AutomorphismWord:
    """outer ∘ inner"""
    if outer.dim != inner.dim:
        raise InvalidInputError(f"Размерности слов не совпадают: {outer.dim} и {inner.dim}")
    return AutomorphismWord(outer.dim, inner.factors + outer.factors)


# ============================================================================
# ОПЕРАЦИИ
# ============================================================================

def to_polymap(word: AutomorphismWord) -> PolyMap:
    """
    Композиция множителей как PolyMap

    Для нормированного слова константа и линейная часть приводятся к точным
    0 и I (после проверки, что отклонение в пределах округления).

    Raises:
        ResourceLimitError: Степень превышает предел
    """
    result = PolyMap.identity(word.dim)
    for factor in word.factors:
        result = compose(factor.to_polymap(), result)
    if word.normalized and not result.normalized:
        result = _snap_normalization(result)
    return result


def _snap_normalization(f: PolyMap) -> PolyMap:
    deviation = max(
        float(np.max(np.abs(f.constant_term))),
        float(np.max(np.abs(f.linear_part - np.eye(f.dim)))),
    )
    if deviation > NORMALIZATION_SNAP:
        raise InvariantViolationError(f"Нормированное слово отклоняется от f(0)=0, Df(0)=I на {deviation:.3e}")
    coords = []
    for i, terms in enumerate(f.coords):
        cleaned = {e: c for e, c in terms.items() if sum(e) >= 2}
        cleaned[MultiIndex.unit(f.dim, i).exponents] = 1
        coords.append(cleaned)
    return PolyMap(f.dim, tuple(coords))


def inverse(word: AutomorphismWord) -> AutomorphismWord:
    """Φ^{-1}: обращенные множители в обратном порядке"""
    return AutomorphismWord(word.dim, tuple(factor.inverse() for factor in reversed(word.factors)), word.normalized)


def normalize(word: AutomorphismWord) -> AutomorphismWord:
    """
    L ∘ T ∘ Φ с T(w) = w - Φ(0) и L = DΦ(0)^{-1}

    Тождественные добавки пропускаются.
    """
    f = word.polymap
    offset = f.constant_term
    factors = word.factors + translation_word(-offset).factors
    derivative = f.linear_part
    if not np.array_equal(derivative, np.eye(word.dim)):
        factors += linear_word(linalg.inv(derivative)).factors
    return AutomorphismWord(word.dim, factors, normalized=True)


def reachable_word(field: HerglotzField) -> AutomorphismWord:
    """
    Точный элемент e^{TA} v(·, T) для поля из автоморфизмов

    На куске со спиралеобразным генератором α переход равен
    α^{-1} ∘ e^{-tA} ∘ α, на линейном куске: e^{-tA}.

    Raises:
        UnsupportedOperationError: Спиралеобразный кусок задан без слова
    """
    factors: Tuple[ShearFactor, ...] = ()
    for piece in field.pieces:
        decay = linear_word(matrix_exp(field.A, -piece.duration).entries)
        if piece.kind == GeneratorKind.LINEAR:
            factors += decay.factors
            continue
        if piece.word is None:
            raise UnsupportedOperationError("Точный элемент требует кусков, заданных словами автоморфизмов")
        alpha = piece.word if piece.word.normalized else normalize(piece.word)
        factors += alpha.factors + decay.factors + inverse(alpha).factors
    factors += linear_word(matrix_exp(field.A, field.total_time).entries).factors
    logger.debug(f"{Icon.POLY} Точный достижимый элемент: {len(factors)} множителей")
    return AutomorphismWord(field.dim, factors)
