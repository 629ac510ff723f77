"""
Встроенные операторы, отображения, слова и поля

Используются CLI (`--builtin`), набором приемочных проверок и тестами.
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional

import numpy as np

from src.core.automorphisms import AutomorphismWord, identity_word, shear
from src.core.errors import InvalidInputError
from src.core.loewner import field_from_automorphisms
from src.core.operator_analysis import exact_operator
from src.core.polymap import PolyMap
from src.models.approximation_models import CriterionSpec
from src.models.enums import CriterionKind, GeneratorKind, RegionKind
from src.models.loewner_models import FieldPiece, HerglotzField
from src.models.operator_models import Operator
from src.models.report_models import GRegion

# α = (1 - √5)/4: m(A) = 1/2 - α = (1 + √5)/4, k_+(A) = 1 - 2α = 2m(A)
TRIANGULAR_ALPHA = (1 - math.sqrt(5)) / 4
TRIANGULAR_M = (1 + math.sqrt(5)) / 4
TRIANGULAR_KPLUS = (1 + math.sqrt(5)) / 2

DIAGONAL_NONRESONANT = (2.5, 3.5, math.e)
DIAGONAL_RESONANT = (2, 3)

REFERENCE_EXAMPLES = "reference-examples"


# ============================================================================
# ОПЕРАТОРЫ
# ============================================================================

def triangular_operator() -> Operator:
    """[[1 - 2α, 1], [0, 1/2 - 2α]]: k_+ = 2m при нерезонансном спектре"""
    alpha = TRIANGULAR_ALPHA
    return Operator.from_rows([[1 - 2 * alpha, 1], [0, 0.5 - 2 * alpha]])


def diagonal_operator(q) -> Operator:
    """
    diag(1, q); точный режим для int / Fraction / строки "p/q"

    Examples:
        >>> diagonal_operator(2).is_exact
        True
        >>> diagonal_operator(math.e).is_exact
        False
    """
    if isinstance(q, (int, Fraction, str)) and not isinstance(q, bool):
        return exact_operator([[1, 0], [0, q]])
    return Operator.from_rows([[1, 0], [0, q]])


def builtin_operators() -> Dict[str, Operator]:
    operators = {
        "identity": Operator.identity(2),
        "triangular": triangular_operator(),
        "diag-2-1": Operator.from_rows([[2, 0], [0, 1]]),
    }
    for q in DIAGONAL_NONRESONANT + DIAGONAL_RESONANT:
        operators[f"diag-1-{q:g}"] = diagonal_operator(Fraction(q).limit_denominator(10) if q != math.e else q)
    return operators


# ============================================================================
# ОТОБРАЖЕНИЯ И СЛОВА
# ============================================================================

def shear_map(a: complex) -> PolyMap:
    """(z_1 + a·z_2², z_2)"""
    return PolyMap(2, ({(1, 0): 1, (0, 2): a}, {(0, 1): 1}))


def shear_word(a: complex) -> AutomorphismWord:
    return shear(2, 0, {(0, 2): a})


def quadratic_map(c: complex) -> PolyMap:
    """z + c·(z_1², 0)"""
    return PolyMap(2, ({(1, 0): 1, (2, 0): c}, {(0, 1): 1}))


def builtin_maps() -> Dict[str, PolyMap]:
    return {
        "identity": PolyMap.identity(2),
        "shear-0.2": shear_map(0.2),
        "shear-0.3": shear_map(0.3),
        "shear-0.4": shear_map(0.4),
        "shear-0.5": shear_map(0.5),
        "shear-3": shear_map(3),
        "quadratic-0.2": quadratic_map(0.2),
        "quadratic-0.4": quadratic_map(0.4),
    }


def builtin_words() -> Dict[str, AutomorphismWord]:
    return {
        "identity": identity_word(2),
        "shear-0.3": shear_word(0.3),
        "shear-0.5": shear_word(0.5),
        "cross-shear-0.2": shear(2, 1, {(2, 0): 0.2}),
    }


@dataclass(frozen=True, eq=False)
class CriterionExample:
    """Отображение, проходящее критерий (для проверок устойчивости к растяжению)"""
    name: str
    criterion: CriterionSpec
    map: PolyMap
    word: Optional[AutomorphismWord] = None


def criterion_examples() -> List[CriterionExample]:
    diag = Operator.from_rows([[2, 0], [0, 1]])
    return [
        CriterionExample("spirallike-diag-2-1", CriterionSpec(CriterionKind.SPIRALLIKE, operator=diag),
                         shear_map(0.3), shear_word(0.3)),
        CriterionExample("starlike-shear-0.5", CriterionSpec(CriterionKind.STARLIKE),
                         shear_map(0.5), shear_word(0.5)),
        CriterionExample("g-starlike-disk-0.5",
                         CriterionSpec(CriterionKind.G_STARLIKE, region=GRegion(RegionKind.DISK, 0.5)),
                         shear_map(0.5), shear_word(0.5)),
        CriterionExample("g-starlike-sector-0.5",
                         CriterionSpec(CriterionKind.G_STARLIKE, region=GRegion(RegionKind.SECTOR, 0.5)),
                         shear_map(0.5), shear_word(0.5)),
        CriterionExample("convex-shear-0.4", CriterionSpec(CriterionKind.CONVEX), shear_map(0.4)),
        CriterionExample("q-quadratic-0.4", CriterionSpec(CriterionKind.Q_CLASS), quadratic_map(0.4)),
        CriterionExample("qtilde-quadratic-0.4", CriterionSpec(CriterionKind.QTILDE), quadratic_map(0.4)),
        CriterionExample("qtilde-shear-0.3", CriterionSpec(CriterionKind.QTILDE), shear_map(0.3)),
        CriterionExample("ktilde-quadratic-0.2", CriterionSpec(CriterionKind.KTILDE), quadratic_map(0.2)),
        CriterionExample("ktilde-shear-0.2", CriterionSpec(CriterionKind.KTILDE), shear_map(0.2)),
    ]


# ============================================================================
# ПОЛЯ ХЕРГЛОТЦА
# ============================================================================

def builtin_fields() -> Dict[str, HerglotzField]:
    """
    Поля для проверок потоков

    Спиралеобразные куски построены из слов, поэтому для них доступен
    точный элемент reachable_word.
    """
    identity = Operator.identity(2)
    return {
        "linear-identity": HerglotzField(identity, (FieldPiece(1.0, GeneratorKind.LINEAR),)),
        "linear-triangular": HerglotzField(triangular_operator(), (FieldPiece(1.0, GeneratorKind.LINEAR),)),
        "shear-identity": field_from_automorphisms([(1.0, shear_word(0.3))], identity),
        "shear-then-linear": field_from_automorphisms(
            [(0.5, shear_word(0.3)), (0.5, identity_word(2))], identity,
        ),
        "two-shears": field_from_automorphisms(
            [(0.5, shear_word(0.3)), (0.5, shear(2, 1, {(2, 0): 0.2}))], identity,
        ),
        "shear-diag-2-1": field_from_automorphisms(
            [(1.0, shear_word(0.3))], Operator.from_rows([[2, 0], [0, 1]]),
        ),
    }


def lookup(kind: str, name: str):
    """
    Встроенный объект по типу и имени

    Raises:
        InvalidInputError: Неизвестное имя
    """
    registries = {
        "operator": builtin_operators,
        "map": builtin_maps,
        "word": builtin_words,
        "field": builtin_fields,
    }
    if kind not in registries:
        raise InvalidInputError(f"Неизвестный тип встроенного объекта: {kind}")
    registry = registries[kind]()
    if name not in registry:
        raise InvalidInputError(f"Неизвестный встроенный {kind} '{name}'. Доступны: {', '.join(sorted(registry))}")
    return registry[name]


def closed_form_shear_flow(a: complex, z, t: float) -> np.ndarray:
    """v(z, 0, t) = f^{-1}(e^{-t} f(z)) для f = (z_1 + a z_2², z_2), A = I"""
    z = np.asarray(z, dtype=complex)
    w = np.exp(-t) * np.array([z[..., 0] + a * z[..., 1] ** 2, z[..., 1]])
    return np.stack([w[0] - a * w[1] ** 2, w[1]], axis=-1)
