"""
Вычислительное ядро BallChain

Модули импортируются явно (from src.core.polymap import PolyMap и т.п.):
- operator_analysis: инварианты оператора, e^{tA}, резонансы
- polymap: полиномиальные отображения и их исчисление
- automorphisms: слова из сдвигов и линейных множителей
- sampling: выборки в шаре
- criteria: проверки критериев
- loewner: потоки уравнения Лёвнера
- approximation: аппроксимация растяжениями
- catalog: встроенные операторы, отображения, слова и поля
"""

from .errors import (
    BallChainError,
    InvalidInputError,
    UnsupportedOperationError,
    MatrixRangeError,
    PreconditionViolatedError,
    SingularJacobianError,
    ResourceLimitError,
    IntegrationFailureError,
    ToleranceUnreachableError,
    FieldRejectedError,
    InvariantViolationError,
)

__all__ = [
    "BallChainError",
    "InvalidInputError",
    "UnsupportedOperationError",
    "MatrixRangeError",
    "PreconditionViolatedError",
    "SingularJacobianError",
    "ResourceLimitError",
    "IntegrationFailureError",
    "ToleranceUnreachableError",
    "FieldRejectedError",
    "InvariantViolationError",
]
