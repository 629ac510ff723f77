"""
Иерархия исключений BallChain

Каждое исключение соответствует одному классу ошибок из описания операций:
invalid-input, unsupported, range-error, precondition-violated,
singular-jacobian, resource-error, integration-failure,
tolerance-unreachable. CLI превращает любое BallChainError в код выхода 2.
"""
from typing import Any, Optional, Sequence

import numpy as np


class BallChainError(Exception):
    """Базовая ошибка пакета"""

    code: str = "error"

    def to_dict(self) -> dict:
        """Сериализация для JSON-отчетов"""
        return {"code": self.code, "message": str(self)}


class InvalidInputError(BallChainError, ValueError):
    """Невалидный вход: нефинитные элементы, несовпадение размерностей, плохой JSON"""

    code = "invalid-input"


class UnsupportedOperationError(BallChainError):
    """Операция не поддерживается для данного входа (например, n выше предела)"""

    code = "unsupported"


class MatrixRangeError(BallChainError, ArithmeticError):
    """Переполнение при вычислении e^{tA}"""

    code = "range-error"


class PreconditionViolatedError(BallChainError):
    """Нарушено предусловие операции"""

    code = "precondition-violated"


class SingularJacobianError(BallChainError):
    """
    Матрица Якоби вырождена в точке (отображение не локально биголоморфно)

    Attributes:
        point: Точка, в которой обнаружен нулевой ведущий элемент
        pivot: Наименьший по модулю ведущий элемент LU-разложения
    """

    code = "singular-jacobian"

    def __init__(self, message: str, point: Optional[Sequence[complex]] = None, pivot: float = 0.0):
        super().__init__(message)
        self.point = None if point is None else np.asarray(point, dtype=complex)
        self.pivot = float(pivot)


class ResourceLimitError(BallChainError):
    """Превышен жесткий ресурсный предел (степень композиции)"""

    code = "resource-error"


class IntegrationFailureError(BallChainError):
    """
    Сбой интегрирования уравнения Лёвнера

    Attributes:
        time: Момент времени, на котором произошел сбой
        state: Состояние v в этот момент
    """

    code = "integration-failure"

    def __init__(self, message: str, time: float = float("nan"), state: Any = None):
        super().__init__(message)
        self.time = time
        self.state = None if state is None else np.asarray(state, dtype=complex)


class ToleranceUnreachableError(BallChainError):
    """Шаг интегрирования стал меньше машинной точности или исчерпан лимит шагов"""

    code = "tolerance-unreachable"


class FieldRejectedError(BallChainError):
    """
    Кусок поля Херглотца не прошел проверку спиралеобразности

    Attributes:
        report: CriterionReport провалившейся проверки
        piece_index: Номер куска расписания
    """

    code = "field-rejected"

    def __init__(self, message: str, report: Any = None, piece_index: Optional[int] = None):
        super().__init__(message)
        self.report = report
        self.piece_index = piece_index


class InvariantViolationError(BallChainError, AssertionError):
    """Нарушен инвариант, который должен выполняться всегда"""

    code = "invariant-violated"
