"""
Модели уравнения Лёвнера: кусочно-постоянные поля Херглотца и результаты потоков
"""
from bisect import bisect_right
from dataclasses import dataclass, field
from itertools import accumulate
from typing import TYPE_CHECKING, Dict, Optional, Tuple

import numpy as np

from src.core.errors import InvalidInputError, PreconditionViolatedError
from src.models.enums import GeneratorKind
from src.models.operator_models import Operator

if TYPE_CHECKING:
    from src.core.automorphisms import AutomorphismWord
    from src.core.polymap import PolyMap


@dataclass(frozen=True, eq=False)
class FieldPiece:
    """
    Кусок расписания: генератор на отрезке длины duration

    LINEAR: h(z) = Az; SPIRALLIKE: h(z) = Df(z)^{-1} A f(z).

    Attributes:
        duration: Длительность (> 0)
        kind: Тип генератора
        map: f для спиралеобразного генератора
        word: Слово автоморфизма, из которого получено f (если есть)
    """
    duration: float
    kind: GeneratorKind = GeneratorKind.LINEAR
    map: Optional["PolyMap"] = None
    word: Optional["AutomorphismWord"] = None

    def __post_init__(self):
        if not (np.isfinite(self.duration) and self.duration > 0):
            raise InvalidInputError(f"Длительность куска должна быть > 0, получено {self.duration}")
        if self.kind == GeneratorKind.SPIRALLIKE and self.map is None:
            raise InvalidInputError("Спиралеобразный кусок требует отображение f")

    def to_dict(self) -> Dict:
        data: Dict = {"duration": self.duration, "kind": self.kind.value}
        if self.word is not None:
            data["word"] = self.word.to_dict()
        elif self.map is not None:
            data["map"] = self.map.to_dict()
        return data


@dataclass(frozen=True, eq=False)
class HerglotzField:
    """
    Кусочно-постоянное по времени поле Херглотца h(·, t) ∈ N_A

    Attributes:
        A: Оператор с m(A) > 0
        pieces: Куски расписания в порядке времени
    """
    A: Operator
    pieces: Tuple[FieldPiece, ...]

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        if not self.pieces:
            raise InvalidInputError("Поле должно содержать хотя бы один кусок")
        if np.linalg.eigvalsh(self.A.hermitian_part)[0] <= 0:
            raise PreconditionViolatedError("Поле Херглотца требует m(A) > 0")
        for piece in self.pieces:
            if piece.map is not None and piece.map.dim != self.A.dim:
                raise InvalidInputError("Размерность отображения куска не совпадает с A")

    @property
    def dim(self) -> int:
        return self.A.dim

    @property
    def boundaries(self) -> Tuple[float, ...]:
        """Моменты 0 = t_0 < t_1 < ... < t_K = T"""
        return (0.0,) + tuple(accumulate(piece.duration for piece in self.pieces))

    @property
    def total_time(self) -> float:
        return self.boundaries[-1]

    def piece_index(self, t: float) -> int:
        """Номер куска, действующего на [t, t+): после T: последний"""
        index = bisect_right(self.boundaries, t) - 1
        return min(max(index, 0), len(self.pieces) - 1)

    def extended(self, duration: float) -> "HerglotzField":
        """Продолжение линейным генератором h(z) = Az на duration после T"""
        return HerglotzField(self.A, self.pieces + (FieldPiece(duration, GeneratorKind.LINEAR),))

    def to_dict(self) -> Dict:
        return {"A": self.A.to_dict(), "pieces": [piece.to_dict() for piece in self.pieces]}


@dataclass(frozen=True, eq=False)
class FlowResult:
    """
    Результат интегрирования ∂v/∂t = -h(v, t), v(s) = z

    Attributes:
        value: v(z, s, t)
        steps: Число принятых шагов
        max_local_error: Максимальная оценка локальной ошибки
        rejected_steps: Число отвергнутых шагов
        start_norm: ||z||
        max_norm_increase: Максимальный рост ||v|| за шаг (должен быть <= 0)
        s: Начальный момент
        t: Конечный момент
    """
    value: np.ndarray
    steps: int
    max_local_error: float
    rejected_steps: int = 0
    start_norm: float = 0.0
    max_norm_increase: float = 0.0
    s: float = 0.0
    t: float = 0.0
    notes: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.value))

    def schwarz_ok(self, tol: float) -> bool:
        """||v|| <= ||z|| + tol"""
        return self.norm <= self.start_norm + tol

    def to_dict(self) -> Dict:
        return {
            "value": self.value,
            "steps": self.steps,
            "rejected_steps": self.rejected_steps,
            "max_local_error": self.max_local_error,
            "start_norm": self.start_norm,
            "norm": self.norm,
            "max_norm_increase": self.max_norm_increase,
            "s": self.s,
            "t": self.t,
            "notes": list(self.notes),
        }


@dataclass(frozen=True, eq=False)
class ParametricLimitResult:
    """
    Результат parametric_limit: e^{tA} v(z, 0, t) при t = 1, 2, 4, ...

    Attributes:
        value: Последнее значение
        converged: Два последовательных значения отличаются меньше допуска
        t: Последний момент
        history: Пары (t, ||разность с предыдущим||)
    """
    value: np.ndarray
    converged: bool
    t: float
    history: Tuple[Tuple[float, float], ...] = ()

    def to_dict(self) -> Dict:
        return {
            "value": self.value,
            "converged": self.converged,
            "t": self.t,
            "history": [{"t": t, "difference": d} for t, d in self.history],
        }


@dataclass(frozen=True, eq=False)
class FlowReport:
    """Потоки v(z, s, t) из нескольких точек"""
    field: HerglotzField
    s: float
    t: float
    points: np.ndarray
    results: Tuple[FlowResult, ...]

    @property
    def schwarz_ok(self) -> bool:
        return all(not result.notes for result in self.results)

    def to_dict(self) -> Dict:
        return {
            "field": self.field.to_dict(),
            "s": self.s,
            "t": self.t,
            "points": self.points,
            "results": [result.to_dict() for result in self.results],
        }


@dataclass(frozen=True, eq=False)
class ReachReport:
    """
    Элементы достижимого семейства e^{TA} v(z, 0, T) в точках

    Attributes:
        field: Поле
        points: Точки z
        values: e^{TA} v(z, 0, T)
        bounds: Оценки роста e^{T(k - m)}||z||/(1 - ||z||)²
        limits: Пределы e^{tA} v(z, 0, t) (если запрошены)
    """
    field: HerglotzField
    points: np.ndarray
    values: np.ndarray
    bounds: np.ndarray
    limits: Tuple[ParametricLimitResult, ...] = ()

    @property
    def within_bounds(self) -> bool:
        return bool(np.all(np.linalg.norm(self.values, axis=1) <= self.bounds * (1 + 1e-9)))

    def to_dict(self) -> Dict:
        return {
            "field": self.field.to_dict(),
            "T": self.field.total_time,
            "points": self.points,
            "values": self.values,
            "norms": np.linalg.norm(self.values, axis=1),
            "bounds": self.bounds,
            "within_bounds": self.within_bounds,
            "limits": [limit.to_dict() for limit in self.limits],
        }
