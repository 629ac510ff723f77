"""
Модели процедуры аппроксимации растяжениями φ_m(z) = ψ_{k_m}(r_m z)/r_m
"""
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Tuple

from src.core.errors import InvalidInputError
from src.models.enums import CriterionKind
from src.models.operator_models import Operator
from src.models.report_models import CriterionReport, GRegion

if TYPE_CHECKING:
    from src.core.polymap import PolyMap, SupDistance

NO_ADMISSIBLE_INDEX = "no-admissible-index"


@dataclass(frozen=True)
class DilationSchedule:
    """
    Строго возрастающие радиусы r_m ∈ (0, 1)

    Examples:
        >>> DilationSchedule.default(3).radii
        (0.5, 0.75, 0.875)
    """
    radii: Tuple[float, ...]

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        if not radii:
            raise InvalidInputError("Расписание растяжений пусто")
        if any(not 0 < r < 1 for r in radii):
            raise InvalidInputError(f"Радиусы расписания должны лежать в (0, 1): {radii}")
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise InvalidInputError(f"Радиусы расписания должны строго возрастать: {radii}")
        object.__setattr__(self, "radii", radii)

    @classmethod
    def default(cls, length: int = 10) -> "DilationSchedule":
        """r_m = 1 - 2^{-m}, m = 1..length"""
        return cls(tuple(1 - 2.0 ** (-m) for m in range(1, length + 1)))

    def __len__(self) -> int:
        return len(self.radii)

    def to_dict(self) -> Dict:
        return {"radii": list(self.radii)}


@dataclass(frozen=True, eq=False)
class CriterionSpec:
    """
    Критерий с параметрами

    Attributes:
        kind: Критерий
        operator: A для спиралеобразности
        region: g(U) для g-звездности
    """
    kind: CriterionKind
    operator: Optional[Operator] = None
    region: Optional[GRegion] = None

    def __post_init__(self):
        if self.kind == CriterionKind.SPIRALLIKE and self.operator is None:
            raise InvalidInputError("Критерий spirallike требует оператор A")
        if self.kind == CriterionKind.G_STARLIKE and self.region is None:
            object.__setattr__(self, "region", GRegion())

    def to_dict(self) -> Dict:
        return {
            "kind": self.kind.value,
            "operator": self.operator.to_dict() if self.operator is not None else None,
            "region": self.region.to_dict() if self.region is not None else None,
        }


@dataclass
class Selection:
    """
    Выбор индекса k_m на шаге m

    Attributes:
        step: m (с 1)
        radius: r_m
        index: Выбранный k_m (None, если допустимого нет)
        margin: Запас критерия для φ_m
        threshold: Порог допуска (δ/ε-правило), если применим
        discrepancy: Измеренное отклонение кандидата от цели
        reason: no-admissible-index или текст ошибки
        report: Отчет проверки φ_m
    """
    step: int
    radius: float
    index: Optional[int] = None
    margin: Optional[float] = None
    threshold: Optional[float] = None
    discrepancy: Optional[float] = None
    reason: Optional[str] = None
    report: Optional[CriterionReport] = None

    @property
    def selected(self) -> bool:
        return self.index is not None

    def to_dict(self) -> Dict:
        return {
            "step": self.step,
            "radius": self.radius,
            "index": self.index,
            "margin": self.margin,
            "threshold": self.threshold,
            "discrepancy": self.discrepancy,
            "reason": self.reason,
            "report": self.report.to_dict() if self.report is not None else None,
        }


@dataclass
class ApproximationRun:
    """
    Прогон аппроксимации

    Attributes:
        target: Цель f
        criterion: Критерий
        schedule: Расписание r_m
        candidate_count: Число кандидатов ψ_k
        selections: Выбор на каждом шаге
        distances: Для каждого шага: sup-расстояния φ_m до f на test_radii
        test_radii: Радиусы измерения расстояний
        target_report: Проверка цели
        approximants: φ_m для выбранных шагов (None, если индекс не найден)
        extras: Дополнительные результаты (например, подъем композицией)
    """
    target: "PolyMap"
    criterion: CriterionSpec
    schedule: DilationSchedule
    candidate_count: int
    selections: List[Selection] = field(default_factory=list)
    distances: List[List["SupDistance"]] = field(default_factory=list)
    test_radii: Tuple[float, ...] = ()
    target_report: Optional[CriterionReport] = None
    approximants: List[Optional["PolyMap"]] = field(default_factory=list)
    extras: Dict[str, Any] = field(default_factory=dict)

    @property
    def selected_indices(self) -> List[Optional[int]]:
        return [selection.index for selection in self.selections]

    @property
    def all_selected(self) -> bool:
        return bool(self.selections) and all(selection.selected for selection in self.selections)

    def to_dict(self) -> Dict:
        return {
            "target": self.target.to_dict(),
            "criterion": self.criterion.to_dict(),
            "schedule": self.schedule.to_dict(),
            "candidate_count": self.candidate_count,
            "test_radii": list(self.test_radii),
            "target_report": self.target_report.to_dict() if self.target_report is not None else None,
            "selections": [selection.to_dict() for selection in self.selections],
            "distances": [[distance.to_dict() for distance in row] for row in self.distances],
            "extras": self.extras,
        }
