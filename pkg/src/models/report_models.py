"""
Модели отчетов проверки критериев

- GRegion: область g(U) для g-звездности
- CriterionReport: вердикт, минимальный запас и свидетель
- CheckResult / SuiteResult: приемочные проверки
"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.core.errors import InvalidInputError
from src.models.enums import CriterionKind, RegionKind, Verdict


@dataclass(frozen=True)
class GRegion:
    """
    Область g(U)

    Attributes:
        kind: Полуплоскость, диск порядка alpha или сектор порядка alpha
        alpha: Параметр (для диска α ∈ (0,1), для сектора α ∈ (0,1])
    """
    kind: RegionKind = RegionKind.HALF_PLANE
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.kind == RegionKind.DISK and not (self.alpha is not None and 0 < self.alpha < 1):
            raise InvalidInputError(f"Для диска нужен alpha ∈ (0, 1), получено {self.alpha}")
        if self.kind == RegionKind.SECTOR and not (self.alpha is not None and 0 < self.alpha <= 1):
            raise InvalidInputError(f"Для сектора нужен alpha ∈ (0, 1], получено {self.alpha}")

    def margin(self, q: np.ndarray) -> np.ndarray:
        """Запас принадлежности q области (> 0 внутри)"""
        q = np.asarray(q, dtype=complex)
        if self.kind == RegionKind.HALF_PLANE:
            return q.real
        if self.kind == RegionKind.DISK:
            center = 1 / (2 * self.alpha)
            return center - np.abs(q - center)
        return self.alpha * math.pi / 2 - np.abs(np.angle(q))

    def to_dict(self) -> Dict:
        return {"kind": self.kind.value, "alpha": self.alpha}


@dataclass
class CriterionReport:
    """
    Результат проверки критерия на выборке

    FAIL означает найденный контрпример (witness), PASS лишь подтверждается
    выборкой.

    Attributes:
        criterion: Проверяемый критерий
        verdict: pass / fail / boundary
        min_margin: Минимальный запас (-inf при вырожденной матрице Якоби)
        witness: Точка минимального запаса
        witness_vector: Касательный вектор (для выпуклости)
        sample_count: Число проверенных точек (или пар)
        radii: Радиусы выборки
        reason: Причина провала, если она не сводится к запасу
        details: Дополнительные величины критерия
    """
    criterion: CriterionKind
    verdict: Verdict
    min_margin: float
    witness: Optional[np.ndarray] = None
    witness_vector: Optional[np.ndarray] = None
    sample_count: int = 0
    radii: Tuple[float, ...] = ()
    reason: Optional[str] = None
    details: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_margin(
        cls,
        criterion: CriterionKind,
        margin: float,
        tau: float,
        **kwargs,
    ) -> "CriterionReport":
        """Отчет с вердиктом, согласованным с запасом"""
        return cls(criterion=criterion, verdict=Verdict.from_margin(margin, tau), min_margin=margin, **kwargs)

    @classmethod
    def failure(cls, criterion: CriterionKind, reason: str, **kwargs) -> "CriterionReport":
        """Провал без числового запаса (вырожденность, нарушение нормировки)"""
        return cls(criterion=criterion, verdict=Verdict.FAIL, min_margin=-math.inf, reason=reason, **kwargs)

    @property
    def passed(self) -> bool:
        return self.verdict == Verdict.PASS

    @property
    def failed(self) -> bool:
        return self.verdict == Verdict.FAIL

    def to_dict(self) -> Dict:
        return {
            "criterion": self.criterion.value,
            "verdict": self.verdict.value,
            "min_margin": self.min_margin,
            "witness": self.witness,
            "witness_vector": self.witness_vector,
            "sample_count": self.sample_count,
            "radii": list(self.radii),
            "reason": self.reason,
            "details": self.details,
        }


@dataclass
class CheckResult:
    """
    Результат одной приемочной проверки

    Attributes:
        name: Имя проверки
        passed: Проверка пройдена
        details: Измеренные величины
        error: Текст исключения, если проверка упала
        duration: Время выполнения, с (не входит в to_dict)
    """
    name: str
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)
    error: Optional[str] = None
    duration: float = 0.0

    def to_dict(self) -> Dict:
        return {"name": self.name, "passed": self.passed, "details": self.details, "error": self.error}


@dataclass
class SuiteResult:
    """Результаты набора приемочных проверок в порядке объявления"""
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(check.passed for check in self.checks)

    @property
    def failed_names(self) -> List[str]:
        return [check.name for check in self.checks if not check.passed]

    def timings(self) -> Dict[str, float]:
        return {check.name: check.duration for check in self.checks}

    def to_dict(self) -> Dict:
        return {
            "passed": self.passed,
            "total": len(self.checks),
            "failed": self.failed_names,
            "checks": [check.to_dict() for check in self.checks],
        }
