"""
Модели линейных операторов A ∈ L(C^n) и результатов их анализа

- Operator: матрица n×n (опционально с точными рациональными элементами)
- OperatorProfile: скалярные инварианты m, k, k_-, k_+, |V|, ||A||, спектр
- SpectralSummary: результат spectral_abscissa (с проверкой предельной формулы)
- ResonanceWitness / ResonanceVerdict: результат поиска резонансов
- OperatorReport: сводка для CLI
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.core.errors import InvalidInputError
from src.models.enums import ResonanceKind


@dataclass(frozen=True, eq=False)
class Operator:
    """
    Линейный оператор A ∈ L(C^n)

    Attributes:
        entries: Комплексная матрица n×n (только чтение)
        exact_entries: Точные элементы (sympy.Rational / гауссовы рациональные),
            если оператор задан в точном режиме

    Examples:
        >>> A = Operator.from_rows([[1, 0], [0, 2.5]])
        >>> A.dim
        2
    """
    entries: np.ndarray
    exact_entries: Optional[Tuple[Tuple[Any, ...], ...]] = None

    def __post_init__(self):
        matrix = np.array(self.entries, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] < 1:
            raise InvalidInputError(f"Оператор должен быть квадратной матрицей, получено {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise InvalidInputError("Элементы оператора должны быть конечными")
        matrix.setflags(write=False)
        object.__setattr__(self, "entries", matrix)

    @classmethod
    def from_rows(cls, rows) -> "Operator":
        """Построить оператор из вложенных списков"""
        return cls(np.asarray(rows, dtype=complex))

    @classmethod
    def identity(cls, dim: int) -> "Operator":
        """Тождественный оператор I_n"""
        return cls(np.eye(dim, dtype=complex))

    @property
    def dim(self) -> int:
        """Размерность n"""
        return self.entries.shape[0]

    @property
    def is_exact(self) -> bool:
        """Задан ли оператор точными рациональными элементами"""
        return self.exact_entries is not None

    @property
    def adjoint(self) -> np.ndarray:
        """Сопряженная матрица A*"""
        return self.entries.conj().T

    @property
    def hermitian_part(self) -> np.ndarray:
        """Эрмитова часть (A + A*)/2"""
        return (self.entries + self.adjoint) / 2

    def apply(self, z) -> np.ndarray:
        """A·z для вектора или пакета векторов (последняя ось: координаты)"""
        return np.asarray(z, dtype=complex) @ self.entries.T

    def to_dict(self) -> Dict:
        """Сериализация во входной формат {"dim", "entries"}"""
        return {
            "dim": self.dim,
            "entries": [[{"re": float(c.real), "im": float(c.imag)} for c in row] for row in self.entries],
        }


@dataclass(frozen=True)
class SpectralSummary:
    """
    Результат spectral_abscissa

    Attributes:
        kplus: max Re λ (спектральная абсцисса, показатель Ляпунова)
        kminus: min Re λ
        eigenvalues: Собственные значения
        limit_estimate: log||e^{tA}||/t при большом t
        limit_consistent: |limit_estimate - kplus| <= допуска
    """
    kplus: float
    kminus: float
    eigenvalues: Tuple[complex, ...]
    limit_estimate: float
    limit_consistent: bool

    def to_dict(self) -> Dict:
        return {
            "kplus": self.kplus,
            "kminus": self.kminus,
            "eigenvalues": list(self.eigenvalues),
            "limit_estimate": self.limit_estimate,
            "limit_consistent": self.limit_consistent,
        }


@dataclass(frozen=True)
class OperatorProfile:
    """
    Профиль оператора: все скалярные инварианты

    Инварианты (в пределах tau_lin):
        m <= kplus <= vr <= opnorm <= 2*vr,  m <= kminus <= kplus

    Attributes:
        m: min Re<Az,z> на сфере (наименьшее с.з. эрмитовой части)
        k: max Re<Az,z> на сфере
        kminus: min Re λ
        kplus: max Re λ
        vr: численный радиус |V(A)|
        opnorm: операторная норма ||A||
        eigenvalues: спектр σ(A)
        kplus_below_2m: k_+ < 2m (достаточное условие нерезонансности)
        hermitian_positive_definite: A эрмитова и положительно определена
        scalar_hermitian_part: A + A* = 2aI при некотором a > 0
    """
    m: float
    k: float
    kminus: float
    kplus: float
    vr: float
    opnorm: float
    eigenvalues: Tuple[complex, ...]
    kplus_below_2m: bool = False
    hermitian_positive_definite: bool = False
    scalar_hermitian_part: bool = False

    def to_dict(self) -> Dict:
        return {
            "m": self.m,
            "k": self.k,
            "kminus": self.kminus,
            "kplus": self.kplus,
            "vr": self.vr,
            "opnorm": self.opnorm,
            "eigenvalues": list(self.eigenvalues),
            "kplus_below_2m": self.kplus_below_2m,
            "hermitian_positive_definite": self.hermitian_positive_definite,
            "scalar_hermitian_part": self.scalar_hermitian_part,
        }


@dataclass(frozen=True)
class ResonanceWitness:
    """
    Свидетель резонанса λ_s = Σ m_j λ_j

    Attributes:
        index: s (нумерация с 0)
        multi_index: (m_1, ..., m_n), Σ m_j >= 2
        residual: |λ_s - Σ m_j λ_j|
    """
    index: int
    multi_index: Tuple[int, ...]
    residual: float

    @property
    def order(self) -> int:
        return sum(self.multi_index)

    def to_dict(self) -> Dict:
        return {"index": self.index, "multi_index": list(self.multi_index), "residual": self.residual}


@dataclass(frozen=True)
class ResonanceVerdict:
    """
    Результат detect_resonance

    Attributes:
        kind: nonresonant / resonant / resonant-within-tolerance
        witness: Свидетель резонанса (если есть)
        real_resonant: Есть ли вещественные резонансы
        real_witness: Свидетель вещественного резонанса
        search_bound: Максимальная перебранная Σ m_j (гарантированная граница)
        boundary_consistent: Согласие с критерием «k_+ = 2m» (None, если m не известен)
        notes: Диагностические заметки
    """
    kind: ResonanceKind
    witness: Optional[ResonanceWitness]
    real_resonant: bool
    search_bound: int
    real_witness: Optional[ResonanceWitness] = None
    boundary_consistent: Optional[bool] = None
    notes: List[str] = field(default_factory=list)

    @property
    def is_resonant(self) -> bool:
        return self.kind.is_resonant

    def to_dict(self) -> Dict:
        return {
            "kind": self.kind.value,
            "witness": self.witness.to_dict() if self.witness else None,
            "real_resonant": self.real_resonant,
            "real_witness": self.real_witness.to_dict() if self.real_witness else None,
            "search_bound": self.search_bound,
            "boundary_consistent": self.boundary_consistent,
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class OperatorReport:
    """
    Отчет команды operator: профиль, спектр и резонансы

    resonance равен None, если поиск резонансов неприменим (есть Re λ_j <= 0);
    причина тогда записана в resonance_skipped.
    """
    profile: OperatorProfile
    spectrum: SpectralSummary
    resonance: Optional[ResonanceVerdict]
    exact: bool = False
    resonance_skipped: Optional[str] = None

    def to_dict(self) -> Dict:
        return {
            "exact": self.exact,
            "profile": self.profile.to_dict(),
            "spectrum": self.spectrum.to_dict(),
            "resonance": self.resonance.to_dict() if self.resonance else None,
            "resonance_skipped": self.resonance_skipped,
        }
