"""
Перечисления для классификации результатов

Разделяет независимые концепции:
1. ResonanceKind: статус резонансности оператора
2. Verdict: вердикт проверки критерия на выборке
3. CriterionKind: КАКОЙ критерий проверяется
4. RegionKind: область g(U) для g-звездности
5. FactorKind: тип множителя в слове автоморфизма
6. GeneratorKind: тип генератора куска поля Херглотца
"""

from enum import Enum

from src.utils.icons import Icon


class ResonanceKind(Enum):
    """
    Статус резонансности набора собственных значений

    Точный RESONANT выдается только при точных (рациональных/гауссовых)
    собственных значениях; для чисел с плавающей точкой: RESONANT_WITHIN_TOLERANCE.

    Examples:
        >>> verdict = detect_resonance([1, 2])
        >>> verdict.kind == ResonanceKind.RESONANT
        True
    """
    NONRESONANT = "nonresonant"
    RESONANT = "resonant"
    RESONANT_WITHIN_TOLERANCE = "resonant-within-tolerance"

    @property
    def is_resonant(self) -> bool:
        """Есть ли резонанс (точный или в пределах допуска)"""
        return self is not ResonanceKind.NONRESONANT


class Verdict(Enum):
    """
    Вердикт проверки критерия

    Выборка доказывает FAIL (свидетель: контрпример), но PASS лишь подтверждает.
    BOUNDARY: |minMargin| <= tau_crit.
    """
    PASS = "pass"
    FAIL = "fail"
    BOUNDARY = "boundary"

    def to_icon(self) -> str:
        """ASCII-иконка (безопасна для cp1251)"""
        mapping = {
            Verdict.PASS: Icon.PASS,
            Verdict.FAIL: Icon.FAIL,
            Verdict.BOUNDARY: Icon.BOUNDARY,
        }
        return mapping[self]

    @classmethod
    def from_margin(cls, margin: float, tau: float) -> "Verdict":
        """Вердикт по минимальному запасу"""
        if margin < -tau:
            return cls.FAIL
        if abs(margin) <= tau:
            return cls.BOUNDARY
        return cls.PASS


class CriterionKind(Enum):
    """Проверяемый критерий"""
    CARATHEODORY = "caratheodory"
    GROWTH = "growth"
    SPIRALLIKE = "spirallike"
    STARLIKE = "starlike"
    G_STARLIKE = "g-starlike"
    CONVEX = "convex"
    Q_CLASS = "q"
    QTILDE = "qtilde"
    KTILDE = "ktilde"


class RegionKind(Enum):
    """
    Область g(U) для g-звездности

    - HALF_PLANE: Re q > 0 (обычная звездность)
    - DISK: звездность порядка alpha, |q - 1/(2a)| < 1/(2a)
    - SECTOR: сильная звездность порядка alpha, |arg q| < a*pi/2
    """
    HALF_PLANE = "half-plane"
    DISK = "disk-of-order"
    SECTOR = "sector-of-order"


class FactorKind(Enum):
    """Тип множителя слова автоморфизма"""
    SHEAR = "shear"
    OVERSHEAR = "overshear"
    LINEAR = "linear"


class GeneratorKind(Enum):
    """Тип генератора куска поля Херглотца"""
    LINEAR = "linear"
    SPIRALLIKE = "spirallike"
