"""
Модели данных приложения

Этот модуль содержит dataclass-модели для работы с:
- Операторами и их профилями (инварианты, спектр, резонансы)
- Отчетами проверки критериев, областями g(U) и приемочными проверками
- Полями Херглотца и результатами потоков Лёвнера
- Расписаниями растяжений и прогонами аппроксимации
- Перечислениями для классификации результатов
"""

from .enums import (
    ResonanceKind,
    Verdict,
    CriterionKind,
    RegionKind,
    FactorKind,
    GeneratorKind,
)

from .operator_models import (
    Operator,
    OperatorProfile,
    SpectralSummary,
    ResonanceWitness,
    ResonanceVerdict,
    OperatorReport,
)

from .report_models import (
    GRegion,
    CriterionReport,
    CheckResult,
    SuiteResult,
)

from .loewner_models import (
    FieldPiece,
    HerglotzField,
    FlowResult,
    ParametricLimitResult,
    FlowReport,
    ReachReport,
)

from .approximation_models import (
    NO_ADMISSIBLE_INDEX,
    DilationSchedule,
    CriterionSpec,
    Selection,
    ApproximationRun,
)

__all__ = [
    # Enums
    "ResonanceKind",
    "Verdict",
    "CriterionKind",
    "RegionKind",
    "FactorKind",
    "GeneratorKind",

    # Operator models
    "Operator",
    "OperatorProfile",
    "SpectralSummary",
    "ResonanceWitness",
    "ResonanceVerdict",
    "OperatorReport",

    # Report models
    "GRegion",
    "CriterionReport",
    "CheckResult",
    "SuiteResult",

    # Loewner models
    "FieldPiece",
    "HerglotzField",
    "FlowResult",
    "ParametricLimitResult",
    "FlowReport",
    "ReachReport",

    # Approximation models
    "NO_ADMISSIBLE_INDEX",
    "DilationSchedule",
    "CriterionSpec",
    "Selection",
    "ApproximationRun",
]
