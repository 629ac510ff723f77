"""
Приемочные проверки

Основные компоненты:
- AcceptanceSuite: набор именованных проверок с пулом потоков
- SuiteSettings: параметры прогона
- CHECKS: имена и функции проверок в порядке объявления
"""

from src.analyzers.acceptance_suite import CHECKS, AcceptanceSuite, SuiteSettings

__all__ = [
    "AcceptanceSuite",
    "SuiteSettings",
    "CHECKS",
]
