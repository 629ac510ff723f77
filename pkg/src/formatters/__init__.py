"""
Форматтеры отчетов

Модуль для преобразования результатов команд в форматы вывода:
- Текстовый (консоль)
- JSON (файл отчета)

Exports:
    ReportFormatter: Основной класс для форматирования отчетов

Examples:
    >>> from src.formatters import ReportFormatter
    >>>
    >>> formatter = ReportFormatter()
    >>> # text = formatter.format_text(suite_result)
    >>> # envelope = formatter.format_json("suite", suite_result, run_config, seed=7, wall_time=12.3)
"""

from .report_formatter import ReportFormatter

__all__ = [
    "ReportFormatter",
]
