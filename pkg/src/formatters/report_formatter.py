"""
Форматирование отчетов ballchain

Преобразует результаты команд в два вида:
- Текстовый (консоль): с ASCII-иконками (Icon) для безопасного вывода
- JSON: конверт с метаданными запуска и результатом

Форматтер не считает ничего сам: только раскладывает готовые модели.

Examples:
    >>> formatter = ReportFormatter()
    >>> print(formatter.format_text(criterion_report))
    >>> envelope = formatter.format_json("map-test", criterion_report, run_config, seed=7, wall_time=0.4)
"""

from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from config.settings import config
from src.models import (
    ApproximationRun,
    CriterionReport,
    FlowReport,
    OperatorReport,
    ReachReport,
    SuiteResult,
)
from src.utils.icons import Icon
from src.utils.json_utils import to_jsonable


def _num(value: Optional[float], digits: int = 10) -> str:
    if value is None:
        return "-"
    return f"{value:.{digits}g}"


def _complex(value: complex) -> str:
    value = complex(value)
    if value.imag == 0:
        return _num(value.real)
    return f"{value.real:.10g}{value.imag:+.10g}i"


def _vector(values: Optional[Sequence[complex]]) -> str:
    if values is None:
        return "-"
    return "(" + ", ".join(_complex(v) for v in np.asarray(values).ravel()) + ")"


class ReportFormatter:
    """
    Форматирование отчетов команд

    Attributes:
        _separator_width: Ширина разделителей (по умолчанию 80 символов)

    Methods:
        format_text: Текстовый вид любого поддерживаемого результата
        format_json: JSON-конверт с метаданными запуска
    """

    def __init__(self, separator_width: int = 80):
        self._separator_width = separator_width

    # =========================================================================
    # ТЕКСТОВЫЙ ФОРМАТ
    # =========================================================================

    def format_text(self, result: Any, verbose: bool = False) -> str:
        """
        Текстовый отчет

        Args:
            result: OperatorReport, CriterionReport, FlowReport, ReachReport,
                ApproximationRun или SuiteResult
            verbose: Подробный вывод (детали критериев, заметки интегратора)

        Raises:
            TypeError: Неподдерживаемый тип результата
        """
        renderers = (
            (OperatorReport, self._format_operator),
            (CriterionReport, self._format_criterion),
            (FlowReport, self._format_flow),
            (ReachReport, self._format_reach),
            (ApproximationRun, self._format_approximation),
            (SuiteResult, self._format_suite),
        )
        for kind, renderer in renderers:
            if isinstance(result, kind):
                return "\n".join(renderer(result, verbose) + [""])
        raise TypeError(f"Нет текстового представления для {type(result).__name__}")

    def _header(self, title: str) -> List[str]:
        line = "=" * self._separator_width
        return [line, title, line]

    def _format_operator(self, report: OperatorReport, verbose: bool) -> List[str]:
        profile, spectrum, resonance = report.profile, report.spectrum, report.resonance
        lines = self._header(f"{Icon.MATRIX} ПРОФИЛЬ ОПЕРАТОРА (n = {len(profile.eigenvalues)})")
        lines.append(f"\n{Icon.STAT} Инварианты:")
        for label, value in (
            ("m(A)", profile.m),
            ("k(A)", profile.k),
            ("k_-(A)", profile.kminus),
            ("k_+(A)", profile.kplus),
            ("|V(A)|", profile.vr),
            ("||A||", profile.opnorm),
        ):
            lines.append(f"  • {label:<8} {_num(value)}")
        lines.append(f"  • σ(A)     {', '.join(_complex(v) for v in profile.eigenvalues)}")

        lines.append(f"\n{Icon.LIST} Свойства:")
        lines.append(f"  • k_+ < 2m: {'да' if profile.kplus_below_2m else 'нет'}")
        lines.append(f"  • A эрмитова и положительно определена: {'да' if profile.hermitian_positive_definite else 'нет'}")
        lines.append(f"  • A + A* = 2aI: {'да' if profile.scalar_hermitian_part else 'нет'}")
        if not spectrum.limit_consistent:
            lines.append(f"  {Icon.WARNING} предел log||e^{{tA}}||/t = {_num(spectrum.limit_estimate)} расходится с k_+")

        if resonance is None:
            lines.append(f"\n{Icon.RESONANCE} Резонансы: не проверялись")
            lines.append(f"  {Icon.WARNING} {report.resonance_skipped}")
            return lines

        lines.append(f"\n{Icon.RESONANCE} Резонансы: {resonance.kind.value} (перебор до |m| = {resonance.search_bound})")
        if resonance.witness is not None:
            witness = resonance.witness
            lines.append(f"  • λ_{witness.index} = Σ m_j λ_j, m = {list(witness.multi_index)}")
        if resonance.real_witness is not None:
            lines.append(f"  • вещественный резонанс: m = {list(resonance.real_witness.multi_index)}")
        if resonance.boundary_consistent is not None:
            lines.append(f"  • согласие с критерием k_+ = 2m: {'да' if resonance.boundary_consistent else 'нет'}")
        if verbose:
            for note in resonance.notes:
                lines.append(f"  {Icon.NOTE} {note}")
        return lines

    def _format_criterion(self, report: CriterionReport, verbose: bool) -> List[str]:
        lines = self._header(f"{report.verdict.to_icon()} КРИТЕРИЙ {report.criterion.value.upper()}")
        lines.append(f"\n  • Вердикт: {report.verdict.value}")
        lines.append(f"  • Минимальный запас: {_num(report.min_margin)}")
        if report.witness is not None:
            lines.append(f"  • Свидетель z: {_vector(report.witness)}")
        if report.witness_vector is not None:
            lines.append(f"  • Вектор v: {_vector(report.witness_vector)}")
        lines.append(f"  • Выборка: {report.sample_count} точек, радиусы {list(report.radii)}")
        if report.reason:
            lines.append(f"  {Icon.WARNING} {report.reason}")
        if verbose and report.details:
            lines.append(f"\n{Icon.STAT} Детали:")
            for key, value in sorted(report.details.items()):
                lines.append(f"  • {key}: {to_jsonable(value)}")
        return lines

    def _format_flow(self, report: FlowReport, verbose: bool) -> List[str]:
        field = report.field
        lines = self._header(
            f"{Icon.FLOW} ПОТОК ЛЁВНЕРА v(z, {report.s:g}, {report.t:g}) "
            f"({len(field.pieces)} кусков, T = {field.total_time:g})"
        )
        for index, (z, result) in enumerate(zip(report.points, report.results), 1):
            lines.append(f"\n  {index}. z = {_vector(z)}")
            lines.append(f"     v = {_vector(result.value)}")
            lines.append(
                f"     ||z|| = {_num(result.start_norm)}, ||v|| = {_num(result.norm)}, "
                f"шагов {result.steps}, отказов {result.rejected_steps}, ошибка {result.max_local_error:.2e}"
            )
            if verbose or result.notes:
                for note in result.notes:
                    lines.append(f"     {Icon.WARNING} {note}")
        return lines

    def _format_reach(self, report: ReachReport, verbose: bool) -> List[str]:
        lines = self._header(f"{Icon.FLOW} ДОСТИЖИМОЕ СЕМЕЙСТВО e^{{TA}} v(z, 0, T), T = {report.field.total_time:g}")
        norms = np.linalg.norm(report.values, axis=1)
        for index, (z, value, norm, bound) in enumerate(zip(report.points, report.values, norms, report.bounds), 1):
            icon = Icon.PASS if norm <= bound * (1 + 1e-9) else Icon.FAIL
            lines.append(f"\n  {index}. {icon} z = {_vector(z)}")
            lines.append(f"     f(z) = {_vector(value)}")
            lines.append(f"     ||f(z)|| = {_num(norm)} <= {_num(bound)}")
        for index, limit in enumerate(report.limits, 1):
            status = Icon.SUCCESS if limit.converged else Icon.WARNING
            lines.append(f"\n  {status} предел #{index} при t = {limit.t:g}: {_vector(limit.value)}")
        return lines

    def _format_approximation(self, run: ApproximationRun, verbose: bool) -> List[str]:
        lines = self._header(
            f"{Icon.SELECT} АППРОКСИМАЦИЯ {run.criterion.kind.value.upper()} "
            f"({run.candidate_count} кандидатов, {len(run.schedule)} шагов)"
        )
        if run.target_report is not None:
            lines.append(f"\n  • Цель: {run.target_report.verdict.value}, запас {_num(run.target_report.min_margin)}")
        radii = ", ".join(f"ρ={rho:g}" for rho in run.test_radii)
        lines.append(f"  • Расстояния на радиусах: {radii}")
        for selection, distances in zip(run.selections, run.distances):
            if not selection.selected:
                lines.append(f"\n  {selection.step}. {Icon.FAIL} r = {selection.radius:.6g}: {selection.reason}")
                continue
            lines.append(
                f"\n  {selection.step}. {Icon.PASS} r = {selection.radius:.6g}: k = {selection.index}, "
                f"запас {_num(selection.margin, 6)}"
            )
            if selection.threshold is not None:
                lines.append(f"     отклонение {_num(selection.discrepancy, 6)} / порог {_num(selection.threshold, 6)}")
            lines.append("     sup||φ - f||: " + ", ".join(f"{d.value:.3e}" + ("" if d.exact else "*") for d in distances))
        if any(not d.exact for row in run.distances for d in row):
            lines.append("\n  * нижняя оценка по выборке")
        if "lifted_by" in run.extras:
            lines.append(f"\n{Icon.NOTE} Расстояния даны для Φ∘φ_m и Φ∘f")
        return lines

    def _format_suite(self, result: SuiteResult, verbose: bool) -> List[str]:
        lines = self._header(f"{Icon.TEST} ПРИЕМОЧНЫЕ ПРОВЕРКИ ({len(result.checks)})")
        lines.append("")
        for index, check in enumerate(result.checks, 1):
            icon = Icon.PASS if check.passed else Icon.FAIL
            lines.append(f"  {index:>2}. {icon} {check.name} ({check.duration:.2f} с)")
            if check.error:
                lines.append(f"      {Icon.ERROR} {check.error}")
            if verbose or not check.passed:
                for key, value in check.details.items():
                    lines.append(f"      • {key}: {to_jsonable(value)}")

        lines.append("\n" + "=" * self._separator_width)
        if result.passed:
            lines.append(f"\n{Icon.SUCCESS} Все проверки пройдены.")
        else:
            lines.append(f"\n{Icon.WARNING} Не пройдены: {', '.join(result.failed_names)}")
        return lines

    # =========================================================================
    # JSON ФОРМАТ
    # =========================================================================

    def format_json(
        self,
        command: str,
        result: Any,
        run_config: Dict[str, Any],
        seed: int,
        wall_time: float,
        timings: Optional[Dict[str, float]] = None,
    ) -> Dict:
        """
        Конверт отчета

        Все поля, кроме metadata.wall_time, детерминированы при одинаковых
        конфигурации и сиде.

        Args:
            command: Подкоманда CLI
            result: Модель результата (с to_dict)
            run_config: Эхо конфигурации запуска
            seed: Сид
            wall_time: Полное время выполнения, с
            timings: Время по частям (для suite), входит в wall_time

        Returns:
            {"metadata": {...}, "result": {...}}
        """
        wall = {"total": wall_time, **({"parts": timings} if timings else {})}
        return {
            "metadata": {
                "tool": config.APP_NAME,
                "version": config.APP_VERSION,
                "command": command,
                "seed": seed,
                "config": to_jsonable(run_config),
                "wall_time": wall,
            },
            "result": to_jsonable(result),
        }
