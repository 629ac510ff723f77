"""
Таблицы rich для вывода команд в консоль
"""
from typing import Any

import numpy as np
from rich.table import Table

from src.models import (
    ApproximationRun,
    CriterionReport,
    FlowReport,
    OperatorReport,
    ReachReport,
    SuiteResult,
    Verdict,
)

_VERDICT_STYLE = {Verdict.PASS: "green", Verdict.FAIL: "red", Verdict.BOUNDARY: "yellow"}


def _mark(ok: bool) -> str:
    return "[green]pass[/green]" if ok else "[red]fail[/red]"


def operator_table(report: OperatorReport) -> Table:
    profile = report.profile
    table = Table(title="Профиль оператора")
    table.add_column("Величина")
    table.add_column("Значение", justify="right")
    for label, value in (
        ("m(A)", profile.m),
        ("k(A)", profile.k),
        ("k_-(A)", profile.kminus),
        ("k_+(A)", profile.kplus),
        ("|V(A)|", profile.vr),
        ("||A||", profile.opnorm),
    ):
        table.add_row(label, f"{value:.10g}")
    table.add_row("резонансы", report.resonance.kind.value if report.resonance else "не проверялись")
    table.add_row("k_+ < 2m", "да" if profile.kplus_below_2m else "нет")
    return table


def criterion_table(report: CriterionReport) -> Table:
    style = _VERDICT_STYLE[report.verdict]
    table = Table(title=f"Критерий {report.criterion.value}")
    table.add_column("Вердикт")
    table.add_column("Мин. запас", justify="right")
    table.add_column("Точек", justify="right")
    table.add_column("Причина")
    table.add_row(f"[{style}]{report.verdict.value}[/{style}]", f"{report.min_margin:.10g}",
                  str(report.sample_count), report.reason or "")
    return table


def flow_table(report: FlowReport) -> Table:
    table = Table(title=f"Поток v(z, {report.s:g}, {report.t:g})")
    for column in ("#", "||z||", "||v||", "шагов", "отказов", "ошибка"):
        table.add_column(column, justify="right")
    for index, result in enumerate(report.results, 1):
        table.add_row(str(index), f"{result.start_norm:.6g}", f"{result.norm:.6g}", str(result.steps),
                      str(result.rejected_steps), f"{result.max_local_error:.2e}")
    return table


def reach_table(report: ReachReport) -> Table:
    table = Table(title=f"Достижимое семейство, T = {report.field.total_time:g}")
    for column in ("#", "||z||", "||f(z)||", "оценка", ""):
        table.add_column(column, justify="right")
    norms = np.linalg.norm(report.values, axis=1)
    for index, (z, norm, bound) in enumerate(zip(report.points, norms, report.bounds), 1):
        table.add_row(str(index), f"{np.linalg.norm(z):.6g}", f"{norm:.6g}", f"{bound:.6g}",
                      _mark(norm <= bound * (1 + 1e-9)))
    return table


def approximation_table(run: ApproximationRun) -> Table:
    table = Table(title=f"Аппроксимация {run.criterion.kind.value}")
    table.add_column("m", justify="right")
    table.add_column("r_m", justify="right")
    table.add_column("k_m", justify="right")
    table.add_column("запас", justify="right")
    for rho in run.test_radii:
        table.add_column(f"ρ={rho:g}", justify="right")
    for selection, distances in zip(run.selections, run.distances):
        if not selection.selected:
            table.add_row(str(selection.step), f"{selection.radius:.6g}", "[red]-[/red]",
                          selection.reason or "", *["" for _ in run.test_radii])
            continue
        margin = f"{selection.margin:.4g}" if selection.margin is not None else ""
        table.add_row(str(selection.step), f"{selection.radius:.6g}", str(selection.index), margin,
                      *[f"{d.value:.3e}" for d in distances])
    return table


def suite_table(result: SuiteResult) -> Table:
    table = Table(title="Приемочные проверки")
    table.add_column("#", justify="right")
    table.add_column("Проверка")
    table.add_column("Итог")
    table.add_column("Время, с", justify="right")
    for index, check in enumerate(result.checks, 1):
        table.add_row(str(index), check.name, _mark(check.passed), f"{check.duration:.2f}")
    return table


def build_table(result: Any) -> Table:
    """
    Таблица для результата любой команды

    Raises:
        TypeError: Неподдерживаемый тип результата
    """
    builders = (
        (OperatorReport, operator_table),
        (CriterionReport, criterion_table),
        (FlowReport, flow_table),
        (ReachReport, reach_table),
        (ApproximationRun, approximation_table),
        (SuiteResult, suite_table),
    )
    for kind, builder in builders:
        if isinstance(result, kind):
            return builder(result)
    raise TypeError(f"Нет таблицы для {type(result).__name__}")
