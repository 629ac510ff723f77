"""
CLI ballchain

Подкоманды:
    operator   профиль оператора и резонансы
    map-test   проверка критерия для отображения
    flow       переходные отображения v(z, s, t) поля Херглотца
    reach      элементы достижимого семейства и параметрические пределы
    approx     аппроксимация растяжениями автоморфизмов
    suite      набор приемочных проверок

Коды выхода: 0 при успехе, 1 если критерий или проверка не пройдены (отчет все равно
записан), 2 при ошибке ввода, файла или использования.

Examples:
    ballchain operator --in operator.json
    ballchain map-test --builtin identity --criterion convex
    ballchain suite --builtin reference-examples --jobs 4
"""
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import click
import numpy as np
from rich.console import Console

from config.settings import config
from src.analyzers import AcceptanceSuite
from src.core.approximation import (
    criterion_report,
    lift_run,
    perturbed_candidates,
    run_approximation,
    truncated_candidates,
)
from src.core.catalog import REFERENCE_EXAMPLES, lookup
from src.core.criteria import caratheodory_test, verify_growth_bounds
from src.core.errors import BallChainError, InvalidInputError, PreconditionViolatedError
from src.core.loewner import flow_many, parametric_limit, reachable_eval, reachable_growth_bound
from src.core.operator_analysis import analyze_resonance, operator_profile, spectral_abscissa
from src.core.polymap import PolyMap
from src.core.sampling import BallSample, make_sample, sphere_directions
from src.cli.run_config import RunConfig
from src.cli.ui import build_table
from src.formatters import ReportFormatter
from src.loaders import JsonInputLoader, parse_radii, parse_vector
from src.models import (
    CriterionKind,
    CriterionSpec,
    DilationSchedule,
    FlowReport,
    GRegion,
    HerglotzField,
    Operator,
    OperatorReport,
    ReachReport,
    RegionKind,
)
from src.utils.icons import Icon
from src.utils.json_utils import dumps_json, load_json, save_json
from src.utils.logger import get_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_ERROR = 2

CRITERIA = [kind.value for kind in CriterionKind]
REGIONS = [kind.value for kind in RegionKind]


# ============================================================================
# ОБЩИЕ ОПЦИИ
# ============================================================================

def common_options(command: Callable) -> Callable:
    """Опции, общие для всех подкоманд"""
    options = [
        click.option("--seed", type=int, default=None, help="Сид выборок (по умолчанию BALLCHAIN_SEED или 7)"),
        click.option("--tol", type=float, default=None, help="Допуск команды"),
        click.option("--jobs", type=int, default=None, envvar="BALLCHAIN_JOBS",
                     help="Размер пула потоков (по умолчанию BALLCHAIN_JOBS или число ядер)"),
        click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None,
                     help="Путь JSON-отчета"),
        click.option("--radii", type=str, default=None, help="Радиусы выборки: 0.1,0.5,0.9"),
        click.option("--per-sphere", type=int, default=None, help="Точек на сферу"),
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path),
                     default=None, help="Файл конфигурации запуска (YAML/JSON)"),
        click.option("--format", "output_format", type=click.Choice(["table", "text", "json"]), default="table",
                     show_default=True, help="Вид вывода в консоль"),
        click.option("--verbose", is_flag=True, default=False, help="Подробный текстовый вывод"),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def _execute(
    ctx: click.Context,
    command: str,
    cli_options: Dict[str, Any],
    compute: Callable[[RunConfig], Tuple[Any, bool]],
) -> None:
    """
    Общий цикл команды: конфигурация, вычисление, отчет, код выхода

    BallChainError, ошибки ввода-вывода и неразборчивые значения дают код 2 без отчета.
    """
    output_format = cli_options.pop("output_format")
    verbose = cli_options.pop("verbose")
    config_path = cli_options.pop("config_path")
    started = time.perf_counter()
    try:
        run = RunConfig.build(command, cli_options, config_path)
        result, passed = compute(run)
        wall_time = time.perf_counter() - started
        timings = result.timings() if hasattr(result, "timings") else None
        envelope = ReportFormatter().format_json(command, result, run.echo(), run.seed, wall_time, timings)
        save_json(envelope, run.report_path)
    except (BallChainError, OSError, ValueError) as e:
        click.echo(f"{Icon.ERROR} {type(e).__name__}: {e}", err=True)
        logger.error(f"{Icon.ERROR} {command}: {e}")
        ctx.exit(EXIT_ERROR)
        return

    if output_format == "json":
        click.echo(dumps_json(envelope))
    elif output_format == "text":
        click.echo(ReportFormatter().format_text(result, verbose=verbose))
    else:
        Console().print(build_table(result))
    click.echo(f"{Icon.SAVE} Отчет: {run.report_path}", err=True)
    ctx.exit(EXIT_OK if passed else EXIT_FAIL)


# ============================================================================
# ВХОДНЫЕ ДАННЫЕ
# ============================================================================

def _sample(dim: int, run: RunConfig, tangent_count: Optional[int] = None) -> BallSample:
    return make_sample(dim, run.radii, run.per_sphere, tangent_count=tangent_count, seed=run.seed)


def _operator(run: RunConfig, path_key: str, builtin_key: str, required: bool = True) -> Optional[Operator]:
    loader = JsonInputLoader()
    if run.get(path_key):
        return loader.load_operator(Path(run.get(path_key)))
    if run.get(builtin_key):
        return lookup("operator", run.get(builtin_key))
    if required:
        raise InvalidInputError(f"Нужен оператор: --{path_key.replace('_', '-')} или --{builtin_key.replace('_', '-')}")
    return None


def _map(run: RunConfig, path_key: str, builtin_key: str) -> PolyMap:
    if run.get(path_key):
        return JsonInputLoader().load_map(Path(run.get(path_key)))
    if run.get(builtin_key):
        return lookup("map", run.get(builtin_key))
    raise InvalidInputError(f"Нужно отображение: --{path_key.replace('_', '-')} или --builtin")


def _field(run: RunConfig) -> HerglotzField:
    """Поле из --field (генераторы проверяются на выборке по сиду) или встроенное"""
    if run.get("field"):
        loader = JsonInputLoader()
        path = Path(run.get("field"))
        data = load_json(path)
        if not isinstance(data, dict) or "A" not in data:
            raise InvalidInputError(f"В поле {path} нет оператора A")
        dim = loader.parse_operator(data["A"]).dim
        sample = make_sample(dim, run.radii, run.per_sphere or config.FIELD_PER_SPHERE, tangent_count=0,
                             seed=run.seed)
        return loader.parse_field(data, sample)
    if run.get("builtin"):
        return lookup("field", run.get("builtin"))
    raise InvalidInputError("Нужно поле: --field или --builtin")


def _points(run: RunConfig, dim: int) -> np.ndarray:
    """Точки из --points, --point или четыре точки радиуса 1/2 по сиду"""
    if run.get("points"):
        return JsonInputLoader().load_points(Path(run.get("points")), dim)
    raw = run.get("point")
    if raw:
        points = np.array([parse_vector(text) if isinstance(text, str) else np.asarray(text, dtype=complex)
                           for text in raw])
        if points.shape[1] != dim:
            raise InvalidInputError(f"Точки размерности {points.shape[1]}, ожидалась {dim}")
        return points
    return 0.5 * sphere_directions(dim, 4, run.seed, stream=11)


def _criterion(run: RunConfig, dim: int) -> CriterionSpec:
    kind = CriterionKind(run.get("criterion"))
    region = None
    if kind == CriterionKind.G_STARLIKE:
        region = GRegion(RegionKind(run.get("region", RegionKind.HALF_PLANE.value)), run.get("alpha"))
    operator = _operator(run, "operator", "operator_builtin", required=kind == CriterionKind.SPIRALLIKE)
    if operator is not None and operator.dim != dim:
        raise InvalidInputError(f"Размерность оператора {operator.dim} не совпадает с отображением {dim}")
    return CriterionSpec(kind, operator=operator, region=region)


def _schedule(value) -> DilationSchedule:
    """Длина расписания (целое), "default" или явные радиусы"""
    if value is None or value == "default":
        return DilationSchedule.default(config.SCHEDULE_LENGTH)
    if isinstance(value, int) or (isinstance(value, str) and value.strip().isdigit()):
        return DilationSchedule.default(int(value))
    return DilationSchedule(tuple(parse_radii(value) if isinstance(value, str) else value))


# ============================================================================
# КОМАНДЫ
# ============================================================================

@click.group()
@click.version_option(config.APP_VERSION, prog_name="ballchain")
def cli():
    """Цепи Лёвнера, критерии классов отображений и аппроксимация на шаре в C^n"""


@cli.command("operator")
@click.option("--in", "input_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None,
              help="JSON оператора")
@click.option("--builtin", type=str, default=None, help="Встроенный оператор")
@common_options
@click.pass_context
def operator_command(ctx: click.Context, **options):
    """Инварианты m, k, k_+, |V|, ||A||, спектр и резонансы"""

    def compute(run: RunConfig):
        A = _operator(run, "input_path", "builtin")
        profile, spectrum = operator_profile(A), spectral_abscissa(A)
        resonance, skipped = None, None
        try:
            resonance = analyze_resonance(A, tol=run.tol)
        except PreconditionViolatedError as e:
            # профиль и спектр остаются в отчете
            logger.warning(f"{Icon.WARNING} Резонансы не проверены: {e}")
            skipped = str(e)
        report = OperatorReport(
            profile=profile,
            spectrum=spectrum,
            resonance=resonance,
            exact=A.is_exact,
            resonance_skipped=skipped,
        )
        return report, True

    _execute(ctx, "operator", options, compute)


@cli.command("map-test")
@click.option("--map", "map_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None,
              help="JSON отображения или слова")
@click.option("--builtin", type=str, default=None, help="Встроенное отображение")
@click.option("--criterion", type=click.Choice(CRITERIA), default=None, help="Критерий")
@click.option("--operator", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None,
              help="JSON оператора A (spirallike, caratheodory, growth)")
@click.option("--operator-builtin", type=str, default=None, help="Встроенный оператор A")
@click.option("--region", type=click.Choice(REGIONS), default=None, help="Область g(U) для g-starlike")
@click.option("--alpha", type=float, default=None, help="Порядок области g(U)")
@click.option("--refine/--no-refine", default=None, help="Уточнение свидетеля Нелдером-Мидом")
@common_options
@click.pass_context
def map_test_command(ctx: click.Context, **options):
    """Проверка критерия на выборке в шаре"""

    def compute(run: RunConfig):
        if not run.get("criterion"):
            raise InvalidInputError("Нужен --criterion")
        f = _map(run, "map_path", "builtin")
        refine = run.get("refine", config.REFINE_WITNESS)
        kind = CriterionKind(run.get("criterion"))
        if kind in (CriterionKind.CARATHEODORY, CriterionKind.GROWTH):
            A = _operator(run, "operator", "operator_builtin")
            sample = _sample(f.dim, run, tangent_count=0)
            if kind == CriterionKind.CARATHEODORY:
                report = caratheodory_test(f, A, sample, refine=refine, tau=run.tol)
            else:
                report = verify_growth_bounds(f, A, sample, tau=run.tol)
        else:
            report = criterion_report(f, _criterion(run, f.dim), _sample(f.dim, run), refine=refine, tau=run.tol)
        return report, not report.failed

    _execute(ctx, "map-test", options, compute)


def _point_options(command: Callable) -> Callable:
    command = click.option("--points", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None,
                           help="JSON со списком точек")(command)
    command = click.option("--point", type=str, multiple=True, help="Точка: 0.3,0.1+0.2j (можно несколько)")(command)
    command = click.option("--builtin", type=str, default=None, help="Встроенное поле")(command)
    command = click.option("--field", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None,
                           help="JSON поля Херглотца")(command)
    return command


@cli.command("flow")
@_point_options
@click.option("--s", "s", type=float, default=None, help="Начальный момент (0)")
@click.option("--t", "t", type=float, default=None, help="Конечный момент (T)")
@common_options
@click.pass_context
def flow_command(ctx: click.Context, **options):
    """Переходные отображения v(z, s, t)"""

    def compute(run: RunConfig):
        field = _field(run)
        points = _points(run, field.dim)
        s = float(run.get("s", 0.0))
        t = float(run.get("t", field.total_time))
        results = flow_many(field, points, s, t, run.tol, run.jobs)
        report = FlowReport(field=field, s=s, t=t, points=points, results=tuple(results))
        return report, report.schwarz_ok

    _execute(ctx, "flow", options, compute)


@cli.command("reach")
@_point_options
@click.option("--limit", is_flag=True, default=None, help="Также e^{tA} v(z, 0, t) при t → ∞")
@click.option("--t-max", type=float, default=None, help="Горизонт предела")
@common_options
@click.pass_context
def reach_command(ctx: click.Context, **options):
    """Элементы достижимого семейства e^{TA} v(z, 0, T) и оценка роста"""

    def compute(run: RunConfig):
        field = _field(run)
        points = _points(run, field.dim)
        values = np.array([reachable_eval(field, z, run.tol) for z in points])
        limits: Tuple = ()
        if run.get("limit"):
            limits = tuple(parametric_limit(field, z, t_max=run.get("t_max"), flow_tol=run.tol) for z in points)
        report = ReachReport(
            field=field,
            points=points,
            values=values,
            bounds=reachable_growth_bound(field.A, field.total_time, points),
            limits=limits,
        )
        return report, report.within_bounds

    _execute(ctx, "reach", options, compute)


def _candidates(run: RunConfig, target: PolyMap) -> List:
    if run.get("candidates"):
        return JsonInputLoader().load_candidates(Path(run.get("candidates")))
    if run.get("word"):
        scales = parse_radii(run.get("perturb")) if isinstance(run.get("perturb"), str) else run.get("perturb", (0.0,))
        return perturbed_candidates(lookup("word", run.get("word")), scales, seed=run.seed)
    return truncated_candidates(target)


@cli.command("approx")
@click.option("--target", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None,
              help="JSON цели f")
@click.option("--builtin", type=str, default=None, help="Встроенная цель")
@click.option("--candidates", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None,
              help="JSON со списком кандидатов ψ_k")
@click.option("--word", type=str, default=None, help="Встроенное слово для возмущенных кандидатов")
@click.option("--perturb", type=str, default=None, help="Масштабы возмущений: 0.1,0.01,0")
@click.option("--criterion", type=click.Choice([k.value for k in CriterionKind
                                                if k not in (CriterionKind.CARATHEODORY, CriterionKind.GROWTH)]),
              default=None, help="Критерий")
@click.option("--operator", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None,
              help="JSON оператора A для spirallike")
@click.option("--operator-builtin", type=str, default=None, help="Встроенный оператор A")
@click.option("--region", type=click.Choice(REGIONS), default=None, help="Область g(U)")
@click.option("--alpha", type=float, default=None, help="Порядок области g(U)")
@click.option("--schedule", type=str, default=None, help="Длина расписания или радиусы r_m")
@click.option("--test-radii", type=str, default=None, help="Радиусы измерения расстояний")
@click.option("--lift", type=str, default=None, help="Встроенное слово Φ для подъема Φ∘φ_m")
@common_options
@click.pass_context
def approx_command(ctx: click.Context, **options):
    """Выбор k_m и расстояния φ_m = ψ_{k_m}(r_m ·)/r_m до цели"""

    def compute(run: RunConfig):
        if not run.get("criterion"):
            raise InvalidInputError("Нужен --criterion")
        target = _map(run, "target", "builtin")
        test_radii = run.get("test_radii")
        result = run_approximation(
            target,
            _candidates(run, target),
            _criterion(run, target.dim),
            schedule=_schedule(run.get("schedule")),
            test_radii=parse_radii(test_radii) if isinstance(test_radii, str) else test_radii,
            sample=_sample(target.dim, run),
        )
        if run.get("lift"):
            result = lift_run(result, lookup("word", run.get("lift")))
        return result, result.all_selected

    _execute(ctx, "approx", options, compute)


@cli.command("suite")
@click.option("--builtin", type=click.Choice([REFERENCE_EXAMPLES]), default=REFERENCE_EXAMPLES, show_default=True,
              help="Набор проверок")
@click.option("--check", type=click.Choice(AcceptanceSuite.names()), multiple=True, help="Только эти проверки")
@click.option("--matrices", type=int, default=None, help="Операторов в проверке цепочки неравенств")
@common_options
@click.pass_context
def suite_command(ctx: click.Context, **options):
    """Приемочные проверки (все по умолчанию)"""

    def compute(run: RunConfig):
        suite = AcceptanceSuite(
            seed=run.seed,
            flow_tol=run.tol,
            per_sphere=run.per_sphere,
            jobs=run.jobs,
            matrices=int(run.get("matrices", 1000)),
        )
        result = suite.run(run.get("check"))
        return result, result.passed

    _execute(ctx, "suite", options, compute)


# ============================================================================
# ТОЧКА ВХОДА
# ============================================================================

def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Запуск CLI

    Returns:
        Код выхода: 0 успех, 1 провал критерия, 2 ошибка ввода/использования
    """
    try:
        code = cli.main(args=list(argv) if argv is not None else None, prog_name="ballchain",
                        standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return EXIT_ERROR
    except click.Abort:
        return EXIT_ERROR
    return code if isinstance(code, int) else EXIT_OK
