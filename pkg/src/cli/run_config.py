"""
Конфигурация запуска CLI

Значения собираются из трех источников (по возрастанию приоритета):
1. AppConfig (config/settings.py, .env)
2. Файл --config (YAML или JSON; ключи совпадают с именами опций)
3. Опции командной строки
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

import yaml

from config.settings import config
from src.core.errors import InvalidInputError
from src.loaders import parse_radii


def load_config_file(path: Optional[Path]) -> Dict[str, Any]:
    """
    Ключи файла конфигурации ("per-sphere" и "per_sphere" равнозначны)

    Raises:
        InvalidInputError: Файл не разбирается или не является словарем
    """
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise InvalidInputError(f"Не удалось разобрать конфигурацию {path}: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise InvalidInputError(f"Конфигурация {path} должна быть словарем")
    return {str(key).replace("-", "_"): value for key, value in data.items()}


def _radii(value) -> Optional[Sequence[float]]:
    if value is None:
        return None
    if isinstance(value, str):
        return parse_radii(value)
    return tuple(float(r) for r in value)


@dataclass
class RunConfig:
    """
    Параметры одного запуска

    Attributes:
        command: Подкоманда
        seed: Сид выборок
        tol: Допуск команды (резонансы, критерий или интегратор)
        jobs: Размер пула потоков
        out: Путь JSON-отчета
        radii: Радиусы выборки
        per_sphere: Точек на сферу
        options: Остальные опции команды (входные файлы, критерий, ...)
    """
    command: str
    seed: int
    tol: Optional[float] = None
    jobs: int = 1
    out: Optional[Path] = None
    radii: Optional[Sequence[float]] = None
    per_sphere: Optional[int] = None
    options: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def build(cls, command: str, cli_options: Dict[str, Any], config_path: Optional[Path] = None) -> "RunConfig":
        """
        Слияние файла конфигурации и опций командной строки

        Опция со значением None (не задана) не перекрывает файл.
        """
        merged = load_config_file(config_path)
        merged.update({key: value for key, value in cli_options.items() if value is not None and value != ()})

        seed = merged.pop("seed", None)
        out = merged.pop("out", None)
        per_sphere = merged.pop("per_sphere", None)
        return cls(
            command=command,
            seed=config.DEFAULT_SEED if seed is None else int(seed),
            tol=merged.pop("tol", None),
            jobs=config.resolve_jobs(merged.pop("jobs", None)),
            out=Path(out) if out is not None else None,
            radii=_radii(merged.pop("radii", None)),
            per_sphere=int(per_sphere) if per_sphere is not None else None,
            options=merged,
        )

    @property
    def report_path(self) -> Path:
        return self.out or config.get_report_path(self.command, self.seed)

    def get(self, name: str, default: Any = None) -> Any:
        return self.options.get(name, default)

    def echo(self) -> Dict[str, Any]:
        """Эхо для отчета; jobs не влияет на результат и не входит"""
        return {
            "command": self.command,
            "seed": self.seed,
            "tol": self.tol,
            "radii": list(self.radii) if self.radii is not None else None,
            "per_sphere": self.per_sphere,
            "options": {key: (str(value) if isinstance(value, Path) else value)
                        for key, value in sorted(self.options.items())},
        }
