"""
Утилиты для работы с JSON
"""
import json
import math
from enum import Enum
from pathlib import Path
from typing import Dict, Any, List

import numpy as np
from jsonschema import Draft202012Validator, ValidationError

from src.utils.logger import get_logger
from src.utils.icons import Icon

logger = get_logger(__name__)


# ============================================================================
# ЗАГРУЗКА И СОХРАНЕНИЕ JSON
# ============================================================================

def load_json(file_path: Path) -> Dict[str, Any]:
    """
    Загрузить JSON из файла

    Args:
        file_path: Путь к JSON файлу

    Returns:
        Словарь с данными из JSON

    Raises:
        FileNotFoundError: Если файл не найден
        json.JSONDecodeError: Если JSON невалидный
    """
    file_path = Path(file_path)
    if not file_path.exists():
        logger.error(f"{Icon.ERROR} Файл не найден: {file_path}")
        raise FileNotFoundError(f"Файл не найден: {file_path}")

    try:
        logger.debug(f"{Icon.DIRECTORY} Загрузка JSON из {file_path}")
        with open(file_path, "r", encoding="utf-8") as f:
            data = json.load(f)
        logger.debug(f"{Icon.SUCCESS} JSON загружен из {file_path.name}")
        return data
    except json.JSONDecodeError as e:
        logger.error(f"{Icon.ERROR} Ошибка парсинга JSON в {file_path}: {e}")
        raise


def save_json(data: Any, file_path: Path, indent: int = 2) -> None:
    """
    Сохранить данные в JSON файл

    Данные предварительно проходят через to_jsonable(), поэтому допустимы
    комплексные числа, массивы numpy и модели с методом to_dict().

    Args:
        data: Данные для сохранения
        file_path: Путь к файлу
        indent: Отступ для форматирования (по умолчанию 2)
    """
    file_path = Path(file_path)
    logger.debug(f"{Icon.SAVE} Сохранение JSON в {file_path}")
    file_path.parent.mkdir(parents=True, exist_ok=True)

    with open(file_path, "w", encoding="utf-8") as f:
        f.write(dumps_json(data, indent=indent))
        f.write("\n")

    logger.info(f"{Icon.SUCCESS} Отчет сохранен: {file_path}")


def dumps_json(data: Any, indent: int = 2) -> str:
    """Сериализация в строку JSON (строгий JSON: без NaN/Infinity)"""
    return json.dumps(to_jsonable(data), indent=indent, ensure_ascii=False, allow_nan=False)


# ============================================================================
# ПРЕОБРАЗОВАНИЕ ЗНАЧЕНИЙ
# ============================================================================

def encode_complex(value: complex) -> Dict[str, float]:
    """Комплексное число -> {"re": ..., "im": ...}"""
    value = complex(value)
    return {"re": _finite_or_none(value.real), "im": _finite_or_none(value.imag)}


def _finite_or_none(value: float):
    value = float(value)
    return value if math.isfinite(value) else None


def to_jsonable(value: Any) -> Any:
    """
    Привести значение к типам, сериализуемым json

    Правила:
    - модели с to_dict() сериализуются через него
    - complex -> {"re", "im"}
    - np.ndarray -> вложенные списки
    - нефинитные float -> None
    - Enum -> value

    Args:
        value: Произвольное значение

    Returns:
        Значение из dict/list/str/int/float/bool/None
    """
    if callable(getattr(value, "to_dict", None)):
        return to_jsonable(value.to_dict())
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return _finite_or_none(value)
    if isinstance(value, (complex, np.complexfloating)):
        return encode_complex(value)
    if isinstance(value, Path):
        return str(value)
    return value


# ============================================================================
# ВАЛИДАЦИЯ JSON SCHEMA
# ============================================================================

def get_validation_errors(data: Any, schema: Dict[str, Any]) -> List[ValidationError]:
    """
    Получить список ошибок валидации (без выброса исключения)

    Args:
        data: Данные для валидации
        schema: JSON Schema для валидации

    Returns:
        Список ошибок валидации (пустой, если ошибок нет)
    """
    validator = Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(data), key=lambda e: [str(p) for p in e.absolute_path])

    if errors:
        logger.debug(f"{Icon.WARNING} Найдено {len(errors)} ошибок валидации")
        for error in errors:
            logger.debug(f"  - {error.message}")

    return errors
