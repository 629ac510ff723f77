"""
Утилиты приложения
"""
# Логирование
from .logger import log, log_function_call, LogBlock, get_logger

# JSON утилиты
from .json_utils import load_json, save_json, dumps_json, to_jsonable, get_validation_errors

# ASCII-иконки
from .icons import Icon

__all__ = [
    # Логирование
    "log",
    "log_function_call",
    "LogBlock",
    "get_logger",
    # JSON
    "load_json",
    "save_json",
    "dumps_json",
    "to_jsonable",
    "get_validation_errors",
    # ASCII-иконки
    "Icon",
]
