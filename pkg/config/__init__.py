"""
Модуль конфигурации приложения
"""
from .settings import config

__all__ = ["config"]
