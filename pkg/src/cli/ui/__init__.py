"""
Консольный вывод CLI (rich)
"""
from .tables import build_table

__all__ = ["build_table"]
