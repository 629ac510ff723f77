"""
Командная строка ballchain (click + rich)
"""
from .main import cli, main

__all__ = ["cli", "main"]
