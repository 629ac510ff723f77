"""
Загрузчики входных данных из JSON
"""
from .json_loader import JsonInputLoader, parse_radii, parse_vector

__all__ = ["JsonInputLoader", "parse_radii", "parse_vector"]
