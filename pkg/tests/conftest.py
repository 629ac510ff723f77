"""
Конфигурация pytest и общие фикстуры для всех тестов
"""
import sys
from pathlib import Path

import numpy as np
import pytest

# Добавляем корень проекта в PYTHONPATH
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.core.catalog import quadratic_map, shear_map, triangular_operator
from src.core.polymap import PolyMap
from src.core.sampling import make_sample
from src.models.operator_models import Operator


# ============================================================================
# ФИКСТУРЫ: Операторы
# ============================================================================

@pytest.fixture
def identity2():
    """Тождественный оператор в C^2"""
    return Operator.identity(2)


@pytest.fixture
def triangular():
    """Треугольный оператор с k_+ = 2m"""
    return triangular_operator()


@pytest.fixture
def diag_2_1():
    """diag(2, 1)"""
    return Operator.from_rows([[2, 0], [0, 1]])


# ============================================================================
# ФИКСТУРЫ: Отображения
# ============================================================================

@pytest.fixture
def identity_map():
    """Тождественное отображение C^2"""
    return PolyMap.identity(2)


@pytest.fixture
def shear05():
    """(z_1 + 0.5 z_2², z_2)"""
    return shear_map(0.5)


@pytest.fixture
def shear04():
    """(z_1 + 0.4 z_2², z_2)"""
    return shear_map(0.4)


@pytest.fixture
def quadratic04():
    """z + 0.4 (z_1², 0)"""
    return quadratic_map(0.4)


# ============================================================================
# ФИКСТУРЫ: Выборки
# ============================================================================

@pytest.fixture
def small_sample():
    """Небольшая выборка в B^2 с касательными парами"""
    return make_sample(2, radii=(0.3, 0.6, 0.9), per_sphere=64, tangent_count=64, seed=7)


@pytest.fixture
def points_sample():
    """Выборка без касательных пар"""
    return make_sample(2, radii=(0.25, 0.5, 0.75), per_sphere=32, tangent_count=0, seed=3)


@pytest.fixture
def rng():
    """Генератор случайных чисел с фиксированным сидом"""
    return np.random.default_rng(2024)


# ============================================================================
# ФИКСТУРЫ: Тестовые файлы
# ============================================================================

@pytest.fixture
def fixtures_dir():
    """Фикстура для директории с тестовыми данными"""
    return Path(__file__).parent / "fixtures"


@pytest.fixture
def inputs_dir(fixtures_dir):
    """Входные JSON/YAML файлы для загрузчика и CLI"""
    return fixtures_dir / "inputs"
