"""
Тесты для catalog
"""
import math

import numpy as np
import pytest

from src.core.approximation import criterion_report
from src.core.catalog import (
    REFERENCE_EXAMPLES,
    builtin_fields,
    builtin_maps,
    builtin_operators,
    builtin_words,
    closed_form_shear_flow,
    criterion_examples,
    diagonal_operator,
    lookup,
    shear_map,
    triangular_operator,
)
from src.core.errors import InvalidInputError
from src.core.polymap import evaluate


class TestBuiltins:
    """Тесты встроенных объектов"""

    def test_operator_names(self):
        """Реестр операторов содержит диагональные примеры"""
        names = set(builtin_operators())
        assert {"identity", "triangular", "diag-2-1", "diag-1-2", "diag-1-3", "diag-1-2.5"} <= names

    def test_rational_diagonals_exact(self):
        """Рациональные диагональные операторы заданы точно"""
        operators = builtin_operators()
        assert operators["diag-1-2.5"].is_exact
        assert not operators["diag-1-2.71828"].is_exact

    def test_maps_normalized(self):
        """Все встроенные отображения нормированы"""
        assert all(f.normalized for f in builtin_maps().values())

    def test_words_dimension(self):
        """Все встроенные слова действуют в C^2"""
        assert all(word.dim == 2 for word in builtin_words().values())

    def test_fields(self):
        """Встроенные поля имеют T = 1"""
        fields = builtin_fields()
        assert len(fields) == 6
        assert all(field.total_time == pytest.approx(1.0) for field in fields.values())

    def test_triangular_entries(self):
        """Диагональ треугольного оператора: (1 + √5)/2 и √5/2"""
        entries = triangular_operator().entries
        assert entries[0, 0].real == pytest.approx((1 + math.sqrt(5)) / 2)
        assert entries[1, 1].real == pytest.approx(math.sqrt(5) / 2)
        assert entries[1, 0] == 0

    def test_diagonal_operator_modes(self):
        """int / строка дают точный оператор, float: нет"""
        assert diagonal_operator(3).is_exact
        assert diagonal_operator("7/2").is_exact
        assert not diagonal_operator(2.5).is_exact

    def test_reference_examples_name(self):
        """Имя набора эталонных примеров"""
        assert REFERENCE_EXAMPLES == "reference-examples"


class TestLookup:
    """Тесты lookup"""

    def test_known(self):
        """Поиск по типу и имени"""
        f = lookup("map", "shear-0.5")
        assert f.coords[0][(0, 2)] == 0.5

    def test_unknown_name(self):
        """Неизвестное имя перечисляет доступные"""
        with pytest.raises(InvalidInputError, match="shear-0.5"):
            lookup("map", "nope")

    def test_unknown_kind(self):
        """Неизвестный тип отклоняется"""
        with pytest.raises(InvalidInputError):
            lookup("matrix", "identity")


class TestClosedFormShearFlow:
    """Тесты closed_form_shear_flow"""

    def test_zero_time(self):
        """v(z, 0, 0) = z"""
        z = np.array([0.2, 0.3j])
        assert np.allclose(closed_form_shear_flow(0.3, z, 0.0), z)

    def test_subordination(self):
        """f(v(z, 0, t)) = e^{-t} f(z)"""
        z = np.array([0.2, 0.3j])
        f = shear_map(0.3)
        value = closed_form_shear_flow(0.3, z, 0.7)
        assert np.allclose(evaluate(f, value), math.exp(-0.7) * evaluate(f, z))

    def test_batch(self):
        """Пакет точек N×2"""
        z = np.array([[0.2, 0.3j], [0.1, -0.4]])
        assert closed_form_shear_flow(0.3, z, 0.5).shape == (2, 2)


class TestCriterionExamples:
    """Каждый пример проходит свой критерий"""

    @pytest.mark.parametrize("example", criterion_examples(), ids=lambda example: example.name)
    def test_example_passes(self, example, small_sample):
        report = criterion_report(example.map, example.criterion, small_sample)
        assert report.passed
