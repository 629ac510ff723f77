"""
Тесты для automorphisms
"""
import numpy as np
import pytest

from src.core.automorphisms import (
    AutomorphismWord,
    ShearFactor,
    compose_words,
    identity_word,
    inverse,
    linear_word,
    normalize,
    overshear,
    reachable_word,
    shear,
    to_polymap,
    translation_word,
)
from src.core.catalog import builtin_fields, builtin_words, shear_word
from src.core.errors import InvalidInputError, UnsupportedOperationError
from src.core.loewner import reachable_eval
from src.core.polymap import PolyMap, evaluate, jacobian
from src.models.enums import FactorKind, GeneratorKind
from src.models.loewner_models import FieldPiece, HerglotzField
from src.models.operator_models import Operator


def _as_dicts(f: PolyMap):
    return [dict(terms) for terms in f.coords]


class TestShearFactor:
    """Тесты ShearFactor"""

    def test_shear_must_not_depend_on_own_axis(self):
        """Полином сдвига по z_1 не может содержать z_1"""
        with pytest.raises(InvalidInputError):
            shear(2, 0, {(1, 1): 0.5})

    def test_axis_out_of_range(self):
        """Ось вне 0..n-1 отклоняется"""
        with pytest.raises(InvalidInputError):
            shear(2, 2, {(1, 0): 0.5})

    def test_overshear_zero_scale(self):
        """Нулевой множитель overshear отклоняется"""
        with pytest.raises(InvalidInputError):
            overshear(2, 0, 0, {(0, 2): 1})

    def test_singular_linear_factor(self):
        """Вырожденная матрица не может быть множителем"""
        with pytest.raises(InvalidInputError):
            linear_word([[1, 1], [1, 1]])

    def test_linear_factor_requires_matrix(self):
        """Линейный множитель без матрицы отклоняется"""
        with pytest.raises(InvalidInputError):
            ShearFactor(FactorKind.LINEAR, 2)

    def test_to_dict_overshear(self):
        """Сериализация overshear содержит scale"""
        data = overshear(2, 0, 2, {(0, 2): 0.5}).factors[0].to_dict()
        assert data["kind"] == "overshear"
        assert data["scale"] == {"re": 2.0, "im": 0.0}


class TestWords:
    """Тесты слов и их отображений"""

    def test_identity_word(self):
        """Пустое слово задает id"""
        assert _as_dicts(identity_word(2).polymap) == _as_dicts(PolyMap.identity(2))

    def test_shear_polymap(self):
        """Слово сдвига дает (z_1 + 0.5 z_2², z_2)"""
        f = shear_word(0.5).polymap
        assert f.coords[0][(0, 2)] == 0.5
        assert f.normalized

    def test_application_order(self):
        """[F_1, F_2] задает F_2∘F_1"""
        first = shear(2, 0, {(0, 1): 1.0})
        second = shear(2, 1, {(1, 0): 1.0})
        word = compose_words(second, first)
        z = np.array([0.2, 0.3])
        step = evaluate(first.polymap, z)
        assert np.allclose(evaluate(word.polymap, z), evaluate(second.polymap, step))

    def test_compose_dimension_mismatch(self):
        """Слова разных размерностей не компонуются"""
        with pytest.raises(InvalidInputError):
            compose_words(identity_word(2), identity_word(3))

    def test_factor_dimension_mismatch(self):
        """Множитель другой размерности отклоняется"""
        with pytest.raises(InvalidInputError):
            AutomorphismWord(3, shear_word(0.5).factors)


class TestInverse:
    """Тесты inverse"""

    def test_shear_inverse_exact(self):
        """Сдвиг и обратный к нему дают id точно"""
        word = shear_word(0.5)
        composed = compose_words(inverse(word), word)
        assert _as_dicts(composed.polymap) == _as_dicts(PolyMap.identity(2))

    def test_overshear_inverse_exact(self):
        """z_1 -> 2z_1 + 0.5 z_2²: обратное дает id точно"""
        word = overshear(2, 0, 2, {(0, 2): 0.5})
        composed = compose_words(inverse(word), word)
        assert _as_dicts(composed.polymap) == _as_dicts(PolyMap.identity(2))

    def test_mixed_word_inverse(self):
        """Обратное к слову из сдвигов и линейного множителя"""
        word = compose_words(
            linear_word([[1, 0.5], [0, 2]]),
            compose_words(shear(2, 1, {(2, 0): 0.3}), shear_word(0.4)),
        )
        z = np.array([[0.1, 0.2j], [0.3 - 0.1j, -0.2]])
        image = evaluate(word.polymap, z)
        assert np.allclose(evaluate(inverse(word).polymap, image), z, atol=1e-12)


class TestNormalize:
    """Тесты normalize"""

    def test_removes_translation(self):
        """Постоянная добавка снимается"""
        word = compose_words(translation_word([0.3, 0]), shear_word(0.5))
        normalized = normalize(word)

        assert normalized.normalized
        assert to_polymap(normalized).normalized

    def test_removes_linear_part(self):
        """Линейная часть приводится к I"""
        word = compose_words(linear_word([[2, 0], [0, 1]]), shear_word(0.5))
        f = normalize(word).polymap

        assert f.normalized
        assert np.array_equal(f.linear_part, np.eye(2))

    def test_already_normalized(self):
        """Нормированное слово не получает лишних множителей"""
        word = shear_word(0.5)
        assert len(normalize(word)) == len(word)

    def test_preserves_map_up_to_affine(self):
        """Нормированное слово отличается от исходного аффинной заменой"""
        word = compose_words(linear_word([[2, 0], [0, 1]]), shear_word(0.5))
        z = np.array([0.1, 0.4])
        original = evaluate(word.polymap, z)
        assert np.allclose(evaluate(normalize(word).polymap, z), np.array([original[0] / 2, original[1]]))


class TestReachableWord:
    """Тесты reachable_word"""

    @pytest.mark.parametrize("name", ["linear-identity", "shear-identity", "shear-then-linear", "two-shears"])
    def test_matches_integrator(self, name):
        """Точный элемент совпадает с численным интегрированием"""
        field = builtin_fields()[name]
        word = reachable_word(field)
        z = np.array([0.2, 0.3 - 0.1j])
        assert np.allclose(evaluate(word.polymap, z), reachable_eval(field, z, tol=1e-11), atol=1e-7)

    def test_requires_words(self):
        """Спиралеобразный кусок без слова не поддерживается"""
        field = HerglotzField(
            Operator.identity(2),
            (FieldPiece(1.0, GeneratorKind.SPIRALLIKE, map=shear_word(0.3).polymap),),
        )
        with pytest.raises(UnsupportedOperationError):
            reachable_word(field)


def _shear_words():
    """Встроенные слова и несколько составных слов только из сдвигов"""
    words = dict(builtin_words())
    words["shear-cubic-then-quadratic"] = compose_words(
        shear(2, 1, {(3, 0): 0.4}), shear(2, 0, {(0, 2): -0.7 + 0.2j}),
    )
    words["shear-translation"] = compose_words(translation_word([0.1, -0.2j]), shear_word(0.5))
    words["shear-3d"] = compose_words(
        shear(3, 2, {(1, 1, 0): 0.3j}),
        compose_words(shear(3, 0, {(0, 2, 0): 0.5}), shear(3, 1, {(1, 0, 1): -0.25})),
    )
    return words


SHEAR_WORDS = _shear_words()


def _random_points(dim: int, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(-1.0, 1.0, (count, dim)) + 1j * rng.uniform(-1.0, 1.0, (count, dim))


class TestWordInvariants:
    """Инъективность и постоянство якобиана для слов автоморфизмов"""

    @pytest.mark.parametrize("name", sorted(SHEAR_WORDS))
    def test_injective_on_point_pairs(self, name):
        """Различные точки имеют различные образы, обратное слово их восстанавливает"""
        word = SHEAR_WORDS[name]
        z = _random_points(word.dim, 200, seed=1)
        w = _random_points(word.dim, 200, seed=2)
        f = to_polymap(word)

        image_z, image_w = evaluate(f, z), evaluate(f, w)
        assert np.all(np.linalg.norm(image_z - image_w, axis=1) > 0)
        back = to_polymap(inverse(word))
        assert np.allclose(evaluate(back, image_z), z, atol=1e-9)
        assert np.allclose(evaluate(back, image_w), w, atol=1e-9)

    @pytest.mark.parametrize("name", sorted(SHEAR_WORDS))
    def test_shear_jacobian_determinant_is_one(self, name):
        """Для слов из сдвигов det Df(z) = 1 во всех точках"""
        word = SHEAR_WORDS[name]
        determinants = np.linalg.det(jacobian(to_polymap(word), _random_points(word.dim, 100, seed=3)))
        assert np.allclose(determinants, 1.0, atol=1e-10)

    def test_mixed_word_jacobian_determinant_constant(self):
        """Слово со сдвигом, overshear и линейным множителем: det Df постоянен"""
        word = compose_words(
            linear_word([[1, 0.5], [0, 2]]),
            compose_words(overshear(2, 1, 3, {(2, 0): 0.3}), shear_word(0.4)),
        )
        determinants = np.linalg.det(jacobian(to_polymap(word), _random_points(2, 100, seed=4)))
        assert np.allclose(determinants, determinants[0], atol=1e-10)
        assert determinants[0] == pytest.approx(6.0)
