"""
Тесты для approximation

Покрытие:
- Бюджеты ε(r) и ряды Σ k x^k, Σ k² x^k
- Кандидаты: нормировка, возмущения, срезки
- Селекторы и неубывание выбранных индексов
- Полный прогон и подъем композицией
"""
import math

import numpy as np
import pytest

from src.core.approximation import (
    candidate_map,
    criterion_report,
    ktilde_epsilon,
    ktilde_series,
    lift_run,
    perturbed_candidates,
    qtilde_epsilon,
    qtilde_series,
    run_approximation,
    select_convex,
    select_ktilde,
    select_q,
    select_qtilde,
    select_starlike,
    truncated_candidates,
)
from src.core.automorphisms import compose_words, identity_word, linear_word, shear
from src.core.catalog import quadratic_map, shear_map, shear_word
from src.core.errors import InvalidInputError, PreconditionViolatedError, UnsupportedOperationError
from src.core.polymap import PolyMap
from src.core.sampling import make_sample
from src.models.approximation_models import NO_ADMISSIBLE_INDEX, CriterionSpec, DilationSchedule
from src.models.enums import CriterionKind


@pytest.fixture
def quadratics():
    """z + c(z_1², 0) для c = 0.1, 0.2, 0.3, 0.4"""
    return [quadratic_map(c) for c in (0.1, 0.2, 0.3, 0.4)]


@pytest.fixture
def outer_sample():
    """Выборка у границы шара, где сдвиг с a = 3 не звезден"""
    return make_sample(2, (0.9, 0.99), per_sphere=1024, tangent_count=0, seed=7)


# =============================================================================
# БЮДЖЕТЫ
# =============================================================================

class TestEpsilonBudgets:
    """Тесты рядов и ε(r)"""

    @pytest.mark.parametrize("x", [0.1, 0.5, 0.9])
    def test_series_closed_forms(self, x):
        """Замкнутые формы совпадают с частичными суммами"""
        ks = np.arange(2, 2000)
        assert qtilde_series(x) == pytest.approx(float(np.sum(ks * x ** ks)), rel=1e-10)
        assert ktilde_series(x) == pytest.approx(float(np.sum(ks ** 2 * x ** ks)), rel=1e-10)

    def test_qtilde_epsilon_third(self):
        """ε(1/3) = 2/27"""
        assert qtilde_epsilon(1 / 3) == pytest.approx(2 / 27)

    def test_ktilde_epsilon_third(self):
        """ε(1/3) = (2/9)/11 для ряда Σ k² x^k"""
        assert ktilde_epsilon(1 / 3) == pytest.approx(2 / 99)

    def test_ktilde_budget_smaller(self):
        """Бюджет K̃ не больше бюджета Q̃"""
        for r in (0.1, 0.5, 0.9):
            assert ktilde_epsilon(r) <= qtilde_epsilon(r)

    @pytest.mark.parametrize("r", [0.0, 1.0, -0.2])
    def test_radius_range(self, r):
        """r вне (0, 1) отклоняется"""
        with pytest.raises(InvalidInputError):
            qtilde_epsilon(r)


# =============================================================================
# РАСПИСАНИЕ И КАНДИДАТЫ
# =============================================================================

class TestDilationSchedule:
    """Тесты DilationSchedule"""

    def test_default(self):
        """r_m = 1 - 2^{-m}"""
        assert DilationSchedule.default(3).radii == (0.5, 0.75, 0.875)

    @pytest.mark.parametrize("radii", [(), (0.5, 0.5), (0.7, 0.3), (0.5, 1.0)])
    def test_invalid(self, radii):
        """Пустое, невозрастающее или выходящее за (0, 1) расписание отклоняется"""
        with pytest.raises(InvalidInputError):
            DilationSchedule(radii)


class TestCriterionSpec:
    """Тесты CriterionSpec"""

    def test_spirallike_requires_operator(self):
        """spirallike без A отклоняется"""
        with pytest.raises(InvalidInputError):
            CriterionSpec(CriterionKind.SPIRALLIKE)

    def test_g_starlike_default_region(self):
        """g-starlike по умолчанию использует полуплоскость"""
        spec = CriterionSpec(CriterionKind.G_STARLIKE)
        assert spec.region is not None
        assert spec.to_dict()["region"]["kind"] == "half-plane"

    def test_criterion_report_rejects_field_criteria(self, shear05, small_sample):
        """caratheodory не применяется к отображениям"""
        with pytest.raises(UnsupportedOperationError):
            criterion_report(shear05, CriterionSpec(CriterionKind.CARATHEODORY), small_sample)


class TestCandidates:
    """Тесты candidate_map, perturbed_candidates, truncated_candidates"""

    def test_word_is_normalized(self):
        """Слово с линейной частью приводится к Df(0) = I"""
        word = compose_words(linear_word([[2, 0], [0, 1]]), shear_word(0.5))
        assert candidate_map(word).normalized

    def test_polymap_must_be_normalized(self):
        """Ненормированное PolyMap отклоняется"""
        with pytest.raises(PreconditionViolatedError):
            candidate_map(PolyMap.from_linear(2 * np.eye(2)))

    def test_zero_perturbation(self):
        """ε = 0 оставляет коэффициенты без изменений"""
        words = perturbed_candidates(shear_word(0.3), [0.0, 1e-2], seed=5)
        assert len(words) == 2
        assert dict(words[0].factors[0].poly) == {(0, 2): 0.3}

    def test_perturbation_size(self):
        """Каждый коэффициент сдвигается ровно на ε"""
        words = perturbed_candidates(shear_word(0.3), [1e-2], seed=5)
        assert abs(words[0].factors[0].poly[(0, 2)] - 0.3) == pytest.approx(1e-2)

    def test_perturbation_deterministic(self):
        """Возмущения детерминированы по сиду"""
        first = perturbed_candidates(shear_word(0.3), [1e-2], seed=5)[0].factors[0].poly[(0, 2)]
        second = perturbed_candidates(shear_word(0.3), [1e-2], seed=5)[0].factors[0].poly[(0, 2)]
        assert first == second

    def test_linear_factor_untouched(self):
        """Линейные множители не возмущаются"""
        word = compose_words(linear_word([[2, 0], [0, 1]]), shear_word(0.3))
        perturbed = perturbed_candidates(word, [0.5])[0]
        assert np.array_equal(perturbed.factors[1].matrix, word.factors[1].matrix)

    def test_truncations(self):
        """Срезки степеней 2..deg f, последняя совпадает с f"""
        f = PolyMap(2, ({(1, 0): 1, (2, 0): 0.1, (0, 3): 0.05}, {(0, 1): 1}))
        truncated = truncated_candidates(f)

        assert [g.max_degree for g in truncated] == [2, 3]
        assert dict(truncated[-1].coords[0]) == dict(f.coords[0])

    def test_identity_truncation(self, identity_map):
        """Для id есть одна срезка"""
        assert len(truncated_candidates(identity_map)) == 1


# =============================================================================
# СЕЛЕКТОРЫ
# =============================================================================

class TestSelectors:
    """Тесты селекторов"""

    def test_starlike_picks_first(self, shear05, small_sample):
        """id звездно при любом r, поэтому выбирается k = 0"""
        candidates = [PolyMap.identity(2), shear_map(0.2), shear05]
        selection = select_starlike(shear05, candidates, 0.5, small_sample)
        assert selection.index == 0
        assert selection.margin > 0

    def test_starlike_respects_start(self, shear05, small_sample):
        """Выбор не меньше start"""
        candidates = [PolyMap.identity(2), shear_map(0.2), shear05]
        selection = select_starlike(shear05, candidates, 0.5, small_sample, start=1)
        assert selection.index == 1

    def test_starlike_target_must_pass(self, outer_sample):
        """Цель, не прошедшая критерий, отклоняется"""
        with pytest.raises(PreconditionViolatedError):
            select_starlike(shear_map(3), [PolyMap.identity(2)], 0.5, outer_sample)

    def test_qtilde_budget(self, quadratic04, quadratics):
        """r = 1/3: ε = 2/27, допускается |0.4 - c|·(2/3)² <= 2/27 только с c = 0.3, 0.4"""
        selection = select_qtilde(quadratic04, quadratics, 1 / 3)

        assert selection.index == 2
        assert selection.threshold == pytest.approx(2 / 27)
        assert selection.discrepancy == pytest.approx(0.1 * 4 / 9)
        assert selection.report.passed

    def test_qtilde_no_admissible(self, quadratic04):
        """Кандидат вне бюджета не выбирается"""
        selection = select_qtilde(quadratic04, [quadratic_map(0.1)], 0.5)
        assert not selection.selected
        assert selection.reason == NO_ADMISSIBLE_INDEX

    def test_qtilde_target_must_pass(self, quadratics):
        """Σ k||A_k|| = 1.2 > 1"""
        with pytest.raises(PreconditionViolatedError):
            select_qtilde(quadratic_map(0.6), quadratics, 0.5)

    def test_ktilde_budget(self):
        """Для K̃ бюджет уже: выбирается сама цель"""
        target = quadratic_map(0.2)
        candidates = [PolyMap.identity(2), quadratic_map(0.1), target]
        selection = select_ktilde(target, candidates, 1 / 3)

        assert selection.index == 2
        assert selection.threshold == pytest.approx(2 / 99)

    def test_q_selector(self, quadratic04, small_sample):
        """id отклоняется от Df = I на 0 <= (1 + r)/2"""
        selection = select_q(quadratic04, [PolyMap.identity(2), quadratic04], 0.5, small_sample)
        assert selection.index == 0
        assert selection.discrepancy == pytest.approx(0.0)
        assert selection.threshold == pytest.approx(0.75)

    def test_convex_selector(self, shear04, small_sample):
        """Допустимый индекс находится, растяжение выпукло"""
        candidates = [PolyMap.identity(2), shear_map(0.2), shear04]
        selection = select_convex(shear04, candidates, 0.5, small_sample)

        assert selection.selected
        assert selection.report.passed
        assert selection.discrepancy < selection.threshold
        assert selection.threshold >= 1 - 2 * 0.4 * 0.5


# =============================================================================
# ПРОГОН
# =============================================================================

class TestRunApproximation:
    """Тесты run_approximation и lift_run"""

    def test_starlike_run(self, shear05, small_sample):
        """Все шаги выбраны, расстояния от φ_m = id до f точные"""
        run = run_approximation(
            shear05, [PolyMap.identity(2), shear05], CriterionSpec(CriterionKind.STARLIKE),
            schedule=DilationSchedule.default(3), test_radii=(0.25, 0.5), sample=small_sample,
        )

        assert run.all_selected
        assert run.selected_indices == [0, 0, 0]
        assert run.distances[0][0].value == pytest.approx(0.5 * 0.25 ** 2)
        assert run.distances[0][1].exact

    def test_indices_non_decreasing(self, quadratic04, quadratics, small_sample):
        """Бюджет сужается с ростом r, индексы не убывают"""
        run = run_approximation(
            quadratic04, quadratics, CriterionSpec(CriterionKind.QTILDE),
            schedule=DilationSchedule((1 / 3, 0.5)), test_radii=(0.5,), sample=small_sample,
        )

        assert run.selected_indices == [2, 3]
        # φ_2(z) = z + 0.2(z_1², 0): расстояние до f на ρ = 1/2 равно 0.2·(1/2)²
        assert run.distances[1][0].value == pytest.approx(0.05)

    def test_missing_step_recorded(self, quadratic04, small_sample):
        """Шаг без допустимого индекса записывается, прогон продолжается"""
        run = run_approximation(
            quadratic04, [quadratic_map(0.1)], CriterionSpec(CriterionKind.QTILDE),
            schedule=DilationSchedule((0.5, 0.75)), sample=small_sample,
        )

        assert not run.all_selected
        assert run.approximants == [None, None]
        assert all(s.reason == NO_ADMISSIBLE_INDEX for s in run.selections)

    def test_target_must_pass(self, small_sample):
        """Цель вне класса отклоняется"""
        with pytest.raises(PreconditionViolatedError):
            run_approximation(quadratic_map(0.6), [PolyMap.identity(2)], CriterionSpec(CriterionKind.QTILDE),
                              sample=small_sample)

    def test_to_dict(self, shear05, small_sample):
        """Сериализация прогона"""
        run = run_approximation(
            shear05, [PolyMap.identity(2)], CriterionSpec(CriterionKind.STARLIKE),
            schedule=DilationSchedule((0.5,)), test_radii=(0.5,), sample=small_sample,
        )
        data = run.to_dict()
        assert data["candidate_count"] == 1
        assert data["selections"][0]["index"] == 0
        assert data["schedule"]["radii"] == [0.5]

    def test_lift_by_identity(self, shear05, small_sample):
        """Подъем тождественным словом не меняет расстояний"""
        run = run_approximation(
            shear05, [PolyMap.identity(2)], CriterionSpec(CriterionKind.STARLIKE),
            schedule=DilationSchedule((0.5,)), test_radii=(0.5,), sample=small_sample,
        )
        lifted = lift_run(run, identity_word(2))

        assert lifted.distances[0][0].value == pytest.approx(run.distances[0][0].value)
        assert "lifted_by" in lifted.extras

    def test_lift_by_shear(self, shear05, small_sample):
        """Подъем сдвигом: цель Φ∘f, приближения Φ∘φ_m"""
        run = run_approximation(
            shear05, [PolyMap.identity(2)], CriterionSpec(CriterionKind.STARLIKE),
            schedule=DilationSchedule((0.5,)), test_radii=(0.5,), sample=small_sample,
        )
        lifted = lift_run(run, shear(2, 1, {(2, 0): 0.2}))

        z = np.array([0.1, 0.2])
        assert lifted.target.max_degree >= 2
        assert np.allclose(lifted.approximants[0](z), shear(2, 1, {(2, 0): 0.2}).polymap(z))
        assert math.isfinite(lifted.distances[0][0].value)

    def test_lift_dimension_mismatch(self, shear05, small_sample):
        """Размерность Φ должна совпадать с целью"""
        run = run_approximation(
            shear05, [PolyMap.identity(2)], CriterionSpec(CriterionKind.STARLIKE),
            schedule=DilationSchedule((0.5,)), sample=small_sample,
        )
        with pytest.raises(InvalidInputError):
            lift_run(run, identity_word(3))


