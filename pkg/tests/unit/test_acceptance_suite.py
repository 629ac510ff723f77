"""
Тесты для AcceptanceSuite

Полный набор тяжелый, поэтому здесь выполняются только быстрые проверки
с уменьшенными параметрами.
"""
import pytest

from src.analyzers.acceptance_suite import (
    CHECKS,
    GROWTH_TIMES,
    AcceptanceSuite,
    SuiteSettings,
    check_diagonal_resonance,
    check_epsilon_series,
    check_growth_exp,
    check_triangular_operator,
    starlike_shear_margin,
)
from src.core.errors import InvalidInputError


@pytest.fixture
def settings():
    return SuiteSettings(seed=7, flow_tol=1e-10, per_sphere=64, jobs=1, matrices=6, growth_operators=2)


class TestChecks:
    """Отдельные проверки"""

    def test_triangular_operator(self, settings):
        """k_+ = 2m, спектр нерезонансен"""
        passed, details = check_triangular_operator(settings)
        assert passed
        assert details["resonance"] == "nonresonant"
        assert details["kplus_minus_2m"] <= 1e-9

    def test_diagonal_resonance(self, settings):
        """diag(1, q): резонанс ровно при целом q"""
        passed, details = check_diagonal_resonance(settings)
        assert passed
        assert details["verdicts"]["2"]["kind"] == "resonant"
        assert details["verdicts"]["2.5"]["kind"] == "nonresonant"

    def test_epsilon_series(self, settings):
        """Замкнутые формы рядов и допуск возмущенных кандидатов"""
        passed, details = check_epsilon_series(settings)
        assert passed
        assert details["admitted"] > 0

    def test_growth_exp_time_grid(self, settings):
        """Сетка времени доходит до t = 5, допуск относителен к каждой границе"""
        passed, details = check_growth_exp(settings)
        assert passed
        assert details["times"] == list(GROWTH_TIMES)
        assert min(GROWTH_TIMES) == pytest.approx(0.1)
        assert max(GROWTH_TIMES) == pytest.approx(5.0)
        assert details["worst_relative_violation"] <= 1e-9

    def test_starlike_shear_margin_sign(self):
        """Запас сдвига a = 3 меняет знак при r = 3√3/6"""
        assert starlike_shear_margin(3, 0.8) > 0
        assert starlike_shear_margin(3, 0.9) < 0


class TestAcceptanceSuite:
    """Тесты AcceptanceSuite"""

    def test_names(self):
        """Имена в порядке объявления"""
        names = AcceptanceSuite.names()
        assert names[0] == "triangular-operator"
        assert len(names) == len(CHECKS) == 13

    def test_unknown_check(self):
        """Неизвестное имя проверки отклоняется"""
        with pytest.raises(InvalidInputError):
            AcceptanceSuite(seed=7, jobs=1).run(["no-such-check"])

    def test_subset_in_requested_order(self):
        """Результаты собираются в порядке запроса"""
        suite = AcceptanceSuite(seed=7, jobs=2, matrices=4)
        result = suite.run(["diagonal-resonance", "triangular-operator", "inequality-chain"])

        assert [check.name for check in result.checks] == [
            "diagonal-resonance", "triangular-operator", "inequality-chain",
        ]
        assert result.passed
        assert set(result.timings()) == {"diagonal-resonance", "triangular-operator", "inequality-chain"}

    def test_growth_exp_small(self):
        """e^{mt} <= ||e^{tA}u|| <= e^{kt} на нескольких операторах"""
        result = AcceptanceSuite(seed=3, jobs=1, growth_operators=3).run(["growth-exp"])
        assert result.passed

    def test_to_dict_has_no_durations(self):
        """Время проверок не попадает в результат"""
        data = AcceptanceSuite(seed=7, jobs=1).run(["triangular-operator"]).to_dict()
        assert data["passed"]
        assert "duration" not in data["checks"][0]

    def test_settings_from_config(self):
        """Параметры по умолчанию берутся из конфигурации"""
        suite = AcceptanceSuite(jobs=1)
        assert suite.settings.jobs == 1
        assert suite.settings.to_dict()["matrices"] == 1000

    def test_check_exception_is_recorded(self, mocker):
        """Исключение в проверке дает провал с текстом ошибки"""

        def broken(settings):
            raise ValueError("вырожденный случай")

        mocker.patch("src.analyzers.acceptance_suite.CHECKS", (("broken", broken),))
        result = AcceptanceSuite(seed=7, jobs=1).run()

        assert not result.passed
        assert result.failed_names == ["broken"]
        assert "ValueError: вырожденный случай" in result.checks[0].error
