"""
Тесты для criteria

Покрытие:
- N_A и оценки роста
- Спиралеобразность / звездность / g-звездность
- Выпуклость и δ(r)
- Классы Q, Q̃, K̃
- Поиск кандидатов Q̃ \\ S*
"""
import math

import numpy as np
import pytest

from src.core.catalog import quadratic_map, shear_map
from src.core.criteria import (
    caratheodory_test,
    compute_delta,
    convexity_test,
    estimate_delta,
    g_quotient,
    g_starlike_test,
    ktilde_test,
    q_class_test,
    qtilde_test,
    search_qtilde_starlike_counterexample,
    spirallike_test,
    starlike_test,
    verify_growth_bounds,
)
from src.core.errors import PreconditionViolatedError
from src.core.polymap import PolyMap
from src.core.sampling import BallSample, make_sample
from src.models.enums import CriterionKind, RegionKind, Verdict
from src.models.operator_models import Operator
from src.models.report_models import GRegion


@pytest.fixture
def outer_sample():
    """Выборка у границы шара, где сдвиг с |a| = 3 перестает быть звездным"""
    return make_sample(2, (0.9, 0.99), per_sphere=256, tangent_count=0, seed=7)


def _singular_sample() -> BallSample:
    points = np.array([[-0.5, 0.0], [0.3, 0.0]], dtype=complex)
    return BallSample(
        dim=2,
        radii=(0.5, 0.3),
        points=points,
        point_radii=np.array([0.5, 0.3]),
        tangent_points=np.zeros((0, 2), dtype=complex),
        tangent_vectors=np.zeros((0, 2), dtype=complex),
        seed=0,
        per_sphere=1,
    )


# =============================================================================
# N_A И ОЦЕНКИ РОСТА
# =============================================================================

class TestCaratheodory:
    """Тесты caratheodory_test"""

    def test_linear_field(self, triangular, points_sample):
        """h(z) = Az с m(A) > 0 лежит в N_A"""
        h = PolyMap.from_linear(triangular.entries)
        report = caratheodory_test(h, triangular, points_sample, refine=False)
        assert report.passed
        assert report.details["normalized_margin"] > 0

    def test_wrong_linear_part(self, triangular, points_sample):
        """Dh(0) != A дает провал без запаса"""
        report = caratheodory_test(PolyMap.identity(2), triangular, points_sample)
        assert report.failed
        assert report.min_margin == -math.inf
        assert report.reason is not None

    def test_negative_real_part(self, outer_sample):
        """h(z) = (z_1 - 2z_1², z_2): Re<h, z> < 0 у точки (0.99, 0)"""
        h = PolyMap(2, ({(1, 0): 1, (2, 0): -2}, {(0, 1): 1}))
        report = caratheodory_test(h, Operator.identity(2), outer_sample, refine=True)

        assert report.failed
        assert report.min_margin < 0
        assert report.witness is not None

    def test_dimension_mismatch(self, points_sample):
        """Размерности h, A и выборки должны совпадать"""
        with pytest.raises(PreconditionViolatedError):
            caratheodory_test(PolyMap.identity(3), Operator.identity(3), points_sample)


class TestGrowthBounds:
    """Тесты verify_growth_bounds"""

    def test_linear_field_within_bounds(self, triangular, points_sample):
        """h(z) = Az удовлетворяет всем трем оценкам"""
        h = PolyMap.from_linear(triangular.entries)
        report = verify_growth_bounds(h, triangular, points_sample)

        assert report.criterion == CriterionKind.GROWTH
        assert report.passed
        assert report.details["lower_slack"] >= 0
        assert report.details["upper_slack"] >= 0
        assert report.details["norm_slack"] > 0

    def test_not_in_class(self, triangular, points_sample):
        """h не из N_A дает провал с причиной"""
        report = verify_growth_bounds(PolyMap.identity(2), triangular, points_sample)
        assert report.failed
        assert "N_A" in report.reason


# =============================================================================
# СПИРАЛЕОБРАЗНОСТЬ
# =============================================================================

class TestStarlike:
    """Тесты starlike_test и spirallike_test"""

    def test_identity(self, identity_map, small_sample):
        """id звездно, нормированный запас равен 1"""
        report = starlike_test(identity_map, small_sample, refine=False)
        assert report.passed
        assert report.details["normalized_margin"] == pytest.approx(1.0)

    def test_small_shear(self, shear05, small_sample):
        """Сдвиг с a = 0.5 звезден на всем шаре"""
        assert starlike_test(shear05, small_sample).passed

    def test_large_shear_fails(self, outer_sample):
        """Сдвиг с a = 3 не звезден при r > 3√3/6"""
        report = starlike_test(shear_map(3), outer_sample, refine=True)

        assert report.failed
        assert report.witness is not None
        assert np.linalg.norm(report.witness) > 3 * math.sqrt(3) / 6
        assert report.details["refinement_gap"] >= 0

    def test_large_shear_passes_near_origin(self, points_sample):
        """Сдвиг с a = 3 звезден на сферах радиусов < 3√3/6"""
        assert starlike_test(shear_map(3), points_sample).passed

    def test_spirallike_diag(self, small_sample):
        """Сдвиг с a = 0.3 спиралеобразен относительно diag(2, 1)"""
        A = Operator.from_rows([[2, 0], [0, 1]])
        report = spirallike_test(shear_map(0.3), A, small_sample)
        assert report.criterion == CriterionKind.SPIRALLIKE
        assert report.passed

    def test_spirallike_requires_positive_m(self, shear05, small_sample):
        """m(A) <= 0 нарушает предусловие"""
        with pytest.raises(PreconditionViolatedError):
            spirallike_test(shear05, Operator.from_rows([[1, 0], [0, -1]]), small_sample)

    def test_not_normalized(self, small_sample):
        """Ненормированное отображение проваливает проверку без запаса"""
        report = starlike_test(PolyMap.from_linear(2 * np.eye(2)), small_sample)
        assert report.failed
        assert report.reason is not None

    def test_singular_jacobian(self):
        """Вырожденная Df в точке выборки дает провал со свидетелем"""
        f = PolyMap(2, ({(1, 0): 1, (2, 0): 1}, {(0, 1): 1}))
        report = starlike_test(f, _singular_sample(), refine=False)

        assert report.failed
        assert report.min_margin == -math.inf
        assert np.allclose(report.witness, [-0.5, 0])


class TestGStarlike:
    """Тесты g_starlike_test"""

    def test_identity_quotient(self, identity_map, points_sample):
        """Для id q(z) = 1"""
        assert np.allclose(g_quotient(identity_map, points_sample.points), 1.0)

    @pytest.mark.parametrize("region", [
        GRegion(),
        GRegion(RegionKind.DISK, 0.5),
        GRegion(RegionKind.SECTOR, 0.5),
    ])
    def test_small_shear_all_regions(self, shear05, small_sample, region):
        """Сдвиг с a = 0.5 g-звезден для всех трех областей"""
        report = g_starlike_test(shear05, region, small_sample)
        assert report.passed
        assert report.details["region"]["kind"] == region.kind.value

    def test_sector_margin_identity(self, identity_map, points_sample):
        """Для id запас сектора равен απ/2"""
        report = g_starlike_test(identity_map, GRegion(RegionKind.SECTOR, 0.5), points_sample, refine=False)
        assert report.min_margin == pytest.approx(math.pi / 4)

    def test_region_alpha_validation(self):
        """alpha диска должен лежать в (0, 1)"""
        with pytest.raises(ValueError):
            GRegion(RegionKind.DISK, 1.0)


# =============================================================================
# ВЫПУКЛОСТЬ
# =============================================================================

class TestConvexity:
    """Тесты convexity_test и δ(r)"""

    def test_identity_convex(self, identity_map, small_sample):
        """id выпукло с запасом 1"""
        report = convexity_test(identity_map, small_sample, refine=False)
        assert report.passed
        assert report.min_margin == pytest.approx(1.0)

    def test_small_shear_convex(self, shear04, small_sample):
        """Сдвиг с a = 0.4 выпукл"""
        assert convexity_test(shear04, small_sample).passed

    def test_large_shear_not_convex(self, small_sample):
        """Сдвиг с a = 2 не выпукл: есть касательная пара с отрицательным запасом"""
        report = convexity_test(shear_map(2), small_sample)

        assert report.failed
        assert report.witness_vector is not None
        assert np.linalg.norm(report.witness_vector) == pytest.approx(1.0)

    def test_requires_tangent_pairs(self, identity_map, points_sample):
        """Без касательных пар проверка невозможна"""
        with pytest.raises(PreconditionViolatedError):
            convexity_test(identity_map, points_sample)

    def test_delta_identity(self, identity_map):
        """δ(r) = 0 для id"""
        assert compute_delta(identity_map, 0.5, budget=256, seed=1) == 0.0

    def test_delta_shear_bounds(self, shear05):
        """0 <= δ(r) <= 2|a|r для сдвига"""
        estimate = estimate_delta(shear05, 0.5, budget=512, seed=1)
        assert 0 <= estimate.sampled <= estimate.value <= 2 * 0.5 * 0.5 + 1e-9

    def test_delta_radius(self, shear05):
        """r вне (0, 1) нарушает предусловие"""
        with pytest.raises(PreconditionViolatedError):
            compute_delta(shear05, 1.0)


# =============================================================================
# КЛАССЫ Q, Q̃, K̃
# =============================================================================

class TestCoefficientClasses:
    """Тесты q_class_test, qtilde_test, ktilde_test"""

    def test_q_class_quadratic(self, quadratic04, small_sample):
        """||Df - I|| = 0.8|z_1| < 1 на шаре"""
        report = q_class_test(quadratic04, small_sample)

        assert report.passed
        assert report.details["sup_deviation"] <= 0.8 * 0.9 + 1e-9
        assert report.details["quasiregular"]

    def test_q_class_fails_for_large_coefficient(self, small_sample):
        """z + 2(z_1², 0): ||Df - I|| = 4|z_1| > 1 при |z_1| > 1/4"""
        report = q_class_test(quadratic_map(2), small_sample)
        assert report.failed
        assert not report.details["quasiregular"]

    def test_qtilde_quadratic(self, quadratic04):
        """Σ k||A_k|| = 0.8 <= 1"""
        report = qtilde_test(quadratic04)
        assert report.passed
        assert report.min_margin == pytest.approx(0.2)
        assert report.details["exact_norms"]

    def test_ktilde_quadratic_fails(self, quadratic04):
        """Σ k²||A_k|| = 1.6 > 1"""
        report = ktilde_test(quadratic04)
        assert report.failed
        assert report.min_margin == pytest.approx(-0.6)

    def test_ktilde_quadratic_small(self):
        """Σ k²||A_k|| = 0.8 <= 1 и Σ k||A_k|| = 0.4 <= 1/2"""
        report = ktilde_test(quadratic_map(0.2))
        assert report.passed
        assert report.details["sum_k"] == pytest.approx(0.4)

    def test_ktilde_boundary(self):
        """Σ k²||A_k|| = 1 дает пограничный вердикт"""
        report = ktilde_test(quadratic_map(0.25))
        assert report.verdict == Verdict.BOUNDARY

    def test_not_normalized(self):
        """Ненормированное отображение проваливает Q̃"""
        report = qtilde_test(PolyMap.from_linear(2 * np.eye(2)))
        assert report.failed
        assert report.reason is not None


class TestCounterexampleSearch:
    """Тесты search_qtilde_starlike_counterexample"""

    def test_no_candidates_among_known_maps(self, small_sample):
        """Отображения из Q̃ в каталоге звездны"""
        maps = [quadratic_map(0.2), shear_map(0.3), shear_map(3)]
        assert search_qtilde_starlike_counterexample(maps, small_sample, refine=False) == []
