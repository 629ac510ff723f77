"""
Тесты для модуля конфигурации
"""
from config.settings import config, AppConfig


def test_config_instance():
    """Тест создания экземпляра конфигурации"""
    assert config is not None
    assert isinstance(config, AppConfig)
    assert config.APP_NAME == "BallChain"
    assert config.APP_VERSION == "0.1.0"


def test_config_directories_exist():
    """Тест создания директорий"""
    assert config.OUTPUT_DIR.exists()
    assert config.REPORTS_DIR.exists()
    assert config.LOG_DIR.exists()


def test_numeric_defaults():
    """Допуски и бюджеты по умолчанию"""
    assert config.TAU_LIN == 1e-9
    assert config.TAU_CRIT == 1e-10
    assert config.FLOW_TOL == 1e-10
    assert config.SMALL_N_CAP == 8
    assert config.DEGREE_HARD_CAP == 64
    assert config.DEFAULT_RADII[-1] == 0.99
    assert list(config.DEFAULT_RADII) == sorted(config.DEFAULT_RADII)


def test_get_report_path():
    """Тест метода get_report_path()"""
    path = config.get_report_path("operator", 7)
    assert path == config.REPORTS_DIR / "operator_seed7.json"


def test_resolve_jobs_explicit():
    """Явное значение --jobs имеет приоритет"""
    assert config.resolve_jobs(3) == 3


def test_resolve_jobs_env(monkeypatch):
    """BALLCHAIN_JOBS используется, если флаг не задан"""
    monkeypatch.setenv("BALLCHAIN_JOBS", "5")
    assert AppConfig().resolve_jobs(None) == 5


def test_resolve_jobs_ignores_nonpositive(monkeypatch):
    """Неположительные значения игнорируются"""
    monkeypatch.delenv("BALLCHAIN_JOBS", raising=False)
    assert AppConfig().resolve_jobs(0) >= 1


def test_seed_from_env(monkeypatch):
    """BALLCHAIN_SEED задает сид по умолчанию"""
    monkeypatch.setenv("BALLCHAIN_SEED", "123")
    assert AppConfig().DEFAULT_SEED == 123

    monkeypatch.setenv("BALLCHAIN_SEED", "не число")
    assert AppConfig().DEFAULT_SEED == 7
