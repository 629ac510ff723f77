"""
Настройки приложения
"""
from pathlib import Path
from typing import Optional, Tuple
from dataclasses import dataclass, field
import os
from dotenv import load_dotenv

# Загрузка переменных окружения из .env
load_dotenv()

# Базовая директория проекта
BASE_DIR = Path(__file__).parent.parent


def _env_int(name: str) -> Optional[int]:
    """Целое из переменной окружения (None, если не задано или не число)"""
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return None
    try:
        return int(raw)
    except ValueError:
        return None


@dataclass
class AppConfig:
    """Конфигурация приложения"""

    # Метаданные приложения
    APP_NAME: str = "BallChain"
    APP_VERSION: str = "0.1.0"
    APP_DESCRIPTION: str = (
        "Цепи Лёвнера, критерии спиралеобразности/звездности/выпуклости "
        "и аппроксимация автоморфизмами на единичном шаре в C^n"
    )

    # Базовые пути
    BASE_DIR: Path = BASE_DIR
    OUTPUT_DIR: Path = BASE_DIR / "output"
    LOG_DIR: Path = BASE_DIR / "logs"
    REPORTS_DIR: Path = OUTPUT_DIR / "reports"

    # Логирование
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    LOG_FILE: str = "ballchain.log"
    LOG_ROTATION: str = "10 MB"  # Ротация при достижении размера
    LOG_RETENTION: str = "30 days"  # Хранить логи 30 дней
    LOG_FORMAT: str = (
        "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | "
        "<level>{level: <8}</level> | "
        "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - "
        "<level>{message}</level>"
    )

    # Линейная алгебра (operator_analysis)
    TAU_LIN: float = 1e-9            # Абсолютный допуск для цепочки неравенств
    TAU_RES: float = 1e-9            # Относительный допуск резонансов
    SMALL_N_CAP: int = 8             # Максимальная размерность для спектра
    ANGLE_GRID: int = 720            # Сетка углов для численного радиуса
    LIMIT_CHECK_HORIZON: float = 1e5  # t для проверки k_+ = lim log||e^{tA}||/t
    LIMIT_CHECK_TOL: float = 1e-3

    # Полиномиальные отображения
    DEGREE_HARD_CAP: int = 64        # Жесткий предел степени композиции
    NORM_SAMPLES: int = 20000        # Точек на сфере для ||A_k||
    NORM_RESTARTS: int = 50          # Рестартов локального подъема
    PIVOT_THRESHOLD: float = 1e-12   # Порог ведущего элемента LU

    # Критерии
    TAU_CRIT: float = 1e-10
    DEFAULT_RADII: Tuple[float, ...] = (
        0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99
    )
    PER_SPHERE: int = 500
    TANGENT_PER_SPHERE: int = 200
    FIELD_PER_SPHERE: int = 200      # Бюджет проверки генераторов поля
    REFINE_WITNESS: bool = True
    REFINE_STARTS: int = 5

    # Уравнение Лёвнера
    FLOW_TOL: float = 1e-10
    FLOW_MAX_STEPS: int = 1_000_000
    FLOW_INITIAL_DIVISOR: int = 64
    PARAMETRIC_T_MAX: float = 64.0
    PARAMETRIC_TOL: float = 1e-8     # Допуск сходимости e^{tA}v(z,0,t)

    # Аппроксимация
    SCHEDULE_LENGTH: int = 10
    TEST_RADII: Tuple[float, ...] = (0.25, 0.5, 0.75, 0.9)

    # Воспроизводимость и параллелизм
    DEFAULT_SEED: int = field(default_factory=lambda: _env_int("BALLCHAIN_SEED") or 7)
    JOBS: Optional[int] = field(default_factory=lambda: _env_int("BALLCHAIN_JOBS"))

    def __post_init__(self):
        """Создает директории, если их нет"""
        for directory in (self.OUTPUT_DIR, self.REPORTS_DIR, self.LOG_DIR):
            directory.mkdir(parents=True, exist_ok=True)

    def resolve_jobs(self, jobs: Optional[int] = None) -> int:
        """
        Размер пула потоков

        Приоритет: явный аргумент > BALLCHAIN_JOBS > число ядер.

        Args:
            jobs: Значение флага --jobs (опционально)

        Returns:
            Положительное число потоков
        """
        for candidate in (jobs, self.JOBS):
            if candidate is not None and candidate > 0:
                return candidate
        return os.cpu_count() or 1

    def get_report_path(self, command: str, seed: int) -> Path:
        """
        Получить путь к отчету по умолчанию

        Args:
            command: Имя подкоманды CLI
            seed: Сид запуска

        Returns:
            Путь к JSON-отчету

        Example:
            >>> config.get_report_path("operator", 7)
            Path("output/reports/operator_seed7.json")
        """
        return self.REPORTS_DIR / f"{command}_seed{seed}.json"


# Глобальный экземпляр конфигурации
config = AppConfig()
