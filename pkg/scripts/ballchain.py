"""
Запуск CLI ballchain из корня репозитория

Usage:
    python scripts/ballchain.py <команда> [опции]

Example:
    python scripts/ballchain.py operator --builtin triangular
    python scripts/ballchain.py suite --builtin reference-examples --check inequality-chain
"""
import sys
from pathlib import Path

# Добавляем корневую директорию в путь
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
