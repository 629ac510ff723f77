"""
Загрузчик входных данных BallChain из JSON

Поддерживаемые форматы (все проверяются JSON Schema до разбора):

- оператор: {"dim": 2, "entries": [[1, {"re": 0, "im": 1}], [0, "5/2"]]}
  Строки "p/q" включают точный режим (sympy.Rational).
- отображение: {"dim": 2, "coords": [{"terms": [{"exp": [1, 0], "re": 1, "im": 0}]}, ...]}
- слово: {"dim": 2, "factors": [{"kind": "shear", "axis": 0, "poly": {"terms": [...]}}, ...]}
- поле: {"A": оператор, "pieces": [{"duration": 1.0, "kind": "linear"},
  {"duration": 0.5, "kind": "spirallike", "map": отображение-или-слово}]}
- кандидаты: {"candidates": [отображение-или-слово, ...]} или просто список
- точки: {"points": [[z_1, z_2], ...]} или просто список
"""
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

import numpy as np

from config.settings import config
from src.core.automorphisms import AutomorphismWord, ShearFactor, normalize
from src.core.errors import InvalidInputError
from src.core.loewner import verify_field
from src.core.operator_analysis import exact_operator
from src.core.polymap import PolyMap
from src.core.sampling import BallSample
from src.models.enums import FactorKind, GeneratorKind
from src.models.loewner_models import FieldPiece, HerglotzField
from src.models.operator_models import Operator
from src.utils.icons import Icon
from src.utils.json_utils import get_validation_errors, load_json
from src.utils.logger import get_logger

MapOrWord = Union[PolyMap, AutomorphismWord]

# ============================================================================
# JSON SCHEMA
# ============================================================================

_COMPLEX = {
    "oneOf": [
        {"type": "number"},
        {
            "type": "object",
            "properties": {"re": {"type": "number"}, "im": {"type": "number"}},
            "required": ["re"],
            "additionalProperties": False,
        },
    ]
}

_ENTRY = {
    "oneOf": [
        {"type": "number"},
        {"type": "string", "minLength": 1},
        {
            "type": "object",
            "properties": {
                "re": {"type": ["number", "string"]},
                "im": {"type": ["number", "string"]},
            },
            "required": ["re"],
            "additionalProperties": False,
        },
    ]
}

OPERATOR_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "entries": {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": _ENTRY}},
    },
    "required": ["entries"],
}

_TERMS = {
    "type": "object",
    "properties": {
        "terms": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "exp": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    "re": {"type": "number"},
                    "im": {"type": "number"},
                },
                "required": ["exp"],
            },
        }
    },
    "required": ["terms"],
}

POLYMAP_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "coords": {"type": "array", "minItems": 1, "items": _TERMS},
    },
    "required": ["dim", "coords"],
}

WORD_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "factors": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "kind": {"enum": [kind.value for kind in FactorKind]},
                    "axis": {"type": "integer", "minimum": 0},
                    "poly": _TERMS,
                    "scale": _COMPLEX,
                    "matrix": {"type": "array", "items": {"type": "array", "items": _COMPLEX}},
                },
                "required": ["kind"],
            },
        },
    },
    "required": ["dim", "factors"],
}

FIELD_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "properties": {
        "A": OPERATOR_SCHEMA,
        "pieces": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "duration": {"type": "number", "exclusiveMinimum": 0},
                    "kind": {"enum": [kind.value for kind in GeneratorKind]},
                    "map": {"type": "object"},
                    "word": {"type": "object"},
                },
                "required": ["duration", "kind"],
            },
        },
    },
    "required": ["A", "pieces"],
}

POINTS_SCHEMA: Dict[str, Any] = {
    "type": "array",
    "minItems": 1,
    "items": {"type": "array", "minItems": 1, "items": _COMPLEX},
}


def _complex(value) -> complex:
    if isinstance(value, dict):
        return complex(value.get("re", 0.0), value.get("im", 0.0))
    return complex(value)


def _terms(data: Dict) -> Dict[tuple, complex]:
    terms: Dict[tuple, complex] = {}
    for term in data["terms"]:
        key = tuple(term["exp"])
        terms[key] = terms.get(key, 0j) + complex(term.get("re", 0.0), term.get("im", 0.0))
    return terms


class JsonInputLoader:
    """
    Загрузчик операторов, отображений, слов, полей и кандидатов

    Ошибки формата превращаются в InvalidInputError с перечнем нарушений
    схемы; отсутствующий файл: FileNotFoundError (как в load_json).
    """

    def __init__(self, logger=None):
        self.logger = logger or get_logger(self.__class__.__name__)

    # ------------------------------------------------------------------
    # Проверка схемы
    # ------------------------------------------------------------------

    def _validate(self, data: Any, schema: Dict[str, Any], what: str) -> None:
        errors = get_validation_errors(data, schema)
        if errors:
            details = "; ".join(
                f"{'/'.join(str(p) for p in error.absolute_path) or '<root>'}: {error.message}" for error in errors[:5]
            )
            raise InvalidInputError(f"Невалидный {what}: {details}")

    def _read(self, file_path: Path) -> Any:
        try:
            return load_json(Path(file_path))
        except ValueError as e:
            raise InvalidInputError(f"Невалидный JSON в {file_path}: {e}") from e

    # ------------------------------------------------------------------
    # Оператор
    # ------------------------------------------------------------------

    def parse_operator(self, data: Any) -> Operator:
        """Оператор из JSON-словаря или вложенного списка"""
        if isinstance(data, list):
            data = {"entries": data}
        self._validate(data, OPERATOR_SCHEMA, "оператор")
        rows = data["entries"]
        dim = data.get("dim", len(rows))
        if len(rows) != dim or any(len(row) != dim for row in rows):
            raise InvalidInputError(f"Оператор должен быть {dim}×{dim}")

        exact = any(
            isinstance(entry, str) or (isinstance(entry, dict) and any(isinstance(v, str) for v in entry.values()))
            for row in rows for entry in row
        )
        if exact:
            return exact_operator([[self._exact_entry(entry) for entry in row] for row in rows])
        return Operator(np.array([[_complex(entry) for entry in row] for row in rows], dtype=complex))

    @staticmethod
    def _exact_entry(entry):
        if isinstance(entry, dict):
            re_part, im_part = entry.get("re", 0), entry.get("im", 0)
            return f"({re_part}) + ({im_part})*I"
        if isinstance(entry, float):
            # десятичная запись JSON читается как точная дробь
            return str(entry)
        return entry

    def load_operator(self, file_path: Path) -> Operator:
        operator = self.parse_operator(self._read(file_path))
        self.logger.info(f"{Icon.FILE} Оператор {operator.dim}×{operator.dim} из {Path(file_path).name}")
        return operator

    # ------------------------------------------------------------------
    # Отображения и слова
    # ------------------------------------------------------------------

    def parse_polymap(self, data: Any) -> PolyMap:
        self._validate(data, POLYMAP_SCHEMA, "полином")
        return PolyMap(data["dim"], tuple(_terms(coord) for coord in data["coords"]))

    def parse_word(self, data: Any) -> AutomorphismWord:
        self._validate(data, WORD_SCHEMA, "слово автоморфизма")
        dim = data["dim"]
        factors = []
        for raw in data["factors"]:
            kind = FactorKind(raw["kind"])
            if kind == FactorKind.LINEAR:
                if "matrix" not in raw:
                    raise InvalidInputError("Линейный множитель требует поле matrix")
                matrix = np.array([[_complex(c) for c in row] for row in raw["matrix"]], dtype=complex)
                factors.append(ShearFactor(kind, dim, matrix=matrix))
                continue
            factors.append(ShearFactor(
                kind, dim,
                axis=raw.get("axis", 0),
                poly=_terms(raw.get("poly", {"terms": []})),
                scale=_complex(raw.get("scale", 1.0)),
            ))
        return AutomorphismWord(dim, tuple(factors))

    def parse_map_or_word(self, data: Any) -> MapOrWord:
        """Слово, если есть ключ factors, иначе полином"""
        if isinstance(data, dict) and "factors" in data:
            return self.parse_word(data)
        return self.parse_polymap(data)

    def load_map_or_word(self, file_path: Path) -> MapOrWord:
        result = self.parse_map_or_word(self._read(file_path))
        kind = "слово" if isinstance(result, AutomorphismWord) else "полином"
        self.logger.info(f"{Icon.FILE} Загружено {kind} (n={result.dim}) из {Path(file_path).name}")
        return result

    def load_map(self, file_path: Path) -> PolyMap:
        """Полином; слово разворачивается в полином без нормировки"""
        result = self.load_map_or_word(file_path)
        return result.polymap if isinstance(result, AutomorphismWord) else result

    # ------------------------------------------------------------------
    # Поля и кандидаты
    # ------------------------------------------------------------------

    def parse_field(self, data: Any, sample: BallSample = None) -> HerglotzField:
        """
        Поле Херглотца; спиралеобразные куски проверяются verify_field

        Raises:
            FieldRejectedError: Кусок не спиралеобразен относительно A
        """
        self._validate(data, FIELD_SCHEMA, "поле")
        A = self.parse_operator(data["A"])
        pieces = []
        for raw in data["pieces"]:
            kind = GeneratorKind(raw["kind"])
            if kind == GeneratorKind.LINEAR:
                pieces.append(FieldPiece(raw["duration"], kind))
                continue
            source = raw.get("map", raw.get("word"))
            if source is None:
                raise InvalidInputError("Спиралеобразный кусок требует map или word")
            generator = self.parse_map_or_word(source)
            if isinstance(generator, AutomorphismWord):
                word = normalize(generator)
                pieces.append(FieldPiece(raw["duration"], kind, map=word.polymap, word=word))
            else:
                pieces.append(FieldPiece(raw["duration"], kind, map=generator))
        return verify_field(HerglotzField(A, tuple(pieces)), sample)

    def load_field(self, file_path: Path, sample: BallSample = None) -> HerglotzField:
        field = self.parse_field(self._read(file_path), sample)
        self.logger.info(f"{Icon.FILE} Поле: {len(field.pieces)} кусков, T={field.total_time:g}")
        return field

    def parse_candidates(self, data: Any) -> List[MapOrWord]:
        items = data.get("candidates") if isinstance(data, dict) else data
        if not isinstance(items, list):
            raise InvalidInputError("Ожидался список кандидатов или {\"candidates\": [...]}")
        return [self.parse_map_or_word(item) for item in items]

    def load_candidates(self, file_path: Path) -> List[MapOrWord]:
        candidates = self.parse_candidates(self._read(file_path))
        self.logger.info(f"{Icon.LIST} Загружено {len(candidates)} кандидатов из {Path(file_path).name}")
        return candidates

    def parse_points(self, data: Any, dim: int = None) -> np.ndarray:
        items = data.get("points") if isinstance(data, dict) else data
        self._validate(items, POINTS_SCHEMA, "набор точек")
        points = np.array([[_complex(c) for c in point] for point in items], dtype=complex)
        if dim is not None and points.shape[1] != dim:
            raise InvalidInputError(f"Точки размерности {points.shape[1]}, ожидалась {dim}")
        return points

    def load_points(self, file_path: Path, dim: int = None) -> np.ndarray:
        return self.parse_points(self._read(file_path), dim)


def parse_vector(text: str) -> np.ndarray:
    """
    Точка из строки "0.3,0.1+0.2j"

    Examples:
        >>> parse_vector("0.3, 0.1")
        array([0.3+0.j, 0.1+0.j])
    """
    try:
        return np.array([complex(part.strip().replace(" ", "")) for part in text.split(",")], dtype=complex)
    except ValueError as e:
        raise InvalidInputError(f"Не удалось разобрать точку '{text}': {e}") from e


def parse_radii(text: str) -> Sequence[float]:
    """
    Радиусы из строки "0.1,0.5,0.9" или диапазона "a:b"

    Диапазон выбирает радиусы стандартной сетки DEFAULT_RADII из [a, b].

    Examples:
        >>> parse_radii("0.9:0.99")
        (0.9, 0.95, 0.99)
    """
    if ":" in text:
        low, _, high = text.partition(":")
        try:
            low, high = float(low), float(high)
        except ValueError as e:
            raise InvalidInputError(f"Не удалось разобрать диапазон радиусов '{text}': {e}") from e
        radii = tuple(r for r in config.DEFAULT_RADII if low - 1e-12 <= r <= high + 1e-12)
        if not radii:
            raise InvalidInputError(f"В диапазоне '{text}' нет радиусов сетки {config.DEFAULT_RADII}")
        return radii
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        raise InvalidInputError(f"Не удалось разобрать радиусы '{text}': {e}") from e
