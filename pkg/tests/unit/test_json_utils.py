"""
Тесты для json_utils
"""
import json
import math

import numpy as np
import pytest

from src.models.enums import Verdict
from src.utils.json_utils import (
    dumps_json,
    encode_complex,
    get_validation_errors,
    load_json,
    save_json,
    to_jsonable,
)


class _WithDict:
    def to_dict(self):
        return {"value": 1 + 2j}


class TestToJsonable:
    """Тесты to_jsonable"""

    def test_complex(self):
        assert to_jsonable(1 + 2j) == {"re": 1.0, "im": 2.0}

    def test_numpy(self):
        """Массивы и скаляры numpy"""
        data = to_jsonable({"a": np.array([1.5, 2.5]), "b": np.int64(3), "c": np.bool_(True)})
        assert data == {"a": [1.5, 2.5], "b": 3, "c": True}

    def test_nonfinite_to_none(self):
        """NaN и бесконечности становятся null"""
        assert to_jsonable([math.inf, -math.inf, math.nan]) == [None, None, None]
        assert encode_complex(complex(math.inf, 1)) == {"re": None, "im": 1.0}

    def test_enum_and_models(self):
        assert to_jsonable(Verdict.BOUNDARY) == "boundary"
        assert to_jsonable(_WithDict()) == {"value": {"re": 1.0, "im": 2.0}}

    def test_tuple_keys(self):
        """Ключи словаря приводятся к строкам"""
        assert to_jsonable({(1, 0): 2}) == {"(1, 0)": 2}

    def test_dumps_is_strict(self):
        """dumps_json дает строгий JSON"""
        text = dumps_json({"x": math.nan, "z": 1j})
        assert json.loads(text) == {"x": None, "z": {"re": 0.0, "im": 1.0}}


class TestLoadSave:
    """Тесты load_json / save_json"""

    def test_roundtrip(self, tmp_path):
        path = tmp_path / "nested" / "report.json"
        save_json({"value": np.array([1j])}, path)
        assert load_json(path) == {"value": [{"re": 0.0, "im": 1.0}]}

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_json(tmp_path / "missing.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(json.JSONDecodeError):
            load_json(path)


class TestValidation:
    """Тесты get_validation_errors"""

    SCHEMA = {"type": "object", "properties": {"dim": {"type": "integer", "minimum": 1}}, "required": ["dim"]}

    def test_valid(self):
        assert get_validation_errors({"dim": 2}, self.SCHEMA) == []

    def test_errors(self):
        errors = get_validation_errors({"dim": 0}, self.SCHEMA)
        assert len(errors) == 1
        assert list(errors[0].absolute_path) == ["dim"]
