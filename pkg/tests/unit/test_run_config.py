"""
Тесты для RunConfig: слияние файла конфигурации и опций CLI
"""
import pytest

from config.settings import config
from src.cli.run_config import RunConfig, load_config_file
from src.core.errors import InvalidInputError


class TestLoadConfigFile:
    """Тесты load_config_file"""

    def test_none(self):
        assert load_config_file(None) == {}

    def test_yaml_keys_normalized(self, inputs_dir):
        """per-sphere и per_sphere равнозначны"""
        data = load_config_file(inputs_dir / "run_config.yaml")
        assert data["per_sphere"] == 16
        assert data["seed"] == 11

    def test_json_is_yaml(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text('{"seed": 3, "jobs": 2}', encoding="utf-8")
        assert load_config_file(path) == {"seed": 3, "jobs": 2}

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.yaml"
        path.write_text("", encoding="utf-8")
        assert load_config_file(path) == {}

    def test_not_a_mapping(self, tmp_path):
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n", encoding="utf-8")
        with pytest.raises(InvalidInputError):
            load_config_file(path)

    def test_broken_yaml(self, tmp_path):
        path = tmp_path / "broken.yaml"
        path.write_text("seed: [1, 2\n", encoding="utf-8")
        with pytest.raises(InvalidInputError):
            load_config_file(path)


class TestRunConfig:
    """Тесты RunConfig.build"""

    def test_defaults(self):
        run = RunConfig.build("operator", {"seed": None, "jobs": 1})
        assert run.seed == config.DEFAULT_SEED
        assert run.jobs == 1
        assert run.report_path == config.get_report_path("operator", run.seed)

    def test_file_values(self, inputs_dir):
        """Значения файла: сид, радиусы, допуск"""
        run = RunConfig.build("map-test", {"jobs": 1}, inputs_dir / "run_config.yaml")
        assert run.seed == 11
        assert run.per_sphere == 16
        assert run.radii == (0.5, 0.9)
        assert run.tol == pytest.approx(1e-9)

    def test_cli_overrides_file(self, inputs_dir):
        """Заданная опция CLI перекрывает файл, None не перекрывает"""
        run = RunConfig.build("map-test", {"seed": 5, "tol": None, "jobs": 1}, inputs_dir / "run_config.yaml")
        assert run.seed == 5
        assert run.tol == pytest.approx(1e-9)

    def test_radii_range_string(self):
        run = RunConfig.build("map-test", {"radii": "0.9:0.99", "jobs": 1})
        assert run.radii == (0.9, 0.95, 0.99)

    def test_options_and_echo(self, tmp_path):
        """Прочие опции попадают в options; jobs не входит в эхо"""
        out = tmp_path / "report.json"
        run = RunConfig.build("map-test", {"criterion": "convex", "map": tmp_path / "f.json", "out": out, "jobs": 2})

        assert run.get("criterion") == "convex"
        assert run.report_path == out
        echo = run.echo()
        assert "jobs" not in echo
        assert echo["options"]["map"] == str(tmp_path / "f.json")
