"""Интеграционные тесты: JSON -> CLI -> отчет и код выхода"""
import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from config.settings import config
from src.cli import cli, main

INPUTS = Path(__file__).parent.parent / "fixtures" / "inputs"


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def report(tmp_path):
    """Путь отчета и чтение конверта после запуска"""
    path = tmp_path / "report.json"

    def read():
        return json.loads(path.read_text(encoding="utf-8"))

    read.path = path
    return read


def _invoke(runner, report, *args):
    return runner.invoke(cli, [*args, "--out", str(report.path), "--jobs", "1"])


class TestOperatorCommand:
    """operator: профиль и резонансы"""

    def test_triangular_file(self, runner, report):
        result = _invoke(runner, report, "operator", "--in", str(INPUTS / "operator_triangular.json"))

        assert result.exit_code == 0
        envelope = report()
        assert envelope["metadata"]["tool"] == config.APP_NAME
        assert envelope["metadata"]["command"] == "operator"
        profile = envelope["result"]["profile"]
        assert profile["kplus"] == pytest.approx(2 * profile["m"], abs=1e-9)

    def test_exact_resonance(self, runner, report):
        """diag(1, 2) в точном режиме: резонанс λ_2 = 2λ_1"""
        result = _invoke(runner, report, "operator", "--in", str(INPUTS / "operator_resonant_exact.json"))

        assert result.exit_code == 0
        envelope = report()
        assert envelope["result"]["exact"] is True
        assert envelope["result"]["resonance"]["kind"] == "resonant"

    def test_indefinite_operator_keeps_profile(self, runner, report):
        """diag(-1, 1): резонансы неприменимы, но профиль и спектр в отчете, код 0"""
        result = _invoke(
            runner, report, "operator", "--in", str(INPUTS / "operator_indefinite.json"), "--format", "text",
        )

        assert result.exit_code == 0
        envelope = report()
        assert envelope["result"]["resonance"] is None
        assert "Re λ_j > 0" in envelope["result"]["resonance_skipped"]
        profile = envelope["result"]["profile"]
        assert profile["m"] == pytest.approx(-1.0)
        assert profile["k"] == pytest.approx(1.0)
        assert envelope["result"]["spectrum"]["kminus"] == pytest.approx(-1.0)
        assert "не проверялись" in result.output

    def test_bad_operator(self, runner, report):
        """Неквадратная матрица: код 2, отчет не пишется"""
        result = _invoke(runner, report, "operator", "--in", str(INPUTS / "operator_bad.json"))

        assert result.exit_code == 2
        assert not report.path.exists()

    def test_unknown_builtin(self, runner, report):
        assert _invoke(runner, report, "operator", "--builtin", "no-such").exit_code == 2


class TestMapTestCommand:
    """map-test: вердикт критерия определяет код выхода"""

    def test_identity_convex(self, runner, report):
        result = _invoke(
            runner, report, "map-test", "--map", str(INPUTS / "identity_map.json"),
            "--criterion", "convex", "--per-sphere", "32", "--format", "text",
        )

        assert result.exit_code == 0
        assert report()["result"]["verdict"] == "pass"

    def test_large_shear_not_starlike(self, runner, report):
        result = _invoke(
            runner, report, "map-test", "--map", str(INPUTS / "shear_map_3.json"),
            "--criterion", "starlike", "--radii", "0.99", "--per-sphere", "2048",
        )

        assert result.exit_code == 1
        envelope = report()
        assert envelope["result"]["verdict"] == "fail"
        assert envelope["result"]["witness"] is not None

    def test_spirallike_with_builtin_operator(self, runner, report):
        result = _invoke(
            runner, report, "map-test", "--builtin", "shear-0.3",
            "--criterion", "spirallike", "--operator-builtin", "diag-2-1", "--per-sphere", "32",
        )
        assert result.exit_code == 0

    def test_spirallike_requires_operator(self, runner, report):
        result = _invoke(runner, report, "map-test", "--builtin", "shear-0.3", "--criterion", "spirallike")
        assert result.exit_code == 2

    def test_missing_criterion(self, runner, report):
        assert _invoke(runner, report, "map-test", "--builtin", "identity").exit_code == 2

    def test_config_file_echo(self, runner, report):
        """Сид и радиусы из --config попадают в эхо конфигурации"""
        result = _invoke(
            runner, report, "map-test", "--builtin", "quadratic-0.4", "--criterion", "qtilde",
            "--config", str(INPUTS / "run_config.yaml"),
        )

        assert result.exit_code == 0
        metadata = report()["metadata"]
        assert metadata["seed"] == 11
        assert metadata["config"]["radii"] == [0.5, 0.9]


class TestFlowAndReach:
    """flow / reach: поля из файлов и встроенные"""

    def test_flow_builtin(self, runner, report):
        result = _invoke(runner, report, "flow", "--builtin", "linear-identity", "--point", "0.2,0.1")

        assert result.exit_code == 0
        flow_result = report()["result"]["results"][0]
        assert flow_result["value"][0]["re"] == pytest.approx(0.2 * 0.36787944117144233, rel=1e-8)

    def test_flow_field_file(self, runner, report):
        result = _invoke(
            runner, report, "flow", "--field", str(INPUTS / "field_shear.json"),
            "--points", str(INPUTS / "points.json"), "--per-sphere", "32",
        )

        assert result.exit_code == 0
        assert len(report()["result"]["results"]) == 3

    def test_rejected_field(self, runner, report):
        """Кусок, не прошедший проверку спиралеобразности: код 2"""
        result = _invoke(
            runner, report, "flow", "--field", str(INPUTS / "field_rejected.json"),
            "--radii", "0.99", "--per-sphere", "2048",
        )
        assert result.exit_code == 2

    def test_reach_with_limit(self, runner, report):
        result = _invoke(
            runner, report, "reach", "--builtin", "shear-identity", "--point", "0.2,0.3",
            "--limit", "--t-max", "8",
        )

        assert result.exit_code == 0
        envelope = report()
        assert envelope["result"]["limits"][0]["converged"] is True


class TestApproxAndSuite:
    """approx / suite"""

    def test_approx_candidates_file(self, runner, report):
        result = _invoke(
            runner, report, "approx", "--builtin", "quadratic-0.2",
            "--candidates", str(INPUTS / "candidates_quadratic.json"),
            "--criterion", "qtilde", "--schedule", "0.5", "--test-radii", "0.5", "--per-sphere", "32",
        )

        assert result.exit_code == 0
        assert [selection["index"] for selection in report()["result"]["selections"]] == [2]

    def test_suite_subset(self, runner, report):
        result = _invoke(
            runner, report, "suite", "--check", "triangular-operator", "--check", "diagonal-resonance",
            "--format", "json",
        )

        assert result.exit_code == 0
        envelope = report()
        assert envelope["result"]["passed"] is True
        assert set(envelope["metadata"]["wall_time"]["parts"]) == {"triangular-operator", "diagonal-resonance"}

    def test_unknown_check(self, runner, report):
        assert _invoke(runner, report, "suite", "--check", "nope").exit_code == 2


class TestMain:
    """main(): коды выхода без CliRunner"""

    def test_missing_file(self, tmp_path):
        assert main(["operator", "--in", str(tmp_path / "missing.json")]) == 2

    def test_ok(self, tmp_path):
        out = tmp_path / "operator.json"
        assert main(["operator", "--builtin", "identity", "--out", str(out), "--jobs", "1", "--format", "text"]) == 0
        assert out.exists()
