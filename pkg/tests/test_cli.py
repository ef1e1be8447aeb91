"""
Tests for the command-line entry point
"""

import io
import json
from pathlib import Path

import pandas as pd
import pytest

from cli import EXIT_CONVERGENCE, EXIT_DOMAIN, EXIT_INPUT, EXIT_OK, main
from config import Config
from utils.analyzer import normalized_covector
from utils.expmap import exp
from utils.pendulum import Stratum


@pytest.fixture(autouse=True)
def restore_config(monkeypatch):
    # main() writes command-line overrides into Config
    for name in ("TOL", "SEED", "WORKERS"):
        monkeypatch.setattr(Config, name, getattr(Config, name))


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


class TestClassify:
    def test_json(self, capsys):
        code, out = run(capsys, "--format", "json", "classify", "--c", "3", "--alpha", "1")
        assert code == EXIT_OK
        payload = json.loads(out)
        assert payload["stratum"] == "C2"
        assert payload["E"] == pytest.approx(3.5)
        assert payload["k"] == pytest.approx(2.0 / 3.0)

    def test_csv_without_modulus(self, capsys):
        code, out = run(capsys, "classify", "--alpha", "1")
        assert code == EXIT_OK
        assert out.splitlines() == ["stratum,E,k", "C4,-1,"]

    def test_stratum_tolerance(self, capsys):
        _, out = run(capsys, "--format", "json", "classify", "--c", "1", "--alpha", "1e-9", "--stratum-tol", "1e-6")
        assert json.loads(out)["stratum"] == "C6"

    def test_negative_alpha_is_a_domain_error(self, capsys):
        code, out = run(capsys, "classify", "--alpha", "-1")
        assert code == EXIT_DOMAIN
        assert json.loads(out)["error"] == "DomainError"


class TestArguments:
    def test_unknown_option(self, capsys):
        code, out = run(capsys, "classify", "--gamma", "1")
        assert code == EXIT_INPUT
        assert json.loads(out)["error"] == "InputError"

    def test_missing_command(self, capsys):
        code, _ = run(capsys)
        assert code == EXIT_INPUT

    def test_non_positive_tolerance(self, capsys):
        code, _ = run(capsys, "--tol", "-1", "constants")
        assert code == EXIT_INPUT

    def test_overrides_reach_config(self, capsys):
        code, _ = run(capsys, "--tol", "1e-10", "--seed", "7", "--workers", "1", "classify")
        assert code == EXIT_OK
        assert (Config.TOL, Config.SEED, Config.WORKERS) == (1e-10, 7, 1)


class TestExp:
    def test_trajectory_csv(self, capsys):
        code, out = run(capsys, "exp", "--theta", "0.3", "--c", "1", "--alpha", "2", "--t", "1.5", "--samples", "4")
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == "t,x,y,z,v,w,theta"
        assert len(lines) == 5
        assert lines[1].startswith("0,0,0,0,0,0,")

    def test_negative_time(self, capsys):
        code, _ = run(capsys, "exp", "--t", "-1")
        assert code == EXIT_DOMAIN

    def test_output_file(self, capsys, tmp_path):
        path = tmp_path / "line.csv"
        code, out = run(capsys, "--output", str(path), "exp", "--theta", "1", "--t", "2", "--samples", "3")
        assert code == EXIT_OK
        assert out == ""
        frame = pd.read_csv(path)
        assert frame["x"].iloc[-1] == pytest.approx(2 * 0.5403023058681398)


class TestTables:
    def test_maxwell_table(self, capsys):
        code, out = run(capsys, "--format", "json", "tables", "--grid-size", "4", "--table", "maxwell")
        assert code == EXIT_OK
        rows = json.loads(out)
        assert [row["k"] for row in rows] == [0.0, 0.25, 0.5, 0.75]
        assert set(rows[0]) == {"k", "t1z", "t1v", "t2v", "t1_combined"}

    def test_excel_report(self, capsys, tmp_path):
        path = tmp_path / "report.xlsx"
        code, out = run(capsys, "tables", "--grid-size", "3", "--excel", str(path))
        assert code == EXIT_OK
        assert out.splitlines()[0] == "family,k,mu_t_cut_engel,mu_t_cut_cartan"
        assert "Cut times" in pd.read_excel(path, sheet_name=None, engine="openpyxl")


class TestConstantsAndSweeps:
    def test_constants(self, capsys):
        code, out = run(capsys, "--format", "json", "constants")
        assert code == EXIT_OK
        payload = json.loads(out)
        assert payload["k1"] == pytest.approx(0.802, abs=2e-3)
        assert payload["zeta_below_two"] is True

    def test_elastica(self, capsys):
        code, out = run(capsys, "elastica", "--k", "0.4", "--samples", "5")
        assert code == EXIT_OK
        assert len(out.splitlines()) == 1 + 2 * 5

    def test_compare(self, capsys):
        code, out = run(capsys, "--seed", "5", "--format", "json", "compare", "--count", "3")
        assert code == EXIT_OK
        assert [row["stratum"] for row in json.loads(out)] == ["C1", "C2", "C6"]


class TestShoot:
    def test_single_target(self, capsys):
        covector = normalized_covector(0.6, Stratum.C2, phi=0.2)
        q = exp(covector, 0.7)
        argv = ["--format", "json", "shoot"]
        for name, value in zip("xyzvw", q.as_array()):
            argv.append(f"--{name}={float(value)!r}")
        code, out = run(capsys, *argv)
        assert code == EXIT_OK
        payload = json.loads(out)
        assert payload["distance"] == pytest.approx(0.7, abs=1e-6)
        assert payload["flags"] == []

    def test_incomplete_target(self, capsys):
        code, out = run(capsys, "shoot", "--x", "1")
        assert code == EXIT_INPUT
        assert "shoot needs" in json.loads(out)["message"]

    def test_maxwell_set_target(self, capsys):
        code, _ = run(capsys, "shoot", "--x", "0", "--y", "1", "--z", "0", "--v", "0.5", "--w", "0.2")
        assert code == EXIT_DOMAIN

    def test_convergence_failure(self, capsys):
        covector = normalized_covector(0.6, Stratum.C2, phi=0.2)
        q = exp(covector, 0.7)
        argv = ["shoot", "--max-starts", "1", "--shoot-tol", "1e-30"]
        for name, value in zip("xyzvw", q.as_array()):
            argv.append(f"--{name}={float(value)!r}")
        code, out = run(capsys, *argv)
        assert code == EXIT_CONVERGENCE
        assert json.loads(out)["error"] == "ConvergenceError"

    def test_batch_input(self, capsys, tmp_path):
        path = tmp_path / "targets.csv"
        path.write_text("x,y,z,v,w\n0,1,0,0.5,0.2\n")
        code, out = run(capsys, "shoot", "--input", str(path))
        assert code == EXIT_OK
        frame = pd.read_csv(io.StringIO(out))
        assert frame.loc[0, "status"] == "error"


class TestSchemas:
    SCHEMAS = Path(__file__).resolve().parent.parent / "docs" / "schemas"

    def load(self, name):
        return json.loads((self.SCHEMAS / f"{name}.json").read_text())

    def test_classify_keys(self, capsys):
        _, out = run(capsys, "--format", "json", "classify", "--c", "3", "--alpha", "1")
        schema = self.load("classify")
        assert set(json.loads(out)) == set(schema["required"])

    def test_constants_keys(self, capsys):
        _, out = run(capsys, "--format", "json", "constants")
        schema = self.load("constants")
        assert set(json.loads(out)) == set(schema["required"])
