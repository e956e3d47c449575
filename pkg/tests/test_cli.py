import json
import re
import subprocess
import sys

import jsonschema
import pytest

from deltaagree import cli
from deltaagree.core import SingularError, SolverError
from deltaagree.report import build_report
from conftest import DATA
from importlib import resources

SCHEMA = json.loads(resources.files("deltaagree").joinpath("schema/report.schema.json").read_text())


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestFit:
    def test_fleiss_json(self, capsys):
        code, out, _ = run(capsys, "fit", str(DATA / "fleiss.csv"), "--format", "json")
        assert code == 0
        doc = json.loads(out)
        jsonschema.validate(doc, SCHEMA)
        assert doc["families"]["classic"]["delta"] == pytest.approx(0.687, abs=1e-3)
        assert doc["families"]["U"]["delta"] == pytest.approx(0.715, abs=1e-3)
        assert doc["mode"] == "standard"
        assert doc["kappa"]["kappa_CU"].startswith("unavailable")

    def test_nelson_pepe_gold_standard(self, capsys):
        code, out, _ = run(capsys, "fit", str(DATA / "nelson_pepe.csv"), "--two-by-two",
                           "--gold-standard", "rows", "--format", "json")
        assert code == 0
        doc = json.loads(out)
        jsonschema.validate(doc, SCHEMA)
        assert doc["gold_standard"]["families"]["U"]["conformity"][0] == pytest.approx(0.839, abs=1e-3)
        assert doc["two_by_two"]["augmented_cells"][0] == [80.5, 10.5, 0.5]
        assert doc["mode"] == "gold-standard"

    def test_two_by_two_is_automatic(self, capsys):
        code, out, _ = run(capsys, "fit", str(DATA / "nelson_pepe.csv"))
        assert code == 0 and "two categories" in out and "mode: two-category" in out

    def test_ac_family_and_schema(self, capsys):
        code, out, _ = run(capsys, "fit", str(DATA / "kramer_feinstein.csv"), "--families", "classic,u,ac",
                           "--format", "json", "--gold-standard", "cols")
        doc = json.loads(out)
        jsonschema.validate(doc, SCHEMA)
        assert set(doc["families"]) == {"classic", "U", "AC"}
        assert doc["gold_standard"]["rater"] == "cols"

    def test_bad_shape(self, capsys, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("1,2,3,4\n1,2,3,4\n1,2,3,4\n")
        code, out, err = run(capsys, "fit", str(bad))
        assert code == cli.EXIT_PARSE and out == ""
        assert "bad.csv:1" in err and "square" in err

    def test_bad_family(self, capsys):
        code, _, err = run(capsys, "fit", str(DATA / "fleiss.csv"), "--families", "kappa")
        assert code == cli.EXIT_PARSE and "unknown estimator family" in err

    def test_two_by_two_flag_on_larger_table(self, capsys):
        code, _, err = run(capsys, "fit", str(DATA / "fleiss.csv"), "--two-by-two")
        assert code == cli.EXIT_PARSE

    def test_solver_and_singular_exit_codes(self, capsys, monkeypatch):
        def boom(exc):
            def f(*a, **k):
                raise exc
            return f

        monkeypatch.setattr(cli, "build_report", boom(SolverError("no root", ["trace line"])))
        code, _, err = run(capsys, "fit", str(DATA / "fleiss.csv"))
        assert code == cli.EXIT_SOLVER and "trace line" in err
        monkeypatch.setattr(cli, "build_report", boom(SingularError("X = 1")))
        code, _, err = run(capsys, "fit", str(DATA / "fleiss.csv"))
        assert code == cli.EXIT_SINGULAR

    def test_csv_and_json_inputs_give_identical_reports(self, capsys):
        for fmt in ("json", "text"):
            _, a, _ = run(capsys, "fit", str(DATA / "fleiss.csv"), "--format", fmt)
            _, b, _ = run(capsys, "fit", str(DATA / "fleiss.json"), "--format", fmt)
            assert a == b

    def test_text_and_json_agree_at_text_precision(self, capsys):
        _, js, _ = run(capsys, "fit", str(DATA / "kramer_feinstein.csv"), "--format", "json")
        _, txt, _ = run(capsys, "fit", str(DATA / "kramer_feinstein.csv"))
        doc = json.loads(js)
        numbers = set(re.findall(r"-?\d+\.\d{3}\b", txt))
        for fam in doc["families"].values():
            for v in [fam["delta"], *fam["alpha"], *fam["consistency"], fam["variances"]["delta"]]:
                assert f"{v:.3f}" in numbers
        assert f"{doc['kappa']['kappa_C']:.3f}" in numbers

    def test_undefined_rendered_as_na(self, capsys, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("20,3,0,2\n3,15,0,4\n0,0,0,0\n2,4,0,10\n")
        _, js, _ = run(capsys, "fit", str(p), "--gold-standard", "rows", "--format", "json")
        doc = json.loads(js)
        jsonschema.validate(doc, SCHEMA)
        assert doc["families"]["classic"]["consistency"][2] == "n/a"
        _, txt, _ = run(capsys, "fit", str(p), "--gold-standard", "rows")
        assert "n/a" in txt and "nan" not in txt.lower()

    def test_json_round_trip(self):
        from deltaagree.tableio import read_table
        rep = build_report(read_table(DATA / "kramer_feinstein.csv"), ["classic", "u", "ac"])
        doc = rep.to_dict()
        again = json.loads(rep.to_json())
        assert again == doc

        def leaves(x):
            if isinstance(x, dict):
                for v in x.values():
                    yield from leaves(v)
            elif isinstance(x, list):
                for v in x:
                    yield from leaves(v)
            else:
                yield x

        for a, b in zip(leaves(doc), leaves(again)):
            if isinstance(a, float):
                assert float(f"{b:.12g}") == float(f"{a:.12g}")


class TestSimulate:
    def test_unknown_setting(self, capsys):
        code, _, err = run(capsys, "simulate", "--setting", "99")
        assert code == cli.EXIT_PARSE and "valid ids are 1-48" in err

    def test_too_few_replicates(self, capsys):
        code, _, err = run(capsys, "simulate", "--setting", "1", "--replicates", "1")
        assert code == cli.EXIT_PARSE

    def test_deterministic_output(self, capsys):
        args = ("simulate", "--setting", "1", "--replicates", "30", "--seed", "42", "--target", "delta")
        _, a, _ = run(capsys, *args)
        _, b, _ = run(capsys, *args)
        assert a == b
        header = a.splitlines()[0].split()
        assert header[:11] == ["id", "K", "n", "Delta", "mean", "mean_U", "V_A", "V_E", "mean_Vhat", "V_E_U",
                               "mean_Vhat_U"]

    def test_seed_from_environment(self, capsys, monkeypatch):
        base = ("simulate", "--setting", "3", "--replicates", "20", "--format", "json")
        _, explicit, _ = run(capsys, *base, "--seed", "5")
        monkeypatch.setenv(cli.SEED_ENV, "5")
        _, from_env, _ = run(capsys, *base)
        assert explicit == from_env

    def test_setting_file(self, capsys, tmp_path):
        f = tmp_path / "s.json"
        f.write_text(json.dumps({"n": 40, "alpha": [0.1, 0.2, 0.1], "pi1": [0.3, 0.3, 0.4], "pi2": [0.3, 0.3, 0.4]}))
        code, out, _ = run(capsys, "simulate", "--setting-file", str(f), "--replicates", "20",
                           "--target", "alpha3", "--format", "json")
        assert code == 0
        rows = json.loads(out)
        assert rows[0]["n"] == 40 and rows[0]["alpha3"] == pytest.approx(0.1)

    def test_bad_setting_file(self, capsys, tmp_path):
        f = tmp_path / "s.json"
        f.write_text(json.dumps({"n": 40, "alpha": [0.5, 0.6, 0.1], "pi1": [0.3, 0.3, 0.4], "pi2": [0.3, 0.3, 0.4]}))
        code, _, err = run(capsys, "simulate", "--setting-file", str(f), "--replicates", "20")
        assert code == cli.EXIT_PARSE and "exceeds 1" in err

    def test_csv_output(self, capsys):
        code, out, _ = run(capsys, "simulate", "--setting", "1", "--setting", "2", "--replicates", "10",
                           "--target", "s3", "--format", "csv")
        lines = out.strip().splitlines()
        assert code == 0 and len(lines) == 3 and lines[0].startswith("id,K,n,S3,mean")


class TestPresets:
    def test_rows(self, capsys):
        code, out, _ = run(capsys, "presets", "--format", "json")
        rows = json.loads(out)
        assert code == 0 and len(rows) == 48
        assert rows[0]["Delta"] == pytest.approx(0.40) and rows[0]["V_A_delta"] == pytest.approx(0.0280, abs=1e-4)
        assert rows[24]["V_A_delta"] == pytest.approx(0.0143, abs=1e-4)

    def test_text(self, capsys):
        _, out, _ = run(capsys, "presets")
        lines = out.strip().splitlines()
        assert len(lines) == 49
        assert lines[1].split()[4] == "0.4000" and lines[1].split()[7] == "0.0280"


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "deltaagree", "fit", str(DATA / "fleiss.csv")],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "0.687" in r.stdout
