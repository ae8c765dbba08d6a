"""End-to-end CLI behavior: exit codes, artifacts, schema conformance."""

import json
from pathlib import Path

import jsonschema
import pytest

from switchsec.cli import main
from switchsec.model import bundled_model_path

DOCS = Path(__file__).parent.parent / "docs"
BOOST = str(bundled_model_path("boost"))
DEMO = str(bundled_model_path("demo_actuated"))


def run(args):
    return main(args)


class TestAnalyze:
    def test_boost_report_and_exit_code(self, tmp_path, capsys):
        # pair (2,3) is not securely distinguishable at sigma=1, so exit 2
        code = run(["analyze", "--model", BOOST, "--sigma", "1", "--rho", "0",
                    "--out", str(tmp_path)])
        out = capsys.readouterr().out
        assert code == 2
        assert "reconstructable from corrupted data: NO" in out
        assert "{1,3}" in out and "sigma_rho_secure_controlled" in out
        report = json.loads((tmp_path / "report.json").read_text())
        schema = json.loads((DOCS / "report.schema.json").read_text())
        jsonschema.validate(report, schema)
        assert report["reconstructable"] is False
        assert report["sigma"] == 1
        assert (tmp_path / "rank_table.png").stat().st_size > 0
        assert (tmp_path / "verdicts.png").stat().st_size > 0

    def test_rank_csv_matches_reference_table(self, tmp_path):
        run(["analyze", "--model", BOOST, "--sigma", "1", "--rho", "0",
             "--out", str(tmp_path)])
        rows = (tmp_path / "rank_table.csv").read_text().strip().splitlines()
        assert rows[0] == 'gamma,"pair 1,2","pair 1,3","pair 2,3"'
        assert rows[1] == '"{1,2}",4,4,2'
        assert rows[2] == '"{1,3}",3,3,2'
        assert rows[3] == '"{2,3}",3,3,2'

    def test_budget_violation_exit_one(self, capsys):
        code = run(["analyze", "--model", BOOST, "--sigma", "2"])
        err = capsys.readouterr().err
        assert code == 1
        assert "2*sigma < p" in err

    def test_autonomous_flag(self, capsys):
        code = run(["analyze", "--model", BOOST, "--autonomous", "--sigma", "1"])
        out = capsys.readouterr().out
        assert code == 2
        assert "autonomous analysis" in out

    def test_demo_model_analyzes(self, capsys):
        code = run(["analyze", "--model", DEMO])
        assert code in (0, 2)

    def test_missing_model_file(self, capsys):
        code = run(["analyze", "--model", "/nonexistent/model.json"])
        assert code == 1

    def test_backend_env_default(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SWITCHSEC_BACKEND", "float")
        code = run(["analyze", "--model", BOOST, "--sigma", "1", "--rho", "0",
                    "--out", str(tmp_path)])
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["backend"] == "float"
        assert code == 2  # same verdicts as the exact backend on this model


class TestSimulateCli:
    def test_seed_determinism_byte_identical(self, tmp_path):
        a = tmp_path / "a.jsonl"
        b = tmp_path / "b.jsonl"
        for path in (a, b):
            assert run(["simulate", "--model", BOOST, "--mode", "2", "--tau", "4",
                        "--seed", "7", "--out", str(path)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_trace_schema(self, tmp_path):
        path = tmp_path / "t.jsonl"
        run(["simulate", "--model", BOOST, "--mode", "1", "--tau", "4",
             "--seed", "3", "--out", str(path)])
        schema = json.loads((DOCS / "trace.schema.json").read_text())
        lines = path.read_text().strip().splitlines()
        assert len(lines) == 4
        for line in lines:
            jsonschema.validate(json.loads(line), schema)

    def test_plot_artifact(self, tmp_path):
        png = tmp_path / "y.png"
        run(["simulate", "--model", BOOST, "--mode", "1", "--tau", "4",
             "--seed", "3", "--out", str(tmp_path / "t.jsonl"), "--plot", str(png)])
        assert png.stat().st_size > 0


class TestEstimateCli:
    def test_roundtrip_unique_mode(self, tmp_path, capsys):
        trace = tmp_path / "t.jsonl"
        run(["simulate", "--model", BOOST, "--mode", "2", "--tau", "4",
             "--seed", "7", "--out", str(trace)])
        capsys.readouterr()
        code = run(["estimate", "--model", BOOST, "--trace", str(trace)])
        payload = json.loads(capsys.readouterr().out)
        assert code == 0
        assert payload["unique"] is True and payload["mode"] == 2


class TestWitnessCli:
    def test_witness_traces_identical_outputs(self, tmp_path, capsys):
        code = run(["witness", "--model", BOOST, "--pair", "1", "2", "--sigma", "1",
                    "--out", str(tmp_path)])
        out = capsys.readouterr().out
        assert code == 0
        assert "replayed outputs identical: True" in out
        t1 = [json.loads(l) for l in (tmp_path / "witness_mode_1.jsonl").read_text().splitlines()]
        t2 = [json.loads(l) for l in (tmp_path / "witness_mode_2.jsonl").read_text().splitlines()]
        assert [r["y"] for r in t1] == [r["y"] for r in t2]
        assert (tmp_path / "witness_outputs.png").stat().st_size > 0
        summary = json.loads((tmp_path / "witness.json").read_text())
        assert summary["outputs_identical"] is True

    def test_secure_pair_has_no_witness(self, tmp_path, capsys):
        model = {
            "n": 1, "m": 0, "p": 3, "sigma": 1, "dwell": 2,
            "modes": [
                {"id": 1, "A": [["2"]], "B": [[]], "C": [["1"], ["1"], ["1"]]},
                {"id": 2, "A": [["3"]], "B": [[]], "C": [["1"], ["1"], ["1"]]},
            ],
        }
        path = tmp_path / "secure.json"
        path.write_text(json.dumps(model))
        code = run(["witness", "--model", str(path), "--pair", "1", "2", "--sigma", "1"])
        out = capsys.readouterr().out
        assert code == 2
        assert "no equal-output witness" in out


class TestDiscretizeCli:
    def test_prints_rational_matrices(self, capsys):
        code = run(["discretize", "--model", BOOST, "--h", "1/10", "--method", "euler"])
        out = capsys.readouterr().out
        assert code == 0
        assert "9/10" in out and "1/10" in out

    def test_output_model_loads(self, tmp_path, capsys):
        out_path = tmp_path / "disc.json"
        code = run(["discretize", "--model", BOOST, "--h", "1/10",
                    "--method", "euler", "--out", str(out_path)])
        assert code == 0
        from switchsec.model import load_model

        again = load_model(out_path)
        from switchsec.model import load_bundled

        assert again.mode(1).A == load_bundled("boost").mode(1).A


class TestShippedModelSchemas:
    @pytest.mark.parametrize("path", [BOOST, DEMO])
    def test_models_validate(self, path):
        schema = json.loads((DOCS / "model.schema.json").read_text())
        jsonschema.validate(json.loads(Path(path).read_text()), schema)
