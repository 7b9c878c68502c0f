import csv
import io
import json
import math

import pytest

from torsion_glue.cli import OUTDIR_ENV, RunConfig, dumps, run


@pytest.fixture(autouse=True)
def _isolate(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv(OUTDIR_ENV, raising=False)


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_spectrum_identity(capsys):
    assert run(["spectrum", "--R", "1", "--window", "0:5"]) == 0
    out = rows(capsys.readouterr().out)
    assert [float(r["lambda"]) for r in out] == pytest.approx([math.pi / 2, math.pi, 3 * math.pi / 2], abs=1e-12)
    assert all(r["provenance"] == "spectra.lambda_roots" for r in out)


def test_zeta_minus_identity(capsys):
    assert run(["zeta", "--C", "minus-identity", "--R", "2"]) == 0
    cap = capsys.readouterr()
    assert "zeta'(0) = 0.69314718055994529" in cap.err
    (row,) = rows(cap.out)
    assert float(row["zeta_prime_0"]) == pytest.approx(math.log(2), abs=1e-15)


def test_zeta_rotation(capsys):
    assert run(["zeta", "--C", "rotation", "--alpha", "1.0", "--R", "3"]) == 0
    (row,) = rows(capsys.readouterr().out)
    assert float(row["zeta_prime_0"]) == pytest.approx(math.log(2 - 2 * math.cos(1.0)), abs=1e-10)


def test_bad_usage_exits_2(capsys):
    assert run(["spectrum", "--bogus"]) == 2
    assert run(["spectrum", "--window", "nope"]) == 2
    assert run([]) == 2
    assert run(["mv", "--R-grid", "0.5,2", "--scenarios", "1"]) == 2


def test_bad_config_exits_2(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"nonsense": 1}')
    assert run(["zeta", "--config", str(cfg)]) == 2


def test_output_is_deterministic(capsys):
    outs = []
    for _ in range(2):
        assert run(["gluing", "--h", "2,1,2", "--scenarios", "2", "--R-grid", "1,10", "--seed", "3"]) == 0
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
    assert "\r" not in outs[0]


def test_config_round_trip_and_override(tmp_path, capsys):
    cfg = RunConfig(command="zeta", family="identity", R=5.0)
    assert RunConfig.loads(cfg.dumps()) == cfg
    path = tmp_path / "run.json"
    path.write_text(cfg.dumps())
    assert run(["zeta", "--config", str(path), "--R", "2"]) == 0
    (row,) = rows(capsys.readouterr().out)
    assert float(row["R"]) == 2.0
    assert float(row["zeta_prime_0"]) == pytest.approx(math.log(8), abs=1e-10)


def test_canonical_dumps():
    text = dumps({"b": 0.1, "a": [1, True, None], "c": float("nan")})
    assert json.loads(text) == {"a": [1, True, None], "b": 0.1, "c": "nan"}
    assert text.index('"a"') < text.index('"b"')
    assert "0.10000000000000001" in text


def test_outdir_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(OUTDIR_ENV, str(tmp_path / "o"))
    assert run(["mv", "--h", "1,1", "--scenarios", "1", "--seed", "1"]) == 0
    written = (tmp_path / "o" / "mv.csv").read_text()
    assert written == capsys.readouterr().out


def test_out_flag(tmp_path, capsys):
    target = tmp_path / "s.csv"
    assert run(["spectrum", "--family", "minus-identity", "--window", "0:3", "--out", str(target)]) == 0
    assert target.read_text() == capsys.readouterr().out


def test_verify_only(tmp_path, capsys):
    assert run(["verify", "--only", "1,5", "--out", str(tmp_path / "v.json")]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS] criterion") == 2
    report = json.loads((tmp_path / "v.report.json").read_text())
    assert report["passed"] and [c["number"] for c in report["criteria"]] == [1, 5]
