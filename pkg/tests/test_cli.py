import json

import pytest

from twistl import __version__
from twistl.cli import DEFAULTS, build_parser, dump_json, main, read_config_file, resolve_config


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path), "--n-max", "3000"])


def body(path):
    text = path.read_text()
    return text.split("\n", 1)[1] if text.startswith("# ") else text


def test_version(capsys):
    with pytest.raises(SystemExit) as e:
        build_parser().parse_args(["--version"])
    assert e.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_config_precedence(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("# comment\nq = 211\nt = 2.5\nsigmas = 0.6, 0.7\n")
    ns = build_parser().parse_args(["moments", "--config", str(cfg_file), "--t", "3"])
    cfg = resolve_config(ns)
    assert cfg["q"] == 211 and cfg["t"] == 3.0 and cfg["sigmas"] == [0.6, 0.7]
    assert cfg["bins"] == DEFAULTS["bins"]


def test_config_unknown_field(tmp_path, capsys):
    cfg_file = tmp_path / "bad.cfg"
    cfg_file.write_text("frobnicate = 1\n")
    assert main(["eval", "--config", str(cfg_file), "--out", str(tmp_path)]) == 1
    assert "frobnicate" in capsys.readouterr().err
    with pytest.raises(ValueError):
        read_config_file(cfg_file)


def test_usage_errors(tmp_path):
    assert run(tmp_path, "eval", "--q", "100") == 1
    assert run(tmp_path, "eval", "--q", "101", "--j", "0") == 1
    assert run(tmp_path, "moments", "--q", "101", "--t", "0", "--x-cubed", "97") == 1
    assert run(tmp_path, "moments", "--q", "101") == 1
    assert run(tmp_path, "mollifier", "--q", "101", "--c", "0.1") == 1
    with pytest.raises(SystemExit) as e:
        main(["eval", "--bogus"])
    assert e.value.code == 1


def test_eval_json(tmp_path):
    assert run(tmp_path, "eval", "--q", "101", "--j", "1,5", "--s", "2+3j") == 0
    doc = json.loads((tmp_path / "eval-q101.json").read_text())
    assert doc["provenance"]["tool"] == "twistl"
    assert doc["provenance"]["config"]["q"] == 101
    assert [r["j"] for r in doc["result"]] == [1, 5]
    assert abs(complex(doc["result"][0]["root_number"]["re"], doc["result"][0]["root_number"]["im"])) == pytest.approx(1)


def test_chars_csv(tmp_path):
    assert run(tmp_path, "chars", "--q", "11") == 0
    lines = (tmp_path / "chars-q11.csv").read_text().splitlines()
    assert lines[0].startswith("# {")
    assert lines[1].split(",")[0] == "j"
    assert len(lines) == 2 + 9


def test_moments_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(a, "moments", "--q", "53", "--t", "1", "--x-cubed", "47", "--n", "1,2") == 0
    assert run(b, "moments", "--q", "53", "--t", "1", "--x-cubed", "47", "--n", "1,2") == 0
    da = json.loads((a / "moments-q53.json").read_text())
    db = json.loads((b / "moments-q53.json").read_text())
    assert da["result"] == db["result"]
    acc = da["result"]["accounting"]
    assert acc["characters"] == acc["expected"] == 51 and acc["failed"] == 0


def test_density_and_mollifier(tmp_path):
    assert run(tmp_path, "density", "--q", "53", "--t1", "0", "--t2", "2", "--sigmas", "0.8,0.9") == 0
    assert (tmp_path / "density-q53.csv").exists()
    assert run(tmp_path, "density", "--q", "53", "--sigmas", "0.51") == 1
    assert run(tmp_path, "mollifier", "--q", "53", "--mollifier-length", "20", "--sigma", "2") == 0
    rows = body(tmp_path / "mollifier-q53.csv").splitlines()
    assert rows[0] == "q,sigma,t,L_effective,average,samples"
    assert rows[1].split(",")[3] == "20"


def test_clt(tmp_path):
    assert run(tmp_path, "clt", "--q", "53", "--t", "1", "--bins", "10") == 0
    doc = json.loads((tmp_path / "clt-q53.json").read_text())["result"]
    assert doc["count"] == 51
    assert doc["mass_total"] == pytest.approx(1.0, abs=1e-12)


def test_dump_json():
    assert dump_json({"a": 0.1, "b": float("nan")}) == '{\n  "a": 0.10000000000000001,\n  "b": null\n}'


def test_check(tmp_path, capsys):
    assert main(["check", "--q", "101", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") >= 10
