import json

from lfdgf import io
from lfdgf.cli import main, run
from lfdgf.models import DependenceModel, StandardModel


def test_sat_contradiction_exits_one(tmp_path):
    f = tmp_path / "phi.lfd"
    f.write_text("E[] P(x) & ~E[] P(x)\n")
    code, out = run(["sat", "-f", str(f), "--engine", "typemodel"])
    assert code == 1 and out["verdict"] == "UNSAT"


def test_sat_writes_certificate(tmp_path):
    cert = tmp_path / "cert.json"
    code, out = run(["sat", "-e", "E[] P(x) & E[] ~P(x)", "--cert", str(cert), "--depth", "2"])
    assert code == 0 and out["verdict"] == "SAT"
    data = json.loads(cert.read_text())
    assert data["types"] and data["closure"] and data["unravelled"]["team"]


def test_bruteforce_and_via_gf_engines():
    assert run(["sat", "-e", "E[] P(x) & E[] ~P(x)", "--engine", "bruteforce"])[0] == 0
    code, out = run(["sat", "-e", "P(x) & ~P(x)", "--engine", "via-gf", "--max-dom", "1"])
    assert code == 1 and out["verdict"] == "NONE_FOUND"


def test_gf2lfd_all_rho_writes_one_file_per_map(tmp_path):
    f = tmp_path / "phi.gf"
    f.write_text("Q(x,y) & P(x)\n")
    code, out = run(["translate", "--dir", "gf2lfd", "--all-rho", "-f", str(f), "--out", str(tmp_path / "o")])
    assert code == 0
    assert len(out["translations"]) == 4
    assert len(list((tmp_path / "o").glob("*.lfd"))) == 4


def test_translate_directions():
    for d in ("lfd2fo", "lfd2gf", "setup", "sigma"):
        code, out = run(["translate", "--dir", d, "-e", "D[x] y & P(x)"])
        assert code == 0 and out["formula"]
    code, out = run(["translate", "--dir", "setup", "-e", "P(x)"])
    assert out["setup_counts"] == {"projection": 2, "transitivity": 8, "transfer": 3 * 4}


def test_check_and_trace(tmp_path):
    m = DependenceModel(StandardModel.build(["a", "b"], {"P": [("a",)]}), ("x", "y"), [("a", "b")])
    path = tmp_path / "m.json"
    path.write_text(io.dumps(io.model_to_json(m)))
    code, out = run(["check", "--model", str(path), "-e", "E[] P(x)", "--assignment", '["a", "b"]', "--trace"])
    assert code == 0 and out["truth"] is True and len(out["trace"]) == 2
    code, out = run(["check", "--model", str(path), "-e", "E[] P(y)", "--assignment", '{"x": "a", "y": "b"}'])
    assert code == 1 and out["truth"] is False


def test_transform_and_bisim(tmp_path):
    m = DependenceModel(StandardModel.build(["a"], {"P": [("a",)]}), ("x", "y"), [("a", "a")])
    path = tmp_path / "m.json"
    path.write_text(io.dumps(io.model_to_json(m)))
    code, out = run(["transform", "distinguish", "--model", str(path), "--out", str(tmp_path / "d.json")])
    assert code == 0 and out["relation"] == [[["a", "a"], ["x:a", "y:a"]]]
    code, out = run(["bisim", str(path), str(tmp_path / "d.json")])
    assert code == 0 and out["bisimilar"]
    other = DependenceModel(StandardModel.build(["a"], {"P": []}, {"P": 1}), ("x", "y"), [("a", "a")])
    (tmp_path / "o.json").write_text(io.dumps(io.model_to_json(other)))
    assert run(["bisim", str(path), str(tmp_path / "o.json")])[0] == 1


def test_roundtrip_suite_report():
    code, out = run(["roundtrip", "--suite", "tr", "--seed", "7", "--n", "30"])
    assert code == 0
    assert out["seed"] == 7 and out["suites"][0]["instances"] > 0


def test_oracle_corpus_manifest(tmp_path):
    code, out = run(["oracle", "corpus", "--kind", "gf", "--count", "5", "--seed", "3", "--out", str(tmp_path)])
    assert code == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["seed"] == 3 and len(manifest["files"]) == 5


def test_exit_codes_for_usage_and_caps(monkeypatch):
    assert run(["sat"])[0] == 2
    assert run(["roundtrip", "--suite", "nope"])[0] == 2
    assert run(["sat", "-e", "P(x"])[0] == 2
    monkeypatch.setenv("LFDGF_CAPS", "closure=4")
    assert run(["sat", "-e", "E[] P(x)"])[0] == 3


def test_config_file(tmp_path):
    cfg = tmp_path / "lfdgf.toml"
    cfg.write_text('vars = "x,y"\n[caps]\nclosure = 8\n')
    code, out = run(["parse", "--config", str(cfg), "-e", "P(x)"])
    assert out["vars"] == ["x", "y"]
    assert run(["sat", "--config", str(cfg), "-e", "P(x)"])[0] == 3


def test_main_prints_json(capsys):
    assert main(["parse", "-e", "D[x] y"]) == 0
    assert json.loads(capsys.readouterr().out)["text"] == "D[x] y"
