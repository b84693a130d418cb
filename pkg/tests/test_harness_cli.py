import json

import pytest

from rainbow_nibble import harness, io
from rainbow_nibble.cli import main
from rainbow_nibble.errors import ConfigInvalid, ParseError
from rainbow_nibble.graph import build_graph


@pytest.fixture
def single_edge(tmp_path):
    path = tmp_path / "one.ecg"
    io.write_atomic(path, io.format_ecg(build_graph(2, [(0, 1, 0)])))
    return path


def test_single_edge_campaign(single_edge):
    cfg = {"algorithm": "thm1", "trials": 1, "graph_file": str(single_edge),
           "params": {"eps": 0.5, "delta": 0.5, "eta": 0.0}}
    summary, trials = harness.run_campaign(cfg)
    assert summary["success_rate"] == 1.0 and trials[0]["valid"]


def test_campaign_is_deterministic(tmp_path):
    cfg = {"algorithm": "thmq", "trials": 2, "base_seed": 4,
           "instance": {"kind": "random-thmq", "q": 40, "eps": 0.25},
           "params": {"delta": 0.02, "error_scale": 1e-3}}
    a = harness.run_campaign(dict(cfg, out_dir=str(tmp_path / "a")))
    b = harness.run_campaign(dict(cfg, workers=2, out_dir=str(tmp_path / "b")))
    assert harness.canonical_json(a[0]) == harness.canonical_json(b[0])
    for name in ("summary.json", "trial-0000.json", "trial-0001.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_config_errors():
    with pytest.raises(ConfigInvalid):
        harness.CampaignConfig.from_dict({"algorithm": "thm1", "bogus": 1})
    with pytest.raises(ConfigInvalid):
        harness.run_campaign({"algorithm": "nope", "instance": {"kind": "cyclic-latin", "n": 3}})
    with pytest.raises(ConfigInvalid):
        harness.run_campaign({"algorithm": "thm1"})


def test_worker_cap(monkeypatch):
    monkeypatch.setenv("RNM_WORKERS", "2")
    assert harness.worker_count(8) == 2
    assert harness.worker_count() == 2
    monkeypatch.setenv("RNM_WORKERS", "x")
    with pytest.raises(ConfigInvalid):
        harness.worker_count()


def write(path, text):
    path.write_text(text)
    return str(path)


def test_verify_files(tmp_path, capsys):
    g = write(tmp_path / "g.ecg", io.format_ecg(build_graph(4, [(0, 1, 0), (2, 3, 0), (1, 2, 1)])))
    assert harness.verify_files(g, write(tmp_path / "ok.rmm", "m 0 0\n")) == 0
    bad = write(tmp_path / "bad.rmm", "m 0 0\nm 1 0\n")
    assert main(["verify", g, bad]) == 1
    assert "color violation" in capsys.readouterr().out
    with pytest.raises(ParseError):
        harness.verify_files(g, write(tmp_path / "idx.rmm", "m 9 0\n"))


def test_cli_round_trip(tmp_path, capsys):
    g = str(tmp_path / "g.ecg")
    assert main(["gen", "random-thm3", "--q", "40", "--eps", "0.5", "--seed", "1", "-o", g]) == 0
    m, rep, traj = (str(tmp_path / x) for x in ("m.rmm", "r.json", "t.csv"))
    code = main(["solve", g, "--alg", "thm3", "--eps", "0.5", "--set", "error_scale=4.1e-4",
                 "--set", "error_growth=1.2", "-o", rep, "--matching", m, "--traj", traj])
    assert code == 0
    assert main(["verify", g, m]) == 0
    assert json.loads(open(rep).read())["outcome"] == "full"
    assert main(["traj", rep, "-o", str(tmp_path / "again.csv")]) == 0
    assert open(traj).read() == open(tmp_path / "again.csv").read()


def test_cli_oracle(tmp_path, capsys):
    g = str(tmp_path / "p.ecg")
    main(["gen", "prop2-counterexample", "--t", "4", "-o", g])
    capsys.readouterr()
    assert main(["oracle", g, "--witness", str(tmp_path / "w.rmm")]) == 0
    assert capsys.readouterr().out.startswith("max=3 exact=True")
    assert main(["oracle", g, "--k", "4"]) == 1
    assert main(["verify", g, str(tmp_path / "w.rmm")]) == 0


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["verify", str(tmp_path / "missing.ecg"), "x.rmm"]) == 2
    g = str(tmp_path / "p.ecg")
    main(["gen", "prop2-counterexample", "--t", "4", "-o", g])
    assert main(["solve", g, "--alg", "thmq", "--q", "4", "--eps", "0.3"]) == 1
    assert main(["solve", g, "--alg", "thmq", "--set", "nokey"]) == 2
    assert main(["gen", "prop2-counterexample", "--t", "3"]) == 2


def test_cli_ideal_curves(capsys):
    assert main(["traj", "--kind", "thm1", "--q", "400", "--eps", "0.5", "--delta", "0.05",
                 "--eta", "0.6", "--error-scale", "0.05"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("t,x,s_ideal") and len(lines) == 14
