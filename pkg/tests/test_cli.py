import json
import re
import subprocess
import sys
from importlib import resources

import jsonschema
import numpy as np
import pytest

from branchforge import cli
from branchforge.scenarios import SCENARIOS, ClaimSpec, Scenario, Study


def run(argv, capsys=None):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr() if capsys else None
    return code, out


@pytest.fixture(scope="module")
def schema():
    return json.loads(resources.files("branchforge").joinpath("data/tree.schema.json").read_text())


@pytest.mark.parametrize("N,line", [(9, "N=9 trunks=1 branches=30 primary=28"),
                                    (1, "N=1 trunks=1 branches=0 primary=0"),
                                    (4, "N=4 trunks=1 branches=3 primary=3")])
def test_tree_stats_and_schema(tmp_path, capsys, schema, N, line):
    code, out = run(["tree", "--truncation", N, "--out", tmp_path], capsys)
    assert code == 0 and out.out.strip() == line
    doc = json.loads((tmp_path / "tree.json").read_text())
    jsonschema.validate(doc, schema)
    assert doc["truncation"] == N
    for e in doc["elements"]:
        header = (tmp_path / e["file"]).read_text().splitlines()[0].split(",")
        assert header[:2] == ["omega", "energy"]
        assert header[2:] == [f"a_{m}_{n}" for m, n in e["type"]]


def test_tree_json_only(tmp_path, capsys, schema):
    code, _ = run(["tree", "--truncation", 3, "--format", "json", "--out", tmp_path], capsys)
    assert code == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["run-info.json", "tree.json"]
    jsonschema.validate(json.loads((tmp_path / "tree.json").read_text()), schema)


def test_tree_outputs_deterministic(tmp_path, capsys):
    for d in ("a", "b"):
        assert run(["tree", "--truncation", 5, "--out", tmp_path / d], capsys)[0] == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert "run-info.json" in names
    for name in names:
        if name != "run-info.json":
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_tree_threads_env(tmp_path, capsys, monkeypatch):
    assert run(["tree", "--truncation", 6, "--out", tmp_path / "serial"], capsys)[0] == 0
    monkeypatch.setenv("BRANCHFORGE_THREADS", "4")
    assert run(["tree", "--truncation", 6, "--out", tmp_path / "threads"], capsys)[0] == 0
    assert (tmp_path / "serial" / "tree.json").read_bytes() == (tmp_path / "threads" / "tree.json").read_bytes()
    monkeypatch.setenv("BRANCHFORGE_THREADS", "many")
    assert run(["tree", "--truncation", 6, "--out", tmp_path / "bad"], capsys)[0] == 2


def test_tree_bad_flags(tmp_path, capsys):
    assert run(["tree", "--truncation", "abc", "--out", tmp_path], capsys)[0] == 2
    assert run(["tree", "--out", tmp_path], capsys)[0] == 2
    assert run(["tree", "--truncation", 3], capsys)[0] == 2
    assert run(["tree", "--truncation", 3, "--omega-max", 0.5, "--out", tmp_path], capsys)[0] == 2
    assert run(["nosuch"], capsys)[0] == 2


def test_tree_config_file(tmp_path, capsys):
    conf = tmp_path / "tree.conf"
    conf.write_text("# N-reducible tree\ntruncation = 4\nmax-order = 3\nsamples = 10   # short curves\n")
    code, out = run(["tree", "--config", conf, "--out", tmp_path / "o"], capsys)
    assert code == 0 and out.out.strip() == "N=4 trunks=1 branches=3 primary=3"
    assert len((tmp_path / "o" / "element_000.csv").read_text().splitlines()) == 11
    # flags win over the file
    code, out = run(["tree", "--config", conf, "--truncation", 3, "--out", tmp_path / "p"], capsys)
    assert out.out.startswith("N=3 ")
    conf.write_text("truncation = 4\ncolour = red\n")
    assert run(["tree", "--config", conf, "--out", tmp_path / "q"], capsys)[0] == 2
    conf.write_text("truncation = four\n")
    assert run(["tree", "--config", conf, "--out", tmp_path / "q"], capsys)[0] == 2
    assert run(["tree", "--config", tmp_path / "missing.conf", "--out", tmp_path / "q"], capsys)[0] == 1


def test_tree_io_failure(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert run(["tree", "--truncation", 3, "--out", blocker / "sub"], capsys)[0] == 1


def test_trace_one_mode_matches_closed_form(tmp_path, capsys):
    code, out = run(["trace", "--system", "modes:(0,0)", "--omega0", 1.5, "--out", tmp_path], capsys)
    assert code == 0 and out.out.startswith("points=")
    lines = (tmp_path / "curve.csv").read_text().splitlines()
    assert lines[0] == "s,omega,energy,residual_norm,a_0_0"
    data = np.loadtxt(tmp_path / "curve.csv", delimiter=",", skiprows=1, ndmin=2)
    assert data[0, 1] == 1.5
    assert np.max(np.abs(data[:, 4] - 4 / 3 * np.sqrt(data[:, 1] ** 2 - 1))) < 1e-8
    assert np.all(data[:, 3] < 1e-10)
    markers = json.loads((tmp_path / "markers.json").read_text())["markers"]
    assert markers[-1]["kind"] == "window-exit"


def test_trace_truncated_three(tmp_path, capsys):
    code, out = run(["trace", "--system", "truncated:3", "--out", tmp_path], capsys)
    assert code == 0
    header = (tmp_path / "curve.csv").read_text().splitlines()[0].split(",")
    assert header[:4] == ["s", "omega", "energy", "residual_norm"] and len(header) == 4 + 9
    kinds = [m["kind"] for m in json.loads((tmp_path / "markers.json").read_text())["markers"]]
    assert "fold" in kinds and "closed-loop" in kinds


def test_trace_errors(tmp_path, capsys):
    assert run(["trace", "--system", 'modes:(0,0),(1,2),(0,1),(1,2)', "--out", tmp_path], capsys)[0] == 2
    assert run(["trace", "--system", "bogus:3", "--out", tmp_path], capsys)[0] == 2
    assert run(["trace", "--system", "truncated:x", "--out", tmp_path], capsys)[0] == 2
    assert run(["trace", "--out", tmp_path], capsys)[0] == 2
    assert run(["trace", "--system", "modes:(0,0)", "--omega0", 0.5, "--out", tmp_path], capsys)[0] == 3
    assert run(["trace", "--system", "modes:(0,0)", "--trunk-mode", "(1,1)", "--out", tmp_path], capsys)[0] == 2


def test_trace_config_and_start_file(tmp_path, capsys):
    conf = tmp_path / "trace.conf"
    conf.write_text("max_step = 0.02\nomega_max = 2.0\nomega0 = 1.2\n")
    assert run(["trace", "--system", "truncated:2", "--config", conf, "--out", tmp_path / "a"], capsys)[0] == 0
    data = np.loadtxt(tmp_path / "a" / "curve.csv", delimiter=",", skiprows=1)
    assert data[0, 1] == 1.2 and np.all(np.diff(data[:, 0]) <= 0.02 * 1.5)
    # restart from the written curve
    assert run(["trace", "--system", "truncated:2", "--start", tmp_path / "a" / "curve.csv", "--config", conf,
                "--out", tmp_path / "b"], capsys)[0] == 0
    assert (tmp_path / "a" / "curve.csv").read_bytes() == (tmp_path / "b" / "curve.csv").read_bytes()
    far = tmp_path / "far.csv"
    far.write_text("omega,a_0_0,a_0_1,a_1_0,a_1_1\n1.2,1e9,1e9,-1e9,1e9\n")
    assert run(["trace", "--system", "truncated:2", "--start", far, "--out", tmp_path / "c"], capsys)[0] == 3
    missing = tmp_path / "cols.csv"
    missing.write_text("omega,a_0_0\n1.2,0.5\n")
    assert run(["trace", "--system", "truncated:2", "--start", missing, "--out", tmp_path / "c"], capsys)[0] == 2
    conf.write_text("max_stepp = 0.02\n")
    assert run(["trace", "--system", "truncated:2", "--config", conf, "--out", tmp_path / "c"], capsys)[0] == 2
    conf.write_text("min_step = 0.5\n")
    assert run(["trace", "--system", "truncated:2", "--config", conf, "--out", tmp_path / "c"], capsys)[0] == 2


def polylines(svg):
    return [[tuple(map(float, p.split(","))) for p in m.split()] for m in re.findall(r'points="([^"]*)"', svg)]


def test_plot_round_trip_and_determinism(tmp_path, capsys):
    assert run(["tree", "--truncation", 3, "--out", tmp_path / "t"], capsys)[0] == 0
    assert run(["trace", "--system", "truncated:3", "--out", tmp_path / "c"], capsys)[0] == 0
    inputs = sorted((tmp_path / "t").glob("element_*.csv")) + [tmp_path / "c" / "curve.csv"]
    for name in ("a.svg", "b.svg"):
        assert run(["plot", "--in", *inputs, "--out", tmp_path / name, "--title", "N=3"], capsys)[0] == 0
    a = (tmp_path / "a.svg").read_text()
    assert a == (tmp_path / "b.svg").read_text()
    assert len(polylines(a)) == 3 and ">Ω</text>" in a and ">E</text>" in a
    assert "<circle" in a  # bifurcation and loop markers from markers.json
    assert 'stroke="#1f4e9e"' in a  # primary trunk styled from tree.json


def test_plot_single_trunk_is_monotone_from_one(tmp_path, capsys):
    assert run(["tree", "--truncation", 1, "--out", tmp_path / "t"], capsys)[0] == 0
    assert run(["plot", "--in", tmp_path / "t" / "element_000.csv", "--out", tmp_path / "p.svg"], capsys)[0] == 0
    (line,) = polylines((tmp_path / "p.svg").read_text())
    xs, ys = np.array(line).T
    assert np.all(np.diff(xs) > 0) and np.all(np.diff(ys) <= 0)  # SVG y grows downwards
    data = np.loadtxt(tmp_path / "t" / "element_000.csv", delimiter=",", skiprows=1)
    assert data[0, 0] == 1.0


def test_plot_errors(tmp_path, capsys):
    good = tmp_path / "good.csv"
    good.write_text("omega,energy\n1.0,0.0\n2.0,3.0\n")
    bad = tmp_path / "bad.csv"
    bad.write_text("omega,energy\n1.0,abc\n")
    ragged = tmp_path / "ragged.csv"
    ragged.write_text("omega,energy\n1.0\n")
    nocols = tmp_path / "nocols.csv"
    nocols.write_text("x,y\n1,2\n")
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    out = tmp_path / "p.svg"
    for f in (bad, ragged, nocols, empty):
        assert run(["plot", "--in", f, "--out", out], capsys)[0] == 2
    assert run(["plot", "--in", good, "--out", out, "--window", "2,1,0,5"], capsys)[0] == 2
    assert run(["plot", "--in", good, "--out", out, "--window", "1,2,3,3"], capsys)[0] == 2
    assert run(["plot", "--in", good, "--out", out, "--window", "1,2,3"], capsys)[0] == 2
    assert run(["plot", "--in", tmp_path / "missing.csv", "--out", out], capsys)[0] == 1
    assert run(["plot", "--in", good, "--out", out, "--window", "1,2,0,5"], capsys)[0] == 0


def test_plot_scenario_overlay(tmp_path, capsys):
    assert run(["scenario", "--id", "fig2", "--out", tmp_path], capsys)[0] == 0
    report = json.loads((tmp_path / "report.json").read_text())
    csvs = [tmp_path / a for a in report["artifacts"] if a.endswith(".csv")]
    assert csvs
    assert run(["plot", "--in", *csvs, "--out", tmp_path / "s.svg"], capsys)[0] == 0
    assert len(polylines((tmp_path / "s.svg").read_text())) >= len(csvs)


@pytest.mark.parametrize("sid", ["appendix-case1", "fig6-perturbation"])
def test_scenario_pass(tmp_path, capsys, sid):
    code, out = run(["scenario", "--id", sid, "--out", tmp_path], capsys)
    assert code == 0 and "FAIL" not in out.out
    assert json.loads((tmp_path / "report.json").read_text())["pass"] is True
    if sid == "fig6-perturbation":
        assert "PASS pert_loop" in out.out


def test_scenario_unknown(tmp_path, capsys):
    assert run(["scenario", "--id", "nosuch", "--out", tmp_path], capsys)[0] == 2


def test_scenario_failing_claim(tmp_path, capsys, monkeypatch):
    bad = Scenario("broken", "always fails", (ClaimSpec("x", "one equals two", "test", 2),), lambda: Study({"x": 1}))
    monkeypatch.setitem(SCENARIOS, "broken", bad)
    code, out = run(["scenario", "--id", "broken", "--out", tmp_path], capsys)
    assert code == 4 and "FAIL x" in out.out
    assert json.loads((tmp_path / "report.json").read_text())["pass"] is False


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "branchforge", "tree", "--truncation", "3", "--out", str(tmp_path)],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "N=3 trunks=1 branches=1 primary=1"
    res = subprocess.run([sys.executable, "-m", "branchforge", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "branchforge" in res.stdout
