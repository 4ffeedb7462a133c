import json

import pytest

from centangle.cli import main
from centangle.statevec import basis_state, bell_state, ghz_state, save_state


@pytest.fixture
def states(tmp_path):
    paths = {}
    for name, state in (("ghz5", ghz_state(5)), ("bell", bell_state()), ("prod", basis_state(3)),
                        ("ghz4", ghz_state(4))):
        paths[name] = tmp_path / f"{name}.json"
        save_state(state, paths[name])
    return paths


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    assert code == 0
    data = json.loads(out)
    assert data["schema_version"] == 1
    return data


def test_ce_command(capsys, states):
    d = run_json(capsys, "ce", states["ghz5"])
    assert d["ce"] == pytest.approx(0.46875)
    assert not d["certification"]["gme_certified"]
    d = run_json(capsys, "ce", states["bell"])
    assert d["ce"] == pytest.approx(0.25)
    assert d["certification"]["gme_certified"]
    assert d["certification"]["excluded"] == ["1x1"]
    d = run_json(capsys, "ce", states["prod"], "--distribution")
    assert d["ce"] == pytest.approx(0.0, abs=1e-12)
    assert d["certification"]["excluded"] == []
    assert d["distribution"] == {"000": pytest.approx(1.0)}


def test_ce_validation_errors(capsys, tmp_path, states):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 2, "amps": [[1, 0]]}')
    assert main(["ce", str(bad)]) == 2
    assert main(["ce", str(tmp_path / "missing.json")]) == 2
    assert main(["ce", str(states["ghz5"]), "--max-n", "4"]) == 2


def test_swaptest_command(capsys, states, tmp_path):
    samples = tmp_path / "s.txt"
    d = run_json(capsys, "swaptest", states["ghz4"], "--shots", 500, "--seed", 3,
                 "--samples-out", samples)
    for key in ("ce_estimate", "p0", "excluded_rank", "bell_mean", "samples_path"):
        assert key in d
    lines = samples.read_text().split()
    assert len(lines) == 500 and all(len(s) == 4 and s.count("1") % 2 == 0 for s in lines)
    assert d["p0"] == pytest.approx(1 - 0.4375)


def test_outputs_are_byte_identical(capsys, states):
    a = run(capsys, "swaptest", states["ghz4"], "--shots", 200, "--seed", 9)
    b = run(capsys, "--seed", 9, "swaptest", states["ghz4"], "--shots", 200)
    assert a == b
    assert run(capsys, "haar", "--n", 4, "--samples", 200) == run(capsys, "haar", "--n", 4, "--samples", 200)


def test_hierarchy_csv(capsys):
    code, out = run(capsys, "hierarchy", "--n", 5, "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "structure,zeta_star"
    assert lines[1:3] == ["5,0.625", "3x2,0.53125"]


def test_hierarchy_json_flags_loose_rows(capsys):
    d = run_json(capsys, "hierarchy", "--n", 8)
    loose = [r["structure"] for r in d["rows"] if r["loose"]]
    assert loose == ["7x1"]


def test_certify_command(capsys):
    d = run_json(capsys, "certify", "--n", 5, "--ce", 0.6)
    assert d["gme_certified"]
    d = run_json(capsys, "certify", "--n", 5, "--ce", 0.9, "--purity", 0.99)
    assert all(c["excluded"] for c in d["mixed_cuts"])
    assert main(["certify", "--n", "5", "--ce", "2"]) == 2


def test_lp_commands(capsys):
    d = run_json(capsys, "lp", "cmax", "--n", 7)
    assert d["ce_bound"]["exact"] == "399/512" and d["certified"]
    d = run_json(capsys, "lp", "bell", "--n", 9)
    assert d["optimal_value"]["exact"] == "9/4"
    d = run_json(capsys, "lp", "bound", "--n", 2, "--enumerator", "1,0,3")
    assert d["holds"] and not d["general_form"]
    assert main(["lp", "cmax", "--n", "40"]) == 2
    assert main(["lp", "bound", "--n", "3", "--enumerator", "1,0"]) == 2


def test_graph_commands(capsys, tmp_path):
    g = tmp_path / "g.json"
    g.write_text(json.dumps({"n": 2, "edges": [[0, 1]]}))
    d = run_json(capsys, "graph", "ce", "--graph", g)
    assert d["ce"]["exact"] == "1/4" and d["A"] == [1, 0, 3] and d["type"] == "II"
    d = run_json(capsys, "graph", "search", "--n", 5)
    assert d["best_ce"]["exact"] == "5/8" and d["mode"] == "exhaustive"
    d = run_json(capsys, "graph", "search", "--n", 5, "--random", "--iters", 3, "--seed", 1)
    assert d["mode"] == "random"


def test_haar_command(capsys, tmp_path):
    hist = tmp_path / "h.csv"
    d = run_json(capsys, "haar", "--n", 5, "--samples", 500, "--seed", 2, "--hist", hist)
    assert d["samples"] == 500 and 0 <= d["frac_below_threshold"] <= 1
    assert hist.read_text().startswith("bin,count")


def test_reproduce_exit_codes(capsys, tmp_path):
    assert main(["reproduce", "table1", "table2", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "table1.csv").exists()
    assert main(["reproduce", "sm_lp", "--out", str(tmp_path)]) == 3
    out = capsys.readouterr().out
    assert "sm_lp: MISMATCH" in out and "n=24" in out


def test_bad_arguments_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["reproduce", "nonsense"])
    assert exc.value.code == 2
