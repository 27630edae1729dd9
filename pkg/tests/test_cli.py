import json
import shlex

import pytest

from chainhorizon import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_member_outside(capsys):
    code, out, _ = run(capsys, "member", "--dim", "3", "--g", "1.5")
    assert code == 1
    assert json.loads(out)["region"] == "Outside"


def test_member_inside_and_boundary(capsys):
    assert run(capsys, "member", "--dim", "3", "--g", "1.0")[0] == 0
    assert run(capsys, "member", "--dim", "3", "--g", "1.4142135623730951")[0] == 2
    assert run(capsys, "member", "--dim", "6", "--g2", "5,8,9")[0] == 2


def test_member_both(capsys):
    code, out, _ = run(capsys, "member", "--dim", "8", "--g", "1,1,1,1", "--method", "both")
    doc = json.loads(out)
    assert doc["agree"] is True
    assert doc["criteria"]["region"] == doc["oracle"]["region"]
    assert code == 0


def test_spikes_csv(capsys):
    code, out, _ = run(capsys, "spikes", "--dim", "6")
    rows = [line for line in out.splitlines() if not line.startswith("#")]
    assert rows[0] == "n,g,g_squared"
    assert [r.split(",")[1] for r in rows[1:]] == ["2.2360679774997898", "2.8284271247461903", "3.0"]
    assert code == 0


def test_coeffs(capsys):
    code, out, _ = run(capsys, "coeffs", "--dim", "2", "--g", "0.5")
    doc = json.loads(out)
    assert doc["P"] == pytest.approx(0.75)
    assert doc["Q"] is None
    assert doc["meta"]["tolerances"]["cluster_tol"] == 1e-6


def test_spectrum(capsys):
    _, out, _ = run(capsys, "spectrum", "--dim", "6", "--g2", "5,8,9")
    doc = json.loads(out)
    assert doc["confluence"] == [3]
    assert len(doc["energies_re"]) == 6


def test_ansatz(capsys):
    _, out, _ = run(capsys, "ansatz", "--dim", "4", "--t", "0.05", "--G", "0,-1", "--interval", "1")
    doc = json.loads(out)
    assert doc["gammas"] == pytest.approx([0.05, 0.0475])
    assert doc["interval_width"] > 0


def test_dep(capsys):
    code, out, _ = run(capsys, "dep", "--c", "2.0")
    doc = json.loads(out)
    assert code == 0 and doc["count"] == 1
    (sol,) = doc["solutions"]
    assert sol["confluence"] == [1, 2] and sol["unequal_warning"] is False


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--dim", "6", "--samples", "500", "--seed", "4")
    doc = json.loads(out)
    assert code == 0
    assert doc["out_of_band"] == 0 and doc["meta"]["seed"] == 4
    assert "runtime_s" not in doc


def test_errors_are_json(capsys):
    for argv in (["member", "--dim", "3"], ["member", "--dim", "3", "--g", "1", "--nope"],
                 ["member", "--dim", "4", "--g", "1"], ["member", "--dim", "14", "--g", "1,1,1,1,1,1,1"],
                 ["dep", "--c", "0.5"], ["bogus"], ["member", "--dim", "3", "--g", "x"]):
        code, _, err = run(capsys, *argv)
        assert code == 3
        assert "error" in json.loads(err)


def test_tolerance_env_override(capsys, monkeypatch):
    monkeypatch.setenv("CHAINHORIZON_BOUNDARY_TOL", "0.1")
    code, out, _ = run(capsys, "member", "--dim", "2", "--g", "0.97")
    assert code == 2
    assert json.loads(out)["meta"]["tolerances"]["boundary_tol"] == 0.1
    code, _, _ = run(capsys, "member", "--dim", "2", "--g", "0.97", "--boundary-tol", "1e-9")
    assert code == 0


def test_trace_reproducible(capsys, tmp_path):
    out = tmp_path / "n4.csv"
    argv = ["trace", "--dim", "4", "--axes", "1,2", "--range", "0:4,0:4", "--res", "11,11", "--out", str(out)]
    assert run(capsys, *argv)[0] == 0
    first = out.read_bytes()
    lines = first.decode().splitlines()
    invocation = json.loads(lines[[l.startswith("# invocation") for l in lines].index(True)].split(": ", 1)[1])
    out.unlink()
    assert run(capsys, *shlex.split(invocation)[1:])[0] == 0
    assert out.read_bytes() == first
    header = [l for l in lines if not l.startswith("#")][0]
    assert header == "g1,g2,margin,method"


def test_trace_1d_negative_range(capsys):
    code, out, _ = run(capsys, "trace", "--dim", "2", "--axes", "1", "--range=-2:2", "--res", "11")
    assert code == 0
    body = [l for l in out.splitlines() if not l.startswith("#")][1:]
    assert [float(r.split(",")[0]) for r in body] == pytest.approx([-1.0, 1.0], abs=1e-9)


def test_fmt_round_trip():
    for x in (0.1, 1 / 3, 2.0 ** 0.5, 1e-300, 3.0):
        assert float(cli.fmt(x)) == x
