import csv
import io
import json
import math

import pytest

from rrkernel import cli
from rrkernel.qseries import rr


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_eval_rr():
    code, out, _ = run("eval", "rr", "--q", "0.1")
    assert code == 0
    d = json.loads(out)
    assert d["value"] == pytest.approx(float(rr(0.1)), rel=1e-15)
    assert d["err_estimate"] >= 0


def test_eval_K_and_BR():
    assert json.loads(run("eval", "K", "--k", "0")[1])["value"] == pytest.approx(math.pi / 2)
    assert json.loads(run("eval", "BR", "--a", "2")[1])["value"] == pytest.approx(1.0)
    assert json.loads(run("eval", "sn", "--u=0.3", "--k=0")[1])["value"] == pytest.approx(
        math.sin(0.3))


def test_eval_quadrature_error_estimate():
    d = json.loads(run("eval", "F1_inv", "--y", "0.3")[1])
    assert 0 <= d["err_estimate"] <= 1e-10


def test_eval_errors():
    assert run("eval", "nope", "--q", "0.1")[0] == 2
    assert run("eval", "rr", "--x", "0.1")[0] == 2
    assert run("eval", "rr", "--q", "1.5")[0] == 2
    assert run("eval", "rr", "--q")[0] == 2
    assert run("eval")[0] == 2
    code, out, _ = run("eval", "--list")
    assert code == 0 and "BR: --a" in out


def test_verify_pass_and_summary():
    code, out, _ = run("verify", "EQ6")
    assert code == 0
    assert out.count("[PASS] EQ6(") == 18
    assert "18/18 identities passed" in out


def test_verify_omega2_and_probe():
    assert run("verify", "OMEGA2-ALG")[0] == 0
    code, out, _ = run("verify", "EQ41")
    assert code == 0 and "passing reading: modulus" not in out  # notes are in JSON only
    code, out, _ = run("verify", "EQ41", "--out", "-")
    assert "passing reading: modulus" in json.loads(out)["identities"][0]["notes"]


def test_verify_failure_exit_code():
    code, out, _ = run("verify", "EQ3", "--tol", "1e-300")
    assert code == 1
    assert "[FAIL]" in out


def test_verify_unknown_id():
    code, _, err = run("verify", "NOPE")
    assert code == 2 and "NOPE" in err


def test_verify_json_and_csv_files(tmp_path):
    js, cs = tmp_path / "r.json", tmp_path / "r.csv"
    code, _, _ = run("verify", "EQ21", "C-VALUE", "--out", str(js), "--csv", str(cs),
                     "--timing")
    assert code == 0
    d = json.loads(js.read_text())
    assert d["schema_version"] == 1
    assert [r["id"] for r in d["identities"]] == ["C-VALUE"] + ["EQ21"] * 3
    assert all("wall_s" in r for r in d["identities"])
    rows = list(csv.reader(cs.open()))
    assert rows[0][-1] == "wall_s" and len(rows) == 5


def test_verify_json_stable(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run("verify", "EQ21", "OMEGA-COMP", "--out", str(a), "--quiet")
    run("verify", "OMEGA-COMP", "EQ21", "--out", str(b), "--quiet")
    assert a.read_bytes() == b.read_bytes()


def test_verify_list():
    code, out, _ = run("verify", "--list")
    assert code == 0 and "EQ55" in out and "probe" in out


def test_solve_quintic():
    code, out, _ = run("solve", "quintic", "--a", "0.5")
    d = json.loads(out)
    assert code == 0 and d["residual"] <= 1e-8
    assert "m_G(a)" in d["trace"]


def test_solve_sin():
    d = json.loads(run("solve", "sin", "--a", "0.2")[1])
    assert abs(d["root"] - math.asin(0.2)) <= 1e-6
    assert "m0" in d["trace"]


def test_solve_out_of_range():
    code, _, err = run("solve", "quintic", "--a", "3")
    assert code == 2 and "OutOfRange" in err
    assert run("solve", "nope", "--a", "0.1")[0] == 2


def test_table_kr():
    code, out, _ = run("table", "kr", "--r", "1,2,3,4")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["r", "k_r", "kp_r"] and len(rows) == 5
    assert float(rows[1][1]) == pytest.approx(1 / math.sqrt(2), rel=1e-14)
    assert float(rows[4][1]) == pytest.approx(3 - 2 * math.sqrt(2), rel=1e-13)


def test_table_omega_range_grid():
    code, out, _ = run("table", "omega", "--n", "2", "--x", "0.1:0.5:0.1")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and len(rows) == 6
    assert [float(r[0]) for r in rows[1:]] == [0.1, 0.2, 0.3, 0.4, 0.5]


def test_table_empty_grid_is_header_only(tmp_path):
    code, out, _ = run("table", "br", "--a", "")
    assert code == 0 and out == "a,BR\n"
    path = tmp_path / "t.csv"
    assert run("table", "omega", "--out", str(path))[0] == 0
    assert path.read_text() == "x,n,omega_n\n"


def test_table_qn_out_of_range_cells_are_nan():
    code, out, _ = run("table", "qn", "--n", "0.5,2", "--A", "1")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and len(rows) == 3
    # 2 m_inv(1) exceeds the quintic weight's supremum
    assert math.isfinite(float(rows[1][2])) and math.isnan(float(rows[2][2]))


def test_table_unknown():
    assert run("table", "nope")[0] == 2


def test_parse_grid():
    assert cli.parse_grid("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert cli.parse_grid("1, 2,3") == [1.0, 2.0, 3.0]
    assert cli.parse_grid("") == [] and cli.parse_grid(None) == []
    with pytest.raises(ValueError):
        cli.parse_grid("0:1")


def test_usage_errors():
    assert run()[0] == 2
    assert run("bogus")[0] == 2
    assert run("solve", "quintic")[0] == 2
    assert run("verify", "EQ3", "--frobnicate")[0] == 2


def test_env_mirror(monkeypatch, tmp_path):
    path = tmp_path / "env.json"
    monkeypatch.setenv("RRKERNEL_OUT", str(path))
    monkeypatch.setenv("RRKERNEL_REL_TOL", "1e-9")
    monkeypatch.setenv("RRKERNEL_TAIL_EPS", "1e-16")
    assert run("verify", "C-VALUE", "--quiet")[0] == 0
    cfg = json.loads(path.read_text())["config"]
    assert cfg["rel_tol"] == 1e-9 and cfg["tail_eps"] == 1e-16
    # explicit flags win over the environment
    run("verify", "C-VALUE", "--quiet", "--rel-tol", "1e-8")
    assert json.loads(path.read_text())["config"]["rel_tol"] == 1e-8


def test_inconsistent_config_is_usage_error(monkeypatch):
    monkeypatch.setenv("RRKERNEL_TAIL_EPS", "1e-13")
    code, _, err = run("verify", "C-VALUE", "--quiet")
    assert code == 2 and "tail_eps" in err


def test_global_flags_reach_quadrature(tmp_path):
    path = tmp_path / "q.json"
    code, _, _ = run("verify", "EQ55", "--rel-tol", "1e-11", "--abs-tol", "1e-13",
                     "--max-refinements", "10", "--tail-eps", "1e-14", "--out", str(path),
                     "--quiet")
    assert code == 0
    assert json.loads(path.read_text())["config"]["max_refinements"] == 10
