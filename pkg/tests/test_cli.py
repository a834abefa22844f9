import json
import subprocess
import sys

import pytest

from kltbench import __version__
from kltbench.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_graph_coeff(capsys):
    code, out, _ = run(capsys, "graph", "[2,3,2^2]", "coeff")
    assert code == 0
    assert "actual=6/11" in out


def test_graph_gap(capsys):
    code, out, _ = run(capsys, "graph", "[2]", "gap")
    assert code == 0 and "actual=1/1" in out


def test_graph_all_json(capsys):
    code, out, _ = run(capsys, "--json", "graph", "[3,2]")
    data = json.loads(out)
    assert code == 0
    assert list(data) == ["version", "command", "checks", "summary"]
    assert data["version"] == __version__
    by_id = {c["id"]: c["actual"] for c in data["checks"]}
    assert by_id["coeff"] == "2/5"
    assert by_id["det"] == "5"
    # vertex order follows the normal form [2,3]
    assert by_id["discrepancies"] == "(1/5,2/5)"


def test_json_flag_after_subcommand(capsys):
    code, out, _ = run(capsys, "graph", "[3]", "gap", "--json")
    assert code == 0 and json.loads(out)["checks"][0]["actual"] == "2/3"


@pytest.mark.parametrize("argv", [
    ["graph", "[3"],
    ["graph", "[2;[2^2],[2^2],[2^2]]"],
    ["graph", "[2]", "volume"],
    ["table", "bogus"],
    ["table", "e35", "--g", "2"],
    ["table", "ksq", "--g", "99"],
    ["search", "D9"],
    ["search", "D1", "--workers", "0"],
    ["construct", "/nonexistent/script.dp"],
    ["curves", "verify-config", "--char", "4"],
    ["curves", "verify-config", "--char", "-3"],
    ["curves", "verify-config"],
    [],
    ["frobnicate"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_table_e35(capsys):
    code, out, _ = run(capsys, "table", "e35")
    assert code == 0
    assert out.strip().splitlines()[-1] == "117 pass, 0 fail, 0 skip (117 checks)"


def test_table_ksq_g2(capsys):
    code, out, _ = run(capsys, "table", "ksq", "--g", "2")
    assert code == 0 and "2/455" in out


def test_search_gen2(capsys):
    code, out, _ = run(capsys, "search", "GEN-2")
    assert code == 0 and "actual={}" in out


def test_search_d1_without_oracle(capsys):
    code, out, _ = run(capsys, "search", "D1", "--no-oracle")
    assert code == 0
    assert "oracle" not in out


def test_construct_bundled_fixture(capsys):
    code, out, _ = run(capsys, "construct", "charany_cusp_conic")
    assert code == 0 and "actual=1/11" in out
    code, out, _ = run(capsys, "construct", "char5_nt5_nu4.dp")
    assert code == 0 and "actual=5/77" in out


def test_construct_unknown_curve(capsys, tmp_path):
    f = tmp_path / "bad.dp"
    f.write_text("base p2\nblowup (Z:1)\n")
    code, _, err = run(capsys, "construct", str(f))
    assert code == 2 and "unknown curve" in err


def test_construct_failed_expectation_exits_1(capsys, tmp_path):
    f = tmp_path / "wrong.dp"
    f.write_text("base hirzebruch 2\ncurve s class 1 0\ncontract s\nexpect ksq 7\n")
    code, out, _ = run(capsys, "construct", str(f))
    assert code == 1 and "FAIL ksq" in out


def test_curves(capsys):
    code, out, _ = run(capsys, "curves", "verify-config", "--char", "5")
    assert code == 0
    assert "PASS M_u-tangent-to-Q" in out and "PASS L_su-tangent-to-Q-at-s" in out
    code, _, _ = run(capsys, "curves", "verify-config", "--char", "0")
    assert code == 0


def test_deterministic_output(capsys):
    first = run(capsys, "--json", "table", "ksq")
    second = run(capsys, "--json", "table", "ksq")
    assert first == second


def test_no_floats_in_reports(capsys):
    for argv in (["graph", "[2,3,2^3]"], ["table", "ksq"], ["curves", "verify-config", "--char", "2"]):
        _, out, _ = run(capsys, "--json", *argv)
        data = json.loads(out)
        for c in data["checks"]:
            for key in ("expected", "actual"):
                assert isinstance(c[key], str)
                assert "." not in c[key] or "[" in c[key]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kltbench", "graph", "[4,2]", "coeff"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "actual=4/7" in proc.stdout
