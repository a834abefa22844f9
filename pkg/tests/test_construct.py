from fractions import Fraction
import json

import pytest

from kltbench import acceptance, construct, lattice
from kltbench.construct import ConstructionError, run_script

WEIGHTED_P2 = """
base hirzebruch 3
curve s class 1 0
curve f class 0 1
contract s
expect dynkin "[3]"
expect ksq 25/3
expect degree f 5/3
expect rank 1
expect ldp true
"""


def test_weighted_plane_script():
    res = run_script(WEIGHTED_P2)
    assert res.report.ok
    ids = [c.id for c in res.report.checks]
    assert ids == ["dynkin", "ksq", "degree/f", "rank", "ldp", "noether"]


def test_failed_expectation_is_reported():
    res = run_script(WEIGHTED_P2.replace("25/3", "8"))
    assert not res.report.ok
    assert [c.id for c in res.report.checks if c.status == "fail"] == ["ksq"]


def test_plane_script_with_blowups():
    script = """
    base p2
    curve L class 1
    blowup (L:1) as a
    blowup (L:1)
    blowup (L:1, a:1) as c   # the point L.a, which separates them
    expect selfint L -2
    expect selfint a -2
    expect genus L 0
    contract L, a
    expect rank 2
    expect ldp false
    """
    res = run_script(script)
    assert res.report.ok
    assert str(lattice.dynkin_type(res.model)) == "2[2]"
    # rank 2, so the Noether line is not added
    assert "noether" not in [c.id for c in res.report.checks]


def test_blowup_along_and_through():
    script = """
    base p2
    curve C class 2
    curve T class 1
    blowup_along C x2 mults 1,1 as u through T:1,0
    expect selfint u1 -2
    expect selfint T 0
    """
    res = run_script(script)
    assert res.report.ok
    assert lattice.pairing(res.state, "T", "u2") == 0


def test_abstract_base_relative_path(tmp_path):
    (tmp_path / "f2.json").write_text(json.dumps(
        {"basis": ["s", "f"], "gram": [[-2, 1], [1, 0]], "canonical": [-2, -4]}))
    script = tmp_path / "cone.dp"
    script.write_text("base abstract f2.json\ncurve s class 1 0\ncontract s\nexpect ksq 8\nexpect ldp false\n")
    res = construct.run_file(script)
    # no other curve is declared, so degree positivity is vacuous and rank 1 holds
    assert [c.status for c in res.report.checks if c.id == "ksq"] == ["pass"]


def test_invalid_contraction_is_a_failed_check():
    res = run_script("base p2\ncurve L class 1\ncontract L\n")
    assert not res.report.ok
    assert res.model is None


@pytest.mark.parametrize("script, fragment", [
    ("", "no base"),
    ("curve C class 1", "no base"),
    ("base p2\nbase p2", "twice"),
    ("base moon", "unknown base"),
    ("base p2\nfrobnicate", "unknown statement"),
    ("base p2\nblowup (Z:1)", "unknown curve"),
    ("base p2\ncurve C class 1\nblowup C:1", "expected: blowup"),
    ("base p2\ncurve C class 1\nblowup (C=1)", "bad incidence"),
    ("base p2\ncurve C class 1\nexpect ksq 1", "contract"),
    ("base p2\ncurve C class 1\ncontract Z", "unknown curve"),
    ("base p2\nexpect nonsense", "unknown expectation"),
    ("base p2\ncurve C class x", "integers"),
    ("base p2\ncurve C class 1\nblowup_along C 3", "xR"),
    ("base abstract /nonexistent/base.json", "cannot read"),
])
def test_syntax_errors(script, fragment):
    with pytest.raises(ConstructionError) as info:
        run_script(script)
    assert fragment in str(info.value)


def test_error_carries_line_number():
    with pytest.raises(ConstructionError) as info:
        run_script("base p2\n\n# comment\nblowup (Z:1)\n")
    assert info.value.line == 4


def test_missing_file():
    with pytest.raises(ConstructionError):
        construct.run_file("/nonexistent.dp")


@pytest.mark.parametrize("name", acceptance.FIXTURES)
def test_bundled_fixtures(name):
    dyn, curve, degree = acceptance.FIXTURE_EXPECT[name]
    res = acceptance.run_fixture(name)
    assert res.report.ok, res.report.to_text()
    assert str(lattice.dynkin_type(res.model)) == str(acceptance.parse_dynkin(dyn))
    assert lattice.anticanonical_degree(res.model, curve) == degree
    noether = [c for c in res.report.checks if c.id == "noether"]
    assert len(noether) == 1 and noether[0].actual == "9/1"
    ok, _ = lattice.is_rank_one_log_dp(res.model)
    assert ok


def test_fixture_ksq_values():
    expect = {
        "char2_cusp_conic": Fraction(2, 21),
        "charany_cusp_conic": Fraction(1, 143),
        "char5_nt5_nu3": Fraction(2, 15),
        "char5_nt6_nu3": Fraction(2, 455),
        "char5_nt5_nu4": Fraction(5, 231),
        "nodal_cubic": Fraction(1, 22),
    }
    for name, ksq in expect.items():
        assert lattice.anticanonical_selfint(acceptance.run_fixture(name).model) == ksq
