from fractions import Fraction
import json

import pytest
from hypothesis import given, strategies as st

from kltbench import lattice as lt
from kltbench.dualgraph import DynkinType, gap


def p2_with_line_and_points(k):
    st_ = lt.declare_curve(lt.new_surface(), "L", (1,))
    for i in range(k):
        st_ = lt.blow_up(st_, [("L", 1)], f"e{i + 1}")
    return st_


def test_plane_basics():
    s = lt.new_surface()
    assert lt.canonical_selfint(s) == 9
    s = lt.declare_curve(s, "C", (3,), expected_genus=1)
    assert lt.k_degree(s, "C") == -9
    with pytest.raises(lt.LatticeError):
        lt.declare_curve(s, "D", (2,), expected_genus=1)
    with pytest.raises(lt.LatticeError):
        lt.declare_curve(s, "C", (1,))


def test_plane_class_helper():
    s = p2_with_line_and_points(2)
    assert lt.plane_class(s, 2, [1, 1]) == (2, -1, -1)
    with pytest.raises(lt.LatticeError):
        lt.plane_class(s, 2, [1, 1, 1])
    f = lt.new_surface(lt.hirzebruch(1))
    with pytest.raises(lt.LatticeError):
        lt.plane_class(f, 1)


def test_blow_up_updates_classes():
    s = p2_with_line_and_points(3)
    assert lt.self_int(s, "L") == -2
    assert lt.canonical_selfint(s) == 6
    assert lt.self_int(s, "e1") == -1 and lt.k_degree(s, "e1") == -1
    assert lt.pairing(s, "L", "e2") == 1
    assert lt.genus(s, "L") == 0


def test_blow_up_errors():
    s = p2_with_line_and_points(0)
    with pytest.raises(lt.LatticeError, match="unknown curve"):
        lt.blow_up(s, [("Z", 1)])
    with pytest.raises(lt.LatticeError):
        lt.blow_up(s, [("L", 0)])
    with pytest.raises(lt.LatticeError):
        lt.blow_up(s, [("L", 1), ("L", 1)])
    # a line cannot have a double point
    with pytest.raises(lt.LatticeError):
        lt.blow_up(s, [("L", 2)])


def test_genus_drop_on_nodal_cubic():
    s = lt.declare_curve(lt.new_surface(), "C", (3,))
    s = lt.blow_up(s, [("C", 2)])
    assert lt.genus(s, "C") == 0
    assert lt.self_int(s, "C") == 5


@given(st.integers(1, 6), st.lists(st.integers(1, 3), min_size=1, max_size=6))
def test_genus_drop_property(d, mults):
    s = lt.declare_curve(lt.new_surface(), "C", (d,))
    for m in mults:
        g = lt.genus(s, "C")
        if m * (m - 1) // 2 > g or m > d:
            with pytest.raises(lt.LatticeError):
                lt.blow_up(s, [("C", m)])
            return
        s = lt.blow_up(s, [("C", m)])
        assert g - lt.genus(s, "C") == m * (m - 1) // 2


def test_blow_up_along_chain():
    s = lt.declare_curve(lt.new_surface(), "C", (2,))
    s, names = lt.blow_up_along(s, "C", 3, prefix="x")
    assert names == ["x1", "x2", "x3"]
    assert [lt.self_int(s, n) for n in names] == [-2, -2, -1]
    assert lt.self_int(s, "C") == 1
    assert lt.pairing(s, "x1", "x2") == 1 and lt.pairing(s, "x1", "x3") == 0
    with pytest.raises(lt.LatticeError):
        lt.blow_up_along(s, "C", 2, mults=[1])


@pytest.mark.parametrize("n", range(2, 9))
def test_weighted_projective_plane(n):
    """Contracting the negative section of F_n gives P(1,1,n)."""
    s = lt.new_surface(lt.hirzebruch(n))
    s = lt.declare_curve(s, "s", (1, 0))
    s = lt.declare_curve(s, "f", (0, 1))
    assert lt.canonical_selfint(s) == 8
    m = lt.contract(s, ["s"])
    assert lt.dynkin_type(m) == DynkinType.of(f"[{n}]")
    assert lt.anticanonical_selfint(m) == Fraction((n + 2) ** 2, n)
    assert lt.anticanonical_degree(m, "f") == Fraction(n + 2, n)
    assert lt.anticanonical_selfint(m) + gap(f"[{n}]") == 9
    ok, rep = lt.is_rank_one_log_dp(m)
    assert ok and rep.ok


def test_du_val_contraction_keeps_ksq():
    s = p2_with_line_and_points(3)
    m = lt.contract(s, ["L"])
    assert lt.picard_rank(m) == 3
    assert lt.anticanonical_selfint(m) == 6
    ok, rep = lt.is_rank_one_log_dp(m)
    assert not ok
    assert [c.id for c in rep.checks if c.status == "fail"] == ["rank"]
    with pytest.raises(lt.LatticeError):
        lt.anticanonical_degree(m, "L")
    assert lt.pullback_degree(m, (1, 0, 0, 0)) == 3


def test_contraction_validation():
    s = p2_with_line_and_points(2)
    with pytest.raises(lt.LatticeError, match="self-intersection"):
        lt.contract(s, ["L"])
    s = lt.declare_curve(lt.new_surface(), "C", (3,))
    with pytest.raises(lt.LatticeError, match="genus"):
        lt.contract(s, ["C"])
    s = p2_with_line_and_points(3)
    with pytest.raises(lt.LatticeError):
        lt.contract(s, ["L", "L"])


def test_contraction_rejects_cycles():
    # separating the corners of a triangle of lines leaves three disjoint (-2)-curves
    s = lt.new_surface()
    for name in "ABC":
        s = lt.declare_curve(s, name, (1,))
    s = lt.blow_up(s, [("A", 1), ("B", 1)], "ab")
    s = lt.blow_up(s, [("B", 1), ("C", 1)], "bc")
    s = lt.blow_up(s, [("A", 1), ("C", 1)], "ac")
    for name in "ABC":
        s = lt.blow_up(s, [(name, 1)], f"p{name}")
    assert lt.dynkin_type(lt.contract(s, ["A", "B", "C"])) == DynkinType.of("[2]", "[2]", "[2]")
    # keeping the corners gives a cycle of (-2)-curves
    s2 = lt.new_surface()
    for name in "ABC":
        s2 = lt.declare_curve(s2, name, (1,))
    for name in "ABC":
        for i in range(3):
            s2 = lt.blow_up(s2, [(name, 1)], f"{name}{i}")
    with pytest.raises(lt.LatticeError, match="cycle"):
        lt.contract(s2, ["A", "B", "C"])


def test_abstract_base(tmp_path):
    f = tmp_path / "base.json"
    f.write_text(json.dumps({"basis": ["s", "f"], "gram": [[-2, 1], [1, 0]], "canonical": [-2, -4], "ksq": 8}))
    base = lt.load_abstract_base(f)
    assert base.rank == 2
    f.write_text(json.dumps({"basis": ["s", "f"], "gram": [[-2, 1], [1, 0]], "canonical": [-2, -4], "ksq": 7}))
    with pytest.raises(lt.LatticeError, match="K\\^2"):
        lt.load_abstract_base(f)
    f.write_text(json.dumps({"basis": ["s"], "gram": [[1]]}))
    with pytest.raises(lt.LatticeError, match="canonical"):
        lt.load_abstract_base(f)
    with pytest.raises(lt.LatticeError):
        lt.abstract_base(["a", "b"], [[0, 1], [2, 0]], [0, 0])


def test_hirzebruch_negative():
    with pytest.raises(lt.LatticeError):
        lt.hirzebruch(-1)
