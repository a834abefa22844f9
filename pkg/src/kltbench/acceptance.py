"""The acceptance suite: one :class:`Report` per criterion.

Shared by ``kltbench verify-all`` and ``tests/test_acceptance.py`` so the
command line and the test suite cannot drift apart.
"""

from __future__ import annotations

from fractions import Fraction
import json
from importlib import resources
import random

from kltbench import bruteforce, construct, diophantine, dualgraph, lattice, planecurve
from kltbench.dualgraph import DualGraph, coefficient, discrepancies, gap, parse_dynkin
from kltbench.rational import parse_rational
from kltbench.report import Report

FIXTURES = (
    "char2_cusp_conic",
    "charany_cusp_conic",
    "char5_nt5_nu3",
    "char5_nt6_nu3",
    "char5_nt5_nu4",
    "nodal_cubic",
)

FIXTURE_EXPECT = {
    "char2_cusp_conic": ("[3,2^2]+2[3]+[2^5]", "x", Fraction(2, 7)),
    "charany_cusp_conic": ("[2,3,2^2]+[3,2^5]", "x", Fraction(1, 11)),
    "char5_nt5_nu3": ("2[3,2]+[3]+[2]+[2^4]", "u3", Fraction(1, 5)),
    "char5_nt6_nu3": ("[4,2]+[3,2^5]+[3,2]+[2]", "u3", Fraction(1, 35)),
    "char5_nt5_nu4": ("[2,4]+[2,3,2^2]+[3]+[2^4]", "u4", Fraction(5, 77)),
    "nodal_cubic": ("[2,3,2^2]+[2,3,2]+[2^3]", "s3", Fraction(9, 44)),
}


def data_json(name: str) -> dict:
    with resources.files("kltbench").joinpath(f"data/{name}").open() as fh:
        return json.load(fh)


def fixture_path(name: str):
    return resources.files("kltbench").joinpath(f"data/fixtures/{name}.dp")


def run_fixture(name: str) -> construct.ConstructionResult:
    with resources.as_file(fixture_path(name)) as path:
        return construct.run_file(path)


# -- criterion 1 ---------------------------------------------------------------


def criterion_1() -> Report:
    rep = dualgraph.verify_table_e35()
    rep.command = "criterion 1: gap table regeneration"
    rows = {r["row"] for r in dualgraph._table_rows()}
    rep.add("rows", "table_e35.json", 10, len(rows))
    for text, val in [("[2,3,2^2]", "38/11"), ("[2,3,2^3]", "31/7"), ("[2,3,2^4]", "92/17"), ("[2,4]", "6/7")]:
        rep.add(f"spot/{text}", text, parse_rational(val), gap(text))
    return rep


# -- criterion 2 ---------------------------------------------------------------


COEFF_SPOTS = [
    ("[3,2]", "2/5"),
    ("[2,3,2^2]", "6/11"),
    ("[4,2]", "4/7"),
    ("[2,3,2^3]", "4/7"),
    ("[3,3,2]", "8/13"),
    ("[3;[2],[2],[2]]", "2/3"),
    ("[2,3,2,3,2]", "2/3"),
]


def criterion_2() -> Report:
    rep = Report("criterion 2: coefficient spot set")
    for text, val in COEFF_SPOTS:
        rep.add(f"e{text}", text, parse_rational(val), coefficient(text))
    rep.add("gap[5]", "[5]", Fraction(-4, 5), gap("[5]"))
    return rep


# -- criterion 3 ---------------------------------------------------------------


def expected_solutions(search_id: str) -> tuple[tuple, ...]:
    spec = diophantine.get_spec(search_id)
    block = data_json("searches.json")["enumerations"][search_id]
    out = []
    for sol in block["solutions"]:
        values = {n: 0 for n in spec.names}
        values.update(block["fixed"])
        values.update(sol)
        out.append(tuple(values[n] for n in spec.names))
    return tuple(sorted(out))


def expected_divisibility(search_id: str) -> set[tuple[int, int]]:
    return {tuple(x) for x in data_json("searches.json")["divisibility"][search_id]}


def check_search(search_id: str, rep: Report, oracle: bool = True, workers: int | None = None,
                 cache: dict | None = None) -> None:
    if search_id in diophantine.DIV_SPECS:
        spec = diophantine.DIV_SPECS[search_id]
        got = spec.run()
        rep.add(f"{search_id}/set", f"g in {spec.g_lo}..{spec.g_hi}",
                expected_divisibility(search_id), got)
        if oracle:
            alt = bruteforce.oracle_divisibility(spec.numerator, spec.denominator, dict(spec.moduli),
                                                 range(spec.g_lo, spec.g_hi + 1))
            rep.add(f"{search_id}/oracle", "Fraction route", got, alt)
        return
    if search_id == "D5":
        res = diophantine.noether_crosscheck(cache, workers=workers)
        for sid, i, dyn, ksq, defect in res.solutions:
            rep.add(f"D5/{sid}#{i}", f"{dyn} K^2={ksq.numerator}/{ksq.denominator}", Fraction(0), defect)
        return
    res = diophantine.run_search(search_id, workers=workers)
    if cache is not None:
        cache[search_id] = res
    rep.add(f"{search_id}/set", ",".join(res.variables), set(expected_solutions(search_id)),
            set(res.solutions))
    spec = diophantine.get_spec(search_id)
    rep.add(f"{search_id}/admissible", "exact residual", True,
            all(spec.admissible(dict(zip(spec.names, s))) for s in res.solutions))
    rep.add(f"{search_id}/ksq>0", "K^2 on solutions", True,
            all(spec.ksq(dict(zip(spec.names, s))) > 0 for s in res.solutions))
    if oracle:
        alt = bruteforce.oracle_search(spec)
        rep.add(f"{search_id}/oracle", f"full box, {alt.scanned} tuples", res.solutions, alt.solutions)


def criterion_3(oracle: bool = True) -> Report:
    rep = Report("criterion 3: searches")
    for sid in diophantine.ENUM_SEARCHES + tuple(diophantine.DIV_SPECS):
        check_search(sid, rep, oracle=oracle)
    gen1 = {g for g, _ in diophantine.DIV_SPECS["GEN-1"].run()}
    rep.add("GEN-1/g", "g-projection", {2}, gen1)
    return rep


# -- criterion 4 ---------------------------------------------------------------


def criterion_4() -> Report:
    rep = Report("criterion 4: Noether identity")
    check_search("D5", rep)
    for name in FIXTURES:
        model = run_fixture(name).model
        if model is not None and lattice.picard_rank(model) == 1:
            d = lattice.dynkin_type(model)
            rep.add(f"fixture/{name}", str(d), Fraction(0),
                    diophantine.noether_defect(lattice.anticanonical_selfint(model), d))
    k1 = diophantine.ksq_from_sigma(Fraction(1, 35), Fraction(3, 35))
    rep.add("ksq/1/105", "(1/35)^2/(3/35)", Fraction(1, 105), k1)
    rep.add("worked/1/105", "2[3]+[4,2^2]+[4,2]+[2^5]", Fraction(0),
            diophantine.noether_defect(k1, "2[3]+[4,2^2]+[4,2]+[2^5]"))
    k2 = diophantine.ksq_from_sigma(Fraction(2, 55), Fraction(6, 55))
    rep.add("ksq/2/165", "(2/55)^2/(6/55)", Fraction(2, 165), k2)
    rep.add("worked/2/165", "2[3]+[5]+[2,3,2^2]+[2^5]", Fraction(0),
            diophantine.noether_defect(k2, "2[3]+[5]+[2,3,2^2]+[2^5]"))
    rep.add("gap[4,2^2]", "[4,2^2]", Fraction(9, 5), gap("[4,2^2]"))
    return rep


# -- criterion 5 ---------------------------------------------------------------


def criterion_5() -> Report:
    rep = Report("criterion 5: construction fixtures")
    for name in FIXTURES:
        dyn, curve, degree = FIXTURE_EXPECT[name]
        res = run_fixture(name)
        model = res.model
        rep.add(f"{name}/script", "expect lines", True, res.report.ok)
        rep.add(f"{name}/dynkin", dyn, parse_dynkin(dyn), lattice.dynkin_type(model))
        rep.add(f"{name}/degree", curve, degree, lattice.anticanonical_degree(model, curve))
        ok, _ = lattice.is_rank_one_log_dp(model)
        rep.add(f"{name}/ldp", "rank-one proxy", True, ok)
    return rep


# -- criterion 6 ---------------------------------------------------------------


def chain_4_22(k: int) -> DualGraph:
    return DualGraph.chain([3] + [2] * (k - 2) + [4, 2, 2])


def chain_4_22_expression(k: int) -> Fraction:
    e_first = discrepancies(chain_4_22(k))[0]
    return 1 - e_first - Fraction(5 * k - 10, 10 * k - 18)


def criterion_6() -> Report:
    rep = Report("criterion 6: chain [3,2^(k-2),4,2^2]")
    positive = set()
    for k in range(2, 7):
        e_first = discrepancies(chain_4_22(k))[0]
        rep.add(f"coeff/k={k}", str(chain_4_22(k)), Fraction(7 * k + 2, 14 * k - 1), e_first)
        expr = chain_4_22_expression(k)
        rep.add(f"expr/k={k}", "1-e-(5k-10)/(10k-18)",
                Fraction(11 * (4 - k), (14 * k - 1) * (10 * k - 18)), expr)
        if expr > 0:
            positive.add(k)
    rep.add("positive-exactly-at-3", "k in 2..6", {3}, positive)
    return rep


# -- criterion 7 ---------------------------------------------------------------


def criterion_7() -> Report:
    rep = Report("criterion 7: plane-curve suite")
    for p in (0, 2, 3, 5):
        sub = planecurve.verify_special_config(p)
        for c in sub.checks:
            c.id = f"char{p}/{c.id}"
        rep.extend(sub)
    return rep


# -- criterion 8 ---------------------------------------------------------------


def random_tree(rng: random.Random, n: int, wmax: int = 5) -> DualGraph:
    edges = [(rng.randrange(i), i) for i in range(1, n)]
    return DualGraph(tuple(rng.randint(2, wmax) for _ in range(n)), frozenset(edges))


def random_contractible(rng: random.Random, nmax: int = 8) -> DualGraph:
    while True:
        g = random_tree(rng, rng.randint(1, nmax))
        if dualgraph.is_negative_definite(dualgraph.intersection_matrix(g)):
            return g


def _random_affine_through_origin(rng, field, deg):
    terms = {}
    for a in range(deg + 1):
        for b in range(deg + 1 - a):
            if (a, b) != (0, 0) and rng.random() < 0.6:
                terms[(a, b, deg - a - b)] = field(rng.randint(-3, 3))
    terms = {e: c for e, c in terms.items() if c != 0}
    if not terms:
        terms[(1, 0, deg - 1)] = field.one()
    return planecurve.HomPoly.from_dict(terms, field)


def _add_inf(a, b):
    if a is planecurve.INFINITE or b is planecurve.INFINITE:
        return planecurve.INFINITE
    return a + b


def _random_invertible(rng, field):
    while True:
        m = [[field(rng.randint(-2, 2)) for _ in range(3)] for _ in range(3)]
        det = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
               - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
               + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
        if field(det) != 0:
            return m


def fulton_properties(n: int = 1000, seed: int = 20260101) -> Report:
    """Symmetry, additivity and coordinate invariance on ``n`` random instances each."""
    rng = random.Random(seed)
    rep = Report("fulton properties")
    fields = [planecurve.Field(p) for p in (0, 2, 3, 5, 7)]
    origin = {f: planecurve.point(0, 0, 1, f) for f in fields}
    bad_sym = bad_add = bad_inv = 0
    for _ in range(n):
        f = rng.choice(fields)
        F = _random_affine_through_origin(rng, f, rng.randint(1, 3))
        G = _random_affine_through_origin(rng, f, rng.randint(1, 3))
        H = _random_affine_through_origin(rng, f, rng.randint(1, 2))
        o = origin[f]
        I = planecurve.intersection_multiplicity
        if I(F, G, o) != I(G, F, o):
            bad_sym += 1
        if I(F, G * H, o) != _add_inf(I(F, G, o), I(F, H, o)):
            bad_add += 1
        # F o A meets G o A at A^-1 o, which is proportional to r1 x r2
        A = _random_invertible(rng, f)
        r1, r2 = A[0], A[1]
        q = planecurve.ProjPoint(tuple(f(v) for v in (
            r1[1] * r2[2] - r1[2] * r2[1],
            r1[2] * r2[0] - r1[0] * r2[2],
            r1[0] * r2[1] - r1[1] * r2[0])), f)
        if I(F, G, o) != I(F.substitute(A), G.substitute(A), q):
            bad_inv += 1
    rep.add("symmetry", f"{n} instances", 0, bad_sym)
    rep.add("additivity", f"{n} instances", 0, bad_add)
    rep.add("coordinate-invariance", f"{n} instances", 0, bad_inv)
    return rep


def discrepancy_properties(n: int = 300, seed: int = 7) -> Report:
    from kltbench import linalg

    rng = random.Random(seed)
    rep = Report("discrepancy properties")
    bad_res = bad_dv = bad_rev = bad_mono = bad_zero = 0
    for _ in range(n):
        g = random_contractible(rng)
        m = dualgraph.intersection_matrix(g)
        e = discrepancies(g)
        d = [2 - w for w in g.weights]
        if linalg.matvec(m, e.values) != d:
            bad_res += 1
        if dualgraph.discrepancies_with_boundary(g, [0] * len(g)) != e:
            bad_zero += 1
        t = [Fraction(rng.randint(0, 3), rng.randint(1, 3)) for _ in g.weights]
        t2 = [x + Fraction(rng.randint(0, 2), 2) for x in t]
        a = dualgraph.discrepancies_with_boundary(g, t).values
        b = dualgraph.discrepancies_with_boundary(g, t2).values
        if any(x > y for x, y in zip(a, b)):
            bad_mono += 1
        if g.shape == "chain":
            r = g.reversed()
            if (gap(r), coefficient(r), dualgraph.determinant(r), discrepancies(r).klt) != (
                    gap(g), coefficient(g), dualgraph.determinant(g), e.klt):
                bad_rev += 1
        nd = rng.randint(1, 8)
        dv = DualGraph.chain([2] * nd)
        if any(discrepancies(dv).values) or gap(dv) != nd:
            bad_dv += 1
    rep.add("exact-residual", f"{n} random trees", 0, bad_res)
    rep.add("boundary-zero", f"{n} random trees", 0, bad_zero)
    rep.add("boundary-monotone", f"{n} random trees", 0, bad_mono)
    rep.add("chain-reversal", f"{n} random trees", 0, bad_rev)
    rep.add("du-val-zero", f"{n} random chains", 0, bad_dv)
    for text in ("[2;[2],[2],[2]]", "[2;[2],[2^2],[2^2]]", "[2;[2],[2^2],[2^3]]", "[2;[2],[2^2],[2^4]]"):
        rep.add(f"du-val/{text}", text, (True, Fraction(dualgraph.vertex_count(text))),
                (not any(discrepancies(text).values), gap(text)))
    return rep


def genus_properties(n: int = 200, seed: int = 11) -> Report:
    """Random blow-up sequences on plane curves; genus drops by m(m-1)/2 each time."""
    rng = random.Random(seed)
    rep = Report("genus bookkeeping")
    bad = 0
    for _ in range(n):
        st = lattice.new_surface()
        d = rng.randint(1, 5)
        st = lattice.declare_curve(st, "C", (d,))
        g = lattice.genus(st, "C")
        for _ in range(rng.randint(1, 6)):
            mmax = 1
            while (mmax + 1) * mmax // 2 <= g and mmax + 1 <= d:
                mmax += 1
            m = rng.randint(1, mmax)
            try:
                st = lattice.blow_up(st, [("C", m)])
            except lattice.LatticeError:
                bad += 1
                break
            g2 = lattice.genus(st, "C")
            if g - g2 != m * (m - 1) // 2:
                bad += 1
            g = g2
    rep.add("genus-drop", f"{n} random sequences", 0, bad)
    return rep


def criterion_8(n: int = 1000) -> Report:
    rep = Report("criterion 8: property suites")
    rep.extend(discrepancy_properties())
    rep.extend(genus_properties())
    rep.extend(fulton_properties(n))
    return rep


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
}


def run_all() -> Report:
    rep = Report("verify-all")
    for i, fn in CRITERIA.items():
        sub = fn()
        for c in sub.checks:
            c.id = f"c{i}/{c.id}"
        rep.extend(sub)
    return rep
