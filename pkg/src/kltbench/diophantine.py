"""K^2 formulas and exhaustive Noether-constraint searches.

On a rank-one log del Pezzo surface the singularities satisfy
``K^2 + sum Gap(x) = 9``.  Given a closed form for ``K^2`` in a few integer
parameters, the identity becomes a small Diophantine problem:

    K^2(g, r) + v + sum_k n_k * 2(k+1)^2/(2k+3) = 9

with ``v`` the number of Du Val exceptional curves and ``n_k`` the number of
``[3,2^k]`` points.  :func:`run_search` enumerates such problems exactly,
in lexicographic order, with branch pruning that only uses the declared
bounds.  :mod:`kltbench.bruteforce` re-enumerates the same box with no
pruning at all, and the two must agree.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from kltbench.dualgraph import DualGraph, DynkinType, total_gap

TARGET = 9


# -- K^2 closed forms --------------------------------------------------------


def _positive(num, den) -> Fraction | None:
    """``num/den`` if the denominator is positive, else ``None`` (undefined)."""
    if den <= 0:
        return None
    return Fraction(num, den)


@dataclass(frozen=True)
class KsqFormula:
    family: str
    params: tuple[str, ...]
    func: Callable[..., Fraction | None] = field(compare=False, repr=False)
    domain: Callable[..., bool] = field(compare=False, repr=False, default=lambda *a: True)

    def __call__(self, *args: int) -> Fraction | None:
        if len(args) != len(self.params):
            raise ValueError(f"{self.family} takes parameters {self.params}")
        if not self.domain(*args):
            raise ValueError(f"parameters {dict(zip(self.params, args))} outside the domain of {self.family}")
        return self.func(*args)


FORMULAS: dict[str, KsqFormula] = {
    f.family: f
    for f in [
        # x0 = [3,2^r], configuration I
        KsqFormula("config-I", ("g", "r"),
                   lambda g, r: _positive(g, (2 * r + 3) * (4 * (r + 1) - g * (2 * r + 3))),
                   lambda g, r: g >= 1 and r >= 0),
        # x0 = [3,2^g], configuration II
        KsqFormula("config-II", ("g",),
                   lambda g: _positive(2, (2 * g + 3) * (2 * g - 1)),
                   lambda g: g >= 1),
        # configuration III families, one per x0
        KsqFormula("[3,2^k]", ("g", "k"),
                   lambda g, k: _positive(2 * (k + g + 2) ** 2,
                                          (2 * k + 3) * (2 * g + 1) * (4 * g * k + 4 * g - 1)),
                   lambda g, k: g >= 1 and k >= 0),
        KsqFormula("[4]", ("g",),
                   lambda g: _positive(1, (2 * g + 1) * (2 * g - 1)),
                   lambda g: g >= 1),
        KsqFormula("[3,2^k,3]", ("g", "k"),
                   lambda g, k: _positive(k + 2, (2 * g + 1) * (4 * g * k + 6 * g - 1)),
                   lambda g, k: g >= 1 and k >= 0),
        KsqFormula("[2,3,2]", ("g",),
                   lambda g: _positive(1, 4 * g * (2 * g + 1)),
                   lambda g: g >= 1),
        KsqFormula("[2;[2],[2],[2^k,3]]", ("g", "k"),
                   lambda g, k: _positive(1, 4 * (2 * k * g + 3 * g + k + 1) * (2 * g + 1)),
                   lambda g, k: g >= 1 and k >= 0),
        KsqFormula("[2,3,2^k]", ("g", "k"),
                   lambda g, k: _positive(2 * (g * k - g - k - 3) ** 2,
                                          (2 * g + 1) * (3 * k + 5) * (8 * k * g + 8 * g + k - 1)),
                   lambda g, k: g >= 1 and 2 <= k <= 4),
        # the table lists this one without g-dependence
        KsqFormula("[2,4]", ("g",), lambda g: Fraction(2, 5 * 7 * 13), lambda g: g >= 2),
    ]
}


def ksq_formula(family: str, params: Sequence[int] | Mapping[str, int]) -> Fraction | None:
    """Evaluate a K^2 closed form; ``None`` marks a nonpositive denominator."""
    try:
        f = FORMULAS[family]
    except KeyError:
        raise ValueError(f"unknown K^2 family {family!r}") from None
    if isinstance(params, Mapping):
        params = [params[p] for p in f.params]
    return f(*params)


def ksq_from_sigma(k_dot_sigma, sigma_sq) -> Fraction:
    """Rank one: ``K^2 = (K.S)^2 / S^2`` for any curve class ``S``."""
    sigma_sq = Fraction(sigma_sq)
    if sigma_sq == 0:
        raise ZeroDivisionError("sigma has self-intersection 0")
    return Fraction(k_dot_sigma) ** 2 / sigma_sq


def noether_defect(ksq, d: DynkinType | str) -> Fraction:
    """``K^2 + sum Gap - 9``; zero when the Noether-type identity holds."""
    return Fraction(ksq) + total_gap(d) - TARGET


def chain_gap_weight(k: int) -> Fraction:
    """Gap of ``[3,2^k]`` in closed form, as it enters the search equations."""
    return Fraction(2 * (k + 1) ** 2, 2 * k + 3)


# -- search specification ----------------------------------------------------


@dataclass(frozen=True)
class Variable:
    """Bounded integer unknown.

    ``gap`` is its per-unit contribution to the gap sum.  When ``active_if``
    is ``(name, k)`` the variable is pinned to 0 unless ``name >= k``.
    ``component`` names the singularity each unit stands for: a bracket
    string, or ``DU_VAL`` for a single ``[2^x]`` chain.
    """

    name: str
    lo: int
    hi: int
    gap: Fraction = Fraction(0)
    active_if: tuple[str, int] | None = None
    component: str | None = None

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty range for {self.name}")
        if self.gap < 0 or self.lo < 0:
            raise ValueError("search variables and gap weights must be nonnegative")


DU_VAL = "du-val"


@dataclass(frozen=True)
class Constraint:
    """``sum c_i x_i < bound`` (or ``<=`` when not strict)."""

    coeffs: tuple[tuple[str, int], ...]
    bound: int
    strict: bool = True

    def slack(self, values: Mapping[str, int]) -> int:
        """Largest integer ``s`` with ``lhs + s`` still admissible."""
        lhs = sum(c * values[n] for n, c in self.coeffs)
        return self.bound - lhs - (1 if self.strict else 0)

    def __str__(self) -> str:
        lhs = " + ".join(f"{c}*{n}" if c != 1 else n for n, c in self.coeffs)
        return f"{lhs} {'<' if self.strict else '<='} {self.bound}"


def lin(bound: int, strict: bool = True, **coeffs: int) -> Constraint:
    return Constraint(tuple(coeffs.items()), bound, strict)


@dataclass(frozen=True)
class SearchSpec:
    id: str
    ksq_family: str
    ksq_args: tuple[str, ...]
    variables: tuple[Variable, ...]
    constraints: tuple[Constraint, ...] = ()
    extra_components: tuple[str, ...] = ()
    target: int = TARGET
    description: str = ""

    def __post_init__(self):
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        pos = {n: i for i, n in enumerate(names)}
        for a in self.ksq_args:
            if a not in pos:
                raise ValueError(f"K^2 argument {a} is not a variable")
        for v in self.variables:
            if v.gap and any(pos[a] > pos[v.name] for a in self.ksq_args):
                raise ValueError("K^2 arguments must precede gap-carrying variables")
            if v.active_if and pos[v.active_if[0]] > pos[v.name]:
                raise ValueError(f"{v.name} is gated by a later variable")
        for c in self.constraints:
            for n, _ in c.coeffs:
                if n not in pos:
                    raise ValueError(f"constraint mentions unknown variable {n}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def ksq(self, values: Mapping[str, int]) -> Fraction | None:
        return ksq_formula(self.ksq_family, [values[a] for a in self.ksq_args])

    def effective_range(self, var: Variable, values: Mapping[str, int]) -> range:
        if var.active_if and values[var.active_if[0]] < var.active_if[1]:
            return range(0, 1)
        return range(var.lo, var.hi + 1)

    def residual(self, values: Mapping[str, int]) -> Fraction | None:
        """``K^2 + sum gap*x - target``, or None when K^2 is undefined."""
        k = self.ksq(values)
        if k is None:
            return None
        return k + sum(v.gap * values[v.name] for v in self.variables) - self.target

    def admissible(self, values: Mapping[str, int]) -> bool:
        """Every bound, gate and side constraint, plus the equation itself."""
        for v in self.variables:
            if values[v.name] not in self.effective_range(v, values):
                return False
        if any(c.slack(values) < 0 for c in self.constraints):
            return False
        return self.residual(values) == 0

    def dynkin_type(self, solution: Sequence[int]) -> DynkinType:
        """Assemble a singularity configuration realizing a solution tuple."""
        values = dict(zip(self.names, solution))
        graphs: list[DualGraph | str] = list(self.extra_components)
        for v in self.variables:
            x = values[v.name]
            if v.component == DU_VAL:
                if x:
                    graphs.append(DualGraph.chain([2] * x))
            elif v.component is not None:
                graphs.extend([v.component] * x)
        return DynkinType.of(*graphs)


@dataclass(frozen=True)
class SolutionSet:
    search_id: str
    variables: tuple[str, ...]
    solutions: tuple[tuple, ...]
    scanned: int

    def __len__(self) -> int:
        return len(self.solutions)

    def as_dicts(self) -> list[dict[str, int]]:
        return [dict(zip(self.variables, s)) for s in self.solutions]

    def to_dict(self) -> dict:
        return {
            "search_id": self.search_id,
            "variables": list(self.variables),
            "solutions": [list(s) for s in self.solutions],
            "scanned_count": self.scanned,
        }

    def to_text(self) -> str:
        lines = [f"{self.search_id} ({','.join(self.variables)})"]
        lines += [",".join(_cell(x) for x in s) for s in self.solutions]
        lines.append(f"{len(self.solutions)} solutions, {self.scanned} tuples scanned")
        return "\n".join(lines)


def _cell(x) -> str:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return str(x)


# -- the preconfigured searches ----------------------------------------------


def _chain_vars(kmax: int, gate: str | None, hi_of: Callable[[int], int]) -> list[Variable]:
    out = []
    for k in range(kmax + 1):
        comp = "[3]" if k == 0 else f"[3,2^{k}]"
        out.append(Variable(f"n{k}", 0, hi_of(k), chain_gap_weight(k),
                            (gate, k) if gate and k > 0 else None, comp))
    return out


def _n_hi(k: int) -> int:
    # 3v + 2 n0 < 27 gives n0 <= 13; v + sum k n_k < 9 gives n_k <= 8 // k
    return 13 if k == 0 else 8 // k


def _weighted(prefix: str, ks: Iterable[int], extra: Mapping[str, int] | None = None) -> dict:
    d = {f"{prefix}{k}": k for k in ks if k}
    d.update(extra or {})
    return d


def _build_specs() -> dict[str, SearchSpec]:
    specs = {}
    ns8 = range(9)
    common = (
        lin(27, v=3, n0=2),
        lin(9, **_weighted("n", ns8, {"v": 1})),
    )
    specs["D1"] = SearchSpec(
        "D1", "config-I", ("g", "r"),
        (Variable("g", 1, 9), Variable("r", 0, 8), Variable("v", 0, 8, Fraction(1), component=DU_VAL),
         *_chain_vars(8, "r", _n_hi)),
        common + (lin(1, strict=False, g=1, v=-1),),
        description="x0 = [3,2^r], configuration I",
    )
    # g < 9 is forced by v + sum k n_k < 9 together with n_g >= 0; the range is the stated one
    specs["D2"] = SearchSpec(
        "D2", "config-II", ("g",),
        (Variable("g", 2, 8), Variable("v", 0, 8, Fraction(1), component=DU_VAL),
         *_chain_vars(8, "g", _n_hi)),
        common,
        description="x0 = [3,2^g], configuration II",
    )
    # v = v0 + v1 with v0 >= 1; the equation sees only the sum
    specs["D3"] = SearchSpec(
        "D3", "[4]", ("g",),
        (Variable("g", 2, 63), Variable("v", 1, 8, Fraction(1), component=DU_VAL),
         *_chain_vars(7, None, _n_hi)),
        (lin(27, v=3, n0=2), lin(9, **_weighted("n", range(8), {"v": 1})),
         lin(1, strict=False, n4=1, n5=1, n6=1, n7=1)),
        extra_components=("[4]",),
        description="x0 = [4], configuration III",
    )
    specs["D4"] = SearchSpec(
        "D4", "[3,2^k]", ("g", "r"),
        (Variable("g", 2, 9), Variable("r", 0, 8), Variable("v", 1, 8, Fraction(1), component=DU_VAL),
         *_chain_vars(8, "r", _n_hi)),
        common + (lin(1, strict=False, g=1, r=-1),),
        description="x0 = [3,2^r], configuration III",
    )
    return specs


SPECS: dict[str, SearchSpec] = _build_specs()
ENUM_SEARCHES = ("D1", "D2", "D3", "D4")


def get_spec(search_id: str) -> SearchSpec:
    try:
        return SPECS[search_id]
    except KeyError:
        raise ValueError(f"unknown search {search_id!r}") from None


# -- enumeration ------------------------------------------------------------


def _dfs(spec: SearchSpec, prefix: Mapping[str, int]) -> tuple[list[tuple], int]:
    """Pruned lexicographic enumeration below a fixed prefix of assignments."""
    variables = spec.variables
    n = len(variables)
    # minimal remaining gap contribution from position i on (all weights >= 0)
    min_gap_tail = [Fraction(0)] * (n + 1)
    for i in range(n - 1, -1, -1):
        v = variables[i]
        min_gap_tail[i] = min_gap_tail[i + 1] + v.gap * v.lo
    cons_pos = [
        [(spec.names.index(name), c) for name, c in con.coeffs] for con in spec.constraints
    ]
    ksq_ready = max(spec.names.index(a) for a in spec.ksq_args)

    solutions: list[tuple] = []
    scanned = 0
    values: dict[str, int] = {}
    assign = [0] * n

    def constraint_ok(depth: int) -> bool:
        # lower bound of each lhs over all completions of assign[:depth]
        for con, terms in zip(spec.constraints, cons_pos):
            lhs = 0
            for i, c in terms:
                if i < depth:
                    lhs += c * assign[i]
                else:
                    var = variables[i]
                    lhs += c * (var.lo if c > 0 else var.hi)
            limit = con.bound - 1 if con.strict else con.bound
            if lhs > limit:
                return False
        return True

    def rec(depth: int, partial: Fraction | None):
        nonlocal scanned
        if depth == n:
            scanned += 1
            if partial == spec.target:
                solutions.append(tuple(assign))
            return
        var = variables[depth]
        if var.name in prefix:
            choices: Iterable[int] = (prefix[var.name],)
        else:
            choices = spec.effective_range(var, values)
        for x in choices:
            if var.active_if and values[var.active_if[0]] < var.active_if[1] and x != 0:
                continue
            assign[depth] = x
            values[var.name] = x
            if not constraint_ok(depth + 1):
                # constraints are monotone in x only when every coefficient is
                # nonnegative; keep scanning otherwise
                if all(c >= 0 for con in spec.constraints for nm, c in con.coeffs if nm == var.name):
                    break
                continue
            p = partial
            if depth == ksq_ready:
                k = spec.ksq(values)
                if k is None:
                    continue
                p = k
            if p is not None:
                p = p + var.gap * x
                if p + min_gap_tail[depth + 1] > spec.target:
                    if var.gap > 0:
                        break
                    continue
            rec(depth + 1, p)
        values.pop(var.name, None)

    rec(0, None)
    return solutions, scanned


def _dfs_task(args):
    spec, prefix = args
    return _dfs(spec, prefix)


def run_spec(spec: SearchSpec, workers: int | None = None) -> SolutionSet:
    """Enumerate a search; ``workers > 1`` splits on the first variable."""
    if workers and workers > 1:
        first = spec.variables[0]
        tasks = [(spec, {first.name: x}) for x in range(first.lo, first.hi + 1)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_dfs_task, tasks))
    else:
        parts = [_dfs(spec, {})]
    sols = sorted(set(s for part, _ in parts for s in part))
    return SolutionSet(spec.id, spec.names, tuple(sols), sum(c for _, c in parts))


def run_search(search_id: str, workers: int | None = None) -> SolutionSet:
    """Run one of D1..D5.  D5 rechecks every D1..D4 solution with real gaps."""
    if search_id == "D5":
        return noether_crosscheck(workers=workers)
    return run_spec(get_spec(search_id), workers)


def noether_crosscheck(results: Mapping[str, SolutionSet] | None = None,
                       workers: int | None = None) -> SolutionSet:
    """For each D1..D4 solution: assembled Dyn, K^2 and the Noether defect.

    The gaps here come from solving the discrepancy systems of the assembled
    graphs, not from the closed forms used by the search equations.
    """
    rows = []
    scanned = 0
    for sid in ENUM_SEARCHES:
        spec = SPECS[sid]
        res = results[sid] if results and sid in results else run_spec(spec, workers)
        for i, sol in enumerate(res.solutions):
            values = dict(zip(spec.names, sol))
            d = spec.dynkin_type(sol)
            ksq = spec.ksq(values)
            rows.append((sid, i, str(d), ksq, noether_defect(ksq, d)))
            scanned += 1
    return SolutionSet("D5", ("search", "index", "dynkin", "ksq", "defect"), tuple(rows), scanned)


# -- divisibility searches ---------------------------------------------------


def divisibility_search(
    numerator: Callable[[int], int],
    denominator: Callable[[int], int],
    moduli: Mapping[int, int],
    g_range: Iterable[int],
) -> set[tuple[int, int]]:
    """All ``(g, a)`` with ``numerator(g)/denominator(g)`` in ``(1/D_a) Z``."""
    out = set()
    for g in g_range:
        num, den = numerator(g), denominator(g)
        if den == 0:
            continue
        for a, d in moduli.items():
            if (num * d) % den == 0:
                out.add((g, a))
    return out


@dataclass(frozen=True)
class DivisibilitySpec:
    id: str
    k: int
    moduli: tuple[tuple[int, int], ...]
    g_lo: int
    g_hi: int

    def numerator(self, g: int) -> int:
        return self.k + 2

    def denominator(self, g: int) -> int:
        return (2 * g + 1) * (4 * g * self.k + 6 * g - 1)

    def run(self) -> set[tuple[int, int]]:
        return divisibility_search(self.numerator, self.denominator, dict(self.moduli),
                                   range(self.g_lo, self.g_hi + 1))


DIV_SPECS: dict[str, DivisibilitySpec] = {
    "GEN-1": DivisibilitySpec("GEN-1", 3, ((11, 3**2 * 5 * 7 * 11),), 2, 21),
    "GEN-2": DivisibilitySpec("GEN-2", 1, tuple((a, 3 * 5 * 7 * a) for a in (3, 11, 13)), 2, 14),
    "GEN-3": DivisibilitySpec("GEN-3", 0, tuple((a, 3**2 * 5 * 7 * a) for a in (11, 13, 17)), 2, 20),
}

ALL_SEARCHES = ENUM_SEARCHES + ("D5",) + tuple(DIV_SPECS)

