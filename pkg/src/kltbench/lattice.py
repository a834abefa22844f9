"""Picard-lattice blow-up calculus.

A :class:`SurfaceState` is the lattice of a base surface plus exceptional
classes ``e_1..e_N`` (``e_i^2 = -1``, orthogonal to everything else) and a
dictionary of named curve classes.  Blowing up a point where the curves
``C_j`` pass with multiplicity ``m_j`` subtracts ``m_j e_new`` from each
``C_j``; the new exceptional curve is tracked under its own name, so later
blow-ups on it turn its class into a strict transform as well.

Contracting a set of named curves gives a :class:`SingularModel`.  With
``Gamma = sum e_j C_j`` solving ``(K + Gamma).C_j = 0`` we get
``K_S^2 = (K + Gamma).K`` and ``(-K_S).C = -(K + Gamma).C``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import json
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from kltbench import dualgraph
from kltbench.dualgraph import DualGraph, DiscrepancyVector, DynkinType
from kltbench.report import Report


class LatticeError(ValueError):
    """Inconsistent input: unknown curve, bad genus, invalid contraction."""


@dataclass(frozen=True)
class BaseSurface:
    name: str
    basis: tuple[str, ...]
    gram: tuple[tuple[int, ...], ...]
    canonical: tuple[int, ...]

    def __post_init__(self):
        n = len(self.basis)
        if len(self.gram) != n or any(len(row) != n for row in self.gram):
            raise LatticeError("Gram matrix does not match the basis")
        if len(self.canonical) != n:
            raise LatticeError("canonical class does not match the basis")
        for i in range(n):
            for j in range(n):
                if not isinstance(self.gram[i][j], int):
                    raise LatticeError("Gram entries must be integers")
                if self.gram[i][j] != self.gram[j][i]:
                    raise LatticeError("Gram matrix is not symmetric")

    @property
    def rank(self) -> int:
        return len(self.basis)

    def pair(self, a: Sequence, b: Sequence):
        return sum(a[i] * self.gram[i][j] * b[j]
                   for i in range(self.rank) for j in range(self.rank))


def projective_plane() -> BaseSurface:
    return BaseSurface("p2", ("H",), ((1,),), (-3,))


def hirzebruch(n: int) -> BaseSurface:
    if n < 0:
        raise LatticeError("Hirzebruch index must be nonnegative")
    return BaseSurface(f"hirzebruch {n}", ("s", "f"), ((-n, 1), (1, 0)), (-2, -(n + 2)))


def abstract_base(basis, gram, canonical, ksq: int | None = None, rank: int | None = None,
                  name: str = "abstract") -> BaseSurface:
    """User-supplied lattice; optional ``ksq``/``rank`` are asserted."""
    base = BaseSurface(name, tuple(basis), tuple(tuple(r) for r in gram), tuple(canonical))
    if rank is not None and rank != base.rank:
        raise LatticeError(f"declared rank {rank} but basis has {base.rank} classes")
    if ksq is not None and base.pair(base.canonical, base.canonical) != ksq:
        raise LatticeError(f"declared K^2 = {ksq} but the Gram data give "
                           f"{base.pair(base.canonical, base.canonical)}")
    return base


def load_abstract_base(path: str | Path) -> BaseSurface:
    data = json.loads(Path(path).read_text())
    try:
        return abstract_base(data["basis"], data["gram"], data["canonical"],
                             data.get("ksq"), data.get("rank"), data.get("name", "abstract"))
    except KeyError as exc:
        raise LatticeError(f"abstract base file lacks {exc.args[0]!r}") from None


@dataclass(frozen=True)
class BlowUp:
    name: str
    incidence: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class SurfaceState:
    base: BaseSurface
    exceptionals: tuple[str, ...] = ()
    curves: tuple[tuple[str, tuple[int, ...]], ...] = ()
    log: tuple[BlowUp, ...] = ()

    @property
    def rank(self) -> int:
        return self.base.rank + len(self.exceptionals)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.curves)

    def _table(self) -> dict[str, tuple[int, ...]]:
        return dict(self.curves)

    def cls(self, name: str) -> tuple[int, ...]:
        """Class vector of a tracked curve, padded to the current rank."""
        table = self._table()
        if name not in table:
            raise LatticeError(f"unknown curve {name!r}")
        v = table[name]
        return v + (0,) * (self.rank - len(v))

    @property
    def canonical(self) -> tuple[int, ...]:
        return self.base.canonical + (1,) * len(self.exceptionals)

    def pair_vectors(self, a: Sequence, b: Sequence):
        r = self.base.rank
        a = tuple(a) + (0,) * (self.rank - len(a))
        b = tuple(b) + (0,) * (self.rank - len(b))
        return self.base.pair(a[:r], b[:r]) - sum(x * y for x, y in zip(a[r:], b[r:]))


def new_surface(base: BaseSurface | str = "p2") -> SurfaceState:
    if isinstance(base, str):
        if base == "p2":
            base = projective_plane()
        else:
            raise LatticeError(f"unknown base {base!r}")
    return SurfaceState(base)


def pairing(state: SurfaceState, a: str, b: str) -> int:
    return state.pair_vectors(state.cls(a), state.cls(b))


def self_int(state: SurfaceState, name: str) -> int:
    return pairing(state, name, name)


def k_degree(state: SurfaceState, name: str) -> int:
    return state.pair_vectors(state.canonical, state.cls(name))


def canonical_selfint(state: SurfaceState) -> int:
    return state.pair_vectors(state.canonical, state.canonical)


def class_genus(state: SurfaceState, vec: Sequence[int]) -> int:
    twice = state.pair_vectors(vec, vec) + state.pair_vectors(state.canonical, vec)
    if twice % 2:
        raise LatticeError("C^2 + K.C is odd; the class is not integral")
    return 1 + twice // 2


def genus(state: SurfaceState, name: str) -> int:
    g = class_genus(state, state.cls(name))
    if g < 0:
        raise LatticeError(f"{name} has negative arithmetic genus {g}: inconsistent incidence")
    return g


def declare_curve(state: SurfaceState, name: str, cls: Sequence[int],
                  expected_genus: int | None = None) -> SurfaceState:
    if name in state.names:
        raise LatticeError(f"curve {name!r} already declared")
    cls = tuple(int(c) for c in cls)
    if len(cls) > state.rank:
        raise LatticeError(f"class of {name} has {len(cls)} entries, lattice rank is {state.rank}")
    out = SurfaceState(state.base, state.exceptionals, state.curves + ((name, cls),), state.log)
    g = genus(out, name)
    if expected_genus is not None and g != expected_genus:
        raise LatticeError(f"{name} has genus {g}, expected {expected_genus}")
    return out


def plane_class(state: SurfaceState, degree: int, mults: Sequence[int] = ()) -> tuple[int, ...]:
    """``d H - sum m_i e_i`` on a blow-up of the plane."""
    if state.base.basis != ("H",):
        raise LatticeError("degree;multiplicity classes need the p2 base")
    if len(mults) > len(state.exceptionals):
        raise LatticeError("more multiplicities than exceptional curves")
    return (degree,) + tuple(-m for m in mults)


def blow_up(state: SurfaceState, incidence: Iterable[tuple[str, int]],
            name: str | None = None) -> SurfaceState:
    """Blow up one point lying on the listed curves with the given multiplicities."""
    incidence = tuple((c, int(m)) for c, m in incidence)
    table = state._table()
    seen = set()
    for c, m in incidence:
        if c not in table:
            raise LatticeError(f"unknown curve {c!r}")
        if m < 1:
            raise LatticeError(f"multiplicity of {c} must be >= 1")
        if c in seen:
            raise LatticeError(f"{c} listed twice in one blow-up")
        seen.add(c)
    name = name or f"e{len(state.exceptionals) + 1}"
    if name in table:
        raise LatticeError(f"curve {name!r} already declared")
    rank = state.rank + 1
    mult = dict(incidence)
    curves = []
    for cname, vec in state.curves:
        vec = vec + (0,) * (rank - len(vec))
        if cname in mult:
            vec = vec[:-1] + (-mult[cname],)
        curves.append((cname, vec))
    exc = (0,) * state.rank + (1,)
    curves.append((name, exc))
    out = SurfaceState(state.base, state.exceptionals + (name,), tuple(curves),
                       state.log + (BlowUp(name, incidence),))
    for cname, m in incidence:
        before = genus(state, cname)
        after = genus(out, cname)
        if before - after != m * (m - 1) // 2:
            raise LatticeError(f"genus of {cname} dropped by {before - after}, expected {m * (m - 1) // 2}")
    return out


def blow_up_along(state: SurfaceState, curve: str, times: int, mults: Sequence[int] | None = None,
                  prefix: str | None = None, through: Mapping[str, Sequence[int]] | None = None
                  ) -> tuple[SurfaceState, list[str]]:
    """``times`` successive centres on ``curve``; each later centre also lies
    on the previous exceptional curve.  ``through[X][i]`` is the multiplicity
    of an extra curve ``X`` at the i-th centre (0 = not through it); ``X``
    may be one of the exceptionals created earlier in the same run.
    """
    mults = list(mults) if mults is not None else [1] * times
    if len(mults) != times:
        raise LatticeError(f"{times} blow-ups but {len(mults)} multiplicities")
    through = dict(through or {})
    for x, ks in through.items():
        if len(ks) != times:
            raise LatticeError(f"{x}: {times} blow-ups but {len(ks)} multiplicities")
    prefix = prefix or f"{curve}_"
    made: list[str] = []
    for i in range(times):
        inc = [(curve, mults[i])]
        if made:
            inc.append((made[-1], 1))
        for x, ks in through.items():
            if ks[i]:
                if any(x == c for c, _ in inc):
                    raise LatticeError(f"{x} already passes through centre {i + 1}")
                inc.append((x, ks[i]))
        nm = f"{prefix}{i + 1}"
        state = blow_up(state, inc, nm)
        made.append(nm)
    return state, made


# -- contraction -----------------------------------------------------------


@dataclass(frozen=True)
class Component:
    names: tuple[str, ...]
    graph: DualGraph
    discrepancies: DiscrepancyVector


@dataclass(frozen=True)
class SingularModel:
    state: SurfaceState
    contracted: tuple[str, ...]
    components: tuple[Component, ...] = field(default=())

    @property
    def gamma(self) -> dict[str, Fraction]:
        return {n: e for c in self.components for n, e in zip(c.names, c.discrepancies.values)}

    def pullback_canonical(self) -> tuple[Fraction, ...]:
        """Class vector of ``K_Y + Gamma``."""
        vec = [Fraction(x) for x in self.state.canonical]
        for n, e in self.gamma.items():
            for i, x in enumerate(self.state.cls(n)):
                vec[i] += e * x
        return tuple(vec)


def contract(state: SurfaceState, names: Iterable[str]) -> SingularModel:
    names = tuple(names)
    if len(set(names)) != len(names):
        raise LatticeError("a curve is listed twice in the contraction")
    for n in names:
        state.cls(n)
        if genus(state, n) != 0:
            raise LatticeError(f"cannot contract {n}: genus {genus(state, n)}")
        if self_int(state, n) > -2:
            raise LatticeError(f"cannot contract {n}: self-intersection {self_int(state, n)} > -2")
    edges = []
    for i, a in enumerate(names):
        for j in range(i + 1, len(names)):
            b = names[j]
            p = pairing(state, a, b)
            if p < 0 or p > 1:
                raise LatticeError(f"cannot contract {a}, {b}: they meet with intersection {p}")
            if p == 1:
                edges.append((i, j))
    # connected components by union-find
    parent = list(range(len(names)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in edges:
        ri, rj = find(i), find(j)
        if ri == rj:
            raise LatticeError(f"contracted curves contain a cycle through {names[i]}, {names[j]}")
        parent[ri] = rj
    groups: dict[int, list[int]] = {}
    for i in range(len(names)):
        groups.setdefault(find(i), []).append(i)
    comps = []
    for members in sorted(groups.values()):
        idx = {v: k for k, v in enumerate(members)}
        graph = DualGraph(
            tuple(-self_int(state, names[v]) for v in members),
            frozenset((idx[i], idx[j]) for i, j in edges if i in idx and j in idx),
        )
        cnames = tuple(names[v] for v in members)
        if not dualgraph.is_negative_definite(dualgraph.intersection_matrix(graph)):
            raise LatticeError(f"curves {', '.join(cnames)} are not negative definite")
        comps.append(Component(cnames, graph, dualgraph.discrepancies(graph)))
    return SingularModel(state, names, tuple(comps))


def dynkin_type(model: SingularModel) -> DynkinType:
    return DynkinType(tuple(c.graph for c in model.components))


def picard_rank(model: SingularModel) -> int:
    return model.state.rank - len(model.contracted)


def anticanonical_selfint(model: SingularModel) -> Fraction:
    st = model.state
    return st.pair_vectors(model.pullback_canonical(), st.canonical)


def anticanonical_degree(model: SingularModel, name: str) -> Fraction:
    if name in model.contracted:
        raise LatticeError(f"{name} is contracted")
    st = model.state
    return -st.pair_vectors(model.pullback_canonical(), st.cls(name))


def pullback_degree(model: SingularModel, vec: Sequence[int]) -> Fraction:
    """``-(K_Y + Gamma).v`` for an arbitrary class vector (no contraction check)."""
    return -model.state.pair_vectors(model.pullback_canonical(), vec)


def is_rank_one_log_dp(model: SingularModel) -> tuple[bool, Report]:
    """Rank-one ampleness proxy: rank 1, klt, (-K)^2 > 0, positive on every kept curve."""
    rep = Report("is_rank_one_log_dp")
    rep.add("rank", "picard_rank", 1, picard_rank(model))
    for c in model.components:
        rep.add(f"klt/{c.graph}", ",".join(c.names), True, c.discrepancies.klt)
    ksq = anticanonical_selfint(model)
    rep.add("ksq>0", "K_S^2", True, ksq > 0)
    for n in model.state.names:
        if n not in model.contracted:
            rep.add(f"degree>0/{n}", n, True, anticanonical_degree(model, n) > 0)
    return rep.ok, rep
