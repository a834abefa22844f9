"""Weighted dual graphs of klt surface singularities.

A vertex of weight ``n`` stands for an exceptional curve ``E`` with
``E^2 = -n`` on the minimal resolution, so every weight is at least 2.
Graphs are trees; chains and three-branched stars have a canonical bracket
form::

    [3,2^2]                 chain with weights 3,2,2
    [2;[2],[2],[2^2]]       star, centre weight 2, branches read outwards
    2[3,2]+[3]+[2^4]        a Dynkin type (multiset of graphs)

All arithmetic is exact.  The coefficient vector ``e`` of a graph solves
``M e = d`` where ``M`` is the intersection matrix and ``d_j = 2 - n_j``
(adjunction: ``K.E_j = n_j - 2`` and ``(K + sum e_i E_i).E_j = 0``).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
import json
import math
from importlib import resources
from typing import Iterable, Iterator, Mapping, Sequence

from kltbench import linalg
from kltbench.report import Report


class GraphError(ValueError):
    """Invalid dual graph (weight < 2, not a tree, unsupported shape)."""


class NotContractibleError(ValueError):
    """The intersection matrix is not negative definite."""


class DynkinParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


@dataclass(frozen=True)
class DualGraph:
    """A weighted tree; ``weights[i] = -E_i^2`` and edges join vertex indices."""

    weights: tuple[int, ...]
    edges: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        n = len(self.weights)
        if n == 0:
            raise GraphError("empty dual graph")
        for w in self.weights:
            if not isinstance(w, int) or w < 2:
                raise GraphError(f"weight {w!r} < 2")
        norm = set()
        for i, j in self.edges:
            if i == j or not (0 <= i < n and 0 <= j < n):
                raise GraphError(f"bad edge {(i, j)}")
            norm.add((min(i, j), max(i, j)))
        if len(norm) != n - 1:
            raise GraphError("dual graph is not a tree")
        object.__setattr__(self, "edges", frozenset(norm))
        seen = {0}
        stack = [0]
        adj = self.adjacency()
        while stack:
            for nb in adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        if len(seen) != n:
            raise GraphError("dual graph is not connected")

    @classmethod
    def chain(cls, weights: Iterable[int]) -> "DualGraph":
        weights = tuple(weights)
        return cls(weights, frozenset((i, i + 1) for i in range(len(weights) - 1)))

    @classmethod
    def star(cls, center: int, branches: Sequence[Sequence[int]]) -> "DualGraph":
        """Centre vertex first, then each branch read outwards from the centre."""
        if len(branches) != 3 or any(len(b) == 0 for b in branches):
            raise GraphError("a star needs exactly three nonempty branches")
        weights = [center]
        edges = []
        for branch in branches:
            prev = 0
            for w in branch:
                weights.append(w)
                edges.append((prev, len(weights) - 1))
                prev = len(weights) - 1
        return cls(tuple(weights), frozenset(edges))

    def __len__(self) -> int:
        return len(self.weights)

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.weights]
        for i, j in sorted(self.edges):
            adj[i].append(j)
            adj[j].append(i)
        return adj

    @property
    def shape(self) -> str:
        degrees = [len(a) for a in self.adjacency()]
        if max(degrees, default=0) <= 2:
            return "chain"
        if max(degrees) == 3 and degrees.count(3) == 1:
            return "star"
        return "tree"

    def chain_order(self) -> list[int]:
        """Vertex indices along the chain, starting from the lower-indexed end."""
        if self.shape != "chain":
            raise GraphError("not a chain")
        if len(self) == 1:
            return [0]
        adj = self.adjacency()
        start = min(i for i, a in enumerate(adj) if len(a) == 1)
        order = [start]
        prev = -1
        while len(order) < len(self):
            cur = order[-1]
            nxt = next(v for v in adj[cur] if v != prev)
            prev = cur
            order.append(nxt)
        return order

    def star_parts(self) -> tuple[int, list[list[int]]]:
        """Centre index and the three branches as outward index paths."""
        if self.shape != "star":
            raise GraphError("not a star")
        adj = self.adjacency()
        center = next(i for i, a in enumerate(adj) if len(a) == 3)
        branches = []
        for first in adj[center]:
            path = [first]
            prev = center
            while True:
                nxt = [v for v in adj[path[-1]] if v != prev]
                if not nxt:
                    break
                prev = path[-1]
                path.append(nxt[0])
            branches.append(path)
        return center, branches

    def key(self) -> tuple:
        """Shape-aware weight data; equal keys mean isomorphic weighted graphs."""
        if self.shape == "chain":
            w = tuple(self.weights[i] for i in self.chain_order())
            return ("chain", min(w, w[::-1]))
        if self.shape == "star":
            c, branches = self.star_parts()
            bw = sorted(tuple(self.weights[i] for i in b) for b in branches)
            return ("star", self.weights[c], tuple(bw))
        raise GraphError("only chains and three-branched stars have a normal form")

    def canonical(self) -> "DualGraph":
        k = self.key()
        if k[0] == "chain":
            return DualGraph.chain(k[1])
        return DualGraph.star(k[1], k[2])

    def reversed(self) -> "DualGraph":
        """The chain read backwards (same graph, vertex order flipped)."""
        order = self.chain_order()
        return DualGraph.chain(self.weights[i] for i in reversed(order))

    def __str__(self) -> str:
        k = self.key()
        if k[0] == "chain":
            return "[" + _runs(k[1]) + "]"
        return f"[{k[1]};" + ",".join("[" + _runs(b) + "]" for b in k[2]) + "]"


def _runs(weights: Sequence[int]) -> str:
    parts = []
    i = 0
    while i < len(weights):
        j = i
        while j < len(weights) and weights[j] == weights[i]:
            j += 1
        parts.append(str(weights[i]) if j - i == 1 else f"{weights[i]}^{j - i}")
        i = j
    return ",".join(parts)


def _order_key(g: DualGraph):
    k = g.key()
    if k[0] == "chain":
        return (0, -len(g), tuple(-w for w in k[1]))
    return (1, -len(g), -k[1], tuple(tuple(-w for w in b) for b in k[2]))


@dataclass(frozen=True)
class DynkinType:
    """Multiset of canonical dual graphs; equality is multiset equality."""

    components: tuple[DualGraph, ...] = ()

    def __post_init__(self):
        comps = sorted((g.canonical() for g in self.components), key=_order_key)
        object.__setattr__(self, "components", tuple(comps))

    @classmethod
    def of(cls, *graphs: DualGraph | str) -> "DynkinType":
        out: list[DualGraph] = []
        for g in graphs:
            out.extend(parse_dynkin(g).components if isinstance(g, str) else [g])
        return cls(tuple(out))

    def __iter__(self) -> Iterator[DualGraph]:
        return iter(self.components)

    def __len__(self) -> int:
        return len(self.components)

    def __add__(self, other: "DynkinType") -> "DynkinType":
        return DynkinType(self.components + other.components)

    def __str__(self) -> str:
        counts = Counter(self.components)
        seen = []
        for g in self.components:
            if g not in seen:
                seen.append(g)
        return "+".join((f"{counts[g]}" if counts[g] > 1 else "") + str(g) for g in seen)


# -- parsing -----------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str, pos: int | None = None):
        raise DynkinParseError(msg, self.text, self.pos if pos is None else pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def integer(self) -> int:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.error("expected an integer")
        return int(self.text[start:self.pos])

    def dynkin(self) -> list[DualGraph]:
        graphs: list[DualGraph] = []
        if self.peek() == "":
            return graphs
        while True:
            mult = 1
            if self.peek().isdigit():
                pos = self.pos
                mult = self.integer()
                if mult < 1:
                    self.error("multiplier must be positive", pos)
            graphs.extend([self.graph()] * mult)
            if self.peek() == "+":
                self.pos += 1
                continue
            if self.peek() != "":
                self.error("unexpected character")
            return graphs

    def graph(self) -> DualGraph:
        start = self.pos
        self.expect("[")
        if self.peek() == "]":
            self.error("empty chain", start)
        items = self.items()
        if self.peek() == ";":
            self.pos += 1
            if len(items) != 1:
                self.error("star centre must be a single weight", start)
            branches = []
            for i in range(3):
                if i:
                    self.expect(",")
                bstart = self.pos
                self.expect("[")
                if self.peek() == "]":
                    self.error("star branch of length 0", bstart)
                branch = self.items()
                self.expect("]")
                if not branch:
                    self.error("star branch of length 0", bstart)
                branches.append(branch)
            self.expect("]")
            return self._make(lambda: DualGraph.star(items[0], branches), start)
        self.expect("]")
        if not items:
            self.error("chain of length 0", start)
        return self._make(lambda: DualGraph.chain(items), start)

    def _make(self, build, start):
        try:
            return build()
        except GraphError as exc:
            self.error(str(exc), start)

    def items(self) -> list[int]:
        out: list[int] = []
        while True:
            pos = self.pos
            w = self.integer()
            rep = 1
            if self.peek() == "^":
                self.pos += 1
                rep = self.integer()
            if w < 2:
                self.error(f"weight {w} < 2", pos)
            out.extend([w] * rep)
            if self.peek() != ",":
                return out
            # a comma inside a chain continues it; inside a star it may start a branch
            save = self.pos
            self.pos += 1
            if self.peek() == "[":
                self.pos = save
                return out


def parse_dynkin(text: str) -> DynkinType:
    """Parse bracket notation into a canonical :class:`DynkinType`.

    >>> str(parse_dynkin("[2,2,2,3]+[3]+[3]"))
    '[3,2^3]+2[3]'
    """
    return DynkinType(tuple(_Parser(text).dynkin()))


def parse_graph(text: str) -> DualGraph:
    """Parse a single graph; sums and multipliers are rejected."""
    parser = _Parser(text)
    g = parser.graph()
    if parser.peek() != "":
        parser.error("trailing input after graph")
    return g


def as_graph(g: DualGraph | str) -> DualGraph:
    return parse_graph(g) if isinstance(g, str) else g


# -- arithmetic --------------------------------------------------------------


@dataclass(frozen=True)
class DiscrepancyVector:
    """Per-vertex coefficients ``e_j`` of the log pullback, in vertex order."""

    values: tuple[Fraction, ...]

    @property
    def max(self) -> Fraction:
        return max(self.values)

    @property
    def klt(self) -> bool:
        return all(e < 1 for e in self.values)

    def __getitem__(self, i: int) -> Fraction:
        return self.values[i]

    def __len__(self) -> int:
        return len(self.values)


def intersection_matrix(g: DualGraph | str) -> list[list[int]]:
    g = as_graph(g)
    n = len(g)
    m = [[0] * n for _ in range(n)]
    for i, w in enumerate(g.weights):
        m[i][i] = -w
    for i, j in g.edges:
        m[i][j] = m[j][i] = 1
    return m


def is_negative_definite(m: Sequence[Sequence[int]]) -> bool:
    """Sylvester's criterion: the k-th leading minor has sign (-1)^k."""
    minors = linalg.leading_minors(m)
    return all((-1) ** (k + 1) * d > 0 for k, d in enumerate(minors))


def _checked_matrix(g: DualGraph) -> list[list[int]]:
    m = intersection_matrix(g)
    if not is_negative_definite(m):
        raise NotContractibleError(f"{g} has a non negative-definite intersection matrix")
    return m


def discrepancies(g: DualGraph | str) -> DiscrepancyVector:
    return discrepancies_with_boundary(g, None)


def discrepancies_with_boundary(
    g: DualGraph | str, t: Sequence | Mapping[int, object] | None
) -> DiscrepancyVector:
    """Coefficients for ``K + B`` where ``t_j = B.E_j`` (boundary incidence).

    Solves ``M e = d - t``.  ``t`` is a per-vertex sequence or a sparse
    ``{vertex: value}`` mapping; every entry must be nonnegative.
    """
    g = as_graph(g)
    m = _checked_matrix(g)
    n = len(g)
    tv = [Fraction(0)] * n
    if isinstance(t, Mapping):
        for i, val in t.items():
            tv[i] = Fraction(val)
    elif t is not None:
        if len(t) != n:
            raise ValueError(f"boundary incidence has {len(t)} entries, graph has {n} vertices")
        tv = [Fraction(x) for x in t]
    if any(x < 0 for x in tv):
        raise ValueError("boundary incidence must be nonnegative")
    rhs = [2 - w - tj for w, tj in zip(g.weights, tv)]
    return DiscrepancyVector(tuple(linalg.solve(m, rhs)))


def coefficient(g: DualGraph | str) -> Fraction:
    """The coefficient e(x): the largest discrepancy coefficient."""
    return discrepancies(g).max


def gap(g: DualGraph | str) -> Fraction:
    """``n + sum_j e_j (2 - n_j)``; Du Val graphs give their vertex count."""
    g = as_graph(g)
    e = discrepancies(g)
    return len(g) + sum(ej * (2 - w) for ej, w in zip(e.values, g.weights))


def gap_floor(g: DualGraph | str) -> int:
    return math.floor(gap(g))


def determinant(g: DualGraph | str) -> int:
    """``|det M|``, the order of the local class group."""
    return abs(linalg.determinant(intersection_matrix(g)))


def vertex_count(g: DualGraph | str) -> int:
    return len(as_graph(g))


def spectral_value_chain(j: int, m: int) -> int:
    """Spectral value of a ``[j,2^m]`` chain met by the boundary at the far end."""
    if j < 3:
        raise ValueError("spectral value formula needs j >= 3")
    if m < 0:
        raise ValueError("m must be nonnegative")
    return (j - 2) * (m + 1)


def is_du_val(g: DualGraph | str) -> bool:
    return all(w == 2 for w in as_graph(g).weights)


def total_gap(d: DynkinType | str) -> Fraction:
    if isinstance(d, str):
        d = parse_dynkin(d)
    return sum((gap(g) for g in d), Fraction(0))


# -- table of small-coefficient gaps -----------------------------------------


def _table_rows() -> list[dict]:
    with resources.files("kltbench").joinpath("data/table_e35.json").open() as fh:
        return json.load(fh)["rows"]


def verify_table_e35() -> Report:
    """Recompute every instantiated row of the gap table against the stored fixture."""
    from kltbench.rational import parse_rational

    report = Report("table e35")
    bound = Fraction(3, 5)
    for row in _table_rows():
        for inst in row["instances"]:
            g = parse_graph(inst["graph"])
            rid = f"e35/{row['row']}/{inst['graph']}"
            report.add(rid + "/gap", inst["graph"], parse_rational(inst["gap"]), gap(g))
            report.add(rid + "/floor", inst["graph"], inst["floor"], gap_floor(g))
            c = coefficient(g)
            report.add(rid + "/coeff<3/5", inst["graph"], True, c < bound)
    return report
