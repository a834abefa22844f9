"""Plane curves over Q and F_p, local intersection multiplicities.

Polynomials are sparse dictionaries ``{(a, b, c): coeff}`` for
``coeff * x^a y^b z^c``.  Coefficients live in a :class:`Field`: Fractions
for characteristic 0, integers in ``[0, p)`` otherwise.

Local intersection numbers use Fulton's algorithm on the dehomogenization at
the point.  If the running total ever exceeds ``deg F * deg G`` the curves
must share a component through the point and :data:`INFINITE` is returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import re
from typing import Mapping, Sequence

from kltbench.rational import parse_rational
from kltbench.report import Report


class PolyError(ValueError):
    pass


class _Infinite:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "INFINITE"

    __str__ = __repr__


INFINITE = _Infinite()


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class Field:
    """``Field(0)`` is Q, ``Field(p)`` is F_p."""

    char: int = 0

    def __post_init__(self):
        if self.char != 0 and not is_prime(self.char):
            raise PolyError(f"characteristic {self.char} is not 0 or a prime")

    def __str__(self) -> str:
        return "Q" if self.char == 0 else f"F_{self.char}"

    def __call__(self, value):
        """Coerce an int, Fraction or ``"p/q"`` string into the field."""
        if isinstance(value, str):
            value = parse_rational(value)
        q = Fraction(value)
        if self.char == 0:
            return q
        den = q.denominator % self.char
        if den == 0:
            raise PolyError(f"{q} has no image in F_{self.char}")
        return q.numerator * pow(den, -1, self.char) % self.char

    def zero(self):
        return self(0)

    def one(self):
        return self(1)

    def add(self, a, b):
        return a + b if self.char == 0 else (a + b) % self.char

    def sub(self, a, b):
        return a - b if self.char == 0 else (a - b) % self.char

    def mul(self, a, b):
        return a * b if self.char == 0 else (a * b) % self.char

    def neg(self, a):
        return -a if self.char == 0 else (-a) % self.char

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(a) if self.char == 0 else pow(a, -1, self.char)

    def elements(self):
        """All elements of F_p (finite fields only)."""
        if self.char == 0:
            raise PolyError("Q is infinite")
        return range(self.char)


Q = Field(0)


# -- sparse polynomials in any number of variables ---------------------------

Terms = dict  # exponent tuple -> nonzero field element


def _clean(field: Field, terms: Mapping) -> Terms:
    return {e: c for e, c in terms.items() if c != 0}


def _padd(field, a: Terms, b: Terms) -> Terms:
    out = dict(a)
    for e, c in b.items():
        out[e] = field.add(out.get(e, field.zero()), c)
    return _clean(field, out)


def _pscale(field, a: Terms, c) -> Terms:
    return _clean(field, {e: field.mul(v, c) for e, v in a.items()})


def _psub(field, a: Terms, b: Terms) -> Terms:
    return _padd(field, a, _pscale(field, b, field.neg(field.one())))


def _pmul(field, a: Terms, b: Terms) -> Terms:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = field.add(out.get(e, field.zero()), field.mul(ca, cb))
    return _clean(field, out)


def _ppow(field, a: Terms, n: int, nvars: int) -> Terms:
    out = {(0,) * nvars: field.one()}
    for _ in range(n):
        out = _pmul(field, out, a)
    return out


@dataclass(frozen=True)
class ProjPoint:
    coords: tuple
    field: Field = Q

    def __post_init__(self):
        c = tuple(self.field(v) for v in self.coords)
        if len(c) != 3:
            raise PolyError("a projective point needs three coordinates")
        if all(v == 0 for v in c):
            raise PolyError("[0:0:0] is not a point")
        last = next(v for v in reversed(c) if v != 0)
        inv = self.field.inv(last)
        object.__setattr__(self, "coords", tuple(self.field.mul(v, inv) for v in c))

    def __str__(self) -> str:
        return "[" + ":".join(_fmt(v) for v in self.coords) + "]"


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return str(v)


def point(x, y, z, field: Field = Q) -> ProjPoint:
    return ProjPoint((x, y, z), field)


@dataclass(frozen=True)
class HomPoly:
    """Nonzero homogeneous polynomial in x, y, z."""

    terms: tuple[tuple[tuple[int, int, int], object], ...]
    field: Field = Q

    def __post_init__(self):
        if not self.terms:
            raise PolyError("the zero polynomial is not a curve")
        degs = {sum(e) for e, _ in self.terms}
        if len(degs) != 1:
            raise PolyError("polynomial is not homogeneous")

    @classmethod
    def from_dict(cls, terms: Mapping, field: Field = Q) -> "HomPoly":
        clean = _clean(field, {tuple(e): field(c) for e, c in terms.items()})
        return cls(tuple(sorted(clean.items(), reverse=True)), field)

    @classmethod
    def parse(cls, text: str, field: Field = Q) -> "HomPoly":
        return cls.from_dict(parse_terms(text), field)

    def as_dict(self) -> Terms:
        return dict(self.terms)

    @property
    def degree(self) -> int:
        return sum(self.terms[0][0])

    def __call__(self, p: ProjPoint | Sequence):
        vals = p.coords if isinstance(p, ProjPoint) else tuple(self.field(v) for v in p)
        f = self.field
        total = f.zero()
        for (a, b, c), coef in self.terms:
            term = coef
            for v, k in zip(vals, (a, b, c)):
                for _ in range(k):
                    term = f.mul(term, v)
            total = f.add(total, term)
        return total

    def __mul__(self, other: "HomPoly") -> "HomPoly":
        return HomPoly.from_dict(_pmul(self.field, self.as_dict(), other.as_dict()), self.field)

    def reduce(self, field: Field) -> "HomPoly":
        """Coefficients mapped into another field (Q -> F_p reduction)."""
        if self.field.char != 0:
            raise PolyError("only polynomials over Q can be reduced")
        return HomPoly.from_dict({e: field(c) for e, c in self.terms}, field)

    def substitute(self, forms: Sequence[Mapping]) -> "HomPoly":
        """``F(l_x, l_y, l_z)`` for linear forms given as coefficient triples or dicts."""
        f = self.field
        lin = []
        for form in forms:
            if isinstance(form, Mapping):
                lin.append(_clean(f, {tuple(e): f(c) for e, c in form.items()}))
            else:
                lin.append(_clean(f, {(1, 0, 0): f(form[0]), (0, 1, 0): f(form[1]), (0, 0, 1): f(form[2])}))
        out: Terms = {}
        for (a, b, c), coef in self.terms:
            t = {(0, 0, 0): coef}
            for form, k in zip(lin, (a, b, c)):
                t = _pmul(f, t, _ppow(f, form, k, 3))
            out = _padd(f, out, t)
        return HomPoly.from_dict(out, f)

    def gradient(self, p: ProjPoint) -> tuple:
        f = self.field
        out = []
        for i in range(3):
            d: Terms = {}
            for e, c in self.terms:
                if e[i]:
                    ne = list(e)
                    ne[i] -= 1
                    d[tuple(ne)] = f.add(d.get(tuple(ne), f.zero()), f.mul(c, f(e[i])))
            d = _clean(f, d)
            out.append(HomPoly.from_dict(d, f)(p) if d else f.zero())
        return tuple(out)

    def __str__(self) -> str:
        parts = []
        for (a, b, c), coef in self.terms:
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip("xyz", (a, b, c)) if k
            )
            parts.append(f"{_fmt(coef)}*{mono}" if mono else _fmt(coef))
        return " + ".join(parts)


_TERM = re.compile(r"\s*([+-])?\s*([^+-]+)")
_FACTOR = re.compile(r"^(?:(\d+(?:/\d+)?)|([xyz])(?:\^(\d+))?)$")


def parse_terms(text: str) -> dict[tuple[int, int, int], Fraction]:
    """Parse ``coef*x^a*y^b*z^c`` terms joined by ``+``/``-``."""
    s = text.strip()
    if not s:
        raise PolyError("empty polynomial")
    out: dict = {}
    pos = 0
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or (m.group(1) is None and not first):
            raise PolyError(f"cannot parse polynomial near position {pos}: {text!r}")
        first = False
        sign = -1 if m.group(1) == "-" else 1
        coef = Fraction(sign)
        exps = [0, 0, 0]
        for factor in m.group(2).split("*"):
            factor = factor.strip()
            fm = _FACTOR.match(factor)
            if not fm:
                raise PolyError(f"bad factor {factor!r} in {text!r}")
            if fm.group(1):
                coef *= parse_rational(fm.group(1))
            else:
                exps["xyz".index(fm.group(2))] += int(fm.group(3) or 1)
        e = tuple(exps)
        out[e] = out.get(e, Fraction(0)) + coef
        pos = m.end()
    return {e: c for e, c in out.items() if c != 0}


# -- Fulton's algorithm ------------------------------------------------------


def _dehomogenize(F: HomPoly, p: ProjPoint) -> Terms:
    """Affine polynomial in two variables with ``p`` moved to the origin."""
    f = F.field
    c = p.coords
    k = max(i for i in range(3) if c[i] != 0)  # normalized: c[k] == 1
    free = [i for i in range(3) if i != k]
    # substitute X_free[j] -> u_j + c[free[j]], X_k -> 1
    out: Terms = {}
    for e, coef in F.terms:
        t = {(0, 0): coef}
        for j, i in enumerate(free):
            shift = _clean(f, {(1, 0) if j == 0 else (0, 1): f.one(), (0, 0): c[i]})
            t = _pmul(f, t, _ppow(f, shift, e[i], 2))
        out = _padd(f, out, t)
    return out


def _x_part(a: Terms) -> dict[int, object]:
    return {e[0]: c for e, c in a.items() if e[1] == 0}


def _total_degree(a: Terms) -> int:
    return max((sum(e) for e in a), default=0)


def _affine_mult(field: Field, F: Terms, G: Terms, bound: int):
    total = 0
    stack = [(F, G)]
    while stack:
        F, G = stack.pop()
        if not F or not G:
            return INFINITE
        if F.get((0, 0), 0) != 0 or G.get((0, 0), 0) != 0:
            continue
        F0, G0 = _x_part(F), _x_part(G)
        if not F0 and not G0:
            return INFINITE  # y divides both
        if not F0:
            F, G, F0, G0 = G, F, G0, F0
        if not G0:
            # G = y * G1;  I(y, F) = ord_x F(x, 0)
            total += min(F0)
            if total > bound:
                return INFINITE
            G1 = {(e[0], e[1] - 1): c for e, c in G.items()}
            stack.append((F, G1))
            continue
        r, s = max(F0), max(G0)
        if r > s:
            F, G, F0, G0, r, s = G, F, G0, F0, s, r
        # G <- lc(F0) G - lc(G0) x^(s-r) F lowers deg G(x,0)
        shifted = {(e[0] + s - r, e[1]): c for e, c in F.items()}
        G = _psub(field, _pscale(field, G, F0[r]), _pscale(field, shifted, G0[s]))
        stack.append((F, G))
    return total


def intersection_multiplicity(F: HomPoly, G: HomPoly, p: ProjPoint):
    """``I_p(F, G)``: a nonnegative int, or :data:`INFINITE`."""
    if F.field != G.field or F.field != p.field:
        raise PolyError("polynomials and point must share a field")
    f = F.field
    Fa, Ga = _dehomogenize(F, p), _dehomogenize(G, p)
    bound = max(1, F.degree * G.degree)
    return _affine_mult(f, Fa, Ga, bound)


# -- lines, conics, binary forms --------------------------------------------


def line_through(p: ProjPoint, q: ProjPoint) -> HomPoly:
    """The line joining two distinct points (cross product)."""
    if p == q:
        raise PolyError("points coincide")
    f = p.field
    a, b = p.coords, q.coords
    cross = (
        f.sub(f.mul(a[1], b[2]), f.mul(a[2], b[1])),
        f.sub(f.mul(a[2], b[0]), f.mul(a[0], b[2])),
        f.sub(f.mul(a[0], b[1]), f.mul(a[1], b[0])),
    )
    return HomPoly.from_dict({(1, 0, 0): cross[0], (0, 1, 0): cross[1], (0, 0, 1): cross[2]}, f)


def _line_basis(L: HomPoly) -> tuple[tuple, tuple]:
    if L.degree != 1:
        raise PolyError("not a line")
    f = L.field
    d = L.as_dict()
    a = [d.get((1, 0, 0), f.zero()), d.get((0, 1, 0), f.zero()), d.get((0, 0, 1), f.zero())]
    k = next(i for i in range(3) if a[i] != 0)
    others = [i for i in range(3) if i != k]
    basis = []
    for j in others:
        v = [f.zero()] * 3
        v[j] = f.one()
        v[k] = f.neg(f.mul(a[j], f.inv(a[k])))
        basis.append(tuple(v))
    return basis[0], basis[1]


def restrict_to_line(F: HomPoly, L: HomPoly) -> tuple[dict[int, object], tuple, tuple]:
    """Binary form ``F(lam P + mu R)`` as ``{power of lam: coeff}`` plus the basis."""
    P, R = _line_basis(L)
    f = F.field
    forms = [_clean(f, {(1, 0): P[i], (0, 1): R[i]}) for i in range(3)]
    out: Terms = {}
    for e, coef in F.terms:
        t = {(0, 0): coef}
        for i in range(3):
            t = _pmul(f, t, _ppow(f, forms[i], e[i], 2))
        out = _padd(f, out, t)
    return {e[0]: c for e, c in out.items()}, P, R


def line_meets_conic(Q_: HomPoly, L: HomPoly):
    """Multiplicity pattern of ``Q . L``: ``(1, 1)``, ``(2,)`` or INFINITE."""
    if Q_.degree != 2:
        raise PolyError("not a conic")
    form, _, _ = restrict_to_line(Q_, L)
    if not form:
        return INFINITE
    f = Q_.field
    alpha, beta, gamma = (form.get(i, f.zero()) for i in (2, 1, 0))
    if f.char == 2:
        # alpha lam^2 + gamma mu^2 is a square over the algebraic closure
        return (2,) if beta == 0 else (1, 1)
    disc = f.sub(f.mul(beta, beta), f.mul(f(4), f.mul(alpha, gamma)))
    return (2,) if disc == 0 else (1, 1)


def rational_points_on_line(L: HomPoly) -> list[ProjPoint]:
    """All F_p-points of a line: ``P`` and ``lam P + R``."""
    P, R = _line_basis(L)
    f = L.field
    pts = {ProjPoint(P, f)}
    for lam in f.elements():
        pts.add(ProjPoint(tuple(f.add(f.mul(lam, P[i]), R[i]) for i in range(3)), f))
    return sorted(pts, key=lambda q: q.coords)


# -- the special configuration ------------------------------------------------


@dataclass(frozen=True)
class SpecialConfig:
    field: Field
    C: HomPoly
    Q: HomPoly
    M: HomPoly
    t: ProjPoint
    u: ProjPoint
    param: tuple[dict, dict, dict]  # x, y, z as binary forms in (tau, sigma)
    t_param: tuple[int, int]


def _bform(d: Mapping[tuple[int, int], int], f: Field) -> Terms:
    return _clean(f, {e: f(c) for e, c in d.items()})


def special_config(field: Field) -> SpecialConfig:
    if field.char == 3:
        C = HomPoly.parse("x^3 - y^2*z - x^2*y", field)
        Q_ = HomPoly.parse("-x^2 + z^2 - y*z - z*x", field)
        t = point(0, 1, 0, field)
        # (mu^2 nu, mu^3, nu^3 - mu nu^2) with (mu, nu) = (tau, sigma)
        param = ({(2, 1): 1}, {(3, 0): 1}, {(0, 3): 1, (1, 2): -1})
        t_param = (1, 0)
    else:
        C = HomPoly.parse("x^3 - y^2*z", field)
        Q_ = HomPoly.parse("-45*x^2 - 5*y^2 + z^2 + 24*x*y + 40*y*z - 15*z*x", field)
        t = point(1, 1, 1, field)
        param = ({(2, 1): 1}, {(3, 0): 1}, {(0, 3): 1})
        t_param = (1, 1)
    M = HomPoly.parse("y", field)
    u = point(0, 0, 1, field)
    return SpecialConfig(field, C, Q_, M, t, u,
                         tuple(_bform(p, field) for p in param), t_param)


def _compose_binary(F: HomPoly, param) -> Terms:
    f = F.field
    out: Terms = {}
    for e, coef in F.terms:
        t = {(0, 0): coef}
        for form, k in zip(param, e):
            t = _pmul(f, t, _ppow(f, form, k, 2))
        out = _padd(f, out, t)
    return out


def _divide_linear(field: Field, B: Terms, root: tuple[int, int]) -> Terms | None:
    """``B / (s0*tau - t0*sigma)`` if exact, else None."""
    t0, s0 = (field(v) for v in root)
    deg = max(sum(e) for e in B)
    coeffs = [B.get((i, deg - i), field.zero()) for i in range(deg + 1)]  # tau^i sigma^(deg-i)
    # synthetic division in the dehomogenized variable that avoids the root at infinity
    if s0 != 0:
        a = field.mul(t0, field.inv(s0))  # root tau/sigma = a, divide by (tau - a sigma)
        q = [field.zero()] * deg
        rem = coeffs[deg]
        for i in range(deg - 1, -1, -1):
            q[i] = rem
            rem = field.add(coeffs[i], field.mul(a, rem))
        if rem != 0:
            return None
        return _clean(field, {(i, deg - 1 - i): q[i] for i in range(deg)})
    # root (1:0): divisible by sigma
    if coeffs[deg] != 0:
        return None
    return _clean(field, {(i, deg - 1 - i): coeffs[i] for i in range(deg)})


def residual_point(cfg: SpecialConfig) -> tuple[int, ProjPoint]:
    """Order of the root of ``Q o param`` at t, and the remaining point s."""
    f = cfg.field
    B = _compose_binary(cfg.Q, cfg.param)
    if not B:
        raise PolyError("Q contains C")
    k = 0
    while True:
        nxt = _divide_linear(f, B, cfg.t_param)
        if nxt is None:
            break
        B, k = nxt, k + 1
        if not B or max(sum(e) for e in B) == 0:
            break
    if k == 6:
        return k, cfg.t
    if max(sum(e) for e in B) != 1:
        raise PolyError("residual form is not linear")
    a, b = B.get((1, 0), f.zero()), B.get((0, 1), f.zero())
    tau, sigma = f.neg(b), a  # root of a*tau + b*sigma
    coords = []
    for form in cfg.param:
        val = f.zero()
        for (i, j), c in form.items():
            term = c
            for _ in range(i):
                term = f.mul(term, tau)
            for _ in range(j):
                term = f.mul(term, sigma)
            val = f.add(val, term)
        coords.append(val)
    return k, ProjPoint(tuple(coords), f)


def verify_special_config(field: Field | int) -> Report:
    if isinstance(field, int):
        field = Field(field)
    p = field.char
    cfg = special_config(field)
    C, Q_, M, t, u = cfg.C, cfg.Q, cfg.M, cfg.t, cfg.u
    rep = Report(f"curves verify-config --char {p}")
    coords = "set 2" if p == 3 else "set 1"
    rep.add("t-on-C", f"{coords} t={t}", 0, C(t))
    rep.add("t-on-Q", f"{coords} t={t}", 0, Q_(t))
    rep.add("u-cusp-of-C", f"u={u}", (0, 0, 0), C.gradient(u))
    rep.add("I_u(C,M_u)", f"u={u}", 3, intersection_multiplicity(C, M, u))
    I_t = intersection_multiplicity(C, Q_, t)
    rep.add("I_t(C,Q)>=5", f"t={t}", True, I_t is not INFINITE and I_t >= 5)
    order, s = residual_point(cfg)
    rep.add("I_t(C,Q)=root-order", f"t={t}", order, I_t)
    rep.add("I_t(C,Q)", f"t={t}", 6 if p == 2 else 5, I_t)
    rep.add("s-on-C-and-Q", f"s={s}", (0, 0), (C(s), Q_(s)))
    rep.add("s=t", f"s={s}", p == 2, s == t)
    if s != t:
        rep.add("I_s+I_t=6", f"s={s}", 6, I_t + intersection_multiplicity(C, Q_, s))
    m_tangent = line_meets_conic(Q_, M) == (2,)
    rep.add("M_u-tangent-to-Q", str(M), p == 5, m_tangent)
    L_su = line_through(s, u)
    su_tangent = line_meets_conic(Q_, L_su) == (2,) and intersection_multiplicity(Q_, L_su, s) == 2
    rep.add("L_su-tangent-to-Q-at-s", str(L_su), p == 5, su_tangent)
    L_tu = line_through(t, u)
    rep.add("Q.L_tu-pattern", str(L_tu), (1, 1), line_meets_conic(Q_, L_tu))
    return rep
