"""Line-oriented construction scripts for :mod:`kltbench.lattice`.

::

    base p2                              # or: base hirzebruch 2 / base abstract file.json
    curve C class 3 genus 1              # d;m1,m2,... or raw coefficients c1 c2 ...
    blowup (C:1, Q:1) as x               # one centre; "as" is optional
    blowup_along C x3 mults 2,1,1 as u through M:1,1,0 u1:0,0,1
    contract C, Q, M
    expect dynkin "[3,2^2]+2[3]"
    expect degree x 2/7
    expect ksq 2/15
    expect rank 1
    expect ldp true

``#`` starts a comment.  Unknown curves and syntax errors raise
:class:`ConstructionError`; failed expectations are report entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
import re
import shlex

from kltbench import dualgraph, lattice
from kltbench.lattice import LatticeError, SingularModel, SurfaceState
from kltbench.rational import parse_rational
from kltbench.report import Report


class ConstructionError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


@dataclass
class ConstructionResult:
    state: SurfaceState
    model: SingularModel | None
    report: Report


_NAME = r"[A-Za-z_][A-Za-z0-9_']*"
_INCIDENCE = re.compile(rf"^({_NAME})\s*:\s*(\d+)$")


def _ints(text: str, line: int) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConstructionError(f"expected comma-separated integers, got {text!r}", line) from None


def _name(tok: str, line: int) -> str:
    if not re.fullmatch(_NAME, tok):
        raise ConstructionError(f"bad curve name {tok!r}", line)
    return tok


class _Runner:
    def __init__(self, origin: Path | None, label: str):
        self.origin = origin
        self.state: SurfaceState | None = None
        self.model: SingularModel | None = None
        self.report = Report(f"construct {label}")

    def need_state(self, line: int) -> SurfaceState:
        if self.state is None:
            raise ConstructionError("no base surface declared", line)
        return self.state

    def need_model(self, line: int) -> SingularModel:
        if self.model is None:
            raise ConstructionError("expectation needs a preceding contract line", line)
        return self.model

    # -- statements --

    def do_base(self, args: str, line: int):
        if self.state is not None:
            raise ConstructionError("base declared twice", line)
        parts = args.split()
        if parts == ["p2"]:
            self.state = lattice.new_surface(lattice.projective_plane())
        elif len(parts) == 2 and parts[0] == "hirzebruch" and parts[1].isdigit():
            self.state = lattice.new_surface(lattice.hirzebruch(int(parts[1])))
        elif len(parts) == 2 and parts[0] == "abstract":
            path = Path(parts[1])
            if not path.is_absolute() and self.origin is not None:
                path = self.origin / path
            try:
                self.state = lattice.new_surface(lattice.load_abstract_base(path))
            except OSError as exc:
                raise ConstructionError(f"cannot read {path}: {exc.strerror}", line) from None
        else:
            raise ConstructionError(f"unknown base {args!r}", line)

    def do_curve(self, args: str, line: int):
        st = self.need_state(line)
        m = re.fullmatch(rf"({_NAME})\s+class\s+(.+?)(?:\s+genus\s+(\d+))?", args)
        if not m:
            raise ConstructionError("expected: curve NAME class ... [genus g]", line)
        name, spec, g = m.group(1), m.group(2).strip(), m.group(3)
        if ";" in spec:
            d, _, rest = spec.partition(";")
            cls = lattice.plane_class(st, int(d), _ints(rest, line))
        elif re.fullmatch(r"-?\d+", spec) and st.base.basis == ("H",):
            cls = lattice.plane_class(st, int(spec))
        else:
            cls = tuple(_ints(spec.replace(" ", ","), line))
        self.state = lattice.declare_curve(st, name, cls, int(g) if g is not None else None)

    def do_blowup(self, args: str, line: int):
        st = self.need_state(line)
        m = re.fullmatch(rf"\((.*)\)\s*(?:as\s+({_NAME}))?", args)
        if not m:
            raise ConstructionError("expected: blowup (NAME:m, ...) [as NAME]", line)
        inc = []
        for item in m.group(1).split(","):
            item = item.strip()
            if not item:
                continue
            mi = _INCIDENCE.match(item)
            if not mi:
                raise ConstructionError(f"bad incidence {item!r}", line)
            inc.append((mi.group(1), int(mi.group(2))))
        self.state = lattice.blow_up(st, inc, m.group(2))

    def do_blowup_along(self, args: str, line: int):
        st = self.need_state(line)
        toks = args.split()
        if len(toks) < 2 or not re.fullmatch(r"x\d+", toks[1]):
            raise ConstructionError("expected: blowup_along NAME xR ...", line)
        curve, times = _name(toks[0], line), int(toks[1][1:])
        mults = prefix = None
        through: dict[str, list[int]] = {}
        i = 2
        while i < len(toks):
            key = toks[i]
            if key == "mults" and i + 1 < len(toks):
                mults = _ints(toks[i + 1], line)
                i += 2
            elif key == "as" and i + 1 < len(toks):
                prefix = _name(toks[i + 1], line)
                i += 2
            elif key == "through":
                i += 1
                while i < len(toks) and toks[i] not in ("mults", "as", "through"):
                    nm, sep, ks = toks[i].partition(":")
                    if not sep:
                        raise ConstructionError(f"bad through item {toks[i]!r}", line)
                    through[_name(nm, line)] = _ints(ks, line)
                    i += 1
            else:
                raise ConstructionError(f"unexpected {key!r}", line)
        self.state, _ = lattice.blow_up_along(st, curve, times, mults, prefix, through)

    def do_contract(self, args: str, line: int):
        st = self.need_state(line)
        names = [_name(n.strip(), line) for n in args.split(",") if n.strip()]
        try:
            self.model = lattice.contract(st, names)
        except LatticeError as exc:
            if "unknown curve" in str(exc):
                raise
            self.report.add(f"contract:{line}", ",".join(names), "valid", str(exc), "fail")
            self.model = None

    def do_expect(self, args: str, line: int):
        try:
            toks = shlex.split(args)
        except ValueError as exc:
            raise ConstructionError(str(exc), line) from None
        if not toks:
            raise ConstructionError("empty expect", line)
        kind, rest = toks[0], toks[1:]
        rep = self.report
        if kind == "dynkin" and len(rest) == 1:
            try:
                want = dualgraph.parse_dynkin(rest[0])
            except ValueError as exc:
                raise ConstructionError(str(exc), line) from None
            model = self.need_model(line)
            rep.add("dynkin", rest[0], str(want), str(lattice.dynkin_type(model)))
        elif kind == "degree" and len(rest) == 2:
            model = self.need_model(line)
            name = _name(rest[0], line)
            model.state.cls(name)
            rep.add(f"degree/{name}", name, self._q(rest[1], line),
                    lattice.anticanonical_degree(model, name))
        elif kind == "ksq" and len(rest) == 1:
            model = self.need_model(line)
            rep.add("ksq", "K_S^2", self._q(rest[0], line), lattice.anticanonical_selfint(model))
        elif kind == "rank" and len(rest) == 1 and rest[0].isdigit():
            model = self.need_model(line)
            rep.add("rank", "picard_rank", int(rest[0]), lattice.picard_rank(model))
        elif kind == "ldp" and len(rest) == 1 and rest[0] in ("true", "false"):
            model = self.need_model(line)
            ok, sub = lattice.is_rank_one_log_dp(model)
            failing = [c.id for c in sub.checks if c.status == "fail"]
            rep.add("ldp", ";".join(failing) or "rank-one proxy", rest[0] == "true", ok)
        elif kind == "genus" and len(rest) == 2 and rest[1].isdigit():
            st = self.need_state(line)
            rep.add(f"genus/{rest[0]}", rest[0], int(rest[1]), lattice.genus(st, rest[0]))
        elif kind == "selfint" and len(rest) == 2:
            st = self.need_state(line)
            rep.add(f"selfint/{rest[0]}", rest[0], int(rest[1]), lattice.self_int(st, rest[0]))
        else:
            raise ConstructionError(f"unknown expectation {args!r}", line)

    @staticmethod
    def _q(text: str, line: int) -> Fraction:
        try:
            return parse_rational(text)
        except ValueError as exc:
            raise ConstructionError(str(exc), line) from None

    def finish(self):
        """Append the Noether identity whenever the model is rank one and klt."""
        model = self.model
        if model is None or lattice.picard_rank(model) != 1:
            return
        if not all(c.discrepancies.klt for c in model.components):
            return
        ksq = lattice.anticanonical_selfint(model)
        gaps = sum((dualgraph.gap(c.graph) for c in model.components), Fraction(0))
        self.report.add("noether", str(lattice.dynkin_type(model)), Fraction(9), ksq + gaps)


_COMMANDS = {
    "base": "do_base",
    "curve": "do_curve",
    "blowup": "do_blowup",
    "blowup_along": "do_blowup_along",
    "contract": "do_contract",
    "expect": "do_expect",
}


def run_script(text: str, origin: str | Path | None = None, label: str = "<script>") -> ConstructionResult:
    runner = _Runner(Path(origin) if origin else None, label)
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        head, _, args = body.partition(" ")
        method = _COMMANDS.get(head)
        if method is None:
            raise ConstructionError(f"unknown statement {head!r}", lineno)
        try:
            getattr(runner, method)(args.strip(), lineno)
        except ConstructionError:
            raise
        except LatticeError as exc:
            raise ConstructionError(str(exc), lineno) from None
    if runner.state is None:
        raise ConstructionError("script declares no base surface")
    runner.finish()
    return ConstructionResult(runner.state, runner.model, runner.report)


def run_file(path: str | Path) -> ConstructionResult:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConstructionError(f"cannot read {path}: {exc.strerror}") from None
    return run_script(text, path.parent, path.name)
