"""Naive oracle for the Noether searches.

No pruning: for each assignment of the K^2 parameters the whole box of the
remaining variables is scanned by :func:`kltbench._kernels.box_solve`.
Variable gates become ordinary ``x <= 0`` rows, strict inequalities become
``<= bound - 1``, and the equation is scaled by a common denominator so the
kernel stays in integers.  Hits are re-verified with exact rationals.
"""

from __future__ import annotations

from fractions import Fraction
import itertools
import math

import numpy as np

from kltbench import _kernels
from kltbench.diophantine import SearchSpec, SolutionSet, get_spec


def _outer_count(spec: SearchSpec) -> int:
    return max(spec.names.index(a) for a in spec.ksq_args) + 1


def oracle_search(spec: SearchSpec | str, backend: str | None = None) -> SolutionSet:
    if isinstance(spec, str):
        spec = get_spec(spec)
    k = _outer_count(spec)
    outer, inner = spec.variables[:k], spec.variables[k:]
    lo = np.array([v.lo for v in inner], dtype=np.int64)
    hi = np.array([v.hi for v in inner], dtype=np.int64)
    inner_pos = {v.name: i for i, v in enumerate(inner)}

    found: list[tuple] = []
    scanned = 0
    for combo in itertools.product(*(range(v.lo, v.hi + 1) for v in outer)):
        fixed = dict(zip((v.name for v in outer), combo))
        ksq = spec.ksq(fixed)
        if ksq is None:
            continue
        rhs = Fraction(spec.target) - ksq
        scale = math.lcm(rhs.denominator, *(v.gap.denominator for v in inner))
        coef = np.array([int(v.gap * scale) for v in inner], dtype=np.int64)
        target = int(rhs * scale)

        rows, bounds = [], []
        for con in spec.constraints:
            row = [0] * len(inner)
            limit = con.bound - (1 if con.strict else 0)
            for name, c in con.coeffs:
                if name in fixed:
                    limit -= c * fixed[name]
                else:
                    row[inner_pos[name]] += c
            rows.append(row)
            bounds.append(limit)
        for v in inner:
            if v.active_if:
                gate, threshold = v.active_if
                gate_val = fixed.get(gate)
                if gate_val is None or gate_val < threshold:
                    if gate_val is None:
                        raise ValueError("oracle needs gates among the K^2 parameters")
                    row = [0] * len(inner)
                    row[inner_pos[v.name]] = 1
                    rows.append(row)
                    bounds.append(0)
        A = np.array(rows, dtype=np.int64).reshape(-1, len(inner))
        b = np.array(bounds, dtype=np.int64)
        sols, count = _kernels.box_solve(coef, target, A, b, lo, hi, backend=backend)
        scanned += count
        for row in sols.tolist():
            tup = combo + tuple(row)
            if not spec.admissible(dict(zip(spec.names, tup))):
                raise AssertionError(f"kernel returned an inadmissible tuple {tup}")
            found.append(tup)
    return SolutionSet(spec.id, spec.names, tuple(sorted(set(found))), scanned)


def oracle_divisibility(num, den, moduli, g_range) -> set[tuple[int, int]]:
    """Same question as :func:`diophantine.divisibility_search`, via Fractions."""
    out = set()
    for g in g_range:
        if den(g) == 0:
            continue
        q = Fraction(num(g), den(g))
        for a, d in moduli.items():
            if (q * d).denominator == 1:
                out.add((g, a))
    return out
