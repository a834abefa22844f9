"""Independent routes used only by the tests."""

from fractions import Fraction


def continuant(ws):
    """Determinant of the negated chain matrix, by the three-term recurrence."""
    prev, cur = 0, 1
    for w in ws:
        prev, cur = cur, w * cur - prev
    return cur


def chain_discrepancies(ws):
    """Coefficients of a chain from Hirzebruch-Jung continuants, no linear solve."""
    n = continuant(ws)
    return [1 - Fraction(continuant(ws[:i]) + continuant(ws[i + 1:]), n) for i in range(len(ws))]


def chain_gap(ws):
    return len(ws) + sum(e * (2 - w) for e, w in zip(chain_discrepancies(ws), ws))
