"""Exact two-phase simplex over the rationals (Bland's rule).

Only standard form is supported: maximize ``c @ x`` subject to
``A @ x = b`` and ``x >= 0``.  Problems in this package are tiny, so a
dense tableau is perfectly adequate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .exactlinalg import as_fraction

__all__ = ["LPResult", "linear_program", "is_feasible"]


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: Optional[tuple[Fraction, ...]] = None
    value: Optional[Fraction] = None


def _pivot(tab, basis, row, col):
    pr = tab[row]
    inv = 1 / pr[col]
    tab[row] = pr = [v * inv for v in pr]
    for i, r in enumerate(tab):
        if i != row and r[col] != 0:
            f = r[col]
            tab[i] = [a - f * b for a, b in zip(r, pr)]
    basis[row] = col


def _run(tab, basis, obj_row, allowed):
    """Maximize the objective stored (negated reduced costs) in ``obj_row``."""
    m = len(basis)
    while True:
        z = tab[obj_row]
        col = next((j for j in allowed if z[j] < 0), None)
        if col is None:
            return "optimal"
        best = None
        for i in range(m):
            a = tab[i][col]
            if a > 0:
                ratio = tab[i][-1] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return "unbounded"
        _pivot(tab, basis, best[1], col)


def linear_program(c: Sequence, a: Sequence[Sequence], b: Sequence) -> LPResult:
    """Maximize ``c @ x`` subject to ``a @ x = b``, ``x >= 0`` exactly."""
    rows = [[as_fraction(v) for v in r] for r in a]
    rhs = [as_fraction(v) for v in b]
    n = len(c)
    if any(len(r) != n for r in rows) or len(rows) != len(rhs):
        raise ValueError("dimension mismatch in linear program")
    m = len(rows)
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]

    # columns: n structural, m artificial, then rhs
    tab = []
    for i in range(m):
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        tab.append(rows[i] + art + [rhs[i]])
    basis = [n + i for i in range(m)]
    # phase-1 objective: maximize -sum(artificials)
    phase1 = [Fraction(0)] * (n + m + 1)
    for i in range(m):
        phase1 = [p - t for p, t in zip(phase1, tab[i])]
    for i in range(m):
        phase1[n + i] = Fraction(0)
    tab.append(phase1)
    _run(tab, basis, m, range(n))
    if tab[m][-1] != 0:
        return LPResult("infeasible")

    # drive artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= n:
            col = next((j for j in range(n) if tab[i][j] != 0), None)
            if col is not None:
                _pivot(tab, basis, i, col)
    keep = [i for i in range(m) if basis[i] < n]
    tab = [tab[i] for i in keep]
    basis = [basis[i] for i in keep]
    m = len(basis)

    obj = [-as_fraction(v) for v in c] + [Fraction(0)] * (len(tab[0]) - n) if tab else None
    if not tab:
        # no constraints left: x = 0 feasible, objective unbounded if any c > 0
        if any(as_fraction(v) > 0 for v in c):
            return LPResult("unbounded")
        return LPResult("optimal", tuple(Fraction(0) for _ in range(n)), Fraction(0))
    for i in range(m):
        f = obj[basis[i]]
        if f != 0:
            obj = [o - f * t for o, t in zip(obj, tab[i])]
    tab.append(obj)
    status = _run(tab, basis, m, range(n))
    if status == "unbounded":
        return LPResult("unbounded")
    x = [Fraction(0)] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = tab[i][-1]
    return LPResult("optimal", tuple(x), tab[m][-1])


def is_feasible(a: Sequence[Sequence], b: Sequence) -> bool:
    """Whether ``a @ x = b`` has a solution with ``x >= 0``."""
    n = len(a[0]) if a else 0
    if not a:
        return True
    return linear_program([0] * n, a, b).status == "optimal"
