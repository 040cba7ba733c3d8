"""Exact sparse linear algebra over the coefficient field.

Rows are dicts ``{column: coefficient}``.  Elimination is Gauss-Jordan over
the field of rational functions; among candidate pivots, parameter-free
entries are preferred, and every parameter-dependent pivot is recorded so the
caller can report which parameter values were assumed generic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .coef import Coef, format_coef, is_constant, to_coef


def _inv(c):
    return c.inverse() if isinstance(c, Coef) else Fraction(1) / c


def _size(c) -> int:
    if isinstance(c, Coef):
        return len(c.num) + len(c.den) + 1
    return 0


@dataclass
class Echelon:
    """Reduced row echelon form: ``rows[k]`` has a 1 in column ``pivots[k]``."""

    rows: list
    pivots: list
    ncols: int
    assumptions: list = field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def free_columns(self) -> list:
        ps = set(self.pivots)
        return [j for j in range(self.ncols) if j not in ps]

    def nullspace(self) -> list:
        """Basis of the kernel, one vector (list) per free column."""
        basis = []
        for f in self.free_columns():
            v = [0] * self.ncols
            v[f] = 1
            for row, pc in zip(self.rows, self.pivots):
                a = row.get(f, 0)
                if a != 0:
                    v[pc] = -a
            basis.append(v)
        return basis


def rref(rows: Iterable[dict], ncols: int, column_order: Sequence[int] | None = None) -> Echelon:
    work = [dict(r) for r in rows if r]
    pivots, done = [], []
    assumptions = []
    for j in (column_order if column_order is not None else range(ncols)):
        cands = [k for k, r in enumerate(work) if r.get(j, 0) != 0]
        if not cands:
            continue
        k = min(cands, key=lambda k: (not is_constant(work[k][j]), _size(work[k][j]), len(work[k]), k))
        row = work.pop(k)
        piv = row[j]
        if not is_constant(piv):
            assumptions.append(format_coef(piv))
        if piv != 1:
            inv = _inv(piv)
            row = {c: v * inv for c, v in row.items()}
        for r in work + done:
            a = r.get(j, 0)
            if a != 0:
                for c, v in row.items():
                    s = r.get(c, 0) - a * v
                    if s == 0:
                        r.pop(c, None)
                    else:
                        r[c] = s
        done.append(row)
        pivots.append(j)
        work = [r for r in work if r]
    order = sorted(range(len(pivots)), key=lambda k: pivots[k])
    return Echelon([done[k] for k in order], [pivots[k] for k in order], ncols, assumptions)


def nullspace(rows: Iterable[dict], ncols: int) -> tuple[list, list]:
    ech = rref(rows, ncols)
    return ech.nullspace(), ech.assumptions


def rank(rows: Iterable[dict], ncols: int) -> int:
    return rref(rows, ncols).rank


class InconsistentSystem(ValueError):
    pass


def solve(columns: Sequence[dict], target: dict) -> list:
    """Coefficients x with sum_j x_j columns[j] = target (free variables 0)."""
    n = len(columns)
    keys = sorted({k for c in columns for k in c} | set(target), key=repr)
    rows = []
    for k in keys:
        r = {j: c[k] for j, c in enumerate(columns) if c.get(k, 0) != 0}
        t = target.get(k, 0)
        if t != 0:
            r[n] = t
        if r:
            rows.append(r)
    ech = rref(rows, n + 1, column_order=list(range(n)))
    x = [0] * n
    for row, pc in zip(ech.rows, ech.pivots):
        x[pc] = row.get(n, 0)
    resid = _residual(columns, x, target)
    if resid:
        raise InconsistentSystem("target is not in the span of the given vectors")
    return x


def _residual(columns, x, target) -> dict:
    out = dict(target)
    for xj, c in zip(x, columns):
        if xj == 0:
            continue
        for k, v in c.items():
            s = out.get(k, 0) - xj * v
            if s == 0:
                out.pop(k, None)
            else:
                out[k] = s
    return out


def matvec(M: Sequence[Sequence], v: Sequence) -> list:
    return [sum((a * b for a, b in zip(row, v) if a != 0 and b != 0), 0) for row in M]


def transpose(M: Sequence[Sequence]) -> list:
    return [list(r) for r in zip(*M)] if M else []


def dense_rows(M: Sequence[Sequence]) -> list:
    return [{j: a for j, a in enumerate(row) if a != 0} for row in M]


def column_rank(cols: Sequence[Sequence]) -> int:
    if not cols:
        return 0
    return rank(dense_rows(transpose(cols)), len(cols))


def coerce_vector(v: Iterable) -> list:
    return [to_coef(a) if not isinstance(a, Coef) else a for a in v]
