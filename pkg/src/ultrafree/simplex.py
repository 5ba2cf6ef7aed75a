"""Exact two-phase simplex for linear programs in standard equality form.

    minimize c.x   subject to   A x = b,  x >= 0

All arithmetic is over :class:`fractions.Fraction`.  Pivoting follows Bland's
rule, so the solver terminates on every input.  Columns are supplied sparsely
as (row, coefficient) pairs because the transport programs solved here have
two nonzeros per column.

Every result is self-certified before it is returned: the primal point is
re-checked feasible against the original data, the dual point dual-feasible,
and the two objective values equal.  A failed certificate raises, it is never
papered over.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .linalg import SingularMatrixError, solve_linear

SparseColumn = Sequence[tuple[int, Fraction]]

_MAX_PIVOTS = 200_000


class LpError(RuntimeError):
    """Internal solver failure (bad basis, broken certificate)."""


class LpInfeasibleError(LpError):
    pass


class LpUnboundedError(LpError):
    pass


@dataclass(frozen=True)
class LpResult:
    x: tuple[Fraction, ...]
    value: Fraction
    dual: tuple[Fraction, ...]


def dense_columns(rows: Sequence[Sequence[Fraction]]) -> list[list[tuple[int, Fraction]]]:
    """Convert a dense row-major matrix into the sparse column format."""
    if not rows:
        return []
    ncols = len(rows[0])
    cols: list[list[tuple[int, Fraction]]] = [[] for _ in range(ncols)]
    for i, row in enumerate(rows):
        for j, a in enumerate(row):
            if a:
                cols[j].append((i, Fraction(a)))
    return cols


def solve_lp(
    costs: Sequence[Fraction],
    columns: Sequence[SparseColumn],
    rhs: Sequence[Fraction],
    basis: Optional[Sequence[int]] = None,
) -> LpResult:
    """Solve min c.x, A x = b, x >= 0 exactly.

    ``basis`` may name column indices of a known feasible basis, in which
    case phase one is skipped.  Raises :class:`LpInfeasibleError` /
    :class:`LpUnboundedError` accordingly.
    """
    m, n = len(rhs), len(costs)
    if len(columns) != n:
        raise ValueError("one column per cost coefficient required")

    if basis is not None:
        tableau, base = _tableau_from_basis(columns, rhs, list(basis), m, n)
        kept = list(range(m))
    else:
        tableau, base, kept = _phase_one(columns, rhs, m, n)

    cost_row = _reduced_costs(costs, tableau, base, n)
    _optimize(tableau, cost_row, base)

    x = [Fraction(0)] * n
    for i, var in enumerate(base):
        x[var] = tableau[i][-1]
    value = sum((costs[j] * x[j] for j in range(n) if x[j]), Fraction(0))
    dual = _dual_solution(costs, columns, base, kept, m)
    _certify(costs, columns, rhs, x, value, dual)
    return LpResult(tuple(x), value, tuple(dual))


# -- internals ---------------------------------------------------------------


def _build_rows(columns: Sequence[SparseColumn], rhs: Sequence[Fraction], m: int, n: int):
    zero = Fraction(0)
    tableau = [[zero] * n + [rhs[i]] for i in range(m)]
    for j, col in enumerate(columns):
        for i, a in col:
            tableau[i][j] = a
    return tableau


def _tableau_from_basis(columns, rhs, basis, m, n):
    if len(basis) != m:
        raise LpError("basis size must equal the number of rows")
    tableau = _build_rows(columns, rhs, m, n)
    for k, col in enumerate(basis):
        pivot = next((r for r in range(k, m) if tableau[r][col] != 0), None)
        if pivot is None:
            raise LpError("starting basis is singular")
        tableau[k], tableau[pivot] = tableau[pivot], tableau[k]
        _eliminate(tableau, k, col)
    if any(tableau[i][-1] < 0 for i in range(m)):
        raise LpError("starting basis is not primal feasible")
    return tableau, list(basis)


def _phase_one(columns, rhs, m, n):
    tableau = _build_rows(columns, rhs, m, n)
    for i in range(m):
        if tableau[i][-1] < 0:
            tableau[i] = [-x for x in tableau[i]]
    # append artificial identity columns n .. n+m-1
    zero, one = Fraction(0), Fraction(1)
    for i in range(m):
        row = tableau[i]
        rhs_val = row.pop()
        row.extend(one if k == i else zero for k in range(m))
        row.append(rhs_val)
    base = [n + i for i in range(m)]
    cost_row = [zero] * (n + m + 1)
    for row in tableau:
        cost_row = [c - a for c, a in zip(cost_row, row)]
    for j in range(n, n + m):
        cost_row[j] = zero
    _optimize(tableau, cost_row, base)
    if -cost_row[-1] != 0:
        raise LpInfeasibleError("phase one optimum is positive: no feasible point")
    # drive leftover artificials out of the basis; rows that cannot be
    # pivoted are redundant and get dropped
    kept = list(range(m))
    drop: list[int] = []
    for i in range(m):
        if base[i] >= n:
            col = next((j for j in range(n) if tableau[i][j] != 0), None)
            if col is None:
                drop.append(i)
            else:
                _eliminate(tableau, i, col)
                base[i] = col
    for i in sorted(drop, reverse=True):
        del tableau[i]
        del base[i]
        del kept[i]
    trimmed = [row[:n] + [row[-1]] for row in tableau]
    return trimmed, base, kept


def _reduced_costs(costs, tableau, base, n):
    cost_row = [Fraction(c) for c in costs] + [Fraction(0)]
    for i, var in enumerate(base):
        f = cost_row[var]
        if f:
            row = tableau[i]
            cost_row = [c - f * a if a else c for c, a in zip(cost_row, row)]
    return cost_row


def _eliminate(tableau, pivot_row, pivot_col):
    prow = tableau[pivot_row]
    pval = prow[pivot_col]
    if pval != 1:
        tableau[pivot_row] = prow = [x / pval for x in prow]
    for i, row in enumerate(tableau):
        if i != pivot_row and row[pivot_col]:
            f = row[pivot_col]
            tableau[i] = [a - f * p if p else a for a, p in zip(row, prow)]


def _optimize(tableau, cost_row, base):
    width = len(cost_row) - 1
    pivots = 0
    while True:
        enter = next((j for j in range(width) if cost_row[j] < 0), None)
        if enter is None:
            return
        leave = -1
        best: Optional[Fraction] = None
        best_var = -1
        for i, row in enumerate(tableau):
            a = row[enter]
            if a > 0:
                ratio = row[-1] / a
                if best is None or ratio < best or (ratio == best and base[i] < best_var):
                    best, leave, best_var = ratio, i, base[i]
        if leave < 0:
            raise LpUnboundedError("objective is unbounded below")
        _eliminate(tableau, leave, enter)
        prow = tableau[leave]
        f = cost_row[enter]
        if f:
            cost_row[:] = [c - f * p if p else c for c, p in zip(cost_row, prow)]
        base[leave] = enter
        pivots += 1
        if pivots > _MAX_PIVOTS:
            raise LpError("pivot budget exceeded")


def _dual_solution(costs, columns, base, kept, m):
    mk = len(base)
    row_pos = {orig: i for i, orig in enumerate(kept)}
    system = [[Fraction(0)] * mk for _ in range(mk)]
    for k, var in enumerate(base):
        for i, a in columns[var]:
            pos = row_pos.get(i)
            if pos is not None:  # dropped redundant rows carry dual value 0
                system[k][pos] = a
    try:
        y_kept = solve_linear(system, [Fraction(costs[v]) for v in base])
    except SingularMatrixError as exc:
        raise LpError("optimal basis is singular") from exc
    dual = [Fraction(0)] * m
    for i, orig in enumerate(kept):
        dual[orig] = y_kept[i]
    return dual


def _certify(costs, columns, rhs, x, value, dual):
    m = len(rhs)
    residual = [Fraction(0)] * m
    for j, xj in enumerate(x):
        if xj < 0:
            raise LpError(f"negative primal variable {j}")
        if xj:
            for i, a in columns[j]:
                residual[i] += a * xj
    if residual != [Fraction(v) for v in rhs]:
        raise LpError("primal point violates the constraints")
    for j, col in enumerate(columns):
        slack = costs[j] - sum(dual[i] * a for i, a in col)
        if slack < 0:
            raise LpError(f"dual point violates column {j}")
    dual_value = sum((dual[i] * rhs[i] for i in range(m) if rhs[i]), Fraction(0))
    if dual_value != value:
        raise LpError("strong duality certificate failed")
