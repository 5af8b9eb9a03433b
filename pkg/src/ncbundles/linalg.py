"""Exact linear algebra over Fraction for the small systems used here.

Dense vectors are plain lists of Fraction.  The sparse solver works on
columns stored as {row_key: Fraction} dicts; row keys only need a total
order.  Everything is exact, no pivoting heuristics needed.
"""

from __future__ import annotations

from fractions import Fraction


class ColumnSpace:
    """Incremental echelon basis of a span of dense column vectors.

    Invariant: every basis vector is zero at the pivot rows of all other
    basis vectors, so one forward pass fully reduces a new vector and
    ranks, pivots and membership tests are reproducible.
    """

    def __init__(self, nrows):
        self.nrows = nrows
        self.basis = []  # list of (pivot_row, vector), sorted by pivot

    def _reduce(self, vec):
        vec = list(vec)
        for pivot, bv in self.basis:
            c = vec[pivot]
            if c:
                f = c / bv[pivot]
                for r in range(self.nrows):
                    if bv[r]:
                        vec[r] -= f * bv[r]
        return vec

    def add(self, vec):
        """Insert a vector; returns True if it enlarged the span."""
        if len(vec) != self.nrows:
            raise ValueError("vector length mismatch")
        red = self._reduce(vec)
        for r in range(self.nrows):
            if red[r]:
                # clear row r from the existing basis to keep the invariant
                for _, bv in self.basis:
                    c = bv[r]
                    if c:
                        f = c / red[r]
                        for q in range(self.nrows):
                            if red[q]:
                                bv[q] -= f * red[q]
                self.basis.append((r, red))
                self.basis.sort(key=lambda b: b[0])
                return True
        return False

    def contains(self, vec):
        red = self._reduce(vec)
        return all(not c for c in red)

    @property
    def rank(self):
        return len(self.basis)

    def pivot_rows(self):
        return sorted(p for p, _ in self.basis)

    def non_pivot_rows(self):
        piv = set(p for p, _ in self.basis)
        return [r for r in range(self.nrows) if r not in piv]


def rank(columns, nrows=None):
    """Rank of the span of dense columns."""
    columns = list(columns)
    if nrows is None:
        nrows = len(columns[0]) if columns else 0
    cs = ColumnSpace(nrows)
    for col in columns:
        cs.add(col)
    return cs.rank


def in_column_span(columns, target):
    cs = ColumnSpace(len(target))
    for col in columns:
        cs.add(col)
    return cs.contains(target)


def presolve_singletons(columns, rhs):
    """Drop rows that contain a variable appearing in no other row.

    Such a row is satisfiable for any assignment of the remaining
    variables, so deleting it (with the variable) preserves solvability
    in both directions.  Cascades until a fixed point; the fixed point is
    independent of deletion order.

    columns: {var_key: {row_key: Fraction}}, rhs: {row_key: Fraction}.
    Returns (columns, rhs) restricted to the surviving rows.
    """
    cols = {v: dict(c) for v, c in columns.items() if c}
    rhs = {r: c for r, c in rhs.items() if c}
    rows_of = {}
    for v, col in cols.items():
        for r in col:
            rows_of.setdefault(r, set()).add(v)
    queue = [v for v, col in cols.items() if len(col) == 1]
    while queue:
        v = queue.pop()
        col = cols.get(v)
        if col is None or len(col) != 1:
            continue
        (row,) = col
        for w in rows_of.pop(row, ()):
            wcol = cols.get(w)
            if wcol is None:
                continue
            wcol.pop(row, None)
            if not wcol:
                del cols[w]
            elif len(wcol) == 1:
                queue.append(w)
        cols.pop(v, None)
        rhs.pop(row, None)
    return cols, rhs


def solvable_sparse(columns, rhs):
    """Whether sum_v x_v * col_v = rhs has a solution, exactly.

    Runs the singleton presolve first, then a dense consistency check on
    the surviving rows in sorted row-key order.
    """
    cols, rhs = presolve_singletons(columns, rhs)
    row_keys = set(rhs)
    for col in cols.values():
        row_keys.update(col)
    if not row_keys:
        return True
    order = {r: n for n, r in enumerate(sorted(row_keys))}
    m = len(order)
    zero = Fraction(0)
    cs = ColumnSpace(m)
    for v in sorted(cols):
        dense = [zero] * m
        for r, c in cols[v].items():
            dense[order[r]] = c
        cs.add(dense)
    target = [zero] * m
    for r, c in rhs.items():
        target[order[r]] = c
    return cs.contains(target)


def symbolic_det(rows):
    """Determinant of a small square matrix by subset DP.

    Entries may be Fraction or any ring element supporting +, -, * and
    truthiness; cost is O(2^n * n), capped at n = 12.
    """
    n = len(rows)
    if n == 0:
        return Fraction(1)
    if any(len(r) != n for r in rows):
        raise ValueError("matrix is not square")
    if n > 12:
        raise ValueError("symbolic determinant capped at 12x12")
    dp = {0: Fraction(1)}
    for r in range(n):
        nxt = {}
        row = rows[r]
        base = 1 if r % 2 == 0 else -1
        for mask, val in dp.items():
            if not val:
                continue
            sign = base
            for c in range(n):
                bit = 1 << c
                if mask & bit:
                    sign = -sign
                    continue
                e = row[c]
                if e:
                    term = val * e if sign > 0 else -(val * e)
                    new = mask | bit
                    if new in nxt:
                        nxt[new] = nxt[new] + term
                    else:
                        nxt[new] = term
        dp = nxt
    return dp.get((1 << n) - 1, Fraction(0))
