"""Exact linear algebra over the rationals.

Everything here works on plain Python lists of ``Fraction`` (dense) or on
dicts ``{column: value}`` (sparse rows).  Nothing touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

SparseRow = Dict[int, Fraction]


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass ints, strings or Fractions")
    return Fraction(x)


def to_matrix(rows: Iterable[Iterable]) -> List[List[Fraction]]:
    return [[as_fraction(x) for x in row] for row in rows]


def det(matrix: Sequence[Sequence]) -> Fraction:
    """Determinant by Gaussian elimination with exact pivots."""
    m = to_matrix(matrix)
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("determinant of a non-square matrix")
    result = Fraction(1)
    for c in range(n):
        pivot = next((r for r in range(c, n) if m[r][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            result = -result
        p = m[c][c]
        result *= p
        for r in range(c + 1, n):
            f = m[r][c]
            if f == 0:
                continue
            f = f / p
            row_r, row_c = m[r], m[c]
            for k in range(c, n):
                row_r[k] -= f * row_c[k]
    return result


def rref(matrix: Sequence[Sequence]) -> Tuple[List[List[Fraction]], List[int]]:
    """Reduced row echelon form and pivot columns."""
    m = to_matrix(matrix)
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(matrix: Sequence[Sequence]) -> int:
    return len(rref(matrix)[1])


def nullspace(matrix: Sequence[Sequence], ncols: Optional[int] = None) -> List[List[Fraction]]:
    """Basis of the right kernel ``{x : A x = 0}``."""
    if ncols is None:
        ncols = len(matrix[0]) if matrix else 0
    reduced, pivots = rref(matrix) if matrix else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, pc in zip(reduced, pivots):
            x[pc] = -row[f]
        basis.append(x)
    return basis


def solve_in_basis(basis: Sequence[Sequence[Fraction]], vector: Sequence[Fraction]) -> List[Fraction]:
    """Coordinates of ``vector`` in the span of ``basis`` (raises if outside)."""
    k = len(basis)
    n = len(vector)
    # columns = basis vectors, augmented with the target
    aug = [[basis[j][i] for j in range(k)] + [vector[i]] for i in range(n)]
    reduced, pivots = rref(aug)
    if k in pivots:
        raise ValueError("vector is not in the span of the basis")
    coords = [Fraction(0)] * k
    for row, pc in zip(reduced, pivots):
        coords[pc] = row[k]
    return coords


def inertia(matrix: Sequence[Sequence]) -> Tuple[int, int, int]:
    """(positive, negative, zero) counts of a symmetric matrix.

    Symmetric Gaussian elimination by congruence: a zero diagonal pivot is
    repaired by adding a later row and column to it.
    """
    m = to_matrix(matrix)
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("inertia of a non-square matrix")
    if any(m[i][j] != m[j][i] for i in range(n) for j in range(i)):
        raise ValueError("matrix is not symmetric")
    pos = neg = 0
    active = list(range(n))
    while active:
        i = active[0]
        if m[i][i] == 0:
            j = next((j for j in active[1:] if m[j][j] != 0), None)
            if j is not None:
                active.remove(j)
                active.insert(0, j)
                continue
            j = next((j for j in active[1:] if m[i][j] != 0), None)
            if j is None:
                active.pop(0)  # row i is identically zero on the active block
                continue
            # row_i += row_j, col_i += col_j: new diagonal = 2 m_ij (m_jj = 0)
            for k in range(n):
                m[i][k] += m[j][k]
            for k in range(n):
                m[k][i] += m[k][j]
            continue
        p = m[i][i]
        if p > 0:
            pos += 1
        else:
            neg += 1
        rest = active[1:]
        for r in rest:
            f = m[r][i] / p
            if f == 0:
                continue
            for c in rest:
                m[r][c] -= f * m[i][c]
        for r in rest:
            m[r][i] = m[i][r] = Fraction(0)
        active = rest
    return pos, neg, n - pos - neg


def _content(row: Dict[int, int]) -> int:
    g = 0
    for v in row.values():
        g = gcd(g, v)
    return g


def _primitive(row: Dict[int, int]) -> Dict[int, int]:
    """Divide by the content; make the leading (lowest column) entry positive."""
    row = {c: v for c, v in row.items() if v != 0}
    if not row:
        return row
    g = _content(row)
    lead = row[min(row)]
    if lead < 0:
        g = -g
    return {c: v // g for c, v in row.items()}


def _integral(row: SparseRow) -> Dict[int, int]:
    den = 1
    for v in row.values():
        v = as_fraction(v)
        den = den * v.denominator // gcd(den, v.denominator)
    return {c: int(as_fraction(v) * den) for c, v in row.items() if v != 0}


class SparseEchelon:
    """Incremental fraction-free row echelon form over Q.

    Rows are kept as primitive integer vectors keyed by their pivot (lowest
    nonzero column).  ``reduce`` returns the normal form of a vector modulo
    the row space, supported on non-pivot columns.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows: Dict[int, Dict[int, int]] = {}
        self._rref: Optional[Dict[int, SparseRow]] = None

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def pivots(self) -> List[int]:
        return sorted(self.rows)

    def _eliminate(self, row: Dict[int, int]) -> Dict[int, int]:
        row = _primitive(row)
        while row:
            lead = min(row)
            prow = self.rows.get(lead)
            if prow is None:
                return row
            a, b = prow[lead], row[lead]
            new = {}
            for c in set(row) | set(prow):
                v = a * row.get(c, 0) - b * prow.get(c, 0)
                if v:
                    new[c] = v
            row = _primitive(new)
        return row

    def add(self, row: SparseRow) -> bool:
        """Insert a row; returns True if it increased the rank."""
        for c in row:
            if not 0 <= c < self.ncols:
                raise IndexError(f"column {c} out of range")
        reduced = self._eliminate(_integral(row))
        if not reduced:
            return False
        self.rows[min(reduced)] = reduced
        self._rref = None
        return True

    def contains(self, row: SparseRow) -> bool:
        return not self._eliminate(_integral(row))

    def fully_reduced_rows(self) -> Dict[int, SparseRow]:
        """Reduced row echelon form: pivot entry 1, zero in other pivot columns."""
        if self._rref is not None:
            return self._rref
        out: Dict[int, SparseRow] = {}
        for p in sorted(self.rows, reverse=True):
            row = {c: Fraction(v, self.rows[p][p]) for c, v in self.rows[p].items()}
            for q in list(c for c in row if c != p and c in out):
                f = row[q]
                for c, v in out[q].items():
                    row[c] = row.get(c, Fraction(0)) - f * v
                row = {c: v for c, v in row.items() if v != 0}
            out[p] = row
        self._rref = out
        return out

    def normal_form(self, vector: SparseRow) -> SparseRow:
        """Representative of ``vector`` modulo the row space on free columns."""
        reduced = self.fully_reduced_rows()
        v = {c: as_fraction(x) for c, x in vector.items() if x != 0}
        for p in sorted(reduced):
            f = v.get(p)
            if not f:
                continue
            for c, x in reduced[p].items():
                v[c] = v.get(c, Fraction(0)) - f * x
            v = {c: x for c, x in v.items() if x != 0}
        return v

    def same_span(self, other: "SparseEchelon") -> bool:
        if self.ncols != other.ncols or self.rank != other.rank:
            return False
        return all(other.contains(dict(r)) for r in self.rows.values())
