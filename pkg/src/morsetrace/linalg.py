"""Exact sparse Gauss-Jordan elimination over the integers/rationals.

Matrices are given column-wise as ``{row_key: value}`` dicts.  Unit pivots
are preferred so that unimodular matrices never leave the integers.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Hashable, List, Mapping, Optional, Sequence, Tuple

from .errors import DomainError

Column = Mapping[Hashable, int]


def _permutation_sign(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    parity = 0
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        parity += length - 1
    return -1 if parity % 2 else 1


def _normalize(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


class Elimination:
    """Gauss-Jordan reduction of a square matrix, optionally tracking the inverse."""

    def __init__(self, columns: Sequence[Column], row_keys: Sequence[Hashable], inverse: bool = False):
        n = len(columns)
        if len(row_keys) != n:
            raise DomainError(f"matrix is not square: {len(row_keys)} rows, {n} columns")
        ridx = {k: i for i, k in enumerate(row_keys)}
        if len(ridx) != n:
            raise DomainError("duplicate row keys")
        rows: List[Dict[int, object]] = [dict() for _ in range(n)]
        for j, col in enumerate(columns):
            for k, v in col.items():
                if v:
                    if k not in ridx:
                        raise DomainError(f"entry in unknown row {k!r}")
                    rows[ridx[k]][j] = v
        aug: Optional[List[Dict[int, object]]] = [{i: 1} for i in range(n)] if inverse else None
        col_rows: Dict[int, set] = {j: set() for j in range(n)}
        for i, r in enumerate(rows):
            for j in r:
                col_rows[j].add(i)

        pivot_row = [-1] * n
        used = [False] * n
        pivots: List[object] = []
        singular = False
        for j in range(n):
            cands = [i for i in col_rows[j] if not used[i]]
            if not cands:
                singular = True
                break
            p = min(cands, key=lambda i: (abs(rows[i][j]) != 1, len(rows[i]), i))
            used[p] = True
            pivot_row[j] = p
            pv = rows[p][j]
            pivots.append(pv)
            prow = rows[p]
            paug = aug[p] if aug is not None else None
            for i in list(col_rows[j]):
                if i == p:
                    continue
                row = rows[i]
                factor = row[j]
                if pv in (1, -1):
                    factor = factor * pv
                else:
                    factor = Fraction(factor) / pv
                for c, v in prow.items():
                    nv = _normalize(row.get(c, 0) - factor * v)
                    if nv:
                        if c not in row:
                            col_rows[c].add(i)
                        row[c] = nv
                    elif c in row:
                        del row[c]
                        col_rows[c].discard(i)
                if paug is not None:
                    arow = aug[i]
                    for c, v in paug.items():
                        nv = _normalize(arow.get(c, 0) - factor * v)
                        if nv:
                            arow[c] = nv
                        else:
                            arow.pop(c, None)
        self.n = n
        self.singular = singular
        self._rows = rows
        self._aug = aug
        self._pivot_row = pivot_row
        self._pivots = pivots
        self._row_keys = list(row_keys)
        self._ridx = ridx

    def determinant(self) -> int:
        if self.singular:
            return 0
        det: object = _permutation_sign(self._pivot_row)
        for pv in self._pivots:
            det = det * pv
        det = _normalize(det)
        if not isinstance(det, int):
            raise AssertionError(f"non-integral determinant {det}")
        return det

    def solve(self, rhs: Mapping[Hashable, int]) -> List[object]:
        """Coordinates ``x`` with ``sum_j x_j * column_j == rhs``."""
        if self._aug is None:
            raise DomainError("elimination was run without inverse tracking")
        if self.singular:
            raise DomainError("matrix is singular")
        b = {}
        for k, v in rhs.items():
            if v:
                if k not in self._ridx:
                    raise DomainError(f"right-hand side has unknown row {k!r}")
                b[self._ridx[k]] = v
        out: List[object] = []
        for j in range(self.n):
            p = self._pivot_row[j]
            acc = sum(v * b.get(c, 0) for c, v in self._aug[p].items())
            pv = self._pivots[j]
            out.append(_normalize(acc * pv if pv in (1, -1) else Fraction(acc) / pv))
        return out


def determinant(columns: Sequence[Column], row_keys: Sequence[Hashable]) -> int:
    return Elimination(columns, row_keys).determinant()


def solve(columns: Sequence[Column], row_keys: Sequence[Hashable], rhs: Column) -> List[object]:
    return Elimination(columns, row_keys, inverse=True).solve(rhs)


def dense_to_columns(matrix: Sequence[Sequence[int]]) -> Tuple[List[Dict[int, int]], List[int]]:
    n = len(matrix)
    cols = [{i: matrix[i][j] for i in range(n) if matrix[i][j]} for j in range(n)]
    return cols, list(range(n))
