"""Exact sparse rational matrices and the elimination kit behind all ranks.

Rank uses fraction-free (Bareiss) elimination on denominator-cleared integer
rows; kernels, solves and coset representatives use rational reduced row
echelon form.  The two routes cross-check each other in the test suite.
Blocks at desk scale stay small, so no modular shortcuts are taken.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Sequence

from .graded import rational


class SparseRationalMatrix:
    """A rows x cols matrix with a sparse map of nonzero rational entries."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int,
                 entries: Mapping[tuple[int, int], Fraction] | None = None):
        self.rows = int(rows)
        self.cols = int(cols)
        self.entries: dict[tuple[int, int], Fraction] = {}
        for (r, c), v in (entries or {}).items():
            v = rational(v)
            if v != 0:
                if not (0 <= r < self.rows and 0 <= c < self.cols):
                    raise IndexError(f"entry ({r},{c}) outside {self.rows}x{self.cols}")
                self.entries[(r, c)] = v

    def get(self, r: int, c: int) -> Fraction:
        return self.entries.get((r, c), Fraction(0))

    def is_zero(self) -> bool:
        return not self.entries

    def dense_rows(self) -> list[list[Fraction]]:
        m = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            m[r][c] = v
        return m

    def column(self, c: int) -> list[Fraction]:
        return [self.get(r, c) for r in range(self.rows)]

    def transpose(self) -> "SparseRationalMatrix":
        return SparseRationalMatrix(
            self.cols, self.rows, {(c, r): v for (r, c), v in self.entries.items()})

    def __eq__(self, other):
        if not isinstance(other, SparseRationalMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries)

    __hash__ = None

    def __matmul__(self, other: "SparseRationalMatrix") -> "SparseRationalMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        by_row: dict[int, dict[int, Fraction]] = {}
        for (r, k), v in self.entries.items():
            by_row.setdefault(r, {})[k] = v
        by_col: dict[int, dict[int, Fraction]] = {}
        for (k, c), v in other.entries.items():
            by_col.setdefault(k, {})[c] = v
        out: dict[tuple[int, int], Fraction] = {}
        for r, row in by_row.items():
            for k, v in row.items():
                seg = by_col.get(k)
                if not seg:
                    continue
                for c, w in seg.items():
                    key = (r, c)
                    s = out.get(key, Fraction(0)) + v * w
                    if s:
                        out[key] = s
                    else:
                        out.pop(key, None)
        return SparseRationalMatrix(self.rows, other.cols, out)

    def apply(self, vec: Sequence[Fraction]) -> list[Fraction]:
        out = [Fraction(0)] * self.rows
        for (r, c), v in self.entries.items():
            if vec[c]:
                out[r] += v * vec[c]
        return out

    def rank(self) -> int:
        return rank_fraction_free(self.dense_rows())

    def nullspace(self) -> list[list[Fraction]]:
        return nullspace(self.dense_rows(), self.cols)

    def __repr__(self):
        return f"<SparseRationalMatrix {self.rows}x{self.cols}, {len(self.entries)} entries>"


def rank_fraction_free(rows: list[list[Fraction]]) -> int:
    """Rank by Bareiss elimination on denominator-cleared integer rows."""
    if not rows or not rows[0]:
        return 0
    m: list[list[int]] = []
    for row in rows:
        lcm = 1
        for v in row:
            if v:
                lcm = lcm * v.denominator // gcd(lcm, v.denominator)
        m.append([int(v * lcm) for v in row])
    n_rows, n_cols = len(m), len(m[0])
    rank = 0
    prev = 1
    for col in range(n_cols):
        piv = None
        for r in range(rank, n_rows):
            if m[r][col]:
                piv = r
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        pivot = m[rank][col]
        for r in range(rank + 1, n_rows):
            factor = m[r][col]
            row_r = m[r]
            row_p = m[rank]
            # Bareiss update runs even when factor == 0, to keep divisions exact
            for c in range(col, n_cols):
                row_r[c] = (row_r[c] * pivot - factor * row_p[c]) // prev
        prev = pivot
        rank += 1
        if rank == n_rows:
            break
    return rank


def rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Rational reduced row echelon form; returns (rows, pivot columns)."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    n_rows, n_cols = len(m), len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        piv = None
        for i in range(r, n_rows):
            if m[i][c]:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(n_rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return m, pivots


def nullspace(rows: list[list[Fraction]], n_cols: int) -> list[list[Fraction]]:
    """Basis of the kernel (as column vectors of length n_cols)."""
    if not rows:
        return [[Fraction(1) if i == j else Fraction(0) for i in range(n_cols)]
                for j in range(n_cols)]
    red, pivots = rref(rows)
    pivot_set = set(pivots)
    free = [c for c in range(n_cols) if c not in pivot_set]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * n_cols
        vec[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -red[r][fc]
        basis.append(vec)
    return basis


def independent_columns(columns: list[list[Fraction]]) -> list[int]:
    """Indices of a maximal independent subset, scanning left to right."""
    if not columns:
        return []
    n = len(columns[0])
    echelon: list[list[Fraction]] = []
    pivot_cols: list[int] = []
    chosen: list[int] = []
    for idx, col in enumerate(columns):
        v = list(col)
        for row, pc in zip(echelon, pivot_cols):
            if v[pc]:
                f = v[pc] / row[pc]
                v = [a - f * b for a, b in zip(v, row)]
        piv = next((i for i in range(n) if v[i]), None)
        if piv is not None:
            echelon.append(v)
            pivot_cols.append(piv)
            chosen.append(idx)
    return chosen


def solve_exact(columns: list[list[Fraction]], target: list[Fraction]) -> list[Fraction] | None:
    """Solve sum_j x_j columns[j] = target exactly; None if inconsistent."""
    n = len(target)
    k = len(columns)
    aug = [[columns[j][i] for j in range(k)] + [target[i]] for i in range(n)]
    red, pivots = rref(aug)
    for r in range(len(red)):
        if all(red[r][c] == 0 for c in range(k)) and red[r][k] != 0:
            return None
    x = [Fraction(0)] * k
    for r, pc in enumerate(pivots):
        if pc < k:
            x[pc] = red[r][k]
    return x


class CohomologyBlock:
    """Kernel/image data of one block: d_out at (n, w), d_in from (n-1, w).

    Provides the betti number, chosen coset representatives (kernel vectors
    completing a basis of the image inside the kernel), and coordinates of
    arbitrary cocycles in the quotient.
    """

    def __init__(self, dim: int, d_out: SparseRationalMatrix, d_in: SparseRationalMatrix):
        if d_out.cols != dim or d_in.rows != dim:
            raise ValueError("block dimensions are inconsistent")
        self.dim = dim
        self.kernel = d_out.nullspace() if dim else []
        image_cols = [d_in.column(c) for c in range(d_in.cols)]
        keep = independent_columns(image_cols)
        self.image = [image_cols[i] for i in keep]
        reps_pool = self.image + self.kernel
        chosen = independent_columns(reps_pool)
        self.representatives = [reps_pool[i] for i in chosen if i >= len(self.image)]
        self.betti = len(self.representatives)

    def coordinates(self, cocycle: list[Fraction]) -> list[Fraction]:
        """Class of a cocycle in the chosen representative basis."""
        sol = solve_exact(self.image + self.representatives, cocycle)
        if sol is None:
            raise ValueError("vector is not in the kernel span; not a cocycle?")
        return sol[len(self.image):]
