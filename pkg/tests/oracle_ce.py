"""Independent dense Chevalley-Eilenberg cohomology with adjoint coefficients.

Deliberately self-contained: plain lists of Fractions, its own Gaussian
elimination, no imports from the package under test.  Used as the oracle for
the deformation cohomology of Lie algebras over a point, via the degree shift
H_def^k = H_CE^{k+1}(g; ad).
"""

from fractions import Fraction
from itertools import combinations


def bracket(constants, dim, i, j):
    """[e_i, e_j] as a dense coefficient vector."""
    out = [Fraction(0)] * dim
    for k in range(dim):
        c = constants.get((i, j, k))
        if c is not None:
            out[k] += c
        c = constants.get((j, i, k))
        if c is not None:
            out[k] -= c
    return out


def _insert_sorted(indices, extra):
    """Sort (extra,) + indices; return (sorted tuple, permutation sign) or None."""
    if extra in indices:
        return None
    merged = list(indices)
    pos = 0
    while pos < len(merged) and merged[pos] < extra:
        pos += 1
    sign = -1 if (pos % 2) else 1
    # moving `extra` from slot 0 past `pos` entries
    merged.insert(pos, extra)
    return tuple(merged), sign


def ce_differential(constants, dim, n):
    """Dense matrix of d: C^n(g; ad) -> C^{n+1}(g; ad) in the basis
    (subset S, target m) ordered lexicographically."""
    src = [(S, m) for S in combinations(range(dim), n) for m in range(dim)]
    dst = [(T, m) for T in combinations(range(dim), n + 1) for m in range(dim)]
    index = {key: i for i, key in enumerate(dst)}
    matrix = [[Fraction(0)] * len(src) for _ in range(len(dst))]
    for col, (S, m) in enumerate(src):
        for T in combinations(range(dim), n + 1):
            total = [Fraction(0)] * dim
            for t, it in enumerate(T):
                rest = tuple(x for x in T if x != it)
                if rest == S:
                    br = bracket(constants, dim, it, m)
                    sgn = -1 if (t % 2) else 1
                    for k in range(dim):
                        total[k] += sgn * br[k]
            for s in range(len(T)):
                for t in range(s + 1, len(T)):
                    rest = tuple(x for i, x in enumerate(T) if i not in (s, t))
                    br = bracket(constants, dim, T[s], T[t])
                    for k in range(dim):
                        if br[k] == 0:
                            continue
                        placed = _insert_sorted(rest, k)
                        if placed is None:
                            continue
                        key, sgn0 = placed
                        if key != S:
                            continue
                        # phi = e_S* (x) e_m applied to ([e_s,e_t], rest)
                        sgn = sgn0 * (-1 if ((s + t) % 2) else 1)
                        total[m] += sgn * br[k]
            for k in range(dim):
                if total[k]:
                    matrix[index[(T, k)]][col] += total[k]
    return matrix


def rank_dense(matrix):
    m = [row[:] for row in matrix]
    if not m or not m[0]:
        return 0
    rows, cols = len(m), len(m[0])
    rank = 0
    for c in range(cols):
        piv = None
        for r in range(rank, rows):
            if m[r][c]:
                piv = r
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        pv = m[rank][c]
        for r in range(rows):
            if r != rank and m[r][c]:
                f = m[r][c] / pv
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
        if rank == rows:
            break
    return rank


def ce_betti(constants, dim, degrees):
    """H^n(g; ad) dimensions for n in degrees."""
    out = {}
    ranks = {}
    for n in degrees:
        for step in (n - 1, n):
            if step < 0 or step in ranks:
                continue
            ranks[step] = rank_dense(ce_differential(constants, dim, step))
    for n in degrees:
        from math import comb
        dim_n = comb(dim, n) * dim if 0 <= n <= dim else 0
        out[n] = dim_n - ranks.get(n, 0) - ranks.get(n - 1, 0)
    return out
