"""Exact linear algebra over the split components.

Ranks of Laurent matrices are computed by fraction-free elimination on
integer polynomials (flint), with a randomized evaluation rank as a
cross-check.  Small solves and inverses run by Gauss-Jordan directly in
the sympy fraction fields of the components.
"""
from __future__ import annotations

import random
from fractions import Fraction

import flint

from .coeffs import LaurentPi, LaurentSqrtPi, to_component


class RankMismatch(AssertionError):
    pass


def bareiss(rows):
    """Fraction-free elimination of a matrix of fmpz_poly.

    Returns (rank, pivot_rows, pivot_cols) in original indices.  The
    minor on pivot_rows x pivot_cols is nonzero.
    """
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    order = list(range(nrows))
    prev = flint.fmpz_poly(1)
    rank = 0
    pcols = []
    for c in range(ncols):
        if rank == nrows:
            break
        piv = None
        best = None
        for r in range(rank, nrows):
            if m[r][c] != 0:
                deg = m[r][c].degree()
                if best is None or deg < best:
                    piv, best = r, deg
        if piv is None:
            continue
        if piv != rank:
            m[piv], m[rank] = m[rank], m[piv]
            order[piv], order[rank] = order[rank], order[piv]
        p = m[rank][c]
        for r in range(rank + 1, nrows):
            a = m[r][c]
            row = m[r]
            prow = m[rank]
            for k in range(c + 1, ncols):
                v = p * row[k] - a * prow[k]
                if v != 0:
                    quo, rem = divmod(v, prev)
                    if rem != 0:
                        raise AssertionError("Bareiss division left a remainder")
                    row[k] = quo
                else:
                    row[k] = v
            row[c] = flint.fmpz_poly(0)
        prev = p
        pcols.append(c)
        rank += 1
    return rank, sorted(order[:rank]), pcols


def _int_laurent(x, value, sqrt):
    """Integer (or Gaussian as complex) Laurent dict of x at one component."""
    if isinstance(x, int):
        return {0: x} if x else {}
    if isinstance(x, LaurentPi):
        if sqrt:
            g = -1 if isinstance(value, str) else 1
        else:
            g = value
        return {e: c.even + g * c.odd for e, c in x.terms.items() if c.even + g * c.odd}
    if isinstance(x, LaurentSqrtPi):
        g = {1: 1, -1: -1, "i": 1j, "-i": -1j}[value]
        out = {}
        for e, c in x.terms.items():
            v = sum(cc * g ** k for k, cc in enumerate(c.coords))
            if v:
                out[e] = complex(v) if isinstance(v, complex) else v
        return out
    raise TypeError("unsupported entry %r" % (x,))


def _split_parts(d):
    re = {e: int(v.real) if isinstance(v, complex) else v for e, v in d.items()}
    im = {e: int(v.imag) if isinstance(v, complex) else 0 for e, v in d.items()}
    return re, im


def _row_to_polys(row):
    lo = min((min(d) for d in row if d), default=0)
    out = []
    for d in row:
        coeffs = [0] * (max(d) - lo + 1) if d else []
        for e, v in d.items():
            coeffs[e - lo] = v
        out.append(flint.fmpz_poly(coeffs))
    return out


def integer_matrix(M, value, sqrt=False):
    """Polynomial matrix over Z with the same rank as M at the component.

    Gaussian components are realified: A + iB becomes [[A, -B], [B, A]],
    whose rank is twice the complex rank.
    """
    dicts = [[_int_laurent(x, value, sqrt) for x in row] for row in M]
    gaussian = isinstance(value, str)
    if not gaussian:
        return [_row_to_polys(row) for row in dicts], False
    re = [[_split_parts(d)[0] for d in row] for row in dicts]
    im = [[_split_parts(d)[1] for d in row] for row in dicts]
    neg = [[{e: -v for e, v in d.items()} for d in row] for row in im]
    big = [re[r] + neg[r] for r in range(len(M))] + [im[r] + re[r] for r in range(len(M))]
    big = [[{e: v for e, v in d.items() if v} for d in row] for row in big]
    return [_row_to_polys(row) for row in big], True


def laurent_rank(M, value, sqrt=False):
    if not M or not M[0]:
        return 0
    P, realified = integer_matrix(M, value, sqrt)
    r = bareiss(P)[0]
    return r // 2 if realified else r


def _eval_rank(M, value, sqrt, qval, prime):
    """Rank of M mod prime after q -> qval (a lower bound of the generic rank)."""
    dicts = [[_int_laurent(x, value, sqrt) for x in row] for row in M]
    if isinstance(value, str):
        # work in F_p[i] with p = 3 mod 4 by realifying
        re = [[_split_parts(d)[0] for d in row] for row in dicts]
        im = [[_split_parts(d)[1] for d in row] for row in dicts]
        neg = [[{e: -v for e, v in d.items()} for d in row] for row in im]
        dicts = [re[r] + neg[r] for r in range(len(M))] + [im[r] + re[r] for r in range(len(M))]
        factor = 2
    else:
        factor = 1
    inv_q = pow(qval, -1, prime)
    rows = []
    for row in dicts:
        out = []
        for d in row:
            s = 0
            for e, v in d.items():
                s += v * (pow(qval, e, prime) if e >= 0 else pow(inv_q, -e, prime))
            out.append(s % prime)
        rows.append(out)
    return _rank_mod(rows, prime) // factor


def _rank_mod(rows, p):
    m = [list(r) for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][c], -1, p)
        for r in range(rank + 1, len(m)):
            f = m[r][c] * inv % p
            if f:
                m[r] = [(a - f * b) % p for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


_PRIME = (1 << 61) - 1


def checked_rank(M, value, sqrt=False, seed=0):
    """Exact rank with a randomized evaluation cross-check.

    Evaluation can only under-report, so several points are tried before
    a disagreement is declared.
    """
    exact = laurent_rank(M, value, sqrt)
    rng = random.Random(seed)
    best = 0
    for _ in range(6):
        best = max(best, _eval_rank(M, value, sqrt, rng.randrange(2, _PRIME - 1), _PRIME))
        if best == exact:
            return exact
    raise RankMismatch("exact rank %d but evaluation rank %d" % (exact, best))


# ---------------------------------------------------------------------------
# Gauss-Jordan in a sympy fraction field


def field_matrix(M, value, sqrt=False):
    """Entrywise image of a Laurent (or split) matrix in one component field."""
    out = []
    for row in M:
        out.append([_entry(x, value, sqrt) for x in row])
    return out


def _entry(x, value, sqrt):
    if hasattr(x, "parts"):
        return x.parts[type(x).VALUES.index(value)]
    return to_component(x, value, sqrt)


def field_rank(M):
    return len(field_pivots(M)[0])


def field_pivots(M):
    m = [list(r) for r in M]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    order = list(range(nrows))
    rank = 0
    pcols = []
    for c in range(ncols):
        piv = next((r for r in range(rank, nrows) if m[r][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        order[rank], order[piv] = order[piv], order[rank]
        inv = 1 / m[rank][c]
        for r in range(rank + 1, nrows):
            f = m[r][c] * inv
            if f != 0:
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        pcols.append(c)
        rank += 1
    return sorted(order[:rank]), pcols


def field_solve(A, B):
    """Solve A X = B for square nonsingular A; B is a list of rows."""
    n = len(A)
    if n == 0:
        return [list(r) for r in B]
    aug = [list(A[r]) + list(B[r]) for r in range(n)]
    width = len(aug[0])
    for c in range(n):
        piv = next((r for r in range(c, n) if aug[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [v * inv for v in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[c])]
    return [row[n:width] for row in aug]


def _field_of(*mats):
    for M in mats:
        for row in M:
            for x in row:
                return x.field if hasattr(x, "field") else None
    return None


def identity(n, K):
    return [[K(1) if r == c else K(0) for c in range(n)] for r in range(n)]


def matmul(A, B, K=None, inner=None):
    """Product of list-of-rows matrices; empty shapes need K and inner sizes."""
    rows = len(A)
    cols = len(B[0]) if B else 0
    n = len(B)
    if K is None:
        K = _field_of(A, B)
    zero = K(0) if K is not None else 0
    out = []
    for r in range(rows):
        row = []
        for c in range(cols):
            s = zero
            for k in range(n):
                a = A[r][k]
                if a != 0:
                    b = B[k][c]
                    if b != 0:
                        s = s + a * b
            row.append(s)
        out.append(row)
    return out


def zeros(r, c, K):
    return [[K(0)] * c for _ in range(r)]


def frac_rank_rational(M):
    """Rank of a rational matrix (Fractions); used by the Cartan module."""
    m = [[Fraction(x) for x in row] for row in M]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(rank + 1, len(m)):
            f = m[r][c] / m[rank][c]
            if f:
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def rational_solve(A, b):
    """Solve A x = b over Q for a consistent system; returns one solution.

    Free variables are set to zero.  Raises ValueError if inconsistent.
    """
    nrows = len(A)
    ncols = len(A[0]) if A else 0
    m = [[Fraction(x) for x in A[r]] + [Fraction(b[r])] for r in range(nrows)]
    rank = 0
    pcols = []
    for c in range(ncols):
        piv = next((r for r in range(rank, nrows) if m[r][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = 1 / m[rank][c]
        m[rank] = [v * inv for v in m[rank]]
        for r in range(nrows):
            if r != rank and m[r][c] != 0:
                f = m[r][c]
                m[r] = [a - f * bb for a, bb in zip(m[r], m[rank])]
        pcols.append(c)
        rank += 1
    for r in range(rank, nrows):
        if m[r][ncols] != 0:
            raise ValueError("inconsistent linear system")
    x = [Fraction(0)] * ncols
    for r, c in enumerate(pcols):
        x[c] = m[r][ncols]
    return x
