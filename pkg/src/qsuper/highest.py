"""Verma and irreducible highest-weight modules.

The Verma module M(lam) is spanned by words f_w u (w read left to right,
last letter applied first).  The irreducible quotient is M modulo the
radical of the contravariant form; each weight block gets a basis of
pivot words and the operators are stored as exact matrices per
component field.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .cartan import apply_matrix, positive_roots, weights_up_to, weyl_group, words_of_weight
from .coeffs import (PI_COMPONENTS, SQRT_COMPONENTS, DomainError, LaurentPi, LaurentSqrtPi,
                     _real_to_gauss, component_field, gauss_pi, qint, to_component)
from .linalg import bareiss, checked_rank, field_solve, integer_matrix
from .params import ThetaP, TildeThetaP, check_pt, check_ttp, derive_tilde, from_tilde, _simplify
from .uminus import BosonAlgebra, product_formula


class OutOfCutoff(DomainError):
    pass


def uses_sqrt(fam):
    rows = fam.ttheta if isinstance(fam, TildeThetaP) else fam.theta + fam.p + (fam.p_diag,)
    extra = fam.tp if isinstance(fam, TildeThetaP) else ()
    return any(isinstance(x, LaurentSqrtPi) for r in rows for x in r) or \
        any(isinstance(x, LaurentSqrtPi) for x in extra)


def components(sqrt):
    return SQRT_COMPONENTS if sqrt else PI_COMPONENTS


def scalar(x, value, sqrt):
    """Image of a Laurent element, int or field element in one component."""
    if hasattr(x, "numer"):
        return x
    if hasattr(x, "parts"):
        return x.parts[type(x).VALUES.index(value)]
    return to_component(x, value, sqrt)


def _signed_qint(m, a, b):
    """[m]_{a,b} extended by [-m]_{a,b} = -(a b)^(-m) [m]_{a,b}.

    For b = a^-1 this is the usual odd extension; for b = 1 it matches
    (1 - a^m)/(1 - a) at negative m.
    """
    if m >= 0:
        return qint(m, a, b)
    return -((a * b) ** m) * qint(-m, a, b)


class _Family:
    """The data of e_i f_j - swap(i, j) f_j e_i = delta_ij diag(i, mu)."""

    def __init__(self, datum, fam, lam):
        self.datum = datum
        self.fam = fam
        self.lam = tuple(lam)
        if isinstance(fam, TildeThetaP):
            v = check_ttp(fam, datum)
            self.tilde = True
        elif isinstance(fam, ThetaP):
            v = check_pt(fam, datum)
            self.tilde = False
        else:
            raise TypeError("unknown parameter family %r" % (fam,))
        if v is not None:
            raise DomainError(str(v))
        self.sqrt = uses_sqrt(fam)

    def swap(self, i, j):
        if self.tilde:
            return self.fam.ttheta[j][i]
        return self.fam.theta[j][i]

    def kval(self, i, m):
        """Eigenvalue of K~_i (tilde) or K_i (theta) on weight lam - m."""
        datum, fam = self.datum, self.fam
        if self.tilde:
            return fam.tp[i] ** (datum.pair(i, self.lam) - datum.pair_root(i, m))
        out = fam.p_diag[i] ** datum.pair(i, self.lam)
        for j, k in enumerate(m):
            if k:
                out = out * fam.p[i][j] ** (-k)
        return _simplify(out)

    def diag(self, i, m):
        """Right-hand side of the commutation relation on weight lam - m, as Laurent."""
        datum, fam = self.datum, self.fam
        n = datum.pair(i, self.lam) - datum.pair_root(i, m)
        if self.tilde:
            return _signed_qint(n, fam.tp[i], LaurentPi.one())
        p = fam.p_diag[i]
        u = _simplify(self.kval(i, m) * (p ** n).inverse())
        if u * u != LaurentPi.one():
            raise DomainError("K_i eigenvalue is not +-p_i^n; the relation leaves Laurent coefficients")
        return _simplify(u * _signed_qint(n, p, p.inverse()))


def _sub(m, i, k=1):
    return tuple(x - (k if t == i else 0) for t, x in enumerate(m))


def _add(m, i, k=1):
    return _sub(m, i, -k)


def _zero_m(r):
    return (0,) * r


class VermaContext:
    """Verma module data for one family and highest weight lam."""

    def __init__(self, datum, fam, lam, sqrt=None):
        self.datum = datum
        self.family = _Family(datum, fam, lam)
        self.fam = fam
        self.lam = tuple(lam)
        self.sqrt = self.family.sqrt if sqrt is None else (sqrt or self.family.sqrt)
        self.values = components(self.sqrt)
        self._e = {}
        self._form = {}
        self._weight = {}

    def word_weight(self, w):
        hit = self._weight.get(w)
        if hit is None:
            m = [0] * self.datum.rank
            for i in w:
                m[i] += 1
            hit = self._weight[w] = tuple(m)
        return hit

    def e_word(self, i, w):
        """e_i f_w u as a dict word -> coefficient."""
        key = (i, w)
        hit = self._e.get(key)
        if hit is not None:
            return hit
        out = {}
        if w:
            j, rest = w[0], w[1:]
            s = self.family.swap(i, j)
            for u, c in self.e_word(i, rest).items():
                out[(j,) + u] = s * c
            if i == j:
                h = self.family.diag(i, self.word_weight(rest))
                if h:
                    out[rest] = out[rest] + h if rest in out else h
            out = {u: c for u, c in out.items() if c}
        self._e[key] = out
        return out

    def form_words(self, w1, w2):
        """Coefficient of u in sigma(f_w1) f_w2 u, sigma swapping e_i and f_i."""
        if len(w1) != len(w2):
            return LaurentPi.zero()
        key = (w1, w2)
        hit = self._form.get(key)
        if hit is not None:
            return hit
        if not w1:
            val = LaurentPi.one()
        elif self.word_weight(w1) != self.word_weight(w2):
            val = LaurentPi.zero()
        else:
            val = LaurentPi.zero()
            for u, c in self.e_word(w1[0], w2).items():
                t = self.form_words(w1[1:], u)
                if t:
                    val = val + c * t
        self._form[key] = val
        return val

    def gram(self, m):
        words = words_of_weight(m)
        return words, [[self.form_words(u, w) for w in words] for u in words]

    def component_ranks(self, m, seed=0):
        words, G = self.gram(m)
        if not words:
            return {v: 0 for v in self.values}
        return {v: checked_rank(G, v, self.sqrt, seed) for v in self.values}


def verma_form(ctx, w1, w2):
    return ctx.form_words(tuple(w1), tuple(w2))


def irr_weight_dim(ctx, m, seed=0):
    ranks = ctx.component_ranks(tuple(m), seed)
    vals = set(ranks.values())
    if len(vals) != 1:
        raise AssertionError("components disagree at %r: %r" % (m, ranks))
    return vals.pop()


# ---------------------------------------------------------------------------
# pivot bases


def pivot_basis(words, G, values, sqrt, seed=0, tries=8):
    """Indices I with G[I, I] invertible in every component and |I| = rank.

    G must be symmetric.  Returns (I, {value: G[I, I] in that field}).
    """
    if not words:
        return [], {v: [] for v in values}
    rng = random.Random(seed)
    order = list(range(len(words)))
    ranks = {v: checked_rank(G, v, sqrt, seed) for v in values}
    if len(set(ranks.values())) != 1:
        raise AssertionError("components disagree on the rank: %r" % (ranks,))
    r = ranks[values[0]]
    for _ in range(tries):
        perm = [[G[a][b] for b in order] for a in order]
        P, _ = integer_matrix(perm, values[0], sqrt)
        rk, rows, _ = bareiss(P)
        if rk != r:
            raise AssertionError("Bareiss rank %d differs from checked rank %d" % (rk, r))
        idx = sorted(order[k] for k in rows)
        blocks = {}
        ok = True
        for v in values:
            B = [[scalar(G[a][b], v, sqrt) for b in idx] for a in idx]
            try:
                field_solve(B, [[component_field(v)(0)] for _ in idx])
            except ZeroDivisionError:
                ok = False
                break
            blocks[v] = B
        if ok:
            return idx, blocks
        rng.shuffle(order)
    raise AssertionError("no pivot set is invertible in every component")


# ---------------------------------------------------------------------------
# matrices


def mat_zero(r, c, K):
    return [[K(0)] * c for _ in range(r)]


def mat_id(n, K):
    return [[K(1) if a == b else K(0) for b in range(n)] for a in range(n)]


def mat_mul(A, B, K, inner, cols=None):
    if cols is None:
        cols = len(B[0]) if B else 0
    if inner == 0:
        return mat_zero(len(A), cols, K)
    out = []
    for row in A:
        acc = [K(0)] * cols
        for k, a in enumerate(row):
            if a != 0:
                for c, b in enumerate(B[k]):
                    if b != 0:
                        acc[c] += a * b
        out.append(acc)
    return out


def mat_scale(A, s):
    return [[s * x for x in row] for row in A]


def mat_add(A, B):
    return [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(A, B)]


def mat_sub(A, B):
    return [[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(A, B)]


def mat_eq(A, B):
    if len(A) != len(B) or any(len(r1) != len(r2) for r1, r2 in zip(A, B)):
        raise AssertionError("shape mismatch")
    return all(x == y for r1, r2 in zip(A, B) for x, y in zip(r1, r2))


@dataclass
class HWModule:
    """Irreducible highest-weight module truncated at a height cutoff.

    Blocks are indexed by root coordinates m (weight lam - sum m_i alpha_i).
    E[(i, m)] maps block m to m - e_i and F[(i, m)] maps m to m + e_i; both
    are dicts value -> matrix (rows index the target basis).  K[(i, m)]
    is the Laurent eigenvalue of K~_i (tilde families) or K_i.
    """

    datum: object
    fam: object
    lam: tuple
    cutoff: int
    sqrt: bool
    basis: dict
    E: dict
    F: dict
    K: dict
    meta: dict = dc_field(default_factory=dict)

    @property
    def values(self):
        return components(self.sqrt)

    @property
    def tilde(self):
        return isinstance(self.fam, TildeThetaP)

    def dim(self, m):
        m = tuple(m)
        if min(m) < 0:
            return 0
        if sum(m) > self.cutoff:
            raise OutOfCutoff("weight %r is beyond the cutoff" % (m,))
        return len(self.basis[m])

    def dims(self):
        return {m: len(b) for m, b in self.basis.items()}

    def field(self, v):
        return component_field(v)

    def kscalar(self, i, m, v):
        return scalar(self.K[(i, m)], v, self.sqrt)

    def op(self, kind, i, m, v):
        """(target, matrix) of E_i or F_i on block m; target None when zero."""
        K = self.field(v)
        src = self.dim(m)
        t = _sub(m, i) if kind == "E" else _add(m, i)
        tdim = self.dim(t)
        if tdim == 0 or src == 0:
            return t, mat_zero(tdim, src, K)
        return t, (self.E if kind == "E" else self.F)[(i, m)][v]

    def word_op(self, ops, m, v):
        """Compose ops (list of ('E'|'F'|'K', i)) applied right to left starting at m."""
        K = self.field(v)
        cur = m
        M = mat_id(self.dim(m), K)
        for kind, i in reversed(ops):
            if kind == "K":
                M = mat_scale(M, self.kscalar(i, cur, v)) if self.dim(cur) else M
                continue
            t, A = self.op(kind, i, cur, v)
            M = mat_mul(A, M, K, self.dim(cur), self.dim(m))
            cur = t
        return cur, M


def build_hw(ctx, cutoff, seed=0):
    datum = ctx.datum
    r = datum.rank
    values = ctx.values
    sqrt = ctx.sqrt
    grid = [_zero_m(r)] + weights_up_to(r, cutoff)
    basis = {}
    pivots = {}
    for m in grid:
        words, G = ctx.gram(m)
        idx, blocks = pivot_basis(words, G, values, sqrt, seed)
        basis[m] = [words[k] for k in idx]
        pivots[m] = blocks
    E, F = {}, {}
    for m in grid:
        b = basis[m]
        if not b:
            continue
        for i in range(r):
            up = _add(m, i)
            if sum(up) <= cutoff and basis[up]:
                R = [[ctx.form_words(b2, (i,) + w) for w in b] for b2 in basis[up]]
                F[(i, m)] = _project(R, pivots[up], values, sqrt)
            down = _sub(m, i)
            if min(down) >= 0 and basis[down]:
                R = []
                for b2 in basis[down]:
                    row = []
                    for w in b:
                        acc = LaurentPi.zero()
                        for u, c in ctx.e_word(i, w).items():
                            t = ctx.form_words(b2, u)
                            if t:
                                acc = acc + c * t
                        row.append(acc)
                    R.append(row)
                E[(i, m)] = _project(R, pivots[down], values, sqrt)
    Kv = {(i, m): ctx.family.kval(i, m) for m in grid for i in range(r)}
    hw = HWModule(datum=datum, fam=ctx.fam, lam=ctx.lam, cutoff=cutoff, sqrt=sqrt,
                  basis=basis, E=E, F=F, K=Kv)
    _assert_highest(hw)
    return hw


def _project(R, blocks, values, sqrt):
    out = {}
    for v in values:
        Rv = [[scalar(x, v, sqrt) for x in row] for row in R]
        out[v] = field_solve(blocks[v], Rv)
    return out


def _assert_highest(hw):
    """E_i v = 0 at the top and F_i^(<h_i, lam> + 1) v = 0 when inside the cutoff."""
    datum = hw.datum
    top = _zero_m(datum.rank)
    for i in range(datum.rank):
        n = datum.pair(i, hw.lam)
        if n < 0:
            raise DomainError("highest weight is not dominant at index %d" % i)
        if n + 1 <= hw.cutoff:
            if hw.dim(_add(top, i, n + 1)) != 0:
                raise AssertionError("f_%d^%d v does not vanish" % (i, n + 1))
            if n and hw.dim(_add(top, i, n)) == 0:
                raise AssertionError("f_%d^%d v vanishes too early" % (i, n))


def module_weights(hw):
    return sorted(hw.basis, key=lambda m: (sum(m), m))


# ---------------------------------------------------------------------------
# relation checks


@dataclass
class CheckResult:
    ok: bool
    failure: object = None

    def __bool__(self):
        return self.ok


def _rhs(hw, i, m, v):
    """delta term of e_i f_i - swap f_i e_i on block m, in the component field."""
    K = hw.field(v)
    k = hw.kscalar(i, m, v)
    if hw.tilde:
        tp = scalar(hw.fam.tp[i], v, hw.sqrt)
        return (K(1) - k) / (K(1) - tp)
    p = scalar(hw.fam.p_diag[i], v, hw.sqrt)
    return (k - 1 / k) / (p - 1 / p)


def family_swap(fam):
    if isinstance(fam, TildeThetaP):
        return lambda i, j: fam.ttheta[j][i]
    return lambda i, j: fam.theta[j][i]


def check_EF(hw, swap=None, report=False):
    """E_i F_j - swap(i, j) F_j E_i = delta_ij (relation scalar) on interior blocks."""
    swap = swap or family_swap(hw.fam)
    datum = hw.datum
    for m in module_weights(hw):
        if sum(m) + 1 > hw.cutoff or hw.dim(m) == 0:
            continue
        for i in range(datum.rank):
            for j in range(datum.rank):
                t = _sub(_add(m, j), i)
                if min(t) < 0:
                    continue
                for v in hw.values:
                    K = hw.field(v)
                    _, A = hw.word_op([("E", i), ("F", j)], m, v)
                    _, B = hw.word_op([("F", j), ("E", i)], m, v)
                    lhs = mat_sub(A, mat_scale(B, scalar(swap(i, j), v, hw.sqrt)))
                    if i == j:
                        rhs = mat_scale(mat_id(hw.dim(m), K), _rhs(hw, i, m, v))
                    else:
                        rhs = mat_zero(hw.dim(t), hw.dim(m), K)
                    if not mat_eq(lhs, rhs):
                        res = CheckResult(False, {"i": i, "j": j, "block": m, "component": str(v)})
                        return res if report else False
    return CheckResult(True) if report else True


def corrupted_swap(fam, datum):
    """Negative control: the swap coefficient with the parity sign flipped on odd pairs
    and an extra sign on every pair otherwise."""
    base = family_swap(fam)

    def swap(i, j):
        if datum.parity[i] and datum.parity[j]:
            return base(i, j) * LaurentPi.pi()
        return -base(i, j)
    return swap


def _gauss_fact(n, i, datum):
    out = LaurentPi.one()
    for k in range(1, n + 1):
        out = out * gauss_pi(k, i, datum)
    return out


def check_divided_powers(hw, n, m, i, report=False):
    """e^{n} f^{m} against the sum over k of f^{m-k} e^{n-k} [x; k] on each block.

    Needs a tilde family of the quantum-group shape tp_i = q_i^2 pi_i.
    """
    if not hw.tilde:
        raise DomainError("divided-power identity is stated for the tilde family")
    datum = hw.datum
    d = datum.d[i]
    qi = LaurentPi.q(d)
    pii = LaurentPi.pi() if datum.parity[i] else LaurentPi.one()
    tp = qi * qi * pii
    if hw.fam.tp[i] != tp:
        raise DomainError("divided-power identity needs tp_i = q_i^2 pi_i")
    for b in module_weights(hw):
        if sum(b) + m > hw.cutoff or hw.dim(b) == 0:
            continue
        for v in hw.values:
            K = hw.field(v)
            sc = lambda x: scalar(x, v, hw.sqrt)  # noqa: E731
            fn = sc(_gauss_fact(n, i, datum))
            fm = sc(_gauss_fact(m, i, datum))
            t, L = hw.word_op([("E", i)] * n + [("F", i)] * m, b, v)
            L = mat_scale(L, 1 / (fn * fm))
            R = mat_zero(len(L), hw.dim(b), K)
            ktil = hw.kscalar(i, b, v)
            x = sc(tp ** (n - m)) * ktil
            tpv = sc(tp)
            for k in range(min(n, m) + 1):
                coef = sc(qi ** (-k * (k - n - m + 1)) * tp ** (k * (k + 1) // 2 - n * m))
                bracket = K(1)
                for rr in range(1, k + 1):
                    bracket = bracket * (1 - x * tpv ** (1 - rr)) / (1 - tpv ** rr)
                t2, M = hw.word_op([("F", i)] * (m - k) + [("E", i)] * (n - k), b, v)
                if t2 != t:
                    raise AssertionError("weight bookkeeping")
                norm = sc(_gauss_fact(m - k, i, datum) * _gauss_fact(n - k, i, datum))
                R = mat_add(R, mat_scale(M, coef * bracket / norm))
            if not mat_eq(L, R):
                res = CheckResult(False, {"block": b, "component": str(v), "n": n, "m": m})
                return res if report else False
    return CheckResult(True) if report else True


# ---------------------------------------------------------------------------
# characters


def weyl_kac_char(datum, lam, cutoff, roots=None):
    """Weight multiplicities of V(lam) at lam - beta for |beta| <= cutoff."""
    if any(datum.pair(i, lam) < 0 for i in range(datum.rank)):
        raise DomainError("highest weight must be dominant")
    lr = tuple(x + y for x, y in zip(lam, datum.rho))
    num = {}
    for _, sign, M in weyl_group(datum, cutoff):
        gamma = datum.root_coords(tuple(x - y for x, y in zip(lr, apply_matrix(M, lr))))
        if sum(gamma) <= cutoff:
            num[gamma] = num.get(gamma, 0) + sign
    if roots is None:
        roots = positive_roots(datum, cutoff)
    den = product_formula(datum, cutoff, roots)
    out = {}
    grid = [_zero_m(datum.rank)] + weights_up_to(datum.rank, cutoff)
    for beta in grid:
        s = 0
        for g, c in num.items():
            rest = tuple(x - y for x, y in zip(beta, g))
            if min(rest) >= 0:
                s += c * den.get(rest, 0)
        if s < 0:
            raise AssertionError("negative character coefficient at %r" % (beta,))
        out[beta] = s
    return out


def nilpotency_bound(datum, lam, beta, i):
    others = [-datum.a[i][j] for j in range(datum.rank) if j != i]
    return datum.pair(i, lam) + sum(beta) * max(others, default=0) + 1


def nilpotency_check(datum, lam, dims, cutoff):
    """dims(beta + k alpha_i) = 0 for k at or above the bound, inside the cutoff."""
    for beta in dims:
        for i in range(datum.rank):
            k = nilpotency_bound(datum, lam, beta, i)
            while sum(beta) + k <= cutoff:
                if dims.get(_add(beta, i, k), 0):
                    return False
                k += 1
    return True


# ---------------------------------------------------------------------------
# gauge transport


@dataclass
class Gauge:
    x: tuple
    y: tuple
    eps: tuple
    c: tuple


def gauge_solve(src, tgt):
    """Characters (x, y, eps, c) moving a src-module to a tgt-module.

    The tgt generators act as e_i P_i, f_i Q_i, K_i R_i with
    src_theta_ij = eps_ij x_ji / x_ij tgt_theta_ij and src_p_ij = eps_ij tgt_p_ij.
    """
    if not (isinstance(src, ThetaP) and isinstance(tgt, ThetaP)):
        raise TypeError("gauge_solve works on (theta, p) families")
    n = src.rank
    one = LaurentPi.one()
    eps = [[_simplify(src.p[i][j] * tgt.p[i][j].inverse()) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            if eps[i][j] * eps[i][j] != one:
                raise DomainError("p'_ij^2 = p_ij^2 fails at (%d, %d)" % (i, j))
    r = [[_simplify(src.theta[i][j] * tgt.theta[i][j].inverse()) for j in range(n)] for i in range(n)]
    x = [[one] * n for _ in range(n)]
    for i in range(n):
        if _simplify(r[i][i] * eps[i][i]) != one:
            raise DomainError("p_ii/theta_ii differs at %d" % i)
        for j in range(i + 1, n):
            x[j][i] = _simplify(r[i][j] * eps[i][j])
            if _simplify(r[i][j] * r[j][i] * eps[i][j] * eps[j][i]) != one:
                raise DomainError("p_ij p_ji/(theta_ij theta_ji) differs at (%d, %d)" % (i, j))
    y = [[_simplify(eps[i][j] * x[i][j].inverse()) for j in range(n)] for i in range(n)]
    c = []
    for i in range(n):
        ps, pt = src.p_diag[i], tgt.p_diag[i]
        c.append(("ratio", ps, pt))
    return Gauge(x=tuple(map(tuple, x)), y=tuple(map(tuple, y)), eps=tuple(map(tuple, eps)), c=tuple(c))


def _c_value(c, v, sqrt):
    _, ps, pt = c
    a, b = scalar(ps, v, sqrt), scalar(pt, v, sqrt)
    return (a - 1 / a) / (b - 1 / b)


def _char(chars, i, m):
    """prod_j chars[i][j]^(-m_j): the character at weight lam - m."""
    out = LaurentPi.one()
    for j, k in enumerate(m):
        if k:
            out = out * chars[i][j] ** (-k)
    return _simplify(out)


def _lift(hw, sqrt):
    """Move the blocks of a pi-ring module to the sqrt(pi) components."""
    if hw.sqrt or not sqrt:
        return hw

    def up(blocks):
        out = {}
        for key, b in blocks.items():
            nb = {}
            for v in SQRT_COMPONENTS:
                if isinstance(v, str):
                    nb[v] = [[_real_to_gauss(x) for x in row] for row in b[-1]]
                else:
                    nb[v] = b[1]
            out[key] = nb
        return out

    return HWModule(datum=hw.datum, fam=hw.fam, lam=hw.lam, cutoff=hw.cutoff, sqrt=True,
                    basis=hw.basis, E=up(hw.E), F=up(hw.F), K=dict(hw.K), meta=dict(hw.meta))


def _rescale(hw, fam, escale, fscale, K):
    """New module with E[(i,m)] *= escale(i, m, v) and F[(i,m)] *= fscale(i, m, v)."""
    E = {key: {v: mat_scale(b, escale(key[0], key[1], v)) for v, b in blk.items()}
         for key, blk in hw.E.items()}
    F = {key: {v: mat_scale(b, fscale(key[0], key[1], v)) for v, b in blk.items()}
         for key, blk in hw.F.items()}
    return HWModule(datum=hw.datum, fam=fam, lam=hw.lam, cutoff=hw.cutoff, sqrt=hw.sqrt,
                    basis=hw.basis, E=E, F=F, K=K, meta=dict(hw.meta))


def _untilde(hw, mid):
    """H-module to F-module: e acts as p_i p_ii^-1 e_H K_i^-1, K_i^2 = K~_i."""
    datum = hw.datum
    fam = _Family(datum, mid, hw.lam)
    K = {}
    for (i, m), kt in hw.K.items():
        k = fam.kval(i, m)
        if _simplify(k * k) != kt:
            raise DomainError("K_i^2 does not match K~_i at %r" % (m,))
        K[(i, m)] = k
    factor = [_simplify(mid.p_diag[i] * mid.p[i][i].inverse()) for i in range(datum.rank)]
    return _rescale(hw, mid,
                    lambda i, m, v: scalar(factor[i], v, hw.sqrt) / scalar(K[(i, m)], v, hw.sqrt),
                    lambda i, m, v: 1, K)


def _retilde(hw, tgt):
    """F-module to H-module: e_H acts as p_i^-1 p_ii e K_i, K~_i = K_i^2."""
    datum = hw.datum
    mid = hw.fam
    K = {key: _simplify(k * k) for key, k in hw.K.items()}
    fam = _Family(datum, tgt, hw.lam)
    for (i, m), kt in K.items():
        if kt != fam.kval(i, m):
            raise DomainError("K~_i eigenvalue does not match the target family")
    factor = [_simplify(mid.p_diag[i].inverse() * mid.p[i][i]) for i in range(datum.rank)]
    return _rescale(hw, tgt,
                    lambda i, m, v: scalar(factor[i], v, hw.sqrt) * scalar(hw.K[(i, m)], v, hw.sqrt),
                    lambda i, m, v: 1, K)


def _gauge(hw, tgt):
    g = gauge_solve(hw.fam, tgt)
    K = {(i, m): _simplify(k * _char(g.eps, i, m)) for (i, m), k in hw.K.items()}
    return _rescale(hw, tgt,
                    lambda i, m, v: scalar(_char(g.x, i, m), v, hw.sqrt),
                    lambda i, m, v: _c_value(g.c[i], v, hw.sqrt) * scalar(_char(g.y, i, m), v, hw.sqrt),
                    K)


def gauge_transform(hw, tgt):
    """Transport hw to the target family; both must lie in one gauge class."""
    src = hw.fam
    if src is tgt:
        return hw
    datum = hw.datum
    hw = _lift(hw, uses_sqrt(tgt))
    if isinstance(src, TildeThetaP):
        if isinstance(tgt, TildeThetaP):
            raise DomainError("transport between two tilde families is not supported")
        hw = _untilde(hw, from_tilde(src, tgt.p_diag, datum))
        return _gauge(hw, tgt)
    if isinstance(tgt, TildeThetaP):
        mid = from_tilde(tgt, src.p_diag, datum)
        return _retilde(_gauge(hw, mid), tgt)
    return _gauge(hw, tgt)


# ---------------------------------------------------------------------------
# the quantum Casimir operator


def _is_boldu_shape(fam, datum):
    n = datum.rank
    one = LaurentPi.one()
    for i in range(n):
        if fam.theta[i][i] != one:
            return False
        for j in range(n):
            if fam.theta[i][j] * fam.theta[i][j] != one:
                return False
            if fam.p[i][j] != _simplify(fam.p_diag[i] ** datum.a[i][j]):
                return False
    return True


@dataclass
class CasimirContext:
    psi: dict
    t: dict
    duals: dict
    phi: dict
    xi: dict
    omega: dict
    exponents: dict


def _psi_values(datum, fam, cutoff):
    """Psi(-nu) with Psi(0) = 1 and Psi(beta - alpha_i) = a_i(beta)^-1 Psi(beta)."""
    r = datum.rank

    def a(i, nu):
        # beta = -nu
        out = LaurentPi.one()
        for j, k in enumerate(nu):
            if k:
                out = out * fam.theta[j][i] ** k
        return _simplify(out * fam.p_diag[i] ** datum.pair_root(i, nu))

    psi = {_zero_m(r): LaurentPi.one()}
    for nu in weights_up_to(r, cutoff):
        val = None
        for i in range(r):
            prev = _sub(nu, i)
            if min(prev) < 0:
                continue
            cand = _simplify(psi[prev] * a(i, prev).inverse())
            if val is None:
                val = cand
            elif cand != val:
                raise AssertionError("Psi depends on the path at %r" % (nu,))
        psi[nu] = val
    return psi


def _t_values(datum, lam, cutoff):
    """t(lam - m) / t(lam) with t(mu - alpha_i) = t(mu) pi_i^<h_i, mu>."""
    r = datum.rank
    t = {_zero_m(r): LaurentPi.one()}
    for m in weights_up_to(r, cutoff):
        val = None
        for i in range(r):
            prev = _sub(m, i)
            if min(prev) < 0:
                continue
            k = datum.pair(i, lam) - datum.pair_root(i, prev)
            step = LaurentPi.pi() ** (k % 2) if datum.parity[i] else LaurentPi.one()
            cand = t[prev] * step
            if val is None:
                val = cand
            elif cand != val:
                raise AssertionError("t depends on the path at %r" % (m,))
        t[m] = val
    return t


def casimir_exponent(datum, lam, m):
    """(gamma|gamma) - 2 (gamma|lam + rho) for gamma = sum m_i alpha_i; must be an integer."""
    g = datum.root_weight(m)
    lr = tuple(x + y for x, y in zip(lam, datum.rho))
    e = Fraction(datum.form(g, g)) - 2 * Fraction(datum.form(g, lr))
    if e.denominator != 1:
        raise DomainError("non-integral Casimir exponent %s at %r" % (e, m))
    return int(e)


def absolute_casimir_exponent(datum, lam):
    lr = tuple(x + y for x, y in zip(lam, datum.rho))
    return Fraction(datum.form(lr, lr)) - Fraction(datum.form(datum.rho, datum.rho))


def casimir_build(hw, mutate=None, seed=0):
    """Phi, Xi^ and Omega^ = Phi Xi^ as blocks on the boldU-shaped module hw.

    mutate: None, "psi" (drop Psi) or "t" (drop t); used as negative controls.
    """
    datum = hw.datum
    fam = hw.fam
    if not isinstance(fam, ThetaP) or not _is_boldu_shape(fam, datum):
        raise DomainError("the Casimir needs a family with p_ij = p_i^a_ij and theta_ij^2 = theta_ii = 1")
    r = datum.rank
    cutoff = hw.cutoff
    boson = BosonAlgebra(datum, derive_tilde(fam))
    psi = _psi_values(datum, fam, cutoff)
    t = _t_values(datum, hw.lam, cutoff)
    if mutate == "psi":
        psi = {k: LaurentPi.one() for k in psi}
    if mutate == "t":
        t = {k: LaurentPi.one() for k in t}
    duals = {}
    grid = [_zero_m(r)] + weights_up_to(r, cutoff)
    for nu in grid:
        words, G = boson.gram(nu)
        idx, blocks = pivot_basis(words, G, hw.values, hw.sqrt, seed)
        b = [words[k] for k in idx]
        scale = LaurentPi.one()
        for i, k in enumerate(nu):
            if k:
                p = fam.p_diag[i]
                scale = scale * (p - p.inverse()) ** k
        inv = {}
        for v in hw.values:
            K = component_field(v)
            n = len(b)
            Ginv = field_solve(blocks[v], mat_id(n, K)) if n else []
            inv[v] = mat_scale(Ginv, scalar(_simplify(scale), v, hw.sqrt))
        duals[nu] = (b, inv)
    phi, xi, omega, exps = {}, {}, {}, {}
    for m in module_weights(hw):
        dm = hw.dim(m)
        e = casimir_exponent(datum, hw.lam, m)
        exps[m] = e
        for v in hw.values:
            K = hw.field(v)
            P = mat_zero(dm, dm, K)
            for nu in grid:
                low = tuple(x - y for x, y in zip(m, nu))
                if min(low) < 0 or hw.dim(low) == 0 or dm == 0:
                    continue
                b, inv = duals[nu]
                if not b:
                    continue
                raised = []
                for w in b:
                    ops = []
                    for j in w:
                        ops += [("K", j), ("E", j)]
                    raised.append(hw.word_op(ops, m, v)[1])
                lowered = [hw.word_op([("F", j) for j in w], low, v)[1] for w in b]
                acc = mat_zero(dm, dm, K)
                G = inv[v]
                for k in range(len(b)):
                    for l in range(len(b)):
                        if G[k][l] != 0:
                            acc = mat_add(acc, mat_scale(mat_mul(lowered[k], raised[l], K, hw.dim(low), dm), G[k][l]))
                P = mat_add(P, mat_scale(acc, scalar(psi[nu], v, hw.sqrt)))
            phi[(m, v)] = P
            x = scalar(t[m] * LaurentPi.q(e), v, hw.sqrt)
            xi[(m, v)] = x
            omega[(m, v)] = mat_scale(P, x)
    return CasimirContext(psi=psi, t=t, duals=duals, phi=phi, xi=xi, omega=omega, exponents=exps)


def casimir_check(hw, cas=None, report=False, **kw):
    """Omega^ = id on every block and commutes with E_i, F_i on interior blocks."""
    cas = cas or casimir_build(hw, **kw)
    datum = hw.datum

    def fail(info):
        return CheckResult(False, info) if report else False

    for m in module_weights(hw):
        for v in hw.values:
            K = hw.field(v)
            if not mat_eq(cas.omega[(m, v)], mat_id(hw.dim(m), K)):
                return fail({"block": m, "component": str(v), "what": "identity"})
    for m in module_weights(hw):
        if sum(m) + 1 > hw.cutoff:
            continue
        for i in range(datum.rank):
            for v in hw.values:
                up = _add(m, i)
                _, Fm = hw.op("F", i, m, v)
                lhs = mat_mul(cas.omega[(up, v)], Fm, hw.field(v), hw.dim(up), hw.dim(m))
                rhs = mat_mul(Fm, cas.omega[(m, v)], hw.field(v), hw.dim(m), hw.dim(m))
                if not mat_eq(lhs, rhs):
                    return fail({"block": m, "component": str(v), "what": "f_%d" % i})
                down = _sub(m, i)
                if min(down) < 0:
                    continue
                _, Em = hw.op("E", i, m, v)
                lhs = mat_mul(cas.omega[(down, v)], Em, hw.field(v), hw.dim(down), hw.dim(m))
                rhs = mat_mul(Em, cas.omega[(m, v)], hw.field(v), hw.dim(m), hw.dim(m))
                if not mat_eq(lhs, rhs):
                    return fail({"block": m, "component": str(v), "what": "e_%d" % i})
    return CheckResult(True) if report else True
