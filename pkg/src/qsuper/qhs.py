"""Quiver Hecke superalgebra R(n) in PBW normal form.

A PBW term is a triple (nu, a, w) standing for x_1^a1 ... x_n^an tau_w e(nu),
where nu is the residue sequence on the right, a an exponent vector and w a
permutation.  w is stored as the sequence obtained by applying the tau-word
to (0, ..., n-1), so the residues on the left are nu[w[k]].  tau_w always
means the lexicographically least reduced word of w.

Everything is computed by letting generators act on the left of normal
forms.  The action is defined through the relations, so associativity of
the resulting product is a genuine check on their consistency.
"""
from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import sympy

from .cartan import CartanSuperdatum
from .coeffs import DomainError, LaurentPi, PiScalar, gauss_pi


class ParameterError(DomainError):
    pass


# ---------------------------------------------------------------------------
# parameters


@dataclass(frozen=True, eq=False)
class QParams:
    """t[(i, j)] = {(r, s): coefficient} for i != j; Q_{i,i} = 0."""

    datum: CartanSuperdatum
    t: dict
    name: str = ""

    def poly(self, i, j):
        if i == j:
            return {}
        return self.t.get((i, j), {})

    def to_json(self):
        return {"name": self.name,
                "Q": [{"i": i + 1, "j": j + 1,
                       "terms": [[r, s, str(c)] for (r, s), c in sorted(terms.items())]}
                      for (i, j), terms in sorted(self.t.items())]}


def _ip(datum, i, j):
    return datum.d[i] * datum.a[i][j]


def check_qparams(qp):
    """First violated condition as a string, or None."""
    datum = qp.datum
    n = datum.rank
    for (i, j), terms in qp.t.items():
        if i == j:
            if any(terms.values()):
                return "Q_{%d,%d} must vanish" % (i + 1, i + 1)
            continue
        for (r, s), c in terms.items():
            if not c:
                continue
            if 2 * _ip(datum, i, j) + r * _ip(datum, i, i) + s * _ip(datum, j, j) != 0:
                return "t_{%d,%d;(%d,%d)} has nonzero degree" % (i + 1, j + 1, r, s)
            if datum.parity[i] and r % 2:
                return "t_{%d,%d;(%d,%d)} must vanish for odd %d" % (i + 1, j + 1, r, s, i + 1)
            if qp.t.get((j, i), {}).get((s, r), 0) != c:
                return "t_{%d,%d;(%d,%d)} != t_{%d,%d;(%d,%d)}" % (i + 1, j + 1, r, s, j + 1, i + 1, s, r)
    for i in range(n):
        for j in range(n):
            if i != j and not qp.poly(i, j).get((-datum.a[i][j], 0), 0):
                return "t_{%d,%d;(%d,0)} must be invertible" % (i + 1, j + 1, -datum.a[i][j])
    return None


def make_qparams(datum, upper, name=""):
    """Build from the polynomials Q_{i,j} for i < j; the rest follows by symmetry."""
    t = {}
    for (i, j), terms in upper.items():
        if not i < j:
            raise ParameterError("give Q_{i,j} with i < j only")
        t[(i, j)] = {rs: Fraction(c) for rs, c in terms.items() if c}
        t[(j, i)] = {(s, r): Fraction(c) for (r, s), c in terms.items() if c}
    qp = QParams(datum, t, name)
    bad = check_qparams(qp)
    if bad is not None:
        raise ParameterError(bad)
    return qp


def standard_qparams(datum, mixed=None):
    """Q_{i,j}(u, v) = u^(-a_ij) - v^(-a_ji) for i < j, plus optional extra terms.

    mixed maps (i, j) to additional {(r, s): c}; they must respect the
    degree and parity constraints.
    """
    n = datum.rank
    upper = {}
    for i in range(n):
        for j in range(i + 1, n):
            terms = {(-datum.a[i][j], 0): 1}
            key = (0, -datum.a[j][i])
            terms[key] = terms.get(key, 0) - 1
            if not terms[key]:
                # a_ij = a_ji = 0: both exponents vanish, keep a unit constant
                terms[key] = 1
            for rs, c in (mixed or {}).get((i, j), {}).items():
                terms[rs] = terms.get(rs, 0) + c
            upper[(i, j)] = terms
    return make_qparams(datum, upper, name=datum.name)


def qparams_preset(datum):
    """Standard choice; affine A1 also gets a mixed x1 x2 term."""
    if datum.name == "A1affine":
        return standard_qparams(datum, {(0, 1): {(1, 1): 3}})
    return standard_qparams(datum)


# ---------------------------------------------------------------------------
# permutations and the reduced-word table


def apply_word(word, seq):
    """Residues on the left of tau_word e(seq)."""
    seq = list(seq)
    for c in reversed(word):
        seq[c], seq[c + 1] = seq[c + 1], seq[c]
    return tuple(seq)


def perm_of(word, n):
    return apply_word(word, range(n))


def length(perm):
    return sum(1 for x, y in itertools.combinations(perm, 2) if x > y)


@lru_cache(maxsize=None)
def reduced_word(perm):
    """Lexicographically least reduced word."""
    for c in range(len(perm) - 1):
        if perm[c] > perm[c + 1]:
            rest = list(perm)
            rest[c], rest[c + 1] = rest[c + 1], rest[c]
            return (c,) + reduced_word(tuple(rest))
    return ()


def is_reduced(word, n):
    return length(perm_of(word, n)) == len(word)


def _moves(word):
    """Braid moves available on a word: (position, replacement block)."""
    for j in range(len(word) - 1):
        a, b = word[j], word[j + 1]
        if abs(a - b) > 1:
            yield j, (b, a)
    for j in range(len(word) - 2):
        a, b, c = word[j:j + 3]
        if a == c and abs(a - b) == 1:
            yield j, (b, a, b)


@lru_cache(maxsize=None)
def braid_path(start, goal):
    """Shortest sequence of braid moves turning one reduced word into another."""
    if start == goal:
        return ()
    prev = {start: None}
    queue = deque([start])
    while queue:
        w = queue.popleft()
        for j, block in _moves(w):
            v = w[:j] + block + w[j + len(block):]
            if v in prev:
                continue
            prev[v] = (w, j)
            if v == goal:
                path = []
                while prev[v] is not None:
                    w, j = prev[v]
                    path.append((w, j))
                    v = w
                return tuple(reversed(path))
            queue.append(v)
    raise AssertionError("no braid path between %r and %r" % (start, goal))


@lru_cache(maxsize=None)
def all_reduced_words(perm):
    n = len(perm)
    out = []
    for c in range(n - 1):
        if perm[c] > perm[c + 1]:
            rest = list(perm)
            rest[c], rest[c + 1] = rest[c + 1], rest[c]
            out.extend((c,) + w for w in all_reduced_words(tuple(rest)))
    return tuple(out) if out else ((),)


def longest(n):
    return tuple(range(n - 1, -1, -1))


# ---------------------------------------------------------------------------
# elements


@dataclass
class QHSElement:
    """Sum of c * x^a tau_w e(nu) over keys (nu, a, w)."""

    n: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        self.terms = {k: Fraction(c) for k, c in self.terms.items() if c}

    def __add__(self, other):
        return QHSElement(self.n, _add(dict(self.terms), other.terms, 1))

    def __sub__(self, other):
        return QHSElement(self.n, _add(dict(self.terms), other.terms, -1))

    def scale(self, c):
        return QHSElement(self.n, {k: c * v for k, v in self.terms.items()})

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, QHSElement) and self.n == other.n and self.terms == other.terms

    def to_json(self):
        return [{"nu": [i + 1 for i in nu], "a": list(a),
                 "w": [c + 1 for c in reduced_word(w)], "coeff": str(c)}
                for (nu, a, w), c in sorted(self.terms.items())]


def _add(acc, terms, c=1):
    for k, v in terms.items():
        v = acc.get(k, 0) + c * v
        if v:
            acc[k] = v
        else:
            acc.pop(k, None)
    return acc


def idempotent(nu):
    n = len(nu)
    return QHSElement(n, {(tuple(nu), (0,) * n, tuple(range(n))): 1})


def left_residues(key):
    nu, _, w = key
    return tuple(nu[k] for k in w)


class QHSAlgebra:
    """R(n) for one datum and one choice of Q, with memoised left actions."""

    def __init__(self, qp):
        bad = check_qparams(qp)
        if bad is not None:
            raise ParameterError(bad)
        self.qp = qp
        self.datum = qp.datum
        self.par = qp.datum.parity
        self._lx = {}
        self._lt = {}
        self._corr = {}

    # grading ------------------------------------------------------------

    def degree(self, key):
        nu, a, w = key
        mu = left_residues(key)
        d = sum(e * _ip(self.datum, mu[k], mu[k]) for k, e in enumerate(a))
        d += self._tau_grading(reduced_word(w), nu)[0]
        return d

    def parity(self, key):
        nu, a, w = key
        mu = left_residues(key)
        p = sum(e * self.par[mu[k]] for k, e in enumerate(a))
        p += self._tau_grading(reduced_word(w), nu)[1]
        return p % 2

    def _tau_grading(self, word, nu):
        rho = list(nu)
        deg = par = 0
        for c in reversed(word):
            i, j = rho[c], rho[c + 1]
            deg -= _ip(self.datum, i, j)
            par += self.par[i] * self.par[j]
            rho[c], rho[c + 1] = j, i
        return deg, par % 2

    def is_homogeneous(self, el):
        keys = list(el.terms)
        if not keys:
            return True
        return len({(self.degree(k), self.parity(k)) for k in keys}) == 1

    # left action of generators -----------------------------------------

    def left_x(self, k, el_terms):
        out = {}
        for key, c in el_terms.items():
            for k2, c2 in self._left_x_term(k, key).items():
                v = out.get(k2, 0) + c * c2
                if v:
                    out[k2] = v
                else:
                    out.pop(k2, None)
        return out

    def _left_x_term(self, k, key):
        nu, a, w = key
        mu = left_residues(key)
        sign = 1
        if self.par[mu[k]]:
            flips = sum(a[j] for j in range(k) if self.par[mu[j]])
            sign = -1 if flips % 2 else 1
        a2 = list(a)
        a2[k] += 1
        return {(nu, tuple(a2), w): sign}

    def left_tau(self, c, el_terms):
        out = {}
        for key, coef in el_terms.items():
            _add(out, self._left_tau_term(c, key), coef)
        return out

    def _left_tau_term(self, c, key):
        hit = self._lt.get((c, key))
        if hit is not None:
            return hit
        nu, a, w = key
        mu = left_residues(key)
        par = self.par
        s = -1 if par[mu[c]] and par[mu[c + 1]] else 1
        nz = [k for k, e in enumerate(a) if e]
        if nz:
            k = nz[0]
            a2 = list(a)
            a2[k] -= 1
            rest = {(nu, tuple(a2), w): 1}
            if k not in (c, c + 1):
                sign = -1 if par[mu[k]] and par[mu[c]] and par[mu[c + 1]] else 1
                out = {t: sign * v for t, v in self.left_x(k, self.left_tau(c, rest)).items()}
            else:
                delta = 1 if mu[c] == mu[c + 1] else 0
                other = c if k == c + 1 else c + 1
                out = {t: s * v for t, v in self.left_x(other, self.left_tau(c, rest)).items()}
                if delta:
                    # tau x_{c+1} = s x_c tau + 1 and tau x_c = s x_{c+1} tau - s
                    _add(out, rest, 1 if k == c + 1 else -s)
        else:
            out = self._tau_on_tau(c, nu, w)
        self._lt[(c, key)] = out
        return out

    def _tau_on_tau(self, c, nu, w):
        word = reduced_word(w)
        if w[c] < w[c + 1]:
            return self.reduce_tau((c,) + word, nu)
        # rewrite tau_w so that it starts with tau_c, then use tau_c^2 = Q
        w2 = list(w)
        w2[c], w2[c + 1] = w2[c + 1], w2[c]
        target = (c,) + reduced_word(tuple(w2))
        out = {}
        for coef, letters in self._braid_expand(word, target, nu):
            if letters == [("t", x) for x in target]:
                rest = target[1:]
                mu = apply_word(rest, nu)
                tail = self.reduce_tau(rest, nu)
                for (r, sx), tc in self.qp.poly(mu[c], mu[c + 1]).items():
                    part = tail
                    for _ in range(sx):
                        part = self.left_x(c + 1, part)
                    for _ in range(r):
                        part = self.left_x(c, part)
                    _add(out, part, coef * tc)
            else:
                _add(out, self.act([("t", c)] + letters, nu), coef)
        return out

    def reduce_tau(self, word, nu):
        """Normal form of tau_word e(nu) for a reduced word."""
        n = len(nu)
        perm = perm_of(word, n)
        goal = reduced_word(perm)
        if word == goal:
            return {(tuple(nu), (0,) * n, perm): Fraction(1)}
        out = {}
        for coef, letters in self._braid_expand(word, goal, nu):
            if letters == [("t", x) for x in goal]:
                _add(out, {(tuple(nu), (0,) * n, perm): Fraction(1)}, coef)
            else:
                _add(out, self.act(letters, nu), coef)
        return out

    def _braid_expand(self, word, goal, nu):
        """tau_word e(nu) as goal-word plus correction words, each with a coefficient.

        Corrections have fewer tau letters, so evaluating them recursively
        terminates.
        """
        out = []
        sign = 1
        cur = word
        for w_before, j in braid_path(word, goal):
            assert w_before == cur
            par = self.par
            tail = cur[j + 2:] if abs(cur[j] - cur[j + 1]) > 1 else cur[j + 3:]
            mu = apply_word(tail, nu)
            if abs(cur[j] - cur[j + 1]) > 1:
                a, b = cur[j], cur[j + 1]
                if par[mu[a]] and par[mu[a + 1]] and par[mu[b]] and par[mu[b + 1]]:
                    sign = -sign
                cur = cur[:j] + (b, a) + cur[j + 2:]
                continue
            x, y = cur[j], cur[j + 1]
            a = min(x, y)
            # (t_{a+1} t_a t_{a+1} - t_a t_{a+1} t_a) e(mu) = corr(mu)
            corr_sign = 1 if x == a + 1 else -1
            if mu[a] == mu[a + 2]:
                pre = [("t", z) for z in cur[:j]]
                post = [("t", z) for z in cur[j + 3:]]
                for coef, xs in self.braid_correction(a, mu):
                    out.append((sign * corr_sign * coef, pre + [("x", k) for k in xs] + post))
            cur = cur[:j] + (y, x, y) + cur[j + 3:]
        assert cur == goal
        out.append((sign, [("t", z) for z in goal]))
        return out

    def braid_correction(self, a, mu):
        """Correction for the braid relation at positions a, a+1, a+2 as x-words."""
        i, j = mu[a], mu[a + 1]
        odd = bool(self.par[i])
        key = (i, j, odd)
        quot = self._corr.get(key)
        if quot is None:
            quot = self._corr[key] = _difference_quotient(self.qp.poly(i, j), odd, (i + 1, j + 1))
        out = []
        for (u, v, s), c in quot:
            if odd:
                # u, v count powers of x^2 here
                body = [a + 2] * (2 * u) + [a] * (2 * v) + [a + 1] * s
                sgn = -1 if self.par[j] else 1
                out.append((sgn * c, [a + 2] + body))
                out.append((-sgn * c, [a] + body))
            else:
                out.append((c, [a + 2] * u + [a] * v + [a + 1] * s))
        return out

    # words and products --------------------------------------------------

    def act(self, letters, nu):
        """Normal form of letters * e(nu); letters are ('x', k), ('t', c) or ('e', seq)."""
        n = len(nu)
        el = {(tuple(nu), (0,) * n, tuple(range(n))): Fraction(1)}
        return self.act_on(letters, el)

    def act_on(self, letters, el):
        for kind, v in reversed(letters):
            if not el:
                break
            if kind == "x":
                el = self.left_x(v, el)
            elif kind == "t":
                el = self.left_tau(v, el)
            else:
                v = tuple(v)
                el = {k: c for k, c in el.items() if left_residues(k) == v}
        return el

    def straighten(self, letters, n):
        """Normal form of a formal generator word, summed over all residue sequences."""
        _check_letters(letters, n, self.datum.rank)
        out = {}
        for nu in itertools.product(range(self.datum.rank), repeat=n):
            _add(out, self.act(letters, nu))
        return QHSElement(n, out)

    def letters_of(self, key):
        nu, a, w = key
        xs = [("x", k) for k, e in enumerate(a) for _ in range(e)]
        return xs + [("t", c) for c in reduced_word(w)] + [("e", nu)]

    def multiply(self, u, v):
        if u.n != v.n:
            raise DomainError("factors live in different R(n)")
        out = {}
        for key, c in u.terms.items():
            _add(out, self.act_on(self.letters_of(key), dict(v.terms)), c)
        return QHSElement(u.n, out)

    def straighten_element(self, el):
        """Re-straighten an element term by term; identity on normal forms."""
        out = {}
        for key, c in el.terms.items():
            _add(out, self.act(self.letters_of(key)[:-1], key[0]), c)
        return QHSElement(el.n, out)

    def gen(self, kind, v, nu):
        """Single generator times e(nu) as an element."""
        return QHSElement(len(nu), self.act([(kind, v)], nu))

    # relations ---------------------------------------------------------

    def relation_residuals(self, nu):
        """LHS - RHS of every defining relation applied to e(nu); all must be zero."""
        n = len(nu)
        par = self.par
        out = []

        def nf(letters):
            return self.act(letters, nu)

        def diff(name, lhs, rhs):
            out.append((name, _add(dict(lhs), rhs, -1)))

        for mu in itertools.product(range(self.datum.rank), repeat=n):
            e_mu_e_nu = nf([("e", mu)])
            diff("e(mu)e(nu)", e_mu_e_nu, nf([]) if mu == tuple(nu) else {})
        for p in range(n):
            for q in range(n):
                if p != q:
                    sign = -1 if par[nu[p]] and par[nu[q]] else 1
                    diff("x_p x_q", nf([("x", p), ("x", q)]),
                         {k: sign * c for k, c in nf([("x", q), ("x", p)]).items()})
        for a in range(n - 1):
            sa = list(nu)
            sa[a], sa[a + 1] = sa[a + 1], sa[a]
            diff("tau e = e tau", nf([("t", a)]), nf([("e", tuple(sa)), ("t", a)]))
            s = -1 if par[nu[a]] and par[nu[a + 1]] else 1
            delta = nf([]) if nu[a] == nu[a + 1] else {}
            for p in range(n):
                if p not in (a, a + 1):
                    sign = -1 if par[nu[p]] and par[nu[a]] and par[nu[a + 1]] else 1
                    diff("tau x_p", nf([("t", a), ("x", p)]),
                         {k: sign * c for k, c in nf([("x", p), ("t", a)]).items()})
            lhs1 = _add(nf([("t", a), ("x", a + 1)]), nf([("x", a), ("t", a)]), -s)
            lhs2 = _add(nf([("x", a + 1), ("t", a)]), nf([("t", a), ("x", a)]), -s)
            diff("tau x_{a+1} - x_a tau", lhs1, delta)
            diff("x_{a+1} tau - tau x_a", lhs2, delta)
            q = {}
            for (r, sx), c in self.qp.poly(nu[a], nu[a + 1]).items():
                _add(q, nf([("x", a)] * r + [("x", a + 1)] * sx), c)
            diff("tau^2", nf([("t", a), ("t", a)]), q)
            for b in range(n - 1):
                if abs(a - b) > 1:
                    sign = -1 if par[nu[a]] and par[nu[a + 1]] and par[nu[b]] and par[nu[b + 1]] else 1
                    diff("tau_a tau_b", nf([("t", a), ("t", b)]),
                         {k: sign * c for k, c in nf([("t", b), ("t", a)]).items()})
            if a + 2 < n:
                lhs = _add(nf([("t", a + 1), ("t", a), ("t", a + 1)]), nf([("t", a), ("t", a + 1), ("t", a)]), -1)
                rhs = {}
                if nu[a] == nu[a + 2]:
                    for c, xs in self.braid_correction(a, nu):
                        _add(rhs, nf([("x", k) for k in xs]), c)
                diff("braid", lhs, rhs)
        return out

    def relations_close(self, n):
        """First failing (nu, relation name), or None."""
        for nu in itertools.product(range(self.datum.rank), repeat=n):
            for name, res in self.relation_residuals(nu):
                if res:
                    return nu, name
        return None

    # idempotents -------------------------------------------------------

    def b_gen(self, i, n, k):
        nu = (i,) * n
        return QHSElement(n, self.act([("t", k), ("x", k + 1)], nu))

    def b_word(self, i, n, word):
        out = idempotent((i,) * n)
        for k in word:
            out = self.multiply(out, self.b_gen(i, n, k))
        return out

    def b_idempotent(self, i, n):
        return self.b_word(i, n, reduced_word(longest(n)))

    def b_checks(self, i, n):
        """Idempotency, braid relations and reduced-word independence of b(i^n)."""
        gens = [self.b_gen(i, n, k) for k in range(n - 1)]
        for b in gens:
            if self.multiply(b, b) != b:
                return False
        for k in range(n - 2):
            b1, b2 = gens[k], gens[k + 1]
            lhs = self.multiply(self.multiply(b1, b2), b1)
            rhs = self.multiply(self.multiply(b2, b1), b2)
            if lhs != rhs:
                return False
        for k in range(n - 1):
            for l in range(k + 2, n - 1):
                if self.multiply(gens[k], gens[l]) != self.multiply(gens[l], gens[k]):
                    return False
        ref = self.b_idempotent(i, n)
        for word in all_reduced_words(longest(n)):
            if self.b_word(i, n, word) != ref:
                return False
        return self.multiply(ref, ref) == ref

    # cyclotomic generator ------------------------------------------------

    def cyclotomic_element(self, lam, n, coeffs=None):
        """a^lam(x_1) = sum_nu a_{nu_1}(x_1) e(nu)."""
        out = {}
        for nu in itertools.product(range(self.datum.rank), repeat=n):
            poly = cyclotomic_poly(self.datum, lam, nu[0], (coeffs or {}).get(nu[0]))
            for deg, c in poly.items():
                _add(out, self.act([("x", 0)] * deg, nu), c)
        return QHSElement(n, out)


def _check_letters(letters, n, rank):
    for kind, v in letters:
        if kind == "x" and not 0 <= v < n:
            raise DomainError("x index out of range")
        if kind == "t" and not 0 <= v < n - 1:
            raise DomainError("tau index out of range")
        if kind == "e" and (len(v) != n or any(not 0 <= i < rank for i in v)):
            raise DomainError("bad idempotent %r" % (v,))


_U, _V, _Z = sympy.symbols("u v z")


def _difference_quotient(poly, odd, label):
    """(Q(u, z) - Q(v, z)) / (u - v), or over u^2 - v^2 in the odd case.

    Returns [((u_exp, v_exp, z_exp), coeff)].  In the odd case u and v stand
    for the squares of the variables.
    """
    num = 0
    for (r, s), c in poly.items():
        if odd:
            if r % 2:
                raise ParameterError("odd power of an odd variable in Q_%r" % (label,))
            num += sympy.Rational(c.numerator, c.denominator) * (_U ** (r // 2) - _V ** (r // 2)) * _Z ** s
        else:
            num += sympy.Rational(c.numerator, c.denominator) * (_U ** r - _V ** r) * _Z ** s
    num = sympy.Poly(num, _U, _V, _Z, domain="QQ")
    den = sympy.Poly(_U - _V, _U, _V, _Z, domain="QQ")
    quo, rem = sympy.div(num, den)
    if not rem.is_zero:
        raise ParameterError("difference quotient of Q_%r has a remainder" % (label,))
    return [(m, Fraction(int(c.p), int(c.q))) for m, c in quo.terms()]


# ---------------------------------------------------------------------------
# gradings and dimensions


def sequences_of(beta):
    """All residue sequences with content beta."""
    letters = [i for i, m in enumerate(beta) for _ in range(m)]
    return sorted(set(itertools.permutations(letters)))


def _lp(d):
    return LaurentPi({e: PiScalar(*v) for e, v in d.items() if v != [0, 0]})


def graded_dim(alg, beta, lo, hi):
    """dim_q^pi of R(beta) in degrees lo..hi from the PBW generating function."""
    datum = alg.datum
    n = sum(beta)
    out = {}
    for nu in sequences_of(beta):
        # polynomial part: product of geometric series, truncated
        cap = hi - _min_tau_degree(alg, nu)
        series = {(0, 0): 1}
        for k in range(n):
            step = _ip(datum, nu[k], nu[k])
            p = datum.parity[nu[k]]
            new = {}
            for (d, par), c in series.items():
                e = 0
                while d + e * step <= cap:
                    key = (d + e * step, (par + e * p) % 2)
                    new[key] = new.get(key, 0) + c
                    e += 1
            series = new
        for w in itertools.permutations(range(n)):
            td, tp = alg._tau_grading(reduced_word(w), nu)
            for (d, par), c in series.items():
                deg = d + td
                if lo <= deg <= hi:
                    slot = out.setdefault(deg, [0, 0])
                    slot[(par + tp) % 2] += c
    return _lp(out)


def _min_tau_degree(alg, nu):
    return min(alg._tau_grading(reduced_word(w), nu)[0] for w in itertools.permutations(range(len(nu))))


def pbw_count(alg, beta, lo, hi):
    """Same window, by listing PBW monomials one by one."""
    n = sum(beta)
    out = {}
    cap = hi - min(_min_tau_degree(alg, nu) for nu in sequences_of(beta))
    for nu in sequences_of(beta):
        mu_step = min(_ip(alg.datum, i, i) for i in nu)
        top = max(cap // mu_step, 0)
        for w in itertools.permutations(range(n)):
            for a in itertools.product(range(top + 1), repeat=n):
                key = (nu, a, w)
                deg = alg.degree(key)
                if lo <= deg <= hi:
                    slot = out.setdefault(deg, [0, 0])
                    slot[alg.parity(key)] += 1
    return _lp(out)


# ---------------------------------------------------------------------------
# cyclotomic polynomial


def cyclotomic_poly(datum, lam, i, coeffs=None):
    """a_i^lam(u) as {degree: coefficient}; coeffs lists c_{i;0..N}."""
    N = datum.pair(i, lam)
    if N < 0:
        raise DomainError("lambda is not dominant at %d" % (i + 1))
    if coeffs is None:
        coeffs = [1] + [0] * N
    coeffs = [Fraction(c) for c in coeffs]
    if len(coeffs) != N + 1:
        raise ParameterError("need %d coefficients, got %d" % (N + 1, len(coeffs)))
    if coeffs[0] != 1:
        raise ParameterError("c_{i;0} must be 1")
    if datum.parity[i]:
        for k, c in enumerate(coeffs):
            if k % 2 and c:
                raise ParameterError("c_{%d;%d} must vanish for odd %d" % (i + 1, k, i + 1))
    return {N - k: c for k, c in enumerate(coeffs) if c}


def cyclotomic_degree_check(datum, lam, i, coeffs=None):
    poly = cyclotomic_poly(datum, lam, i, coeffs)
    return max(poly) == datum.pair(i, lam) and poly[max(poly)] == 1


# ---------------------------------------------------------------------------
# characters


def char_delta(ch, i, k):
    """Restriction to sequences ending in i^k."""
    return {nu: c for nu, c in ch.items() if c and len(nu) >= k and all(x == i for x in nu[len(nu) - k:])}


def char_epsilon(ch, i):
    top = max((len(nu) for nu in ch), default=0)
    best = 0
    for k in range(top + 1):
        if char_delta(ch, i, k):
            best = k
    return best


def char_L(alg, i, n):
    """Character of the module induced from the trivial polynomial module."""
    nu = (i,) * n
    total = {}
    for w in itertools.permutations(range(n)):
        d, p = alg._tau_grading(reduced_word(w), nu)
        slot = total.setdefault(d, [0, 0])
        slot[p] += 1
    return {nu: _lp(total)}


def gauss_factorial(datum, i, n):
    out = LaurentPi.one()
    for k in range(1, n + 1):
        out = out * gauss_pi(k, i, datum)
    return out


# ---------------------------------------------------------------------------
# expression grammar: e(1,2) * x1 * t1 * ...

_TOKEN = re.compile(r"\s*(?:e\(([\d,\s]*)\)|x(\d+)|t(\d+))\s*")


def parse_expr(text):
    """Parse a '*'-separated word; indices and residues are 1-based."""
    letters = []
    for part in text.split("*"):
        m = _TOKEN.fullmatch(part)
        if not m:
            raise DomainError("cannot parse %r" % part.strip())
        if m.group(1) is not None:
            letters.append(("e", tuple(int(x) - 1 for x in m.group(1).split(",") if x.strip())))
        elif m.group(2) is not None:
            letters.append(("x", int(m.group(2)) - 1))
        else:
            letters.append(("t", int(m.group(3)) - 1))
    return letters
