"""The negative half as word combinations, boson operators and the form.

A word (i1, ..., in) stands for the monomial f_i1 ... f_in.  No quotient
is taken: relations among words show up only as the radical of the form.
"""
from __future__ import annotations

import random

from .cartan import parity_of, positive_roots, word_weight, words_of_weight
from .coeffs import DomainError, LaurentPi, RatFuncPi, qbinom, qfact, qint
from .linalg import checked_rank
from .params import TildeThetaP, check_ttp


class UMinusElt:
    """Finite combination of words with coefficients; zero terms are dropped."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for w, c in (terms.items() if isinstance(terms, dict) else terms):
                w = tuple(w)
                if w in clean:
                    c = clean[w] + c
                if c:
                    clean[w] = c
                else:
                    clean.pop(w, None)
        self.terms = clean

    @classmethod
    def word(cls, w, c=1):
        return cls({tuple(w): c})

    def __add__(self, other):
        t = dict(self.terms)
        for w, c in other.terms.items():
            t[w] = t[w] + c if w in t else c
        return UMinusElt(t)

    def __neg__(self):
        return UMinusElt({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return UMinusElt({w: c * v for w, v in self.terms.items()})

    def __mul__(self, other):
        """Concatenation product."""
        if not isinstance(other, UMinusElt):
            return self.scale(other)
        t = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                v = c1 * c2
                t[w] = t[w] + v if w in t else v
        return UMinusElt(t)

    def __rmul__(self, c):
        return self.scale(c)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, UMinusElt):
            return NotImplemented
        return (self - other).is_zero()

    def weights(self, datum):
        return {word_weight(datum, w) for w in self.terms}

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join("(%r)*f%s" % (c, "".join(str(i + 1) for i in w)) for w, c in sorted(self.terms.items()))


def f(*letters):
    return UMinusElt.word(letters)


class BosonAlgebra:
    """Boson operators on the negative half for a tilde parameter family."""

    def __init__(self, datum, fam, check=True):
        if not isinstance(fam, TildeThetaP):
            raise TypeError("BosonAlgebra needs a TildeThetaP")
        if check:
            v = check_ttp(fam, datum)
            if v is not None:
                raise DomainError(str(v))
        self.datum = datum
        self.fam = fam
        self.tt = fam.ttheta
        self.tp = fam.tp
        self._ep = {}
        self._es = {}
        self._form = {}

    # e_i' and e_i* on words

    def eprime_word(self, i, w):
        key = (i, w)
        hit = self._ep.get(key)
        if hit is not None:
            return hit
        out = {}
        if w:
            j, rest = w[0], w[1:]
            if i == j:
                out[rest] = LaurentPi.one()
            tij = self.tt[j][i]
            for u, c in self.eprime_word(i, rest).items():
                nw = (j,) + u
                v = tij * c
                out[nw] = out[nw] + v if nw in out else v
            out = {u: c for u, c in out.items() if c}
        self._ep[key] = out
        return out

    def ad_scalar(self, i, w):
        out = LaurentPi.one()
        for j in w:
            out = out * self.tt[i][j]
        return out

    def estar_word(self, i, w):
        """Left scan: e_i*(f_j w) = f_j e_i*(w) + delta_ij Ad(T_i K_i)(w)."""
        key = (i, w)
        hit = self._es.get(key)
        if hit is not None:
            return hit
        out = {}
        if w:
            j, rest = w[0], w[1:]
            for u, c in self.estar_word(i, rest).items():
                out[(j,) + u] = c
            if i == j:
                c = self.ad_scalar(i, rest)
                out[rest] = out[rest] + c if rest in out else c
            out = {u: c for u, c in out.items() if c}
        self._es[key] = out
        return out

    def estar_word_right(self, i, w):
        """Right scan: e_i*(w f_j) = ttheta_ij e_i*(w) f_j + delta_ij w."""
        out = {}
        if w:
            rest, j = w[:-1], w[-1]
            for u, c in self.estar_word_right(i, rest).items():
                out[u + (j,)] = c * self.tt[i][j]
            if i == j:
                out[rest] = out[rest] + LaurentPi.one() if rest in out else LaurentPi.one()
            out = {u: c for u, c in out.items() if c}
        return out

    def eprime(self, i, x):
        out = UMinusElt()
        for w, c in x.terms.items():
            out = out + UMinusElt(self.eprime_word(i, w)).scale(c)
        return out

    def estar(self, i, x):
        out = UMinusElt()
        for w, c in x.terms.items():
            out = out + UMinusElt(self.estar_word(i, w)).scale(c)
        return out

    # the form

    def form_words(self, u, w):
        """(f_u, f_w) with (1,1) = 1 and (P, f_i Q) = (e_i' P, Q)."""
        if len(u) != len(w):
            return LaurentPi.zero()
        key = (u, w)
        hit = self._form.get(key)
        if hit is not None:
            return hit
        if not w:
            val = LaurentPi.one()
        elif sorted(u) != sorted(w):
            val = LaurentPi.zero()
        else:
            val = LaurentPi.zero()
            for u2, c in self.eprime_word(w[0], u).items():
                val = val + c * self.form_words(u2, w[1:])
        self._form[key] = val
        return val

    def form(self, x, y):
        out = LaurentPi.zero()
        for u, c in x.terms.items():
            for w, d in y.terms.items():
                v = self.form_words(u, w)
                if v:
                    out = c * d * v + out
        return out

    def gram(self, m):
        words = words_of_weight(m)
        return words, [[self.form_words(u, w) for w in words] for u in words]

    def component_ranks(self, m, seed=0):
        words, G = self.gram(m)
        if not words:
            return {1: 0, -1: 0}
        return {s: checked_rank(G, s, seed=seed) for s in (1, -1)}

    def weight_dim(self, m, seed=0, expected=None):
        """Rank of the Gram matrix; both pi-components must agree."""
        ranks = self.component_ranks(m, seed)
        if ranks[1] != ranks[-1]:
            raise AssertionError("pi-components disagree at %r: %r" % (m, ranks))
        r = ranks[1]
        if expected is not None and r != expected:
            raise AssertionError("rank %d at %r but product formula gives %d" % (r, m, expected))
        return r

    # Serre elements

    def tqint(self, i, n):
        return qint(n, self.tp[i], LaurentPi.one())

    def tfact(self, i, n):
        return qfact(n, self.tp[i], LaurentPi.one())

    def serre_element(self, i, j, scaled=False):
        """sum_k (-tt_ji)^(-k) tp_i^(k(k-1)/2) f_i^{(n-k)} f_j f_i^{(k)}, n = 1 - a_ij.

        With scaled=True the element is multiplied by [n]~! so that all
        coefficients are Laurent polynomials.
        """
        if i == j:
            raise DomainError("Serre elements need i != j")
        n = 1 - self.datum.a[i][j]
        tp = self.tp[i]
        out = UMinusElt()
        for k in range(n + 1):
            c = (-self.tt[j][i]) ** (-k) * tp ** (k * (k - 1) // 2) * qbinom(n, k, tp, LaurentPi.one())
            out = out + UMinusElt.word((i,) * (n - k) + (j,) + (i,) * k, c)
        if scaled:
            return out
        inv = RatFuncPi.embed(self.tfact(i, n)).inverse()
        return UMinusElt({w: RatFuncPi.embed(c) * inv for w, c in out.terms.items()})

    def serre_in_radical(self, i, j):
        s = self.serre_element(i, j, scaled=True)
        if not RatFuncPi.embed(self.tfact(i, 1 - self.datum.a[i][j])).is_unit():
            raise AssertionError("divided-power denominator is not a unit")
        m = next(iter(s.weights(self.datum)))
        for w in words_of_weight(m):
            if self.form(s, f(*w)):
                return False
        return True

    # operator identities

    def apply_word_ops(self, ops, x):
        """Apply a list of ('p'|'s', i) operators right to left."""
        for kind, i in reversed(ops):
            x = self.eprime(i, x) if kind == "p" else self.estar(i, x)
        return x

    def eprime_power_check(self, i, j, n, words):
        """e_i'^n f_j = tt_ji^n f_j e_i'^n + delta_ij [n]_{1, tt_ii} e_i'^(n-1) on words."""
        coef = qint(n, LaurentPi.one(), self.tt[i][i])
        for w in words:
            x = f(*w)
            lhs = self.apply_word_ops([("p", i)] * n, f(j) * x)
            rhs = (f(j) * self.apply_word_ops([("p", i)] * n, x)).scale(self.tt[j][i] ** n)
            if i == j:
                rhs = rhs + self.apply_word_ops([("p", i)] * (n - 1), x).scale(coef)
            if not (lhs - rhs).is_zero():
                return False
        return True

    def boson_serre_coeffs(self, i, j):
        """Coefficients of the e'-Serre relation in tilde form.

        (-tt_ij p_i^a_ij)^k [n choose k]_{p_i, p_i^-1} rewritten with
        p_i^2 = tp_i as (-tt_ij)^k tp_i^(k a_ij + k(k-1)/2) [n choose k]_{tp_i, 1}.
        """
        a = self.datum.a[i][j]
        n = 1 - a
        tp = self.tp[i]
        return [(-self.tt[i][j]) ** k * tp ** (k * a + k * (k - 1) // 2) * qbinom(n, k, tp, LaurentPi.one())
                for k in range(n + 1)]

    def boson_relation_check(self, cutoff):
        """e'-Serre relations and e_i' e_j* = e_j* e_i' on all words up to cutoff."""
        datum = self.datum
        r = datum.rank
        all_words = [()]
        frontier = [()]
        for _ in range(cutoff):
            frontier = [w + (i,) for w in frontier for i in range(r)]
            all_words.extend(frontier)
        for i in range(r):
            for j in range(r):
                if i == j:
                    continue
                n = 1 - datum.a[i][j]
                coeffs = self.boson_serre_coeffs(i, j)
                for w in all_words:
                    if len(w) < n + 1:
                        continue
                    x = f(*w)
                    total = UMinusElt()
                    for k, c in enumerate(coeffs):
                        ops = [("p", i)] * (n - k) + [("p", j)] + [("p", i)] * k
                        total = total + self.apply_word_ops(ops, x).scale(c)
                    if not total.is_zero():
                        return False
        for i in range(r):
            for j in range(r):
                for w in all_words:
                    x = f(*w)
                    if self.eprime(i, self.estar(j, x)) != self.estar(j, self.eprime(i, x)):
                        return False
        return True


def product_formula(datum, cutoff, roots=None):
    """Coefficients of prod_alpha (1 - e^-alpha)^(-mult alpha) up to height cutoff."""
    if roots is None:
        roots = positive_roots(datum, cutoff)
    grid = sorted(_all_weights(datum.rank, cutoff), key=lambda m: (sum(m), m))
    series = {m: 0 for m in grid}
    series[grid[0]] = 1
    for beta, mult in roots.entries:
        for _ in range(mult):
            # multiply by 1/(1 - x^beta); ascending order reuses updated terms
            for m in grid:
                prev = tuple(x - y for x, y in zip(m, beta))
                if min(prev) >= 0:
                    series[m] += series[prev]
    return {m: v for m, v in series.items() if v}


def _all_weights(r, cutoff):
    from itertools import product
    return [m for m in product(range(cutoff + 1), repeat=r) if sum(m) <= cutoff]


def word_parity(datum, w):
    return parity_of(datum, word_weight(datum, w))


def random_words(datum, max_len, count, seed=0):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randrange(max_len + 1)
        out.append(tuple(rng.randrange(datum.rank) for _ in range(n)))
    return out
