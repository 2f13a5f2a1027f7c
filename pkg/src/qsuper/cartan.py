"""Cartan superdata, weights, Weyl groups and positive roots.

Weights are plain integer tuples in a chosen basis of the weight lattice
P.  Elements of the root lattice are usually passed as tuples of
multiplicities m with beta = sum m_i alpha_i.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .linalg import frac_rank_rational, rational_solve


class DatumError(ValueError):
    """A Cartan superdatum violates one of its axioms."""

    def __init__(self, axiom, detail=""):
        self.axiom = axiom
        self.detail = detail
        super().__init__("%s: %s" % (axiom, detail) if detail else axiom)


@dataclass(frozen=True)
class Violation:
    axiom: str
    detail: str

    def to_json(self):
        return {"axiom": self.axiom, "detail": self.detail}


@dataclass(frozen=True, eq=False)
class CartanSuperdatum:
    rank: int
    a: tuple
    d: tuple
    parity: tuple
    coweights: tuple
    simple_roots: tuple
    form_gram: tuple
    rho: tuple
    name: str = ""

    @property
    def dim(self):
        return len(self.rho)

    # pairing and form
    def pair(self, i, lam):
        return sum(h * x for h, x in zip(self.coweights[i], lam))

    def form(self, lam, mu):
        s = Fraction(0)
        for k, x in enumerate(lam):
            if x:
                row = self.form_gram[k]
                for l, y in enumerate(mu):
                    if y:
                        s += x * row[l] * y
        return s

    def alpha(self, i):
        return self.simple_roots[i]

    def root_weight(self, m):
        """Weight coordinates of sum_i m_i alpha_i."""
        out = [0] * self.dim
        for i, c in enumerate(m):
            if c:
                for k, v in enumerate(self.simple_roots[i]):
                    out[k] += c * v
        return tuple(out)

    def root_form(self, m, n):
        """(sum m_i alpha_i | sum n_j alpha_j) computed from d_i a_ij."""
        return sum(m[i] * n[j] * self.d[i] * self.a[i][j]
                   for i in range(self.rank) if m[i] for j in range(self.rank) if n[j])

    def pair_root(self, i, m):
        """<h_i, sum_j m_j alpha_j>."""
        return sum(self.a[i][j] * m[j] for j in range(self.rank))

    def root_coords(self, vec):
        """Multiplicities m with sum m_i alpha_i = vec; raises if vec is not in Q."""
        A = [[self.simple_roots[i][k] for i in range(self.rank)] for k in range(self.dim)]
        try:
            x = rational_solve(A, vec)
        except ValueError:
            raise DatumError("root lattice", "%r is not in the root lattice" % (vec,))
        if any(v.denominator != 1 for v in x) or tuple(self.root_weight([int(v) for v in x])) != tuple(vec):
            raise DatumError("root lattice", "%r is not in the root lattice" % (vec,))
        return tuple(int(v) for v in x)

    def add(self, lam, mu, k=1):
        return tuple(x + k * y for x, y in zip(lam, mu))

    def sub_root(self, lam, m):
        """lam - sum m_i alpha_i."""
        return self.add(lam, self.root_weight(m), -1)

    def fundamental(self, coeffs):
        """Weight with <h_i, lam> = coeffs[i] and zero null coordinates.

        Only meaningful when the basis contains the fundamental weights, as
        for the built-in constructor.
        """
        lam = [0] * self.dim
        for i, c in enumerate(coeffs):
            lam[i] = c
        lam = tuple(lam)
        if any(self.pair(i, lam) != coeffs[i] for i in range(self.rank)):
            raise DatumError("weight", "basis is not of fundamental weights")
        return lam

    def q_exp(self, i):
        return self.d[i]

    def to_json(self):
        return {
            "rank": self.rank,
            "a": [list(r) for r in self.a],
            "d": list(self.d),
            "parity": list(self.parity),
            "coweights": [list(r) for r in self.coweights],
            "simple_roots": [list(r) for r in self.simple_roots],
            "form_gram": [[_frac_out(x) for x in r] for r in self.form_gram],
            "rho": list(self.rho),
        }


def _frac_out(x):
    return int(x) if x.denominator == 1 else str(x)


def from_json(data):
    if isinstance(data, str):
        data = json.loads(data)
    if "preset" in data:
        return preset(data["preset"])
    need = ("rank", "a", "d", "parity")
    missing = [k for k in need if k not in data]
    if missing:
        raise DatumError("config", "missing keys %s" % missing)
    if "coweights" not in data:
        return build(data["a"], data["d"], data["parity"], name=data.get("name", ""))
    return CartanSuperdatum(
        rank=int(data["rank"]),
        a=tuple(tuple(int(x) for x in r) for r in data["a"]),
        d=tuple(int(x) for x in data["d"]),
        parity=tuple(int(x) for x in data["parity"]),
        coweights=tuple(tuple(int(x) for x in r) for r in data["coweights"]),
        simple_roots=tuple(tuple(int(x) for x in r) for r in data["simple_roots"]),
        form_gram=tuple(tuple(Fraction(x) for x in r) for r in data["form_gram"]),
        rho=tuple(int(x) for x in data["rho"]),
        name=data.get("name", ""),
    )


def build(a, d, parity, name=""):
    """Datum on the fundamental-weight basis, extended by null directions."""
    n = len(a)
    a = [list(map(int, r)) for r in a]
    corank = n - frac_rank_rational(a)
    dim = n + corank
    coweights = [[1 if k == i else 0 for k in range(dim)] for i in range(n)]
    roots = [[a[j][i] for j in range(n)] + [0] * corank for i in range(n)]
    used = set()
    for k in range(corank):
        base = frac_rank_rational(roots)
        for i in range(n):
            if i in used:
                continue
            roots[i][n + k] = 1
            if frac_rank_rational(roots) > base:
                used.add(i)
                break
            roots[i][n + k] = 0
    try:
        gram = _solve_form(roots, coweights, d, n, corank)
    except ValueError:
        # no invariant form exists; validate() names the failing axiom
        gram = [[Fraction(0)] * dim for _ in range(dim)]
    rho = [1] * n + [0] * corank
    return CartanSuperdatum(
        rank=n, a=tuple(map(tuple, a)), d=tuple(int(x) for x in d),
        parity=tuple(int(x) for x in parity),
        coweights=tuple(map(tuple, coweights)), simple_roots=tuple(map(tuple, roots)),
        form_gram=tuple(tuple(r) for r in gram), rho=tuple(rho), name=name)


def _solve_form(roots, coweights, d, n, corank):
    dim = n + corank
    idx = {}
    for k in range(dim):
        for l in range(k, dim):
            idx[(k, l)] = len(idx)
    rows, rhs = [], []
    for i in range(n):
        for l in range(dim):
            row = [0] * len(idx)
            for k in range(dim):
                if roots[i][k]:
                    row[idx[(min(k, l), max(k, l))]] += roots[i][k]
            rows.append(row)
            rhs.append(d[i] * coweights[i][l])
    for k in range(n, dim):
        for l in range(k, dim):
            row = [0] * len(idx)
            row[idx[(k, l)]] = 1
            rows.append(row)
            rhs.append(0)
    x = rational_solve(rows, rhs)
    return [[x[idx[(min(k, l), max(k, l))]] for l in range(dim)] for k in range(dim)]


PRESETS = {
    "A1": ([[2]], [1], [0]),
    "A1odd": ([[2]], [1], [1]),
    "A2": ([[2, -1], [-1, 2]], [1, 1], [0, 0]),
    "B2": ([[2, -1], [-2, 2]], [2, 1], [0, 0]),
    "B2odd": ([[2, -1], [-2, 2]], [2, 1], [0, 1]),
    "A1affine": ([[2, -2], [-2, 2]], [1, 1], [0, 0]),
}


def preset(name):
    if name not in PRESETS:
        raise DatumError("config", "unknown Cartan preset %r" % (name,))
    a, d, p = PRESETS[name]
    return build(a, d, p, name=name)


def validate(datum):
    """Return None when every axiom holds, else the first Violation."""
    n = datum.rank
    a, d, p = datum.a, datum.d, datum.parity
    if len(a) != n or any(len(r) != n for r in a) or len(d) != n or len(p) != n:
        return Violation("shape", "a, d, parity must have size rank")
    if len(datum.coweights) != n or len(datum.simple_roots) != n:
        return Violation("shape", "coweights and simple_roots need one row per index")
    dim = datum.dim
    if any(len(r) != dim for r in datum.coweights + datum.simple_roots) or \
            len(datum.form_gram) != dim or any(len(r) != dim for r in datum.form_gram):
        return Violation("shape", "lattice data must match the rank of P")
    for i in range(n):
        if a[i][i] != 2:
            return Violation("diagonal", "a_%d%d = %d, expected 2" % (i, i, a[i][i]))
    for i in range(n):
        for j in range(n):
            if i != j and a[i][j] > 0:
                return Violation("off-diagonal sign", "a_%d%d = %d > 0" % (i, j, a[i][j]))
            if i != j and (a[i][j] == 0) != (a[j][i] == 0):
                return Violation("zero pattern", "a_%d%d and a_%d%d" % (i, j, j, i))
    if any(x <= 0 for x in d):
        return Violation("symmetrizer", "d must be positive")
    for i in range(n):
        for j in range(n):
            if d[i] * a[i][j] != d[j] * a[j][i]:
                return Violation("symmetrizable", "d_%d a_%d%d != d_%d a_%d%d" % (i, i, j, j, j, i))
    if any(x not in (0, 1) for x in p):
        return Violation("parity values", "parity must be 0 or 1")
    for i in range(n):
        if p[i] == 1:
            for j in range(n):
                if a[i][j] % 2:
                    return Violation("superdatum parity", "i=%d is odd but a_%d%d = %d is odd" % (i, i, j, a[i][j]))
    for i in range(n):
        for j in range(n):
            if datum.pair(i, datum.simple_roots[j]) != a[i][j]:
                return Violation("pairing", "<h_%d, alpha_%d> != a_%d%d" % (i, j, i, j))
    g = datum.form_gram
    for k in range(dim):
        for l in range(dim):
            if g[k][l] != g[l][k]:
                return Violation("form symmetry", "form_gram is not symmetric")
    for i in range(n):
        for l in range(dim):
            e = tuple(1 if k == l else 0 for k in range(dim))
            if datum.form(datum.simple_roots[i], e) != d[i] * datum.pair(i, e):
                return Violation("form compatibility", "(alpha_%d | e_%d) != d_%d <h_%d, e_%d>" % (i, l, i, i, l))
    if frac_rank_rational(datum.simple_roots) != n:
        return Violation("linear independence", "simple roots are dependent")
    for i in range(n):
        if datum.pair(i, datum.rho) != 1:
            return Violation("rho", "<h_%d, rho> != 1" % i)
    return None


def check(datum):
    v = validate(datum)
    if v is not None:
        raise DatumError(v.axiom, v.detail)
    return datum


# ---------------------------------------------------------------------------
# Weyl group


def reflect(datum, i, lam):
    c = datum.pair(i, lam)
    return tuple(x - c * y for x, y in zip(lam, datum.simple_roots[i]))


def reflection_matrix(datum, i):
    dim = datum.dim
    h, al = datum.coweights[i], datum.simple_roots[i]
    return tuple(tuple((1 if r == c else 0) - al[r] * h[c] for c in range(dim)) for r in range(dim))


def _matmul(A, B):
    return tuple(tuple(sum(A[r][k] * B[k][c] for k in range(len(B))) for c in range(len(B[0])))
                 for r in range(len(A)))


def apply_matrix(M, lam):
    return tuple(sum(M[r][c] * lam[c] for c in range(len(lam))) for r in range(len(M)))


def weyl_group(datum, cutoff=None):
    """Elements up to the given length as (word, sign, matrix), shortest first.

    Elements are deduplicated by their action matrix.  With cutoff None
    the enumeration runs until closure, which only terminates in finite
    type.
    """
    dim = datum.dim
    ident = tuple(tuple(1 if r == c else 0 for c in range(dim)) for r in range(dim))
    gens = [reflection_matrix(datum, i) for i in range(datum.rank)]
    seen = {ident: ()}
    out = [((), 1, ident)]
    frontier = [((), ident)]
    length = 0
    while frontier and (cutoff is None or length < cutoff):
        length += 1
        nxt = []
        for word, M in frontier:
            for i, S in enumerate(gens):
                N = _matmul(M, S)
                if N not in seen:
                    w = word + (i,)
                    seen[N] = w
                    out.append((w, (-1) ** length, N))
                    nxt.append((w, N))
        frontier = nxt
    return out


def is_finite_type(datum):
    n = datum.rank
    sym = [[Fraction(datum.d[i] * datum.a[i][j]) for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        if _det([r[:k] for r in sym[:k]]) <= 0:
            return False
    return True


def _det(m):
    m = [list(r) for r in m]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return det


# ---------------------------------------------------------------------------
# roots


@dataclass(frozen=True)
class RootTable:
    entries: tuple
    cutoff: int

    def mult(self, m):
        for beta, k in self.entries:
            if beta == tuple(m):
                return k
        return 0

    def to_json(self):
        return {"cutoff": self.cutoff, "roots": [{"beta": list(b), "mult": k} for b, k in self.entries]}


def _reflect_root(datum, i, m):
    c = datum.pair_root(i, m)
    out = list(m)
    out[i] -= c
    return tuple(out)


def reflection_closure(datum, max_steps=10000):
    """Positive roots of a finite-type datum as the W-orbit of the simple roots."""
    n = datum.rank
    simple = [tuple(1 if k == i else 0 for k in range(n)) for i in range(n)]
    seen = set(simple)
    frontier = list(simple)
    steps = 0
    while frontier:
        steps += 1
        if steps > max_steps:
            raise DatumError("finite type", "reflection closure did not terminate")
        nxt = []
        for m in frontier:
            for i in range(n):
                r = _reflect_root(datum, i, m)
                if r not in seen:
                    seen.add(r)
                    nxt.append(r)
        frontier = nxt
    return sorted((m for m in seen if all(x >= 0 for x in m)), key=lambda m: (sum(m), m))


def _compositions(n, height):
    for m in product(range(height + 1), repeat=n):
        if sum(m) == height:
            yield m


def denominator_series(datum, cutoff):
    """Coefficients d_gamma of sum_w eps(w) e^(w rho - rho), gamma = rho - w rho.

    A Weyl element of length l contributes at height at least l, so the
    enumeration stops at length cutoff.
    """
    out = {}
    for word, sign, M in weyl_group(datum, cutoff):
        gamma = tuple(x - y for x, y in zip(datum.rho, apply_matrix(M, datum.rho)))
        m = datum.root_coords(gamma)
        if sum(m) <= cutoff:
            out[m] = out.get(m, 0) + sign
    return {m: v for m, v in out.items() if v}


def _log_coefficients(datum, cutoff):
    """c_beta with log(denominator) = -sum c_beta e^-beta, via theta D = D theta(log D)."""
    d = denominator_series(datum, cutoff)
    g = {}
    for h in range(1, cutoff + 1):
        for beta in _compositions(datum.rank, h):
            acc = Fraction(h * d.get(beta, 0))
            for b2, gv in g.items():
                b1 = tuple(x - y for x, y in zip(beta, b2))
                if min(b1) >= 0 and any(b1):
                    dv = d.get(b1)
                    if dv:
                        acc -= dv * gv * sum(b2)
            if acc:
                g[beta] = acc / h
    return {b: -v for b, v in g.items()}


def _mults_from_c(c, cutoff, rank):
    mult = {}
    for h in range(1, cutoff + 1):
        for beta in _compositions(rank, h):
            m = c.get(beta, Fraction(0))
            for k in range(2, h + 1):
                if all(x % k == 0 for x in beta):
                    m -= Fraction(mult.get(tuple(x // k for x in beta), 0), k)
            if m.denominator != 1 or m < 0:
                raise DatumError("roots", "non-integral multiplicity at %r" % (beta,))
            if m:
                mult[beta] = int(m)
    return mult


def peterson_multiplicities(datum, cutoff):
    """Root multiplicities up to height cutoff.

    With c_beta = sum_{k>=1} mult(beta/k)/k the Peterson recurrence reads
    (beta | beta - 2 rho) c_beta = sum_{beta'+beta''=beta} (beta'|beta'') c_beta' c_beta''.
    Where the left coefficient vanishes (exactly on the support of the Weyl
    denominator) c_beta is taken from the logarithm of the denominator
    identity; everywhere else the two routes must agree.
    """
    n = datum.rank
    logc = _log_coefficients(datum, cutoff)
    c = {}
    for h in range(1, cutoff + 1):
        for beta in _compositions(n, h):
            if h == 1:
                c[beta] = Fraction(1)
                continue
            coef = datum.root_form(beta, beta) - 2 * sum(beta[i] * datum.d[i] for i in range(n))
            rhs = Fraction(0)
            for b1, c1 in c.items():
                if sum(b1) >= h:
                    continue
                b2 = tuple(x - y for x, y in zip(beta, b1))
                if min(b2) < 0:
                    continue
                c2 = c.get(b2)
                if c2:
                    rhs += datum.root_form(b1, b2) * c1 * c2
            if coef == 0:
                val = logc.get(beta, Fraction(0))
            else:
                val = rhs / coef
                if val != logc.get(beta, Fraction(0)):
                    raise AssertionError("recurrence and denominator disagree at %r" % (beta,))
            if val:
                c[beta] = val
    return _mults_from_c(c, cutoff, n)


def positive_roots(datum, cutoff=None):
    """RootTable of positive roots with multiplicities.

    Finite type with cutoff None gives the complete list.  The recurrence
    is always run; in finite type it must reproduce the reflection closure.
    """
    finite = is_finite_type(datum)
    if cutoff is None:
        if not finite:
            raise DatumError("cutoff", "a height cutoff is required outside finite type")
        closure = reflection_closure(datum)
        cutoff = max(sum(m) for m in closure)
    mult = peterson_multiplicities(datum, cutoff)
    entries = tuple(sorted(((b, k) for b, k in mult.items()), key=lambda t: (sum(t[0]), t[0])))
    if finite:
        closure = [m for m in reflection_closure(datum) if sum(m) <= cutoff]
        if [b for b, _ in entries] != closure or any(k != 1 for _, k in entries):
            raise AssertionError("recurrence disagrees with reflection closure")
    return RootTable(entries=entries, cutoff=cutoff)


def parity_of(datum, m):
    return sum(x * p for x, p in zip(m, datum.parity)) % 2


def is_Pev(datum, lam):
    return all(datum.pair(i, lam) % 2 == 0 for i in range(datum.rank) if datum.parity[i])


def is_C6(datum):
    return all((datum.d[i] % 2 == 1) == (datum.parity[i] == 1) for i in range(datum.rank))


def height(m):
    return sum(m)


def word_weight(datum, word):
    m = [0] * datum.rank
    for i in word:
        m[i] += 1
    return tuple(m)


def words_of_weight(m):
    """All words with letter counts m, in lexicographic order."""
    m = list(m)
    total = sum(m)
    out = []

    def rec(prefix):
        if len(prefix) == total:
            out.append(tuple(prefix))
            return
        for i, c in enumerate(m):
            if c:
                m[i] -= 1
                prefix.append(i)
                rec(prefix)
                prefix.pop()
                m[i] += 1

    rec([])
    return out


def weights_up_to(rank, cutoff):
    """All nonzero m in Q+ with height at most cutoff, by height."""
    out = []
    for h in range(1, cutoff + 1):
        out.extend(_compositions(rank, h))
    return out
