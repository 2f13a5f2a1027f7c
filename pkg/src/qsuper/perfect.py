"""Perfect and strong perfect bases on explicit weight-graded modules.

Everything runs over the split coefficient ring Q(q)^pi = Q(q) x Q(q):
vectors and matrices are stored per component and combined back into
RatFuncPi scalars where a single coefficient is needed.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .coeffs import (PI_COMPONENTS, DomainError, RatFuncPi, component_field, gauss_pi,
                     laurent_from_json)
from .highest import _gauss_fact, mat_mul, scalar
from .linalg import field_pivots, field_solve

NEG_INF = float("-inf")


def _sub(m, i, k=1):
    return tuple(x - (k if t == i else 0) for t, x in enumerate(m))


@dataclass
class Vector:
    weight: tuple
    comps: dict  # value -> list of field elements

    def is_zero(self):
        return all(x == 0 for c in self.comps.values() for x in c)

    def scale(self, s):
        """Multiply by a RatFuncPi, Laurent or field scalar."""
        return Vector(self.weight, {v: [scalar(s, v, False) * x for x in c] for v, c in self.comps.items()})

    def __add__(self, other):
        if other.weight != self.weight:
            raise ValueError("adding vectors of different weights")
        return Vector(self.weight, {v: [a + b for a, b in zip(c, other.comps[v])] for v, c in self.comps.items()})

    def __sub__(self, other):
        return self + other.scale(-1)


@dataclass
class BasedModule:
    """Weight blocks m (weight top - m) with e_i: m -> m - e_i and a basis B.

    e[(i, m)] is a dict value -> matrix (rows index the target block).
    basis is a list of Vectors; its members at each weight must form a basis.
    """

    datum: object
    dims: dict
    e: dict
    basis: list
    labels: list = dc_field(default_factory=list)

    @property
    def values(self):
        return PI_COMPONENTS

    def dim(self, m):
        if min(m) < 0:
            return 0
        return self.dims.get(m, 0)

    def apply_e(self, i, vec):
        t = _sub(vec.weight, i)
        n = self.dim(t)
        K = {v: component_field(v) for v in self.values}
        if n == 0 or (i, vec.weight) not in self.e:
            return Vector(t, {v: [K[v](0)] * n for v in self.values})
        out = {}
        for v in self.values:
            M = self.e[(i, vec.weight)][v]
            col = [[x] for x in vec.comps[v]]
            out[v] = [r[0] for r in mat_mul(M, col, K[v], len(col), 1)]
        return Vector(t, out)

    def apply_e_power(self, i, vec, n):
        for _ in range(n):
            vec = self.apply_e(i, vec)
        return vec

    def at(self, m):
        return [k for k, b in enumerate(self.basis) if b.weight == m]

    def coordinates(self, vec):
        """Coefficients of vec over the basis members of its weight, per component."""
        idx = self.at(vec.weight)
        out = {}
        for v in self.values:
            if not idx:
                out[v] = []
                continue
            A = [[self.basis[k].comps[v][r] for k in idx] for r in range(len(vec.comps[v]))]
            b = [[x] for x in vec.comps[v]]
            out[v] = [r[0] for r in field_solve(A, b)]
        return idx, out

    def label(self, k):
        return self.labels[k] if k < len(self.labels) else "b%d" % k


def epsilon(bm, vec, i, bound=None):
    """Smallest n with e_i^(n+1) vec = 0; -inf for the zero vector."""
    if vec.is_zero():
        return NEG_INF
    bound = bound if bound is not None else sum(bm.dims.values()) + 1
    n = 0
    cur = bm.apply_e(i, vec)
    while not cur.is_zero():
        n += 1
        if n > bound:
            raise DomainError("e_%d is not nilpotent within the bound" % i)
        cur = bm.apply_e(i, cur)
    return n


def _check_basis(bm):
    weights = {b.weight for b in bm.basis}
    for m, d in bm.dims.items():
        if d and m not in weights:
            raise DomainError("no basis vectors at weight %r" % (m,))
    for m in weights:
        idx = bm.at(m)
        if len(idx) != bm.dim(m):
            raise DomainError("wrong number of basis vectors at %r" % (m,))
        for v in bm.values:
            A = [[bm.basis[k].comps[v][r] for k in idx] for r in range(bm.dim(m))]
            if len(field_pivots(A)[0]) != len(idx):
                raise DomainError("basis vectors at %r are dependent" % (m,))


def _ratio(w, u):
    """c with w = c u, c invertible in every component; None if there is none."""
    parts = []
    for v in PI_COMPONENTS:
        a, b = w.comps[v], u.comps[v]
        K = component_field(v)
        c = None
        for x, y in zip(a, b):
            if y != 0:
                c = x / y
                break
        if c is None:
            if any(x != 0 for x in a):
                return None
            c = K(1)
        if c == 0 or any(x != c * y for x, y in zip(a, b)):
            return None
        parts.append(c)
    return RatFuncPi(parts)


@dataclass
class PerfectReport:
    eps: dict = dc_field(default_factory=dict)          # (k, i) -> epsilon
    etilde: dict = dc_field(default_factory=dict)       # (k, i) -> index or None
    coeff: dict = dc_field(default_factory=dict)        # (k, i) -> RatFuncPi
    failures: list = dc_field(default_factory=list)
    certificates: dict = dc_field(default_factory=dict)  # (k, i) -> (sign, eps, m)
    strong: bool = None

    @property
    def perfect(self):
        return not self.failures

    def to_json(self, bm=None):
        lab = bm.label if bm is not None else (lambda k: "b%d" % k)
        rows = []
        for (k, i), e in sorted(self.eps.items()):
            row = {"basis": lab(k), "i": i + 1, "epsilon": e if e != NEG_INF else None}
            t = self.etilde.get((k, i))
            if t is not None:
                row["etilde"] = lab(t)
                row["c"] = self.coeff[(k, i)].to_json()
            cert = self.certificates.get((k, i))
            if cert is not None:
                row["certificate"] = {"sign": cert[0], "pi": cert[1], "q": cert[2]}
            rows.append(row)
        failures = [dict(f, i=f["i"] + 1) for f in self.failures]
        return {"perfect": self.perfect, "strong": self.strong, "entries": rows, "failures": failures}


def check_perfect(bm):
    _check_basis(bm)
    rep = PerfectReport()
    r = bm.datum.rank
    for k, b in enumerate(bm.basis):
        for i in range(r):
            rep.eps[(k, i)] = epsilon(bm, b, i)
    for k, b in enumerate(bm.basis):
        for i in range(r):
            e = rep.eps[(k, i)]
            if e <= 0:
                continue
            w = bm.apply_e_power(i, b, e)
            hits = []
            for k2 in bm.at(_sub(b.weight, i)):
                u = bm.apply_e_power(i, bm.basis[k2], e - 1)
                c = _ratio(w, u)
                if c is not None:
                    hits.append((k2, c))
            if len(hits) != 1:
                rep.failures.append({"clause": "b", "basis": bm.label(k), "i": i, "candidates": len(hits)})
                rep.etilde[(k, i)] = None
                continue
            rep.etilde[(k, i)], rep.coeff[(k, i)] = hits[0]
    seen = {}
    for (k, i), t in sorted(rep.etilde.items()):
        if t is None:
            continue
        key = (i, t, rep.eps[(k, i)])
        if key in seen:
            rep.failures.append({"clause": "c", "basis": [bm.label(seen[key]), bm.label(k)], "i": i})
        else:
            seen[key] = k
    return rep


def unit_certificate(c, n, i, datum):
    """(sign, eps, m) with c = sign pi^eps q^m [n]^pi_i, or None."""
    try:
        ratio = (RatFuncPi.embed(c) / RatFuncPi.embed(gauss_pi(n, i, datum))).to_laurent()
    except DomainError:
        return None
    if not ratio.is_monomial_unit():
        return None
    (m, s), = ratio.terms.items()
    sign, k = s.unit_exponent()
    return sign, k % 2, m


def check_strong(bm, rep=None, allow_sign=True):
    rep = rep or check_perfect(bm)
    if not rep.perfect:
        rep.strong = False
        return rep
    ok = True
    for (k, i), c in rep.coeff.items():
        cert = unit_certificate(c, rep.eps[(k, i)], i, bm.datum)
        if cert is None or (cert[0] < 0 and not allow_sign):
            ok = False
            rep.failures.append({"clause": "strong", "basis": bm.label(k), "i": i})
            continue
        rep.certificates[(k, i)] = cert
    rep.strong = ok
    if not ok:
        # strongness failures are not perfectness failures
        rep.failures = [f for f in rep.failures if f["clause"] != "strong"]
        rep.strong_failures = [(bm.label(k), i) for (k, i), c in rep.coeff.items()
                               if (k, i) not in rep.certificates]
    return rep


# ---------------------------------------------------------------------------
# the preorder and e_top


def compare(bm, seq, v, w):
    """'<', '=' or '>' for v against w under the preorder of seq."""
    i = seq[0]
    a, b = epsilon(bm, v, i), epsilon(bm, w, i)
    if a != b or len(seq) == 1:
        return "<" if a < b else (">" if a > b else "=")
    return compare(bm, seq[1:], bm.apply_e_power(i, v, a), bm.apply_e_power(i, w, b))


def e_top(bm, seq, v):
    """Apply e_i^{eps_i} (divided power) for each index of seq, first index first."""
    for i in seq:
        n = epsilon(bm, v, i)
        if n == NEG_INF:
            return v
        v = bm.apply_e_power(i, v, n).scale(RatFuncPi.embed(_gauss_fact(n, i, bm.datum)).inverse())
    return v


def highest_space_basis_check(bm):
    """B^H spans the joint kernel of all e_i (rank comparison per weight)."""
    r = bm.datum.rank
    bh = [k for k, b in enumerate(bm.basis) if all(bm.apply_e(i, b).is_zero() for i in range(r))]
    for m in {b.weight for b in bm.basis}:
        n = bm.dim(m)
        for v in bm.values:
            rows = []
            for i in range(r):
                t = _sub(m, i)
                if bm.dim(t) and (i, m) in bm.e:
                    rows.extend(bm.e[(i, m)][v])
            rank = len(field_pivots(rows)[0]) if rows else 0
            kernel = n - rank
            if kernel != len([k for k in bh if bm.basis[k].weight == m]):
                return False
    return True


def string_sequence(bm, members):
    """An index sequence sending every member into the highest-weight space under e_top."""
    r = bm.datum.rank
    seq = []
    cur = [bm.basis[k] for k in members]
    for _ in range(10 * (sum(bm.dims.values()) + 1)):
        pick = None
        for vec in cur:
            for i in range(r):
                if not bm.apply_e(i, vec).is_zero():
                    pick = i
                    break
            if pick is not None:
                break
        if pick is None:
            return seq
        seq.append(pick)
        cur = [e_top(bm, [pick], vec) for vec in cur]
    raise AssertionError("no terminating index sequence")


def totally_ordered(bm, seq, members):
    for a in members:
        for b in members:
            if a != b and compare(bm, seq, bm.basis[a], bm.basis[b]) == "=":
                return False
    return True


@dataclass
class RecognitionResult:
    ok: bool
    witness: object = None

    def __bool__(self):
        return self.ok

    def to_json(self):
        return {"ok": self.ok, "witness": self.witness}


def _in_apiz(x):
    try:
        RatFuncPi.embed(x).to_laurent()
        return True
    except DomainError:
        return False


def _unit_apiz(x):
    try:
        return RatFuncPi.embed(x).to_laurent().is_monomial_unit()
    except DomainError:
        return False


def recognition_check(bm, top_index, lattice):
    """Expansion coefficients of each lattice generator over B lie in A^pi.

    The coefficients are peeled off in decreasing preorder along an index
    sequence that sends the support to the top vector, and cross-checked
    against direct linear solves.
    """
    rep = check_strong(bm)
    if not rep.perfect or not rep.strong:
        return RecognitionResult(False, {"reason": "basis is not strong perfect"})
    r = bm.datum.rank
    top = bm.basis[top_index]
    heads = [k for k, b in enumerate(bm.basis) if all(bm.apply_e(i, b).is_zero() for i in range(r))]
    if heads != [top_index]:
        return RecognitionResult(False, {"reason": "highest-weight part of B is not the top vector",
                                         "heads": [bm.label(k) for k in heads]})
    for g, u in enumerate(lattice):
        idx, coords = bm.coordinates(u)
        direct = {k: RatFuncPi([coords[v][t] for v in PI_COMPONENTS]) for t, k in enumerate(idx)}
        support = [k for k, c in direct.items() if c]
        if not support:
            continue
        seq = string_sequence(bm, support)
        for k in support:
            img = e_top(bm, seq, bm.basis[k])
            ratio = _ratio(img, top) if img.weight == top.weight else None
            if ratio is None or not _unit_apiz(ratio):
                return RecognitionResult(False, {"reason": "e_top leaves the unit multiples of the top vector",
                                                 "generator": g, "basis": bm.label(k)})
        if not totally_ordered(bm, seq, support):
            return RecognitionResult(False, {"reason": "support is not totally ordered", "generator": g})
        order = sorted(support, key=_cmp_key(bm, seq))
        rest = u
        for k in reversed(order):
            b = bm.basis[k]
            vec, imgb = rest, b
            for i in seq:
                n = epsilon(bm, imgb, i)
                fact = RatFuncPi.embed(_gauss_fact(n, i, bm.datum)).inverse()
                vec = bm.apply_e_power(i, vec, n).scale(fact)
                imgb = bm.apply_e_power(i, imgb, n).scale(fact)
            a = _ratio(imgb, top)
            s = _partial_ratio(vec, top)
            if not (vec - top.scale(s)).is_zero():
                raise AssertionError("e-string of the remainder is not a multiple of the top vector")
            c = s / a
            if c != direct[k]:
                raise AssertionError("peeled coefficient disagrees with the direct solve")
            if not _in_apiz(c):
                return RecognitionResult(False, {"reason": "coefficient outside A^pi", "generator": g,
                                                 "basis": bm.label(k), "coefficient": c.to_json()})
            rest = rest - b.scale(c)
    return RecognitionResult(True)


def _partial_ratio(w, u):
    parts = []
    for v in PI_COMPONENTS:
        c = None
        for x, y in zip(w.comps[v], u.comps[v]):
            if y != 0:
                c = x / y
                break
        parts.append(c if c is not None else component_field(v)(0))
    return RatFuncPi(parts)


def _cmp_key(bm, seq):
    from functools import cmp_to_key

    def cmp(a, b):
        c = compare(bm, seq, bm.basis[a], bm.basis[b])
        return -1 if c == "<" else (1 if c == ">" else 0)
    return cmp_to_key(cmp)


# ---------------------------------------------------------------------------
# constructors


def from_hw(hw, basis=None, labels=None):
    """BasedModule over the e_i blocks of a pi-ring module; default basis: pivot words."""
    if hw.sqrt:
        raise DomainError("based modules live over Q(q)^pi")
    dims = {m: len(b) for m, b in hw.basis.items() if b}
    e = {key: blk for key, blk in hw.E.items()}
    if basis is None:
        basis = []
        labels = []
        for m in sorted(dims, key=lambda x: (sum(x), x)):
            for k in range(dims[m]):
                comps = {v: [component_field(v)(1 if t == k else 0) for t in range(dims[m])] for v in PI_COMPONENTS}
                basis.append(Vector(m, comps))
                labels.append("f" + "".join(str(i + 1) for i in hw.basis[m][k]) + "v")
    return BasedModule(datum=hw.datum, dims=dims, e=e, basis=basis, labels=labels or [])


def hw_vector(hw, ops, scale=None):
    """The vector f_{ops} v of hw (ops applied right to left) as a Vector."""
    top = (0,) * hw.datum.rank
    comps = {}
    t = top
    for v in PI_COMPONENTS:
        t, M = hw.word_op([("F", i) for i in ops], top, v)
        comps[v] = [row[0] for row in M]
    vec = Vector(t, comps)
    return vec.scale(scale) if scale is not None else vec


def divided_power_basis(hw, i=0, dual=False):
    """Rank-one bases {f^(k) v} or their form duals f^(k) v / (f^(k) v, f^(k) v)."""
    from .highest import VermaContext
    datum = hw.datum
    n = datum.pair(i, hw.lam)
    ctx = VermaContext(datum, hw.fam, hw.lam) if dual else None
    basis, labels = [], []
    for k in range(n + 1):
        fk = RatFuncPi.embed(_gauss_fact(k, i, datum)).inverse()
        vec = hw_vector(hw, (i,) * k, fk)
        if dual:
            norm = RatFuncPi.embed(ctx.form_words((i,) * k, (i,) * k)) * fk * fk
            vec = vec.scale(norm.inverse())
            labels.append("f^(%d)v*" % k)
        else:
            labels.append("f^(%d)v" % k)
        basis.append(vec)
    return basis, labels


def based_module_from_json(data, datum):
    """Input format: dims, e blocks, basis vectors with Laurent or split entries."""
    def entry(x, v):
        if isinstance(x, dict) and "plus" in x:
            return RatFuncPi.from_json(x).parts[PI_COMPONENTS.index(v)]
        return scalar(laurent_from_json(x) if isinstance(x, list) else int(x), v, False)

    dims = {tuple(d["weight"]): d["dim"] for d in data["dims"]}
    e = {}
    for blk in data["e"]:
        key = (blk["i"] - 1, tuple(blk["from"]))
        e[key] = {v: [[entry(x, v) for x in row] for row in blk["matrix"]] for v in PI_COMPONENTS}
    basis, labels = [], []
    for b in data["basis"]:
        basis.append(Vector(tuple(b["weight"]), {v: [entry(x, v) for x in b["coords"]] for v in PI_COMPONENTS}))
        labels.append(b.get("label", "b%d" % len(labels)))
    return BasedModule(datum=datum, dims=dims, e=e, basis=basis, labels=labels)
