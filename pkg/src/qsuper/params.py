"""Parameter families (theta, p) and (tilde theta, tilde p)."""
from __future__ import annotations

from dataclasses import dataclass

from .coeffs import DomainError, LaurentPi, LaurentSqrtPi, laurent_from_json


@dataclass(frozen=True)
class ParamViolation:
    identity: str
    i: int
    j: int

    def to_json(self):
        return {"identity": self.identity, "i": self.i, "j": self.j}

    def __str__(self):
        return "%s fails at (%d, %d)" % (self.identity, self.i, self.j)


@dataclass(frozen=True, eq=False)
class ThetaP:
    """theta[i][j], p[i][j] (including p_ii) and p_diag[i] = p_i."""

    theta: tuple
    p: tuple
    p_diag: tuple
    name: str = ""

    @property
    def rank(self):
        return len(self.p_diag)

    def to_json(self):
        return {
            "theta": [[x.to_json() for x in r] for r in self.theta],
            "p": [[x.to_json() for x in r] for r in self.p],
            "p_diag": [x.to_json() for x in self.p_diag],
        }


@dataclass(frozen=True, eq=False)
class TildeThetaP:
    """ttheta[i][j] and tp[i]."""

    ttheta: tuple
    tp: tuple
    name: str = ""

    @property
    def rank(self):
        return len(self.tp)

    def to_json(self):
        return {
            "ttheta": [[x.to_json() for x in r] for r in self.ttheta],
            "tp": [x.to_json() for x in self.tp],
        }


def _units(entries):
    for x in entries:
        if not x.is_monomial_unit():
            return False
    return True


def check_pt(fam, datum):
    """First violation of the (theta, p) conditions, or None."""
    n = datum.rank
    a = datum.a
    for i in range(n):
        for j in range(n):
            if not _units([fam.theta[i][j], fam.p[i][j]]):
                return ParamViolation("invertibility", i, j)
        if not _units([fam.p_diag[i]]):
            return ParamViolation("invertibility", i, i)
    for i in range(n):
        pi_ = fam.p_diag[i]
        for j in range(n):
            pij = fam.p[i][j]
            if pij * pij != pi_ ** (2 * a[i][j]):
                return ParamViolation("p_ij^2 = p_i^(2 a_ij)", i, j)
            if pij * fam.p[j][i] != pi_ ** (2 * a[i][j]) * fam.theta[i][j] * fam.theta[j][i]:
                return ParamViolation("p_ij p_ji / (theta_ij theta_ji) = p_i^(2 a_ij)", i, j)
        if fam.p[i][i] != pi_ * pi_ * fam.theta[i][i]:
            return ParamViolation("p_ii / theta_ii = p_i^2", i, i)
    return None


def check_ttp(fam, datum):
    """First violation of the tilde conditions, or None."""
    n = datum.rank
    for i in range(n):
        for j in range(n):
            if not _units([fam.ttheta[i][j]]):
                return ParamViolation("invertibility", i, j)
        if not _units([fam.tp[i]]):
            return ParamViolation("invertibility", i, i)
    for i in range(n):
        for j in range(n):
            if fam.ttheta[i][j] * fam.ttheta[j][i] != fam.tp[i] ** (-datum.a[i][j]):
                return ParamViolation("ttheta_ij ttheta_ji = tp_i^(-a_ij)", i, j)
        if fam.ttheta[i][i] != fam.tp[i] ** -1:
            return ParamViolation("ttheta_ii = tp_i^(-1)", i, i)
    return None


def require(fam, datum):
    v = check_pt(fam, datum) if isinstance(fam, ThetaP) else check_ttp(fam, datum)
    if v is not None:
        raise DomainError(str(v))
    return fam


def derive_tilde(fam):
    n = fam.rank
    tt = tuple(tuple(_simplify(fam.theta[i][j] * fam.p[j][i].inverse()) for j in range(n)) for i in range(n))
    tp = tuple(_simplify(x * x) for x in fam.p_diag)
    return TildeThetaP(ttheta=tt, tp=tp, name=(fam.name + "~") if fam.name else "")


def from_tilde(tfam, p_diag, datum):
    """(theta, p) with p_ij = p_i^a_ij and theta_ij = ttheta_ij p_j^a_ji."""
    n = datum.rank
    if any(_simplify(x * x) != y for x, y in zip(p_diag, tfam.tp)):
        raise DomainError("p_i^2 must equal tp_i")
    p = tuple(tuple(p_diag[i] ** datum.a[i][j] for j in range(n)) for i in range(n))
    th = tuple(tuple(_simplify(tfam.ttheta[i][j] * p_diag[j] ** datum.a[j][i]) for j in range(n))
               for i in range(n))
    return ThetaP(theta=th, p=p, p_diag=tuple(p_diag))


def _simplify(x):
    """Drop to LaurentPi when no odd power of sqrt(pi) is present."""
    if isinstance(x, LaurentSqrtPi):
        try:
            return x.to_pi()
        except DomainError:
            return x
    return x


def gauge_invariants(fam):
    """The three invariants (p_ij^2, p_ij p_ji/(theta_ij theta_ji), p_ii/theta_ii)."""
    if isinstance(fam, TildeThetaP):
        n = fam.rank
        return (tuple(fam.tp),
                tuple(tuple(fam.ttheta[i][j] * fam.ttheta[j][i] for j in range(n)) for i in range(n)),
                tuple(fam.ttheta[i][i] for i in range(n)))
    n = fam.rank
    sq = tuple(tuple(_simplify(fam.p[i][j] ** 2) for j in range(n)) for i in range(n))
    mixed = tuple(tuple(_simplify(fam.p[i][j] * fam.p[j][i] * (fam.theta[i][j] * fam.theta[j][i]).inverse())
                        for j in range(n)) for i in range(n))
    diag = tuple(_simplify(fam.p[i][i] * fam.theta[i][i].inverse()) for i in range(n))
    return sq, mixed, diag


def same_gauge_class(f1, f2):
    if type(f1) is not type(f2):
        raise DomainError("families must have the same type")
    return _eq_nested(gauge_invariants(f1), gauge_invariants(f2))


def _eq_nested(a, b):
    if isinstance(a, tuple):
        return len(a) == len(b) and all(_eq_nested(x, y) for x, y in zip(a, b))
    return a == b


# ---------------------------------------------------------------------------
# presets


def default_sqrt_roots(datum):
    """sqrt(pi_i) = s for odd i and 1 for even i."""
    return tuple(LaurentSqrtPi.sqrt_pi() if datum.parity[i] else LaurentSqrtPi.one()
                 for i in range(datum.rank))


def _qi(datum, i, k=1):
    return LaurentPi.q(datum.d[i] * k)


def _pii(datum, i):
    return LaurentPi.pi() if datum.parity[i] else LaurentPi.one()


def preset(name, datum, sqrt_roots=None):
    n = datum.rank
    a = datum.a
    roots = sqrt_roots or default_sqrt_roots(datum)
    for i, r in enumerate(roots):
        if r * r != _pii(datum, i):
            raise DomainError("sqrt root for index %d does not square to pi_i" % i)
    if name == "Uqsg":
        tt = tuple(tuple(_simplify(LaurentPi.pi() ** (datum.parity[i] * datum.parity[j]) * _qi(datum, i, -a[i][j]))
                         for j in range(n)) for i in range(n))
        tp = tuple(_qi(datum, i, 2) * _pii(datum, i) for i in range(n))
        return TildeThetaP(ttheta=tt, tp=tp, name="Uqsg")
    if name == "BKM":
        p_diag = tuple(_simplify(roots[i] * _qi(datum, i)) for i in range(n))
        p = tuple(tuple(_qi(datum, i, a[i][j]) for j in range(n)) for i in range(n))
        theta = tuple(tuple(_pii(datum, i) if i == j else LaurentPi.one() for j in range(n)) for i in range(n))
        return ThetaP(theta=theta, p=p, p_diag=p_diag, name="BKM")
    if name == "boldU":
        p_diag = tuple(_simplify(roots[i] * _qi(datum, i)) for i in range(n))
        p = tuple(tuple(_simplify(p_diag[i] ** a[i][j]) for j in range(n)) for i in range(n))
        theta = tuple(tuple(LaurentPi.one() if i == j else _simplify(roots[j] ** a[j][i])
                            for j in range(n)) for i in range(n))
        return ThetaP(theta=theta, p=p, p_diag=p_diag, name="boldU")
    raise DomainError("unknown parameter preset %r" % (name,))


def from_json(data, datum):
    if "preset" in data:
        return preset(data["preset"], datum)
    if "ttheta" in data:
        return TildeThetaP(
            ttheta=tuple(tuple(laurent_from_json(x) for x in r) for r in data["ttheta"]),
            tp=tuple(laurent_from_json(x) for x in data["tp"]))
    return ThetaP(
        theta=tuple(tuple(laurent_from_json(x) for x in r) for r in data["theta"]),
        p=tuple(tuple(laurent_from_json(x) for x in r) for r in data["p"]),
        p_diag=tuple(laurent_from_json(x) for x in data["p_diag"]))


# ---------------------------------------------------------------------------
# weight functions


class ChiFunction:
    """chi_i on lam0 + Q, fixed by chi_i(lam0) and chi_i(lam + alpha_j) = p_ij chi_i(lam)."""

    def __init__(self, datum, lam0, base, shift):
        self.datum = datum
        self.lam0 = tuple(lam0)
        self.base = tuple(base)
        self.shift = shift

    def __call__(self, i, lam):
        diff = tuple(x - y for x, y in zip(lam, self.lam0))
        m = self.datum.root_coords(diff)
        out = self.base[i]
        for j, k in enumerate(m):
            if k:
                out = out * self.shift[i][j] ** k
        return _simplify(out)


def chi_build(datum, fam, lam0):
    n = datum.rank
    if isinstance(fam, TildeThetaP):
        base = [fam.tp[i] ** datum.pair(i, lam0) for i in range(n)]
        shift = [[fam.tp[i] ** datum.a[i][j] for j in range(n)] for i in range(n)]
    else:
        base = [fam.p_diag[i] ** datum.pair(i, lam0) for i in range(n)]
        shift = [[fam.p[i][j] for j in range(n)] for i in range(n)]
    return ChiFunction(datum, lam0, base, shift)


def chi_conditions_hold(datum, fam, chi, lam):
    """Both weight-function clauses at lam."""
    for i in range(datum.rank):
        v = chi(i, lam)
        if isinstance(fam, ThetaP):
            if v * v != fam.p_diag[i] ** (2 * datum.pair(i, lam)):
                return False
        for j in range(datum.rank):
            step = chi.shift[i][j]
            if chi(i, datum.add(lam, datum.alpha(j))) != v * step:
                return False
    return True
