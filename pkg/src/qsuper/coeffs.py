"""Exact coefficient rings.

Scalars live in the group rings Z[pi]/(pi^2 - 1) and Z[s]/(s^4 - 1) with
s a square root of pi.  Laurent polynomials in q over either scalar ring
give A^pi and its square-root extension.  Fractions are handled through
the idempotent split: an element of Q(q)^pi is the pair of its images
under pi -> +1 and pi -> -1, and an element of the square-root extension
is the 4-tuple of its images under s -> 1, -1, i, -i.
"""
from __future__ import annotations

from functools import lru_cache
from numbers import Integral

import sympy
from sympy import ZZ
from sympy.polys.domains import ZZ_I
from sympy.polys.fields import field
from sympy.polys.rings import ring


class DomainError(ValueError):
    """Raised when an operation is called outside its domain."""


# ---------------------------------------------------------------------------
# group-ring scalars


class _CyclicScalar:
    """Element of Z[C_n], stored as n integer coordinates on g^0..g^(n-1)."""

    __slots__ = ("coords",)
    ORDER = 1

    def __init__(self, *coords):
        if len(coords) == 1 and not isinstance(coords[0], Integral):
            coords = tuple(coords[0])
        if len(coords) < self.ORDER:
            coords = tuple(coords) + (0,) * (self.ORDER - len(coords))
        if len(coords) != self.ORDER:
            raise ValueError("expected %d coordinates" % self.ORDER)
        self.coords = tuple(int(c) for c in coords)

    @classmethod
    def gen_power(cls, k):
        c = [0] * cls.ORDER
        c[k % cls.ORDER] = 1
        return cls(c)

    def _coerce(self, other):
        if isinstance(other, type(self)):
            return other
        if isinstance(other, Integral):
            return type(self)(int(other))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return type(self)([a + b for a, b in zip(self.coords, o.coords)])

    __radd__ = __add__

    def __neg__(self):
        return type(self)([-a for a in self.coords])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = self.ORDER
        out = [0] * n
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(o.coords):
                    if b:
                        out[(i + j) % n] += a * b
        return type(self)(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        out = type(self)(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def unit_exponent(self):
        """Return (sign, k) when self = sign * g^k, else None."""
        nz = [(i, c) for i, c in enumerate(self.coords) if c]
        if len(nz) == 1 and nz[0][1] in (1, -1):
            return nz[0][1], nz[0][0]
        return None

    def inverse(self):
        u = self.unit_exponent()
        if u is None:
            raise DomainError("%r is not a unit" % (self,))
        return u[0] * self.gen_power(-u[1])

    def is_zero(self):
        return not any(self.coords)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.coords == o.coords

    def __hash__(self):
        return hash((type(self).__name__, self.coords))

    def evaluate(self, g):
        """Image under the generator g (any ring element)."""
        out = 0
        power = 1
        for c in self.coords:
            if c:
                out = out + c * power
            power = power * g
        return out


class PiScalar(_CyclicScalar):
    """even + odd*pi with pi^2 = 1."""

    ORDER = 2

    @property
    def even(self):
        return self.coords[0]

    @property
    def odd(self):
        return self.coords[1]

    def __repr__(self):
        return "PiScalar(%d, %d)" % self.coords

    def specialize(self, sign):
        return self.even + sign * self.odd


class SqrtPiScalar(_CyclicScalar):
    """c0 + c1*s + c2*pi + c3*s*pi where s^2 = pi, s^4 = 1."""

    ORDER = 4

    c0 = property(lambda self: self.coords[0])
    c1 = property(lambda self: self.coords[1])
    c2 = property(lambda self: self.coords[2])
    c3 = property(lambda self: self.coords[3])

    def __repr__(self):
        return "SqrtPiScalar(%d, %d, %d, %d)" % self.coords

    @classmethod
    def from_pi(cls, x):
        return cls(x.even, 0, x.odd, 0)


# ---------------------------------------------------------------------------
# Laurent polynomials


class _Laurent:
    """Sparse Laurent polynomial in q with group-ring scalar coefficients."""

    __slots__ = ("terms",)
    SCALAR = _CyclicScalar

    def __init__(self, terms=None):
        clean = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for e, c in items:
                if not isinstance(c, self.SCALAR):
                    c = self._scalar(c)
                if c:
                    e = int(e)
                    if e in clean:
                        c = clean[e] + c
                        if not c:
                            del clean[e]
                            continue
                    clean[e] = c
        self.terms = dict(sorted(clean.items()))

    @classmethod
    def _scalar(cls, c):
        if isinstance(c, Integral):
            return cls.SCALAR(int(c))
        if isinstance(c, PiScalar) and cls.SCALAR is SqrtPiScalar:
            return SqrtPiScalar.from_pi(c)
        return cls.SCALAR(c)

    # constructors
    @classmethod
    def const(cls, c):
        return cls({0: c})

    @classmethod
    def q(cls, e=1):
        return cls({e: 1})

    @classmethod
    def monomial(cls, e, c):
        return cls({e: c})

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls({0: 1})

    def _coerce(self, other):
        if isinstance(other, type(self)):
            return other
        if isinstance(other, (Integral, self.SCALAR)):
            return type(self).const(other)
        if isinstance(other, LaurentPi) and type(self) is LaurentSqrtPi:
            return LaurentSqrtPi.from_pi(other)
        if isinstance(other, PiScalar) and type(self) is LaurentSqrtPi:
            return LaurentSqrtPi.const(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        t = dict(self.terms)
        for e, c in o.terms.items():
            t[e] = t[e] + c if e in t else c
        return type(self)(t)

    __radd__ = __add__

    def __neg__(self):
        return type(self)({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = e1 + e2
                t[e] = t[e] + c1 * c2 if e in t else c1 * c2
        return type(self)(t)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        out = type(self).one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def is_monomial_unit(self):
        return len(self.terms) == 1 and next(iter(self.terms.values())).unit_exponent() is not None

    def inverse(self):
        if not self.is_monomial_unit():
            raise DomainError("%r is not a unit of the Laurent ring" % (self,))
        (e, c), = self.terms.items()
        return type(self)({-e: c.inverse()})

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        return hash((type(self).__name__, tuple(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join("(%s)q^%d" % (_scalar_str(c), e) for e, c in self.terms.items())

    def degree_range(self):
        if not self.terms:
            return None
        keys = list(self.terms)
        return keys[0], keys[-1]

    def substitute_q(self, k):
        """Return the image under q -> q^k."""
        return type(self)({e * k: c for e, c in self.terms.items()})

    def evaluate(self, g, qval):
        """Image under generator -> g and q -> qval (qval must be invertible)."""
        out = 0
        for e, c in self.terms.items():
            out = out + c.evaluate(g) * qval ** e
        return out


def _scalar_str(c):
    if isinstance(c, PiScalar):
        return "%d%+d*pi" % (c.even, c.odd)
    return "%d%+d*s%+d*pi%+d*s*pi" % c.coords


class LaurentPi(_Laurent):
    """Element of A^pi = Z[q, q^-1][pi]."""

    SCALAR = PiScalar

    @classmethod
    def pi(cls):
        return cls({0: PiScalar(0, 1)})

    def to_json(self):
        return [[e, c.even, c.odd] for e, c in self.terms.items()]

    @classmethod
    def from_json(cls, data):
        prev = None
        terms = {}
        for e, ev, od in data:
            if prev is not None and e <= prev:
                raise DomainError("LaurentPi exponents must be strictly increasing")
            prev = e
            terms[e] = PiScalar(ev, od)
        return cls(terms)


class LaurentSqrtPi(_Laurent):
    """Laurent polynomial in q over Z[sqrt(pi)]."""

    SCALAR = SqrtPiScalar

    @classmethod
    def sqrt_pi(cls):
        return cls({0: SqrtPiScalar(0, 1, 0, 0)})

    @classmethod
    def pi(cls):
        return cls({0: SqrtPiScalar(0, 0, 1, 0)})

    @classmethod
    def from_pi(cls, x):
        return cls({e: SqrtPiScalar.from_pi(c) for e, c in x.terms.items()})

    def to_pi(self):
        """Return the LaurentPi element when no odd powers of sqrt(pi) occur."""
        out = {}
        for e, c in self.terms.items():
            if c.c1 or c.c3:
                raise DomainError("element involves sqrt(pi)")
            out[e] = PiScalar(c.c0, c.c2)
        return LaurentPi(out)

    def to_json(self):
        return [[e] + list(c.coords) for e, c in self.terms.items()]

    @classmethod
    def from_json(cls, data):
        return cls({row[0]: SqrtPiScalar(row[1:]) for row in data})


def laurent_from_json(data):
    """Decode either Laurent encoding, using the row width to tell them apart."""
    if data and len(data[0]) == 5:
        return LaurentSqrtPi.from_json(data)
    return LaurentPi.from_json(data)


def specialize_pi(x, sign):
    """Image of a LaurentPi under pi -> sign, as {exponent: integer}."""
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    out = {}
    for e, c in x.terms.items():
        v = c.specialize(sign)
        if v:
            out[e] = v
    return out


def from_specializations(plus, minus):
    """Rebuild a LaurentPi from its images at pi = +1 and pi = -1."""
    terms = {}
    for e in set(plus) | set(minus):
        p, m = plus.get(e, 0), minus.get(e, 0)
        if (p + m) % 2:
            raise DomainError("specializations are not compatible")
        terms[e] = PiScalar((p + m) // 2, (p - m) // 2)
    return LaurentPi(terms)


# ---------------------------------------------------------------------------
# fraction fields of the split components

REAL_FIELD, _Q_REAL = field("q", ZZ)
GAUSS_FIELD, _Q_GAUSS = field("q", ZZ_I)
_I = ZZ_I.from_sympy(sympy.I)

# specialization values of the generator, per component
PI_COMPONENTS = (1, -1)
SQRT_COMPONENTS = (1, -1, "i", "-i")


def component_field(value):
    return GAUSS_FIELD if isinstance(value, str) else REAL_FIELD


def _generator(value):
    if value == "i":
        return GAUSS_FIELD(_I)
    if value == "-i":
        return GAUSS_FIELD(-_I)
    return value


def to_component(x, value, sqrt=False):
    """Image of an integer, LaurentPi or LaurentSqrtPi in one component field.

    With sqrt=False, value is the image of pi; with sqrt=True it is the
    image of the square root s of pi.
    """
    K = component_field(value)
    if isinstance(x, Integral):
        return K(int(x))
    if isinstance(x, LaurentPi):
        if sqrt:
            g = -1 if isinstance(value, str) else 1
        else:
            g = value
        coeffs = {e: c.even + g * c.odd for e, c in x.terms.items()}
        return _laurent_dict_to_field(coeffs, K)
    if isinstance(x, LaurentSqrtPi):
        if not sqrt:
            raise TypeError("a sqrt(pi) element has no image in Q(q)^pi")
        g = _generator(value)
        qv = K.gens[0]
        out = K(0)
        for e, c in x.terms.items():
            out += K(c.evaluate(g)) * qv ** e
        return out
    raise TypeError("cannot map %r into a component field" % (x,))


def _laurent_dict_to_field(coeffs, K):
    qv = K.gens[0]
    out = K(0)
    for e, c in coeffs.items():
        if c:
            out += c * qv ** e
    return out


class _Split:
    """Element of a product of fraction fields indexed by generator images."""

    __slots__ = ("parts",)
    VALUES = ()
    SQRT = False
    LAURENT = _Laurent

    def __init__(self, parts):
        parts = tuple(parts)
        if len(parts) != len(self.VALUES):
            raise ValueError("wrong number of components")
        self.parts = tuple(component_field(v)(p) if not hasattr(p, "numer") else p
                           for v, p in zip(self.VALUES, parts))

    @classmethod
    def embed(cls, x):
        if isinstance(x, cls):
            return x
        if isinstance(x, _Split):
            return cls.lift(x)
        return cls([to_component(x, v, cls.SQRT) for v in cls.VALUES])

    @classmethod
    def lift(cls, x):
        raise TypeError("cannot lift %r" % (x,))

    def _coerce(self, other):
        if isinstance(other, type(self)):
            return other
        try:
            return type(self).embed(other)
        except TypeError:
            return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return type(self)([a + b for a, b in zip(self.parts, o.parts)])

    __radd__ = __add__

    def __neg__(self):
        return type(self)([-a for a in self.parts])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return type(self)([a * b for a, b in zip(self.parts, o.parts)])

    __rmul__ = __mul__

    def is_unit(self):
        return all(p != 0 for p in self.parts)

    def inverse(self):
        if not self.is_unit():
            raise DomainError("not invertible: a component vanishes")
        return type(self)([1 / p for p in self.parts])

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        return type(self)([p ** k for p in self.parts])

    def is_zero(self):
        return all(p == 0 for p in self.parts)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.parts == o.parts

    def __hash__(self):
        return hash(tuple(str(p) for p in self.parts))

    def __repr__(self):
        return "%s(%s)" % (type(self).__name__, ", ".join(str(p) for p in self.parts))


class RatFuncPi(_Split):
    """Element of Q(q)^pi as its (pi=+1, pi=-1) components."""

    VALUES = PI_COMPONENTS
    LAURENT = LaurentPi

    @property
    def plus(self):
        return self.parts[0]

    @property
    def minus(self):
        return self.parts[1]

    def to_laurent(self):
        """Return the LaurentPi with these components, or raise DomainError."""
        dicts = [_field_to_laurent_dict(p) for p in self.parts]
        return from_specializations(dicts[0], dicts[1])

    def to_json(self):
        return {"plus": _frac_json(self.plus), "minus": _frac_json(self.minus)}

    @classmethod
    def from_json(cls, data):
        return cls([_frac_from_json(data["plus"]), _frac_from_json(data["minus"])])


class RatFuncSqrtPi(_Split):
    """Element of Q(q)^sqrt(pi) as components at s = 1, -1, i, -i."""

    VALUES = SQRT_COMPONENTS
    SQRT = True
    LAURENT = LaurentSqrtPi

    @classmethod
    def lift(cls, x):
        if isinstance(x, RatFuncPi):
            gauss = [_real_to_gauss(x.minus)] * 2
            return cls([x.plus, x.plus] + gauss)
        raise TypeError("cannot lift %r" % (x,))

    def to_laurent(self):
        """Return the LaurentSqrtPi with these components, or raise DomainError."""
        dicts = [_field_to_laurent_dict(p) for p in self.parts]
        roots = [1, -1, 1j, -1j]
        terms = {}
        for e in set().union(*dicts):
            v = [complex(dicts[k].get(e, 0)) for k in range(4)]
            coords = []
            for m in range(4):
                # inverse Fourier transform on the cyclic group of order 4
                z = sum(v[k] * roots[k] ** (-m) for k in range(4))
                re, im = int(round(z.real)), int(round(z.imag))
                if im or re % 4 or complex(re, im) != z:
                    raise DomainError("components do not come from an integral element")
                coords.append(re // 4)
            terms[e] = SqrtPiScalar(coords)
        return LaurentSqrtPi(terms)

    def to_json(self):
        return {str(v): _frac_json(p) for v, p in zip(self.VALUES, self.parts)}


def _real_to_gauss(x):
    return GAUSS_FIELD(x.as_expr())


def _is_gauss(c):
    return hasattr(c, "x") and hasattr(c, "y")


def _field_to_laurent_dict(x):
    num, den = x.numer, x.denom
    dterms = den.terms()
    if len(dterms) != 1:
        raise DomainError("not a Laurent polynomial: %s" % (x,))
    ((shift,), dc), = dterms
    out = {}
    for (e,), c in num.terms():
        if _is_gauss(c) or _is_gauss(dc):
            quo, rem = ZZ_I.div(ZZ_I.convert(c), ZZ_I.convert(dc))
            if rem:
                raise DomainError("non-integral coefficient")
            out[e - shift] = complex(int(quo.x), int(quo.y))
        else:
            c, dc_ = int(c), int(dc)
            if c % dc_:
                raise DomainError("non-integral coefficient")
            out[e - shift] = c // dc_
    return out


def _poly_coeffs(poly):
    if poly.is_zero:
        return [0]
    d = dict(poly.terms())
    deg = max(e for (e,) in d)
    return [_json_scalar(d.get((k,), 0)) for k in range(deg + 1)]


def _frac_json(x):
    return {"num": _poly_coeffs(x.numer), "den": _poly_coeffs(x.denom)}


def _json_scalar(c):
    if _is_gauss(c):
        return [int(c.x), int(c.y)]
    return int(c)


def _frac_from_json(d):
    gauss = any(isinstance(c, list) for c in d["num"] + d["den"])
    K = GAUSS_FIELD if gauss else REAL_FIELD
    qv = K.gens[0]

    def conv(c):
        if isinstance(c, list):
            return K(c[0]) + K(_I) * c[1]
        return K(c)

    num = sum((conv(c) * qv ** k for k, c in enumerate(d["num"])), K(0))
    den = sum((conv(c) * qv ** k for k, c in enumerate(d["den"])), K(0))
    return num / den


# ---------------------------------------------------------------------------
# q-integers


def _one_like(a):
    return a ** 0


def qint(n, a, b):
    """[n]_{a,b} = sum_{k<n} a^(n-1-k) b^k, computed without division."""
    if n < 0:
        raise DomainError("qint needs n >= 0")
    out = a * 0
    for k in range(n):
        out = out + a ** (n - 1 - k) * b ** k
    return out


def qfact(n, a, b):
    out = _one_like(a)
    for k in range(1, n + 1):
        out = out * qint(k, a, b)
    return out


_AB_RING, _A, _B = ring("a,b", ZZ)


@lru_cache(maxsize=None)
def _pascal(m, n):
    if n < 0 or n > m:
        return _AB_RING(0)
    if n == 0 or n == m:
        return _AB_RING(1)
    return _A ** n * _pascal(m - 1, n) + _B ** (m - n) * _pascal(m - 1, n - 1)


@lru_cache(maxsize=None)
def universal_qbinom(m, n):
    """The binomial as a polynomial in Z[a, b].

    Computed as the factorial quotient by exact division, which must leave
    no remainder and must agree with the Pascal recursion.
    """
    if n < 0 or n > m:
        raise DomainError("qbinom needs 0 <= n <= m, got m=%d n=%d" % (m, n))
    num = qfact(m, _A, _B)
    den = qfact(n, _A, _B) * qfact(m - n, _A, _B)
    quo, rem = num.div(den)
    if rem:
        raise AssertionError("factorial quotient left a remainder")
    if quo != _pascal(m, n):
        raise AssertionError("quotient and Pascal recursion disagree")
    return quo


def eval_ab(poly, a, b):
    """Evaluate a polynomial of Z[a, b] at ring elements a, b."""
    out = a * 0
    for (i, j), c in poly.terms():
        out = out + int(c) * (a ** i) * (b ** j)
    return out


def qbinom(m, n, a, b):
    if n < 0 or n > m:
        raise DomainError("qbinom needs 0 <= n <= m, got m=%d n=%d" % (m, n))
    return eval_ab(universal_qbinom(m, n), a, b)


def bino_identity_check(n, a=None, b=None):
    """Check sum_k binom(n,k)(ab)^(k(k-1)/2) z^k = prod_k (1 + a^(n-1-k) b^k z).

    Without a and b the check runs in Z[a, b]; otherwise over the ring
    of the given elements, comparing coefficients of z.
    """
    if a is None:
        a, b = _A, _B
    one = _one_like(a)
    lhs = [qbinom(n, k, a, b) * (a * b) ** (k * (k - 1) // 2) for k in range(n + 1)]
    rhs = [one]
    for k in range(n):
        c = a ** (n - 1 - k) * b ** k
        new = [x for x in rhs] + [a * 0]
        for t in range(len(rhs)):
            new[t + 1] = new[t + 1] + c * rhs[t]
        rhs = new
    return all(x == y for x, y in zip(lhs, rhs)) and len(lhs) == len(rhs)


def gauss_pi(n, i, datum):
    """[n]^pi_i = sum_{k<n} q_i^(1-n+2k) pi_i^k as a LaurentPi."""
    d = datum.d[i]
    odd = datum.parity[i]
    terms = {}
    for k in range(n):
        c = PiScalar(0, 1) if (odd and k % 2) else PiScalar(1, 0)
        e = d * (1 - n + 2 * k)
        terms[e] = terms[e] + c if e in terms else c
    return LaurentPi(terms)


def q_i(datum, i):
    return LaurentPi.q(datum.d[i])


def pi_i(datum, i):
    return LaurentPi.pi() if datum.parity[i] else LaurentPi.one()
