import pytest
import sympy
from hypothesis import given, settings, strategies as st

from qsuper import cartan
from qsuper.coeffs import (DomainError, LaurentPi, LaurentSqrtPi, PiScalar, RatFuncPi, RatFuncSqrtPi,
                           SqrtPiScalar, bino_identity_check, from_specializations, gauss_pi, qbinom,
                           qfact, qint, specialize_pi, universal_qbinom)

A, B, Z, Q, P = sympy.symbols("a b z q p")


def to_sympy(x):
    """LaurentPi -> sympy expression in q and p (p standing for pi)."""
    return sum((c.even + c.odd * P) * Q ** e for e, c in x.terms.items())


def reduce_pi(expr):
    expr = sympy.expand(expr)
    return sympy.expand(expr.subs(P ** 2, 1)) if expr.has(P) else expr


laurent = st.dictionaries(st.integers(-4, 4), st.tuples(st.integers(-3, 3), st.integers(-3, 3)),
                          max_size=4).map(lambda d: LaurentPi({e: PiScalar(*c) for e, c in d.items()}))
sqrt_laurent = st.dictionaries(st.integers(-3, 3), st.lists(st.integers(-2, 2), min_size=4, max_size=4),
                               max_size=3).map(lambda d: LaurentSqrtPi({e: SqrtPiScalar(c) for e, c in d.items()}))


def test_qint_small():
    assert qint(0, A, B) == 0
    assert qint(1, A, B) == 1
    # independent oracle: symbolic division of a^3 - b^3 by a - b
    assert sympy.expand(qint(3, A, B) - sympy.cancel((A ** 3 - B ** 3) / (A - B))) == 0


@pytest.mark.parametrize("n", range(1, 7))
def test_qint_matches_division(n):
    assert sympy.expand(qint(n, A, B) - sympy.cancel((A ** n - B ** n) / (A - B))) == 0


def test_qbinom_examples():
    assert sympy.expand(qbinom(2, 1, A, B) - (A + B)) == 0
    assert qbinom(5, 0, A, B) == 1
    q = LaurentPi.q()
    got = qbinom(4, 2, q, q ** -1)
    # factorial-quotient oracle over Z[q, 1/q]
    qq = lambda n: sympy.cancel((Q ** n - Q ** -n) / (Q - 1 / Q))
    fac = lambda n: sympy.prod([qq(k) for k in range(1, n + 1)])
    expected = sympy.cancel(fac(4) / (fac(2) * fac(2)))
    assert sympy.simplify(to_sympy(got) - expected) == 0
    assert to_sympy(got) == Q ** -4 + Q ** -2 + 2 + Q ** 2 + Q ** 4


@pytest.mark.parametrize("m", range(0, 7))
def test_universal_qbinom_is_factorial_quotient(m):
    for n in range(m + 1):
        poly = universal_qbinom(m, n).as_expr()
        fq = sympy.cancel(qfact(m, A, B) / (qfact(n, A, B) * qfact(m - n, A, B)))
        assert sympy.expand(poly - fq) == 0


def test_qbinom_domain():
    with pytest.raises(DomainError):
        qbinom(2, 3, A, B)
    with pytest.raises(DomainError):
        qint(-1, A, B)


def test_bino_small_cases():
    assert bino_identity_check(0)
    assert bino_identity_check(2)
    lhs = sum(qbinom(2, k, A, B) * (A * B) ** (k * (k - 1) // 2) * Z ** k for k in range(3))
    assert sympy.expand(lhs - (1 + A * Z) * (1 + B * Z)) == 0


@pytest.mark.parametrize("n", range(9))
def test_bino_symbolic(n):
    assert bino_identity_check(n)


def test_bino_specialized_super():
    q = LaurentPi.q()
    assert bino_identity_check(6, q, LaurentPi.pi() * q ** -1)


def test_bino_expansion_oracle():
    # full polynomial expansion in z, independent of the coefficient comparison
    n = 5
    lhs = sum(qbinom(n, k, A, B) * (A * B) ** (k * (k - 1) // 2) * Z ** k for k in range(n + 1))
    rhs = sympy.prod([1 + A ** (n - 1 - k) * B ** k * Z for k in range(n)])
    assert sympy.expand(lhs - rhs) == 0


def test_gauss_pi_examples():
    a1odd = cartan.preset("A1odd")
    a1 = cartan.preset("A1")
    assert gauss_pi(1, 0, a1odd) == LaurentPi.one()
    assert gauss_pi(2, 0, a1odd) == LaurentPi.q(-1) + LaurentPi.pi() * LaurentPi.q(1)
    assert gauss_pi(3, 0, a1odd) == LaurentPi.q(-2) + LaurentPi.pi() + LaurentPi.q(2)
    assert gauss_pi(3, 0, a1) == LaurentPi.q(-2) + 1 + LaurentPi.q(2)


def test_gauss_pi_uses_symmetrizer():
    b2 = cartan.preset("B2")
    assert gauss_pi(2, 0, b2) == LaurentPi.q(-2) + LaurentPi.q(2)


def test_specialize_examples():
    a1odd = cartan.preset("A1odd")
    two = gauss_pi(2, 0, a1odd)
    assert specialize_pi(two, 1) == {-1: 1, 1: 1}
    assert specialize_pi(LaurentPi.pi(), -1) == {0: -1}
    assert specialize_pi((1 + LaurentPi.pi()) * LaurentPi.q(3), -1) == {}
    with pytest.raises(DomainError):
        specialize_pi(two, 0)


@given(laurent)
def test_specializations_roundtrip(x):
    assert from_specializations(specialize_pi(x, 1), specialize_pi(x, -1)) == x


@given(laurent, laurent, laurent)
def test_ring_axioms(x, y, z):
    assert (x + y) * z == x * z + y * z
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x
    assert x - x == LaurentPi.zero()


@given(laurent, laurent)
def test_mul_matches_sympy(x, y):
    assert reduce_pi(to_sympy(x * y)) == reduce_pi(to_sympy(x) * to_sympy(y))


@given(laurent)
def test_json_roundtrip(x):
    assert LaurentPi.from_json(x.to_json()) == x


@given(sqrt_laurent, sqrt_laurent)
def test_sqrt_ring(x, y):
    assert x * y == y * x
    assert LaurentSqrtPi.from_json((x * y).to_json()) == x * y
    s = LaurentSqrtPi.sqrt_pi()
    assert s * s == LaurentSqrtPi.pi()


@given(laurent, laurent)
def test_split_embedding_is_a_ring_map(x, y):
    assert RatFuncPi.embed(x * y) == RatFuncPi.embed(x) * RatFuncPi.embed(y)
    assert RatFuncPi.embed(x + y).to_laurent() == x + y


@given(sqrt_laurent)
def test_sqrt_split_roundtrip(x):
    assert RatFuncSqrtPi.embed(x).to_laurent() == x


@settings(max_examples=30)
@given(st.integers(1, 6), st.integers(1, 3), st.booleans())
def test_gauss_pi_scaling(n, d, odd):
    # [n]^pi_i at pi = +1 is the balanced q_i-integer; at pi = -1 and odd i it
    # is the balanced integer in q_i with alternating signs
    datum = cartan.build([[2]], [d], [1 if odd else 0])
    g = gauss_pi(n, 0, datum)
    qd = Q ** d
    plus = sum(c * Q ** e for e, c in specialize_pi(g, 1).items())
    assert sympy.simplify(plus - (qd ** n - qd ** -n) / (qd - 1 / qd)) == 0
    if odd:
        minus = sum(c * Q ** e for e, c in specialize_pi(g, -1).items())
        assert sympy.expand(minus - sum((-1) ** k * qd ** (1 - n + 2 * k) for k in range(n))) == 0


def test_units():
    x = LaurentPi.pi() * LaurentPi.q(3)
    assert x * x.inverse() == LaurentPi.one()
    with pytest.raises(DomainError):
        (1 + LaurentPi.q()).inverse()
    r = RatFuncPi.embed(1 + LaurentPi.pi())
    with pytest.raises(DomainError):
        r.inverse()
    assert RatFuncPi.from_json(RatFuncPi.embed(1 + LaurentPi.q()).inverse().to_json()) * (1 + LaurentPi.q()) == 1
