import pytest
from hypothesis import given, strategies as st

from qsuper import cartan, params
from qsuper.coeffs import DomainError, LaurentPi, LaurentSqrtPi
from qsuper.params import (TildeThetaP, check_pt, check_ttp, chi_build, chi_conditions_hold, derive_tilde,
                           from_tilde, same_gauge_class)

q, pi = LaurentPi.q, LaurentPi.pi()
ALL = sorted(cartan.PRESETS)


def test_uqsg_rank_one_odd():
    d = cartan.preset("A1odd")
    fam = params.preset("Uqsg", d)
    assert fam.tp[0] == q(2) * pi
    assert fam.ttheta[0][0] == pi * q(-2)
    assert fam.ttheta[0][0] ** 2 == fam.tp[0] ** -2
    assert check_ttp(fam, d) is None


def test_dropping_pi_is_caught():
    d = cartan.preset("A1odd")
    fam = params.preset("Uqsg", d)
    bad = TildeThetaP(ttheta=((q(-2),),), tp=fam.tp)
    v = check_ttp(bad, d)
    assert v.identity == "ttheta_ii = tp_i^(-1)"
    with pytest.raises(DomainError):
        params.require(bad, d)


def test_bkm_rank_one_even():
    d = cartan.preset("A1")
    fam = params.preset("BKM", d)
    assert fam.p_diag[0] == q(1)
    assert fam.theta[0][0] == 1
    assert check_pt(fam, d) is None
    assert derive_tilde(fam).ttheta[0][0] == q(-2)


def test_boldu_even_has_trivial_theta():
    d = cartan.preset("A2")
    fam = params.preset("boldU", d)
    assert all(fam.theta[i][j] == 1 for i in range(2) for j in range(2))
    t = derive_tilde(fam)
    assert t.ttheta[0][1] == t.ttheta[1][0]


def test_boldu_odd_needs_sqrt_pi():
    d = cartan.preset("A1odd")
    fam = params.preset("boldU", d)
    assert fam.p_diag[0] == LaurentSqrtPi.sqrt_pi() * LaurentSqrtPi.q(1)
    t = derive_tilde(fam)
    assert t.tp[0] == q(2) * pi
    assert t.ttheta[0][0] == pi * q(-2)
    assert same_gauge_class(t, params.preset("Uqsg", d))


@pytest.mark.parametrize("name", ALL)
@pytest.mark.parametrize("family", ["Uqsg", "BKM", "boldU"])
def test_presets_satisfy_conditions(name, family):
    d = cartan.preset(name)
    fam = params.preset(family, d)
    if isinstance(fam, TildeThetaP):
        assert check_ttp(fam, d) is None
    else:
        assert check_pt(fam, d) is None
        assert check_ttp(derive_tilde(fam), d) is None


@pytest.mark.parametrize("name", ALL)
def test_from_tilde_inverts_derive(name):
    d = cartan.preset(name)
    fam = params.preset("boldU", d)
    back = from_tilde(derive_tilde(fam), fam.p_diag, d)
    assert check_pt(back, d) is None
    assert same_gauge_class(back, fam)


def test_bad_sqrt_root():
    d = cartan.preset("A1odd")
    with pytest.raises(DomainError):
        params.preset("boldU", d, sqrt_roots=(LaurentSqrtPi.one(),))
    with pytest.raises(DomainError):
        params.preset("nope", d)


def test_json_roundtrip():
    d = cartan.preset("B2odd")
    for family in ("Uqsg", "BKM", "boldU"):
        fam = params.preset(family, d)
        back = params.from_json(fam.to_json(), d)
        assert back.to_json() == fam.to_json()


def test_chi_examples():
    d = cartan.preset("A1")
    fam = params.preset("BKM", d)
    lam = d.fundamental((1,))
    chi = chi_build(d, fam, lam)
    assert chi(0, lam) == q(1)
    assert chi(0, d.sub_root(lam, (1,))) == q(-1)
    zero = d.fundamental((0,))
    assert chi_build(d, fam, zero)(0, zero) == 1
    d1 = cartan.preset("A1odd")
    tf = params.preset("Uqsg", d1)
    lam1 = d1.fundamental((3,))
    assert chi_build(d1, tf, lam1)(0, lam1) == (q(2) * pi) ** 3


@given(st.sampled_from(["A1", "A1odd", "A2", "B2odd"]), st.sampled_from(["Uqsg", "BKM", "boldU"]), st.data())
def test_chi_conditions(name, family, data):
    d = cartan.preset(name)
    fam = params.preset(family, d)
    coeffs = tuple(data.draw(st.lists(st.integers(0, 3), min_size=d.rank, max_size=d.rank)))
    lam0 = d.fundamental(coeffs)
    chi = chi_build(d, fam, lam0)
    m = tuple(data.draw(st.lists(st.integers(0, 3), min_size=d.rank, max_size=d.rank)))
    assert chi_conditions_hold(d, fam, chi, d.sub_root(lam0, m))
