"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""
import time

import pytest

from qsuper import cartan, params, suite
from qsuper.coeffs import LaurentPi, RatFuncPi, bino_identity_check, gauss_pi
from qsuper.highest import (check_divided_powers, check_EF, corrupted_swap, gauge_transform, nilpotency_bound,
                            nilpotency_check)
from qsuper.qhs import QHSAlgebra, qparams_preset


@pytest.fixture
def verdict(capsys):
    def emit(number, title, ok, detail=""):
        with capsys.disabled():
            print("\n[criterion %2d] %s: %s%s" % (number, "PASS" if ok else "FAIL", title,
                                                  " (%s)" % detail if detail else ""))
        assert ok, detail
    return emit


def test_criterion_01_binomial_identity(verdict):
    t = time.perf_counter()
    q, pi = LaurentPi.q(), LaurentPi.pi()
    ok = all(bino_identity_check(n) for n in range(9))
    ok &= all(bino_identity_check(n, q, pi * q ** -1) for n in range(9))
    ok &= all(bino_identity_check(n, pi * q ** 2, q ** -1) for n in range(9))
    dt = time.perf_counter() - t
    verdict(1, "q-binomial identity n <= 8", ok and dt < 1.0, "%.2fs" % dt)


def test_criterion_02_uminus_character(verdict):
    t = time.perf_counter()
    bad = []
    for name in ("A1", "A1odd", "A2", "B2"):
        rep = suite.uminus_dims(cartan.preset(name), 6)
        bad += [(name, m) for m, r in rep["dims"].items() if not r["ok"]]
    dt = time.perf_counter() - t
    verdict(2, "U^- Gram ranks = product formula, |beta| <= 6", not bad and dt < 60, "%.1fs, failures %s" % (dt, bad))


def test_criterion_03_serre_radical(verdict):
    reps = {name: suite.serre_report(cartan.preset(name)) for name in ("A2", "B2")}
    verdict(3, "Serre elements lie in the radical (A2, B2)", all(r["ok"] for r in reps.values()))


def test_criterion_04_irreducible_characters(verdict):
    cases = [("A1odd", (n,)) for n in range(5)] + [("A2", (1, 1)), ("B2", (1, 0))]
    bad = [c for c in cases if not suite.hw_dims(cartan.preset(c[0]), c[1], 6)["ok"]]
    adj = suite.hw_dims(cartan.preset("A2"), (1, 1), 6)
    adj_ok = adj["total"] == 8 and adj["dims"]["1,1"]["dim"] == 2 and adj["dims"]["1,1"]["weyl_kac"] == 2
    verdict(4, "irr_weight_dim = Weyl-Kac up to height 6; A2 adjoint 8 with 2 at a1+a2",
            not bad and adj_ok, "failures %s" % bad)


def preset_suite():
    for name in sorted(cartan.PRESETS):
        for coeffs in suite.DEFAULT_WEIGHTS[name]:
            yield name, coeffs


def test_criterion_05_super_commutation(verdict):
    bad = []
    for name, coeffs in preset_suite():
        d = cartan.preset(name)
        hw = suite.module(d, coeffs, 5 if d.rank == 1 else 4)
        if not check_EF(hw):
            bad.append((name, coeffs, "relation"))
        if check_EF(hw, swap=corrupted_swap(hw.fam, d)):
            bad.append((name, coeffs, "control passed"))
    verdict(5, "E_i F_j commutation on all preset modules; sign-flip control fails", not bad, "failures %s" % bad)


def test_criterion_06_divided_powers(verdict):
    bad = []
    for name in ("A1", "A1odd"):
        for lam in (1, 2, 3):
            hw = suite.module(cartan.preset(name), (lam,), lam + 3)
            bad += [(name, lam, n, m) for n in range(4) for m in range(4) if not check_divided_powers(hw, n, m, 0)]
    verdict(6, "divided-power identity n, m <= 3, rank one, both parities", not bad, "failures %s" % bad)


def test_criterion_07_casimir(verdict):
    cases = [(name, (lam,)) for name in ("A1", "A1odd") for lam in (1, 2, 3)] + [("A2", (1, 1))]
    bad, detected = [], 0
    for name, coeffs in cases:
        rep = suite.hw_casimir(cartan.preset(name), coeffs, 4)
        if not rep["ok"]:
            bad.append((name, coeffs, rep))
        detected += sum(v == "detected" for v in rep["controls"].values())
    verdict(7, "normalized Casimir = id and commutes with e_i, f_i", not bad and detected > 0,
            "failures %s, mutations detected %d" % (bad, detected))


def test_criterion_08_gauge(verdict):
    bad = []
    for name, coeffs in preset_suite():
        d = cartan.preset(name)
        rep = suite.hw_gauge(d, coeffs, 4)
        if not rep["ok"]:
            bad.append((name, coeffs, "Uqsg -> boldU"))
        if d.rank > 1:
            hw = suite.module(d, coeffs, 4, "BKM")
            moved = gauge_transform(hw, params.preset("boldU", d))
            if moved.dims() != hw.dims() or not check_EF(moved):
                bad.append((name, coeffs, "BKM -> boldU"))
    verdict(8, "gauge transport keeps dims and passes the target relations", not bad, "failures %s" % bad)


def test_criterion_09_quiver_hecke(verdict):
    t = time.perf_counter()
    notes = []
    for name in ("A2", "B2odd"):
        alg = QHSAlgebra(qparams_preset(cartan.preset(name)))
        for n in (1, 2, 3):
            bad = alg.relations_close(n)
            if bad is not None:
                notes.append((name, "relation", bad))
        fz = suite.qhs_fuzz(alg, 5000, seed=7, nmax=4)
        if not fz["ok"] or fz["nonzero"] < 2500:
            notes.append((name, "fuzz", fz))
        for i in range(alg.datum.rank):
            for n in range(1, 5):
                if not alg.b_checks(i, n):
                    notes.append((name, "b", i, n))
    odd_q = any(r % 2 == 0 and r > 0 for (i, j), ts in qparams_preset(cartan.preset("B2odd")).t.items()
                if cartan.preset("B2odd").parity[i] for (r, s) in ts)
    dt = time.perf_counter() - t
    verdict(9, "relations close, 10^4 associativity cases, b(i^n) for n <= 4",
            not notes and odd_q and dt < 300, "%.1fs, problems %s" % (dt, notes))


def test_criterion_10_strong_perfect(verdict):
    bad = []
    for name in ("A1", "A1odd"):
        d = cartan.preset(name)
        for n in (1, 2, 3):
            rep = suite.perfect_rank_one(d, n)
            if not rep["ok"] or len(rep["mutants"]) != 3:
                bad.append((name, n, "report"))
                continue
            for row in rep["report"]["entries"]:
                if not row.get("epsilon"):
                    continue
                sign, e, m = (row["certificate"][k] for k in ("sign", "pi", "q"))
                unit = sign * LaurentPi.pi() ** e * LaurentPi.q(m)
                c = RatFuncPi.from_json(row["c"])
                if c != RatFuncPi.embed(unit * gauss_pi(row["epsilon"], 0, d)):
                    bad.append((name, n, row["basis"]))
    verdict(10, "rank-one dual divided powers strong perfect; recognition passes, 3 mutants fail",
            not bad, "failures %s" % bad)


def test_criterion_11_nilpotency(verdict):
    bad, probes = [], 0
    for name, coeffs in preset_suite():
        d = cartan.preset(name)
        cutoff = 6 if d.rank == 1 else 5
        hw = suite.module(d, coeffs, cutoff)
        lam = hw.lam
        if not nilpotency_check(d, lam, hw.dims(), cutoff):
            bad.append((name, coeffs))
        probes += sum(1 for beta in hw.dims() for i in range(d.rank)
                      if sum(beta) + nilpotency_bound(d, lam, beta, i) <= cutoff)
    verdict(11, "weight dims vanish beyond the nilpotency bound", not bad and probes > 0,
            "failures %s, %d probes inside the cutoff" % (bad, probes))
