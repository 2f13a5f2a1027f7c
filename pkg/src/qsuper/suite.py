"""Check runners shared by the command line and the acceptance tests.

Each runner returns a JSON-ready dict with an "ok" flag.
"""
from __future__ import annotations

import random
import time
from concurrent.futures import ProcessPoolExecutor

from . import cartan, params
from .cartan import positive_roots, weights_up_to
from .coeffs import LaurentPi, bino_identity_check
from .highest import (VermaContext, build_hw, casimir_build, casimir_check, check_divided_powers, check_EF,
                      corrupted_swap, gauge_transform, irr_weight_dim, nilpotency_check, weyl_kac_char)
from .perfect import (check_strong, divided_power_basis, from_hw, recognition_check)
from .qhs import (QHSAlgebra, QHSElement, char_epsilon, char_L, gauss_factorial, graded_dim, left_residues,
                  pbw_count, qparams_preset)
from .uminus import BosonAlgebra, product_formula

# highest weights (as <h_i, lam>) exercised per datum preset
DEFAULT_WEIGHTS = {
    "A1": [(1,), (2,), (3,)],
    "A1odd": [(1,), (2,), (3,)],
    "A2": [(1, 0), (1, 1)],
    "B2": [(1, 0), (0, 1)],
    "B2odd": [(1, 0), (0, 2)],
    "A1affine": [(1, 0)],
}


def key(m):
    return ",".join(str(x) for x in m)


def _timed(fn, *a, **kw):
    t = time.perf_counter()
    out = fn(*a, **kw)
    out["seconds"] = round(time.perf_counter() - t, 3)
    return out


# ---------------------------------------------------------------------------
# coefficients and U^-


def bino_report(nmax=8):
    bad = [n for n in range(nmax + 1) if not bino_identity_check(n)]
    return {"ok": not bad, "n_max": nmax, "failures": bad}


def uminus_dims(datum, cutoff, fam=None):
    fam = fam or params.preset("Uqsg", datum)
    alg = BosonAlgebra(datum, fam)
    expected = product_formula(datum, cutoff, positive_roots(datum, cutoff))
    rows, ok = {}, True
    for m in weights_up_to(datum.rank, cutoff):
        ranks = alg.component_ranks(m)
        e = expected.get(m, 0)
        good = ranks[1] == ranks[-1] == e
        ok &= good
        rows[key(m)] = {"plus": ranks[1], "minus": ranks[-1], "expected": e, "ok": good}
    return {"ok": ok, "dims": rows}


def uminus_gram(datum, m, fam=None):
    fam = fam or params.preset("Uqsg", datum)
    alg = BosonAlgebra(datum, fam)
    words, G = alg.gram(tuple(m))
    ranks = alg.component_ranks(tuple(m)) if words else {1: 0, -1: 0}
    return {"ok": ranks[1] == ranks[-1],
            "words": [[i + 1 for i in w] for w in words],
            "gram": [[x.to_json() for x in row] for row in G],
            "rank": {"plus": ranks[1], "minus": ranks[-1]}}


def serre_report(datum, fam=None):
    fam = fam or params.preset("Uqsg", datum)
    alg = BosonAlgebra(datum, fam)
    rows = []
    for i in range(datum.rank):
        for j in range(datum.rank):
            if i != j:
                rows.append({"i": i + 1, "j": j + 1, "in_radical": alg.serre_in_radical(i, j)})
    return {"ok": all(r["in_radical"] for r in rows), "pairs": rows}


# ---------------------------------------------------------------------------
# highest-weight modules


def module(datum, coeffs, cutoff, family="Uqsg"):
    fam = family if not isinstance(family, str) else params.preset(family, datum)
    lam = datum.fundamental(tuple(coeffs))
    return build_hw(VermaContext(datum, fam, lam), cutoff)


def hw_char(datum, coeffs, cutoff):
    lam = datum.fundamental(tuple(coeffs))
    ch = weyl_kac_char(datum, lam, cutoff)
    return {"ok": True, "char": {key(m): v for m, v in sorted(ch.items(), key=lambda t: (sum(t[0]), t[0]))}}


def hw_dims(datum, coeffs, cutoff, family="Uqsg"):
    lam = datum.fundamental(tuple(coeffs))
    fam = params.preset(family, datum) if isinstance(family, str) else family
    ctx = VermaContext(datum, fam, lam)
    ch = weyl_kac_char(datum, lam, cutoff)
    rows, ok = {}, True
    for m in sorted(ch, key=lambda t: (sum(t), t)):
        d = irr_weight_dim(ctx, m)
        ok &= d == ch[m]
        rows[key(m)] = {"dim": d, "weyl_kac": ch[m]}
    return {"ok": ok, "dims": rows, "total": sum(r["dim"] for r in rows.values())}


def hw_verify(datum, coeffs, cutoff, divided=3):
    """Relations, negative control, divided powers (rank one), nilpotency."""
    hw = module(datum, coeffs, cutoff)
    lam = hw.lam
    ch = weyl_kac_char(datum, lam, cutoff)
    dims = hw.dims()
    out = {"dims_match": all(dims.get(m, 0) == v for m, v in ch.items())}
    out["relations"] = bool(check_EF(hw))
    trivial = all(x == 0 for x in coeffs)
    bad = bool(check_EF(hw, swap=corrupted_swap(hw.fam, datum)))
    out["negative_control_fails"] = (not bad) or trivial
    out["nilpotency"] = nilpotency_check(datum, lam, dims, cutoff)
    if datum.rank == 1 and divided:
        out["divided_powers"] = all(check_divided_powers(hw, n, m, 0)
                                    for n in range(divided + 1) for m in range(divided + 1))
    out["ok"] = all(v for v in out.values())
    return out


def hw_gauge(datum, coeffs, cutoff, target="boldU"):
    hw = module(datum, coeffs, cutoff)
    tgt = params.preset(target, datum)
    moved = gauge_transform(hw, tgt)
    same = moved.dims() == hw.dims()
    rel = bool(check_EF(moved))
    direct = module(datum, coeffs, cutoff, target)
    return {"ok": same and rel and direct.dims() == hw.dims(), "dims_unchanged": same,
            "target_relations": rel, "target": target}


def hw_casimir(datum, coeffs, cutoff, seed=0):
    """Omega^ = id on the boldU module, built directly and by transport.

    Each mutation that actually changes Psi or t must be detected; on small
    modules where every such value is 1 the mutation is recorded as vacuous.
    """
    direct = module(datum, coeffs, cutoff, "boldU")
    moved = gauge_transform(module(datum, coeffs, cutoff), params.preset("boldU", datum))
    cas = casimir_build(direct, seed=seed)
    ok_direct = bool(casimir_check(direct, cas))
    ok_moved = bool(casimir_check(moved, seed=seed))
    live = [m for m, b in direct.basis.items() if b]
    controls = {}
    for mut, table in (("psi", cas.psi), ("t", cas.t)):
        used = [v for nu, v in table.items() if any(all(x <= y for x, y in zip(nu, m)) for m in live)]
        if all(v == LaurentPi.one() for v in used):
            controls[mut] = "vacuous"
        else:
            controls[mut] = "detected" if not casimir_check(direct, mutate=mut, seed=seed) else "missed"
    return {"ok": ok_direct and ok_moved and "missed" not in controls.values(), "direct": ok_direct,
            "transported": ok_moved, "controls": controls}


# ---------------------------------------------------------------------------
# perfect bases


def perfect_rank_one(datum, n, cutoff=None):
    """Dual divided-power basis: strong perfect, recognised, and three mutants rejected."""
    if datum.rank != 1:
        raise ValueError("rank-one datum expected")
    hw = module(datum, (n,), cutoff or n + 1)
    basis, labels = divided_power_basis(hw, dual=True)
    bm = from_hw(hw, basis, labels)
    rep = check_strong(bm)
    lattice = list(basis)
    rec = recognition_check(bm, 0, lattice)
    out = {"perfect": rep.perfect, "strong": rep.strong, "recognition": bool(rec),
           "report": rep.to_json(bm)}
    mutants = {}
    if n >= 1:
        from .coeffs import RatFuncPi
        bad = RatFuncPi.embed(LaurentPi.one() + LaurentPi.q(2) * LaurentPi.pi()).inverse()
        mutants["lattice_generator_divided"] = bool(
            recognition_check(bm, 0, lattice[:1] + [lattice[1].scale(bad)] + lattice[2:]))
        scaled = list(basis)
        scaled[1] = scaled[1].scale(RatFuncPi.embed(LaurentPi.one() + LaurentPi.q(1)))
        mutants["basis_rescaled"] = bool(recognition_check(from_hw(hw, scaled, labels), 0, lattice))
        mutants["wrong_top"] = bool(recognition_check(bm, 1, lattice))
    out["mutants_rejected"] = not any(mutants.values())
    out["mutants"] = mutants
    out["ok"] = rep.perfect and rep.strong and bool(rec) and out["mutants_rejected"]
    return out


# ---------------------------------------------------------------------------
# quiver Hecke superalgebra


def _word(rng, n, length):
    return [("t", rng.randrange(n - 1)) if n > 1 and rng.random() < 0.55 else ("x", rng.randrange(n))
            for _ in range(length)]


def chained_triple(alg, rng, n):
    """Three random elements whose products are usually nonzero."""
    nu = tuple(rng.randrange(alg.datum.rank) for _ in range(n))
    els = [QHSElement(n, alg.act(_word(rng, n, rng.randrange(1, 4)), nu))]
    for _ in range(2):
        prev = els[-1]
        mu = left_residues(rng.choice(sorted(prev.terms))) if prev.terms else nu
        els.append(QHSElement(n, alg.act(_word(rng, n, rng.randrange(1, 4)), mu)))
    return els[2], els[1], els[0]


def qhs_fuzz(alg, count, seed=0, nmax=4):
    rng = random.Random(seed)
    bad = nonzero = 0
    for _ in range(count):
        n = rng.randrange(2, nmax + 1)
        u, v, w = chained_triple(alg, rng, n)
        left = alg.multiply(alg.multiply(u, v), w)
        if left != alg.multiply(u, alg.multiply(v, w)):
            bad += 1
        nonzero += not left.is_zero()
    return {"ok": bad == 0, "cases": count, "failures": bad, "nonzero": nonzero}


def qhs_verify(datum, nmax=3, bmax=4, fuzz=10000, seed=0):
    alg = QHSAlgebra(qparams_preset(datum))
    closure = {}
    for n in range(1, nmax + 1):
        bad = alg.relations_close(n)
        closure[str(n)] = None if bad is None else {"nu": [i + 1 for i in bad[0]], "relation": bad[1]}
    b = {}
    for i in range(datum.rank):
        for n in range(1, bmax + 1):
            b["%d^%d" % (i + 1, n)] = alg.b_checks(i, n)
    fz = qhs_fuzz(alg, fuzz, seed)
    chars = {}
    for i in range(datum.rank):
        for n in range(1, bmax + 1):
            ch = char_L(alg, i, n)
            unit = (LaurentPi.q(datum.d[i]) * (LaurentPi.pi() if datum.parity[i] else LaurentPi.one())) \
                ** (n * (n - 1) // 2)
            chars["%d^%d" % (i + 1, n)] = (ch[(i,) * n] * unit == gauss_factorial(datum, i, n)
                                           and char_epsilon(ch, i) == n)
    ok = all(v is None for v in closure.values()) and all(b.values()) and fz["ok"] and all(chars.values())
    return {"ok": ok, "qparams": alg.qp.to_json(), "closure": closure, "b_idempotents": b,
            "fuzz": fz, "L_characters": chars}


def qhs_dim(datum, beta, lo, hi):
    alg = QHSAlgebra(qparams_preset(datum))
    g = graded_dim(alg, tuple(beta), lo, hi)
    p = pbw_count(alg, tuple(beta), lo, hi)
    return {"ok": g == p, "dim": g.to_json(), "window": [lo, hi]}


# ---------------------------------------------------------------------------
# everything for one preset


def _module_entry(name, coeffs, cutoff, seed):
    datum = cartan.preset(name)
    entry = {"dims": _timed(hw_dims, datum, coeffs, cutoff),
             "verify": _timed(hw_verify, datum, coeffs, cutoff),
             "gauge": _timed(hw_gauge, datum, coeffs, cutoff)}
    if cartan.is_finite_type(datum):
        entry["casimir"] = _timed(hw_casimir, datum, coeffs, min(cutoff, 4), seed)
    if datum.rank == 1:
        entry["perfect"] = _timed(perfect_rank_one, datum, coeffs[0])
    return entry


def _qhs_entry(name, fuzz, seed):
    datum = cartan.preset(name)
    return _timed(qhs_verify, datum, 3, 4 if datum.rank == 1 else 3, fuzz, seed)


def verify_all(name, cutoff=5, fuzz=2000, seed=0, weights=None, jobs=1):
    """Every check for one preset.  With jobs > 1 the modules and the qhs block
    run in worker processes; the report is assembled in a fixed order."""
    datum = cartan.preset(name)
    report = {"preset": name, "cutoff": cutoff}
    v = cartan.validate(datum)
    report["cartan"] = {"ok": v is None, "violation": None if v is None else v.to_json()}
    report["bino"] = _timed(bino_report)
    report["uminus"] = _timed(uminus_dims, datum, min(cutoff, 6))
    if datum.rank > 1:
        report["serre"] = _timed(serre_report, datum)
    weights = [tuple(w) for w in (weights or DEFAULT_WEIGHTS.get(name, [(1,) * datum.rank]))]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            qhs_job = pool.submit(_qhs_entry, name, fuzz, seed)
            mod_jobs = [pool.submit(_module_entry, name, w, cutoff, seed) for w in weights]
            entries = [j.result() for j in mod_jobs]
            report["qhs"] = qhs_job.result()
    else:
        entries = [_module_entry(name, w, cutoff, seed) for w in weights]
        report["qhs"] = _qhs_entry(name, fuzz, seed)
    report["modules"] = {key(w): e for w, e in zip(weights, entries)}
    report["ok"] = _all_ok(report)
    return report


def _all_ok(node):
    if isinstance(node, dict):
        if "ok" in node and node["ok"] is False:
            return False
        return all(_all_ok(v) for k, v in node.items() if k != "ok")
    return True

