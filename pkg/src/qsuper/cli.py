"""Command line entry point.  Every command prints one JSON document.

Exit codes: 0 when all requested checks pass, 1 when a check fails and 2
for configuration errors (reported as {"error": ...}).
"""
from __future__ import annotations

import csv
import io
import json
import os
import sys

import click

from . import cartan, params, suite
from .cartan import DatumError
from .coeffs import DomainError

FAIL = 1
CONFIG = 2


class ConfigError(Exception):
    pass


def _ints(text, what):
    try:
        return tuple(int(x) for x in str(text).split(",") if x.strip())
    except ValueError:
        raise ConfigError("%s must be a comma-separated list of integers" % what)


def _load_datum(preset, path):
    if path:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("cannot read datum file: %s" % exc)
        return cartan.from_json(data)
    if not preset:
        raise ConfigError("give --preset or --datum")
    return cartan.preset(preset)


def _checked_datum(preset, path):
    datum = _load_datum(preset, path)
    v = cartan.validate(datum)
    if v is not None:
        raise ConfigError("invalid datum: %s (%s)" % (v.axiom, v.detail))
    return datum


def _family(datum, name, path):
    if path:
        with open(path) as fh:
            return params.from_json(json.load(fh), datum)
    return params.preset(name, datum)


def _positive(value, what):
    if value is None or value <= 0:
        raise ConfigError("%s must be positive" % what)
    return value


def emit(obj, out=None, fmt="json"):
    if fmt == "csv":
        text = _csv(obj)
    else:
        text = json.dumps(obj, sort_keys=True, indent=2, default=str) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    ok = obj.get("ok", True) if isinstance(obj, dict) else True
    raise SystemExit(0 if ok else FAIL)


def _csv(obj):
    rows = obj.get("dims")
    if not isinstance(rows, dict):
        raise ConfigError("csv output is only available for dimension tables")
    buf = io.StringIO()
    cols = sorted({k for r in rows.values() for k in r})
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["beta"] + cols)
    for beta, r in rows.items():
        w.writerow([beta] + [r.get(c, "") for c in cols])
    return buf.getvalue()


common_datum = [
    click.option("--preset", help="Cartan preset name"),
    click.option("--datum", "datum_path", type=click.Path(), help="Cartan datum JSON file"),
]


def datum_options(f):
    for opt in reversed(common_datum):
        f = opt(f)
    return f


@click.group()
def cli():
    """Exact computations for quantum superalgebras and quiver Hecke superalgebras."""


# cartan ----------------------------------------------------------------


@cli.group("cartan")
def cartan_group():
    """Cartan superdata."""


@cartan_group.command("check")
@datum_options
@click.option("--out", type=click.Path())
def cartan_check(preset, datum_path, out):
    datum = _load_datum(preset, datum_path)
    v = cartan.validate(datum)
    report = {"ok": v is None, "datum": datum.to_json()}
    if v is not None:
        report["violation"] = v.to_json()
    else:
        report["finite_type"] = cartan.is_finite_type(datum)
        report["C6"] = cartan.is_C6(datum)
    emit(report, out)


# uminus ----------------------------------------------------------------


@cli.group("uminus")
def uminus_group():
    """The negative half and its form."""


@uminus_group.command("dim")
@datum_options
@click.option("--cutoff", type=int, default=4, show_default=True)
@click.option("--params", "family", default="Uqsg", show_default=True)
@click.option("--params-file", type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
@click.option("--out", type=click.Path())
def uminus_dim(preset, datum_path, cutoff, family, params_file, fmt, out):
    datum = _checked_datum(preset, datum_path)
    fam = _family(datum, family, params_file)
    emit(suite.uminus_dims(datum, _positive(cutoff, "cutoff"), _tilde(fam, datum)), out, fmt)


def _tilde(fam, datum):
    return params.derive_tilde(fam) if isinstance(fam, params.ThetaP) else fam


@uminus_group.command("gram")
@datum_options
@click.option("--beta", required=True, help="root coordinates, e.g. 1,1")
@click.option("--params", "family", default="Uqsg", show_default=True)
@click.option("--out", type=click.Path())
def uminus_gram(preset, datum_path, beta, family, out):
    datum = _checked_datum(preset, datum_path)
    m = _ints(beta, "--beta")
    if len(m) != datum.rank or min(m) < 0:
        raise ConfigError("--beta needs %d non-negative entries" % datum.rank)
    emit(suite.uminus_gram(datum, m, _tilde(params.preset(family, datum), datum)), out)


@uminus_group.command("serre")
@datum_options
@click.option("--params", "family", default="Uqsg", show_default=True)
@click.option("--out", type=click.Path())
def uminus_serre(preset, datum_path, family, out):
    datum = _checked_datum(preset, datum_path)
    if datum.rank < 2:
        raise ConfigError("Serre elements need rank at least 2")
    emit(suite.serre_report(datum, _tilde(params.preset(family, datum), datum)), out)


# hw --------------------------------------------------------------------


@cli.group("hw")
def hw_group():
    """Irreducible highest-weight modules."""


def hw_options(f):
    f = click.option("--out", type=click.Path())(f)
    f = click.option("--cutoff", type=int, default=4, show_default=True)(f)
    f = click.option("--lambda", "lam", required=True, help="<h_i, lambda> values, e.g. 1,1")(f)
    return datum_options(f)


def _lam(datum, lam):
    coeffs = _ints(lam, "--lambda")
    if len(coeffs) != datum.rank or min(coeffs) < 0:
        raise ConfigError("--lambda needs %d non-negative entries" % datum.rank)
    return coeffs


@hw_group.command("char")
@hw_options
def hw_char(preset, datum_path, lam, cutoff, out):
    datum = _checked_datum(preset, datum_path)
    emit(suite.hw_char(datum, _lam(datum, lam), _positive(cutoff, "cutoff")), out)


@hw_group.command("dims")
@hw_options
@click.option("--params", "family", default="Uqsg", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
def hw_dims(preset, datum_path, lam, cutoff, out, family, fmt):
    datum = _checked_datum(preset, datum_path)
    emit(suite.hw_dims(datum, _lam(datum, lam), _positive(cutoff, "cutoff"), family), out, fmt)


@hw_group.command("verify")
@hw_options
def hw_verify(preset, datum_path, lam, cutoff, out):
    datum = _checked_datum(preset, datum_path)
    emit(suite.hw_verify(datum, _lam(datum, lam), _positive(cutoff, "cutoff")), out)


@hw_group.command("casimir")
@hw_options
@click.option("--seed", type=int, default=0)
def hw_casimir(preset, datum_path, lam, cutoff, out, seed):
    datum = _checked_datum(preset, datum_path)
    if not cartan.is_finite_type(datum):
        raise ConfigError("the Casimir check is run on finite-type data only")
    emit(suite.hw_casimir(datum, _lam(datum, lam), _positive(cutoff, "cutoff"), seed), out)


@hw_group.command("gauge")
@hw_options
@click.option("--target", default="boldU", show_default=True)
def hw_gauge(preset, datum_path, lam, cutoff, out, target):
    datum = _checked_datum(preset, datum_path)
    emit(suite.hw_gauge(datum, _lam(datum, lam), _positive(cutoff, "cutoff"), target), out)


# qhs -------------------------------------------------------------------


@cli.group("qhs")
def qhs_group():
    """Quiver Hecke superalgebras."""


@qhs_group.command("straighten")
@datum_options
@click.option("--n", "n", type=int, required=True)
@click.option("--expr", required=True, help="e.g. 't1*x2*e(1,1)'")
@click.option("--out", type=click.Path())
def qhs_straighten(preset, datum_path, n, expr, out):
    from .qhs import QHSAlgebra, parse_expr, qparams_preset
    datum = _checked_datum(preset, datum_path)
    alg = QHSAlgebra(qparams_preset(datum))
    letters = parse_expr(expr)
    el = alg.straighten(letters, _positive(n, "--n"))
    homog = alg.is_homogeneous(el)
    info = {"ok": True, "terms": el.to_json(), "homogeneous": homog}
    if el.terms and homog:
        k0 = next(iter(el.terms))
        info["degree"] = alg.degree(k0)
        info["parity"] = alg.parity(k0)
    emit(info, out)


@qhs_group.command("verify")
@datum_options
@click.option("--fuzz", type=int, default=10000, show_default=True)
@click.option("--seed", type=int, default=0)
@click.option("--n-max", type=int, default=3, show_default=True)
@click.option("--b-max", type=int, default=4, show_default=True)
@click.option("--out", type=click.Path())
def qhs_verify(preset, datum_path, fuzz, seed, n_max, b_max, out):
    datum = _checked_datum(preset, datum_path)
    emit(suite.qhs_verify(datum, _positive(n_max, "--n-max"), _positive(b_max, "--b-max"),
                          _positive(fuzz, "--fuzz"), seed), out)


@qhs_group.command("dim")
@datum_options
@click.option("--beta", required=True)
@click.option("--lo", type=int, default=-6)
@click.option("--hi", type=int, default=6)
@click.option("--out", type=click.Path())
def qhs_dim(preset, datum_path, beta, lo, hi, out):
    datum = _checked_datum(preset, datum_path)
    b = _ints(beta, "--beta")
    if len(b) != datum.rank or min(b) < 0 or sum(b) == 0:
        raise ConfigError("--beta needs %d non-negative entries, not all zero" % datum.rank)
    if lo > hi:
        raise ConfigError("empty degree window")
    emit(suite.qhs_dim(datum, b, lo, hi), out)


# perfect ---------------------------------------------------------------


@cli.group("perfect")
def perfect_group():
    """Perfect and strong perfect bases."""


@perfect_group.command("check")
@datum_options
@click.option("--lambda", "lam", help="rank one: <h_1, lambda>")
@click.option("--input", "path", type=click.Path(), help="based-module JSON file")
@click.option("--out", type=click.Path())
def perfect_check(preset, datum_path, lam, path, out):
    from .perfect import based_module_from_json, check_strong
    datum = _checked_datum(preset, datum_path)
    if path:
        with open(path) as fh:
            bm = based_module_from_json(json.load(fh), datum)
        rep = check_strong(bm)
        emit(dict(rep.to_json(bm), ok=rep.perfect), out)
    if lam is None or datum.rank != 1:
        raise ConfigError("give --input, or a rank-one datum with --lambda")
    emit(suite.perfect_rank_one(datum, _lam(datum, lam)[0]), out)


# verify ----------------------------------------------------------------


@cli.group("verify")
def verify_group():
    """Run the whole suite."""


@verify_group.command("all")
@click.option("--preset")
@click.option("--cutoff", type=int)
@click.option("--fuzz", type=int)
@click.option("--seed", type=int)
@click.option("--jobs", type=int, help="worker processes (default $QSUPER_JOBS or 1)")
@click.option("--config", "config_path", type=click.Path(), help="run-config JSON file")
@click.option("--out", type=click.Path())
def verify_all(preset, cutoff, fuzz, seed, jobs, config_path, out):
    cfg = _load_config(config_path)
    given = {"preset": preset, "cutoff": cutoff, "fuzz": fuzz, "seed": seed, "jobs": jobs}
    run = dict(RUN_DEFAULTS, jobs=_env_jobs())
    run.update({k: v for k, v in cfg.items() if k in RUN_DEFAULTS or k == "weights"})
    run.update({k: v for k, v in given.items() if v is not None})
    if not run.get("preset"):
        raise ConfigError("give --preset or a config file with a preset")
    for k in ("cutoff", "fuzz", "jobs"):
        _positive(run[k], k)
    weights = [_ints(w, "weights") if isinstance(w, str) else tuple(w) for w in run.get("weights") or []]
    report = suite.verify_all(run["preset"], run["cutoff"], run["fuzz"], run["seed"],
                              weights or None, run["jobs"])
    for node in _walk(report):
        node.pop("seconds", None)
    emit(report, out)


RUN_DEFAULTS = {"preset": None, "cutoff": 5, "fuzz": 2000, "seed": 0, "jobs": 1}


def _env_jobs():
    raw = os.environ.get("QSUPER_JOBS", "1")
    try:
        return int(raw)
    except ValueError:
        raise ConfigError("QSUPER_JOBS must be an integer, got %r" % raw)


def _load_config(path):
    if not path:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError("cannot read config file: %s" % exc)
    if not isinstance(cfg, dict):
        raise ConfigError("config file must hold a JSON object")
    unknown = set(cfg) - set(RUN_DEFAULTS) - {"weights"}
    if unknown:
        raise ConfigError("unknown config keys: %s" % ", ".join(sorted(unknown)))
    return cfg


def _walk(node):
    if isinstance(node, dict):
        yield node
        for v in node.values():
            yield from _walk(v)


def main(argv=None):
    try:
        cli.main(args=argv, prog_name="qsuper", standalone_mode=False)
    except SystemExit as exc:
        return exc.code or 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        return _error("usage", exc.format_message())
    except click.exceptions.Abort:
        return _error("usage", "aborted")
    except DatumError as exc:
        return _error("datum", str(exc))
    except (ConfigError, DomainError, ValueError, OSError) as exc:
        return _error("config", str(exc))
    return 0


def _error(kind, message):
    sys.stdout.write(json.dumps({"ok": False, "error": {"kind": kind, "message": message}},
                                sort_keys=True, indent=2) + "\n")
    return CONFIG


if __name__ == "__main__":
    sys.exit(main())
