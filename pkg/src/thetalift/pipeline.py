"""End-to-end runs: residue input -> canonical lift -> invariants -> integer polynomials.

Configuration is a line-oriented ``key = value`` file (``#`` starts a
comment).  The report is a JSON document with sorted keys and no timing
information, so equal configurations give byte-identical reports.
"""

import contextlib
import json
import os
from dataclasses import dataclass, field

from .errors import ConfigError, PrecisionError, Supersingular, ThetaLiftError
from .finite_field import FqContext, hasse_witt_ordinary
from .invariants import (
    frobenius_charpoly,
    igusa_from_rosenhain,
    j_from_lambda,
    legendre_from_theta_g1,
    rosenhain_from_theta_same,
    rosenhain_richelot,
    thomae_theta_from_quintic,
)
from .lift import (
    detect_split,
    lift_split,
    lift_theta_g1,
    lift_theta_g2,
    load_checkpoint,
    pi_residue,
    save_checkpoint,
    verify_lift,
)
from .lll import MinPolyResult, minpoly_degree_sweep, poly_text
from .padic import zq_context, zq_extend
from .textio import make_field, parse_element, parse_int_poly, parse_list

SCHEMA = "thetalift-report/1"

DEFAULTS = {
    "p": "3",
    "modulus": "z",
    "genus": "",
    "theta": "",
    "roots": "",
    "curve": "",
    "precision": "auto",
    "precision_start": "64",
    "precision_max": "4096",
    "rosenhain": "richelot",
    "reconstruct": "",
    "triple": "",
    "checkpoint_dir": "",
    "format": "json",
}


def read_config(path):
    cfg = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value", stage="config")
            key, value = (s.strip() for s in line.split("=", 1))
            cfg[key] = value
    return cfg


def apply_overrides(cfg, items):
    out = dict(cfg)
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value", stage="config")
        key, value = (s.strip() for s in item.split("=", 1))
        out[key] = value
    return out


def _parse_degrees(text):
    if "-" in text:
        lo, hi = (int(v) for v in text.split("-", 1))
        return list(range(lo, hi + 1))
    return [int(text)]


@dataclass
class PipelineConfig:
    p: int
    modulus: str
    genus: int
    theta: list
    roots: list
    curve: str
    precision: object  # int or "auto"
    precision_start: int
    precision_max: int
    rosenhain: str
    targets: list  # (name, [degrees])
    triple: object
    checkpoint_dir: str
    format: str
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}", stage="config")
        full = dict(DEFAULTS)
        full.update(d)
        try:
            p = int(full["p"])
            theta = parse_list(full["theta"])
            roots = parse_list(full["roots"])
            if bool(theta) == bool(roots):
                raise ConfigError("give exactly one of theta or roots", stage="config")
            if full["genus"]:
                genus = int(full["genus"])
            else:
                genus = 1 if len(theta) == 1 else 2
            if roots and genus != 2:
                raise ConfigError("roots input describes a genus 2 curve", stage="config")
            if theta and len(theta) != (1 if genus == 1 else 3):
                raise ConfigError("theta needs 1 value (genus 1) or 3 values (genus 2)", stage="config")
            prec = full["precision"]
            prec = "auto" if prec == "auto" else int(prec)
            if prec != "auto" and prec < 1:
                raise ConfigError("precision must be at least 1", stage="config")
            targets = []
            for item in parse_list(full["reconstruct"]):
                name, _, deg = item.partition(":")
                if not deg:
                    raise ConfigError(f"reconstruct target {item!r} needs name:degree", stage="config")
                targets.append((name.strip(), _parse_degrees(deg.strip())))
            triple = tuple(int(v) for v in parse_list(full["triple"])) or None
            rosenhain = full["rosenhain"]
            if rosenhain not in ("richelot", "same"):
                raise ConfigError("rosenhain must be richelot or same", stage="config")
            fmt = full["format"]
            if fmt not in ("json", "text"):
                raise ConfigError("format must be json or text", stage="config")
        except ValueError as exc:
            raise ConfigError(str(exc), stage="config") from exc
        if p != 3:
            raise ConfigError("lifting is implemented for p = 3 only", stage="config")
        return cls(p, full["modulus"], genus, theta, roots, full["curve"], prec,
                   int(full["precision_start"]), int(full["precision_max"]), rosenhain,
                   targets, triple, full["checkpoint_dir"], fmt, raw=full)


@contextlib.contextmanager
def stage(name):
    try:
        yield
    except ThetaLiftError as exc:
        if exc.stage is None:
            exc.stage = name
        raise


def _text(v):
    return v.to_text()


# ---------------------------------------------------------------------------
# stages


def _field_stage(cfg):
    with stage("field"):
        fq = make_field(cfg.p, cfg.modulus)
    return fq, {"p": fq.p, "degree": fq.d, "modulus": [int(c) for c in fq.modulus]}


def _curve_stage(cfg, fq, report):
    if cfg.curve:
        with stage("ordinarity"):
            coeffs = parse_int_poly(cfg.curve, "x")
            fp = FqContext(cfg.p, [0, 1])
            ordinary = hasse_witt_ordinary(coeffs, fp)
            entry = {"coefficients": coeffs, "ordinary": ordinary}
            report["curve"] = entry
            if not ordinary:
                raise Supersingular("the curve is not ordinary")
        with stage("charpoly"):
            cp = frobenius_charpoly(coeffs, fp)
            entry["frobenius_charpoly"] = cp
    if cfg.roots:
        with stage("ordinarity"):
            roots = [parse_element(t, fq) for t in cfg.roots]
            ordinary = hasse_witt_ordinary(roots, fq)
            report["curve"] = {"roots": [_text(r) for r in roots], "ordinary": ordinary}
            if not ordinary:
                raise Supersingular("the curve is not ordinary")
        return roots
    return None


def _input_stage(cfg, fq, roots, report):
    if roots is not None:
        with stage("thomae"):
            th = thomae_theta_from_quintic(roots)
        report["thomae"] = {
            "extension_degree": th.extension_degree,
            "level2": [_text(v) for v in th.level2],
        }
        return list(th.level2)
    with stage("input"):
        return [parse_element(t, fq) for t in cfg.theta]


def _checkpoint_hooks(cfg, abar, m):
    if not cfg.checkpoint_dir:
        return None, None
    directory = os.path.join(cfg.checkpoint_dir, f"m{m:05d}")

    def hook(level, prec, values, diag):
        save_checkpoint(directory, level, prec, values, diag)

    e, _, _, _ = pi_residue(tuple(abar))
    ring, _ = zq_extend(zq_context(abar[0].ctx, m), e)
    return hook, load_checkpoint(directory, ring, m)


def _lift_stage(cfg, point, split_word, m):
    with stage("lift"):
        if cfg.genus == 1:
            return lift_theta_g1(point[0], m)
        if split_word is not None:
            return lift_split(tuple(point), m, split_word)
        hook, resume = _checkpoint_hooks(cfg, point, m)
        return lift_theta_g2(tuple(point), m, triple=cfg.triple, checkpoint=hook, resume=resume)


def _invariants(cfg, res):
    """Named p-adic values available for reconstruction."""
    vals = {}
    if res.g == 1:
        x = res.level2[0]
        vals["x"] = x
        lam = legendre_from_theta_g1(x * 0 + 1, None, x)
        vals["lambda"] = lam
        vals["j"] = j_from_lambda(lam)
        return vals
    a02, a20, a22 = res.level2
    vals.update({"a02": a02, "a20": a20, "a22": a22})
    if res.diagnostics.get("route") == "split":
        return vals
    if cfg.rosenhain == "richelot":
        ros = rosenhain_richelot(res.level2)
        names = ("mu1", "mu2", "mu3")
    else:
        ros = rosenhain_from_theta_same(res.level2).candidates[0]
        names = ("lambda1", "lambda2", "lambda3")
    vals.update(dict(zip(names, ros)))
    ig = igusa_from_rosenhain(ros)
    vals.update({"j1": ig.j1, "j2": ig.j2, "j4": ig.j4})
    return vals


def _reconstruct(vals, targets):
    out = {}
    for name, degrees in targets:
        if name not in vals:
            raise ConfigError(f"no value named {name!r}; available: {sorted(vals)}")
        out[name] = minpoly_degree_sweep(vals[name], degrees)
    return out


def _result_json(res: MinPolyResult):
    return {
        "coefficients": res.coeffs,
        "polynomial": res.to_text(),
        "degree": res.degree,
        "quality": res.quality,
        "precision_used": res.precision_used,
        "margin_digits": round(res.margin, 3),
        "valuation": res.valuation,
    }


def _precisions(cfg):
    if cfg.precision != "auto":
        return [cfg.precision]
    out, m = [], cfg.precision_start
    while m < cfg.precision_max:
        out.append(m)
        m *= 2
    out.append(cfg.precision_max)
    return out


def run_pipeline(cfg: PipelineConfig, log=None):
    """Run every stage and return the report dictionary."""
    log = log or (lambda msg: None)
    report = {"schema": SCHEMA, "config": {k: cfg.raw[k] for k in sorted(cfg.raw)}}
    fq, report["field"] = _field_stage(cfg)
    roots = _curve_stage(cfg, fq, report)
    point = _input_stage(cfg, fq, roots, report)
    report["input"] = [_text(v) for v in point]

    split_word = None
    if cfg.genus == 2:
        with stage("split"):
            split_word = detect_split(tuple(point))
        report["split"] = None if split_word is None else list(split_word)

    attempts = []
    chosen = None
    for m in _precisions(cfg):
        log(f"lifting at precision {m}")
        res = _lift_stage(cfg, point, split_word, m)
        with stage("verify"):
            ver = verify_lift(res)
            if ver["shortfall"]:
                raise PrecisionError(f"lift misses precision {m} by {ver['shortfall']} digits")
        with stage("invariants"):
            vals = _invariants(cfg, res)
        with stage("reconstruct"):
            try:
                recs = _reconstruct(vals, cfg.targets)
            except ThetaLiftError:
                if cfg.precision != "auto" or m == cfg.precision_max:
                    raise
                attempts.append({"precision": m, "result": "no relation"})
                continue
        confident = all(r.quality == "Confident" for r in recs.values())
        attempts.append({"precision": m, "result": "confident" if confident else "low margin"})
        chosen = (m, res, ver, vals, recs)
        if confident:
            break
    m, res, ver, vals, recs = chosen

    diag = {k: v for k, v in res.diagnostics.items() if k != "resumed_from"}
    if "resumed_from" in res.diagnostics:
        log(f"resumed from checkpoint at precision {res.diagnostics['resumed_from']}")
    report["lift"] = {
        "genus": res.g,
        "precision": m,
        "diagnostics": diag,
        "level2": [_text(v) for v in res.level2],
        "verify": ver,
    }
    if cfg.precision == "auto":
        report["precision_sweep"] = attempts
    report["invariants"] = {k: _text(v) for k, v in sorted(vals.items())}
    report["reconstruction"] = {k: _result_json(r) for k, r in recs.items()}
    return report


def render(report, fmt="json"):
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=1) + "\n"
    lines = [f"field: F_{report['field']['p']}^{report['field']['degree']}"]
    if "curve" in report:
        c = report["curve"]
        lines.append(f"curve: ordinary={c['ordinary']}")
        if "frobenius_charpoly" in c:
            lines.append(f"frobenius charpoly: {poly_text(c['frobenius_charpoly'])}")
    if "thomae" in report:
        lines.append(f"thomae: extension degree {report['thomae']['extension_degree']}")
    lines.append(f"input: {', '.join(report['input'])}")
    if "split" in report:
        lines.append(f"split: {report['split']}")
    lift = report["lift"]
    lines.append(f"lift: genus {lift['genus']}, precision {lift['precision']}, "
                 f"shortfall {lift['verify']['shortfall']}")
    for name, rec in report["reconstruction"].items():
        lines.append(f"{name} [{rec['quality']}, m'={rec['precision_used']}]: {rec['polynomial']}")
    return "\n".join(lines) + "\n"
