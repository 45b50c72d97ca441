"""Command-line interface: ``thetalift <subcommand> ...``.

Exit status is 0 on success and the error's ``code`` otherwise (see
errors.py); the failing stage is printed on stderr.
"""

import argparse
import functools
import json
import sys

from .errors import ConfigError, ThetaLiftError
from .finite_field import FqElem, hasse_witt_ordinary
from .invariants import (
    frobenius_charpoly,
    igusa_from_rosenhain,
    j_from_lambda,
    legendre_from_theta_g1,
    rosenhain_from_theta_same,
    rosenhain_richelot,
    thomae_theta_from_quintic,
)
from .lift import detect_split, lift_split, lift_theta_g1, lift_theta_g2, save_checkpoint, verify_lift
from .lll import minpoly_degree_sweep, minpoly_reconstruct, poly_text
from .pipeline import PipelineConfig, apply_overrides, read_config, render, run_pipeline, stage
from .relations import gen_corresp_relations, gen_riemann_relations, relations_text
from .textio import make_field, parse_element, parse_int_poly, parse_list


def _field(args):
    with stage("field"):
        return make_field(args.p, args.modulus)


def _degrees(args):
    if args.degree_range:
        lo, hi = (int(v) for v in args.degree_range.split("-", 1))
        return list(range(lo, hi + 1))
    return [args.degree]


def _emit(args, payload, text):
    if getattr(args, "json", False):
        sys.stdout.write(json.dumps(payload, sort_keys=True, indent=1) + "\n")
    else:
        sys.stdout.write(text + "\n")


def cmd_gen_relations(args):
    rels = gen_riemann_relations(args.g) if args.kind == "riemann" else gen_corresp_relations(args.g)
    sys.stdout.write(relations_text(rels) + "\n")


def cmd_lift(args):
    fq = _field(args)
    point = [parse_element(t, fq) for t in parse_list(args.point)]
    hook = functools.partial(save_checkpoint, args.checkpoint_dir) if args.checkpoint_dir else None
    with stage("lift"):
        if len(point) == 1:
            res = lift_theta_g1(point[0], args.m)
        elif len(point) == 3:
            word = detect_split(tuple(point))
            if word is not None:
                res = lift_split(tuple(point), args.m, word)
            else:
                triple = tuple(int(v) for v in parse_list(args.triple)) if args.triple else None
                res = lift_theta_g2(tuple(point), args.m, triple=triple, checkpoint=hook)
        else:
            raise ConfigError("a point is 1 value (genus 1) or 3 values (genus 2)")
    ver = verify_lift(res)
    payload = {
        "level2": [v.to_text() for v in res.level2],
        "diagnostics": {k: v for k, v in res.diagnostics.items() if k != "resumed_from"},
        "verify": ver,
    }
    _emit(args, payload, "\n".join(payload["level2"]) + f"\n# shortfall {ver['shortfall']}")


def cmd_thomae(args):
    fq = _field(args)
    roots = [parse_element(t, fq) for t in parse_list(args.roots)]
    with stage("thomae"):
        th = thomae_theta_from_quintic(roots)
    payload = {"extension_degree": th.extension_degree, "level2": [v.to_text() for v in th.level2]}
    _emit(args, payload, f"# extension degree {th.extension_degree}\n" + "\n".join(payload["level2"]))


def cmd_invariants(args):
    fq = _field(args)
    with stage("input"):
        if args.roots:
            roots = [parse_element(t, fq) for t in parse_list(args.roots)]
            level2 = list(thomae_theta_from_quintic(roots).level2)
        else:
            level2 = [parse_element(t, fq, args.m) for t in parse_list(args.theta)]
    out = {}
    with stage("invariants"):
        if len(level2) == 1:
            x = level2[0]
            lam = legendre_from_theta_g1(x * 0 + 1, None, x)
            out["lambda"] = lam
            out["j"] = j_from_lambda(lam)
        else:
            if args.rosenhain == "richelot":
                ros = rosenhain_richelot(level2)
                names = ("mu1", "mu2", "mu3")
            else:
                ros = rosenhain_from_theta_same(level2).candidates[0]
                names = ("lambda1", "lambda2", "lambda3")
            out.update(zip(names, ros))
            ig = igusa_from_rosenhain(ros)
            out.update({"j1": ig.j1, "j2": ig.j2, "j4": ig.j4})
    payload = {k: v.to_text() for k, v in out.items()}
    lines = [f"{k} = {v}" for k, v in payload.items()]
    if args.reconstruct:
        with stage("reconstruct"):
            recon = {}
            for k, v in out.items():
                if isinstance(v, FqElem):
                    raise ConfigError("reconstruction needs p-adic input (elements written p^d@m:[...])")
                if k in ("j", "j1", "j2", "j4"):
                    r = minpoly_degree_sweep(v, _degrees(args))
                    recon[k] = {"coefficients": r.coeffs, "quality": r.quality}
                    lines.append(f"{k}: {r.to_text()}  [{r.quality}]")
            payload["reconstruction"] = recon
    _emit(args, payload, "\n".join(lines))


def cmd_reconstruct(args):
    fq = _field(args)
    with stage("input"):
        gamma = parse_element(args.element, fq)
        if isinstance(gamma, FqElem):
            raise ConfigError("reconstruction needs a p-adic element written p^d@m:[...]")
    with stage("reconstruct"):
        degrees = _degrees(args)
        if len(degrees) == 1:
            res = minpoly_reconstruct(gamma, degrees[0], shift=args.shift)
        else:
            res = minpoly_degree_sweep(gamma, degrees, shift=args.shift)
    payload = {"coefficients": res.coeffs, "polynomial": res.to_text(), "quality": res.quality,
               "precision_used": res.precision_used}
    _emit(args, payload, f"{res.coeffs}\n{res.to_text()}\n# {res.quality}")


def cmd_charpoly(args):
    fq = _field(args)
    with stage("charpoly"):
        coeffs = parse_int_poly(args.curve, "x") if "z" not in args.curve else None
        if coeffs is None:
            raise ConfigError("curve coefficients must be integers; use --modulus for the field")
        cp = frobenius_charpoly(coeffs, fq)
        ordinary = hasse_witt_ordinary(coeffs, fq)
    payload = {"coefficients": cp, "polynomial": poly_text(cp), "ordinary": ordinary}
    _emit(args, payload, poly_text(cp))


def cmd_pipeline(args):
    raw = read_config(args.config) if args.config else {}
    raw = apply_overrides(raw, args.set)
    with stage("config"):
        cfg = PipelineConfig.from_dict(raw)
    log = (lambda msg: print(msg, file=sys.stderr)) if args.verbose else None
    report = run_pipeline(cfg, log)
    text = render(report, args.format or cfg.format)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser():
    ap = argparse.ArgumentParser(prog="thetalift", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def field_opts(p):
        p.add_argument("--p", type=int, default=3, help="characteristic (default 3)")
        p.add_argument("--modulus", default=None,
                       help="defining polynomial in z, e.g. 'z^3 - z + 1' (default: prime field)")
        p.add_argument("--json", action="store_true", help="structured output")

    p = sub.add_parser("gen-relations", help="print Riemann or correspondence relations")
    p.add_argument("--g", type=int, required=True, choices=(1, 2, 3))
    p.add_argument("--kind", choices=("riemann", "corresp"), default="riemann")
    p.set_defaults(func=cmd_gen_relations)

    p = sub.add_parser("lift", help="canonical lift of a residue theta point")
    field_opts(p)
    p.add_argument("--point", required=True, help="x (genus 1) or a02, a20, a22 (genus 2)")
    p.add_argument("--m", type=int, required=True, help="target 3-adic precision")
    p.add_argument("--triple", help="force three correspondence relations, e.g. 0,1,2")
    p.add_argument("--checkpoint-dir")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("thomae", help="level-2 theta constants from five branch points")
    field_opts(p)
    p.add_argument("--roots", required=True)
    p.set_defaults(func=cmd_thomae)

    p = sub.add_parser("invariants", help="Rosenhain, Igusa or j invariants of a theta point")
    field_opts(p)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--theta", help="x or a02, a20, a22 (residue or p-adic elements)")
    grp.add_argument("--roots", help="five branch points of a quintic")
    p.add_argument("--m", type=int, default=None, help="working precision for p-adic input")
    p.add_argument("--rosenhain", choices=("richelot", "same"), default="richelot")
    p.add_argument("--reconstruct", action="store_true")
    p.add_argument("--degree", type=int, default=6)
    p.add_argument("--degree-range")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("reconstruct", help="minimal polynomial of a p-adic element")
    field_opts(p)
    p.add_argument("--element", required=True, help="p^d@m:[c0,...]")
    p.add_argument("--degree", type=int, default=2)
    p.add_argument("--degree-range", help="e.g. 1-8: smallest verified degree wins")
    p.add_argument("--shift", type=int, default=0, help="the number is element / p^shift")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("charpoly", help="Frobenius polynomial of y^2 = f(x) by point counting")
    field_opts(p)
    p.add_argument("--curve", required=True, help="f(x) with integer coefficients")
    p.set_defaults(func=cmd_charpoly)

    p = sub.add_parser("pipeline", help="run lift, invariants and reconstruction from a config")
    p.add_argument("--config")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config entry")
    p.add_argument("--format", choices=("json", "text"))
    p.add_argument("--output")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_pipeline)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ThetaLiftError as exc:
        where = exc.stage or "?"
        print(f"error [{where}] {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.code
    return 0


if __name__ == "__main__":
    sys.exit(main())
