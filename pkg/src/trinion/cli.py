"""Command-line entry point: ``trinion <group> <command> [options]``.

Every command prints one JSON document to stdout::

    {"schema": ..., "command": [...], "input": {...}, "output": ...,
     "certificates": [{"name": ..., "passed": ...}, ...], "status": "ok" | "error"}

Exit status is 0 on success, 1 on invalid input and 2 when a numerical
solve does not converge.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction

import numpy as np

from . import betti, checks, cone, higgs, integral, surface, tzitzeica
from .errors import NonConvergenceError, TrinionError
from .exact import GaussianRational, Matrix, format_scalar, parse_gaussian, unipotency_index

SCHEMA = "trinion.result/1"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # let values such as -1/2 and -5..40 through as arguments
        self._negative_number_matcher = re.compile(r"^-\d")

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _cert(name, passed, value=None):
    out = {"name": name, "passed": bool(passed)}
    if value is not None:
        out["value"] = value
    return out


def _rationals(tokens, count=None):
    values = [Fraction(v) for tok in tokens for v in tok.replace(",", " ").split()]
    if count is not None and len(values) != count:
        raise UsageError(f"expected {count} rational entries, got {len(values)}")
    return values


def _range(text):
    lo, sep, hi = text.partition("..")
    if not sep:
        raise UsageError(f"range must look like a..b, got {text!r}")
    return int(lo), int(hi)


def _point(args):
    return surface.CharacterPoint.parse(args.point, numeric=args.numeric)


def _scalar_json(v):
    return format_scalar(v) if isinstance(v, (Fraction, GaussianRational)) else float(v)


# ---------------------------------------------------------------------------
# surface

def cmd_surface_eval(args):
    p = _point(args)
    value = surface.lawton_eval(p)
    cert = [_cert("on_surface", surface.on_surface(p), _scalar_json(value))]
    if not p.exact:
        cert.append(_cert("tolerance", True, surface.surface_tolerance(p)))
    return {"point": p.to_json()}, {"P": _scalar_json(value)}, cert


def cmd_surface_param(args):
    pp = surface.ParamPoint(Fraction(args.s), Fraction(args.t))
    p = surface.psi(pp)
    return ({"s": str(pp.s), "t": str(pp.t)}, {"point": p.to_json()},
            [_cert("on_surface", surface.on_surface(p))])


def cmd_surface_solve_z(args):
    conv = float if args.numeric else Fraction
    x, y = conv(args.x), conv(args.y)
    roots = surface.solve_z(x, y)
    cert = [_cert(f"P(x,y,{_scalar_json(z)})=0", surface.on_surface(surface.CharacterPoint(x, y, z)))
            for z in roots]
    cert.append(_cert("root_count", True, len(roots)))
    return ({"x": _scalar_json(x), "y": _scalar_json(y)},
            {"roots": [_scalar_json(z) for z in roots]}, cert)


def cmd_surface_classify(args):
    p = _point(args)
    label = surface.classify_component(p)
    return {"point": p.to_json()}, {"component": label.value}, [_cert("on_surface", True)]


# ---------------------------------------------------------------------------
# representations

def _pair_certs(pair):
    certs = [_cert(f"{name} unipotent index", True, unipotency_index(g))
             for name, g in zip(("a1", "a2", "a3"), pair.generators())]
    chi = betti.character_map(pair)
    certs.append(_cert("character on surface", surface.on_surface(chi)))
    return certs


def _pair_from_args(args):
    a1 = Matrix.from_flat(_rationals(args.a1, 9), 3)
    a2 = Matrix.from_flat(_rationals(args.a2, 9), 3)
    return betti.RepPair(a1, a2)


def cmd_rep_char(args):
    pair = _pair_from_args(args)
    chi = betti.character_map(pair)
    return ({"a1": pair.a1.to_json(), "a2": pair.a2.to_json()},
            {"character": chi.to_json(), "irreducible": betti.is_irreducible(pair),
             "integral": betti.is_integral(pair)},
            _pair_certs(pair))


def cmd_rep_invert(args):
    p = surface.CharacterPoint.parse(args.point)
    pair = betti.invert_character(p)
    certs = _pair_certs(pair)
    certs.append(_cert("round trip", betti.character_map(pair) == p))
    out = pair.to_json()
    out["integral"] = betti.is_integral(pair)
    return {"point": p.to_json()}, out, certs


def cmd_rep_normalize(args):
    if args.a1 is None and args.a2 is None:
        pair = betti.uniformization_rep()
    elif args.a1 is None or args.a2 is None:
        raise UsageError("give both --a1 and --a2, or neither for the uniformization pair")
    else:
        pair = _pair_from_args(args)
    nf = betti.normalize_pair(pair)
    g = nf.conjugator
    gi = g.inverse()
    certs = [
        _cert("g^-1 a1 g = normal a1", gi @ pair.a1 @ g == nf.pair.a1),
        _cert("g^-1 a2 g = normal a2", gi @ pair.a2 @ g == nf.pair.a2),
        _cert("character preserved", betti.character_map(nf.pair) == betti.character_map(pair)),
        _cert("det g", True, format_scalar(g.det())),
    ]
    return {"a1": pair.a1.to_json(), "a2": pair.a2.to_json()}, nf.to_json(), certs


def cmd_rep_uniformization(args):
    pair = betti.uniformization_rep()
    chi = betti.character_map(pair)
    certs = _pair_certs(pair)
    certs.append(_cert("a3 matches printed gamma3", pair.a3 == betti.UNIFORMIZATION_GAMMA3))
    certs.append(_cert("character (35,35,323)", chi == surface.CharacterPoint(35, 35, 323)))
    out = pair.to_json()
    out["character"] = chi.to_json()
    out["integral"] = betti.is_integral(pair)
    return {}, out, certs


def cmd_rep_sym2(args):
    m = Matrix.from_flat(_rationals(args.m, 4), 2)
    s = betti.sym_square(m)
    return ({"m": m.to_json()}, {"sym2": s.to_json()},
            [_cert("det 1", s.det() == 1)])


# ---------------------------------------------------------------------------
# integral points

def _witness_certs(w):
    certs = [_cert(f"{name} unipotent index", True, unipotency_index(g))
             for name, g in zip(("a1", "a2", "a3"), w.rep.generators())]
    certs += [_cert("integral", betti.is_integral(w.rep)),
              _cert("character on surface", surface.on_surface(w.character)),
              _cert("component", True, w.component.value)]
    return certs


def cmd_integral_c1(args):
    w = integral.c1_family(args.n)
    certs = _witness_certs(w)
    certs.append(_cert("character = Psi(n, n^2)",
                       w.character == surface.psi(surface.ParamPoint(args.n, args.n ** 2))))
    return {"n": args.n}, w.to_json(), certs


def cmd_integral_c2(args):
    if (args.n is None) == (args.triple is None):
        raise UsageError("give exactly one of --n or --triple")
    if args.n is not None:
        t = integral.hitchin_recursion(args.n, allow_large=args.allow_large)
        inp = {"n": args.n}
    else:
        k, l, m = (int(v) for v in args.triple.split(","))
        t = integral.DiophantineTriple(k, l, m)
        inp = {"triple": [k, l, m]}
    w = integral.c2_rep(t)
    certs = _witness_certs(w)
    certs.append(_cert("(3k+l+3)^2 = m(kl-k^3-1)", integral.verify_diophantine(t.k, t.l, t.m)))
    certs.append(_cert("x >= 9 and y >= 9", w.character.x >= 9 and w.character.y >= 9))
    return inp, w.to_json(), certs


def cmd_integral_scan(args):
    xr, yr = _range(args.x), _range(args.y)
    found = integral.scan_integer_points(xr, yr, workers=args.threads)
    rows = [{"point": p.to_json(), "component": c.value} for p, c in found]
    certs = [_cert("all on surface", all(surface.on_surface(p) for p, _ in found)),
             _cert("count", True, len(found))]
    if args.csv:
        table = integral.rows_to_csv(integral.table_rows([p for p, _ in found]))
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(table)
        certs.append(_cert("csv written", True, args.csv))
    return {"x": list(xr), "y": list(yr)}, rows, certs


# ---------------------------------------------------------------------------
# Higgs fields

def _family_from_args(args):
    kw = {}
    for name in ("alpha", "beta", "xi", "q"):
        v = getattr(args, name)
        if v is not None:
            kw[name] = parse_gaussian(v)
    return higgs.HiggsFamily(higgs.FamilyType.parse(args.type), **kw)


def cmd_higgs_family(args):
    fam = _family_from_args(args)
    d = higgs.build_family(fam)
    reports = higgs.check_nilpotency(d)
    certs = [_cert(f"r{i + 1} nilpotent", rep.nilpotent, rep.index) for i, rep in enumerate(reports)]
    if d.global_frame:
        certs.append(_cert("r1 + r2 + r3 = 0", d.sum_is_zero()))
    out = d.to_json()
    if d.global_frame:
        out["kernel_configuration"] = higgs.kernel_configuration(d) if all(
            r.maximal for r in reports) else None
    return {"family": fam.family.value, "params": fam.params_json()}, out, certs


def cmd_higgs_real_check(args):
    fam = _family_from_args(args)
    d = higgs.build_family(fam)
    space = higgs.intertwiner_space(d)
    g = higgs.real_criterion(d, seed=args.seed)
    certs = [_cert("solution space dimension", True, len(space))]
    if g is not None:
        certs.append(_cert("g r_i = r_i^T g", all((g @ r - r.transpose() @ g).is_zero()
                                                   for r in d.residues())))
        certs.append(_cert("det g", True, format_scalar(g.det())))
    return ({"family": fam.family.value, "params": fam.params_json(), "seed": args.seed},
            {"real": g is not None, "g": None if g is None else g.to_json()}, certs)


# ---------------------------------------------------------------------------
# Tzitzeica

def cmd_tzitzeica_solve(args):
    p = tzitzeica.TzitzeicaProblem(args.background, args.q_sq, args.radius, args.grid,
                                   args.boundary, H=args.H)
    sol = tzitzeica.solve(p, tol=args.tol, max_iters=args.max_iters)
    factor = tzitzeica.blaschke_metric(sol, p)
    u = sol.u
    out = {"residual_inf": sol.residual_inf, "newton_iters": sol.newton_iters,
           "u_min": float(np.nanmin(u)), "u_max": float(np.nanmax(u)),
           "u_center": float(u[args.grid // 2, args.grid // 2]),
           "blaschke_min": float(np.nanmin(factor)), "blaschke_max": float(np.nanmax(factor))}
    certs = [_cert("residual < tol", sol.residual_inf < args.tol, sol.residual_inf),
             _cert("blaschke factor positive", bool(np.nanmin(factor) > 0))]
    if args.csv:
        x = -args.radius + (2 * args.radius / (args.grid - 1)) * np.arange(args.grid)
        X, Y = np.meshgrid(x, x, indexing="ij")
        keep = ~np.isnan(u)
        data = np.column_stack([X[keep], Y[keep], u[keep], factor[keep]])
        np.savetxt(args.csv, data, delimiter=",", header="x,y,u,blaschke", comments="", fmt="%.17g")
        certs.append(_cert("csv written", True, args.csv))
    inp = {"background": args.background, "q_sq": args.q_sq, "radius": args.radius,
           "grid": args.grid, "boundary": args.boundary, "tol": args.tol}
    return inp, out, certs


# ---------------------------------------------------------------------------
# cone

def cmd_cone_verify(args):
    rs = np.linspace(0.01, 0.99, args.r_samples)
    worst_ma = worst_d2 = 0.0
    for r in rs:
        c = cone.ConeGeometry(args.n, args.H, float(r))
        worst_ma = max(worst_ma, cone.verify_monge_ampere(c))
        worst_d2 = max(worst_d2, abs(cone.central_second_difference(c) / cone.phi_second(c) - 1))
    certs = [_cert("MA residual < 1e-12", worst_ma < 1e-12, worst_ma),
             _cert("convexity finite difference < 1e-6", worst_d2 < 1e-6, worst_d2)]
    return ({"n": args.n, "H": args.H, "r_samples": args.r_samples},
            {"max_ma_residual": worst_ma, "max_second_difference_rel_err": worst_d2}, certs)


def cmd_cone_potential(args):
    c = cone.ConeGeometry(args.n, args.H, args.r)
    c_rr, c_base = cone.ma_metric_coeffs(c)
    residual = cone.verify_monge_ampere(c)
    return ({"n": args.n, "H": args.H, "r": args.r},
            {"phi": cone.phi(c), "phi_prime": cone.phi_prime(c), "c_rr": c_rr, "c_base": c_base},
            [_cert("MA residual < 1e-12", residual < 1e-12, residual)])


def cmd_cone_semiflat(args):
    vals = [float(v) for tok in args.base for v in tok.replace(",", " ").split()]
    n = int(round(len(vals) ** 0.5))
    if n * n != len(vals):
        raise UsageError("--base needs n^2 numbers")
    sample = cone.semiflat_assemble(np.array(vals).reshape(n, n))
    defects = sample.invariant_defects()
    certs = [_cert(k, v == 0.0, v) for k, v in defects.items()]
    # adding 0.0 turns -0.0 into 0.0
    return ({"base": vals}, {"g": (sample.g + 0.0).tolist(), "J": (sample.J + 0.0).tolist(),
                              "omega": (sample.omega + 0.0).tolist()}, certs)


# ---------------------------------------------------------------------------

def _strip_timing(obj):
    if isinstance(obj, dict):
        return {k: _strip_timing(v) for k, v in obj.items() if "seconds" not in str(k)}
    if isinstance(obj, list):
        return [_strip_timing(v) for v in obj]
    return obj


def cmd_verify_all(args):
    results = checks.run_all(seed=args.seed)
    for r in results:
        print(r.line(), file=sys.stderr)
    table = [_strip_timing(r.to_json()) for r in results]
    return {}, table, [_cert(f"criterion {r.number}", r.passed) for r in results]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="trinion", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized searches")
    parser.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker processes for parallel scans")
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    g = groups.add_parser("surface", help="Lawton cubic surface")
    sub = g.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    for name, fn, helptext in (("eval", cmd_surface_eval, "evaluate P at a point"),
                               ("classify", cmd_surface_classify, "real component of a point")):
        c = sub.add_parser(name, help=helptext)
        c.add_argument("--point", required=True, help="x,y,z")
        c.add_argument("--numeric", action="store_true", help="use floating point")
        c.set_defaults(func=fn)
    c = sub.add_parser("param", help="rational parameterization Psi(s, t)")
    c.add_argument("--s", required=True)
    c.add_argument("--t", required=True)
    c.set_defaults(func=cmd_surface_param)
    c = sub.add_parser("solve-z", help="roots of P(x, y, z) in z")
    c.add_argument("--x", required=True)
    c.add_argument("--y", required=True)
    c.add_argument("--numeric", action="store_true")
    c.set_defaults(func=cmd_surface_solve_z)

    g = groups.add_parser("rep", help="representations")
    sub = g.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    c = sub.add_parser("char", help="character of a pair")
    c.add_argument("--a1", nargs="+", required=True, help="9 rationals, row-major")
    c.add_argument("--a2", nargs="+", required=True)
    c.set_defaults(func=cmd_rep_char)
    c = sub.add_parser("invert", help="pair with a given character")
    c.add_argument("--point", required=True)
    c.set_defaults(func=cmd_rep_invert)
    c = sub.add_parser("normalize", help="normal form and conjugator")
    c.add_argument("--a1", nargs="+")
    c.add_argument("--a2", nargs="+")
    c.set_defaults(func=cmd_rep_normalize)
    c = sub.add_parser("uniformization", help="the integral uniformization pair")
    c.set_defaults(func=cmd_rep_uniformization)
    c = sub.add_parser("sym2", help="symmetric square of a 2x2 matrix")
    c.add_argument("--m", nargs="+", required=True, help="4 rationals, row-major")
    c.set_defaults(func=cmd_rep_sym2)

    g = groups.add_parser("integral", help="integral representations and points")
    sub = g.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    c = sub.add_parser("c1", help="C1 family member")
    c.add_argument("--n", type=int, required=True)
    c.set_defaults(func=cmd_integral_c1)
    c = sub.add_parser("c2", help="C2 family member")
    c.add_argument("--n", type=int)
    c.add_argument("--triple", help="k,l,m")
    c.add_argument("--allow-large", action="store_true", help=f"allow n > {integral.DEFAULT_MAX_INDEX}")
    c.set_defaults(func=cmd_integral_c2)
    c = sub.add_parser("scan", help="integer points in a box")
    c.add_argument("--x", required=True, help="a..b")
    c.add_argument("--y", required=True, help="c..d")
    c.add_argument("--csv", help="write a table to this path")
    c.set_defaults(func=cmd_integral_scan)

    g = groups.add_parser("higgs", help="Higgs field residues")
    sub = g.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    for name, fn in (("family", cmd_higgs_family), ("real-check", cmd_higgs_real_check)):
        c = sub.add_parser(name)
        c.add_argument("--type", required=True, help="cyclicQ, genI, genII, genIII or genIV")
        c.add_argument("--alpha")
        c.add_argument("--beta")
        c.add_argument("--xi")
        c.add_argument("--q")
        c.set_defaults(func=fn)

    g = groups.add_parser("tzitzeica", help="Tzitzeica equation on a disk")
    sub = g.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    c = sub.add_parser("solve")
    c.add_argument("--background", default="flat",
                   help="flat (alias FlatLocal) or hyperbolic (alias HyperbolicDisk)")
    c.add_argument("--q-sq", type=float, default=0.0, help="|Q|^2, constant")
    c.add_argument("--radius", type=float, default=1.0)
    c.add_argument("--grid", type=int, default=65)
    c.add_argument("--boundary", type=float, default=0.0)
    c.add_argument("--tol", type=float, default=1e-10)
    c.add_argument("--max-iters", type=int, default=50)
    c.add_argument("--H", type=int, default=1)
    c.add_argument("--csv", help="write x,y,u,blaschke rows to this path")
    c.set_defaults(func=cmd_tzitzeica_solve)

    g = groups.add_parser("cone", help="Monge-Ampere cone metric")
    sub = g.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    c = sub.add_parser("verify")
    c.add_argument("--n", type=int, default=2)
    c.add_argument("--H", type=int, default=1)
    c.add_argument("--r-samples", type=int, default=100)
    c.set_defaults(func=cmd_cone_verify)
    c = sub.add_parser("potential")
    c.add_argument("--r", type=float, required=True)
    c.add_argument("--n", type=int, default=2)
    c.add_argument("--H", type=int, default=1)
    c.set_defaults(func=cmd_cone_potential)
    c = sub.add_parser("semiflat")
    c.add_argument("--base", nargs="+", required=True, help="n^2 numbers, row-major")
    c.set_defaults(func=cmd_cone_semiflat)

    g = groups.add_parser("verify-all", help="run every acceptance check")
    g.set_defaults(func=cmd_verify_all)
    return parser


def _emit(doc):
    sys.stdout.write(json.dumps(doc, indent=2, sort_keys=False) + "\n")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(str(exc))
        return 1
    doc = {"schema": SCHEMA, "command": argv}
    try:
        inp, out, certs = args.func(args)
    except NonConvergenceError as exc:
        doc.update(input={}, output={"error": str(exc), "residual": exc.residual},
                   certificates=[_cert("converged", False, exc.residual)], status="nonconvergence")
        _emit(doc)
        return 2
    except UsageError as exc:
        sys.stderr.write(str(exc) + "\n")
        return 1
    except (TrinionError, ValueError, ZeroDivisionError) as exc:
        doc.update(input={}, output={"error": f"{type(exc).__name__}: {exc}"},
                   certificates=[_cert("valid input", False)], status="error")
        _emit(doc)
        return 1
    doc.update(input=inp, output=out, certificates=certs,
               status="ok" if all(c["passed"] for c in certs) else "failed")
    _emit(doc)
    return 0 if doc["status"] == "ok" else 1


if __name__ == "__main__":
    sys.exit(main())
