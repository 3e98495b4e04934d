"""End-to-end acceptance checks, shared by ``trinion verify-all`` and the test suite."""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import betti, cone, higgs, integral, surface, tzitzeica
from .exact import GaussianRational, is_unipotent, unipotency_index

__all__ = ["CriterionResult", "CRITERIA", "run_criterion", "run_all", "random_param_points"]


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d}. {self.title} ({self.seconds:.3f}s)"

    def to_json(self):
        return {"number": self.number, "title": self.title, "passed": self.passed,
                "seconds": round(self.seconds, 6), "details": self.details}


def _timed(number, title, fn, **kw):
    t0 = time.perf_counter()
    passed, details = fn(**kw)
    return CriterionResult(number, title, bool(passed), details, time.perf_counter() - t0)


def surface_identities():
    points = [(3, 3, 3), (35, 35, 323), (35, 99, 643), (93, 129, 327)]
    cps = [surface.CharacterPoint(*p) for p in points]
    values = [surface.lawton_eval(p) for p in cps]
    # best of several repetitions, so scheduler noise does not dominate
    best = math.inf
    for _ in range(20):
        t0 = time.perf_counter()
        for p in cps:
            surface.lawton_eval(p)
        best = min(best, time.perf_counter() - t0)
    ok = all(v == 0 for v in values) and best < 1e-3
    return ok, {"values": [str(v) for v in values], "eval_seconds": best}


def table_reproduction():
    cases = {(Fraction(3), Fraction(20)): (35, 99, 643),
             (Fraction(7, 5), Fraction(18, 5)): (93, 129, 327)}
    got = {f"{s},{t}": surface.psi(surface.ParamPoint(s, t)).to_json() for s, t in cases}
    exact = all(surface.psi(surface.ParamPoint(s, t)) == surface.CharacterPoint(*xyz)
                for (s, t), xyz in cases.items())
    row = surface.psi(surface.ParamPoint(1, 3))
    printed = surface.CharacterPoint(84, 84, 256)
    details = {
        "psi": got,
        "row_1_3": {
            "psi": row.to_json(),
            "printed": printed.to_json(),
            "psi_on_surface": surface.on_surface(row),
            "printed_on_surface": surface.on_surface(printed),
            "P_printed": str(surface.lawton_eval(printed)),
            "note": "z = 246 lies on the surface; the printed z = 256 does not",
        },
    }
    ok = (exact and row == surface.CharacterPoint(84, 84, 246) and surface.on_surface(row)
          and not surface.on_surface(printed))
    return ok, details


def uniformization_character():
    r = betti.uniformization_rep()
    chi = betti.character_map(r)
    indices = [unipotency_index(g) for g in r.generators()]
    gamma3_ok = (r.a2 @ r.a1).inverse() == betti.UNIFORMIZATION_GAMMA3
    ok = chi == surface.CharacterPoint(35, 35, 323) and indices == [3, 3, 3] and gamma3_ok
    return ok, {"character": chi.to_json(), "indices": indices, "gamma3_matches": gamma3_ok}


def sym_square_consistency():
    u1, u2 = betti.level2_generators()
    pair = betti.RepPair(betti.sym_square(u1), betti.sym_square(u2))
    chi = betti.character_map(pair)
    rho0 = betti.character_map(betti.uniformization_rep())
    ok = chi == rho0 == surface.CharacterPoint(35, 35, 323) and betti.is_irreducible(pair)
    return ok, {"character": chi.to_json(), "a1": pair.a1.to_json(), "a2": pair.a2.to_json()}


def random_param_points(count: int, seed: int = 0):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        s = Fraction(rng.randint(-40, 40), rng.randint(1, 12))
        t = Fraction(rng.randint(-40, 40), rng.randint(1, 12))
        if s * t - s ** 3 - 1 != 0:
            out.append(surface.ParamPoint(s, t))
    return out


def inverse_round_trip(count: int = 250, seed: int = 0):
    params = random_param_points(count, seed)
    t0 = time.perf_counter()
    failures = []
    for p in params:
        chi = surface.psi(p)
        pair = betti.invert_character(chi)
        if betti.character_map(pair) != chi or not all(is_unipotent(g) for g in pair.generators()):
            failures.append([str(p.s), str(p.t)])
    elapsed = time.perf_counter() - t0
    ok = not failures and count >= 200 and elapsed < 5.0
    return ok, {"count": count, "seconds": elapsed, "failures": failures}


def diophantine_family():
    rows, ok = [], True
    for n in range(1, 9):
        t = integral.hitchin_recursion(n)
        w = integral.c2_rep(t)
        chi = w.character
        good = (integral.verify_diophantine(t.k, t.l, t.m)
                and all(g.is_integral() and g.det() == 1 and unipotency_index(g) == 3
                        for g in w.rep.generators())
                and chi.x >= 9 and chi.y >= 9
                and w.component is surface.ComponentLabel.C2)
        ok &= good
        rows.append({"n": n, "triple": [t.k, t.l, t.m], "ok": good})
    t1, t2 = integral.hitchin_recursion(1), integral.hitchin_recursion(2)
    anchors = ((t1.k, t1.l, t1.m) == (2, 5, 196) and (t2.k, t2.l, t2.m) == (41, 1683, 40401)
               and 1809 ** 2 == 40401 * 81 == (3 * 41 + 1683 + 3) ** 2)
    u = [integral.RecursionState.at(i).u_curr for i in range(5)]
    anchors &= u == [1, 2, 41, 937, 21506]
    return ok and anchors, {"rows": rows, "u": u}


def c1_family_check():
    chars, ok = {}, True
    for n in range(-10, 11):
        w = integral.c1_family(n)
        chi = w.character
        good = (betti.is_integral(w.rep)
                and all(unipotency_index(g) == 3 for g in w.rep.generators())
                and chi == surface.psi(surface.ParamPoint(n, n * n))
                and w.component is surface.ComponentLabel.C1)
        ok &= good
        chars[n] = chi
    nonneg = [chars[n] for n in range(0, 11)]
    distinct = len(set(nonneg)) == len(nonneg)
    return ok and distinct, {"distinct_nonnegative": distinct,
                             "characters": {n: c.to_json() for n, c in chars.items()}}


HIGGS_ALPHAS = (1, -1, 2, -2, 3)
HIGGS_BETAS = (Fraction(-1, 2), Fraction(-1, 2) + Fraction(1, 100), Fraction(-1, 2) - Fraction(1, 100),
               Fraction(-1, 2) + Fraction(1, 7), Fraction(1), Fraction(-2), Fraction(1, 3))
HIGGS_XIS = (1, -1, 2, GaussianRational(0, 1))


def higgs_real_criterion(seed: int = 0):
    records, ok = [], True
    instances = [higgs.HiggsFamily("GenI", alpha=a, beta=b) for a in HIGGS_ALPHAS for b in HIGGS_BETAS]
    instances += [higgs.HiggsFamily(f, xi=x) for f in ("GenII", "GenIII", "GenIV") for x in HIGGS_XIS]
    for fam in instances:
        d = higgs.build_family(fam)
        g = higgs.real_criterion(d, seed=seed)
        expected = fam.family is higgs.FamilyType.GEN_I and fam.beta == Fraction(-1, 2)
        good = (g is not None) == expected
        if g is not None:
            good &= all((g @ r - r.transpose() @ g).is_zero() for r in d.residues())
            good &= g.det() == 1
        ok &= good
        records.append({"family": fam.family.value, "params": fam.params_json(),
                        "g": None if g is None else g.to_json(), "ok": good})
    return ok, {"instances": len(records), "successes": [r for r in records if r["g"]],
                "mismatches": [r for r in records if not r["ok"]]}


def _liouville_errors(grids=(33, 65, 129)):
    errs = []
    for n in grids:
        p = tzitzeica.TzitzeicaProblem(
            "flat", 0.0, 1.0, n,
            lambda r, th: tzitzeica.liouville_solution(r * np.cos(th), r * np.sin(th)))
        sol = tzitzeica.solve(p, tol=1e-10)
        x = np.linspace(-1.0, 1.0, n)
        X, Y = np.meshgrid(x, x, indexing="ij")
        errs.append(float(np.nanmax(np.abs(sol.u - tzitzeica.liouville_solution(X, Y)))))
    return errs


def _rotation_identical():
    def q(x, y):
        return (0.2 + 0.1 * x) + 1j * (0.05 - 0.15 * y)

    base = tzitzeica.solve(tzitzeica.TzitzeicaProblem.from_cubic_differential(q, grid_n=33, boundary=0.0))
    same = {}
    # multiplication by these units is exact in floating point
    for name, unit in (("pi/2", 1j), ("pi", -1.0), ("3pi/2", -1j)):
        rotated = tzitzeica.TzitzeicaProblem.from_cubic_differential(
            lambda x, y, u=unit: u * q(x, y), grid_n=33, boundary=0.0)
        same[name] = bool(np.array_equal(tzitzeica.solve(rotated).u, base.u, equal_nan=True))
    return same


def tzitzeica_oracles():
    t0 = time.perf_counter()
    sol = tzitzeica.solve(tzitzeica.TzitzeicaProblem("flat", 1 / 16, 1.0, 65, 0.0))
    elapsed = time.perf_counter() - t0
    max_u = float(np.nanmax(np.abs(sol.u)))
    start = tzitzeica.solve(tzitzeica.TzitzeicaProblem("flat", 1 / 16, 1.0, 65, 0.0), initial=0.5)
    errs = _liouville_errors()
    rates = [math.log2(errs[i] / errs[i + 1]) for i in range(len(errs) - 1)]
    same = _rotation_identical()
    ok = (max_u < 1e-8 and sol.newton_iters < 30 and elapsed < 10
          and float(np.nanmax(np.abs(start.u))) < 1e-8 and start.newton_iters < 30
          and all(1.8 <= r <= 2.2 for r in rates) and all(same.values()))
    return ok, {"max_abs_u": max_u, "newton_iters": sol.newton_iters, "seconds": elapsed,
                "perturbed_start_iters": start.newton_iters, "liouville_errors": errs,
                "rates": rates, "rotation_bit_identical": same}


def monge_ampere_identity(samples: int = 100):
    worst_ma = worst_d1 = worst_d2 = 0.0
    convex = True
    rs = np.linspace(0.01, 0.99, samples)
    for n in (1, 2, 3):
        for H in (1, -1):
            for r in rs:
                c = cone.ConeGeometry(n, H, float(r))
                worst_ma = max(worst_ma, cone.verify_monge_ampere(c))
                d2 = cone.central_second_difference(c)
                convex &= d2 > 0 and cone.phi_second(c) > 0
                worst_d2 = max(worst_d2, abs(d2 / cone.phi_second(c) - 1))
                worst_d1 = max(worst_d1, abs(cone.central_first_difference(c) / cone.phi_prime(c) - 1))
    ok = worst_ma < 1e-12 and worst_d1 < 1e-6 and worst_d2 < 1e-6 and convex
    return ok, {"max_ma_residual": worst_ma, "max_first_derivative_rel_err": worst_d1,
                "max_second_derivative_rel_err": worst_d2, "convex": convex, "samples": samples}


CRITERIA = (
    (1, "exact surface identities", surface_identities),
    (2, "parameterization reproduces the table", table_reproduction),
    (3, "uniformization character", uniformization_character),
    (4, "symmetric square consistency", sym_square_consistency),
    (5, "inverse character round trip", inverse_round_trip),
    (6, "Diophantine C2 family", diophantine_family),
    (7, "C1 family", c1_family_check),
    (8, "Higgs real criterion", higgs_real_criterion),
    (9, "Tzitzeica oracles", tzitzeica_oracles),
    (10, "Monge-Ampere identity", monge_ampere_identity),
)


_SEEDED = (5, 8)


def run_criterion(number: int, seed: int = 0) -> CriterionResult:
    _, title, fn = CRITERIA[number - 1]
    kw = {"seed": seed} if number in _SEEDED else {}
    return _timed(number, title, fn, **kw)


def run_all(seed: int = 0):
    return [run_criterion(number, seed) for number, _, _ in CRITERIA]
