"""Acceptance suite: thirteen criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are printed even
under output capture) or directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import os
import random
import sys
from fractions import Fraction

import pytest
from scipy.optimize import minimize_scalar

sys.path.insert(0, os.path.dirname(__file__))

from helpers import nudged_seed  # noqa: E402
from wallach_flow.boundary import (  # noqa: E402
    HIGH, LOW, angle_alpha, curve_point, field_normal_product, intersection_point, phi_psi,
    t_markers,
)
from wallach_flow.catalog import corollary_table, instantiate  # noqa: E402
from wallach_flow.classify import (  # noqa: E402
    ALL_PRESERVED, SOME_LOSE, SOME_PRESERVED, X_Y, condition_witness, preserving_pairs,
    so_family_classify, so_params, theta_star, verdict,
)
from wallach_flow.core import GwsParams, theta_threshold  # noqa: E402
from wallach_flow.flow import ENTER, EXIT, TOUCH, integrate, sample_region  # noqa: E402
from wallach_flow.signpoly import (  # noqa: E402
    NO_EXIT, TOUCH_ONLY, crossing_scenario, roots_h,
)

DEC = 1e-3
CLOSED = 1e-9


class Criterion:
    def __init__(self):
        self.failures = []
        self.notes = []

    def close(self, name, measured, expected, tol):
        err = abs(float(measured) - float(expected))
        if not err <= tol:
            self.failures.append(f"{name}: measured {float(measured):.10g}, "
                                 f"expected {expected} (err {err:.3g} > tol {tol:g})")

    def true(self, name, cond, detail=""):
        if not cond:
            self.failures.append(f"{name} {detail}".strip())


def report(number: int, title: str, c: Criterion) -> None:
    status = "PASS" if not c.failures else "FAIL"
    extra = ""
    if c.failures:
        extra = " | " + "; ".join(c.failures)
    elif c.notes:
        extra = " | " + "; ".join(c.notes)
    line = f"[acceptance] {status} criterion {number:2d}: {title}{extra}"
    capman = _CAPTURE.get("capsys")
    if capman is not None:
        with capman.disabled():
            print(line)
    else:
        print(line)
    assert not c.failures, "; ".join(c.failures)


_CAPTURE: dict = {}


@pytest.fixture(autouse=True)
def _expose_capsys(capsys):
    _CAPTURE["capsys"] = capsys
    yield
    _CAPTURE.pop("capsys", None)


def _geom(lo, hi, n):
    return [lo * (hi / lo) ** (q / (n - 1)) for q in range(n)]


# ---------------------------------------------------------------------------

def test_c01_table3():
    c = Criterion()
    ref = {12: (5, 10), 13: (3.96, 15.29), 14: (3.51, 20.49), 15: (3.25, 26),
           16: (3.07, 31.93), 17: (2.94, 38.31)}
    for k, (x, y) in ref.items():
        X, Y = X_Y(k)
        c.close(f"X({k})", X, x, 0.005)
        c.close(f"Y({k})", Y, y, 0.005)
    report(1, "Table 3, X(k) and Y(k) for k = 12..17 within 0.005", c)


def test_c02_tables_4_5():
    c = Criterion()
    table4 = {12: {(4, 1), (1, 4), (3, 2), (2, 3), (3, 1), (1, 3), (2, 2), (2, 1), (1, 2)},
              13: {(2, 1), (1, 2)}, 14: {(2, 1), (1, 2)}, 15: {(2, 1), (1, 2)},
              16: {(2, 1), (1, 2)}}
    # Table 5: l + m >= N(k), i.e. every pair on or above the line through Y(k)
    table5 = {12: {(l, m) for l in range(1, 13) for m in range(1, 13) if l + m >= 10},
              13: {(l, m) for l in range(1, 14) for m in range(1, 14) if l + m >= 16},
              14: {(l, m) for l in range(1, 15) for m in range(1, 15) if l + m >= 21},
              15: {(l, m) for l in range(1, 16) for m in range(1, 16) if l + m >= 26},
              16: {(16, 16)}}
    for k in range(12, 41):
        pairs = preserving_pairs(k)
        c.true(f"Table 4 k={k}", set(pairs["X"]) == table4.get(k, set()),
               f"got {sorted(pairs['X'])}")
        c.true(f"Table 5 k={k}", set(pairs["Y"]) == table5.get(k, set()),
               f"got {len(pairs['Y'])} pairs")
    c.notes.append("checked k = 12..40; Y side empty for k >= 17")
    report(2, "Tables 4 and 5, exact set equality", c)


def test_c03_example1_pipeline():
    c = Criterion()
    p = GwsParams(Fraction(5, 26), Fraction(2, 13), Fraction(3, 26))
    a1 = p.a1
    c.true("m1 = 1/5 exact", Fraction(1, 25) - Fraction(1, 5) / a1 + 1 == 0)
    c.true("M1 = 5 exact", 25 - 5 / a1 + 1 == 0)
    gam, dlt = phi_psi(p.a1, p.a3)
    s10 = math.sqrt(10)
    c.close("gamma closed form", gam, (-27 + 9 * s10) / 13, CLOSED)
    c.close("delta closed form", dlt, (50 - 15 * s10) / 13, CLOSED)
    c.close("gamma", gam, 0.1123, DEC)
    c.close("delta", dlt, 0.1974, DEC)
    P13 = intersection_point(p, 1, 3)
    c.close("q0", P13.x[1], 3.4857, DEC)
    c.close("P13 x1", P13.x[0], 0.3916, DEC)
    c.close("P13 x2", P13.x[1], 3.4857, DEC)
    c.close("P13 x3", P13.x[2], 17.4285, DEC)
    c.close("t13 closed form", P13.t, 13 / (50 - 15 * s10), CLOSED)
    c.close("t13", P13.t, 5.0666, DEC)
    sp = roots_h(p, 1)
    c.true("two simple h-roots", [r.multiplicity for r in sp.roots] == [1, 1])
    y0 = sp.roots[0].y
    c.close("y0 closed form", y0, -38 / 13 + 192 / 325 * math.sqrt(235), CLOSED)
    c.close("y0", y0, 6.1332, DEC)
    t1, t2 = sp.roots[0].t, sp.roots[1].t
    c.close("t1", t1, 0.1676, DEC)
    c.close("t2", t2, 5.9656, DEC)
    K2 = curve_point(p, 1, t2)
    for n, ref in enumerate((1.0717, 2.7097, 0.4542)):
        c.close(f"K2 x{n + 1}", K2[n], ref, DEC)
    report(3, "Example 1 pipeline (decimals 1e-3, closed forms 1e-9)", c)


def test_c04_example1_angles():
    c = Criterion()
    p = GwsParams(Fraction(5, 26), Fraction(2, 13), Fraction(3, 26))
    t13 = t_markers(p, 1)[1]
    t2 = roots_h(p, 1).roots[-1].t
    # open intervals: drop the endpoints where alpha is exactly 90 or the corner value
    inc = [angle_alpha(p, 1, t) for t in _geom(t13, t2, 4002)[1:-1]]
    out = [angle_alpha(p, 1, t) for t in _geom(t2, 100 * t2, 20002)[1:-1]]
    c.true("alpha in (73.1, 90) on (t13, t2)", 73.1 < min(inc) and max(inc) < 90.0,
           f"range [{min(inc):.4f}, {max(inc):.4f}]")
    c.true("alpha in (90, 93.4) on (t2, 100 t2)", 90.0 < min(out) and max(out) < 93.4,
           f"range [{min(out):.4f}, {max(out):.4f}]")
    c.true("sup beyond t2 <= 93.41", max(out) <= 93.36 + 0.05, f"sup {max(out):.4f}")
    c.notes.append(f"incoming [{min(inc):.3f}, {max(inc):.3f}], outgoing [{min(out):.3f}, {max(out):.3f}]")
    report(4, "Example 1 angle ranges", c)


def test_c05_threshold_case():
    c = Criterion()
    p = instantiate(1, 12, 3, 2)
    c.true("theta = 1/15 exact", p.theta == Fraction(1, 15))
    w = condition_witness(p, 1)
    c.true("theta = theta1 decided exactly", w.exact and w.tie and w.lhs == w.rhs)
    sp = roots_h(p, 1)
    s17 = math.sqrt(17)
    c.true("two double roots", [r.multiplicity for r in sp.roots] == [2, 2])
    if len(sp.roots) == 2:
        c.close("root (49-9 sqrt17)/32", sp.roots[0].t, (49 - 9 * s17) / 32, CLOSED)
        c.close("root (49+9 sqrt17)/32", sp.roots[1].t, (49 + 9 * s17) / 32, CLOSED)
    c.true("scenario TouchOnly", crossing_scenario(p, 1, HIGH, sp).label == TOUCH_ONLY)
    c.true("verdict AllPreserved", verdict(p).outcome == ALL_PRESERVED)
    report(5, "Boundary case (12,3,2)", c)


def test_c06_case_14_7_4():
    c = Criterion()
    p = instantiate(1, 14, 7, 4)
    c.true("verdict SomePreserved", verdict(p).outcome == SOME_PRESERVED)
    t3, t1, t2, t4 = (r.t for r in roots_h(p, 1).roots)
    t12, t13 = t_markers(p, 1)
    c.true("t3 < t1 < t12", t3 < t1 < t12)
    c.true("t13 < t2 < t4", t13 < t2 < t4)
    for name, v, ref in (("t3", t3, 0.15), ("t1", t1, 0.2532), ("t12", t12, 0.3321),
                         ("t13", t13, 2.9665), ("t2", t2, 3.9488), ("t4", t4, 6.6663)):
        c.close(name, v, ref, DEC)
    report(6, "Case (14,7,4), roots and markers", c)


def test_c07_case_15_14_13():
    c = Criterion()
    p = instantiate(1, 15, 14, 13)
    for i, ref in zip((1, 2, 3), (0.0246, 0.0219, 0.0194)):
        c.true(f"no h-roots for i={i}", roots_h(p, i).roots == [])
        c.close(f"theta{i}", p.theta_i(i), ref, DEC)
    c.true("verdict AllPreserved", verdict(p).outcome == ALL_PRESERVED)
    report(7, "Case (15,14,13)", c)


def test_c08_corollary():
    c = Criterion()
    table = corollary_table(bound=20)
    for fid in (2, 3, 5, 7, 15):
        c.true(f"family {fid} SomeLose", table[fid].outcome == SOME_LOSE, table[fid].outcome)
    for fid in (4, 6, 8, 9, 10, 11, 12, 13, 14):
        c.true(f"family {fid} AllPreserved", table[fid].outcome == ALL_PRESERVED,
               table[fid].outcome)
    c.notes.append("family 1 is split by its thresholds: " + str(dict(table[1].counts)))
    report(8, "Corollary table over parameter grids (bound 20)", c)


def test_c09_theta_star():
    c = Criterion()
    a, th = theta_star()
    c.close("a*", a, 0.4196433778, 1e-6)
    c.close("theta*", th, 0.067442248, 1e-6)
    res = minimize_scalar(lambda x: -theta_threshold(x), bounds=(1e-6, 0.5 - 1e-9),
                          method="bounded", options={"xatol": 1e-12})
    c.close("a* vs bounded maximization", a, res.x, 1e-6)
    c.close("theta* vs bounded maximization", th, -res.fun, 1e-9)
    report(9, "theta* extremum", c)


# --- properties -------------------------------------------------------------

def _random_params(rng, want=None, tries=10_000):
    for _ in range(tries):
        p = GwsParams(*(Fraction(rng.randint(1, 199), 400) for _ in range(3)))
        if want is None or verdict(p).outcome == want:
            return p
    raise RuntimeError(f"no {want} triple found")


def test_c10_first_integral():
    c = Criterion()
    rng = random.Random(20240610)
    worst = 0.0
    kinds = [SOME_LOSE, SOME_PRESERVED, ALL_PRESERVED]
    for n in range(100):
        p = _random_params(rng, kinds[n % 3])
        x0 = sample_region(p, 1, rng)[0]
        tr = integrate(p, x0, 50.0)
        worst = max(worst, tr.max_volume_drift())
    c.true("max relative drift <= 1e-6", worst <= 1e-6, f"worst {worst:.3g}")
    c.notes.append(f"worst drift {worst:.3g}")
    report(10, "Vol is conserved over 100 random trajectories, horizon 50", c)


def test_c11_sign_oracle():
    c = Criterion()
    rng = random.Random(7)
    mismatches = checked = skipped = 0
    while checked + skipped < 10_000:
        p = GwsParams(*(rng.uniform(0.01, 0.49) for _ in range(3)))
        i = rng.randint(1, 3)
        t = math.exp(rng.uniform(-math.log(1e3), math.log(1e3)))
        if p.m(i) <= t <= p.M(i):
            continue
        sp = roots_h(p, i)
        if any(abs(t - r.t) <= 1e-10 * max(1.0, r.t) for r in sp.roots):
            skipped += 1
            continue
        hv = sp.h(t)
        prod = field_normal_product(p, i, t)
        checked += 1
        if (hv > 0) != (prod > 0):
            mismatches += 1
    c.true("zero mismatches", mismatches == 0, f"{mismatches} of {checked}")
    c.notes.append(f"{checked} samples compared, {skipped} in the dead band")
    report(11, "sign(h) equals sign of (V, grad lambda_i) at 1e4 samples", c)


def _exit_seed(p):
    """A point just inside R next to an outgoing piece of some boundary branch."""
    for i in (1, 2, 3):
        for branch in (HIGH, LOW):
            sc = crossing_scenario(p, i, branch)
            for lo, hi, d in sc.pieces:
                if d != "exit":
                    continue
                a, b = min(lo, hi), max(lo, hi)
                if math.isinf(b):
                    t = 2.0 * a
                elif a == 0.0:
                    t = 0.5 * b
                else:
                    t = math.sqrt(a * b)
                return nudged_seed(p, i, t, 1e-6)
    return None


def test_c12_dynamics():
    c = Criterion()
    rng = random.Random(1234)
    n_lose = 0
    reentries = 0
    no_exit = []
    while n_lose < 20:
        vals = [Fraction(rng.randint(1, 199), 400) for _ in range(3)]
        if sum(vals) > Fraction(1, 2):
            continue
        p = GwsParams(*vals)
        n_lose += 1
        seeds = [_exit_seed(p)] + sample_region(p, 9, rng)
        exited = False
        for x in seeds:
            tr = integrate(p, x, 100.0)
            seq = [d for _, d in tr.region_transitions()]
            if EXIT in seq:
                exited = True
                if ENTER in seq[seq.index(EXIT):]:
                    reentries += 1
        if not exited:
            no_exit.append(p.a)
    c.true("every sum <= 1/2 triple has an exiting trajectory", not no_exit, f"missing for {no_exit}")
    c.true("no re-entry after exit", reentries == 0, f"{reentries} re-entries")

    exits = 0
    for _ in range(20):
        p = _random_params(rng, ALL_PRESERVED)
        for x in sample_region(p, 100, rng):
            tr = integrate(p, x, 100.0)
            exits += sum(1 for e in tr.events if e.direction == EXIT)
    c.true("AllPreserved triples: zero exits", exits == 0, f"{exits} exits")
    c.notes.append("20 sum <= 1/2 triples x 10 seeds, 20 AllPreserved triples x 100 seeds")
    report(12, "Trajectories confirm the SomeLose and AllPreserved verdicts", c)


def test_c13_exact_float_and_family_path():
    c = Criterion()
    n = pred_mismatch = path_mismatch = ties = 0
    for k in range(1, 31):
        for l in range(1, k + 1):
            for m in range(1, l + 1):
                if l == m == 1:
                    continue
                n += 1
                pe = so_params(k, l, m)
                pf = GwsParams(*pe.as_float())
                for i in (1, 2, 3):
                    we, wf = condition_witness(pe, i), condition_witness(pf, i)
                    if we.tie:
                        ties += 1
                        # the float path must flag the tie rather than decide it
                        if not wf.tie:
                            pred_mismatch += 1
                    elif we.holds != wf.holds:
                        pred_mismatch += 1
                if so_family_classify(k, l, m).outcome != verdict(pe).outcome:
                    path_mismatch += 1
    c.true("exact and float predicates agree", pred_mismatch == 0, f"{pred_mismatch} mismatches")
    c.true("family path equals generic verdict", path_mismatch == 0, f"{path_mismatch} mismatches")
    c.notes.append(f"{n} triples, {ties} exact ties")
    report(13, "Exact/float agreement and family-path consistency for k <= 30", c)


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_c") and callable(fn):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
