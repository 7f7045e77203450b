"""Published reference values, recomputed and compared.

Each group returns a list of :class:`Check`.  Decimal values quoted to four
places are compared at ``1e-3`` (or the stated table precision); closed forms
at ``1e-9``; structural facts (multiplicities, verdicts, sets) exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List

import numpy as np
from scipy.optimize import minimize_scalar

from .boundary import HIGH, LOW, angle_alpha, curve_point, intersection_point, phi_psi, t_markers
from .catalog import MIXED, corollary_table, instantiate
from .classify import (
    ALL_PRESERVED, SOME_LOSE, SOME_PRESERVED, X_Y, Z, compare_Y, condition_witness,
    preserving_pairs, so_params, sturm_count, theta_star, verdict,
)
from .core import GwsParams, theta_threshold
from .signpoly import (
    ENTER_EXIT_ENTER, ENTER_THEN_EXIT, TOUCH_ONLY, crossing_scenario, discriminant_Di,
    h_coefficients, p_reduce, roots_h,
)

PAPER_DEC = 1e-3
CLOSED = 1e-9


@dataclass(frozen=True)
class Check:
    group: str
    name: str
    measured: object
    expected: object
    tol: float
    ok: bool

    @property
    def error(self):
        try:
            return abs(float(self.measured) - float(self.expected))
        except (TypeError, ValueError):
            return None


def _close(group, name, measured, expected, tol) -> Check:
    return Check(group, name, float(measured), float(expected), tol,
                 abs(float(measured) - float(expected)) <= tol)


def _same(group, name, measured, expected) -> Check:
    return Check(group, name, measured, expected, 0.0, measured == expected)


def _true(group, name, cond, detail="") -> Check:
    return Check(group, name, detail or bool(cond), True, 0.0, bool(cond))


def _projective(c, ref) -> bool:
    """Same coefficient vector up to a positive factor."""
    pivot = next(idx for idx, r in enumerate(ref) if r != 0)
    s = Fraction(c[pivot]) / Fraction(ref[pivot])
    return s > 0 and all(Fraction(x) == s * r for x, r in zip(c, ref))


def _grid(lo, hi, n):
    return np.geomspace(lo, hi, n)[1:-1]


def example1() -> List[Check]:
    g = "example1"
    p = instantiate(3, 5, 4, 3)
    a1 = p.a1
    out = [
        _true(g, "m1 = 1/5 solves t^2 - t/a1 + 1 = 0 exactly", Fraction(1, 25) - Fraction(1, 5) / a1 + 1 == 0),
        _true(g, "M1 = 5 solves t^2 - t/a1 + 1 = 0 exactly", 25 - 5 / a1 + 1 == 0),
        _close(g, "m1", p.m(1), 0.2, 1e-12),
        _close(g, "M1", p.M(1), 5.0, 1e-12),
    ]
    gam, dlt = phi_psi(p.a1, p.a3)
    s10 = math.sqrt(10)
    out += [
        _close(g, "gamma closed form", gam, (-27 + 9 * s10) / 13, CLOSED),
        _close(g, "delta closed form", dlt, (50 - 15 * s10) / 13, CLOSED),
        _close(g, "gamma", gam, 0.1123, PAPER_DEC),
        _close(g, "delta", dlt, 0.1974, PAPER_DEC),
    ]
    P13 = intersection_point(p, 1, 3)
    q0 = P13.x[1]
    out += [
        _close(g, "q0", q0, 3.4857, PAPER_DEC),
        _close(g, "P13 x1", P13.x[0], 0.3916, PAPER_DEC),
        _close(g, "P13 x2", P13.x[1], 3.4857, PAPER_DEC),
        _close(g, "P13 x3", P13.x[2], 17.4285, PAPER_DEC),
        _close(g, "t13 closed form", P13.t, 13 / (50 - 15 * s10), CLOSED),
        _close(g, "t13", P13.t, 5.0666, PAPER_DEC),
    ]
    sp = roots_h(p, 1)
    out += [
        _true(g, "h proportional to (-63375, -370500, 4529574)",
              _projective(h_coefficients(p, 1), (-63375, -370500, 4529574))),
        _true(g, "p proportional to (-63375, -370500, 4656324)",
              _projective(p_reduce(sp), (-63375, -370500, 4656324))),
        _same(g, "number of h roots", sp.root_count, 2),
    ]
    y0 = sp.roots[0].y
    t1, t2 = sp.roots[0].t, sp.roots[1].t
    out += [
        _close(g, "y0 closed form", y0, -38 / 13 + 192 / 325 * math.sqrt(235), CLOSED),
        _close(g, "y0", y0, 6.1332, PAPER_DEC),
        _close(g, "t1", t1, 0.1676, PAPER_DEC),
        _close(g, "t2", t2, 5.9656, PAPER_DEC),
    ]
    K2 = curve_point(p, 1, t2)
    for idx, ref in enumerate((1.0717, 2.7097, 0.4542)):
        out.append(_close(g, f"K2 x{idx + 1}", K2[idx], ref, PAPER_DEC))
    inc = [angle_alpha(p, 1, t) for t in _grid(P13.t, t2, 4000)]
    outg = [angle_alpha(p, 1, t) for t in _grid(t2, 100 * t2, 20000)]
    out += [
        _true(g, "incoming alpha in (73.1, 90)", 73.1 < min(inc) and max(inc) < 90.0,
              f"[{min(inc):.4f}, {max(inc):.4f}]"),
        _close(g, "incoming alpha infimum", min(inc), 73.16, 0.01),
        _true(g, "outgoing alpha in (90, 93.4)", 90.0 < min(outg) and max(outg) < 93.4,
              f"[{min(outg):.4f}, {max(outg):.4f}]"),
        _true(g, "outgoing alpha sup <= 93.36 + 0.05", max(outg) <= 93.41, f"{max(outg):.4f}"),
        _same(g, "scenario on r13", crossing_scenario(p, 1, HIGH, sp).label, ENTER_THEN_EXIT),
        _same(g, "verdict", verdict(p).outcome, SOME_LOSE),
    ]
    return out


def example2() -> List[Check]:
    g = "example2"
    p = instantiate(2, 5, 4, 3)
    sp = roots_h(p, 1)
    c0, c1, _ = h_coefficients(p, 1)
    a = p.a1
    t13 = t_markers(p, 1)[1]
    t2 = sp.roots[-1].t
    # the incoming interval is closed here: t13 <= t <= t2
    inc = [angle_alpha(p, 1, t) for t in np.geomspace(t13, t2, 4000)]
    outg = [angle_alpha(p, 1, t) for t in _grid(t2, 100 * t2, 20000)]
    return [
        _same(g, "c0 = 0 on the sum = 1/2 plane", c0, 0),
        _same(g, "c1 = -2(1+2a)(1-2a)^2 a^2", c1, -2 * (1 + 2 * a) * (1 - 2 * a) ** 2 * a * a),
        _same(g, "number of h roots", sp.root_count, 2),
        _close(g, "t13 closed form", t13, 64 / (5 * (45 - math.sqrt(595) * math.sqrt(3))), CLOSED),
        _close(g, "t13", t13, 4.6533, PAPER_DEC),
        _close(g, "t2 closed form", t2, (3713 + 17 * math.sqrt(42721)) / 1200, CLOSED),
        _close(g, "t2", t2, 6.0223, PAPER_DEC),
        _close(g, "incoming alpha infimum", min(inc), 71.62, 0.01),
        _true(g, "incoming alpha <= 90", max(inc) <= 90.0 + 1e-9, f"{max(inc):.4f}"),
        _true(g, "outgoing alpha in (90, 91.43]", 90.0 < min(outg) and max(outg) < 91.43 + 0.005,
              f"[{min(outg):.4f}, {max(outg):.4f}]"),
        _same(g, "verdict", verdict(p).outcome, SOME_LOSE),
    ]


def example3() -> List[Check]:
    g = "example3"
    p = instantiate(1, 2, 2, 2)
    out = [_same(g, "theta", p.theta, Fraction(1, 4))]
    for i in (1, 2, 3):
        out.append(_close(g, f"theta{i}", p.theta_i(i), 0.0387, 1e-4))
        out.append(_true(g, f"D{i} < 0", discriminant_Di(p.ai(i), p.theta) < 0))
    out.append(_same(g, "verdict", verdict(p).outcome, ALL_PRESERVED))
    return out


def example4() -> List[Check]:
    g = "example4"
    p = instantiate(1, 12, 3, 2)
    w1 = condition_witness(p, 1)
    sp = roots_h(p, 1)
    s17 = math.sqrt(17)
    out = [
        _same(g, "theta", p.theta, Fraction(1, 15)),
        _true(g, "theta = theta1 decided exactly", w1.exact and w1.tie and w1.holds),
        _same(g, "D1", discriminant_Di(p.a1, p.theta), 0),
        _true(g, "p proportional to (16y - 49)^2", _projective(p_reduce(sp), (256, -1568, 2401))),
        _same(g, "multiplicities", [r.multiplicity for r in sp.roots], [2, 2]),
        _close(g, "t1 closed form", sp.roots[0].t, (49 - 9 * s17) / 32, CLOSED),
        _close(g, "t2 closed form", sp.roots[1].t, (49 + 9 * s17) / 32, CLOSED),
        _close(g, "t1", sp.roots[0].t, 0.3716, PAPER_DEC),
        _close(g, "t2", sp.roots[1].t, 2.6909, PAPER_DEC),
        _close(g, "theta2 closed form", p.theta_i(2), -2 / 5 + math.sqrt(6) / 6, CLOSED),
        # printed with a spurious factor 3 on the radical; the decimal matches this form
        _close(g, "theta3 closed form", p.theta_i(3), -13 / 30 + math.sqrt(221) / 34, CLOSED),
        _close(g, "theta2", p.theta_i(2), 0.0082, PAPER_DEC),
        _close(g, "theta3", p.theta_i(3), 0.0039, PAPER_DEC),
        _same(g, "scenario on r13", crossing_scenario(p, 1, HIGH, sp).label, TOUCH_ONLY),
        _same(g, "scenario on r12", crossing_scenario(p, 1, LOW, sp).label, TOUCH_ONLY),
        _same(g, "verdict", verdict(p).outcome, ALL_PRESERVED),
    ]
    return out


def example5() -> List[Check]:
    g = "example5"
    p = instantiate(1, 15, 14, 13)
    closed = (-5 / 16 + math.sqrt(55) / 22, -13 / 40 + math.sqrt(39) / 18,
              -27 / 80 + 3 * math.sqrt(159) / 106)
    out = [
        _same(g, "theta", p.theta, Fraction(1, 40)),
        _same(g, "Y(15) = 26 exactly", compare_Y(15, 26), 0),
        _true(g, "l + m = 27 > Y(15)", compare_Y(15, 27) > 0),
    ]
    for i, (c, ref) in enumerate(zip(closed, (0.0246, 0.0219, 0.0194)), start=1):
        out.append(_close(g, f"theta{i} closed form", p.theta_i(i), c, CLOSED))
        out.append(_close(g, f"theta{i}", p.theta_i(i), ref, PAPER_DEC))
        out.append(_same(g, f"roots of h for r{i}", roots_h(p, i).root_count, 0))
    out.append(_same(g, "verdict", verdict(p).outcome, ALL_PRESERVED))
    return out


def example6() -> List[Check]:
    g = "example6"
    p = instantiate(1, 14, 7, 4)
    sp = roots_h(p, 1)
    t3, t1, t2, t4 = (r.t for r in sp.roots)
    t12, t13 = t_markers(p, 1)
    closed = (-9 / 46 + 3 * math.sqrt(37) / 74, -8 / 23 + math.sqrt(30) / 15,
              -19 / 46 + math.sqrt(57) / 18)
    out = [
        _same(g, "theta", p.theta, Fraction(1, 23)),
        _true(g, "D1 > 0", discriminant_Di(p.a1, p.theta) > 0),
        _same(g, "multiplicities", [r.multiplicity for r in sp.roots], [1, 1, 1, 1]),
    ]
    for i, (c, ref) in enumerate(zip(closed, (0.0509, 0.0173, 0.0064)), start=1):
        out.append(_close(g, f"theta{i} closed form", p.theta_i(i), c, CLOSED))
        out.append(_close(g, f"theta{i}", p.theta_i(i), ref, PAPER_DEC))
    out += [
        _close(g, "t1", t1, 0.2532, PAPER_DEC),
        _close(g, "t2", t2, 3.9488, PAPER_DEC),
        _close(g, "t3", t3, 0.15, PAPER_DEC),
        _close(g, "t4", t4, 6.6663, PAPER_DEC),
        _close(g, "t12 closed form", t12, 320 / 161 - 8 * math.sqrt(1110) / 161, CLOSED),
        # printed as sqrt(2109) - 57, which is negative; the decimal matches this sign
        _close(g, "t13 closed form", t13, 230 / (7 * (57 - math.sqrt(2109))), CLOSED),
        _close(g, "t12", t12, 0.3321, PAPER_DEC),
        _close(g, "t13", t13, 2.9665, PAPER_DEC),
        _true(g, "t3 < t1 < t12", t3 < t1 < t12),
        _true(g, "t13 < t2 < t4", t13 < t2 < t4),
        _same(g, "scenario on r13", crossing_scenario(p, 1, HIGH, sp).label, ENTER_EXIT_ENTER),
        _same(g, "verdict", verdict(p).outcome, SOME_PRESERVED),
    ]
    return out


def irrational() -> List[Check]:
    g = "irrational"
    s6 = math.sqrt(6)
    p = GwsParams(5 / 14, 3 / 7, 1 / 14 + s6 / 12)
    th3 = (-239 + 14 * s6 + 7 * math.sqrt(1434 - 84 * s6)) / (14 * (48 + 7 * s6))
    v = verdict(p)
    return [
        _close(g, "theta", float(p.theta), 5 / 14 + s6 / 12, CLOSED),
        _close(g, "theta1 closed form", p.theta_i(1), -1 / 7 + s6 / 12, CLOSED),
        _close(g, "theta2 closed form", p.theta_i(2), -1 / 14 + math.sqrt(13) / 26, CLOSED),
        _close(g, "theta3 closed form", p.theta_i(3), th3, CLOSED),
        _close(g, "theta", float(p.theta), 0.5613, PAPER_DEC),
        _close(g, "theta1", p.theta_i(1), 0.0613, PAPER_DEC),
        _close(g, "theta2", p.theta_i(2), 0.0672, PAPER_DEC),
        _close(g, "theta3", p.theta_i(3), 0.0445, PAPER_DEC),
        _true(g, "decided on the binary64 path", not p.exact and all(not w.exact for w in v.witnesses)),
        _same(g, "verdict", v.outcome, ALL_PRESERVED),
    ]


def theta_star_checks() -> List[Check]:
    g = "theta-star"
    a, th = theta_star()
    res = minimize_scalar(lambda x: -theta_threshold(x), bounds=(1e-6, 0.5 - 1e-9),
                          method="bounded", options={"xatol": 1e-12})
    h = 1e-5
    return [
        _close(g, "a*", a, 0.4196433778, 1e-6),
        _close(g, "theta*", th, 0.067442248, 1e-6),
        _close(g, "a* against bounded 1-D maximization", a, res.x, 1e-6),
        _close(g, "theta* against bounded 1-D maximization", th, -res.fun, 1e-9),
        _true(g, "derivative changes sign at a*",
              theta_threshold(a) > theta_threshold(a - h) and theta_threshold(a) > theta_threshold(a + h)),
        _true(g, "theta_i(a) < theta* at a = 0.1, 0.25, 0.45",
              all(theta_threshold(x) < th for x in (0.1, 0.25, 0.45))),
    ]


TABLE3 = {12: (5.0, 10.0), 13: (3.96, 15.29), 14: (3.51, 20.49), 15: (3.25, 26.0),
          16: (3.07, 31.93), 17: (2.94, 38.31)}
TABLE4 = {12: {(4, 1), (1, 4), (3, 2), (2, 3), (3, 1), (1, 3), (2, 2), (2, 1), (1, 2)},
          13: {(2, 1), (1, 2)}, 14: {(2, 1), (1, 2)}, 15: {(2, 1), (1, 2)}, 16: {(2, 1), (1, 2)}}


def table5_rule(k: int) -> set:
    """The Y-side pairs as the table describes them, via ``N`` and ``nu(l)``."""
    if k == 12:
        return {(l, m) for l in range(1, 13) for m in range(max(10 - l, 1), 13)}
    if k in (13, 14, 15):
        y = X_Y(k)[1]
        N = int(math.floor(y)) if abs(y - round(y)) < 1e-9 else int(math.floor(y)) + 1
        return {(l, m) for l in range(N - k, k + 1) for m in range(N - l, k + 1)}
    if k == 16:
        return {(16, 16)}
    return set()


def tables(k_extra: int = 40) -> List[Check]:
    g = "tables"
    out = []
    for k, (x, y) in TABLE3.items():
        X, Y = X_Y(k)
        out.append(_close(g, f"X({k})", X, x, 0.005))
        out.append(_close(g, f"Y({k})", Y, y, 0.005))
    for k in range(12, k_extra + 1):
        pairs = preserving_pairs(k)
        out.append(_same(g, f"Table 4 k={k}", set(pairs["X"]), TABLE4.get(k, set())))
        out.append(_same(g, f"Table 5 k={k}", set(pairs["Y"]), table5_rule(k)))
    out += [
        _same(g, "roots of T in (0, 1/k] for k <= 11", [sturm_count(k) for k in range(1, 12)], [0] * 11),
        _same(g, "roots of T in (0, 1/k] for k = 12..20", [sturm_count(k) for k in range(12, 21)], [2] * 9),
        _close(g, "Z(16)", Z(16), -0.0691, 1e-4),
        _close(g, "Z(17)", Z(17), 4.3137, 1e-4),
    ]
    return out


COROLLARY_LOSE = {2, 3, 5, 7, 15}
COROLLARY_KEEP = {4, 6, 8, 9, 10, 11, 12, 13, 14}


def corollary(bound: int = 20) -> List[Check]:
    g = "corollary"
    table = corollary_table(bound)
    out = []
    for fid, rep in table.items():
        if fid in COROLLARY_LOSE:
            out.append(_same(g, f"family {fid}", rep.outcome, SOME_LOSE))
        elif fid in COROLLARY_KEEP:
            out.append(_same(g, f"family {fid}", rep.outcome, ALL_PRESERVED))
        else:
            out.append(_same(g, f"family {fid}", rep.outcome, MIXED))
    return out


GROUPS: Dict[str, Callable[[], List[Check]]] = {
    "example1": example1,
    "example2": example2,
    "example3": example3,
    "example4": example4,
    "example5": example5,
    "example6": example6,
    "irrational": irrational,
    "theta-star": theta_star_checks,
    "tables": tables,
    "corollary": corollary,
}


def run(only=None) -> List[Check]:
    names = list(GROUPS) if not only else list(only)
    out = []
    for name in names:
        if name not in GROUPS:
            raise KeyError(f"unknown check group {name!r}; choose from {sorted(GROUPS)}")
        out.extend(GROUPS[name]())
    return out
