"""The fifteen generalized Wallach space families with simple ``G``.

The table is data: each row stores its Lie-algebra labels as opaque strings
and ``a1, a2, a3, theta`` as formula strings in the free parameters.  The
strings are parsed once with sympy and evaluated in exact rationals.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Optional, Tuple

import sympy

from .classify import ALL_PRESERVED, SOME_LOSE, Verdict, so_family_classify, verdict
from .core import DomainError, GwsParams

MIXED = "Mixed"


@dataclass(frozen=True)
class FamilySpec:
    id: int
    g: str
    h: str
    params: Tuple[str, ...]
    a: Tuple[str, str, str]
    theta: str
    constraints: Tuple[str, ...] = ()
    h_alias: Optional[str] = None


FAMILIES: Dict[int, FamilySpec] = {f.id: f for f in (
    FamilySpec(1, "so(k+l+m)", "so(k)+so(l)+so(m)", ("k", "l", "m"),
               ("k/(2*(k+l+m-2))", "l/(2*(k+l+m-2))", "m/(2*(k+l+m-2))"), "1/(k+l+m-2)",
               ("k >= 1", "l >= 1", "m >= 1", "l + m > 2")),
    FamilySpec(2, "su(k+l+m)", "su(k)+su(l)+su(m)", ("k", "l", "m"),
               ("k/(2*(k+l+m))", "l/(2*(k+l+m))", "m/(2*(k+l+m))"), "0",
               ("k >= 1", "l >= 1", "m >= 1")),
    FamilySpec(3, "sp(k+l+m)", "sp(k)+sp(l)+sp(m)", ("k", "l", "m"),
               ("k/(2*(k+l+m+1))", "l/(2*(k+l+m+1))", "m/(2*(k+l+m+1))"), "-1/(2*(k+l+m+1))",
               ("k >= 1", "l >= 1", "m >= 1")),
    FamilySpec(4, "su(2l)", "u(l)", ("l",),
               ("(l+1)/(4*l)", "(l-1)/(4*l)", "1/4"), "1/4", ("l >= 2",)),
    FamilySpec(5, "so(2l)", "u(1)+u(l-1)", ("l",),
               ("(l-2)/(4*(l-1))", "(l-2)/(4*(l-1))", "1/(2*(l-1))"), "0", ("l >= 4",)),
    FamilySpec(6, "e6", "su(4)+2sp(1)+R", (), ("1/4", "1/4", "1/6"), "1/6"),
    FamilySpec(7, "e6", "so(8)+R^2", (), ("1/6", "1/6", "1/6"), "0"),
    FamilySpec(8, "e6", "sp(3)+sp(1)", (), ("1/4", "1/8", "7/24"), "1/6"),
    FamilySpec(9, "e7", "so(8)+3sp(1)", (), ("2/9", "2/9", "2/9"), "1/6"),
    FamilySpec(10, "e7", "su(6)+sp(1)+R", (), ("2/9", "1/6", "5/18"), "1/6"),
    FamilySpec(11, "e7", "s0(8)", (), ("5/18", "5/18", "5/18"), "1/3", h_alias="so(8)"),
    FamilySpec(12, "e8", "so(12)+2sp(1)", (), ("1/5", "1/5", "4/15"), "1/6"),
    FamilySpec(13, "e8", "so(8)+so(8)", (), ("4/15", "4/15", "4/15"), "3/10"),
    FamilySpec(14, "f4", "so(5)+2sp(1)", (), ("5/18", "5/18", "1/9"), "1/6"),
    FamilySpec(15, "f4", "so(8)", (), ("1/9", "1/9", "1/9"), "-1/6"),
)}


@lru_cache(maxsize=None)
def _compiled(fid: int):
    spec = FAMILIES[fid]
    syms = sympy.symbols(spec.params) if spec.params else ()
    if isinstance(syms, sympy.Symbol):
        syms = (syms,)
    exprs = [sympy.sympify(e) for e in spec.a + (spec.theta,)]
    conds = [sympy.sympify(c) for c in spec.constraints]
    return tuple(syms), exprs, conds


def _to_fraction(v) -> Fraction:
    v = sympy.nsimplify(v) if not isinstance(v, sympy.Rational) else v
    if not isinstance(v, sympy.Rational):
        raise DomainError(f"formula did not evaluate to a rational: {v}")
    return Fraction(int(v.p), int(v.q))


def family(fid: int) -> FamilySpec:
    try:
        return FAMILIES[fid]
    except KeyError:
        raise DomainError(f"family id must be 1..15, got {fid!r}") from None


def instantiate(fid: int, *values: int) -> GwsParams:
    """Exact parameters of family ``fid`` at the given free parameters."""
    spec = family(fid)
    if len(values) != len(spec.params):
        raise DomainError(f"family {fid} takes parameters {spec.params}, got {values!r}")
    for name, v in zip(spec.params, values):
        if isinstance(v, bool) or int(v) != v:
            raise DomainError(f"{name} must be an integer, got {v!r}")
    syms, exprs, conds = _compiled(fid)
    subs = dict(zip(syms, (sympy.Integer(int(v)) for v in values)))
    for c, text in zip(conds, spec.constraints):
        if not bool(c.subs(subs)):
            raise DomainError(f"family {fid}: constraint {text} violated by {values!r}")
    a = [_to_fraction(e.subs(subs)) for e in exprs[:3]]
    return GwsParams(*a, family=str(fid))


def table_theta(fid: int, *values: int) -> Fraction:
    """The theta column of the table, evaluated independently of the a's."""
    syms, exprs, _ = _compiled(fid)
    subs = dict(zip(syms, (sympy.Integer(int(v)) for v in values)))
    return _to_fraction(exprs[3].subs(subs))


def parameter_grid(fid: int, bound: int = 20) -> Iterable[tuple]:
    spec = family(fid)
    if not spec.params:
        yield ()
    elif len(spec.params) == 1:
        lo = 2 if fid == 4 else 4
        for l in range(lo, bound + 1):
            yield (l,)
    else:
        for k in range(1, bound + 1):
            for l in range(1, k + 1):
                for m in range(1, l + 1):
                    if fid == 1 and l + m <= 2:
                        continue
                    yield (k, l, m)


@dataclass(frozen=True)
class FamilyReport:
    id: int
    outcome: str
    counts: Tuple[Tuple[str, int], ...]
    instances: int
    bound: Optional[int]


def corollary_table(bound: int = 20) -> Dict[int, FamilyReport]:
    """Outcome per family over its sampled parameter grid.

    ``outcome`` is the common verdict when all instances agree, else ``Mixed``
    (family 1 is split by the thresholds of :func:`so_family_classify`).
    """
    out = {}
    for fid in FAMILIES:
        counts: Counter = Counter()
        n = 0
        for vals in parameter_grid(fid, bound):
            if fid == 1:
                v = so_family_classify(*vals)
            else:
                v = verdict(instantiate(fid, *vals))
            counts[v.outcome] += 1
            n += 1
        outcome = next(iter(counts)) if len(counts) == 1 else MIXED
        out[fid] = FamilyReport(fid, outcome, tuple(sorted(counts.items())), n,
                                bound if FAMILIES[fid].params else None)
    return out


def catalog_dict() -> list:
    rows = []
    for spec in FAMILIES.values():
        rows.append({
            "id": spec.id,
            "g": spec.g,
            "h": spec.h,
            "h_alias": spec.h_alias,
            "params": list(spec.params),
            "a1": spec.a[0],
            "a2": spec.a[1],
            "a3": spec.a[2],
            "theta": spec.theta,
            "constraints": list(spec.constraints),
        })
    return rows


def dump_json(indent: int = 2) -> str:
    return json.dumps(catalog_dict(), indent=indent, sort_keys=True, ensure_ascii=False)
