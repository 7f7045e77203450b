"""Whether the flow keeps positive Ricci curvature, decided from ``(a1, a2, a3)``.

* ``a1 + a2 + a3 <= 1/2``: some metrics lose positivity (SomeLose).
* otherwise all of R is kept (AllPreserved) iff for every ``i``
  ``4 (a_j + a_k)^2 >= (1 - 2 a_i) / (1 + 2 a_i)``, i.e. ``theta >= theta_i``;
  if this fails for some ``i`` only some metrics keep it (SomePreserved).

For the ``SO(k+l+m)`` family the last condition becomes a comparison of
``l + m`` with the thresholds ``X(k) < Y(k)``, decided here without rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

from .core import DomainError, GwsParams, others
from .exact import TIE_BAND, sign, surd_sign

SOME_LOSE = "SomeLose"
ALL_PRESERVED = "AllPreserved"
SOME_PRESERVED = "SomePreserved"


@dataclass(frozen=True)
class IndexWitness:
    """``4 (a_j + a_k)^2`` against ``(1 - 2 a_i)/(1 + 2 a_i)`` for one index."""

    i: int
    lhs: object
    rhs: object
    holds: bool
    tie: bool
    exact: bool
    theta_i: float


@dataclass
class Verdict:
    outcome: str
    sum_regime: int
    witnesses: tuple = ()
    exit_indices: Optional[tuple] = None
    inexact: bool = False
    extra: dict = field(default_factory=dict)


def condition_witness(p: GwsParams, i: int) -> IndexWitness:
    j, k = others(i)
    a, b = p.ai(i), p.ai(j) + p.ai(k)
    lhs = 4 * b * b
    rhs = (1 - 2 * a) / (1 + 2 * a)
    th_i = p.theta_i(i)
    if p.exact:
        return IndexWitness(i, lhs, rhs, lhs >= rhs, lhs == rhs, True, th_i)
    diff = float(p.theta) - th_i
    tie = abs(diff) <= TIE_BAND
    return IndexWitness(i, lhs, rhs, tie or diff > 0, tie, False, th_i)


def rational_condition(p: GwsParams, i: int) -> bool:
    """``theta >= theta_i`` in its radical-free form; exact for rational input."""
    return condition_witness(p, i).holds


def verdict(p: GwsParams) -> Verdict:
    regime = p.sum_regime()
    wit = tuple(condition_witness(p, i) for i in (1, 2, 3))
    inexact = not p.exact and any(w.tie for w in wit)
    if regime <= 0:
        # every r_i carries an outgoing piece
        return Verdict(SOME_LOSE, regime, wit, (1, 2, 3), inexact)
    failing = tuple(w.i for w in wit if not w.holds)
    if failing:
        return Verdict(SOME_PRESERVED, regime, wit, failing, inexact)
    return Verdict(ALL_PRESERVED, regime, wit, (), inexact)


# --- SO(k+l+m) family -----------------------------------------------------

def T_poly(k: int) -> tuple:
    """Coefficients ``(A, B, C)`` of ``T(theta) = A theta^2 + B theta + C``."""
    k = Fraction(k)
    return k * (k - 2) ** 2, -(k * k - 4), Fraction(4)


def _poly_rem(num: List[Fraction], den: List[Fraction]) -> List[Fraction]:
    """Remainder of polynomial division; coefficients highest degree first."""
    num = list(num)
    while len(num) >= len(den) and num:
        q = num[0] / den[0]
        for idx in range(len(den)):
            num[idx] -= q * den[idx]
        num.pop(0)
    while num and num[0] == 0:
        num.pop(0)
    return num


def sturm_chain(coeffs: Sequence) -> List[List[Fraction]]:
    """Sturm sequence of a polynomial given highest degree first."""
    f0 = [Fraction(c) for c in coeffs]
    while f0 and f0[0] == 0:
        f0.pop(0)
    n = len(f0) - 1
    chain = [f0]
    if n < 1:
        return chain
    chain.append([c * (n - d) for d, c in enumerate(f0[:-1])])
    while len(chain[-1]) > 1:
        r = _poly_rem(chain[-2], chain[-1])
        if not r:
            break
        chain.append([-c for c in r])
    return chain


def _eval(poly, x):
    acc = Fraction(0)
    for c in poly:
        acc = acc * x + c
    return acc


def sign_variations(chain, x) -> int:
    vals = [sign(_eval(f, x)) for f in chain]
    vals = [v for v in vals if v != 0]
    return sum(1 for u, v in zip(vals, vals[1:]) if u != v)


def sturm_count(k: int) -> int:
    """Number of roots of ``T`` in ``(0, 1/k]``."""
    chain = sturm_chain(T_poly(k))
    return sign_variations(chain, Fraction(0)) - sign_variations(chain, Fraction(1, k))


def _surd(k: int) -> int:
    d = k * k - 12 * k + 4
    if k < 12 or d < 0:
        raise DomainError(f"k = {k}: thresholds need k >= 12 (k^2 - 12k + 4 < 0 otherwise)")
    return d


def theta_caps(k: int) -> tuple[float, float]:
    """Roots ``Theta1 < Theta2`` of ``T``; ``theta < theta_1`` exactly between them."""
    s = math.sqrt(_surd(k))
    den = 2 * k * (k - 2)
    return (k + 2 - s) / den, (k + 2 + s) / den


def X_Y(k: int) -> tuple[float, float]:
    s = math.sqrt(_surd(k))
    c = 2 * k * (k - 2)
    return c / (k + 2 + s) - k + 2, c / (k + 2 - s) - k + 2


def Z(k: int) -> float:
    """``Y(k) + k - 2 - (3k - 2)``; positive means no Y-side triple exists."""
    return X_Y(k)[1] + k - 2 - (3 * k - 2)


def compare_X(k: int, lm: int) -> int:
    """Exact sign of ``lm - X(k)``.

    With ``n = lm + k - 2 > 0`` and ``s = sqrt(k^2 - 12k + 4)`` this is the
    sign of ``n (k + 2 + s) - 2k(k - 2)``.
    """
    d = _surd(k)
    n = lm + k - 2
    return surd_sign(n * (k + 2) - 2 * k * (k - 2), n, d)


def compare_Y(k: int, lm: int) -> int:
    """Exact sign of ``lm - Y(k)`` (note ``k + 2 - s > 0``)."""
    d = _surd(k)
    n = lm + k - 2
    return surd_sign(n * (k + 2) - 2 * k * (k - 2), -n, d)


def so_params(k: int, l: int, m: int) -> GwsParams:
    n = 2 * (k + l + m - 2)
    return GwsParams(Fraction(k, n), Fraction(l, n), Fraction(m, n), family="1")


def _sorted_triple(k, l, m) -> tuple:
    vals = []
    for v in (k, l, m):
        if int(v) != v or v < 1:
            raise DomainError(f"k, l, m must be positive integers, got {(k, l, m)!r}")
        vals.append(int(v))
    k, l, m = sorted(vals, reverse=True)
    if l == 1 and m == 1:
        raise DomainError(
            f"(k, l, m) = {(k, l, m)}: l = m = 1 gives a1 = 1/2, "
            "where the factor (1 - 2*a1) vanishes"
        )
    return k, l, m


def so_family_classify(k: int, l: int, m: int) -> Verdict:
    """Verdict for ``SO(k+l+m)/SO(k)xSO(l)xSO(m)`` from the ``X``/``Y`` thresholds."""
    k, l, m = _sorted_triple(k, l, m)
    extra = {"triple": (k, l, m)}
    if k <= 11:
        return Verdict(ALL_PRESERVED, 1, extra=extra)
    sx, sy = compare_X(k, l + m), compare_Y(k, l + m)
    extra.update(lm_vs_X=sx, lm_vs_Y=sy)
    outcome = ALL_PRESERVED if (sx <= 0 or sy >= 0) else SOME_PRESERVED
    return Verdict(outcome, 1, extra=extra)


def preserving_pairs(k: int) -> dict:
    """Ordered pairs ``(l, m)`` with ``max(l, m) <= k`` on each side of the window.

    Returns ``{"X": [...], "Y": [...]}`` for ``l + m <= X(k)`` (with
    ``l + m > 2``) and ``l + m >= Y(k)``.
    """
    xs, ys = [], []
    for l in range(1, k + 1):
        for m in range(1, k + 1):
            if l + m <= 2:
                continue
            if compare_X(k, l + m) <= 0:
                xs.append((l, m))
            if compare_Y(k, l + m) >= 0:
                ys.append((l, m))
    return {"X": xs, "Y": ys}


def enumerate_preserving_triples(k_max: int, k_min: int = 12) -> List[tuple]:
    """All ``(k, l, m)`` with ``k_min <= k <= k_max``, ``k >= max(l, m)`` keeping R."""
    if k_min < 12:
        raise DomainError("enumeration starts at k = 12; below that every triple keeps R")
    out = []
    for k in range(k_min, k_max + 1):
        pairs = preserving_pairs(k)
        out.extend((k, l, m) for l, m in sorted(set(pairs["X"]) | set(pairs["Y"])))
    return out


def theta_star() -> tuple[float, float]:
    """Maximizer ``a*`` of ``theta_i(a)`` on ``(0, 1/2)`` and the maximum."""
    mu = (19.0 + 3.0 * math.sqrt(33.0)) ** (1.0 / 3.0)
    a = (mu * mu - 2.0 * mu + 4.0) / (6.0 * mu)
    return a, a - 0.5 + 0.5 * math.sqrt((1.0 - 2.0 * a) / (1.0 + 2.0 * a))
