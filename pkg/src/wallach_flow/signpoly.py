"""The palindromic quartic ``h`` whose sign is that of the field-normal product.

``h(t) = c0 t^4 + c1 t^3 + c2 t^2 + c1 t + c0`` and, with ``y = t + 1/t``,
``h(t) = t^2 p(y)`` where ``p(y) = c0 y^2 + c1 y + (c2 - 2 c0)``.  A root ``y``
of ``p`` gives two curve parameters ``t`` and ``1/t``; they lie outside the
forbidden gap exactly when ``y > 1/a_i``.

Multiplicities are never inferred from floating-point closeness: with
rational parameters the discriminant of ``p`` is rational and its sign is
decided exactly, and ``y > 1/a_i`` is decided by :func:`surd_sign`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .boundary import HIGH, LOW, t_markers
from .core import DomainError, GwsParams, others
from .exact import TIE_BAND, float_sign, sign, surd_sign

NO_EXIT = "NoExit"
TOUCH_ONLY = "TouchOnly"
EXIT_ONLY = "ExitOnly"
ENTER_THEN_EXIT = "EnterThenExit"
EXIT_THEN_ENTER = "ExitThenEnter"
ENTER_EXIT_ENTER = "EnterExitEnter"

_LABELS = {
    (1,): NO_EXIT,
    (-1,): EXIT_ONLY,
    (1, -1): ENTER_THEN_EXIT,
    (-1, 1): EXIT_THEN_ENTER,
    (1, -1, 1): ENTER_EXIT_ENTER,
}


@dataclass(frozen=True)
class Root:
    t: float
    multiplicity: int
    tag: str
    y: float


@dataclass
class SignPoly:
    i: int
    c0: object
    c1: object
    c2: object
    roots: List[Root] = field(default_factory=list)
    exact: bool = True

    def h(self, t):
        c0, c1, c2 = self.c0, self.c1, self.c2
        return (((c0 * t + c1) * t + c2) * t + c1) * t + c0

    def p(self, y):
        return (self.c0 * y + self.c1) * y + self.c2 - 2 * self.c0

    def p_coefficients(self) -> tuple:
        return p_reduce(self)

    @property
    def root_count(self) -> int:
        return sum(r.multiplicity for r in self.roots)


def h_coefficients(p: GwsParams, i: int) -> tuple:
    """``(c0, c1, c2)``; exact Fractions for rational parameters."""
    j, k = others(i)
    a, b = p.ai(i), p.ai(j) + p.ai(k)
    c0 = a * a * (1 - 2 * a + 2 * b) * (2 * a + 2 * b - 1)
    c1 = a * (1 - 2 * a) ** 3 - 4 * a * (4 * a * a + 1) * b * b
    c2 = (16 * a ** 4 + 16 * a * a + 1) * b * b + 2 * a * (1 - a) * (1 - 2 * a) ** 2
    return c0, c1, c2


def p_reduce(sp: SignPoly) -> tuple:
    """Coefficients ``(c0, c1, c2 - 2 c0)`` of the quadratic in ``y = t + 1/t``."""
    return sp.c0, sp.c1, sp.c2 - 2 * sp.c0


def discriminant_Di(ai, theta):
    """``-4 a^2 (1+2a)^2 (1-2a)^3 ((1+2a) theta^2 + (1-4a^2) theta - (1-2a) a^2)``.

    Negative iff ``theta > theta_i``, zero iff equal.  Exact for rational input.
    """
    if not 0 < ai < 0.5:
        raise DomainError(f"a_i = {ai} must lie in (0, 1/2)")
    bracket = (1 + 2 * ai) * theta ** 2 + (1 - 4 * ai * ai) * theta - (1 - 2 * ai) * ai * ai
    return -4 * ai * ai * (1 + 2 * ai) ** 2 * (1 - 2 * ai) ** 3 * bracket


def _t_pair(y: float) -> tuple[float, float]:
    s = math.sqrt(y * y - 4.0)
    hi = 0.5 * (y + s)
    return 1.0 / hi, hi


def roots_h(p: GwsParams, i: int) -> SignPoly:
    """All roots of ``h`` on ``(0, m_i)`` and ``(M_i, inf)`` with multiplicities."""
    c0, c1, c2 = h_coefficients(p, i)
    exact = p.exact
    sp = SignPoly(i, c0, c1, c2, exact=exact)
    a = p.ai(i)
    k0 = c2 - 2 * c0
    inv_a = 1 / a
    ys: List[Tuple[float, int]] = []

    if exact:
        s0 = sign(c0)
    else:
        s0, _ = float_sign(c0, max(abs(c1), abs(k0)))
        if s0 == 0:
            sp.exact = False

    if s0 == 0:
        # linear p: one root -k0/c1
        y0 = -k0 / c1
        if y0 > inv_a:
            ys.append((float(y0), 1))
    else:
        disc = c1 * c1 - 4 * c0 * k0
        if exact:
            sd = sign(disc)
        else:
            sd, tie = float_sign(disc, c1 * c1)
            if tie:
                sp.exact = False
        if sd == 0:
            y0 = -c1 / (2 * c0)
            if y0 > inv_a:
                ys.append((float(y0), 2))
        elif sd > 0:
            # y - 1/a = (-c1 - 2 c0/a +- sqrt(disc)) / (2 c0)
            base = -c1 - 2 * c0 * inv_a
            for q in (-1, 1):
                if exact:
                    above = s0 * surd_sign(base, q, disc) > 0
                else:
                    val = (base + q * math.sqrt(disc)) / (2 * c0)
                    st, tie = float_sign(val, inv_a)
                    sp.exact = sp.exact and not tie
                    above = st > 0
                if above:
                    ys.append(((-float(c1) + q * math.sqrt(float(disc))) / (2 * float(c0)), 1))

    roots = []
    for y, mult in ys:
        lo, hi = _t_pair(y)
        roots.append(Root(lo, mult, LOW, y))
        roots.append(Root(hi, mult, HIGH, y))
    sp.roots = sorted(roots, key=lambda r: r.t)
    return sp


@dataclass(frozen=True)
class Scenario:
    """Flow direction along one trimmed branch, walked away from the corner.

    ``pieces`` are ``(t_from, t_to, direction)`` in walking order with
    direction ``'enter'`` or ``'exit'``; ``touches`` lists even-multiplicity
    roots where the field is tangent without changing side.
    """

    label: str
    i: int
    branch: str
    interval: tuple
    pieces: tuple
    touches: tuple
    inexact: bool = True


def crossing_scenario(p: GwsParams, i: int, branch: str, sp: Optional[SignPoly] = None) -> Scenario:
    """Classify a trimmed branch of ``r_i`` against the roots of ``h``.

    The high branch ``[t_ik, inf)`` is walked upward, the low branch
    ``(0, t_ij]`` downward, so both start at the corner of R.  Root-versus-
    marker comparisons are done in binary64 (the marker is irrational in
    general), hence ``inexact`` is always set.
    """
    if sp is None:
        sp = roots_h(p, i)
    t_ij, t_ik = t_markers(p, i)
    if branch == HIGH:
        start, end = t_ik, math.inf
        inside = [r for r in sp.roots if r.tag == HIGH and r.t > t_ik]
        inside.sort(key=lambda r: r.t)
    elif branch == LOW:
        start, end = t_ij, 0.0
        inside = [r for r in sp.roots if r.tag == LOW and r.t < t_ij]
        inside.sort(key=lambda r: -r.t)
    else:
        raise DomainError(f"branch must be {LOW!r} or {HIGH!r}, got {branch!r}")

    cuts = [r.t for r in inside if r.multiplicity % 2]
    touches = tuple(r.t for r in inside if r.multiplicity % 2 == 0)
    bounds = [start] + cuts + [end]
    pieces = []
    signs = []
    hf = SignPoly(i, float(sp.c0), float(sp.c1), float(sp.c2)).h
    for lo, hi in zip(bounds, bounds[1:]):
        if math.isinf(hi):
            probe = 2.0 * lo
        elif hi == 0.0:
            probe = 0.5 * lo
        else:
            probe = math.sqrt(lo * hi)
        s = 1 if hf(probe) > 0 else -1
        signs.append(s)
        pieces.append((lo, hi, "enter" if s > 0 else "exit"))

    # merge equal neighbours (cannot happen for odd cuts, kept for safety)
    seq = []
    for s in signs:
        if not seq or seq[-1] != s:
            seq.append(s)
    label = _LABELS.get(tuple(seq))
    if label is None:
        raise RuntimeError(f"unexpected sign pattern {seq} on r_{i} {branch}")
    if label == NO_EXIT and touches:
        label = TOUCH_ONLY
    return Scenario(label, i, branch, (start, end), tuple(pieces), touches)
