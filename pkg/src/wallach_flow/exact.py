"""Small exact-arithmetic helpers shared by the predicate code.

Numbers are either :class:`fractions.Fraction` (exact) or ``float``
(inexact).  Every order predicate that involves a square root is reduced to
the sign of ``p + q*sqrt(r)`` with rational ``p, q, r`` and decided by
squaring with sign bookkeeping.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Union

Number = Union[Fraction, float]

# guard band used whenever a predicate has to be decided in binary64
TIE_BAND = 1e-12


def as_number(value) -> Number:
    """Coerce ``value`` to Fraction when it is exactly representable as typed.

    Integers, Fractions and strings of the form ``"p/q"`` or ``"p"`` become
    Fractions.  Floats and decimal strings stay floats (inexact path).
    """
    if isinstance(value, bool):
        raise TypeError("boolean is not a parameter value")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Rational):
        return Fraction(int(value.numerator), int(value.denominator))
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        text = value.strip()
        if any(c in text for c in ".eE"):
            return float(text)
        return Fraction(text)
    try:
        import sympy

        if isinstance(value, sympy.Rational):
            return Fraction(int(value.p), int(value.q))
    except ImportError:  # pragma: no cover
        pass
    return float(value)


def is_exact(*values) -> bool:
    return all(isinstance(v, Fraction) for v in values)


def sign(x) -> int:
    return (x > 0) - (x < 0)


def surd_sign(p, q, r) -> int:
    """Exact sign of ``p + q*sqrt(r)`` for rationals with ``r >= 0``."""
    if r < 0:
        raise ValueError("negative radicand")
    sp = sign(p)
    sq = sign(q) if r != 0 else 0
    if sq == 0:
        return sp
    if sp == 0:
        return sq
    if sp == sq:
        return sp
    lhs, rhs = p * p, q * q * r
    if lhs > rhs:
        return sp
    if lhs < rhs:
        return sq
    return 0


def float_sign(x: float, scale: float = 1.0, band: float = TIE_BAND) -> tuple[int, bool]:
    """Sign of a binary64 value with a relative tie band.

    Returns ``(sign, tie)`` where ``tie`` is True when ``|x| <= band*scale``;
    in that case the reported sign is 0.
    """
    if abs(x) <= band * max(abs(scale), 1e-300):
        return 0, True
    return sign(x), False
