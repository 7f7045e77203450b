"""Parameter triples, metric points and the curvature quantities built on them.

Indices follow the usual 1-based convention ``i in {1, 2, 3}``.  For an index
``i`` the two remaining indices are ``others(i) = (j, k)`` in increasing
order; every permuted formula in the package goes through this one map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .exact import Number, as_number, is_exact, sign

HALF = Fraction(1, 2)
TOL_SIGMA = 1e-9
TOL_ALGEBRAIC = 1e-12

_OTHERS = {1: (2, 3), 2: (1, 3), 3: (1, 2)}


class DomainError(ValueError):
    """Input outside the domain where the formulas are defined."""


def others(i: int) -> tuple[int, int]:
    try:
        return _OTHERS[i]
    except KeyError:
        raise DomainError(f"index must be 1, 2 or 3, got {i!r}") from None


def gap_position(a, t) -> int:
    """Locate ``t > 0`` relative to the gap ``[m(a), M(a)]``.

    Returns -1 for ``t < m``, 0 for ``m <= t <= M`` and +1 for ``t > M``.
    Decided through the sign of ``t**2 - t/a + 1`` and the vertex ``1/(2a)``,
    so the answer is exact whenever ``a`` and ``t`` are rational.
    """
    q = t * t - t / a + 1
    if q <= 0:
        return 0
    return -1 if 2 * a * t < 1 else 1


@dataclass(frozen=True)
class GwsParams:
    """The triple ``(a1, a2, a3)``, each strictly inside ``(0, 1/2)``.

    Values given as ints, Fractions or ``"p/q"`` strings are kept exact;
    floats select the binary64 path.
    """

    a1: Number
    a2: Number
    a3: Number
    family: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        vals = [as_number(v) for v in (self.a1, self.a2, self.a3)]
        for idx, v in enumerate(vals, start=1):
            if isinstance(v, float) and not math.isfinite(v):
                raise DomainError(f"a{idx} is not finite")
            if not v > 0:
                raise DomainError(f"a{idx} = {v} must be positive")
            if v >= HALF:
                raise DomainError(
                    f"a{idx} = {v} is not below 1/2: the factor (1 - 2*a{idx}) "
                    "vanishes or turns negative"
                )
            object.__setattr__(self, f"a{idx}", v)

    @classmethod
    def of(cls, values: Iterable, family: Optional[str] = None) -> "GwsParams":
        a1, a2, a3 = values
        return cls(a1, a2, a3, family=family)

    @property
    def a(self) -> tuple:
        return (self.a1, self.a2, self.a3)

    def ai(self, i: int):
        others(i)
        return self.a[i - 1]

    @property
    def exact(self) -> bool:
        return is_exact(*self.a)

    def as_float(self) -> tuple[float, float, float]:
        return tuple(float(v) for v in self.a)

    @property
    def total(self):
        return self.a1 + self.a2 + self.a3

    @property
    def theta(self):
        """``a1 + a2 + a3 - 1/2`` (exact when the triple is)."""
        return self.total - HALF

    @property
    def omega(self):
        return 1 / (1 / self.a1 + 1 / self.a2 + 1 / self.a3)

    def sum_regime(self) -> int:
        """Sign of ``a1 + a2 + a3 - 1/2``; exact for rational triples."""
        return sign(self.theta)

    def m(self, i: int) -> float:
        return small_root(float(self.ai(i)))

    def M(self, i: int) -> float:
        return 1.0 / small_root(float(self.ai(i)))

    def theta_i(self, i: int) -> float:
        return theta_threshold(float(self.ai(i)))

    def chain_holds(self, i: int) -> bool:
        """``0 < a < m < 2a < 1 < 1/(2a) < M < 1/a`` for index ``i``."""
        a = self.ai(i)
        return (
            gap_position(a, a) == -1
            and gap_position(a, 2 * a) == 0
            and 2 * a < 1
            and gap_position(a, 1 / (2 * a)) == 0
            and gap_position(a, 1 / a) == 1
        )


def small_root(a: float) -> float:
    """``m(a) = (1 - sqrt(1 - 4a^2)) / (2a)`` in cancellation-free form."""
    return 2.0 * a / (1.0 + math.sqrt(1.0 - 4.0 * a * a))


def theta_threshold(a: float) -> float:
    return a - 0.5 + 0.5 * math.sqrt((1.0 - 2.0 * a) / (1.0 + 2.0 * a))


@dataclass(frozen=True)
class MetricPoint:
    """Positive metric scales ``(x1, x2, x3)``."""

    x1: float
    x2: float
    x3: float

    def __post_init__(self):
        for idx, v in enumerate((self.x1, self.x2, self.x3), start=1):
            if not v > 0:
                raise DomainError(f"x{idx} = {v} must be strictly positive")

    def __iter__(self):
        return iter((self.x1, self.x2, self.x3))

    def __getitem__(self, idx):
        return (self.x1, self.x2, self.x3)[idx]

    def __len__(self):
        return 3


def coords(x) -> tuple:
    """Validate a metric point given as MetricPoint or any 3-sequence."""
    if isinstance(x, MetricPoint):
        return (x.x1, x.x2, x.x3)
    vals = tuple(x)
    if len(vals) != 3:
        raise DomainError(f"metric point needs three coordinates, got {len(vals)}")
    for idx, v in enumerate(vals, start=1):
        if not v > 0:
            raise DomainError(f"x{idx} = {v} must be strictly positive")
    return vals


def _pick(x: Sequence, i: int):
    j, k = others(i)
    return x[i - 1], x[j - 1], x[k - 1]


def principal_ricci(p: GwsParams, x) -> tuple:
    """Principal Ricci curvatures ``(r1, r2, r3)`` of the metric ``x``."""
    x = coords(x)
    out = []
    for i in (1, 2, 3):
        xi, xj, xk = _pick(x, i)
        ai = p.ai(i)
        out.append(1 / (2 * xi) + ai / 2 * (xi / (xj * xk) - xk / (xi * xj) - xj / (xi * xk)))
    return tuple(out)


def scalar_curvature(p: GwsParams, dims: Sequence[int], x) -> float:
    """``d1*r1 + d2*r2 + d3*r3`` for caller-supplied module dimensions."""
    dims = tuple(dims)
    if len(dims) != 3 or any(int(d) != d or d <= 0 for d in dims):
        raise DomainError(f"dims must be three positive integers, got {dims!r}")
    r = principal_ricci(p, x)
    return sum(d * ri for d, ri in zip(dims, r))


def lam(p: GwsParams, x, i: int):
    """``lambda_i = a_i (x_i^2 - x_j^2 - x_k^2) + x_j x_k``.

    Same sign as the i-th principal Ricci curvature; exact for rational input.
    """
    xi, xj, xk = _pick(coords(x), i)
    return p.ai(i) * (xi * xi - xj * xj - xk * xk) + xj * xk


def lambdas(p: GwsParams, x) -> tuple:
    x = coords(x)
    return tuple(lam(p, x, i) for i in (1, 2, 3))


def in_region(p: GwsParams, x) -> bool:
    """Strict membership in R (all principal Ricci curvatures positive)."""
    return min(lambdas(p, x)) > 0


def log_volume(p: GwsParams, x) -> float:
    x = coords(x)
    return sum(math.log(float(xi)) / float(ai) for xi, ai in zip(x, p.a))


def volume(p: GwsParams, x) -> float:
    """``x1^(1/a1) x2^(1/a2) x3^(1/a3)``, evaluated through logarithms."""
    lv = log_volume(p, x)
    try:
        return math.exp(lv)
    except OverflowError:
        return math.inf


def on_sigma(p: GwsParams, x, tol: float = TOL_SIGMA) -> bool:
    return abs(math.expm1(log_volume(p, x))) <= tol


def normalize_to_unit_volume(p: GwsParams, x) -> MetricPoint:
    """Rescale ``x`` by the unique ``s > 0`` with ``Vol(s x) = 1``.

    ``Vol(s x) = s^(1/a1 + 1/a2 + 1/a3) Vol(x)``, hence ``s = Vol(x)^(-omega)``.
    """
    x = coords(x)
    s = math.exp(-float(p.omega) * log_volume(p, x))
    return MetricPoint(*(s * float(xi) for xi in x))
