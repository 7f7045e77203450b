"""Boundary curves of the positive-Ricci region on the unit-volume surface.

For index ``i`` with ``others(i) = (j, k)`` the curve ``r_i`` (where
``lambda_i = 0`` on the surface) is parametrized by ``t = x_j / x_k``.  The
low branch ``t in (0, m_i)`` ends at the intersection with ``r_j`` and the
high branch ``t in (M_i, inf)`` starts at the intersection with ``r_k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from .core import DomainError, GwsParams, MetricPoint, coords, gap_position, others
from .flow import vector_field

LOW, HIGH = "low", "high"
GUARD = 1e-9


def phi_psi(ai, aj) -> tuple[float, float]:
    """Slopes ``(Phi, Psi)`` of the common line of two cones.

    The common line of ``lambda_i = 0`` and ``lambda_j = 0`` (away from the
    ``x_k = 0`` plane) is ``x_i : x_j : x_k = Phi : Psi : 1``.  Written without
    the difference of squares so that ``ai == aj`` needs no special branch.
    """
    ai, aj = float(ai), float(aj)
    ui, uj = 1.0 - 4.0 * ai * ai, 1.0 - 4.0 * aj * aj
    root = math.sqrt(ui * uj)
    return 2.0 * ui * aj / (root + ui), 2.0 * uj * ai / (root + uj)


def _check_t(p: GwsParams, i: int, t) -> None:
    if not t > 0:
        raise DomainError(f"curve parameter must be positive, got {t}")
    ai = p.ai(i)
    if not (isinstance(t, Fraction) and p.exact):
        ai, t = float(ai), float(t)
    if gap_position(ai, t) == 0:
        raise DomainError(
            f"t = {float(t)} lies in the forbidden gap [m_{i}, M_{i}] = "
            f"[{p.m(i):.12g}, {p.M(i):.12g}] where t^2 - t/a_{i} + 1 <= 0"
        )


def branch_of(p: GwsParams, i: int, t) -> str:
    _check_t(p, i, t)
    return LOW if float(t) < 1.0 else HIGH


def curve_point(p: GwsParams, i: int, t) -> MetricPoint:
    """Point of ``r_i`` with parameter ``t = x_j / x_k``."""
    _check_t(p, i, t)
    t = float(t)
    j, k = others(i)
    ai, aj, ak = (float(p.ai(n)) for n in (i, j, k))
    w = float(p.omega)
    q = t * t - t / ai + 1.0
    log_xi = -w / aj * math.log(t) + 0.5 * w * (1.0 / aj + 1.0 / ak) * math.log(q)
    xi = math.exp(log_xi)
    xk = math.exp(log_xi - 0.5 * math.log(q))
    xj = t * xk
    x = [0.0, 0.0, 0.0]
    x[i - 1], x[j - 1], x[k - 1] = xi, xj, xk
    return MetricPoint(*x)


@dataclass(frozen=True)
class IntersectionPoint:
    pair: tuple
    x: MetricPoint
    t: float
    branch: str


def intersection_point(p: GwsParams, i: int, j: int) -> IntersectionPoint:
    """The single common point of ``r_i`` and ``r_j``.

    ``x_i = Phi p0``, ``x_j = Psi p0``, ``x_k = p0`` with
    ``p0 = Phi^(-omega/a_i) Psi^(-omega/a_j)`` so that the point has unit volume.
    """
    if i == j:
        raise DomainError("intersection needs two different indices")
    others(i)
    k = 6 - i - j
    if k not in (1, 2, 3):
        raise DomainError(f"invalid index pair {(i, j)!r}")
    ai, aj = float(p.ai(i)), float(p.ai(j))
    w = float(p.omega)
    u, v = phi_psi(ai, aj)
    p0 = math.exp(-w / ai * math.log(u) - w / aj * math.log(v))
    x = [0.0, 0.0, 0.0]
    x[i - 1], x[j - 1], x[k - 1] = u * p0, v * p0, p0
    # parameter on r_i is x_j'/x_k' with (j', k') = others(i)
    if others(i)[0] == j:
        t, branch = v, LOW
    else:
        t, branch = 1.0 / v, HIGH
    return IntersectionPoint((i, j), MetricPoint(*x), t, branch)


def t_markers(p: GwsParams, i: int) -> tuple[float, float]:
    """``(t_ij, t_ik)``: where the low branch ends and the high branch starts."""
    j, k = others(i)
    ai = p.ai(i)
    return phi_psi(ai, p.ai(j))[1], 1.0 / phi_psi(ai, p.ai(k))[1]


def i_curve(p: GwsParams, k: int, tau: float) -> MetricPoint:
    """Point ``x_i = x_j = tau`` on the unit-volume surface (``{i, j} = others(k)``)."""
    if not tau > 0:
        raise DomainError(f"tau must be positive, got {tau}")
    i, j = others(k)
    ai, aj, ak = (float(p.ai(n)) for n in (i, j, k))
    x = [0.0, 0.0, 0.0]
    x[i - 1] = x[j - 1] = float(tau)
    x[k - 1] = math.exp(-ak * (1.0 / ai + 1.0 / aj) * math.log(tau))
    return MetricPoint(*x)


def i_curve_crossing(p: GwsParams, k: int, i: Optional[int] = None) -> tuple[float, float]:
    """Where the diagonal curve ``I_k`` meets ``r_i``: returns ``(tau0, t)``.

    On ``I_k`` we have ``lambda_i = x_k (tau - a_i x_k)``, which vanishes only
    at ``tau0 = a_i^(1/(1 + e))`` with ``e = a_k (1/a_i + 1/a_j)``.  The
    parameter there is ``a_i`` or ``1/a_i`` depending on the order of indices.
    """
    pair = others(k)
    if i is None:
        i = pair[0]
    if i not in pair:
        raise DomainError(f"I_{k} meets r_i only for i in {pair}, got {i}")
    j = pair[1] if i == pair[0] else pair[0]
    ai, aj, ak = (float(p.ai(n)) for n in (i, j, k))
    tau0 = math.exp(math.log(ai) / (1.0 + ak * (1.0 / ai + 1.0 / aj)))
    t = ai if others(i)[1] == k else 1.0 / ai
    return tau0, t


def grad_lambda(p: GwsParams, x, i: int) -> tuple:
    """Gradient of ``lambda_i`` in ``(x1, x2, x3)`` ordering."""
    x = coords(x)
    j, k = others(i)
    ai = p.ai(i)
    xi, xj, xk = x[i - 1], x[j - 1], x[k - 1]
    g = [0, 0, 0]
    g[i - 1] = 2 * ai * xi
    g[j - 1] = -2 * ai * xj + xk
    g[k - 1] = -2 * ai * xk + xj
    return tuple(g)


def field_normal_product(p: GwsParams, i: int, t) -> float:
    """``(V, grad lambda_i)`` at ``curve_point(p, i, t)``; positive means into R."""
    x = curve_point(p, i, t)
    pf = GwsParams(*p.as_float())
    v = vector_field(pf, x)
    g = grad_lambda(pf, x, i)
    return sum(a * b for a, b in zip(v, g))


def field_normal_closed_form(p: GwsParams, i: int, t) -> float:
    """``(F - G) / (2 a_i t x_i^2)``, the closed-form sign carrier on ``r_i``.

    This is a positive multiple of :func:`field_normal_product` (the factor
    depends on ``t``), so the two agree in sign but not in magnitude.
    """
    x = curve_point(p, i, t)
    t = float(t)
    j, k = others(i)
    ai, aj, ak = (float(p.ai(n)) for n in (i, j, k))
    F = (aj + ak) * (t - 2 * ai) * (2 * ai * t - 1)
    G = (1 - 2 * ai) * ai * (t + 1) * math.sqrt(t * t - t / ai + 1)
    return (F - G) / (2 * ai * t * x[i - 1] ** 2)


def angle_alpha(p: GwsParams, i: int, t) -> float:
    """Angle in degrees between the field and the inward normal of ``r_i``."""
    x = curve_point(p, i, t)
    pf = GwsParams(*p.as_float())
    v = vector_field(pf, x)
    g = grad_lambda(pf, x, i)
    dot = sum(a * b for a, b in zip(v, g))
    nv = math.sqrt(sum(a * a for a in v))
    ng = math.sqrt(sum(b * b for b in g))
    c = max(-1.0, min(1.0, dot / (nv * ng)))
    return math.degrees(math.acos(c))


@dataclass(frozen=True)
class CurveComponent:
    """One branch of ``r_i`` with its parameter interval.

    ``trimmed`` intervals stop at the intersection points with the
    neighbouring curves; the untrimmed ones run up to the gap.
    """

    i: int
    branch: str
    t_lo: float
    t_hi: float
    trimmed: bool


def component(p: GwsParams, i: int, branch: str, trimmed: bool = True) -> CurveComponent:
    t_ij, t_ik = t_markers(p, i)
    if branch == LOW:
        hi = t_ij if trimmed else p.m(i)
        return CurveComponent(i, LOW, 0.0, hi, trimmed)
    if branch == HIGH:
        lo = t_ik if trimmed else p.M(i)
        return CurveComponent(i, HIGH, lo, math.inf, trimmed)
    raise DomainError(f"branch must be {LOW!r} or {HIGH!r}, got {branch!r}")


@dataclass(frozen=True)
class CurveSample:
    t: float
    x: MetricPoint
    product: float
    alpha_deg: float


def branch_grid(comp: CurveComponent, n: int = 200, decades: float = 3.0) -> List[float]:
    """Log-spaced parameters covering ``decades`` decades of the branch.

    Untrimmed ends at ``m_i`` / ``M_i`` are pulled in by a relative guard band.
    """
    if n < 2:
        raise ValueError("need at least two grid points")
    if comp.branch == LOW:
        hi = comp.t_hi if comp.trimmed else comp.t_hi * (1.0 - GUARD)
        lo = hi * 10.0 ** (-decades)
    else:
        lo = comp.t_lo if comp.trimmed else comp.t_lo * (1.0 + GUARD)
        hi = lo * 10.0 ** decades
    a, b = math.log(lo), math.log(hi)
    return [math.exp(a + (b - a) * q / (n - 1)) for q in range(n)]


def sample_branch(p: GwsParams, i: int, branch: str, n: int = 200, trimmed: bool = True,
                  decades: float = 3.0) -> List[CurveSample]:
    comp = component(p, i, branch, trimmed)
    out = []
    for t in branch_grid(comp, n, decades):
        out.append(CurveSample(t, curve_point(p, i, t), field_normal_product(p, i, t),
                               angle_alpha(p, i, t)))
    return out
