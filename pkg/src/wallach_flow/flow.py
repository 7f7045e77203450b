"""Normalized Ricci flow vector field, trajectory integration and crossings.

The integrator is a Dormand-Prince 5(4) pair with PI step-size control and
Hairer's 4th-order continuous extension.  It works on plain Python floats:
for three components this is several times faster than small numpy arrays.

Metric trajectories are advanced in logarithmic coordinates ``u = log x``.
The volume ``sum(u_i / a_i)`` is then a linear first integral, which every
Runge-Kutta method conserves up to roundoff, and the tolerance
``|dx| <= atol + rtol*|x|`` becomes ``|du| <= rtol + atol/x``.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable, List, NamedTuple, Optional, Sequence

from .core import GwsParams, MetricPoint, coords, lambdas, log_volume, others

HORIZON_REACHED = "horizon-reached"
LEFT_BOX = "left-box"
STEP_FAILURE = "step-failure"

EXIT, ENTER, TOUCH = "exit", "enter", "touch"


def vector_field(p: GwsParams, x) -> tuple:
    """Right-hand side ``(f1, f2, f3)`` of the three-equation system.

    Generic arithmetic: rational ``p`` and ``x`` give exact output.
    """
    x = coords(x)
    a = p.a
    prod = x[0] * x[1] * x[2]
    sq_sum = x[0] * x[0] + x[1] * x[1] + x[2] * x[2]
    inv_sum = 1 / a[0] + 1 / a[1] + 1 / a[2]
    B = (1 / (a[0] * x[0]) + 1 / (a[1] * x[1]) + 1 / (a[2] * x[2]) - sq_sum / prod) / inv_sum
    out = []
    for i in (1, 2, 3):
        j, k = others(i)
        xi, xj, xk = x[i - 1], x[j - 1], x[k - 1]
        out.append(-1 - a[i - 1] * (xi * xi - xj * xj - xk * xk) / (xj * xk) + xi * B)
    return tuple(out)


def _field_kernel(p: GwsParams) -> Callable:
    a1, a2, a3 = p.as_float()
    w = 1.0 / (1.0 / a1 + 1.0 / a2 + 1.0 / a3)

    def f(y):
        x1, x2, x3 = y
        s1, s2, s3 = x1 * x1, x2 * x2, x3 * x3
        B = (1.0 / (a1 * x1) + 1.0 / (a2 * x2) + 1.0 / (a3 * x3) - (s1 + s2 + s3) / (x1 * x2 * x3)) * w
        return (
            -1.0 - a1 * (s1 - s2 - s3) / (x2 * x3) + x1 * B,
            -1.0 - a2 * (s2 - s1 - s3) / (x1 * x3) + x2 * B,
            -1.0 - a3 * (s3 - s1 - s2) / (x1 * x2) + x3 * B,
        )

    return f


def _log_kernel(f: Callable) -> Callable:
    """``u' = f(exp u) / exp u`` for a field ``f`` on positive coordinates."""

    def g(u):
        x = tuple(math.exp(v) for v in u)
        return tuple(fi / xi for fi, xi in zip(f(x), x))

    return g


def phi(p: GwsParams, x1: float, x2: float) -> float:
    """Third coordinate on the unit-volume surface over the ``(x1, x2)`` chart."""
    a1, a2, a3 = p.as_float()
    return math.exp(-a3 / a1 * math.log(x1) - a3 / a2 * math.log(x2))


def reduced_field(p: GwsParams, x12: Sequence[float]) -> tuple:
    """Two-equation system on the unit-volume surface: ``f_i(x1, x2, phi)``."""
    x1, x2 = x12
    if not (x1 > 0 and x2 > 0):
        raise ValueError(f"reduced coordinates must be positive, got {(x1, x2)!r}")
    f = vector_field(p, (x1, x2, phi(p, x1, x2)))
    return f[0], f[1]


def _reduced_kernel(p: GwsParams) -> Callable:
    f3 = _field_kernel(p)
    a1, a2, a3 = p.as_float()
    e1, e2 = -a3 / a1, -a3 / a2

    def f(y):
        x1, x2 = y
        r = f3((x1, x2, math.exp(e1 * math.log(x1) + e2 * math.log(x2))))
        return r[0], r[1]

    return f


# --- Dormand-Prince 5(4) -------------------------------------------------

_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40,
)
_D1, _D3, _D4, _D5, _D6, _D7 = (
    -12715105075 / 11282082432, 87487479700 / 32700410799, -10690763975 / 1880347072,
    701980252875 / 199316789632, -1453857185 / 822651844, 69997945 / 29380423,
)


class DenseSegment(NamedTuple):
    """Continuous extension of one accepted step on ``[t0, t0 + h]``."""

    t0: float
    h: float
    r1: tuple
    r2: tuple
    r3: tuple
    r4: tuple
    r5: tuple
    log: bool = False

    def __call__(self, t: float) -> tuple:
        s = (t - self.t0) / self.h
        s1 = 1.0 - s
        y = tuple(
            a + s * (b + s1 * (c + s * (d + s1 * e)))
            for a, b, c, d, e in zip(self.r1, self.r2, self.r3, self.r4, self.r5)
        )
        return tuple(math.exp(v) for v in y) if self.log else y


@dataclass
class IntegrationOptions:
    rtol: float = 1e-9
    atol: float = 1e-12
    box: tuple = (1e-6, 1e6)
    h_max: float = 1.0
    max_steps: int = 500_000
    event_tol: float = 1e-10
    checks_per_step: int = 4
    touch_tol: float = 1e-10
    renormalize_every: int = 0
    stationary_tol: float = 1e-14


def _solve(f, t_end, y0, opts: IntegrationOptions, in_box=None, project=None, log=False):
    """Integrate ``y' = f(y)`` from 0 to ``t_end``.

    With ``log=True`` the state holds logarithms of positive quantities and
    the error scale is ``rtol + atol*exp(-y)``.  Returns
    ``(times, states, segments, status)``.
    """
    n = len(y0)
    rtol, atol = opts.rtol, opts.atol
    t = 0.0
    y = tuple(float(v) for v in y0)
    times, states, segments = [t], [y], []
    k1 = f(y)
    d0 = math.sqrt(sum(v * v for v in y) / n)
    d1 = math.sqrt(sum(v * v for v in k1) / n)
    h = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-6
    h = min(h, opts.h_max, t_end)
    err_old = 1e-4
    steps = 0
    accepted = 0
    status = HORIZON_REACHED
    while t < t_end:
        if steps >= opts.max_steps:
            status = STEP_FAILURE
            break
        steps += 1
        if t + h > t_end:
            h = t_end - t
        try:
            k2 = f(tuple(yi + h * _A21 * a for yi, a in zip(y, k1)))
            k3 = f(tuple(yi + h * (_A31 * a + _A32 * b) for yi, a, b in zip(y, k1, k2)))
            k4 = f(tuple(yi + h * (_A41 * a + _A42 * b + _A43 * c)
                         for yi, a, b, c in zip(y, k1, k2, k3)))
            k5 = f(tuple(yi + h * (_A51 * a + _A52 * b + _A53 * c + _A54 * d)
                         for yi, a, b, c, d in zip(y, k1, k2, k3, k4)))
            k6 = f(tuple(yi + h * (_A61 * a + _A62 * b + _A63 * c + _A64 * d + _A65 * e)
                         for yi, a, b, c, d, e in zip(y, k1, k2, k3, k4, k5)))
            y_new = tuple(yi + h * (_B1 * a + _B3 * c + _B4 * d + _B5 * e + _B6 * g)
                          for yi, a, c, d, e, g in zip(y, k1, k3, k4, k5, k6))
            k7 = f(y_new)
        except (ValueError, ZeroDivisionError, OverflowError):
            y_new = None
        if y_new is None or not all(math.isfinite(v) and (log or v > 0) for v in y_new):
            h *= 0.25
            if h < 1e-14 * max(1.0, t):
                status = STEP_FAILURE
                break
            continue
        # max norm: every component must meet its tolerance
        err = 0.0
        for yi, yn, a, c, d, e, g, q in zip(y, y_new, k1, k3, k4, k5, k6, k7):
            ei = h * (_E1 * a + _E3 * c + _E4 * d + _E5 * e + _E6 * g + _E7 * q)
            if log:
                sc = rtol + atol * math.exp(-max(yi, yn))
            else:
                sc = atol + rtol * max(abs(yi), abs(yn))
            err = max(err, abs(ei) / sc)
        if err <= 1.0:
            diff = tuple(yn - yi for yi, yn in zip(y, y_new))
            bspl = tuple(h * a - dy for a, dy in zip(k1, diff))
            seg = DenseSegment(
                t, h, y, diff, bspl,
                tuple(dy - h * q - b for dy, q, b in zip(diff, k7, bspl)),
                tuple(h * (_D1 * a + _D3 * c + _D4 * d + _D5 * e + _D6 * g + _D7 * q)
                      for a, c, d, e, g, q in zip(k1, k3, k4, k5, k6, k7)),
                log,
            )
            t = t + h if t + h < t_end else t_end
            y = y_new
            k1 = k7
            accepted += 1
            if project is not None and opts.renormalize_every and accepted % opts.renormalize_every == 0:
                y = project(y)
                k1 = f(y)
            times.append(t)
            states.append(y)
            segments.append(seg)
            if in_box is not None and not in_box(y):
                status = LEFT_BOX
                break
            err = max(err, 1e-10)
            fac = 0.9 * err ** (-0.7 / 5) * err_old ** (0.4 / 5)
            h = min(h * min(5.0, max(0.2, fac)), opts.h_max)
            err_old = err
        else:
            h *= max(0.2, 0.9 * err ** (-1 / 5))
            if h < 1e-14 * max(1.0, t):
                status = STEP_FAILURE
                break
    return times, states, segments, status


def _rk_step(f, y, h):
    """One fifth-order Dormand-Prince step of size ``h`` (no error control)."""
    k1 = f(y)
    k2 = f(tuple(yi + h * _A21 * a for yi, a in zip(y, k1)))
    k3 = f(tuple(yi + h * (_A31 * a + _A32 * b) for yi, a, b in zip(y, k1, k2)))
    k4 = f(tuple(yi + h * (_A41 * a + _A42 * b + _A43 * c) for yi, a, b, c in zip(y, k1, k2, k3)))
    k5 = f(tuple(yi + h * (_A51 * a + _A52 * b + _A53 * c + _A54 * d)
                 for yi, a, b, c, d in zip(y, k1, k2, k3, k4)))
    k6 = f(tuple(yi + h * (_A61 * a + _A62 * b + _A63 * c + _A64 * d + _A65 * e)
                 for yi, a, b, c, d, e in zip(y, k1, k2, k3, k4, k5)))
    return tuple(yi + h * (_B1 * a + _B3 * c + _B4 * d + _B5 * e + _B6 * g)
                 for yi, a, c, d, e, g in zip(y, k1, k3, k4, k5, k6))


# --- trajectories ---------------------------------------------------------

class Sample(NamedTuple):
    t: float
    x: tuple
    in_r: bool


class Event(NamedTuple):
    t: float
    i: int
    direction: str


@dataclass
class Trajectory:
    params: GwsParams
    samples: List[Sample]
    events: List[Event] = field(default_factory=list)
    terminal: str = HORIZON_REACHED
    segments: List[DenseSegment] = field(default_factory=list, repr=False)
    stationary: bool = False

    @property
    def times(self) -> list:
        return [s.t for s in self.samples]

    @property
    def points(self) -> list:
        return [s.x for s in self.samples]

    def at(self, t: float) -> tuple:
        """State at time ``t`` from the dense output."""
        if not self.segments:
            if self.stationary:
                return self.samples[0].x
            raise ValueError("trajectory has no dense output")
        t_end = self.segments[-1].t0 + self.segments[-1].h
        if not 0.0 <= t <= t_end:
            raise ValueError(f"t = {t} outside [0, {t_end}]")
        idx = bisect.bisect_right([s.t0 for s in self.segments], t) - 1
        return self.segments[max(idx, 0)](t)

    def max_volume_drift(self) -> float:
        """Largest ``|Vol(x(t)) - Vol(x(0))| / Vol(x(0))`` over the samples."""
        base = log_volume(self.params, self.samples[0].x)
        return max(abs(math.expm1(log_volume(self.params, s.x) - base)) for s in self.samples)

    def region_transitions(self) -> list:
        """``(t, 'exit'|'enter')`` each time membership in R flips."""
        out = []
        for a, b in zip(self.samples, self.samples[1:]):
            if a.in_r != b.in_r:
                # the last crossing inside the bracket decides the new state
                ts = [e.t for e in self.events if a.t <= e.t <= b.t and e.direction != TOUCH]
                tc = max(ts) if ts else 0.5 * (a.t + b.t)
                out.append((tc, ENTER if b.in_r else EXIT))
        return out


def _lambda_fn(p: GwsParams):
    a1, a2, a3 = p.as_float()

    def lam3(x):
        x1, x2, x3 = x
        return (
            a1 * (x1 * x1 - x2 * x2 - x3 * x3) + x2 * x3,
            a2 * (x2 * x2 - x1 * x1 - x3 * x3) + x1 * x3,
            a3 * (x3 * x3 - x1 * x1 - x2 * x2) + x1 * x2,
        )

    return lam3


def _bisect(seg_eval, lam3, i, ta, tb, pos_a, tol):
    while tb - ta > tol:
        tm = 0.5 * (ta + tb)
        if (lam3(seg_eval(tm))[i] > 0) == pos_a:
            ta = tm
        else:
            tb = tm
    return 0.5 * (ta + tb)


def detect_crossings(traj: Trajectory, event_tol: float = 1e-10, checks_per_step: int = 4,
                     touch_tol: float = 1e-10) -> List[Event]:
    """All sign changes of the lambda_i along a trajectory, ordered by time.

    With dense segments each step is probed at ``checks_per_step`` interior
    points and every bracketed change is refined by bisection; without them
    the samples are linearly interpolated.
    """
    lam3 = _lambda_fn(traj.params)
    events: List[Event] = []
    if traj.segments:
        pieces = [(seg, seg.t0, seg.t0 + seg.h) for seg in traj.segments]
    else:
        pieces = []
        for a, b in zip(traj.samples, traj.samples[1:]):
            def lin(t, a=a, b=b):
                s = (t - a.t) / (b.t - a.t)
                return tuple(u + s * (v - u) for u, v in zip(a.x, b.x))
            pieces.append((lin, a.t, b.t))
    for ev, t0, t1 in pieces:
        n = max(1, checks_per_step)
        ts = [t0 + (t1 - t0) * q / n for q in range(n + 1)]
        vals = [lam3(ev(t)) for t in ts]
        for i in range(3):
            crossed = False
            for q in range(n):
                pa, pb = vals[q][i] > 0, vals[q + 1][i] > 0
                if pa != pb:
                    crossed = True
                    tc = _bisect(ev, lam3, i, ts[q], ts[q + 1], pa, event_tol)
                    events.append(Event(tc, i + 1, EXIT if pa else ENTER))
            if not crossed and touch_tol > 0:
                inner = [abs(v[i]) for v in vals[1:-1]]
                if inner and min(inner) < touch_tol:
                    q = 1 + inner.index(min(inner))
                    events.append(Event(ts[q], i + 1, TOUCH))
    events.sort(key=lambda e: (e.t, e.i))
    return events


def integrate(p: GwsParams, x0, horizon: float, opts: Optional[IntegrationOptions] = None) -> Trajectory:
    """Integrate the three-equation system from ``x0`` up to time ``horizon``."""
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    opts = opts or IntegrationOptions()
    x0 = tuple(float(v) for v in coords(x0))
    f = _field_kernel(p)
    lam3 = _lambda_fn(p)

    def member(x):
        return min(lam3(x)) > 0

    f0 = f(x0)
    if max(abs(v) for v in f0) <= opts.stationary_tol * max(1.0, max(x0)):
        return Trajectory(p, [Sample(0.0, x0, member(x0))], stationary=True)

    lo, hi = math.log(opts.box[0]), math.log(opts.box[1])

    def in_box(u):
        return all(lo <= v <= hi for v in u)

    a1, a2, a3 = p.as_float()
    inv = (1.0 / a1, 1.0 / a2, 1.0 / a3)
    w = 1.0 / sum(inv)

    def project(u):
        shift = -w * sum(v * c for v, c in zip(u, inv))
        return tuple(v + shift for v in u)

    g = _log_kernel(f)
    u0 = tuple(math.log(v) for v in x0)
    times, ustates, segments, status = _solve(g, float(horizon), u0, opts, in_box, project, log=True)
    states = [tuple(math.exp(v) for v in u) for u in ustates]
    traj = Trajectory(p, [], terminal=status, segments=segments)
    traj.events = detect_crossings(traj, opts.event_tol, opts.checks_per_step, opts.touch_tol)

    # samples must bracket every event; add probe points where a step hides
    # an even number of crossings of the same lambda_i
    hidden = set()
    for idx, seg in enumerate(segments):
        t0, t1 = seg.t0, seg.t0 + seg.h
        la, lb = lam3(states[idx]), lam3(states[idx + 1])
        for i in range(3):
            n_cross = sum(1 for e in traj.events
                          if e.i == i + 1 and e.direction != TOUCH and t0 <= e.t <= t1)
            if n_cross and n_cross != ((la[i] > 0) != (lb[i] > 0)):
                hidden.add(idx)
    samples = [Sample(times[0], states[0], member(states[0]))]
    n = max(1, opts.checks_per_step)
    for idx, seg in enumerate(segments):
        if idx in hidden:
            for q in range(1, n):
                x = tuple(math.exp(v) for v in _rk_step(g, seg.r1, seg.h * q / n))
                samples.append(Sample(seg.t0 + seg.h * q / n, x, member(x)))
        y = states[idx + 1]
        samples.append(Sample(times[idx + 1], y, member(y)))
    traj.samples = samples
    return traj


def integrate_reduced(p: GwsParams, x12: Sequence[float], horizon: float,
                      opts: Optional[IntegrationOptions] = None):
    """Integrate the two-equation system; returns ``(times, [(x1, x2), ...])``."""
    opts = opts or IntegrationOptions()
    x1, x2 = (float(v) for v in x12)
    if not (x1 > 0 and x2 > 0):
        raise ValueError("reduced coordinates must be positive")
    lo, hi = math.log(opts.box[0]), math.log(opts.box[1])

    def in_box(u):
        return all(lo <= v <= hi for v in u)

    u0 = (math.log(x1), math.log(x2))
    times, ustates, _, status = _solve(_log_kernel(_reduced_kernel(p)), float(horizon), u0,
                                       opts, in_box, log=True)
    return times, [tuple(math.exp(v) for v in u) for u in ustates]


def sample_region(p: GwsParams, n: int, rng, box=(0.05, 4.0), max_tries: int = 1_000_000) -> list:
    """Rejection-sample ``n`` points of R on the unit-volume surface.

    ``x1, x2`` are drawn log-uniformly from ``box`` and ``x3`` is fixed by
    the volume constraint.
    """
    lo, hi = math.log(box[0]), math.log(box[1])
    out = []
    tries = 0
    while len(out) < n:
        tries += 1
        if tries > max_tries:
            raise RuntimeError(f"rejection sampling found only {len(out)} of {n} points in R")
        x1 = math.exp(rng.uniform(lo, hi))
        x2 = math.exp(rng.uniform(lo, hi))
        x = (x1, x2, phi(p, x1, x2))
        if min(lambdas(p, x)) > 0:
            out.append(MetricPoint(*x))
    return out
