"""CSV and JSON writers with a reproducibility header.

Floats are written with 17 significant digits in CSV, which round-trips
binary64 exactly; JSON uses Python's shortest round-trip repr, which is
also exact.  Metadata goes into leading ``#`` lines of a CSV file and into a
``"meta"`` object in JSON.
"""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from . import __version__
from .core import lambdas


def fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    return str(v)


def metadata(command: str, config: dict, seed: Optional[int] = None,
             tolerances: Optional[dict] = None) -> dict:
    return {
        "tool": "wallach-flow",
        "version": __version__,
        "command": command,
        "config": config,
        "seed": seed,
        "tolerances": tolerances or {},
    }


def _plain(obj):
    """Make ``obj`` JSON-ready: Fractions become ``"p/q"`` strings, inf becomes a string."""
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return fmt(obj)
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def dumps_json(payload: dict, meta: Optional[dict] = None) -> str:
    body = dict(payload)
    if meta is not None:
        body = {"meta": meta, **body}
    return json.dumps(_plain(body), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def dumps_csv(header: Sequence[str], rows: Iterable[Sequence], meta: Optional[dict] = None) -> str:
    buf = io.StringIO()
    if meta is not None:
        for line in json.dumps(_plain(meta), sort_keys=True, indent=1).splitlines():
            buf.write("# " + line + "\r\n")
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


TRAJECTORY_HEADER = ("t", "x1", "x2", "x3", "lambda1", "lambda2", "lambda3", "inR")
CURVE_HEADER = ("t", "x1", "x2", "x3", "product", "alpha_deg")


def trajectory_rows(traj) -> list:
    pf = traj.params
    rows = []
    for s in traj.samples:
        lam = lambdas(type(pf)(*pf.as_float()), s.x)
        rows.append((s.t, *s.x, *lam, s.in_r))
    return rows


def trajectory_payload(traj) -> dict:
    return {
        "params": [str(a) if isinstance(a, Fraction) else a for a in traj.params.a],
        "terminal": traj.terminal,
        "stationary": traj.stationary,
        "samples": [{"t": s.t, "x": list(s.x), "inR": s.in_r} for s in traj.samples],
        "events": [{"t": e.t, "i": e.i, "direction": e.direction} for e in traj.events],
    }


def curve_rows(samples) -> list:
    return [(s.t, *s.x, s.product, s.alpha_deg) for s in samples]
