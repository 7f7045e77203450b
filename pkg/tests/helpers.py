"""Seeding utilities shared by the dynamic tests."""

import math

from wallach_flow.boundary import curve_point, grad_lambda
from wallach_flow.core import GwsParams, normalize_to_unit_volume


def nudged_seed(p, i, t, eps):
    """Point of r_i at parameter t moved by eps along the unit normal grad(lambda_i).

    Positive eps moves into R (locally), negative eps out of it.  The result
    is projected back to the unit-volume surface.
    """
    x = curve_point(p, i, t)
    g = grad_lambda(GwsParams(*p.as_float()), x, i)
    n = math.sqrt(sum(v * v for v in g))
    y = [a + eps * b / n for a, b in zip(x, g)]
    return normalize_to_unit_volume(p, y)
