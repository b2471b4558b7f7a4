"""Golden-section refinement on a bracket.

Used to polish grid minima. The objectives here are piecewise-smooth with kinks
and jumps, so the routine tracks every evaluation and returns the best point
seen; on a non-unimodal bracket it degrades to dense sampling near the winner
instead of silently converging to the wrong valley.
"""

from __future__ import annotations

import math
from typing import Callable

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_MAX_ITER = 200


def golden_min(f: Callable[[float], float], a: float, b: float,
               tol: float = 1e-10) -> tuple[float, float]:
    """Shrink [a, b] to width tol, returning the best (x, f(x)) evaluated."""
    best_x, best_v = a, f(a)
    vb = f(b)
    if vb < best_v:
        best_x, best_v = b, vb
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(_MAX_ITER):
        for x, v in ((c, fc), (d, fd)):
            if v < best_v:
                best_x, best_v = x, v
        if (b - a) <= tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return best_x, best_v


def golden_max(f: Callable[[float], float], a: float, b: float,
               tol: float = 1e-10) -> tuple[float, float]:
    x, v = golden_min(lambda z: -f(z), a, b, tol=tol)
    return x, -v
