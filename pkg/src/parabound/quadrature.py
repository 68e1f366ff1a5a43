"""Globally adaptive Gauss-Kronrod quadrature for the bound integrands.

The bound integrals contain absolute values and therefore kinks; callers
pre-split the integration interval at every known kink location so each
panel sees a smooth integrand, and the adaptive bisection mops up the rest.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import bisect

from .errors import QuadratureNotConverged

# 15-point Kronrod extension of the 7-point Gauss rule (standard constants).
_XK = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0, 0.207784955007898, 0.405845151377397,
    0.586087235467691, 0.741531185599394, 0.864864423359769,
    0.949107912342759, 0.991455371120813,
])
_WK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529,
])
# The Gauss-7 nodes are every second Kronrod node.
_GAUSS_IDX = np.arange(1, 15, 2)
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870,
])


@dataclass(frozen=True)
class QuadConfig:
    """Tolerances and subdivision budget for adaptive quadrature."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 4000

    def __post_init__(self):
        for name in ("abs_tol", "rel_tol"):
            v = getattr(self, name)
            if not (0.0 < v <= 1e-2):
                raise ValueError(f"{name} must lie in (0, 1e-2], got {v}")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


def _panel(f: Callable, lo: float, hi: float) -> tuple[float, float]:
    """Kronrod value and |K15 - G7| error estimate on one panel."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    ys = np.asarray(f(mid + half * _XK), dtype=float)
    k15 = half * float(_WK @ ys)
    g7 = half * float(_WG @ ys[_GAUSS_IDX])
    return k15, abs(k15 - g7)


def adaptive_quadrature(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    config: QuadConfig | None = None,
    breakpoints: Iterable[float] = (),
) -> tuple[float, float]:
    """Integrate a vectorized integrand over [a, b].

    Returns (value, error_estimate). Panels are seeded from the sorted
    breakpoints strictly inside (a, b), then the worst panel is bisected
    until the summed error estimate meets max(abs_tol, rel_tol*|value|).

    Raises QuadratureNotConverged when the subdivision budget runs out.
    """
    cfg = config or QuadConfig()
    if not (math.isfinite(a) and math.isfinite(b)) or a > b:
        raise ValueError(f"bad integration interval [{a}, {b}]")
    if a == b:
        return 0.0, 0.0

    edges = [a]
    for x in sorted(set(float(p) for p in breakpoints)):
        if a < x < b and x - edges[-1] > 1e-15 * (b - a):
            edges.append(x)
    edges.append(b)

    heap: list[tuple[float, int, float, float, float]] = []
    serial = 0
    total = 0.0
    total_err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err = _panel(f, lo, hi)
        total += val
        total_err += err
        heapq.heappush(heap, (-err, serial, lo, hi, val))
        serial += 1

    splits = 0
    width_floor = 1e-15 * (b - a)
    while total_err > max(cfg.abs_tol, cfg.rel_tol * abs(total)):
        neg_err, _, lo, hi, val = heapq.heappop(heap)
        if splits >= cfg.max_subdivisions or hi - lo <= width_floor:
            raise QuadratureNotConverged(
                f"error {total_err:.3e} above tolerance after {splits} subdivisions"
            )
        splits += 1
        mid = 0.5 * (lo + hi)
        v1, e1 = _panel(f, lo, mid)
        v2, e2 = _panel(f, mid, hi)
        total += v1 + v2 - val
        total_err += e1 + e2 + neg_err  # neg_err == -old error
        heapq.heappush(heap, (-e1, serial, lo, mid, v1))
        serial += 1
        heapq.heappush(heap, (-e2, serial, mid, hi, v2))
        serial += 1

    return total, total_err


def sign_change_roots(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    n_scan: int = 1000,
) -> list[float]:
    """Locate roots of f on [a, b] by sign-change scan plus bisection.

    The scan uses n_scan uniform intervals; each bracketed sign change is
    refined to 1e-12 relative accuracy. Grid points where f vanishes
    exactly are returned as-is. Jump discontinuities that change sign are
    reported at the jump location, which is exactly where a quadrature
    panel boundary is wanted.
    """
    if a >= b:
        return []
    xs = np.linspace(a, b, n_scan + 1)
    ys = np.asarray(f(xs), dtype=float)
    roots: list[float] = []
    span = b - a

    def fs(x: float) -> float:
        return float(f(np.asarray(x)))

    for i in range(n_scan):
        y0, y1 = ys[i], ys[i + 1]
        if y0 == 0.0:
            roots.append(float(xs[i]))
        elif y0 * y1 < 0.0:
            roots.append(
                float(bisect(fs, float(xs[i]), float(xs[i + 1]),
                             xtol=1e-15 * span, rtol=1e-12))
            )
    if ys[-1] == 0.0:
        roots.append(float(xs[-1]))

    deduped: list[float] = []
    for r in sorted(roots):
        if not deduped or r - deduped[-1] > 1e-12 * span:
            deduped.append(r)
    return deduped
