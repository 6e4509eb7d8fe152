"""Greatest convex minorant geometry.

Lower convex hulls of finite point sets, the minorant of one cumulative
hazard composed with the inverse of another, and left-derivative (slope)
extraction.  The hull sweep uses a strict cross-product test, so collinear
input points stay in the vertex list: the vertices are exactly the input
points lying on the minorant.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .survival_core import StepFunction, generalized_inverse

__all__ = [
    "PlanePoint",
    "ConvexMinorantFit",
    "lower_convex_hull",
    "gcm_of_composed_hazards",
    "left_slope_at",
]


@dataclass(frozen=True)
class PlanePoint:
    """A point on the (cumulative hazard, cumulative hazard) plane."""

    u: float
    v: float

    def __post_init__(self):
        if not (np.isfinite(self.u) and np.isfinite(self.v)):
            raise ValueError(f"coordinates must be finite, got ({self.u}, {self.v})")


@dataclass(frozen=True)
class ConvexMinorantFit:
    """Vertices (strictly increasing u) and segment slopes of a minorant."""

    vertices: tuple[PlanePoint, ...]
    slopes: tuple[float, ...]

    def __post_init__(self):
        if len(self.slopes) != max(len(self.vertices) - 1, 0):
            raise ValueError("need one slope per vertex pair")

    @property
    def vertex_u(self) -> np.ndarray:
        return np.array([p.u for p in self.vertices])

    @property
    def vertex_v(self) -> np.ndarray:
        return np.array([p.v for p in self.vertices])

    def value_at(self, u):
        """Piecewise-linear evaluation on [first u, last u]."""
        us, vs = self.vertex_u, self.vertex_v
        if np.any(u < us[0]) or np.any(u > us[-1]):
            raise ValueError("outside hull domain")
        out = np.interp(u, us, vs)
        if np.isscalar(u) or np.ndim(u) == 0:
            return float(out)
        return out


def _cross(a: PlanePoint, b: PlanePoint, c: PlanePoint) -> float:
    return (b.u - a.u) * (c.v - a.v) - (b.v - a.v) * (c.u - a.u)


def lower_convex_hull(points: Sequence[PlanePoint]) -> ConvexMinorantFit:
    """Lower convex hull of a finite point set.

    Duplicate abscissas keep the minimum ordinate.  Pops only on strictly
    negative cross products, so points lying exactly on the hull survive
    as vertices and consecutive equal slopes are possible.
    """
    if len(points) == 0:
        raise ValueError("empty input")
    best: dict[float, PlanePoint] = {}
    for p in points:
        q = best.get(p.u)
        if q is None or p.v < q.v:
            best[p.u] = p
    ordered = sorted(best.values(), key=lambda p: p.u)
    stack: list[PlanePoint] = []
    for p in ordered:
        while len(stack) >= 2 and _cross(stack[-2], stack[-1], p) < 0:
            stack.pop()
        stack.append(p)
    slopes = tuple(
        (b.v - a.v) / (b.u - a.u) for a, b in zip(stack, stack[1:]))
    return ConvexMinorantFit(tuple(stack), slopes)


def gcm_of_composed_hazards(lambda_S: StepFunction, lambda_T: StepFunction,
                            eta: float) -> ConvexMinorantFit:
    """Minorant of u -> lambda_S(lambda_T^-(u)) on [0, eta].

    The composition is a left-continuous step function taking the value
    lambda_S(t_j) on (lambda_T(t_{j-1}), lambda_T(t_j)], so its greatest
    convex minorant equals the lower convex hull of the points
    (lambda_T(t_j), lambda_S(t_j)) anchored at (0, 0), with one extra
    boundary point when eta falls strictly inside a segment.
    """
    if eta > lambda_T.sup:
        raise ValueError(f"eta beyond support: {eta} > {lambda_T.sup}")
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    pts = [PlanePoint(0.0, 0.0)]
    covered = eta == 0.0
    for t, u in zip(lambda_T.knots, lambda_T.values):
        if u > eta:
            break
        pts.append(PlanePoint(float(u), lambda_S(float(t))))
        if u == eta:
            covered = True
    if not covered:
        t_eta = generalized_inverse(lambda_T, eta)
        pts.append(PlanePoint(float(eta), lambda_S(t_eta)))
    return lower_convex_hull(pts)


def left_slope_at(fit: ConvexMinorantFit, u: float) -> float:
    """Slope of the hull segment reaching u from the left.

    At a vertex this is the slope of the segment ending there; at the
    first vertex and outside [first u, last u] there is no such segment.
    """
    us = fit.vertex_u
    if len(fit.vertices) < 2 or u <= us[0] or u > us[-1]:
        raise ValueError(f"outside hull domain: u={u}")
    idx = int(np.searchsorted(us, u, side="left"))
    return fit.slopes[idx - 1]
