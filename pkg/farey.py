"""
Local combinatorics of the Farey tessellation.

Every oriented Farey edge has one Farey triangle on each side; the apex on
the right is the signed mediant B(1) of the matrix B whose columns are the
terminal and initial points, and the apex on the left is B(-1).
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import FrozenSet, List, Set

from modular_arithmetic import (
    INFINITY,
    MINUS_ONE,
    ONE,
    ZERO,
    Edge,
    ExtRational,
    NotAFareyEdge,
    OrientedEdge,
    undirected,
)

logger = logging.getLogger(__name__)

BASE_QUAD = (MINUS_ONE, ZERO, ONE, INFINITY)


def _signed_columns(e: OrientedEdge):
    """Columns (terminal, initial) with signs fixed so the determinant is +1."""
    x, y = e.initial, e.terminal
    det = y.p * x.q - x.p * y.q
    if abs(det) != 1:
        raise NotAFareyEdge(f"{x} and {y} are not Farey neighbours")
    if det == 1:
        return (y.p, y.q), (x.p, x.q)
    return (y.p, y.q), (-x.p, -x.q)


def third_vertex_right(e: OrientedEdge) -> ExtRational:
    """Apex of the Farey triangle to the right of e (inside the ccw arc from initial to terminal)."""
    (yp, yq), (xp, xq) = _signed_columns(e)
    return ExtRational.of(yp + xp, yq + xq)


def third_vertex_left(e: OrientedEdge) -> ExtRational:
    """Apex of the Farey triangle to the left of e."""
    (yp, yq), (xp, xq) = _signed_columns(e)
    return ExtRational.of(xp - yp, xq - yq)


@dataclass
class FareyRegion:
    """Finite union of Farey triangles grown from the two base triangles."""

    edges: Set[Edge] = field(default_factory=set)
    depth: int = 0
    boundary: List[OrientedEdge] = field(default_factory=list)

    @property
    def vertices(self) -> FrozenSet[ExtRational]:
        return frozenset(v for edge in self.edges for v in edge)

    def to_json(self):
        return sorted(
            ([str(a), str(b)] for a, b in self.edges),
            key=lambda pair: (ExtRational.parse(pair[0]).sort_key(), ExtRational.parse(pair[1]).sort_key()),
        )


def farey_edges_to_depth(depth: int) -> FareyRegion:
    """
    Farey edges reachable from the doe by crossing at most depth triangles.

    Depth 0 is the quadrilateral (-1, 0, 1, ∞) split by (0, ∞); each further
    layer adjoins the outer Farey triangle on every boundary edge.

    Args:
        depth: Number of subdivision layers, >= 0

    Returns:
        FareyRegion with its edges and counterclockwise boundary
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    boundary = [
        OrientedEdge(BASE_QUAD[i], BASE_QUAD[(i + 1) % 4]) for i in range(4)
    ]
    edges: Set[Edge] = {undirected(ZERO, INFINITY)}
    edges.update(e.undirected() for e in boundary)
    for _ in range(depth):
        next_boundary: List[OrientedEdge] = []
        for e in boundary:
            apex = third_vertex_right(e)
            left = OrientedEdge(e.initial, apex)
            right = OrientedEdge(apex, e.terminal)
            edges.add(left.undirected())
            edges.add(right.undirected())
            next_boundary.extend((left, right))
        boundary = next_boundary
    logger.debug(f"Farey region of depth {depth}: {len(edges)} edges")
    return FareyRegion(edges=edges, depth=depth, boundary=boundary)


def mediant(u: ExtRational, v: ExtRational) -> ExtRational:
    return ExtRational.of(u.p + v.p, u.q + v.q)


def minkowski_q(x: ExtRational) -> Fraction:
    """
    Minkowski question-mark function on a finite rational.

    Descends the Stern-Brocot tree between floor(x) and floor(x) + 1; each
    mediant is sent to the midpoint of the images of its parents.
    """
    if x.is_infinite:
        raise ValueError("minkowski_q is defined on finite rationals only")
    target = x.to_fraction()
    n = floor(target)
    if target == n:
        return Fraction(n)
    lo, hi = ExtRational.of(n), ExtRational.of(n + 1)
    q_lo, q_hi = Fraction(n), Fraction(n + 1)
    while True:
        mid = mediant(lo, hi)
        q_mid = (q_lo + q_hi) / 2
        value = mid.to_fraction()
        if value == target:
            return q_mid
        if target < value:
            hi, q_hi = mid, q_mid
        else:
            lo, q_lo = mid, q_mid


def minkowski_q_inverse(y: Fraction) -> ExtRational:
    """Farey vertex whose ?-image is the dyadic rational y."""
    y = Fraction(y)
    if y.denominator & (y.denominator - 1):
        raise ValueError(f"{y} is not a dyadic rational")
    n = floor(y)
    if y == n:
        return ExtRational.of(n)
    lo, hi = ExtRational.of(n), ExtRational.of(n + 1)
    q_lo, q_hi = Fraction(n), Fraction(n + 1)
    while True:
        mid = mediant(lo, hi)
        q_mid = (q_lo + q_hi) / 2
        if q_mid == y:
            return mid
        if y < q_mid:
            hi, q_hi = mid, q_mid
        else:
            lo, q_lo = mid, q_mid
