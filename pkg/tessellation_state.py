"""
Marked tessellations with finite support.

A state is an ideal polygon P with Farey boundary, a triangulation of P by
diagonals, a distinguished oriented edge (doe) kept as an interior diagonal,
and a finite set of marked edges. Outside P the tessellation is Farey and
unmarked. Two markings are identified when they differ by toggling the
three edges of complementary triangles (Kasteleyn reflections).
"""

import logging
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple, Union

import networkx as nx

from farey import BASE_QUAD, third_vertex_right
from gf2 import gf2_in_span, gf2_rank
from modular_arithmetic import (
    DOE,
    Edge,
    ExtRational,
    OrientedEdge,
    ccw_between,
    farey_neighbors,
    in_ccw_arc,
    undirected,
)

logger = logging.getLogger(__name__)

Triangle = Tuple[ExtRational, ExtRational, ExtRational]
EdgeLike = Union[OrientedEdge, Tuple[ExtRational, ExtRational]]


class InvalidState(ValueError):
    """Raised when a state violates the polygon, triangulation or doe invariants."""


class EdgeNotFarey(ValueError):
    """Raised when an edge is neither current nor an edge of the Farey tessellation outside P."""


class TriangleNotInSupport(ValueError):
    """Raised when a triangle is not a complementary triangle inside P."""


class EdgeIsDoe(ValueError):
    """Raised when an operation is undefined on the doe's own edge."""


class DifferentTessellations(ValueError):
    """Raised when two markings live on different tessellations."""


class Generator(str, Enum):
    """Generators of the spin Ptolemy group and their inverses."""

    ALPHA = "a"
    ALPHA_INV = "A"
    BETA = "b"
    BETA_INV = "B"
    T = "t"
    T_INV = "T"

    @property
    def inverse(self) -> "Generator":
        return Generator(self.value.swapcase())

    @property
    def symbol(self) -> str:
        base = {"a": "α", "b": "β", "t": "t"}[self.value.lower()]
        return base if self.value.islower() else base + "⁻¹"


def as_edge(e: EdgeLike) -> Edge:
    if isinstance(e, OrientedEdge):
        return e.undirected()
    return undirected(e[0], e[1])


def crosses(d1: Edge, d2: Edge) -> bool:
    """True iff two chords of the circle cross in the interior of the disk."""
    a, b = d1
    c, d = d2
    if {a, b} & {c, d}:
        return False
    return ccw_between(a, c, b) != ccw_between(a, d, b)


@dataclass(frozen=True)
class MarkedTessellation:
    """A point of the spin tessellation space with finite support."""

    support: Tuple[ExtRational, ...]
    diagonals: FrozenSet[Edge]
    doe: OrientedEdge
    marks: FrozenSet[Edge] = frozenset()

    @cached_property
    def boundary_oriented(self) -> Tuple[OrientedEdge, ...]:
        """Boundary edges of P, each oriented counterclockwise."""
        n = len(self.support)
        return tuple(OrientedEdge(self.support[i], self.support[(i + 1) % n]) for i in range(n))

    @cached_property
    def boundary(self) -> FrozenSet[Edge]:
        return frozenset(e.undirected() for e in self.boundary_oriented)

    @cached_property
    def edges(self) -> Tuple[Edge, ...]:
        """All current edges inside or on P, in a fixed order."""
        return tuple(
            sorted(
                self.boundary | self.diagonals,
                key=lambda e: (e[0].sort_key(), e[1].sort_key()),
            )
        )

    @cached_property
    def triangles(self) -> Tuple[Triangle, ...]:
        """Complementary triangles inside P, vertices in counterclockwise order."""
        graph = nx.Graph()
        graph.add_edges_from(self.edges)
        found = [c for c in nx.enumerate_all_cliques(graph) if len(c) == 3]
        ordered = [tuple(sorted(c, key=lambda v: v.sort_key())) for c in found]
        return tuple(sorted(ordered, key=lambda t: tuple(v.sort_key() for v in t)))

    @cached_property
    def edge_apexes(self) -> Dict[Edge, List[ExtRational]]:
        apexes: Dict[Edge, List[ExtRational]] = {e: [] for e in self.edges}
        for tri in self.triangles:
            for i in range(3):
                apexes[undirected(tri[i], tri[(i + 1) % 3])].append(tri[(i + 2) % 3])
        return apexes

    @property
    def doe_edge(self) -> Edge:
        return self.doe.undirected()

    def is_marked(self, e: EdgeLike) -> bool:
        return as_edge(e) in self.marks

    def apex_right(self, e: OrientedEdge) -> Optional[ExtRational]:
        """Third vertex of the P-triangle to the right of e, or None if the right side is outside P."""
        for z in self.edge_apexes.get(e.undirected(), []):
            if ccw_between(e.initial, z, e.terminal):
                return z
        return None

    def apex_left(self, e: OrientedEdge) -> Optional[ExtRational]:
        return self.apex_right(e.reversed())

    def unmarked(self) -> "MarkedTessellation":
        return replace(self, marks=frozenset())

    def to_json(self) -> dict:
        return {
            "support": [str(v) for v in self.support],
            "diagonals": [[str(a), str(b)] for a, b in _sorted_edges(self.diagonals)],
            "doe": [str(self.doe.initial), str(self.doe.terminal)],
            "marks": [[str(a), str(b)] for a, b in _sorted_edges(self.marks)],
        }

    def __str__(self) -> str:
        verts = " ".join(str(v) for v in self.support)
        return f"State(support=[{verts}], doe={self.doe}, marks={len(self.marks)})"


def _sorted_edges(edges: Iterable[Edge]) -> List[Edge]:
    return sorted(edges, key=lambda e: (e[0].sort_key(), e[1].sort_key()))


def make_state(
    support: Iterable[ExtRational],
    diagonals: Iterable[EdgeLike],
    doe: OrientedEdge,
    marks: Iterable[EdgeLike] = (),
) -> MarkedTessellation:
    """
    Build and validate a state from loosely typed parts.

    A doe on the boundary of P is moved inside by gluing on the Farey
    triangle beyond it.
    """
    state = MarkedTessellation(
        support=tuple(sorted(set(support), key=lambda v: v.sort_key())),
        diagonals=frozenset(as_edge(d) for d in diagonals),
        doe=doe,
        marks=frozenset(as_edge(m) for m in marks),
    )
    validate_state(state)
    if state.doe_edge in state.boundary:
        state = grow_support(state, state.doe_edge)
    return state


def validate_state(s: MarkedTessellation) -> None:
    """
    Check the type invariants of a state.

    Raises:
        InvalidState: naming the first violated invariant
    """
    keys = [v.sort_key() for v in s.support]
    if len(keys) < 3 or keys != sorted(set(keys)):
        raise InvalidState("support must hold at least 3 distinct vertices in counterclockwise order")
    for e in s.boundary_oriented:
        if not farey_neighbors(e.initial, e.terminal):
            raise InvalidState(f"boundary edge {e} is not a Farey edge")
    vertices = set(s.support)
    if len(s.diagonals) != len(s.support) - 3:
        raise InvalidState(f"expected {len(s.support) - 3} diagonals, got {len(s.diagonals)}")
    for d in s.diagonals:
        if not set(d) <= vertices or d in s.boundary:
            raise InvalidState(f"{d[0]}-{d[1]} is not a diagonal of the support polygon")
    for d1, d2 in combinations(s.diagonals, 2):
        if crosses(d1, d2):
            raise InvalidState(f"diagonals {d1[0]}-{d1[1]} and {d2[0]}-{d2[1]} cross")
    if s.doe_edge not in s.diagonals and s.doe_edge not in s.boundary:
        raise InvalidState(f"doe {s.doe} is not a current edge")
    stray = s.marks - set(s.edges)
    if stray:
        raise InvalidState(f"{len(stray)} marked edges are not current edges")


def base_state() -> MarkedTessellation:
    """Farey tessellation with its doe (0 -> ∞) on the quadrilateral (-1, 0, 1, ∞), unmarked."""
    return MarkedTessellation(
        support=BASE_QUAD,
        diagonals=frozenset({DOE.undirected()}),
        doe=DOE,
    )


def adjoin_triangle(s: MarkedTessellation, e: OrientedEdge) -> MarkedTessellation:
    """Glue the outer Farey triangle onto the counterclockwise boundary edge e."""
    if e not in s.boundary_oriented:
        raise EdgeNotFarey(f"{e} is not a counterclockwise boundary edge of the support")
    apex = third_vertex_right(e)
    support = tuple(sorted(s.support + (apex,), key=lambda v: v.sort_key()))
    return replace(s, support=support, diagonals=s.diagonals | {e.undirected()})


def _frontier_edge_around(s: MarkedTessellation, points: Iterable[ExtRational]) -> Optional[OrientedEdge]:
    pts = list(points)
    for e in s.boundary_oriented:
        if all(in_ccw_arc(e.initial, x, e.terminal) for x in pts):
            if any(ccw_between(e.initial, x, e.terminal) for x in pts):
                return e
    return None


def ensure_vertex(s: MarkedTessellation, y: ExtRational) -> MarkedTessellation:
    """Grow the support by Farey triangles until y is one of its vertices."""
    while y not in s.support:
        e = _frontier_edge_around(s, [y])
        s = adjoin_triangle(s, e)
    return s


def grow_support(s: MarkedTessellation, e: EdgeLike) -> MarkedTessellation:
    """
    Enlarge P until e is an interior diagonal, without changing the point of Tess⁺.

    Args:
        s: State to grow
        e: A current edge or a Farey edge outside P

    Returns:
        The same state with a larger support

    Raises:
        EdgeNotFarey: if e is not current and not a Farey edge outside P
    """
    edge = as_edge(e)
    if edge in s.diagonals:
        return s
    if edge not in s.boundary:
        u, v = edge
        if not farey_neighbors(u, v):
            raise EdgeNotFarey(f"{u}-{v} is not an edge of the Farey tessellation")
        while edge not in s.boundary:
            frontier = _frontier_edge_around(s, edge)
            if frontier is None:
                raise EdgeNotFarey(f"{u}-{v} crosses the support polygon")
            s = adjoin_triangle(s, frontier)
    outward = next(b for b in s.boundary_oriented if b.undirected() == edge)
    logger.debug(f"Growing support across {outward}")
    return adjoin_triangle(s, outward)


def canonical_shrink(s: MarkedTessellation) -> MarkedTessellation:
    """Remove unmarked Farey ears away from the doe until none is left."""
    changed = True
    while changed:
        changed = False
        n = len(s.support)
        for i in range(n):
            u, v, w = s.support[i - 1], s.support[i], s.support[(i + 1) % n]
            chord = undirected(u, w)
            if chord not in s.diagonals or not farey_neighbors(u, w):
                continue
            sides = {undirected(u, v), undirected(v, w)}
            if sides & s.marks or s.doe_edge in sides | {chord}:
                continue
            s = replace(
                s,
                support=tuple(x for x in s.support if x != v),
                diagonals=s.diagonals - {chord},
            )
            changed = True
            break
    return s


def quadrilateral(s: MarkedTessellation, d: Edge) -> Tuple[ExtRational, ExtRational]:
    """Apexes (right, left) of the two triangles on the diagonal d, read from its initial endpoint."""
    e = OrientedEdge(*d)
    right, left = s.apex_right(e), s.apex_left(e)
    if right is None or left is None:
        raise InvalidState(f"{d[0]}-{d[1]} is not an interior diagonal")
    return right, left


def flip(s: MarkedTessellation, d: EdgeLike) -> MarkedTessellation:
    """
    Replace the diagonal d by the other diagonal of its quadrilateral.

    A mark on d moves to the new diagonal. Flipping the doe's edge re-aims
    the doe as alpha does.
    """
    edge = as_edge(d)
    if edge not in s.diagonals:
        s = grow_support(s, edge)
    if edge == s.doe_edge:
        return _alpha_projection(s, inverse=False, marks=_moved_mark(s, edge))
    right, left = quadrilateral(s, edge)
    new = undirected(right, left)
    return replace(
        s,
        diagonals=(s.diagonals - {edge}) | {new},
        marks=_moved_mark(s, edge, new),
    )


def _moved_mark(s: MarkedTessellation, old: Edge, new: Optional[Edge] = None) -> FrozenSet[Edge]:
    if new is None:
        e = OrientedEdge(*old)
        new = undirected(s.apex_right(e), s.apex_left(e))
    if old in s.marks:
        return (s.marks - {old}) | {new}
    return s.marks


def _alpha_projection(
    s: MarkedTessellation, inverse: bool, marks: Optional[FrozenSet[Edge]] = None
) -> MarkedTessellation:
    """Flip the doe's edge; the doe becomes (right -> left), or (left -> right) for the inverse."""
    right, left = s.apex_right(s.doe), s.apex_left(s.doe)
    new_doe = OrientedEdge(left, right) if inverse else OrientedEdge(right, left)
    return replace(
        s,
        diagonals=(s.diagonals - {s.doe_edge}) | {new_doe.undirected()},
        doe=new_doe,
        marks=s.marks if marks is None else marks,
    )


def _beta_projection(s: MarkedTessellation, inverse: bool) -> MarkedTessellation:
    """Move the doe one edge counterclockwise (or clockwise) around its left triangle."""
    u, v = s.doe.initial, s.doe.terminal
    left = s.apex_left(s.doe)
    new_doe = OrientedEdge(left, u) if inverse else OrientedEdge(v, left)
    s = grow_support(s, new_doe)
    return replace(s, doe=new_doe)


def project_generator(s: MarkedTessellation, g: Generator) -> MarkedTessellation:
    """Action of g on (tessellation, doe); the marking is left untouched."""
    if g in (Generator.ALPHA, Generator.ALPHA_INV):
        return _alpha_projection(s, inverse=g is Generator.ALPHA_INV)
    if g in (Generator.BETA, Generator.BETA_INV):
        return _beta_projection(s, inverse=g is Generator.BETA_INV)
    return s


def _triangle_sides(tri: Iterable[ExtRational]) -> FrozenSet[Edge]:
    pts = list(tri)
    return frozenset(undirected(pts[i], pts[(i + 1) % 3]) for i in range(3))


def _alpha_marks(s: MarkedTessellation, inverse: bool) -> FrozenSet[Edge]:
    """
    Marks carried across the doe flip.

    A marked doe is cleared by reflecting the triangle on its right. The
    quadrilateral side from the doe's terminal point to the left apex
    (right apex for the inverse) is then toggled.
    """
    u, v = s.doe.initial, s.doe.terminal
    right = s.apex_right(s.doe)
    marks = s.marks
    if s.doe_edge in marks:
        marks = marks ^ _triangle_sides((u, right, v))
    pivot = right if inverse else s.apex_left(s.doe)
    return marks ^ {undirected(v, pivot)}


def apply_generator(s: MarkedTessellation, g: Generator) -> MarkedTessellation:
    """
    Act on s by a generator of the spin Ptolemy group.

    alpha flips the doe's edge and moves marks by the doe-flip rule;
    beta moves the doe and keeps every mark; t toggles the edge from the
    doe's initial point to its right apex. The result is shrunk to its
    canonical support.
    """
    logger.debug(f"Applying {g.symbol} to {s}")
    if g in (Generator.ALPHA, Generator.ALPHA_INV):
        inverse = g is Generator.ALPHA_INV
        moved = _alpha_projection(s, inverse=inverse, marks=_alpha_marks(s, inverse))
    elif g in (Generator.BETA, Generator.BETA_INV):
        moved = _beta_projection(s, inverse=g is Generator.BETA_INV)
    else:
        moved = replace(s, marks=s.marks ^ {undirected(s.doe.initial, s.apex_right(s.doe))})
    return canonical_shrink(moved)


def reflect(s: MarkedTessellation, tri: Iterable[ExtRational]) -> MarkedTessellation:
    """Toggle the marks on the three edges of a complementary triangle inside P."""
    key = tuple(sorted(set(tri), key=lambda v: v.sort_key()))
    if key not in s.triangles:
        raise TriangleNotInSupport(f"{[str(v) for v in key]} is not a triangle of the support")
    sides = {undirected(key[i], key[(i + 1) % 3]) for i in range(3)}
    return replace(s, marks=s.marks ^ sides)


def vertex_parity(s: MarkedTessellation, v: ExtRational) -> int:
    """Number of marked edges ending at v, mod 2."""
    return sum(1 for e in s.marks if v in e) % 2


def vertex_parities(s: MarkedTessellation) -> Dict[ExtRational, int]:
    """
    Parity of marked edges at every vertex of P.

    Reflections leave it unchanged and it sums to zero; two markings of one
    tessellation are equivalent iff their parities agree.
    """
    return {v: vertex_parity(s, v) for v in s.support}


def horocycle_sign(s: MarkedTessellation, v: ExtRational) -> int:
    """+1 when a small horocycle at v meets an even number of marked edges, else -1."""
    return -1 if vertex_parity(s, v) else 1


def marking_from_parities(s: MarkedTessellation, parities: Dict[ExtRational, int]) -> MarkedTessellation:
    """
    Frontier marking of the projection of s with the given vertex parities.

    The boundary edge leaving the first vertex of P stays unmarked; each
    later boundary edge is marked so the parity at its initial vertex
    comes out right.

    Raises:
        InvalidState: if a vertex with odd parity is outside P or the parities sum to one
    """
    outside = [v for v, p in parities.items() if p % 2 and v not in s.support]
    if outside:
        raise InvalidState(f"odd parity at {outside[0]}, which is not a vertex of the support")
    if sum(parities.values()) % 2:
        raise InvalidState("vertex parities must have even sum")
    marks = set()
    marked = False
    for e in s.boundary_oriented[1:]:
        marked = marked != bool(parities.get(e.initial, 0) % 2)
        if marked:
            marks.add(e.undirected())
    return replace(s, marks=frozenset(marks))


def far_apex(s: MarkedTessellation, e: EdgeLike) -> ExtRational:
    """
    The vertex p_e beyond e: apex of the triangle on the side of e away from the doe.

    Raises:
        EdgeIsDoe: if e is the doe's edge
    """
    edge = as_edge(e)
    if edge == s.doe_edge:
        raise EdgeIsDoe("the doe has no far side")
    if edge not in s.edges:
        s = grow_support(s, edge)
    x, y = edge
    a, b = s.doe.initial, s.doe.terminal
    if not (in_ccw_arc(y, a, x) and in_ccw_arc(y, b, x)):
        x, y = y, x
    far = OrientedEdge(x, y)
    apex = s.apex_right(far)
    return third_vertex_right(far) if apex is None else apex


def sigma_hat(s: MarkedTessellation, e: EdgeLike) -> int:
    """
    Reflection-invariant sign of an edge: the horocycle sign of far_apex(s, e).

    Edges on the frontier of P have p_e outside P and get +1. On a lift
    this is the sign jump over the preimage of p_e.

    Raises:
        EdgeIsDoe: if e is the doe's edge
    """
    if as_edge(e) == s.doe_edge:
        raise EdgeIsDoe("sigma_hat is undefined on the doe")
    return horocycle_sign(s, far_apex(s, e))


def push_marks_to_frontier(s: MarkedTessellation) -> MarkedTessellation:
    """
    Equivalent state whose marks all lie on the boundary of P.

    Walks the dual tree breadth-first from the triangle right of the doe and
    reflects every child triangle whose parent diagonal is marked.
    """
    root = tuple(sorted((s.doe.initial, s.doe.terminal, s.apex_right(s.doe)), key=lambda v: v.sort_key()))
    dual = nx.Graph()
    dual.add_nodes_from(s.triangles)
    for d in s.diagonals:
        owners = [t for t in s.triangles if set(d) <= set(t)]
        dual.add_edge(owners[0], owners[1], diagonal=d)
    for parent, child in nx.bfs_edges(dual, root):
        if dual.edges[parent, child]["diagonal"] in s.marks:
            s = reflect(s, child)
    return s


def common_support(
    s1: MarkedTessellation, s2: MarkedTessellation
) -> Tuple[MarkedTessellation, MarkedTessellation]:
    """Grow both states until they share the same support polygon."""
    while set(s1.support) != set(s2.support):
        for v in s2.support:
            s1 = ensure_vertex(s1, v)
        for v in s1.support:
            s2 = ensure_vertex(s2, v)
    return s1, s2


def reflection_rows(s: MarkedTessellation) -> List[List[int]]:
    """Indicator vectors over s.edges of the three sides of each triangle."""
    index = {e: i for i, e in enumerate(s.edges)}
    rows = []
    for tri in s.triangles:
        row = [0] * len(s.edges)
        for i in range(3):
            row[index[undirected(tri[i], tri[(i + 1) % 3])]] = 1
        rows.append(row)
    return rows


def marking_vector(s: MarkedTessellation) -> List[int]:
    return [1 if e in s.marks else 0 for e in s.edges]


def markings_equivalent(s1: MarkedTessellation, s2: MarkedTessellation) -> bool:
    """
    True iff the two markings differ by a sum of triangle reflections.

    Raises:
        DifferentTessellations: if the underlying tessellations or does differ
    """
    s1, s2 = common_support(s1, s2)
    if s1.diagonals != s2.diagonals or s1.doe != s2.doe:
        raise DifferentTessellations("states have different tessellations or does")
    difference = [a ^ b for a, b in zip(marking_vector(s1), marking_vector(s2))]
    return gf2_in_span(reflection_rows(s1), difference)


def states_equal(s1: MarkedTessellation, s2: MarkedTessellation) -> bool:
    """Equality in Tess⁺: same tessellation and doe, equivalent markings."""
    if canonical_shrink(s1.unmarked()) != canonical_shrink(s2.unmarked()):
        return False
    return markings_equivalent(s1, s2)


def reflection_orbit_size(s: MarkedTessellation) -> int:
    return 2 ** gf2_rank(reflection_rows(s))


def marking_class_count(s: MarkedTessellation) -> int:
    """Number of reflection classes among all 2^E markings of P."""
    return 2 ** (len(s.edges) - gf2_rank(reflection_rows(s)))


def triangulations(polygon: Tuple[ExtRational, ...]) -> Iterator[FrozenSet[Edge]]:
    """All sets of diagonals triangulating a convex polygon given in ccw order."""
    n = len(polygon)
    if n <= 3:
        yield frozenset()
        return
    first, last = polygon[0], polygon[-1]
    for k in range(1, n - 1):
        apex = polygon[k]
        chords = set()
        if k > 1:
            chords.add(undirected(first, apex))
        if k < n - 2:
            chords.add(undirected(apex, last))
        for left in triangulations(polygon[: k + 1]):
            for right in triangulations(polygon[k:]):
                yield frozenset(chords | left | right)


def state_from_json(data: dict) -> MarkedTessellation:
    """Parse the JSON state schema into a validated state."""
    for key in ("support", "diagonals", "doe"):
        if key not in data:
            raise InvalidState(f"State must contain '{key}' field")
    parse = ExtRational.parse
    return make_state(
        support=[parse(str(v)) for v in data["support"]],
        diagonals=[(parse(str(a)), parse(str(b))) for a, b in data["diagonals"]],
        doe=OrientedEdge(parse(str(data["doe"][0])), parse(str(data["doe"][1]))),
        marks=[(parse(str(a)), parse(str(b))) for a, b in data.get("marks", [])],
    )
