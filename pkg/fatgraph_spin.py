"""
Spin structures on trivalent fatgraphs.

A fatgraph is a set of half-edges with a counterclockwise cyclic order at
each vertex and a pairing into edges. Orientations of the edges modulo
vertex reflections model spin structures; they map to quadratic forms on
the cycle space and classify punctures as Ramond or Neveu-Schwarz.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Collection, Dict, FrozenSet, List, Sequence, Tuple

import networkx as nx
import numpy as np

from gf2 import gf2_nullspace, gf2_rank, gf2_reduce, gf2_row_reduce

logger = logging.getLogger(__name__)

Orientation = Tuple[int, ...]


class InvalidFatgraph(ValueError):
    """Raised when half-edge data does not describe a fatgraph."""


class NonOrientableOrDisconnected(InvalidFatgraph):
    """Raised when the fatgraph is not connected."""


class LoopEdge(ValueError):
    """Raised when a flip is requested on a loop."""


class NotTrivalent(ValueError):
    """Raised when an operation needs every vertex to have degree three."""


@dataclass(frozen=True)
class Fatgraph:
    """
    Half-edges 0..n-1, ccw vertex cycles and an edge pairing.

    Edge i is pairs[i] = (lo, hi); its reference direction runs from the
    vertex of lo to the vertex of hi.
    """

    half_edges: int
    vertex_cycles: Tuple[Tuple[int, ...], ...]
    pairs: Tuple[Tuple[int, int], ...]

    @classmethod
    def build(cls, vertex_cycles: Sequence[Sequence[int]], pairs: Sequence[Sequence[int]]) -> "Fatgraph":
        cycles = tuple(tuple(int(h) for h in c) for c in vertex_cycles)
        edges = tuple(sorted(tuple(sorted((int(a), int(b)))) for a, b in pairs))
        graph = cls(half_edges=sum(len(c) for c in cycles), vertex_cycles=cycles, pairs=edges)
        graph.validate()
        return graph

    def validate(self) -> None:
        expected = list(range(self.half_edges))
        if sorted(h for c in self.vertex_cycles for h in c) != expected:
            raise InvalidFatgraph("vertex cycles must use each half-edge exactly once")
        if sorted(h for p in self.pairs for h in p) != expected:
            raise InvalidFatgraph("edge pairing must be a fixed-point-free involution")
        graph = nx.MultiGraph()
        graph.add_nodes_from(range(len(self.vertex_cycles)))
        graph.add_edges_from((self.vertex_of[a], self.vertex_of[b]) for a, b in self.pairs)
        if not nx.is_connected(graph):
            raise NonOrientableOrDisconnected("fatgraph is disconnected")

    @cached_property
    def vertex_of(self) -> Dict[int, int]:
        return {h: v for v, c in enumerate(self.vertex_cycles) for h in c}

    @cached_property
    def sigma(self) -> Dict[int, int]:
        """Next half-edge counterclockwise at the same vertex."""
        return {c[i]: c[(i + 1) % len(c)] for c in self.vertex_cycles for i in range(len(c))}

    @cached_property
    def iota(self) -> Dict[int, int]:
        mapping = {}
        for a, b in self.pairs:
            mapping[a], mapping[b] = b, a
        return mapping

    @cached_property
    def edge_of(self) -> Dict[int, int]:
        return {h: i for i, p in enumerate(self.pairs) for h in p}

    @property
    def num_vertices(self) -> int:
        return len(self.vertex_cycles)

    @property
    def num_edges(self) -> int:
        return len(self.pairs)

    @cached_property
    def faces(self) -> Tuple[Tuple[int, ...], ...]:
        """Boundary cycles: orbits of h -> sigma(iota(h))."""
        seen = set()
        orbits = []
        for start in range(self.half_edges):
            if start in seen:
                continue
            orbit = []
            h = start
            while h not in seen:
                seen.add(h)
                orbit.append(h)
                h = self.sigma[self.iota[h]]
            orbits.append(tuple(orbit))
        return tuple(orbits)

    def same_structure(self, other: "Fatgraph") -> bool:
        """Equal up to the numbering of vertices."""

        def rotations(g: "Fatgraph"):
            out = set()
            for c in g.vertex_cycles:
                i = c.index(min(c))
                out.add(c[i:] + c[:i])
            return out

        return self.pairs == other.pairs and rotations(self) == rotations(other)

    def is_trivalent(self) -> bool:
        return all(len(c) == 3 for c in self.vertex_cycles)

    def incidence(self) -> np.ndarray:
        """Vertex-edge incidence mod 2; a loop contributes zero."""
        mat = np.zeros((self.num_vertices, self.num_edges), dtype=np.uint8)
        for h in range(self.half_edges):
            mat[self.vertex_of[h], self.edge_of[h]] ^= 1
        return mat

    def to_json(self, orient: Sequence[int] = ()) -> dict:
        data = {
            "half_edges": self.half_edges,
            "vertex_cycles": [list(c) for c in self.vertex_cycles],
            "edge_pairing": [list(p) for p in self.pairs],
        }
        if orient:
            data["orient"] = [int(x) for x in orient]
        return data


def fatgraph_from_json(data: dict) -> Tuple[Fatgraph, Orientation]:
    for key in ("vertex_cycles", "edge_pairing"):
        if key not in data:
            raise InvalidFatgraph(f"Fatgraph must contain '{key}' field")
    graph = Fatgraph.build(data["vertex_cycles"], data["edge_pairing"])
    if "half_edges" in data and int(data["half_edges"]) != graph.half_edges:
        raise InvalidFatgraph("'half_edges' does not match the vertex cycles")
    orient = tuple(int(x) % 2 for x in data.get("orient", [0] * graph.num_edges))
    if len(orient) != graph.num_edges:
        raise InvalidFatgraph(f"'orient' needs {graph.num_edges} entries")
    return graph, orient


def surface_data(g: Fatgraph) -> Tuple[int, int, int, int]:
    """(V, E, s, genus) from V - E = 2 - 2g - s."""
    v, e, s = g.num_vertices, g.num_edges, len(g.faces)
    genus = (2 - s - (v - e)) // 2
    return v, e, s, genus


def reflect_vertex(g: Fatgraph, orient: Orientation, v: int) -> Orientation:
    """Reverse every edge at v, once per incident half-edge."""
    bits = list(orient)
    for h in g.vertex_cycles[v]:
        bits[g.edge_of[h]] ^= 1
    return tuple(bits)


def canonical_orientation(g: Fatgraph, orient: Orientation) -> Orientation:
    """Representative of the reflection class with zeros on the pivot columns."""
    return tuple(int(x) for x in gf2_reduce(g.incidence(), orient))


def orientation_class_count(g: Fatgraph) -> int:
    return 2 ** (g.num_edges - gf2_rank(g.incidence()))


def orientation_classes(g: Fatgraph) -> List[Orientation]:
    """One canonical representative per class, enumerated on the free columns."""
    pivots = set(_pivot_columns(g))
    free = [i for i in range(g.num_edges) if i not in pivots]
    reps = []
    for bits in product((0, 1), repeat=len(free)):
        orient = [0] * g.num_edges
        for i, b in zip(free, bits):
            orient[i] = b
        reps.append(tuple(orient))
    return reps


def _pivot_columns(g: Fatgraph) -> Tuple[int, ...]:
    return gf2_row_reduce(g.incidence()).pivots


def cycle_space(g: Fatgraph) -> np.ndarray:
    """Basis of the GF(2) cycle space (first homology of the thickened surface)."""
    return gf2_nullspace(g.incidence())


def cycle_classes(g: Fatgraph) -> List[Tuple[int, ...]]:
    """Every element of the cycle space as an edge-indicator tuple."""
    basis = cycle_space(g)
    elements = []
    for coeffs in product((0, 1), repeat=basis.shape[0]):
        vec = np.zeros(g.num_edges, dtype=np.uint8)
        for c, row in zip(coeffs, basis):
            if c:
                vec ^= row
        elements.append(tuple(int(x) for x in vec))
    return elements


def cycle_walks(g: Fatgraph, cls: Sequence[int]) -> List[List[int]]:
    """
    Split a cycle-space element into closed walks, one per simple cycle.

    Each walk lists the half-edges it leaves vertices through.
    """
    chosen = {h for h in range(g.half_edges) if cls[g.edge_of[h]]}
    used = set()
    walks = []
    for start in sorted(chosen):
        if g.edge_of[start] in used:
            continue
        walk = []
        h = start
        while True:
            walk.append(h)
            used.add(g.edge_of[h])
            arrival = g.iota[h]
            onward = [x for x in g.vertex_cycles[g.vertex_of[arrival]] if x in chosen and x != arrival]
            if len(onward) != 1:
                raise NotTrivalent("cycle class does not split into vertex-disjoint simple cycles")
            h = onward[0]
            if h == start:
                break
        walks.append(walk)
    return walks


def _agrees(g: Fatgraph, orient: Orientation, h: int) -> bool:
    """True iff traversing the edge of h away from h follows the orientation."""
    lo = g.pairs[g.edge_of[h]][0]
    return (h == lo) == (orient[g.edge_of[h]] == 0)


def _walk_vector(g: Fatgraph, walk: Sequence[int]) -> Tuple[int, ...]:
    vec = [0] * g.num_edges
    for h in walk:
        vec[g.edge_of[h]] ^= 1
    return tuple(vec)


def intersection_pairing(g: Fatgraph, a: Sequence[int], b: Sequence[int]) -> int:
    """
    Mod-2 intersection number of two cycle classes on the thickened surface.

    At every vertex b passes (in through p, out through q), count the
    half-edges of a strictly inside the ccw sector from q to p.
    """
    in_a = {h for h in range(g.half_edges) if a[g.edge_of[h]]}
    total = 0
    for walk in cycle_walks(g, b):
        n = len(walk)
        for i in range(n):
            p, q = g.iota[walk[i]], walk[(i + 1) % n]
            h = g.sigma[q]
            while h != p:
                total += h in in_a
                h = g.sigma[h]
    return total % 2


@dataclass(frozen=True)
class SurfaceGraph:
    """
    Trivalent graph obtained by truncating every vertex of a fatgraph.

    Half-edge h of the fatgraph becomes a node with corners 3h (along the
    edge of h), 3h + 1 (triangle side towards sigma(h)) and 3h + 2 (side
    towards sigma^-1(h)). The edges of the fatgraph form the dimer.
    """

    graph: Fatgraph
    kasteleyn: Orientation
    dimer: FrozenSet[int]

    def sticks_out(self, corner: int) -> bool:
        return self.graph.edge_of[corner] in self.dimer

    def triangles(self) -> List[Tuple[int, ...]]:
        """Faces cut off around the fatgraph vertices."""
        return [f for f in self.graph.faces if not any(self.sticks_out(c) for c in f)]

    def is_kasteleyn(self) -> bool:
        """Every triangle meets its boundary orientation an odd number of times against it."""
        for face in self.triangles():
            # the boundary runs against the face orbit
            if sum(1 for c in face if _agrees(self.graph, self.kasteleyn, c)) % 2 == 0:
                return False
        return True


def surface_graph(g: Fatgraph, orient: Orientation) -> SurfaceGraph:
    """
    Surface graph of g with its dimer and the Kasteleyn orientation of orient.

    Dimer edges carry the orientation of their fatgraph edge; each
    triangle side runs from sigma(h) to h.
    """
    if not g.is_trivalent():
        raise NotTrivalent("surface graph needs a trivalent fatgraph")
    cycles = [(3 * h, 3 * h + 1, 3 * h + 2) for h in range(g.half_edges)]
    pairs = [(3 * a, 3 * b) for a, b in g.pairs]
    pairs += [(3 * h + 1, 3 * g.sigma[h] + 2) for h in range(g.half_edges)]
    graph = Fatgraph.build(cycles, pairs)
    bits = []
    for x, y in graph.pairs:
        if x % 3 == 0:
            bits.append(orient[g.edge_of[x // 3]])
        else:
            bits.append(0 if x % 3 == 2 else 1)
    dimer = frozenset(graph.edge_of[3 * h] for h in range(g.half_edges))
    return SurfaceGraph(graph=graph, kasteleyn=tuple(bits), dimer=dimer)


def lift_walk(g: Fatgraph, walk: Sequence[int], detours: Collection[int] = ()) -> List[int]:
    """
    Closed walk on the surface graph homotopic to a walk on g.

    Each fatgraph edge becomes its dimer edge; each turn crosses the vertex
    triangle by its one-side route, or by the two-side route at the
    indices in detours. Returns the corners the walk leaves nodes through.
    """
    n = len(walk)
    corners = []
    for i, h in enumerate(walk):
        corners.append(3 * h)
        arrival, onward = g.iota[h], walk[(i + 1) % n]
        ahead, behind = g.sigma[arrival], g.sigma[g.sigma[arrival]]
        if onward not in (ahead, behind):
            raise NotTrivalent(f"half-edge {onward} does not follow {h}")
        if onward == ahead:
            corners += [3 * arrival + 2, 3 * behind + 2] if i in detours else [3 * arrival + 1]
        else:
            corners += [3 * arrival + 1, 3 * ahead + 1] if i in detours else [3 * arrival + 2]
    return corners


def curve_value(sg: SurfaceGraph, corners: Sequence[int]) -> int:
    """
    1 + n^K + l^D mod 2 for a closed walk on the surface graph.

    n^K counts steps against the Kasteleyn orientation and l^D counts
    dimer edges sticking out to the left of the walk.
    """
    graph = sg.graph
    against = sum(1 for c in corners if not _agrees(graph, sg.kasteleyn, c))
    left = 0
    n = len(corners)
    for i in range(n):
        into, out = graph.iota[corners[i]], corners[(i + 1) % n]
        c = graph.sigma[out]
        while c != into:
            left += sg.sticks_out(c)
            c = graph.sigma[c]
    return (1 + against + left) % 2


@dataclass
class QuadraticForm:
    """Values of q on the whole cycle space of a fatgraph, for one orientation."""

    graph: Fatgraph
    orient: Orientation
    table: Dict[Tuple[int, ...], int]

    def value(self, cls: Sequence[int]) -> int:
        return self.table[tuple(int(x) % 2 for x in cls)]

    def pairing(self, a: Sequence[int], b: Sequence[int]) -> int:
        return intersection_pairing(self.graph, a, b)

    def to_json(self) -> dict:
        return {
            "orient": list(self.orient),
            "values": [{"cycle": list(k), "q": v} for k, v in sorted(self.table.items())],
        }


def quadratic_form(g: Fatgraph, orient: Orientation) -> QuadraticForm:
    """
    Dimer form of the Kasteleyn orientation built from orient.

    Each simple cycle C_i of a class is lifted to the surface graph and
    q(sum C_i) = sum_{i<j} C_i.C_j + sum (1 + n^K + l^D)(C_i).
    """
    sg = surface_graph(g, orient)
    table = {}
    for cls in cycle_classes(g):
        walks = cycle_walks(g, cls)
        vectors = [_walk_vector(g, w) for w in walks]
        value = sum(curve_value(sg, lift_walk(g, w)) for w in walks)
        for i in range(len(vectors)):
            for j in range(i + 1, len(vectors)):
                value += intersection_pairing(g, vectors[i], vectors[j])
        table[cls] = value % 2
    return QuadraticForm(graph=g, orient=tuple(orient), table=table)


def face_class(g: Fatgraph, face: Sequence[int]) -> Tuple[int, ...]:
    return _walk_vector(g, face)


def ramond_punctures(g: Fatgraph, orient: Orientation) -> List[bool]:
    """
    Ramond flag per face, in the order of g.faces.

    The boundary loop runs against the face orbit; a face is Ramond iff the
    number of its traversals agreeing with orient has the parity of its length.
    """
    flags = []
    for face in g.faces:
        agree_along_orbit = sum(1 for h in face if _agrees(g, orient, h))
        flags.append(agree_along_orbit % 2 == 0)
    return flags


def spin_flip(g: Fatgraph, orient: Orientation, edge: int) -> Tuple[Fatgraph, Orientation]:
    """
    Whitehead move on a non-loop edge with spin transport.

    With e = (h, h'), the vertex of h' holds (h', e3, e1) and the vertex of
    h holds (h, e2, e4). After the move they hold (h', e1, e2) and
    (h, e4, e3). The edge is first made to agree with its reference
    direction by a reflection at the vertex of h; the edge of e3 is then
    reversed. Slots are tracked by half-edge: when e3 and e2 lie on one
    edge, as on the torus theta graph, that edge is reversed once.

    Raises:
        LoopEdge: if both ends of the edge are at one vertex
    """
    if not g.is_trivalent():
        raise NotTrivalent("spin flip needs a trivalent fatgraph")
    h, h2 = g.pairs[edge]
    bottom, top = g.vertex_of[h], g.vertex_of[h2]
    if bottom == top:
        raise LoopEdge(f"edge {edge} is a loop")
    if orient[edge]:
        orient = reflect_vertex(g, orient, bottom)
    e3, e1 = g.sigma[h2], g.sigma[g.sigma[h2]]
    e2, e4 = g.sigma[h], g.sigma[g.sigma[h]]
    cycles = list(g.vertex_cycles)
    cycles[top] = (h2, e1, e2)
    cycles[bottom] = (h, e4, e3)
    flipped = Fatgraph(half_edges=g.half_edges, vertex_cycles=tuple(cycles), pairs=g.pairs)
    bits = list(orient)
    bits[g.edge_of[e3]] ^= 1
    logger.debug(f"Flipped edge {edge}: {flipped.vertex_cycles}")
    return flipped, tuple(bits)


def swap_half_edges(g: Fatgraph, orient: Orientation, edge: int) -> Tuple[Fatgraph, Orientation]:
    """Exchange the two half-edge labels of an edge, keeping the same oriented graph."""
    h, h2 = g.pairs[edge]
    relabel = {h: h2, h2: h}
    cycles = tuple(tuple(relabel.get(x, x) for x in c) for c in g.vertex_cycles)
    bits = list(orient)
    bits[edge] ^= 1
    return Fatgraph(half_edges=g.half_edges, vertex_cycles=cycles, pairs=g.pairs), tuple(bits)


def orientations_equivalent(g: Fatgraph, o1: Orientation, o2: Orientation) -> bool:
    return canonical_orientation(g, o1) == canonical_orientation(g, o2)


def random_trivalent_fatgraph(rng: np.random.Generator, vertices: int) -> Fatgraph:
    """Connected trivalent fatgraph with a random pairing of half-edges."""
    if vertices < 2 or vertices % 2:
        raise ValueError("a trivalent graph needs an even number (>= 2) of vertices")
    n = 3 * vertices
    cycles = [tuple(range(3 * v, 3 * v + 3)) for v in range(vertices)]
    while True:
        order = [int(x) for x in rng.permutation(n)]
        pairs = [(order[2 * i], order[2 * i + 1]) for i in range(n // 2)]
        try:
            return Fatgraph.build(cycles, pairs)
        except NonOrientableOrDisconnected:
            continue


SAMPLE_FATGRAPHS: Dict[str, Fatgraph] = {
    "F11": Fatgraph.build([(0, 1, 2), (3, 4, 5)], [(0, 3), (1, 4), (2, 5)]),
    "F03": Fatgraph.build([(0, 1, 2), (3, 5, 4)], [(0, 3), (1, 4), (2, 5)]),
    "F04": Fatgraph.build(
        [(0, 2, 4), (6, 1, 11), (8, 3, 7), (10, 5, 9)],
        [(0, 1), (2, 3), (4, 5), (6, 7), (8, 9), (10, 11)],
    ),
    "F12": Fatgraph.build(
        [(0, 2, 4), (6, 1, 11), (8, 3, 7), (10, 9, 5)],
        [(0, 1), (2, 3), (4, 5), (6, 7), (8, 9), (10, 11)],
    ),
}
