"""
Spin Ptolemy group action and its realization by piecewise SL(2,Z) maps.

Words in alpha, beta, t act on marked tessellations. The characteristic
map of a state is found by matching triangles outward from the doe. Its
spin lift changes sign over exactly those vertices of the support polygon
whose horocycle meets an odd number of marked edges, so lifts multiply as
the generators act.
"""

import logging
from bisect import bisect_left
from collections import deque
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from farey import third_vertex_right
from fatgraph_spin import Fatgraph, Orientation, spin_flip
from modular_arithmetic import (
    DOE,
    ZERO,
    Edge,
    ExtRational,
    MatSL2Z,
    OrientedEdge,
    ProjMat,
    matrix_of_edge,
    sgn,
    undirected,
)
from piecewise_maps import PiecewiseProjMap, PiecewiseSL2Map, projectivize
from tessellation_state import (
    Generator,
    MarkedTessellation,
    apply_generator,
    base_state,
    canonical_shrink,
    ensure_vertex,
    horocycle_sign,
    marking_from_parities,
    project_generator,
    push_marks_to_frontier,
    states_equal,
)

logger = logging.getLogger(__name__)

Word = Tuple[Generator, ...]
LeafPair = Tuple[OrientedEdge, OrientedEdge]


class SpinTransportError(ValueError):
    """Raised when a transported lift does not project to the moved tessellation."""


class PreconditionFailed(ValueError):
    """Raised when a word does not act trivially on the projection."""


class WordSyntaxError(ValueError):
    """Raised when a generator word cannot be parsed."""


def leaf_pairs(s: MarkedTessellation) -> List[LeafPair]:
    """
    Match Farey triangles to the triangles of s outward from the doe.

    Returns one (domain edge, image edge) pair per boundary edge of the
    support polygon; both edges have the outside of the match on their right.
    """
    queue = deque(
        [
            (DOE, s.doe),
            (DOE.reversed(), s.doe.reversed()),
        ]
    )
    leaves: List[LeafPair] = []
    budget = 4 * len(s.support) + 8
    while queue:
        budget -= 1
        if budget < 0:
            raise SpinTransportError("triangle matching did not terminate inside the support")
        domain, image = queue.popleft()
        w = s.apex_right(image)
        if w is None:
            leaves.append((domain, image))
            continue
        z = third_vertex_right(domain)
        queue.append((OrientedEdge(domain.initial, z), OrientedEdge(image.initial, w)))
        queue.append((OrientedEdge(z, domain.terminal), OrientedEdge(w, image.terminal)))
    return leaves


def _leaf_matrix(domain: OrientedEdge, image: OrientedEdge) -> ProjMat:
    """The modular map carrying domain onto image."""
    return matrix_of_edge(image).inverse() @ matrix_of_edge(domain)


def characteristic_map(s: MarkedTessellation) -> PiecewiseProjMap:
    """Piecewise-modular map sending the Farey tessellation and its doe onto s."""
    return PiecewiseProjMap.from_pieces(
        (domain.initial, _leaf_matrix(domain, image)) for domain, image in leaf_pairs(s)
    )


def normalize_spin(phi: PiecewiseSL2Map) -> PiecewiseSL2Map:
    """Fix the global sign: the piece just clockwise of 0 gets sgn +1."""
    keys = [x.sort_key() for x in phi.breakpoints]
    j = (bisect_left(keys, ZERO.sort_key()) - 1) % len(keys)
    if sgn(phi.pieces[j][1]) > 0:
        return phi
    return PiecewiseSL2Map.from_pieces((x, -m) for x, m in phi.pieces)


def _trace_sign(left: MatSL2Z, right: MatSL2Z) -> int:
    return 1 if (left.inverse() @ right).trace > 0 else -1


def jump_sign(phi: PiecewiseSL2Map, x: ExtRational) -> int:
    """
    Sign change of a lift across x.

    The two pieces meeting at x agree projectively there, so their
    quotient is ±parabolic; the sign of its trace is returned. Points
    inside a piece give +1.
    """
    i = phi.piece_index(x)
    right = phi.pieces[i][1]
    left = phi.pieces[i - 1][1] if phi.pieces[i][0] == x else right
    return _trace_sign(left, right)


def lift_to_spin(s: MarkedTessellation) -> PiecewiseSL2Map:
    """
    Spin lift of the characteristic map of s.

    Pieces over the boundary edges of P are lifted counterclockwise. The
    sign jump where the pieces over e and its successor meet is the
    horocycle sign of their common vertex, so the lift changes sign
    exactly over the vertices with an odd number of marked edges.

    Raises:
        SpinTransportError: if the lift does not close up around the circle
    """
    leaves = sorted(leaf_pairs(s), key=lambda pair: pair[0].initial.sort_key())
    pieces: List[Tuple[ExtRational, MatSL2Z]] = []
    for domain, image in leaves:
        lifted = _leaf_matrix(domain, image).lift(1)
        if pieces and _trace_sign(pieces[-1][1], lifted) != horocycle_sign(s, image.initial):
            lifted = -lifted
        pieces.append((domain.initial, lifted))
    if _trace_sign(pieces[-1][1], pieces[0][1]) != horocycle_sign(s, leaves[0][1].initial):
        raise SpinTransportError(f"spin lift of {s} does not close up")
    return normalize_spin(PiecewiseSL2Map.from_pieces(pieces))


def compose_spin(f: PiecewiseSL2Map, g: PiecewiseSL2Map) -> PiecewiseSL2Map:
    return normalize_spin(f.compose(g))


@lru_cache(maxsize=None)
def generator_lift(g: Generator) -> PiecewiseSL2Map:
    """Lift of a single generator applied to the base state."""
    return lift_to_spin(apply_generator(base_state(), g))


def realize_lift(s: MarkedTessellation, target: PiecewiseSL2Map) -> MarkedTessellation:
    """
    Frontier marking on the projection of s whose lift is target.

    Raises:
        SpinTransportError: if target does not project to the characteristic map of s
    """
    if projectivize(target) != characteristic_map(s):
        raise SpinTransportError("lift does not project to the characteristic map of the state")
    for x in target.breakpoints:
        s = ensure_vertex(s, target.apply(x))
    parities = {
        image.initial: 0 if jump_sign(target, domain.initial) > 0 else 1 for domain, image in leaf_pairs(s)
    }
    return canonical_shrink(marking_from_parities(s.unmarked(), parities))


def transport_through_lift(s: MarkedTessellation, g: Generator) -> MarkedTessellation:
    """Move the projection of s by g and read the marking off lift(s) ∘ lift(g)."""
    moved = project_generator(s, g)
    target = compose_spin(lift_to_spin(s), generator_lift(g))
    return realize_lift(moved, target)


def act_word(s: MarkedTessellation, word: Sequence[Generator]) -> MarkedTessellation:
    for g in word:
        s = apply_generator(s, g)
    return s


def evaluate_word(word: Sequence[Generator]) -> MarkedTessellation:
    """The base state moved by the word, letters applied left to right."""
    return act_word(base_state(), word)


def word_to_map(word: Sequence[Generator]) -> PiecewiseSL2Map:
    return lift_to_spin(evaluate_word(word))


@dataclass
class DoubledDual:
    """
    Dual fatgraph of P glued to its mirror image along the frontier.

    Triangle k of the upper sheet owns half-edges 3k, 3k+1, 3k+2 through
    its counterclockwise sides; its mirror copy owns the same sides shifted
    by 3m, in the opposite cyclic order. The right and the left triangle of
    the doe come first, so the doe's upper dual edge runs from right to left.
    """

    graph: Fatgraph
    orient: Orientation
    triangles: Tuple[Tuple[ExtRational, ExtRational, ExtRational], ...]
    upper: Dict[Edge, int]

    def face_vertex(self, h: int) -> ExtRational:
        """Vertex of P at the center of the face containing half-edge h."""
        m = len(self.triangles)
        k, j = divmod(h % (3 * m), 3)
        return self.triangles[k][j if h < 3 * m else (j + 1) % 3]


def _ccw_triangle(*points: ExtRational) -> Tuple[ExtRational, ExtRational, ExtRational]:
    a, b, c = sorted(points, key=lambda v: v.sort_key())
    return a, b, c


def doubled_dual(s: MarkedTessellation) -> DoubledDual:
    """
    Trivalent fatgraph of the doubled support, oriented by the marks.

    Marked edges of P reverse their upper dual edge; mirror edges keep the
    reference direction. The result spans a sphere with one puncture per
    vertex of P.
    """
    right = _ccw_triangle(s.doe.initial, s.apex_right(s.doe), s.doe.terminal)
    left = _ccw_triangle(s.doe.initial, s.apex_left(s.doe), s.doe.terminal)
    order = (right, left) + tuple(t for t in s.triangles if t not in (right, left))
    m = len(order)
    slots: Dict[Edge, List[int]] = {}
    for k, tri in enumerate(order):
        for j in range(3):
            slots.setdefault(undirected(tri[j], tri[(j + 1) % 3]), []).append(3 * k + j)
    pairs = []
    for halves in slots.values():
        if len(halves) == 2:
            a, b = halves
            pairs.extend([(a, b), (a + 3 * m, b + 3 * m)])
        else:
            pairs.append((halves[0], halves[0] + 3 * m))
    cycles = [(3 * k, 3 * k + 1, 3 * k + 2) for k in range(m)]
    cycles += [(3 * k, 3 * k + 2, 3 * k + 1) for k in range(m, 2 * m)]
    graph = Fatgraph.build(cycles, pairs)
    upper = {e: graph.edge_of[halves[0]] for e, halves in slots.items()}
    bits = [0] * graph.num_edges
    for e in s.marks:
        bits[upper[e]] = 1
    return DoubledDual(graph=graph, orient=tuple(bits), triangles=order, upper=upper)


def doe_flip_state(s: MarkedTessellation) -> MarkedTessellation:
    """
    alpha computed on the doubled dual: spin_flip on the doe's upper dual
    edge, with marks read back from the upper sheet.
    """
    dual = doubled_dual(s)
    doe_edge = dual.upper[s.doe_edge]
    _, orient = spin_flip(dual.graph, dual.orient, doe_edge)
    moved = project_generator(s, Generator.ALPHA)
    marks = {e for e, i in dual.upper.items() if orient[i] and e != s.doe_edge}
    if orient[doe_edge]:
        marks.add(moved.doe_edge)
    return canonical_shrink(replace(moved, marks=frozenset(marks)))


def is_base_projection(s: MarkedTessellation) -> bool:
    return canonical_shrink(s.unmarked()) == base_state()


@dataclass
class RelatorReport:
    """Kernel data of a word evaluated on the base state."""

    word: str
    projection_trivial: bool
    charmap_identity: bool
    marking_trivial: bool
    residual_marks: List[Tuple[str, str]] = field(default_factory=list)
    residual_lift: Optional[dict] = None

    def to_json(self) -> dict:
        return {
            "word": self.word,
            "projection_trivial": self.projection_trivial,
            "charmap_identity": self.charmap_identity,
            "marking_trivial": self.marking_trivial,
            "residual_marks": [list(pair) for pair in self.residual_marks],
            "residual_lift": self.residual_lift,
        }


def verify_relator(word: Sequence[Generator]) -> RelatorReport:
    """Evaluate a word on the base state and report what survives."""
    result = evaluate_word(word)
    pushed = push_marks_to_frontier(result)
    report = RelatorReport(
        word=word_to_str(word),
        projection_trivial=is_base_projection(result),
        charmap_identity=characteristic_map(result).is_identity(),
        marking_trivial=states_equal(result, base_state()),
        residual_marks=[(str(a), str(b)) for a, b in sorted(pushed.marks, key=lambda e: (e[0].sort_key(), e[1].sort_key()))],
        residual_lift=lift_to_spin(result).to_json(),
    )
    logger.info(
        f"Relator {report.word}: projection_trivial={report.projection_trivial} "
        f"marking_trivial={report.marking_trivial}"
    )
    return report


def random_word(rng: np.random.Generator, length: int, alphabet: Sequence[Generator] = tuple(Generator)) -> Word:
    picks = rng.integers(0, len(alphabet), size=length)
    return tuple(alphabet[int(i)] for i in picks)


def random_marked_state(rng: np.random.Generator, length: int = 8) -> MarkedTessellation:
    """State reached by a random word, with a random extra marking on its edges."""
    s = evaluate_word(random_word(rng, length))
    toggles = rng.integers(0, 2, size=len(s.edges))
    extra = {e for e, bit in zip(s.edges, toggles) if bit}
    return replace(s, marks=s.marks ^ extra)


def kernel_test(word: Sequence[Generator], samples: int = 20, seed: int = 0) -> bool:
    """
    True iff the word fixes the base state and random marked states in Tess⁺.

    Raises:
        PreconditionFailed: if the word moves the characteristic map
    """
    if not characteristic_map(evaluate_word(word)).is_identity():
        raise PreconditionFailed(f"{word_to_str(word)} does not act trivially on the projection")
    rng = np.random.default_rng(seed)
    starts = [base_state()] + [random_marked_state(rng) for _ in range(samples)]
    for start in starts:
        if not states_equal(act_word(start, word), start):
            logger.debug(f"{word_to_str(word)} moves {start}")
            return False
    return True


def search_marking_classes(
    support: Sequence,
    max_length: int = 12,
    support_cap: int = 6,
    alphabet: Sequence[Generator] = tuple(Generator),
) -> Dict[PiecewiseSL2Map, Word]:
    """
    Breadth-first search for words realizing frontier marking classes.

    Returns the shortest word found for every reachable lift whose
    projection is trivial and whose breakpoints lie in the given support.
    States are identified by their lift, which determines them in Tess⁺.
    """
    allowed = set(support)
    target_count = 2 ** (len(allowed) - 1)
    start = base_state()
    seen = {lift_to_spin(start): ()}
    found: Dict[PiecewiseSL2Map, Word] = {}
    frontier = deque([(start, ())])
    while frontier and len(found) < target_count:
        s, word = frontier.popleft()
        lift = lift_to_spin(s)
        if lift.is_kernel_element() and set(lift.breakpoints) <= allowed | {DOE.terminal}:
            found.setdefault(lift, word)
        if len(word) >= max_length:
            continue
        for g in alphabet:
            t = apply_generator(s, g)
            if len(t.support) > support_cap:
                continue
            key = lift_to_spin(t)
            if key in seen:
                continue
            seen[key] = word + (g,)
            frontier.append((t, word + (g,)))
    logger.info(f"Marking search visited {len(seen)} states, found {len(found)} classes")
    return found


_LETTERS = {
    "a": Generator.ALPHA,
    "α": Generator.ALPHA,
    "A": Generator.ALPHA_INV,
    "b": Generator.BETA,
    "β": Generator.BETA,
    "B": Generator.BETA_INV,
    "t": Generator.T,
    "T": Generator.T_INV,
}


def invert_word(word: Sequence[Generator]) -> Word:
    return tuple(g.inverse for g in reversed(word))


class _WordParser:
    """Recursive descent over letters, inverses, powers, groups and commutators."""

    def __init__(self, text: str):
        self.text = "".join(text.split())
        self.pos = 0

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> Word:
        word = self.sequence()
        if self.pos != len(self.text):
            raise WordSyntaxError(f"Unexpected {self.peek()!r} at position {self.pos}")
        return word

    def sequence(self) -> Word:
        word: Word = ()
        while self.peek() and self.peek() not in ",)]":
            word += self.item()
        return word

    def item(self) -> Word:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            atom = self.sequence()
            self.expect(")")
        elif ch == "[":
            self.pos += 1
            x = self.sequence()
            self.expect(",")
            y = self.sequence()
            self.expect("]")
            atom = x + y + invert_word(x) + invert_word(y)
        elif ch in _LETTERS:
            self.pos += 1
            atom = (_LETTERS[ch],)
        else:
            raise WordSyntaxError(f"Unexpected {ch!r} at position {self.pos}")
        return self.suffix(atom)

    def suffix(self, atom: Word) -> Word:
        while True:
            if self.peek() == "'":
                self.pos += 1
                atom = invert_word(atom)
            elif self.text.startswith("⁻¹", self.pos):
                self.pos += 2
                atom = invert_word(atom)
            elif self.peek() and self.peek() in "²³⁴⁵":
                atom = atom * ("²³⁴⁵".index(self.peek()) + 2)
                self.pos += 1
            elif self.peek() == "^":
                self.pos += 1
                start = self.pos
                if self.peek() == "-":
                    self.pos += 1
                while self.peek().isdigit():
                    self.pos += 1
                try:
                    n = int(self.text[start : self.pos])
                except ValueError:
                    raise WordSyntaxError(f"Bad exponent at position {start}") from None
                atom = invert_word(atom) * -n if n < 0 else atom * n
            else:
                return atom

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            raise WordSyntaxError(f"Expected {ch!r} at position {self.pos}")
        self.pos += 1


def parse_word(text: str) -> Word:
    """
    Parse a generator word.

    Letters are a/α, b/β, t; A, B, T or a trailing ' or ⁻¹ invert; ^n and
    superscripts 2-5 repeat; (w) groups; [x,y] is x y x⁻¹ y⁻¹.
    """
    if text.strip() in ("", "1", "e", "ε"):
        return ()
    return _WordParser(text).parse()


def word_to_str(word: Sequence[Generator]) -> str:
    return "".join(g.value for g in word) or "1"


RELATORS: Dict[str, Word] = {
    "alpha^4": parse_word("α^4"),
    "beta^3": parse_word("β^3"),
    "(alpha beta)^5": parse_word("(αβ)^5"),
    "[bab, aababaa]": parse_word("[βαβ, α²βαβα²]"),
    "[bab, aabbaababaabaa]": parse_word("[βαβ, α²β²α²βαβα²βα²]"),
}
