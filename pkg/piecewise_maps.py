"""
Piecewise-modular homeomorphisms of the rational circle.

A map is a cyclic list of (breakpoint, matrix) pairs; piece i acts on the
counterclockwise half-open arc [x_i, x_{i+1}). PiecewiseProjMap models
PPSL(2,Z) (matrices up to sign, continuous at breakpoints);
PiecewiseSL2Map models P(SL(2,Z)), where the sign of each piece is data.

Instances are always held in normal form: breakpoints sorted by the
circle's linear order, cyclically adjacent equal pieces merged, and a
single piece anchored at ∞.
"""

import logging
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import ClassVar, Iterable, List, Optional, Sequence, Tuple, Union

from modular_arithmetic import (
    INFINITY,
    ExtRational,
    MatSL2Z,
    ProjMat,
    mobius_apply,
)

logger = logging.getLogger(__name__)

Matrix = Union[ProjMat, MatSL2Z]


class InvalidPiecewiseMap(ValueError):
    """Raised when a piecewise map violates order, continuity or bijectivity."""


@dataclass
class ValidationReport:
    """Outcome of validate(): ok flag plus located problems."""

    ok: bool
    problems: List[str] = field(default_factory=list)
    breakpoint: Optional[ExtRational] = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class PiecewiseMap:
    """Shared behaviour of the projective and the SL(2,Z) piecewise maps."""

    pieces: Tuple[Tuple[ExtRational, Matrix], ...]

    kind: ClassVar[str] = ""

    @classmethod
    def _coerce(cls, m: Matrix) -> Matrix:
        raise NotImplementedError

    @classmethod
    def _identity_matrix(cls) -> Matrix:
        raise NotImplementedError

    @classmethod
    def from_pieces(cls, pieces: Iterable[Tuple[ExtRational, Matrix]]):
        """Build a map in normal form from pieces given in any order."""
        items = sorted(
            ((x, cls._coerce(m)) for x, m in pieces), key=lambda item: item[0].sort_key()
        )
        if not items:
            raise InvalidPiecewiseMap("a piecewise map needs at least one piece")
        keys = [x for x, _ in items]
        if len(set(keys)) != len(keys):
            raise InvalidPiecewiseMap("breakpoints must be distinct")
        n = len(items)
        kept = [items[i] for i in range(n) if items[i][1] != items[i - 1][1]]
        if not kept:
            kept = [(INFINITY, items[0][1])]
        return cls(tuple(kept))

    @classmethod
    def identity(cls):
        return cls(((INFINITY, cls._identity_matrix()),))

    @classmethod
    def constant(cls, m: Matrix):
        return cls(((INFINITY, cls._coerce(m)),))

    @property
    def breakpoints(self) -> Tuple[ExtRational, ...]:
        return tuple(x for x, _ in self.pieces)

    @property
    def matrices(self) -> Tuple[Matrix, ...]:
        return tuple(m for _, m in self.pieces)

    def piece_index(self, x: ExtRational) -> int:
        """Index of the piece whose half-open arc contains x."""
        keys = [b.sort_key() for b in self.breakpoints]
        i = bisect_right(keys, x.sort_key()) - 1
        return i % len(self.pieces)

    def matrix_at(self, x: ExtRational) -> Matrix:
        return self.pieces[self.piece_index(x)][1]

    def apply(self, x: ExtRational) -> ExtRational:
        return mobius_apply(self.matrix_at(x), x)

    def compose(self, other):
        """self ∘ other, on the common refinement of the two piece structures."""
        if type(self) is not type(other):
            raise TypeError("compose needs two maps of the same kind")
        other_inverse = other.invert()
        points = set(other.breakpoints)
        points.update(other_inverse.apply(b) for b in self.breakpoints)
        pieces = [
            (x, self.matrix_at(other.apply(x)) @ other.matrix_at(x)) for x in points
        ]
        return type(self).from_pieces(pieces)

    def invert(self):
        return type(self).from_pieces(
            (mobius_apply(m, x), m.inverse()) for x, m in self.pieces
        )

    def refine(self, points: Iterable[ExtRational]) -> List[Tuple[ExtRational, Matrix]]:
        """Presentation of the same map with extra breakpoints (not normalized)."""
        all_points = sorted(set(self.breakpoints) | set(points), key=lambda x: x.sort_key())
        return [(x, self.matrix_at(x)) for x in all_points]

    def is_identity(self) -> bool:
        return self == type(self).identity()

    def validate(self) -> ValidationReport:
        return validate_pieces(list(self.pieces))

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "pieces": [{"from": str(x), "mat": m.as_rows()} for x, m in self.pieces],
        }

    def __str__(self) -> str:
        body = ", ".join(f"[{x}: {m}]" for x, m in self.pieces)
        return f"{self.kind}({body})"


class PiecewiseProjMap(PiecewiseMap):
    """Element of PPSL(2,Z)."""

    kind: ClassVar[str] = "psl"

    @classmethod
    def _coerce(cls, m: Matrix) -> ProjMat:
        return m if isinstance(m, ProjMat) else ProjMat.of(m)

    @classmethod
    def _identity_matrix(cls) -> ProjMat:
        return ProjMat.from_entries(1, 0, 0, 1)


class PiecewiseSL2Map(PiecewiseMap):
    """Element of P(SL(2,Z)): signs may jump at breakpoints."""

    kind: ClassVar[str] = "sl"

    @classmethod
    def _coerce(cls, m: Matrix) -> MatSL2Z:
        if isinstance(m, ProjMat):
            raise TypeError("an SL(2,Z) piece needs a signed matrix")
        return m

    @classmethod
    def _identity_matrix(cls) -> MatSL2Z:
        return MatSL2Z(1, 0, 0, 1)

    def is_kernel_element(self) -> bool:
        """True iff every piece is +I or -I, i.e. the projectivization is trivial."""
        return all(m.entries() in ((1, 0, 0, 1), (-1, 0, 0, -1)) for m in self.matrices)


def validate_pieces(
    pieces: Sequence[Tuple[ExtRational, Matrix]], require_normal_form: bool = True
) -> ValidationReport:
    """
    Check a raw piece list without normalizing it.

    Reports unsorted or repeated breakpoints, projective discontinuities and
    images of breakpoints that are not strictly counterclockwise. With
    require_normal_form, cyclically adjacent equal matrices and a single
    piece not anchored at ∞ are reported too.
    """
    report = ValidationReport(ok=True)
    if not pieces:
        report.ok = False
        report.problems.append("no pieces")
        return report
    keys = [x.sort_key() for x, _ in pieces]
    for i in range(1, len(keys)):
        if keys[i] <= keys[i - 1]:
            report.ok = False
            report.breakpoint = report.breakpoint or pieces[i][0]
            report.problems.append(f"breakpoint {pieces[i][0]} is out of order or repeated")
    n = len(pieces)
    if n == 1:
        if require_normal_form and pieces[0][0] != INFINITY:
            report.ok = False
            report.breakpoint = pieces[0][0]
            report.problems.append(f"single piece starts at {pieces[0][0]} instead of ∞")
        return report
    images = []
    for i in range(n):
        x_next, m_next = pieces[(i + 1) % n]
        m = pieces[i][1]
        here, there = mobius_apply(m, x_next), mobius_apply(m_next, x_next)
        if here != there:
            report.ok = False
            report.breakpoint = report.breakpoint or x_next
            report.problems.append(
                f"discontinuity at {x_next}: left value {here}, right value {there}"
            )
        if require_normal_form and m == m_next:
            report.ok = False
            report.breakpoint = report.breakpoint or x_next
            report.problems.append(f"pieces meeting at {x_next} share the matrix {m}")
        images.append(mobius_apply(pieces[i][1], pieces[i][0]).sort_key())
    descents = sum(1 for i in range(n) if images[i] >= images[(i + 1) % n])
    if descents != 1:
        report.ok = False
        report.problems.append("images of breakpoints are not counterclockwise ordered")
    if not report.ok:
        logger.debug(f"Invalid piecewise map: {report.problems}")
    return report


def projectivize(phi: PiecewiseSL2Map) -> PiecewiseProjMap:
    """Forget signs; adjacent pieces equal up to sign merge."""
    return PiecewiseProjMap.from_pieces((x, ProjMat.of(m)) for x, m in phi.pieces)


def equal(f: PiecewiseMap, g: PiecewiseMap) -> bool:
    return type(f) is type(g) and f.pieces == g.pieces


def map_from_json(data: dict) -> PiecewiseMap:
    """Parse {"kind": "psl"|"sl", "pieces": [{"from": "p/q", "mat": [[a,b],[c,d]]}]}."""
    kind = data.get("kind")
    if kind not in ("psl", "sl"):
        raise InvalidPiecewiseMap(f"Unknown map kind: {kind!r}")
    if "pieces" not in data:
        raise InvalidPiecewiseMap("Map must contain 'pieces' field")
    raw = []
    for piece in data["pieces"]:
        x = ExtRational.parse(str(piece["from"]))
        m = MatSL2Z.from_rows(piece["mat"])
        raw.append((x, ProjMat.of(m) if kind == "psl" else m))
    raw.sort(key=lambda item: item[0].sort_key())
    report = validate_pieces(raw, require_normal_form=False)
    if not report:
        raise InvalidPiecewiseMap("; ".join(report.problems))
    cls = PiecewiseProjMap if kind == "psl" else PiecewiseSL2Map
    return cls.from_pieces(raw)
