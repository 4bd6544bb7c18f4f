"""
Exact arithmetic on the rational circle Q ∪ {∞} and the modular group.

Points are reduced coprime pairs p/q with q >= 0 and ∞ stored as 1/0.
Matrices are unimodular integer 2x2 matrices; ProjMat is the class of a
matrix modulo sign, stored through a canonical representative.
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence, Tuple, Union

logger = logging.getLogger(__name__)


class NotUnimodular(ValueError):
    """Raised when a matrix does not have determinant one."""


class NotAFareyEdge(ValueError):
    """Raised when two points are not joined by an edge of the Farey tessellation."""


@dataclass(frozen=True)
class ExtRational:
    """A point p/q of the rational circle, ∞ being 1/0."""

    p: int
    q: int

    def __post_init__(self):
        if self.p == 0 and self.q == 0:
            raise ValueError("0/0 is not a point of the rational circle")
        if self.q < 0 or gcd(self.p, self.q) != 1:
            raise ValueError(f"{self.p}/{self.q} is not in reduced form")
        if self.q == 0 and self.p != 1:
            raise ValueError("infinity must be stored as 1/0")

    @classmethod
    def of(cls, p: int, q: int = 1) -> "ExtRational":
        """Reduce an arbitrary nonzero pair to canonical form."""
        if p == 0 and q == 0:
            raise ValueError("0/0 is not a point of the rational circle")
        g = gcd(p, q)
        p, q = p // g, q // g
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        return cls(p, q)

    @classmethod
    def parse(cls, text: str) -> "ExtRational":
        """Parse "p/q", "n", "inf" or "∞"."""
        token = text.strip()
        if token in ("inf", "∞", "oo", "infinity"):
            return INFINITY
        match = re.fullmatch(r"([+-]?\d+)(?:/([+-]?\d+))?", token)
        if not match:
            raise ValueError(f"Cannot parse rational point: {text!r}")
        p = int(match.group(1))
        q = int(match.group(2)) if match.group(2) is not None else 1
        return cls.of(p, q)

    @property
    def is_infinite(self) -> bool:
        return self.q == 0

    def to_fraction(self) -> Fraction:
        if self.is_infinite:
            raise ValueError("∞ has no finite value")
        return Fraction(self.p, self.q)

    def sort_key(self) -> Tuple[int, Fraction]:
        """Linear order on R ∪ {∞} with ∞ last; read cyclically it is counterclockwise."""
        if self.is_infinite:
            return (1, Fraction(0))
        return (0, Fraction(self.p, self.q))

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"

    def __repr__(self) -> str:
        return f"ExtRational({self.p}/{self.q})"


INFINITY = ExtRational(1, 0)
ZERO = ExtRational(0, 1)
ONE = ExtRational(1, 1)
MINUS_ONE = ExtRational(-1, 1)


@dataclass(frozen=True)
class MatSL2Z:
    """Integer matrix [[a, b], [c, d]] with ad - bc = 1."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise NotUnimodular(f"determinant of {self} is not 1")

    def __matmul__(self, other: "MatSL2Z") -> "MatSL2Z":
        return MatSL2Z(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __neg__(self) -> "MatSL2Z":
        return MatSL2Z(-self.a, -self.b, -self.c, -self.d)

    def inverse(self) -> "MatSL2Z":
        return MatSL2Z(self.d, -self.b, -self.c, self.a)

    @property
    def trace(self) -> int:
        return self.a + self.d

    def entries(self) -> Tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def as_rows(self):
        return [[self.a, self.b], [self.c, self.d]]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "MatSL2Z":
        (a, b), (c, d) = rows
        return cls(int(a), int(b), int(c), int(d))

    def __str__(self) -> str:
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


@dataclass(frozen=True)
class ProjMat:
    """Element of PSL(2,Z): first nonzero entry of the stored matrix is positive."""

    mat: MatSL2Z

    def __post_init__(self):
        first = next(x for x in self.mat.entries() if x != 0)
        if first < 0:
            raise ValueError(f"{self.mat} is not the canonical representative")

    @classmethod
    def of(cls, m: MatSL2Z) -> "ProjMat":
        first = next(x for x in m.entries() if x != 0)
        return cls(m if first > 0 else -m)

    @classmethod
    def from_entries(cls, a: int, b: int, c: int, d: int) -> "ProjMat":
        return cls.of(MatSL2Z(a, b, c, d))

    def __matmul__(self, other: "ProjMat") -> "ProjMat":
        return ProjMat.of(self.mat @ other.mat)

    def inverse(self) -> "ProjMat":
        return ProjMat.of(self.mat.inverse())

    def lift(self, sign: int) -> MatSL2Z:
        """The SL(2,Z) representative whose sgn equals sign."""
        return self.mat if sgn(self.mat) == sign else -self.mat

    def as_rows(self):
        return self.mat.as_rows()

    def __str__(self) -> str:
        return str(self.mat)


@dataclass(frozen=True)
class OrientedEdge:
    """Oriented geodesic between two points of the rational circle."""

    initial: ExtRational
    terminal: ExtRational

    def __post_init__(self):
        if self.initial == self.terminal:
            raise ValueError("an edge needs two distinct endpoints")

    def reversed(self) -> "OrientedEdge":
        return OrientedEdge(self.terminal, self.initial)

    def undirected(self) -> Tuple[ExtRational, ExtRational]:
        return undirected(self.initial, self.terminal)

    def __str__(self) -> str:
        return f"({self.initial} -> {self.terminal})"


Edge = Tuple[ExtRational, ExtRational]
AnyMat = Union[ProjMat, MatSL2Z]


def undirected(x: ExtRational, y: ExtRational) -> Edge:
    """Unordered edge stored as a pair sorted by the circle's linear order."""
    return (x, y) if x.sort_key() < y.sort_key() else (y, x)


IDENTITY = ProjMat(MatSL2Z(1, 0, 0, 1))
R = ProjMat.from_entries(0, -1, 1, 1)
S = ProjMat.from_entries(0, -1, 1, 0)
T = ProjMat.from_entries(1, -1, 0, 1)
U = ProjMat.from_entries(1, 0, 1, 1)

GENERATOR_MATRICES = {"R": R, "S": S, "T": T, "U": U}

DOE = OrientedEdge(ZERO, INFINITY)


def _raw(m: AnyMat) -> MatSL2Z:
    return m.mat if isinstance(m, ProjMat) else m


def mobius_apply(m: AnyMat, x: ExtRational) -> ExtRational:
    """Apply z -> (az + b)/(cz + d) to a rational point."""
    a, b, c, d = _raw(m).entries()
    return ExtRational.of(a * x.p + b * x.q, c * x.p + d * x.q)


def sgn(m: MatSL2Z) -> int:
    """Sign of the trace, or of the (2,1) entry when the trace vanishes."""
    if m.trace != 0:
        return 1 if m.trace > 0 else -1
    return 1 if m.c > 0 else -1


def edge_of_matrix(m: AnyMat) -> OrientedEdge:
    """The oriented edge e_A = A^-1 · doe, labelled (-b/a -> -d/c)."""
    a, b, c, d = _raw(m).entries()
    return OrientedEdge(ExtRational.of(-b, a), ExtRational.of(-d, c))


def farey_neighbors(x: ExtRational, y: ExtRational) -> bool:
    """True iff |p s - q r| = 1, i.e. x and y span an edge of the Farey tessellation."""
    return abs(x.p * y.q - x.q * y.p) == 1


def matrix_of_edge(e: OrientedEdge) -> ProjMat:
    """Inverse of edge_of_matrix on oriented Farey edges."""
    x, y = e.initial, e.terminal
    det = y.p * x.q - x.p * y.q
    if abs(det) != 1:
        raise NotAFareyEdge(f"{x} and {y} are not Farey neighbours")
    # columns (image of ∞, image of 0) of A^-1
    xp, xq = (x.p, x.q) if det == 1 else (-x.p, -x.q)
    inverse = MatSL2Z(y.p, xp, y.q, xq)
    return ProjMat.of(inverse.inverse())


def ccw_between(a: ExtRational, b: ExtRational, c: ExtRational) -> bool:
    """True iff b lies strictly inside the counterclockwise arc from a to c."""
    ka, kb, kc = a.sort_key(), b.sort_key(), c.sort_key()
    return ka < kb < kc or kb < kc < ka or kc < ka < kb


def in_ccw_arc(a: ExtRational, x: ExtRational, c: ExtRational) -> bool:
    """Closed-arc version of ccw_between."""
    return x == a or x == c or ccw_between(a, x, c)


_WORD_TOKEN = re.compile(r"\s*([RSTU])\s*('|⁻¹|\^-1)?")


def word_to_matrix(word: Union[str, Iterable[str]]) -> ProjMat:
    """
    Product of generators R, S, T, U read left to right.

    A word is either a string such as "T⁻¹U" or "T' U", or an iterable of
    tokens like ["T'", "U"].
    """
    text = word if isinstance(word, str) else " ".join(word)
    result = IDENTITY
    pos = 0
    text = text.strip()
    while pos < len(text):
        match = _WORD_TOKEN.match(text, pos)
        if not match or match.end() == pos:
            raise ValueError(f"Cannot parse modular word at: {text[pos:]!r}")
        letter = GENERATOR_MATRICES[match.group(1)]
        result = result @ (letter.inverse() if match.group(2) else letter)
        pos = match.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return result


def cayley_point(x: ExtRational) -> Tuple[Fraction, Fraction]:
    """Exact image (re, im) of x under s -> (s - i)/(s + i) on the unit circle."""
    norm = x.p * x.p + x.q * x.q
    return (Fraction(x.p * x.p - x.q * x.q, norm), Fraction(-2 * x.p * x.q, norm))
