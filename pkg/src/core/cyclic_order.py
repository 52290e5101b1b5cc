"""
Cyclic Order on Q/Z
===================

Exact angles, the cyclic orientation and separation relations, classification of
finite maps, piecewise affine homogeneity witnesses and the Split construction.
"""

import functools
import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .errors import (
    DegenerateQuadruple,
    DegeneratePair,
    DegenerateTriple,
    NotInjective,
    NotMember,
    NotMonotone,
    NotSubset,
    Singleton,
    TooFewPoints,
)

logger = logging.getLogger(__name__)

AngleLike = Union['Angle', Fraction, int, str]


# =============================================================================
# ANGLES
# =============================================================================

@functools.total_ordering
@dataclass(frozen=True)
class Angle:
    """Reduced rational p/q in [0, 1).

    Ordering is the linear order of the lift to [0, 1); cyclic questions go
    through ``orient``.
    """
    numerator: int
    denominator: int

    def __post_init__(self):
        if self.denominator <= 0:
            raise ValueError(f"Angle denominator must be positive, got {self.denominator}")
        if not 0 <= self.numerator < self.denominator:
            raise ValueError(f"Angle {self.numerator}/{self.denominator} is not in [0, 1)")
        if Fraction(self.numerator, self.denominator).denominator != self.denominator:
            raise ValueError(f"Angle {self.numerator}/{self.denominator} is not reduced")

    @classmethod
    def of(cls, value: AngleLike) -> 'Angle':
        """Build an angle from a Fraction, int, "p/q" string or Angle, reducing mod 1."""
        if isinstance(value, Angle):
            return value
        if isinstance(value, str):
            value = Fraction(value.strip())
        frac = Fraction(value) % 1
        return cls(frac.numerator, frac.denominator)

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __add__(self, other: AngleLike) -> 'Angle':
        return Angle.of(self.value + _as_fraction(other))

    def __sub__(self, other: AngleLike) -> 'Angle':
        return Angle.of(self.value - _as_fraction(other))

    def __neg__(self) -> 'Angle':
        return Angle.of(-self.value)

    def __lt__(self, other: 'Angle') -> bool:
        if not isinstance(other, Angle):
            return NotImplemented
        return self.value < other.value

    def doubled(self) -> 'Angle':
        return Angle.of(2 * self.value)

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"

    def __repr__(self) -> str:
        return f"Angle({self})"


ZERO = Angle(0, 1)


def _as_fraction(value: AngleLike) -> Fraction:
    if isinstance(value, Angle):
        return value.value
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def parse_angle(text: str) -> Angle:
    """Parse the "p/q" wire form (also accepts integers)."""
    try:
        return Angle.of(text)
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"Invalid angle '{text}': {e}")


def arc_length(start: Angle, end: Angle) -> Fraction:
    """Length of the positive arc from start to end, in (0, 1] (1 when equal)."""
    length = (end.value - start.value) % 1
    return length if length else Fraction(1)


def sorted_from(angles: Iterable[Angle], start: Angle) -> List[Angle]:
    """Angles listed in positive cyclic order beginning at ``start``."""
    return sorted(set(angles), key=lambda a: (a.value - start.value) % 1)


def canonical_angles() -> Iterable[Angle]:
    """Every angle once: by denominator, then numerator (0, 1/2, 1/3, 2/3, 1/4, ...)."""
    for q in itertools.count(1):
        for p in range(q):
            if Fraction(p, q).denominator == q:
                yield Angle(p, q)


# =============================================================================
# ORIENTATION AND SEPARATION
# =============================================================================

class Orientation(Enum):
    """Sign of a cyclically ordered triple."""
    POSITIVE = 1
    NEGATIVE = -1

    def __neg__(self) -> 'Orientation':
        return Orientation.NEGATIVE if self is Orientation.POSITIVE else Orientation.POSITIVE

    def __mul__(self, other: 'Orientation') -> 'Orientation':
        return Orientation(self.value * other.value)


def orient(a: Angle, b: Angle, c: Angle) -> Orientation:
    """Orientation of (a, b, c): positive iff b comes before c going around from a.

    Raises:
        DegenerateTriple: If two arguments coincide
    """
    if a == b or b == c or a == c:
        raise DegenerateTriple(f"orient needs distinct angles, got ({a}, {b}, {c})")
    lift_b = (b.value - a.value) % 1
    lift_c = (c.value - a.value) % 1
    return Orientation.POSITIVE if lift_b < lift_c else Orientation.NEGATIVE


def separates(a: Angle, b: Angle, c: Angle, d: Angle) -> bool:
    """True iff {a, c} and {b, d} interleave on the circle.

    Raises:
        DegenerateQuadruple: On repeated arguments
    """
    if len({a, b, c, d}) != 4:
        raise DegenerateQuadruple(f"separates needs distinct angles, got ({a}, {b}, {c}, {d})")
    positive = Orientation.POSITIVE
    return (
        (orient(a, b, c) is positive and orient(c, d, a) is positive)
        or (orient(a, d, c) is positive and orient(c, b, a) is positive)
    )


def in_open_arc(x: Angle, start: Angle, end: Angle) -> bool:
    """True iff x lies strictly inside the positive arc from start to end."""
    if x == start or x == end:
        return False
    if start == end:
        return True
    return orient(start, x, end) is Orientation.POSITIVE


# =============================================================================
# FINITE MAPS
# =============================================================================

class Classification(Enum):
    PRESERVING = "preserving"
    REVERSING = "reversing"
    NEITHER = "neither"


@dataclass(frozen=True)
class FinitePartialMap:
    """Finite injective map between angles, pairs kept sorted by source."""
    pairs: Tuple[Tuple[Angle, Angle], ...] = ()

    def __post_init__(self):
        ordered = tuple(sorted(((Angle.of(s), Angle.of(t)) for s, t in self.pairs), key=lambda p: p[0]))
        sources = [s for s, _ in ordered]
        targets = [t for _, t in ordered]
        if len(set(sources)) != len(sources):
            raise NotInjective("FinitePartialMap has a repeated source")
        if len(set(targets)) != len(targets):
            raise NotInjective("FinitePartialMap has a repeated target")
        object.__setattr__(self, "pairs", ordered)

    @classmethod
    def from_dict(cls, mapping: Dict[AngleLike, AngleLike]) -> 'FinitePartialMap':
        return cls(tuple((Angle.of(s), Angle.of(t)) for s, t in mapping.items()))

    @classmethod
    def identity_on(cls, points: Iterable[AngleLike]) -> 'FinitePartialMap':
        return cls(tuple((Angle.of(p), Angle.of(p)) for p in points))

    @property
    def sources(self) -> Tuple[Angle, ...]:
        return tuple(s for s, _ in self.pairs)

    @property
    def targets(self) -> Tuple[Angle, ...]:
        return tuple(t for _, t in self.pairs)

    def as_dict(self) -> Dict[Angle, Angle]:
        return dict(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, source: Angle) -> bool:
        return source in self.as_dict()

    def __call__(self, source: Angle) -> Angle:
        return self.as_dict()[source]

    def with_pair(self, source: Angle, target: Angle) -> 'FinitePartialMap':
        return FinitePartialMap(self.pairs + ((source, target),))

    def inverse(self) -> 'FinitePartialMap':
        return FinitePartialMap(tuple((t, s) for s, t in self.pairs))

    def to_json(self) -> List[List[str]]:
        return [[str(s), str(t)] for s, t in self.pairs]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[str]]) -> 'FinitePartialMap':
        return cls(tuple((parse_angle(s), parse_angle(t)) for s, t in data))


def _cyclic_descents(values: Sequence[Angle]) -> int:
    n = len(values)
    return sum(1 for i in range(n) if values[(i + 1) % n] < values[i])


def classify(m: FinitePartialMap) -> Classification:
    """Decide whether m preserves, reverses or breaks the cyclic order.

    Reading targets in increasing source order, m preserves the order iff the
    target sequence has exactly one cyclic descent, and reverses it iff it has
    exactly one cyclic ascent.

    Raises:
        TooFewPoints: If m has fewer than 3 pairs
    """
    if len(m) < 3:
        raise TooFewPoints(f"classify needs at least 3 pairs, got {len(m)}")
    targets = m.targets
    descents = _cyclic_descents(targets)
    if descents == 1:
        return Classification.PRESERVING
    if descents == len(targets) - 1:
        return Classification.REVERSING
    return Classification.NEITHER


def monotone_direction(m: FinitePartialMap) -> Classification:
    """Like classify, but maps with fewer than 3 pairs count as preserving."""
    if len(m) < 3:
        return Classification.PRESERVING
    return classify(m)


# =============================================================================
# PIECEWISE AFFINE MAPS
# =============================================================================

@dataclass(frozen=True)
class PiecewiseAffineMap:
    """Bijection of Q/Z interpolating affinely between anchor pairs.

    Between consecutive anchors (x_i, y_i), (x_{i+1}, y_{i+1}) the map is affine
    onto the arc from y_i to y_{i+1}, taken positively when ``reversing`` is
    False and negatively otherwise. Anchors are normalized to the breakpoints so
    that equal maps compare equal; a map without breakpoints keeps one anchor
    at 0.
    """
    anchors: Tuple[Tuple[Angle, Angle], ...] = ((ZERO, ZERO),)
    reversing: bool = False

    def __post_init__(self):
        graph = FinitePartialMap(tuple(self.anchors))
        if not graph.pairs:
            raise DegeneratePair("PiecewiseAffineMap needs at least one anchor")
        direction = monotone_direction(graph)
        expected = Classification.REVERSING if self.reversing else Classification.PRESERVING
        if len(graph) >= 3 and direction is not expected:
            raise NotMonotone(f"Anchors are not {expected.value}: {graph.to_json()}")
        object.__setattr__(self, "anchors", self._normalize(graph.pairs, self.reversing))

    @staticmethod
    def _spans(anchors: Sequence[Tuple[Angle, Angle]], reversing: bool) -> List[Fraction]:
        slopes = []
        k = len(anchors)
        for i in range(k):
            (x0, y0), (x1, y1) = anchors[i], anchors[(i + 1) % k]
            source = arc_length(x0, x1)
            target = arc_length(y1, y0) if reversing else arc_length(y0, y1)
            slopes.append(target / source)
        return slopes

    @classmethod
    def _normalize(cls, anchors: Sequence[Tuple[Angle, Angle]], reversing: bool) -> Tuple[Tuple[Angle, Angle], ...]:
        anchors = list(anchors)
        while len(anchors) >= 2:
            slopes = cls._spans(anchors, reversing)
            k = len(anchors)
            redundant = [i for i in range(k) if slopes[i - 1] == slopes[i]]
            if not redundant:
                break
            del anchors[redundant[0]]
        if len(anchors) == 1:
            x0, y0 = anchors[0]
            shift = y0.value + x0.value if reversing else y0.value - x0.value
            anchors = [(ZERO, Angle.of(shift))]
        return tuple(anchors)

    @classmethod
    def identity(cls) -> 'PiecewiseAffineMap':
        return cls()

    @classmethod
    def rotation(cls, shift: AngleLike) -> 'PiecewiseAffineMap':
        return cls(((ZERO, Angle.of(shift)),))

    @classmethod
    def reflection(cls, shift: AngleLike = 0) -> 'PiecewiseAffineMap':
        """x -> shift - x."""
        return cls(((ZERO, Angle.of(shift)),), reversing=True)

    @classmethod
    def interpolating(cls, m: FinitePartialMap) -> 'PiecewiseAffineMap':
        """The canonical extension of a monotone finite map (identity when empty)."""
        if not m.pairs:
            return cls.identity()
        direction = monotone_direction(m)
        if direction is Classification.NEITHER:
            raise NotMonotone(f"Map is neither preserving nor reversing: {m.to_json()}")
        return cls(m.pairs, reversing=direction is Classification.REVERSING)

    @property
    def breakpoints(self) -> Tuple[Angle, ...]:
        return tuple(x for x, _ in self.anchors) if len(self.anchors) > 1 else ()

    @property
    def slopes(self) -> Tuple[Fraction, ...]:
        return tuple(self._spans(self.anchors, self.reversing))

    @property
    def classification(self) -> Classification:
        return Classification.REVERSING if self.reversing else Classification.PRESERVING

    def is_identity(self) -> bool:
        return self == PiecewiseAffineMap.identity()

    def __call__(self, x: Angle) -> Angle:
        k = len(self.anchors)
        # last anchor whose lift from the first anchor does not exceed x's
        first = self.anchors[0][0]
        offset = (x.value - first.value) % 1
        index = 0
        for i, (xi, _) in enumerate(self.anchors):
            if (xi.value - first.value) % 1 <= offset:
                index = i
        xi, yi = self.anchors[index]
        slope = self.slopes[index] if k > 1 else Fraction(1)
        delta = slope * ((x.value - xi.value) % 1)
        return Angle.of(yi.value - delta if self.reversing else yi.value + delta)

    def inverse(self) -> 'PiecewiseAffineMap':
        return PiecewiseAffineMap(tuple((y, x) for x, y in self.anchors), reversing=self.reversing)

    def compose(self, other: 'PiecewiseAffineMap') -> 'PiecewiseAffineMap':
        """self after other."""
        back = other.inverse()
        points = {x for x, _ in other.anchors} | {back(x) for x, _ in self.anchors}
        pairs = tuple((p, self(other(p))) for p in points)
        return PiecewiseAffineMap(pairs, reversing=self.reversing != other.reversing)

    def restrict(self, points: Iterable[Angle]) -> FinitePartialMap:
        return FinitePartialMap(tuple((p, self(p)) for p in points))

    def to_json(self) -> Dict[str, object]:
        return {
            "anchors": [[str(x), str(y)] for x, y in self.anchors],
            "reversing": self.reversing,
        }

    @classmethod
    def from_json(cls, data: Dict[str, object]) -> 'PiecewiseAffineMap':
        anchors = tuple((parse_angle(x), parse_angle(y)) for x, y in data["anchors"])
        return cls(anchors, reversing=bool(data.get("reversing", False)))


def transitive_witness(sources: Sequence[Angle], targets: Sequence[Angle]) -> PiecewiseAffineMap:
    """Order-preserving piecewise affine map sending sources[i] to targets[i].

    Raises:
        DegeneratePair: On repeated points
        NotMonotone: If the two tuples are not cyclically ordered alike
    """
    if len(set(sources)) != len(sources) or len(set(targets)) != len(targets):
        raise DegeneratePair("Witness points must be pairwise distinct")
    m = FinitePartialMap(tuple(zip(sources, targets)))
    if monotone_direction(m) is not Classification.PRESERVING:
        raise NotMonotone("Source and target tuples carry different cyclic orders")
    return PiecewiseAffineMap(m.pairs)


def two_transitive_witness(a: Angle, b: Angle, a2: Angle, b2: Angle) -> PiecewiseAffineMap:
    """Order-preserving map with a -> a2 and b -> b2.

    After translating a and a2 to 0 this is the two-piece rule
    x -> b2'x/b' on [0, b') and the complementary affine piece on [b', 1).

    Raises:
        DegeneratePair: If a == b or a2 == b2
    """
    if a == b or a2 == b2:
        raise DegeneratePair(f"Pairs must be distinct: ({a}, {b}) -> ({a2}, {b2})")
    return transitive_witness((a, b), (a2, b2))


def three_transitive_witness(points: Sequence[Angle], images: Sequence[Angle]) -> PiecewiseAffineMap:
    """Order-preserving map between two positively (or negatively) ordered triples."""
    if len(points) != 3 or len(images) != 3:
        raise TooFewPoints("three_transitive_witness needs exactly three points")
    return transitive_witness(points, images)


def extend_point(m: FinitePartialMap, x: Angle) -> FinitePartialMap:
    """Add one pair (x, y) to a monotone finite map.

    y is the image of x under the affine interpolation of m, so it lies strictly
    inside the target arc matching x's source arc, and extending in any order
    never changes the interpolant.

    Raises:
        NotMonotone: If m is neither preserving nor reversing
        NotMember: If x is already a source
    """
    if x in m:
        raise NotMember(f"{x} is already in the domain")
    extension = PiecewiseAffineMap.interpolating(m)
    y = extension(x)
    logger.debug(f"extend_point: {x} -> {y}")
    return m.with_pair(x, y)


# =============================================================================
# SPLIT CONSTRUCTION
# =============================================================================

class Side(Enum):
    MINUS = "minus"
    PLAIN = "plain"
    PLUS = "plus"


_SIDE_RANK = {Side.MINUS: 0, Side.PLAIN: 0, Side.PLUS: 1}


@functools.total_ordering
@dataclass(frozen=True)
class SplitPoint:
    """A point of Split(X, A): a plain angle, or one of the two copies a-, a+."""
    base: Angle
    side: Side = Side.PLAIN

    @property
    def key(self) -> Tuple[Fraction, int]:
        return (self.base.value, _SIDE_RANK[self.side])

    def __lt__(self, other: 'SplitPoint') -> bool:
        if not isinstance(other, SplitPoint):
            return NotImplemented
        return self.key < other.key

    def __str__(self) -> str:
        suffix = {Side.MINUS: "-", Side.PLUS: "+", Side.PLAIN: ""}[self.side]
        return f"{self.base}{suffix}"


def nu(point: SplitPoint) -> Angle:
    """Forgetful map Split(X, A) -> X."""
    return point.base


def split_orient(p: SplitPoint, q: SplitPoint, r: SplitPoint) -> Orientation:
    """Cyclic orientation on split points, a- immediately followed by a+."""
    if p == q or q == r or p == r:
        raise DegenerateTriple(f"split_orient needs distinct points, got ({p}, {q}, {r})")
    increasing = (p < q < r) or (q < r < p) or (r < p < q)
    return Orientation.POSITIVE if increasing else Orientation.NEGATIVE


def split(points: Sequence[Angle], split_set: Iterable[Angle]) -> List[SplitPoint]:
    """Double every point of split_set into an adjacent pair a-, a+.

    Output is in positive cyclic order starting at ``points[0]``.

    Raises:
        NotSubset: If split_set is not contained in points
        DegeneratePair: If points repeat
    """
    split_set = set(split_set)
    if len(set(points)) != len(points):
        raise DegeneratePair("split points must be pairwise distinct")
    if not split_set <= set(points):
        raise NotSubset(f"Split set {sorted(map(str, split_set - set(points)))} is not among the points")
    if not points:
        return []
    result: List[SplitPoint] = []
    for base in sorted_from(points, points[0]):
        if base in split_set:
            result.extend((SplitPoint(base, Side.MINUS), SplitPoint(base, Side.PLUS)))
        else:
            result.append(SplitPoint(base))
    return result


def split_successor(points: Iterable[SplitPoint], x: SplitPoint) -> SplitPoint:
    """Cyclic successor among split points."""
    others = [p for p in set(points) if p != x]
    if not others:
        raise Singleton("Cyclic successor needs at least two points")
    after = [p for p in others if p > x]
    return min(after) if after else min(others)


def cyclic_successor(points: Iterable[Angle], x: Angle) -> Angle:
    """Minimum of points without x under the linear order y <_x z iff orient(x, y, z) > 0.

    Raises:
        Singleton: If there is only one point
        NotMember: If x is not among the points
    """
    points = set(points)
    if len(points) == 1:
        raise Singleton("Cyclic successor needs at least two points")
    if x not in points:
        raise NotMember(f"{x} is not in the set")
    return min((p for p in points if p != x), key=lambda p: (p.value - x.value) % 1)
