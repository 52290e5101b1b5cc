"""
Quadratic Laminations
=====================

Finite truncations of the rabbit, basilica and airplane laminations generated
by pulling leaves back under angle doubling, with crossing checks, polygon
classes and a finite automorphism test.

Pullback picks, for every leaf {a, b}, one of the two sibling pairings of its
four half-angles::

    A = {a/2, b/2},       {a/2 + 1/2, b/2 + 1/2}
    B = {a/2, b/2 + 1/2}, {a/2 + 1/2, b/2}

A pairing is admissible when its leaves cross neither each other, nor any leaf
already present, nor the critical diameter (the diameter through the midpoint
of the seed's shortest leaf, halved). A pairing that reuses a present leaf is
preferred, then A.
"""

import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx

from .cyclic_order import (
    Angle,
    AngleLike,
    Classification,
    FinitePartialMap,
    arc_length,
    monotone_direction,
    parse_angle,
)
from .errors import BadArity, DegeneratePair, NoConsistentPairing, NotBijection

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


# =============================================================================
# LEAVES
# =============================================================================

def double(angle: AngleLike) -> Angle:
    """The angle-doubling map x -> 2x mod 1."""
    return Angle.of(angle).doubled()


@dataclass(frozen=True, order=True)
class Leaf:
    """Chord of the unit disk between two distinct angles, stored with a < b."""
    a: Angle
    b: Angle

    def __post_init__(self):
        a, b = Angle.of(self.a), Angle.of(self.b)
        if a == b:
            raise DegeneratePair(f"Leaf endpoints must differ, got {a} twice")
        if b < a:
            a, b = b, a
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def of(cls, x: AngleLike, y: AngleLike) -> 'Leaf':
        return cls(Angle.of(x), Angle.of(y))

    @property
    def endpoints(self) -> Tuple[Angle, Angle]:
        return (self.a, self.b)

    @property
    def length(self) -> Fraction:
        """Length of the shorter boundary arc, in (0, 1/2]."""
        forward = self.b.value - self.a.value
        return min(forward, 1 - forward)

    def doubled(self) -> Optional['Leaf']:
        """Image under doubling; None when the leaf is a diameter."""
        a, b = self.a.doubled(), self.b.doubled()
        return None if a == b else Leaf(a, b)

    def halves(self) -> Tuple[Tuple['Leaf', 'Leaf'], Tuple['Leaf', 'Leaf']]:
        """The two sibling pairings (A, B) of preimage leaves."""
        a, b = self.a.value / 2, self.b.value / 2
        pairing_a = (Leaf.of(a, b), Leaf.of(a + HALF, b + HALF))
        pairing_b = (Leaf.of(a, b + HALF), Leaf.of(a + HALF, b))
        return pairing_a, pairing_b

    def to_json(self) -> List[str]:
        return [str(self.a), str(self.b)]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> 'Leaf':
        if len(data) != 2:
            raise ValueError(f"Leaf needs two endpoints, got {list(data)}")
        return cls(parse_angle(data[0]), parse_angle(data[1]))

    def __str__(self) -> str:
        return f"{{{self.a}, {self.b}}}"


def crosses(l1: Leaf, l2: Leaf) -> bool:
    """True iff the endpoint pairs strictly interleave. Shared endpoints never cross."""
    if len({l1.a, l1.b, l2.a, l2.b}) < 4:
        return False
    inside_a = l1.a < l2.a < l1.b
    inside_b = l1.a < l2.b < l1.b
    return inside_a != inside_b


def orbit(leaf: Leaf) -> List[Leaf]:
    """Forward orbit under doubling, stopping before the first repeat or a diameter."""
    seen: List[Leaf] = []
    current: Optional[Leaf] = leaf
    while current is not None and current not in seen:
        seen.append(current)
        current = current.doubled()
    return seen


def period(leaf: Leaf) -> Optional[int]:
    """Exact period of a periodic leaf, None when the leaf is strictly preperiodic."""
    path = orbit(leaf)
    image = path[-1].doubled()
    return len(path) if image == leaf else None


# =============================================================================
# POLYGON CLASSES
# =============================================================================

@dataclass(frozen=True)
class PolygonClass:
    """Finite class of identified angles, listed in increasing order."""
    angles: Tuple[Angle, ...]

    def __post_init__(self):
        ordered = tuple(sorted(set(Angle.of(a) for a in self.angles)))
        if len(ordered) < 2:
            raise ValueError("A polygon class needs at least two angles")
        object.__setattr__(self, "angles", ordered)

    def __len__(self) -> int:
        return len(self.angles)

    def sides(self) -> Tuple[Leaf, ...]:
        if len(self.angles) == 2:
            return (Leaf(*self.angles),)
        count = len(self.angles)
        return tuple(Leaf(self.angles[i], self.angles[(i + 1) % count]) for i in range(count))

    def doubled(self) -> 'PolygonClass':
        return PolygonClass(tuple(a.doubled() for a in self.angles))

    def to_json(self) -> List[str]:
        return [str(a) for a in self.angles]

    def __str__(self) -> str:
        return "{" + ", ".join(str(a) for a in self.angles) + "}"


def rabbit_seed(n: int) -> PolygonClass:
    """Polygon of the angles 2^i / (2^n - 1), i = 0..n-1.

    Raises:
        BadArity: If n < 2
    """
    if n < 2:
        raise BadArity(f"Rabbit seed needs n >= 2, got {n}")
    q = 2 ** n - 1
    return PolygonClass(tuple(Angle.of(Fraction(2 ** i, q)) for i in range(n)))


def basilica_seed() -> PolygonClass:
    return rabbit_seed(2)


def airplane_seed() -> Leaf:
    return Leaf.of(Fraction(3, 7), Fraction(4, 7))


# =============================================================================
# LAMINATIONS
# =============================================================================

@dataclass(frozen=True)
class Lamination:
    """Finite lamination at a given pullback generation.

    ``frontier`` holds the leaves added by the latest pullback; earlier leaves
    already have their preimages present.
    """
    seed: str
    seed_leaves: Tuple[Leaf, ...]
    leaves: Tuple[Leaf, ...]
    generation: int = 0
    frontier: Optional[Tuple[Leaf, ...]] = None

    def __post_init__(self):
        if not self.seed_leaves:
            raise ValueError("A lamination needs at least one seed leaf")
        object.__setattr__(self, "leaves", tuple(sorted(set(self.leaves))))
        frontier = self.seed_leaves if self.frontier is None else self.frontier
        object.__setattr__(self, "frontier", tuple(sorted(set(frontier))))

    @classmethod
    def from_seed(cls, seed: str, leaves: Iterable[Leaf]) -> 'Lamination':
        leaves = tuple(sorted(set(leaves)))
        return cls(seed, leaves, leaves, 0, leaves)

    def __len__(self) -> int:
        return len(self.leaves)

    def __contains__(self, leaf: Leaf) -> bool:
        return leaf in set(self.leaves)

    @property
    def endpoints(self) -> Tuple[Angle, ...]:
        return tuple(sorted({a for leaf in self.leaves for a in leaf.endpoints}))

    @property
    def minor(self) -> Leaf:
        """Shortest seed leaf."""
        return min(self.seed_leaves, key=lambda leaf: (leaf.length, leaf))

    @property
    def critical_chord(self) -> Leaf:
        """Diameter whose endpoints double to the midpoint of the minor's short arc."""
        minor = self.minor
        start = minor.a if arc_length(minor.a, minor.b) <= HALF else minor.b
        value = (start.value + minor.length / 2) % 1
        return Leaf.of(value / 2, value / 2 + HALF)

    def to_json(self) -> Dict[str, object]:
        return {
            "seed": self.seed,
            "generation": self.generation,
            "seed_leaves": [leaf.to_json() for leaf in self.seed_leaves],
            "leaves": [leaf.to_json() for leaf in self.leaves],
            "frontier": [leaf.to_json() for leaf in self.frontier],
        }

    @classmethod
    def from_json(cls, data: Dict[str, object]) -> 'Lamination':
        try:
            return cls(
                seed=str(data["seed"]),
                seed_leaves=tuple(Leaf.from_json(x) for x in data["seed_leaves"]),
                leaves=tuple(Leaf.from_json(x) for x in data["leaves"]),
                generation=int(data["generation"]),
                frontier=tuple(Leaf.from_json(x) for x in data["frontier"]) if "frontier" in data else None,
            )
        except KeyError as e:
            raise ValueError(f"Lamination JSON is missing {e}")

    def to_svg(self, size: int = 500) -> str:
        """Chords of the unit circle, polygon classes filled."""
        from ..utils.svg import svg_circle, svg_document, svg_line, svg_polygon

        radius = 0.45 * size
        center = size / 2

        def point(angle: Angle) -> Tuple[float, float]:
            t = 2 * math.pi * float(angle.value)
            return center + radius * math.cos(t), center - radius * math.sin(t)

        elements = [svg_circle(center, center, radius)]
        for polygon in classes(self):
            if len(polygon) > 2:
                elements.append(svg_polygon([point(a) for a in polygon.angles]))
        for leaf in self.leaves:
            (x1, y1), (x2, y2) = point(leaf.a), point(leaf.b)
            elements.append(svg_line(x1, y1, x2, y2, stroke="black", width=0.6))
        return svg_document(size, size, elements)


def is_unlinked(leaves: Sequence[Leaf]) -> bool:
    leaves = list(leaves)
    return not any(
        crosses(leaves[i], leaves[j])
        for i in range(len(leaves))
        for j in range(i + 1, len(leaves))
    )


def _admissible(pairing: Tuple[Leaf, Leaf], blockers: Sequence[Leaf]) -> bool:
    first, second = pairing
    if crosses(first, second):
        return False
    return not any(crosses(leaf, other) for leaf in pairing for other in blockers)


def pullback(lam: Lamination) -> Lamination:
    """Add the preimages of the frontier leaves; generation advances by one.

    Raises:
        NoConsistentPairing: If no sibling pairing of some leaf is admissible
    """
    present = set(lam.leaves)
    # Pairings crossing the critical diameter are inadmissible; for the airplane
    # this alone picks generation 1: {3/14, 11/14} and {2/7, 5/7}. Reuse of a
    # present leaf only breaks ties among admissible pairings.
    blockers: List[Leaf] = list(lam.leaves) + [lam.critical_chord]
    added: List[Leaf] = []
    for leaf in lam.frontier:
        candidates = [p for p in leaf.halves() if _admissible(p, blockers)]
        if not candidates:
            raise NoConsistentPairing(f"Neither pairing of {leaf} is unlinked at generation {lam.generation}")
        reusing = [p for p in candidates if any(x in present for x in p)]
        chosen = (reusing or candidates)[0]
        for new in chosen:
            if new not in present:
                present.add(new)
                added.append(new)
                blockers.append(new)
    logger.debug(f"Pullback of {lam.seed} to generation {lam.generation + 1} added {len(added)} leaves")
    return Lamination(lam.seed, lam.seed_leaves, tuple(present), lam.generation + 1, tuple(sorted(added)))


# =============================================================================
# SEEDS AND GENERATION
# =============================================================================

_RABBIT = re.compile(r"^rabbit:?(\d+)$")


def seed_lamination(name: str) -> Lamination:
    """Generation-0 lamination for ``basilica``, ``airplane`` or ``rabbit:n``.

    Raises:
        ValueError: On an unknown seed name
    """
    key = name.strip().lower()
    if key == "basilica":
        return Lamination.from_seed("basilica", basilica_seed().sides())
    if key == "airplane":
        return Lamination.from_seed("airplane", (airplane_seed(),))
    match = _RABBIT.match(key)
    if match:
        n = int(match.group(1))
        return Lamination.from_seed(f"rabbit:{n}", rabbit_seed(n).sides())
    raise ValueError(f"Unknown lamination seed '{name}' (use basilica, airplane or rabbit:n)")


def generate(seed: Union[str, Lamination], generations: int, max_generations: Optional[int] = None) -> Lamination:
    """Pull a seed back ``generations`` times.

    Raises:
        ValueError: If generations is negative or above max_generations
    """
    if generations < 0:
        raise ValueError(f"generations must be >= 0, got {generations}")
    if max_generations is not None and generations > max_generations:
        raise ValueError(f"generations {generations} exceeds the cap of {max_generations}")
    lam = seed_lamination(seed) if isinstance(seed, str) else seed
    for _ in range(generations):
        lam = pullback(lam)
    logger.info(f"Lamination {lam.seed} at generation {lam.generation}: {len(lam)} leaves")
    return lam


# =============================================================================
# CLASSES AND AUTOMORPHISMS
# =============================================================================

def classes(lam: Lamination) -> List[PolygonClass]:
    """Connected components of the shared-endpoint relation, sorted by least angle."""
    graph = nx.Graph()
    graph.add_edges_from(leaf.endpoints for leaf in lam.leaves)
    found = [PolygonClass(tuple(component)) for component in nx.connected_components(graph)]
    return sorted(found, key=lambda c: c.angles)


def endpoint_classes(lam: Lamination) -> Dict[Angle, int]:
    """The finite laminational relation as angle -> class index."""
    return {angle: index for index, polygon in enumerate(classes(lam)) for angle in polygon.angles}


def forward_invariance_violations(lam: Lamination) -> List[Leaf]:
    """Non-seed leaves whose doubling image is missing from the lamination."""
    present = set(lam.leaves)
    seeds = set(lam.seed_leaves)
    return [
        leaf for leaf in lam.leaves
        if leaf not in seeds and leaf.doubled() is not None and leaf.doubled() not in present
    ]


def automorphism_check(lam: Lamination, m: FinitePartialMap) -> bool:
    """True iff m preserves the cyclic order and maps every class onto a class.

    Raises:
        NotBijection: If m is not a bijection of the endpoint set
    """
    points = set(lam.endpoints)
    if set(m.sources) != points or set(m.targets) != points:
        raise NotBijection(f"Map is not a bijection of the {len(points)} lamination endpoints")
    if monotone_direction(m) is not Classification.PRESERVING:
        return False
    polygons = {frozenset(p.angles) for p in classes(lam)}
    return all(frozenset(m(a) for a in polygon) in polygons for polygon in polygons)
