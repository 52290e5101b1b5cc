"""
Kaleidoscopic Dendrites
=======================

Finite, refinable approximations of the Wazewski dendrites D_n and D_inf with
a kaleidoscopic coloring, their color-respecting homeomorphisms, and the
embedding of the regular tree T_n that lifts Burger-Mozes elements to them.

The approximation grows inside one canonical dendrite. Its skeleton is the
regular tree of reduced color words: the arc from a word x to x.c carries
color c at both ends. Every skeleton arc holds further branch points at
rational positions t in (0, 1), measured from the shorter word, and the two
chart colors of such a point depend on t alone. Refinement, embedding and
evaluation only ever materialize points of that canonical dendrite, so two
approximations built the same way agree point for point.
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import floor, gcd
from typing import Dict, Iterable, Iterator, List, Optional, Set, Tuple, Union

import networkx as nx

from .colored_trees import (
    Color,
    Dense,
    DenseAction,
    DenseGroup,
    Ear,
    LocalAction,
    PermutationGroup,
    RegularTreeElement,
    Word,
    edge_color,
    regular_compose,
    regular_invert,
    regular_membership,
    regular_patchwork,
    step,
    validate_word,
    word_distance,
    word_geodesic,
    parse_word,
    word_str,
)
from .cyclic_order import (
    Angle,
    AngleLike,
    Classification,
    FinitePartialMap,
    canonical_angles,
    classify,
)
from .errors import (
    BadArity,
    BoundaryMismatch,
    InvalidAddress,
    NotCenterClosed,
    NotPartialHomomorphism,
    SameColor,
    SamePoint,
    SupportExceedsDepth,
    UnknownBranchPoint,
)

logger = logging.getLogger(__name__)


# =============================================================================
# COLORS OF THE CANONICAL DENDRITE
# =============================================================================

def color_angle(n: Optional[int], color: Color) -> Angle:
    """Chart angle of a skeleton color: ear i of D_n is (i - 1)/n."""
    if isinstance(color, Ear):
        return Angle.of(Fraction(color.index - 1, n))
    return color.angle


def angle_color(n: Optional[int], angle: AngleLike) -> Color:
    """Skeleton color with the given chart angle.

    Raises:
        InvalidAddress: If the angle is not one of the n colors of D_n
    """
    angle = Angle.of(angle)
    if n is None:
        return Dense(angle)
    scaled = angle.value * n
    if scaled.denominator != 1:
        raise InvalidAddress(f"{angle} is not a color of D_{n}")
    return Ear(int(scaled) + 1)


@lru_cache(maxsize=None)
def _finite_pairs(n: int) -> Tuple[Tuple[Angle, Angle], ...]:
    colors = [Angle.of(Fraction(k, n)) for k in range(n)]
    return tuple((a, b) for a in colors for b in colors if a != b)


def _dense_pairs() -> Iterator[Tuple[Angle, Angle]]:
    """Ordered pairs of distinct angles along the diagonals of the canonical enumeration."""
    angles: List[Angle] = []
    source = iter(canonical_angles())
    for total in itertools.count(1):
        while len(angles) <= total:
            angles.append(next(source))
        for i in range(total + 1):
            if i != total - i:
                yield angles[i], angles[total - i]


@lru_cache(maxsize=4096)
def _dense_pair(index: int) -> Tuple[Angle, Angle]:
    return next(itertools.islice(_dense_pairs(), index, None))


@lru_cache(maxsize=4096)
def _dense_pair_index(pair: Tuple[Angle, Angle]) -> int:
    for index, candidate in enumerate(_dense_pairs()):
        if candidate == pair:
            return index
    raise AssertionError("unreachable")


def _pair(n: Optional[int], index: int) -> Tuple[Angle, Angle]:
    if n is None:
        return _dense_pair(index)
    pairs = _finite_pairs(n)
    return pairs[index % len(pairs)]


def _pair_index(n: Optional[int], pair: Tuple[Angle, Angle]) -> int:
    if n is None:
        return _dense_pair_index(pair)
    return _finite_pairs(n).index(pair)


def _two_adic(q: int) -> int:
    return (q & -q).bit_length() - 1


def arc_colors(n: Optional[int], t: Fraction) -> Tuple[Angle, Angle]:
    """Chart colors (toward position 0, toward position 1) of the point at t.

    The 2-adic valuation of the denominator picks an ordered pair of colors,
    flipped past 1/2 so that reading an arc backwards swaps the two colors.
    """
    if not 0 < t < 1 or t == Fraction(1, 2):
        raise InvalidAddress(f"{t} is not a branch point position")
    low, high = _pair(n, _two_adic(t.denominator))
    return (low, high) if t < Fraction(1, 2) else (high, low)


def _position_between(n: Optional[int], lo: Fraction, hi: Fraction, wanted: Tuple[Angle, Angle]) -> Fraction:
    """A small-denominator position in (lo, hi) whose colors are ``wanted``.

    Denominators 2^v * s with odd s < 64 are tried first. Past
    that, s = 3^k is chosen so the open interval holds more than seven integer
    numerators; one of them is prime to 6, which fixes the valuation at v.
    """
    half = Fraction(1, 2)
    branches = []
    if lo < half:
        branches.append((_pair_index(n, wanted), lo, min(hi, half)))
    if hi > half:
        branches.append((_pair_index(n, (wanted[1], wanted[0])), max(lo, half), hi))
    branches.sort(key=lambda b: b[0])
    for s in range(1, 64, 2):
        for valuation, left, right in branches:
            q = (1 << valuation) * s
            p = floor(left * q) + 1
            while Fraction(p, q) < right:
                if gcd(p, q) == 1 and Fraction(p, q) != half:
                    return Fraction(p, q)
                p += 1
    valuation, left, right = branches[0]
    q = 3 << valuation
    while q * (right - left) <= 7:
        q *= 3
    p = floor(left * q) + 1
    while gcd(p, 6) != 1:
        p += 1
    return Fraction(p, q)


# =============================================================================
# BRANCH POINTS AND APPROXIMATIONS
# =============================================================================

@dataclass(frozen=True)
class BranchPoint:
    """A skeleton word, or the point at ``position`` on the arc from node[:-1] to node."""
    node: Word
    position: Optional[Fraction] = None

    @property
    def is_node(self) -> bool:
        return self.position is None

    def sort_key(self) -> Tuple:
        return (len(self.node), word_str(self.node), self.position or Fraction(0))

    def __str__(self) -> str:
        if self.is_node:
            return word_str(self.node)
        return f"{word_str(self.node)}@{self.position}"

    @classmethod
    def parse(cls, text: str) -> 'BranchPoint':
        word, _, position = text.partition("@")
        return cls(parse_word(word), Fraction(position) if position else None)


class DendriteApprox:
    """Finite approximation of D_n (``n`` colors) or D_inf (``n`` is None).

    Mutated in place by refinement and by element evaluation; callers hold
    it exclusively.
    """

    def __init__(self, n: Optional[int] = None):
        if n is not None and n < 2:
            raise BadArity(f"D_n needs n >= 2, got {n}")
        self.n = n
        self._nodes: Set[Word] = {()}
        self._arcs: Dict[Word, List[Fraction]] = {}
        self._graph: Optional[nx.Graph] = None

    # -------------------------------------------------------------------------
    # Materialization
    # -------------------------------------------------------------------------

    def add_node(self, word: Word) -> BranchPoint:
        validate_word(self.n, word)
        for i in range(len(word) + 1):
            if word[:i] not in self._nodes:
                self._nodes.add(word[:i])
                self._graph = None
        return BranchPoint(word)

    def materialize(self, point: BranchPoint) -> BranchPoint:
        self.add_node(point.node)
        if not point.is_node:
            if not point.node:
                raise InvalidAddress("The root has no arc above it")
            arc_colors(self.n, point.position)
            positions = self._arcs.setdefault(point.node, [])
            if point.position not in positions:
                positions.append(point.position)
                positions.sort()
                self._graph = None
        return point

    def grow(self, b: BranchPoint, angle: AngleLike) -> BranchPoint:
        """The skeleton neighbor of node b in the branch colored ``angle``."""
        self.require(b)
        if not b.is_node:
            raise InvalidAddress(f"{b} is an arc point; only skeleton nodes grow")
        return self.add_node(step(b.node, angle_color(self.n, angle)))

    def __contains__(self, point: object) -> bool:
        if not isinstance(point, BranchPoint) or point.node not in self._nodes:
            return False
        return point.is_node or point.position in self._arcs.get(point.node, ())

    def require(self, point: BranchPoint) -> None:
        if point not in self:
            raise UnknownBranchPoint(f"{point} is not materialized")

    @property
    def points(self) -> List[BranchPoint]:
        result = [BranchPoint(w) for w in self._nodes]
        result.extend(BranchPoint(w, t) for w, ts in self._arcs.items() for t in ts)
        return sorted(result, key=BranchPoint.sort_key)

    def __len__(self) -> int:
        return len(self._nodes) + sum(len(ts) for ts in self._arcs.values())

    # -------------------------------------------------------------------------
    # Shape
    # -------------------------------------------------------------------------

    def graph(self) -> nx.Graph:
        """Materialized branch points joined along the arcs that run between them."""
        if self._graph is None:
            graph = nx.Graph()
            graph.add_node(BranchPoint(()))
            for word in self._nodes:
                if not word:
                    continue
                chain = [BranchPoint(word[:-1])]
                chain += [BranchPoint(word, t) for t in self._arcs.get(word, ())]
                chain.append(BranchPoint(word))
                nx.add_path(graph, chain)
            self._graph = graph
        return self._graph

    def path(self, a: BranchPoint, b: BranchPoint) -> List[BranchPoint]:
        self.require(a)
        self.require(b)
        return nx.shortest_path(self.graph(), a, b)

    def _arc_of(self, a: BranchPoint, b: BranchPoint) -> Tuple[Word, Fraction, Fraction]:
        """Skeleton arc holding adjacent points a and b, with their positions on it."""
        if not a.is_node:
            arc = a.node
        elif not b.is_node:
            arc = b.node
        else:
            arc = a.node if len(a.node) > len(b.node) else b.node
        return arc, self._position(a, arc), self._position(b, arc)

    @staticmethod
    def _position(point: BranchPoint, arc: Word) -> Fraction:
        if not point.is_node:
            return point.position
        return Fraction(1) if point.node == arc else Fraction(0)

    def color_toward(self, b: BranchPoint, y: BranchPoint) -> Angle:
        """Chart color at b of the branch containing y."""
        if b == y:
            raise SamePoint(f"{b} lies in no branch at itself")
        path = self.path(b, y)
        arc, here, there = self._arc_of(b, path[1])
        if b.is_node:
            return color_angle(self.n, arc[-1])
        toward_low, toward_high = arc_colors(self.n, here)
        return toward_high if there > here else toward_low

    def chart(self, b: BranchPoint) -> Dict[BranchPoint, Angle]:
        """Colors of the materialized arcs at b, keyed by the neighboring point."""
        self.require(b)
        return {x: self.color_toward(b, x) for x in self.graph().neighbors(b)}

    def between(self, u: BranchPoint, v: BranchPoint, w: BranchPoint) -> bool:
        """True if u lies on the arc [v, w]."""
        return u in self.path(v, w)

    def center(self, x: BranchPoint, y: BranchPoint, z: BranchPoint) -> BranchPoint:
        common = set(self.path(x, y)) & set(self.path(y, z)) & set(self.path(x, z))
        (median,) = common
        return median

    def close_up(self, points: Iterable[BranchPoint]) -> Set[BranchPoint]:
        closed = set(points)
        changed = True
        while changed:
            changed = False
            for x, y, z in itertools.combinations(sorted(closed, key=BranchPoint.sort_key), 3):
                median = self.center(x, y, z)
                if median not in closed:
                    closed.add(median)
                    changed = True
        return closed

    def is_center_closed(self, points: Iterable[BranchPoint]) -> bool:
        points = set(points)
        return self.close_up(points) == points

    # -------------------------------------------------------------------------
    # Refinement
    # -------------------------------------------------------------------------

    def refine_between(self, b1: BranchPoint, b2: BranchPoint, i: AngleLike, j: AngleLike) -> BranchPoint:
        """Materialize a branch point b strictly inside the first arc from b1 toward b2.

        b1 lies in the branch of b colored i and b2 in the branch colored j.

        Raises:
            UnknownBranchPoint: If b1 or b2 is not materialized
            SamePoint: If b1 == b2
            SameColor: If i == j
        """
        i, j = Angle.of(i), Angle.of(j)
        if b1 == b2:
            raise SamePoint(f"Cannot refine between {b1} and itself")
        if i == j:
            raise SameColor(f"Both sides of the new point would be colored {i}")
        angle_color(self.n, i)
        angle_color(self.n, j)
        path = self.path(b1, b2)
        arc, here, there = self._arc_of(b1, path[1])
        lo, hi = min(here, there), max(here, there)
        wanted = (i, j) if here < there else (j, i)
        point = self.materialize(BranchPoint(arc, _position_between(self.n, lo, hi, wanted)))
        logger.debug(f"Refined {b1} -> {b2} with {point}")
        return point

    # -------------------------------------------------------------------------
    # Output
    # -------------------------------------------------------------------------

    def to_json(self) -> Dict[str, object]:
        graph = self.graph()
        return {
            "n": self.n,
            "branch_points": [
                {"id": str(b), "chart": {str(x): str(a) for x, a in sorted(self.chart(b).items(), key=lambda kv: kv[0].sort_key())}}
                for b in self.points
            ],
            "arcs": sorted([str(a), str(b)] for a, b in graph.edges()),
        }

    def to_dot(self) -> str:
        from ..utils.dot import dot_graph

        nodes = [(str(b), {"shape": "point" if b.is_node else "circle", "xlabel": str(b)}) for b in self.points]
        edges = [
            (str(a), str(b), {"taillabel": str(self.color_toward(a, b)), "headlabel": str(self.color_toward(b, a))})
            for a, b in self.graph().edges()
        ]
        return dot_graph("dendrite", nodes, edges)


def refine_between(
    d: DendriteApprox, b1: BranchPoint, b2: BranchPoint, i: AngleLike, j: AngleLike
) -> Tuple[DendriteApprox, BranchPoint]:
    return d, d.refine_between(b1, b2, i, j)


def center(d: DendriteApprox, x: BranchPoint, y: BranchPoint, z: BranchPoint) -> BranchPoint:
    return d.center(x, y, z)


def is_center_closed(d: DendriteApprox, points: Iterable[BranchPoint]) -> bool:
    return d.is_center_closed(points)


def close_up(d: DendriteApprox, points: Iterable[BranchPoint]) -> Set[BranchPoint]:
    return d.close_up(points)


# =============================================================================
# HOMEOMORPHISMS
# =============================================================================

@dataclass(frozen=True, eq=False)
class DendriteElement:
    """Homeomorphism of the canonical dendrite given by a skeleton automorphism.

    Arc points travel with their arc: position t goes to t when the image arc
    keeps its direction and to 1 - t otherwise, which keeps both chart colors.
    Evaluation materializes images in ``approx``.
    """
    skeleton: RegularTreeElement
    approx: DendriteApprox

    def __post_init__(self):
        if self.skeleton.n != self.approx.n:
            raise BadArity("Skeleton element and approximation use different colors")

    def evaluate(self, point: BranchPoint) -> BranchPoint:
        g = self.skeleton
        if point.is_node:
            return self.approx.materialize(BranchPoint(g(point.node)))
        low, high = g(point.node[:-1]), g(point.node)
        if len(high) > len(low):
            image = BranchPoint(high, point.position)
        else:
            image = BranchPoint(low, 1 - point.position)
        return self.approx.materialize(image)

    __call__ = evaluate

    def local_action(self, point: BranchPoint) -> Union[LocalAction, FinitePartialMap]:
        """Skeleton local action at a node, the identity on both colors at an arc point."""
        if point.is_node:
            return self.skeleton.local_action(point.node)
        return FinitePartialMap.identity_on(arc_colors(self.approx.n, point.position))

    def chart_map(self, point: BranchPoint) -> FinitePartialMap:
        """Induced map on the chart colors materialized at ``point``."""
        image = self.evaluate(point)
        return FinitePartialMap.from_dict({
            color: self.approx.color_toward(image, self.evaluate(x))
            for x, color in self.approx.chart(point).items()
        })

    def compose(self, other: 'DendriteElement') -> 'DendriteElement':
        """self after other."""
        return DendriteElement(regular_compose(self.skeleton, other.skeleton), self.approx)

    def inverse(self) -> 'DendriteElement':
        return DendriteElement(regular_invert(self.skeleton), self.approx)

    def to_json(self) -> Dict[str, object]:
        return {"skeleton": self.skeleton.to_json()}


def _word_for(point: BranchPoint, image: BranchPoint) -> Dict[Word, Word]:
    """Skeleton constraints that sending point to image imposes."""
    if point.is_node != image.is_node:
        raise NotPartialHomomorphism(f"{point} and {image} have different chart arity")
    if point.is_node:
        return {point.node: image.node}
    if image.position == point.position:
        return {point.node: image.node, point.node[:-1]: image.node[:-1]}
    if image.position == 1 - point.position:
        return {point.node: image.node[:-1], point.node[:-1]: image.node}
    raise NotPartialHomomorphism(f"No arc map sends {point} to {image}")


def patchwork_dendrite(
    d: DendriteApprox,
    domain: Iterable[BranchPoint],
    codomain: Iterable[BranchPoint],
    f: Dict[BranchPoint, BranchPoint],
    branch_rule: Optional[Dict[BranchPoint, LocalAction]] = None,
) -> DendriteElement:
    """The homeomorphism agreeing with f on a center-closed set, with chosen local actions there.

    Away from the domain, skeleton nodes copy the local action of the nearest
    domain node and arc points keep their colors.

    Raises:
        UnknownBranchPoint: If a point is not materialized
        NotCenterClosed: If the domain or codomain is not center-closed
        NotPartialHomomorphism: If f breaks betweenness or chart arity
        BoundaryMismatch: If branch_rule disagrees with f
    """
    domain, codomain = set(domain), set(codomain)
    for point in domain | codomain:
        d.require(point)
    if set(f) != domain or set(f.values()) != codomain or len(set(f.values())) != len(f):
        raise NotPartialHomomorphism("f must be a bijection from the domain onto the codomain")
    for points in (domain, codomain):
        if not d.is_center_closed(points):
            raise NotCenterClosed(f"{sorted(map(str, points))} is not center-closed")
    for u, v, w in itertools.permutations(sorted(domain, key=BranchPoint.sort_key), 3):
        if d.between(u, v, w) != d.between(f[u], f[v], f[w]):
            raise NotPartialHomomorphism(f"f does not preserve betweenness of {u} in [{v}, {w}]")

    skeleton_map: Dict[Word, Word] = {}
    for point, image in f.items():
        for source, target in _word_for(point, image).items():
            if skeleton_map.setdefault(source, target) != target:
                raise NotPartialHomomorphism(f"f sends skeleton node {word_str(source)} to two places")
    rule: Dict[Word, LocalAction] = {}
    for point, action in (branch_rule or {}).items():
        if point not in domain or not point.is_node:
            raise BoundaryMismatch(f"Branch rule at {point} must sit on a skeleton node of the domain")
        rule[point.node] = action

    skeleton = regular_patchwork(d.n, skeleton_map, rule, require_center_closed=False)
    element = DendriteElement(skeleton, d)
    for point, image in f.items():
        if element(point) != image:
            raise BoundaryMismatch(f"Patchwork sends {point} to {element(point)}, f needs {image}")
    logger.debug(f"Patchwork on {len(domain)} branch points, skeleton support {len(skeleton.support)}")
    return element


# =============================================================================
# EMBEDDING T_n AND LIFTING
# =============================================================================

@dataclass(frozen=True)
class EmbeddingRecord:
    """Ball of T_n placed in an approximation of D_n, ear i recoded as (i - 1)/n.

    ``arc_points`` holds, for each tree edge (v, w) with w a child of v, the
    branch point refined between their images.
    """
    n: int
    depth: int
    approx: DendriteApprox
    mapping: Dict[Word, BranchPoint]
    arc_points: Dict[Tuple[Word, Word], BranchPoint] = field(default_factory=dict)

    @property
    def tree_vertices(self) -> List[Word]:
        return sorted(self.mapping, key=lambda w: (len(w), word_str(w)))

    def tree_color(self, v: Word, w: Word) -> Angle:
        """Color of the first edge from v toward w in T_n, recoded."""
        return color_angle(self.n, edge_color(v, word_geodesic(v, w)[1]))

    def betweenness_violations(self) -> List[Tuple[Word, Word, Word]]:
        bad = []
        for u, v, w in itertools.product(self.tree_vertices, repeat=3):
            in_tree = word_distance(v, u) + word_distance(u, w) == word_distance(v, w)
            if in_tree != self.approx.between(self.mapping[u], self.mapping[v], self.mapping[w]):
                bad.append((u, v, w))
        return bad

    def color_violations(self) -> List[Tuple[Word, Word]]:
        bad = []
        for v, w in itertools.permutations(self.tree_vertices, 2):
            if self.tree_color(v, w) != self.approx.color_toward(self.mapping[v], self.mapping[w]):
                bad.append((v, w))
        return bad

    def arc_point_violations(self) -> List[Tuple[Word, Word]]:
        """Edges whose refined point is not strictly inside the arc or sees the wrong color toward the parent."""
        bad = []
        for (v, w), p in self.arc_points.items():
            ends = (self.mapping[v], self.mapping[w])
            inside = p not in ends and self.approx.between(p, *ends)
            if not inside or self.approx.color_toward(p, ends[0]) != self.tree_color(v, w):
                bad.append((v, w))
        return bad

    def lifted_violations(self, h: 'DendriteElement') -> List[Tuple[BranchPoint, BranchPoint, BranchPoint]]:
        """Triples (p, u, w) with p a refined arc point where h breaks betweenness or p's color toward u."""
        vertices = [self.mapping[v] for v in self.tree_vertices]
        points = list(self.arc_points.values())
        image = {x: h(x) for x in vertices + points}
        d = self.approx
        bad = []
        for p in points:
            for u, w in itertools.combinations(vertices, 2):
                if d.between(p, u, w) != d.between(image[p], image[u], image[w]):
                    bad.append((p, u, w))
            for u in vertices:
                if d.color_toward(p, u) != d.color_toward(image[p], image[u]):
                    bad.append((p, u, u))
        return bad


def embed_tree(n: int, depth: int, d: DendriteApprox) -> EmbeddingRecord:
    """Color-preserving embedding of the radius-``depth`` ball of T_n into d.

    Vertices are grown outward from the root along the branch of their edge
    color. Every tree edge then gets a branch point refined between the images
    of its ends, colored by the edge color toward the parent and the next ear
    color toward the child.

    Raises:
        BadArity: If d does not approximate D_n
    """
    if d.n != n:
        raise BadArity(f"Cannot embed T_{n} into an approximation with {d.n} colors")
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    mapping: Dict[Word, BranchPoint] = {(): BranchPoint(())}
    edges: List[Tuple[Word, Word, int]] = []
    frontier: List[Word] = [()]
    for _ in range(depth):
        grown: List[Word] = []
        for w in frontier:
            for i in range(1, n + 1):
                if w and w[-1] == Ear(i):
                    continue
                child = d.grow(mapping[w], color_angle(n, Ear(i)))
                mapping[child.node] = child
                edges.append((w, child.node, i))
                grown.append(child.node)
        frontier = grown
    arc_points = {
        (w, child): d.refine_between(
            mapping[w], mapping[child], color_angle(n, Ear(i)), color_angle(n, Ear(i % n + 1))
        )
        for w, child, i in edges
    }
    logger.info(f"Embedded the radius {depth} ball of T_{n} ({len(mapping)} vertices, {len(arc_points)} arc points)")
    return EmbeddingRecord(n, depth, d, mapping, arc_points)


def lift(g: RegularTreeElement, record: EmbeddingRecord) -> DendriteElement:
    """Homeomorphism of D_n extending g along the embedding.

    Raises:
        BadArity: If g acts on a different regular tree
        SupportExceedsDepth: If the support of g leaves the embedded ball
    """
    if g.n != record.n:
        raise BadArity(f"Element of U(N) on T_{g.n} cannot lift through T_{record.n}")
    deepest = max(len(w) for w in g.support)
    if deepest > record.depth:
        raise SupportExceedsDepth(f"Support reaches depth {deepest}, embedding covers {record.depth}")
    return DendriteElement(g, record.approx)


# =============================================================================
# MEMBERSHIP
# =============================================================================

def action_classification(n: Optional[int], action: LocalAction) -> Classification:
    """Classification of a skeleton local action as a map of chart angles."""
    if isinstance(action, DenseAction):
        return action.classification
    if action.n < 3:
        return Classification.PRESERVING
    return classify(FinitePartialMap.from_dict({
        color_angle(n, Ear(i)): color_angle(n, action.apply(Ear(i))) for i in range(1, action.n + 1)
    }))


def kaleidoscopic_membership(h: DendriteElement, group: Union[DenseGroup, PermutationGroup]) -> bool:
    """Whether every local action of h lies in the group.

    Arc points always act trivially and off-support nodes copy support
    actions, so the support decides.
    """
    if isinstance(group, PermutationGroup):
        return regular_membership(h.skeleton, group)
    if group is DenseGroup.AUT_S:
        return True
    if group is DenseGroup.TRIVIAL:
        return all(a.is_identity() for a in h.skeleton.actions.values())
    return all(
        action_classification(h.approx.n, a) is Classification.PRESERVING
        for a in h.skeleton.actions.values()
    )
