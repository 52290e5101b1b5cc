"""
Colored Biregular Trees
=======================

Lazy (n, infinity)-biregular trees with the canonical legal coloring, universal
group elements stored as finite data and evaluated anywhere, local actions,
the orientation homomorphism and the quasi-isometry from T_inf onto T_(k,inf).

Addresses are words of colors read from the root circle: even positions carry
Dense letters (leaving a circle), odd positions carry Ear letters (leaving a
cut point). Every vertex has a label, its last letter (Ear(1) for the root),
and the half-edge (x, y) is colored by the label of y.
"""

import logging
import random
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import islice
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple, Union

from .cyclic_order import (
    Angle,
    Classification,
    FinitePartialMap,
    PiecewiseAffineMap,
    canonical_angles,
    parse_angle,
    sorted_from,
)
from .errors import (
    BadArity,
    BoundaryMismatch,
    IllDefined,
    InconsistentElement,
    InvalidAddress,
    NotCenterClosed,
    NotMonotone,
    NotOrientation,
    NotPartialHomomorphism,
    OutOfRadius,
    WrongSide,
)

logger = logging.getLogger(__name__)


# =============================================================================
# COLORS AND ADDRESSES
# =============================================================================

@dataclass(frozen=True)
class Ear:
    """Color of a half-edge leaving a cut point, 1..n."""
    index: int

    def __str__(self) -> str:
        return f"e{self.index}"


@dataclass(frozen=True)
class Dense:
    """Color of a half-edge leaving a circle, an angle."""
    angle: Angle

    def __str__(self) -> str:
        return str(self.angle)


Color = Union[Ear, Dense]


def color_key(color: Color) -> Tuple[int, Fraction]:
    if isinstance(color, Ear):
        return (0, Fraction(color.index))
    return (1, color.angle.value)


def parse_color(text: str) -> Color:
    text = text.strip()
    if text.startswith("e"):
        return Ear(int(text[1:]))
    return Dense(parse_angle(text))


class Side(Enum):
    CIRCLE = "circle"
    CUTPOINT = "cutpoint"

    @property
    def opposite(self) -> 'Side':
        return Side.CUTPOINT if self is Side.CIRCLE else Side.CIRCLE


@dataclass(frozen=True)
class VertexAddress:
    """A vertex of the tree as the color word leading to it from the root circle."""
    word: Tuple[Color, ...] = ()

    @property
    def side(self) -> Side:
        return Side.CIRCLE if len(self.word) % 2 == 0 else Side.CUTPOINT

    @property
    def is_circle(self) -> bool:
        return self.side is Side.CIRCLE

    @property
    def is_cutpoint(self) -> bool:
        return self.side is Side.CUTPOINT

    @property
    def is_root(self) -> bool:
        return not self.word

    @property
    def depth(self) -> int:
        return len(self.word)

    @property
    def parent(self) -> 'VertexAddress':
        if not self.word:
            raise InvalidAddress("The root has no parent")
        return VertexAddress(self.word[:-1])

    def child(self, letter: Color) -> 'VertexAddress':
        return VertexAddress(self.word + (letter,))

    def prefixes(self) -> List['VertexAddress']:
        """Root first, self last."""
        return [VertexAddress(self.word[:i]) for i in range(len(self.word) + 1)]

    def __str__(self) -> str:
        return ".".join(str(c) for c in self.word) or "root"

    def sort_key(self) -> Tuple:
        return (len(self.word), tuple(color_key(c) for c in self.word))

    @classmethod
    def parse(cls, text: str) -> 'VertexAddress':
        text = text.strip()
        if text in ("", "root"):
            return ROOT
        return cls(tuple(parse_color(part) for part in text.split(".")))


ROOT = VertexAddress()


def label(v: VertexAddress) -> Color:
    """Color of every half-edge entering v."""
    return v.word[-1] if v.word else Ear(1)


def validate_address(n: int, v: VertexAddress) -> VertexAddress:
    """Check letters alternate sides, ears lie in 1..n and no letter names the parent.

    Raises:
        InvalidAddress: If the word does not denote a vertex
    """
    for i, letter in enumerate(v.word):
        if i % 2 == 0 and not isinstance(letter, Dense):
            raise InvalidAddress(f"Position {i} of {v} must be an angle")
        if i % 2 == 1:
            if not isinstance(letter, Ear) or not 1 <= letter.index <= n:
                raise InvalidAddress(f"Position {i} of {v} must be an ear in 1..{n}")
        back = v.word[i - 2] if i >= 2 else (Ear(1) if i == 1 else None)
        if back is not None and letter == back:
            raise InvalidAddress(f"Letter {letter} at position {i} of {v} leads back to the parent")
    return v


def neighbor(x: VertexAddress, color: Color) -> VertexAddress:
    """The neighbor y of x whose half-edge (x, y) carries ``color``."""
    expected = Dense if x.is_circle else Ear
    if not isinstance(color, expected):
        raise InvalidAddress(f"Color {color} does not leave a {x.side.value} vertex")
    if x.word and color == label(x.parent):
        return x.parent
    return x.child(color)


def half_edge_color(x: VertexAddress, y: VertexAddress) -> Color:
    return label(y)


def lca(a: VertexAddress, b: VertexAddress) -> VertexAddress:
    common = 0
    for left, right in zip(a.word, b.word):
        if left != right:
            break
        common += 1
    return VertexAddress(a.word[:common])


def distance(a: VertexAddress, b: VertexAddress) -> int:
    return a.depth + b.depth - 2 * lca(a, b).depth


def geodesic(a: VertexAddress, b: VertexAddress) -> List[VertexAddress]:
    """Vertices on the path from a to b, both ends included."""
    top = lca(a, b)
    up = [VertexAddress(a.word[:i]) for i in range(a.depth, top.depth, -1)]
    down = [VertexAddress(b.word[:i]) for i in range(top.depth, b.depth + 1)]
    return up + down


def between(u: VertexAddress, v: VertexAddress, w: VertexAddress) -> bool:
    """True iff u lies on the geodesic [v, w]."""
    return distance(v, u) + distance(u, w) == distance(v, w)


def tree_center(a: VertexAddress, b: VertexAddress, c: VertexAddress) -> VertexAddress:
    """Median of three vertices: the deepest of their pairwise lowest common ancestors."""
    return max((lca(a, b), lca(b, c), lca(a, c)), key=lambda v: v.depth)


def tree_close_up(vertices: Iterable[VertexAddress]) -> Set[VertexAddress]:
    closed = set(vertices)
    while True:
        items = list(closed)
        new = {
            tree_center(a, b, c)
            for i, a in enumerate(items) for j, b in enumerate(items[i + 1:], i + 1) for c in items[j + 1:]
        } - closed
        if not new:
            return closed
        closed |= new


def tree_is_center_closed(vertices: Iterable[VertexAddress]) -> bool:
    vertices = set(vertices)
    return tree_close_up(vertices) == vertices


def ancestor_closure(vertices: Iterable[VertexAddress]) -> Set[VertexAddress]:
    closed = {ROOT}
    for v in vertices:
        closed.update(v.prefixes())
    return closed


def hull(vertices: Iterable[VertexAddress]) -> Set[VertexAddress]:
    """Vertices of the smallest subtree containing the given ones."""
    vertices = list(vertices)
    result = set(vertices)
    for i, a in enumerate(vertices):
        for b in vertices[i + 1:]:
            result.update(geodesic(a, b))
    return result


# =============================================================================
# LOCAL ACTIONS AND PERMUTATION GROUPS
# =============================================================================

@dataclass(frozen=True)
class EarAction:
    """Permutation of 1..n; ``perm[i - 1]`` is the image of i."""
    perm: Tuple[int, ...]

    def __post_init__(self):
        if sorted(self.perm) != list(range(1, len(self.perm) + 1)):
            raise InconsistentElement(f"{self.perm} is not a permutation of 1..{len(self.perm)}")

    @classmethod
    def identity(cls, n: int) -> 'EarAction':
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def rotation(cls, n: int, shift: int) -> 'EarAction':
        return cls(tuple((i - 1 + shift) % n + 1 for i in range(1, n + 1)))

    @property
    def n(self) -> int:
        return len(self.perm)

    def apply(self, color: Color) -> Ear:
        return Ear(self.perm[color.index - 1])

    def compose(self, other: 'EarAction') -> 'EarAction':
        """self after other."""
        return EarAction(tuple(self.perm[j - 1] for j in other.perm))

    def inverse(self) -> 'EarAction':
        inv = [0] * self.n
        for i, j in enumerate(self.perm, 1):
            inv[j - 1] = i
        return EarAction(tuple(inv))

    def is_identity(self) -> bool:
        return self.perm == tuple(range(1, self.n + 1))

    def rotation_shift(self) -> Optional[int]:
        """The k with perm = rotation by k, or None."""
        shift = (self.perm[0] - 1) % self.n
        return shift if self == EarAction.rotation(self.n, shift) else None

    def to_json(self) -> Dict[str, object]:
        return {"ear": list(self.perm)}


@dataclass(frozen=True)
class DenseAction:
    """Order-preserving or reversing bijection of the angles at a circle."""
    map: PiecewiseAffineMap = field(default_factory=PiecewiseAffineMap.identity)

    @classmethod
    def identity(cls) -> 'DenseAction':
        return cls()

    @classmethod
    def rotation(cls, shift: Angle) -> 'DenseAction':
        return cls(PiecewiseAffineMap.rotation(shift))

    def apply(self, color: Color) -> Dense:
        return Dense(self.map(color.angle))

    def compose(self, other: 'DenseAction') -> 'DenseAction':
        return DenseAction(self.map.compose(other.map))

    def inverse(self) -> 'DenseAction':
        return DenseAction(self.map.inverse())

    def is_identity(self) -> bool:
        return self.map.is_identity()

    @property
    def classification(self) -> Classification:
        return self.map.classification

    def to_json(self) -> Dict[str, object]:
        return {"dense": self.map.to_json()}


LocalAction = Union[EarAction, DenseAction]


def action_from_json(data: Dict[str, object]) -> LocalAction:
    if "ear" in data:
        return EarAction(tuple(int(i) for i in data["ear"]))
    return DenseAction(PiecewiseAffineMap.from_json(data["dense"]))


def rotation_between(n: int, side: Side, source: Color, target: Color) -> LocalAction:
    """The rotation of a side's colors carrying source onto target."""
    if side is Side.CUTPOINT:
        return EarAction.rotation(n, target.index - source.index)
    return DenseAction.rotation(target.angle - source.angle)


@dataclass(frozen=True)
class PermutationGroup:
    """Finite permutation group on 1..n given by generators."""
    n: int
    generators: Tuple[Tuple[int, ...], ...] = ()
    name: str = "generated"

    def __post_init__(self):
        if self.n < 2:
            raise BadArity(f"Permutation groups need n >= 2, got {self.n}")
        for g in self.generators:
            EarAction(g)
            if len(g) != self.n:
                raise BadArity(f"Generator {g} does not act on 1..{self.n}")

    @classmethod
    def symmetric(cls, n: int) -> 'PermutationGroup':
        swap = (2, 1) + tuple(range(3, n + 1))
        return cls(n, (swap, EarAction.rotation(n, 1).perm), f"Sym({n})")

    @classmethod
    def cyclic(cls, n: int) -> 'PermutationGroup':
        return cls(n, (EarAction.rotation(n, 1).perm,), f"Cyc({n})")

    @classmethod
    def trivial(cls, n: int) -> 'PermutationGroup':
        return cls(n, (), "trivial")

    @classmethod
    def generated_by(cls, n: int, generators: Iterable[Sequence[int]]) -> 'PermutationGroup':
        return cls(n, tuple(tuple(g) for g in generators))

    @property
    def elements(self) -> FrozenSet[Tuple[int, ...]]:
        identity = EarAction.identity(self.n)
        seen = {identity.perm}
        queue = deque([identity])
        while queue:
            current = queue.popleft()
            for g in self.generators:
                product = EarAction(g).compose(current)
                if product.perm not in seen:
                    seen.add(product.perm)
                    queue.append(product)
        return frozenset(seen)

    def contains(self, action: LocalAction) -> bool:
        if not isinstance(action, EarAction) or action.n != self.n:
            return False
        if self.name.startswith("Sym"):
            return True
        return action.perm in self.elements

    def __str__(self) -> str:
        return self.name


class DenseGroup(Enum):
    """Groups of bijections of the dense cyclic order allowed at circles."""
    AUT_S = "AutS"
    AUT_O = "AutO"
    TRIVIAL = "trivial"

    def contains(self, action: LocalAction) -> bool:
        if not isinstance(action, DenseAction):
            return False
        if self is DenseGroup.AUT_S:
            return True
        if self is DenseGroup.AUT_O:
            return action.classification is Classification.PRESERVING
        return action.is_identity()


# =============================================================================
# GROUP ELEMENTS
# =============================================================================

@dataclass(frozen=True, eq=False)
class TreeElement:
    """Automorphism of the (n, infinity)-biregular tree.

    Stored as the image of the root plus local actions on a finite support that
    contains the root and all ancestors of its members. Off the support the
    local action at v is the rotation carrying the label of parent(v) onto the
    label of g(parent(v)), which makes evaluation well defined everywhere.
    """
    n: int
    root_image: VertexAddress
    actions: Dict[VertexAddress, LocalAction]

    def __post_init__(self):
        if self.n < 2:
            raise BadArity(f"n must be >= 2, got {self.n}")
        validate_address(self.n, self.root_image)
        if not self.root_image.is_circle:
            raise InconsistentElement(f"Root image {self.root_image} is a cut point; the bipartition must be preserved")
        if ROOT not in self.actions:
            raise InconsistentElement("Support must contain the root")
        for v, action in self.actions.items():
            validate_address(self.n, v)
            if v.word and v.parent not in self.actions:
                raise InconsistentElement(f"Support is not closed under parents at {v}")
            expected = EarAction if v.is_cutpoint else DenseAction
            if not isinstance(action, expected):
                raise InconsistentElement(f"Action at {v} is on the wrong side")
            if isinstance(action, EarAction) and action.n != self.n:
                raise InconsistentElement(f"Ear action at {v} does not act on 1..{self.n}")
        for v in self.actions:
            if v.word:
                target = label(self.evaluate(v.parent))
                if self.actions[v].apply(label(v.parent)) != target:
                    raise InconsistentElement(
                        f"Local action at {v} sends {label(v.parent)} elsewhere than {target}"
                    )

    @classmethod
    def identity(cls, n: int) -> 'TreeElement':
        return cls(n, ROOT, {ROOT: DenseAction.identity()})

    @property
    def support(self) -> FrozenSet[VertexAddress]:
        return frozenset(self.actions)

    @property
    def images(self) -> Dict[VertexAddress, VertexAddress]:
        return {v: self.evaluate(v) for v in self.actions}

    def _trace(self, v: VertexAddress) -> List[VertexAddress]:
        images = [self.root_image]
        for i, letter in enumerate(v.word):
            prefix = VertexAddress(v.word[:i])
            action = self.actions.get(prefix)
            if action is None:
                action = rotation_between(self.n, prefix.side, label(prefix.parent), label(images[i - 1]))
            images.append(neighbor(images[i], action.apply(letter)))
        return images

    def evaluate(self, v: VertexAddress) -> VertexAddress:
        return self._trace(v)[-1]

    __call__ = evaluate

    def local_action(self, v: VertexAddress) -> LocalAction:
        """sigma_g(v): colors of out(v) to colors of out(g(v))."""
        if v in self.actions:
            return self.actions[v]
        images = self._trace(v.parent)
        return rotation_between(self.n, v.side, label(v.parent), label(images[-1]))

    def default_action(self, v: VertexAddress) -> LocalAction:
        if v.is_root:
            return DenseAction.identity()
        return rotation_between(self.n, v.side, label(v.parent), label(self.evaluate(v.parent)))

    def preimage(self, y: VertexAddress) -> VertexAddress:
        """The x with g(x) = y, found by walking the geodesic from g(root) to y."""
        x = ROOT
        path = geodesic(self.root_image, y)
        for step in path[1:]:
            sigma = self.local_action(x)
            x = neighbor(x, sigma.inverse().apply(label(step)))
        return x

    def pruned(self) -> 'TreeElement':
        """Drop support leaves whose action equals the default rotation."""
        actions = dict(self.actions)
        changed = True
        while changed:
            changed = False
            parents = {v.parent for v in actions if v.word}
            for v in sorted(actions, key=VertexAddress.sort_key, reverse=True):
                if v.word and v not in parents and actions[v] == self.default_action(v):
                    del actions[v]
                    changed = True
                    break
        return TreeElement(self.n, self.root_image, actions)

    def is_identity(self) -> bool:
        pruned = self.pruned()
        return pruned.root_image == ROOT and set(pruned.actions) == {ROOT} and pruned.actions[ROOT].is_identity()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TreeElement):
            return NotImplemented
        a, b = self.pruned(), other.pruned()
        return a.n == b.n and a.root_image == b.root_image and a.actions == b.actions

    def __hash__(self) -> int:
        return hash((self.n, self.root_image))

    def to_json(self) -> Dict[str, object]:
        return {
            "n": self.n,
            "root_image": str(self.root_image),
            "actions": [
                {"vertex": str(v), **self.actions[v].to_json()}
                for v in sorted(self.actions, key=VertexAddress.sort_key)
            ],
        }

    @classmethod
    def from_json(cls, data: Dict[str, object]) -> 'TreeElement':
        actions = {VertexAddress.parse(item["vertex"]): action_from_json(item) for item in data["actions"]}
        return cls(int(data["n"]), VertexAddress.parse(data["root_image"]), actions)


def evaluate(g: TreeElement, v: VertexAddress) -> VertexAddress:
    return g.evaluate(v)


def local_action(g: TreeElement, v: VertexAddress) -> LocalAction:
    return g.local_action(v)


def compose(g: TreeElement, h: TreeElement) -> TreeElement:
    """g after h, with sigma_(gh)(v) = sigma_g(h(v)) o sigma_h(v) on the merged support."""
    if g.n != h.n:
        raise BadArity(f"Cannot compose elements for n={g.n} and n={h.n}")
    support = ancestor_closure(set(h.actions) | {h.preimage(w) for w in g.actions})
    actions = {v: g.local_action(h.evaluate(v)).compose(h.local_action(v)) for v in support}
    return TreeElement(g.n, g.evaluate(h.root_image), actions).pruned()


def invert(g: TreeElement) -> TreeElement:
    support = ancestor_closure(g.evaluate(v) for v in g.actions)
    actions = {w: g.local_action(g.preimage(w)).inverse() for w in support}
    return TreeElement(g.n, g.preimage(ROOT), actions).pruned()


# =============================================================================
# PATCHWORK
# =============================================================================

def _complete_ear(n: int, constraints: Dict[Color, Color]) -> EarAction:
    sources = [i for i in range(1, n + 1) if Ear(i) not in constraints]
    targets = sorted(set(range(1, n + 1)) - {c.index for c in constraints.values()})
    perm = {c.index: t.index for c, t in constraints.items()}
    perm.update(zip(sources, targets))
    return EarAction(tuple(perm[i] for i in range(1, n + 1)))


def _complete_dense(constraints: Dict[Color, Color]) -> DenseAction:
    graph = FinitePartialMap(tuple((s.angle, t.angle) for s, t in constraints.items()))
    try:
        return DenseAction(PiecewiseAffineMap.interpolating(graph))
    except NotMonotone as e:
        raise BoundaryMismatch(f"No monotone local action extends {graph.to_json()}: {e}")


def patchwork(
    n: int,
    domain: Iterable[VertexAddress],
    codomain: Iterable[VertexAddress],
    f: Dict[VertexAddress, VertexAddress],
    branch_rule: Optional[Dict[VertexAddress, LocalAction]] = None,
) -> TreeElement:
    """Assemble an automorphism agreeing with a partial homomorphism f on domain.

    f is extended isometrically to the hull of its domain. At each hull vertex
    the local action is taken from ``branch_rule`` (which decides where the
    remaining branches go) or completed canonically; every other vertex gets
    the default rotation.

    Raises:
        NotCenterClosed: If domain or codomain is not center-closed
        NotPartialHomomorphism: If f is not the restriction of an automorphism
        BoundaryMismatch: If branch_rule disagrees with f on the hull
    """
    if n < 2:
        raise BadArity(f"n must be >= 2, got {n}")
    domain, codomain = set(domain), set(codomain)
    branch_rule = dict(branch_rule or {})
    if not domain:
        raise NotPartialHomomorphism("Patchwork needs a non-empty domain")
    for v in domain | codomain:
        validate_address(n, v)
    if not tree_is_center_closed(domain):
        raise NotCenterClosed(f"Domain {sorted(map(str, domain))} is not center-closed")
    if not tree_is_center_closed(codomain):
        raise NotCenterClosed(f"Codomain {sorted(map(str, codomain))} is not center-closed")
    if set(f) != domain or set(f.values()) != codomain or len(set(f.values())) != len(f):
        raise NotPartialHomomorphism("f must be a bijection from the domain onto the codomain")
    points = sorted(domain, key=VertexAddress.sort_key)
    for a in points:
        if a.side is not f[a].side:
            raise NotPartialHomomorphism(f"f sends {a} to {f[a]} across the bipartition")
        for b in points:
            if distance(a, b) != distance(f[a], f[b]):
                raise NotPartialHomomorphism(f"f does not preserve the distance between {a} and {b}")

    # isometric extension to the hull
    image: Dict[VertexAddress, VertexAddress] = {points[0]: f[points[0]]}
    for i, a in enumerate(points):
        for b in points[i + 1:]:
            source_path = geodesic(a, b)
            target_path = geodesic(f[a], f[b])
            for u, w in zip(source_path, target_path):
                image.setdefault(u, w)
    unknown = set(branch_rule) - set(image)
    if unknown:
        raise BoundaryMismatch(f"Branch rule names vertices outside the hull: {sorted(map(str, unknown))}")

    actions: Dict[VertexAddress, LocalAction] = {}
    for v, fv in image.items():
        constraints = {}
        for w in image:
            if distance(v, w) == 1:
                constraints[half_edge_color(v, w)] = half_edge_color(fv, image[w])
        if v in branch_rule:
            action = branch_rule[v]
            for source, target in constraints.items():
                if action.apply(source) != target:
                    raise BoundaryMismatch(f"Branch rule at {v} sends {source} to {action.apply(source)}, f needs {target}")
            actions[v] = action
        elif v.is_cutpoint:
            actions[v] = _complete_ear(n, constraints)
        else:
            actions[v] = _complete_dense(constraints)

    # carry the element from the top of the hull up to the root
    top = min(image, key=lambda v: v.depth)
    current, current_image = top, image[top]
    while current.word:
        up = current.parent
        up_image = neighbor(current_image, actions[current].apply(label(up)))
        if up not in actions:
            actions[up] = rotation_between(n, up.side, label(current), label(current_image))
        current, current_image = up, up_image
    element = TreeElement(n, current_image, actions)
    logger.debug(f"patchwork: hull of {len(image)} vertices, support {len(actions)}")
    return element.pruned()


# =============================================================================
# MEMBERSHIP AND ORIENTATION
# =============================================================================

def _off_support_children(g: TreeElement, u: VertexAddress) -> Optional[List[Ear]]:
    """Ear children of a cut point missing from the support; None for circles (always infinite)."""
    if u.is_circle:
        return None
    back = label(u.parent)
    return [Ear(i) for i in range(1, g.n + 1) if Ear(i) != back and u.child(Ear(i)) not in g.actions]


def _boundary_actions(g: TreeElement, dense_trivial: bool) -> Iterator[Tuple[VertexAddress, LocalAction]]:
    """Local actions realized just outside the support (they repeat further out).

    With ``dense_trivial`` a circle whose action is not the identity yields a
    non-identity rotation marker for its grandchildren.
    """
    for u in g.actions:
        children = _off_support_children(g, u)
        if children is not None and not children:
            continue
        child_side = u.side.opposite
        yield u, rotation_between(g.n, child_side, label(u), label(g.evaluate(u)))
        sigma = g.actions[u]
        if children is None:
            if dense_trivial and not sigma.is_identity():
                yield u, DenseAction.rotation(Angle(1, 2))
            continue
        for ear in children:
            yield u, rotation_between(g.n, u.side, ear, sigma.apply(ear))


def membership(g: TreeElement, ear_group: PermutationGroup, dense_group: DenseGroup) -> bool:
    """True iff every local action of g lies in N (cut points) or M (circles)."""
    for v, action in g.actions.items():
        group = ear_group if v.is_cutpoint else dense_group
        if not group.contains(action):
            return False
    for _, action in _boundary_actions(g, dense_group is DenseGroup.TRIVIAL):
        group = ear_group if isinstance(action, EarAction) else dense_group
        if not group.contains(action):
            return False
    return True


def orientation_hom(g: TreeElement) -> EarAction:
    """The common local action of g at all cut points, for g in U(Cyc(n), AutO).

    Raises:
        NotOrientation: If g is not in U(Cyc(n), AutO)
        IllDefined: If two cut points disagree
    """
    if not membership(g, PermutationGroup.cyclic(g.n), DenseGroup.AUT_O):
        raise NotOrientation("Element is not in U(Cyc(n), AutO)")
    seen: Set[Tuple[int, ...]] = set()
    for v, action in g.actions.items():
        if v.is_cutpoint:
            seen.add(action.perm)
    for _, action in _boundary_actions(g, False):
        if isinstance(action, EarAction):
            seen.add(action.perm)
    if len(seen) != 1:
        raise IllDefined(f"Cut points carry different rotations: {sorted(seen)}")
    return EarAction(seen.pop())


def circle_color(v: VertexAddress) -> int:
    """Ear color shared by the half-edges entering circle v.

    Raises:
        WrongSide: If v is a cut point
    """
    if not v.is_circle:
        raise WrongSide(f"{v} is a cut point")
    return label(v).index


# =============================================================================
# LEGAL COLORINGS AND TRUNCATIONS
# =============================================================================

@dataclass(frozen=True, eq=False)
class LegalColoring:
    """Half-edge coloring: the canonical rule, transported by an automorphism, with table overrides."""
    n: int
    transform: Optional[TreeElement] = None
    overrides: Dict[Tuple[VertexAddress, VertexAddress], Color] = field(default_factory=dict)

    def color(self, x: VertexAddress, y: VertexAddress) -> Color:
        if (x, y) in self.overrides:
            return self.overrides[(x, y)]
        if self.transform is not None:
            x, y = self.transform.evaluate(x), self.transform.evaluate(y)
        return half_edge_color(x, y)

    def with_override(self, x: VertexAddress, y: VertexAddress, color: Color) -> 'LegalColoring':
        overrides = dict(self.overrides)
        overrides[(x, y)] = color
        return LegalColoring(self.n, self.transform, overrides)

    def pushforward(self, g: TreeElement) -> 'LegalColoring':
        """The coloring k o g^-1."""
        g_inv = invert(g)
        transform = g_inv if self.transform is None else compose(self.transform, g_inv)
        overrides = {(g.evaluate(x), g.evaluate(y)): c for (x, y), c in self.overrides.items()}
        return LegalColoring(self.n, transform, overrides)


def canonical_coloring(n: int) -> LegalColoring:
    """The address-based legal coloring.

    Raises:
        BadArity: If n < 2
    """
    if n < 2:
        raise BadArity(f"n must be >= 2, got {n}")
    return LegalColoring(n)


def children(n: int, v: VertexAddress, cap: Optional[int] = None) -> List[VertexAddress]:
    """Children of v; circles list the first ``cap`` angles in canonical order."""
    if v.is_cutpoint:
        back = label(v.parent)
        return [v.child(Ear(i)) for i in range(1, n + 1) if Ear(i) != back]
    if cap is None:
        raise ValueError("Circles have infinitely many children; pass a cap")
    back = label(v.parent) if v.word else None
    letters = (Dense(a) for a in canonical_angles() if Dense(a) != back)
    return [v.child(letter) for letter in islice(letters, cap)]


@dataclass(frozen=True)
class TruncatedTree:
    """Ball of the given radius around the root, circles capped at branching_cap children."""
    n: int
    radius: int
    branching_cap: int
    vertices: Tuple[VertexAddress, ...]

    def is_interior(self, v: VertexAddress) -> bool:
        return v.depth < self.radius

    def neighbors(self, v: VertexAddress) -> List[VertexAddress]:
        result = [v.parent] if v.word else []
        if self.is_interior(v):
            result.extend(children(self.n, v, self.branching_cap))
        return result

    def half_edges(self) -> Iterator[Tuple[VertexAddress, VertexAddress]]:
        for v in self.vertices:
            for w in self.neighbors(v):
                yield v, w

    def to_dot(self, coloring: Optional[LegalColoring] = None) -> str:
        from ..utils.dot import dot_graph

        coloring = coloring or canonical_coloring(self.n)
        nodes = [(str(v), {"shape": "circle" if v.is_circle else "point"}) for v in self.vertices]
        edges = [
            (str(v.parent), str(v), {"taillabel": str(coloring.color(v.parent, v)), "headlabel": str(coloring.color(v, v.parent))})
            for v in self.vertices if v.word
        ]
        return dot_graph("truncated_tree", nodes, edges, directed=False)


def truncate(n: int, radius: int, cap: int) -> TruncatedTree:
    if n < 2:
        raise BadArity(f"n must be >= 2, got {n}")
    if radius < 0 or cap < 2:
        raise ValueError("radius must be >= 0 and cap >= 2")
    vertices = [ROOT]
    frontier = [ROOT]
    for _ in range(radius):
        frontier = [c for v in frontier for c in children(n, v, cap)]
        vertices.extend(frontier)
    return TruncatedTree(n, radius, cap, tuple(vertices))


@dataclass(frozen=True)
class LegalityReport:
    ok: bool
    vertex: Optional[VertexAddress] = None
    condition: Optional[str] = None

    def __bool__(self) -> bool:
        return self.ok


def verify_legal(t: TruncatedTree, k: LegalColoring) -> LegalityReport:
    """Check the legal-coloring conditions at every materialized vertex, breadth first.

    Conditions: ``in-constant`` (all half-edges entering v share one color),
    ``side`` (out-colors are ears at cut points, angles at circles),
    ``out-injective`` and, at interior cut points, ``out-bijective`` onto 1..n.
    """
    for v in t.vertices:
        neighbors = t.neighbors(v)
        incoming = {k.color(w, v) for w in neighbors}
        if len(incoming) > 1:
            return LegalityReport(False, v, "in-constant")
        outgoing = [k.color(v, w) for w in neighbors]
        expected = Ear if v.is_cutpoint else Dense
        if any(not isinstance(c, expected) for c in outgoing):
            return LegalityReport(False, v, "side")
        if len(set(outgoing)) != len(outgoing):
            return LegalityReport(False, v, "out-injective")
        if v.is_cutpoint and t.is_interior(v) and {c.index for c in outgoing} != set(range(1, t.n + 1)):
            return LegalityReport(False, v, "out-bijective")
    return LegalityReport(True)


# =============================================================================
# SAMPLING
# =============================================================================

def random_angle(rng: random.Random, max_denominator: int = 12) -> Angle:
    q = rng.randint(1, max_denominator)
    return Angle.of(Fraction(rng.randrange(q), q))


def random_vertex(rng: random.Random, n: int, depth: int, max_denominator: int = 12) -> VertexAddress:
    v = ROOT
    for _ in range(depth):
        back = label(v.parent) if v.word else None
        while True:
            letter = Ear(rng.randint(1, n)) if v.is_cutpoint else Dense(random_angle(rng, max_denominator))
            if letter != back:
                break
        v = v.child(letter)
    return v


def random_dense_action(
    rng: random.Random, source: Optional[Angle], target: Optional[Angle], reversing: bool = False, extra: int = 2
) -> DenseAction:
    """Random piecewise affine action, sending source to target when both are given."""
    source = source if source is not None else random_angle(rng)
    target = target if target is not None else random_angle(rng)
    count = rng.randint(0, extra)
    sources = {random_angle(rng) for _ in range(count)} - {source}
    targets = {random_angle(rng) for _ in range(len(sources))} - {target}
    sources = sorted_from(sources, source)[: len(targets)]
    targets = sorted_from(targets, target)[: len(sources)]
    if reversing:
        targets = list(reversed(targets))
    pairs = ((source, target),) + tuple(zip(sources, targets))
    return DenseAction(PiecewiseAffineMap(pairs, reversing=reversing))


def random_element(
    rng: random.Random,
    n: int,
    depth: int = 3,
    ear_group: Optional[PermutationGroup] = None,
    dense_group: DenseGroup = DenseGroup.AUT_O,
    size: int = 3,
) -> TreeElement:
    """Random element of U(N, M) for N containing Cyc(n) and M in {AutO, AutS}."""
    ear_group = ear_group or PermutationGroup.cyclic(n)
    allow_reversing = dense_group is DenseGroup.AUT_S
    support = ancestor_closure(random_vertex(rng, n, rng.randint(0, depth)) for _ in range(size))
    root_image = random_vertex(rng, n, rng.choice([0, 2]))
    ear_elements = sorted(ear_group.elements)
    actions: Dict[VertexAddress, LocalAction] = {}
    images: Dict[VertexAddress, VertexAddress] = {ROOT: root_image}
    for v in sorted(support, key=VertexAddress.sort_key):
        if v.word:
            p = v.parent
            images[v] = neighbor(images[p], actions[p].apply(v.word[-1]))
        reversing = allow_reversing and rng.random() < 0.5
        if v.is_root:
            actions[v] = random_dense_action(rng, None, None, reversing)
            continue
        source, target = label(v.parent), label(images[v.parent])
        if v.is_cutpoint:
            options = [perm for perm in ear_elements if perm[source.index - 1] == target.index]
            actions[v] = EarAction(rng.choice(options))
        else:
            actions[v] = random_dense_action(rng, source.angle, target.angle, reversing)
    return TreeElement(n, root_image, actions).pruned()


# =============================================================================
# QUASI-ISOMETRY T_inf -> T_(k,inf)
# =============================================================================

InfVertex = Tuple[int, ...]


class QuasiIsometry:
    """The sphere-by-sphere surjection from the truncated T_inf onto T_(k,inf).

    T_inf vertices are tuples of child indices below the basepoint (cap children
    each). Image vertices are tuples too: at even depth a vertex has infinitely
    many children 0, 1, 2, ..., at odd depth exactly k - 1.
    """

    def __init__(self, k: int, radius: int, cap: int):
        if k < 2:
            raise BadArity(f"k must be >= 2, got {k}")
        if cap < 2 or radius < 0:
            raise ValueError("cap must be >= 2 and radius >= 0")
        self.k, self.radius, self.cap = k, radius, cap
        self._table: Dict[InfVertex, InfVertex] = {(): ()}
        sphere: List[InfVertex] = [()]
        for level in range(radius):
            sphere = self._extend(level, sphere)
        logger.debug(f"qi map built: k={k}, radius={radius}, cap={cap}, {len(self._table)} vertices")

    def _extend(self, level: int, sphere: List[InfVertex]) -> List[InfVertex]:
        new_sphere = []
        if level % 2 == 1:
            for v in sphere:
                for j in range(self.cap):
                    child = v + (j,)
                    self._table[child] = self._table[v] + (j % (self.k - 1),)
                    new_sphere.append(child)
            return new_sphere
        fibers: Dict[InfVertex, List[InfVertex]] = {}
        for v in sphere:
            fibers.setdefault(self._table[v], []).append(v)
        for image, fiber in fibers.items():
            new_children = [v + (j,) for v in sorted(fiber) for j in range(self.cap)]
            for index, child in enumerate(new_children):
                self._table[child] = image + (index,)
            new_sphere.extend(new_children)
        return new_sphere

    def __call__(self, v: InfVertex) -> InfVertex:
        if v not in self._table:
            raise OutOfRadius(f"{v} is outside the radius-{self.radius}, cap-{self.cap} truncation")
        return self._table[v]

    @property
    def vertices(self) -> List[InfVertex]:
        return list(self._table)


def inf_distance(a: Sequence[int], b: Sequence[int]) -> int:
    common = 0
    for left, right in zip(a, b):
        if left != right:
            break
        common += 1
    return len(a) + len(b) - 2 * common


def qi_map(v: InfVertex, k: int, radius: int = 6, cap: int = 4) -> InfVertex:
    """Image of a T_inf vertex under the quasi-isometry onto T_(k,inf).

    Raises:
        OutOfRadius: If v is not in the truncation
    """
    return QuasiIsometry(k, radius, cap)(v)


# =============================================================================
# REGULAR TREES (BURGER-MOZES SHAPE)
# =============================================================================

Word = Tuple[Color, ...]


def step(word: Word, color: Color) -> Word:
    """Neighbor of a reduced word across the edge of the given color."""
    if word and word[-1] == color:
        return word[:-1]
    return word + (color,)


def word_lca(a: Word, b: Word) -> Word:
    common = 0
    for left, right in zip(a, b):
        if left != right:
            break
        common += 1
    return a[:common]


def word_distance(a: Word, b: Word) -> int:
    return len(a) + len(b) - 2 * len(word_lca(a, b))


def word_geodesic(a: Word, b: Word) -> List[Word]:
    top = len(word_lca(a, b))
    return [a[:i] for i in range(len(a), top, -1)] + [b[:i] for i in range(top, len(b) + 1)]


def word_center(a: Word, b: Word, c: Word) -> Word:
    return max((word_lca(a, b), word_lca(b, c), word_lca(a, c)), key=len)


def edge_color(a: Word, b: Word) -> Color:
    """Color of the edge between adjacent words: the last letter of the longer one."""
    return b[-1] if len(b) > len(a) else a[-1]


def word_str(word: Word) -> str:
    return ".".join(str(c) for c in word) or "root"


def parse_word(text: str) -> Word:
    text = text.strip()
    if text in ("", "root"):
        return ()
    return tuple(parse_color(part) for part in text.split("."))


def validate_word(n: Optional[int], word: Word) -> Word:
    """Check a word is reduced and uses the alphabet (ears 1..n, or angles when n is None).

    Raises:
        InvalidAddress: If it is not a vertex of the regular tree
    """
    for i, letter in enumerate(word):
        if n is None and not isinstance(letter, Dense):
            raise InvalidAddress(f"Letter {letter} of {word_str(word)} must be an angle")
        if n is not None and (not isinstance(letter, Ear) or not 1 <= letter.index <= n):
            raise InvalidAddress(f"Letter {letter} of {word_str(word)} must be an ear in 1..{n}")
        if i and word[i - 1] == letter:
            raise InvalidAddress(f"Word {word_str(word)} is not reduced")
    return word


@dataclass(frozen=True, eq=False)
class RegularTreeElement:
    """Automorphism of the regular tree of reduced color words.

    Edge colors are the same from both ends (the legal coloring of the regular
    tree). ``n`` is the number of ear colors, or None for one color per angle.
    Off the support a vertex copies the local action of its parent, so the
    element stays in any group containing its support actions.
    """
    n: Optional[int]
    root_image: Word
    actions: Dict[Word, LocalAction]

    def __post_init__(self):
        if self.n is not None and self.n < 2:
            raise BadArity(f"n must be >= 2, got {self.n}")
        validate_word(self.n, self.root_image)
        if () not in self.actions:
            raise InconsistentElement("Support must contain the root")
        expected = DenseAction if self.n is None else EarAction
        for word, action in self.actions.items():
            validate_word(self.n, word)
            if word and word[:-1] not in self.actions:
                raise InconsistentElement(f"Support is not closed under parents at {word_str(word)}")
            if not isinstance(action, expected) or (self.n is not None and action.n != self.n):
                raise InconsistentElement(f"Action at {word_str(word)} does not act on the alphabet")
        for word, action in self.actions.items():
            if word and action.apply(word[-1]) != self.actions[word[:-1]].apply(word[-1]):
                raise InconsistentElement(f"Local action at {word_str(word)} disagrees with its parent on the shared edge")

    @classmethod
    def identity(cls, n: Optional[int]) -> 'RegularTreeElement':
        action = DenseAction.identity() if n is None else EarAction.identity(n)
        return cls(n, (), {(): action})

    @property
    def support(self) -> FrozenSet[Word]:
        return frozenset(self.actions)

    def local_action(self, word: Word) -> LocalAction:
        for i in range(len(word), -1, -1):
            if word[:i] in self.actions:
                return self.actions[word[:i]]
        raise InconsistentElement("Support lost its root")

    def evaluate(self, word: Word) -> Word:
        image = self.root_image
        current = self.actions[()]
        for i, letter in enumerate(word):
            current = self.actions.get(word[:i], current)
            image = step(image, current.apply(letter))
        return image

    __call__ = evaluate

    def preimage(self, target: Word) -> Word:
        x: Word = ()
        path = word_geodesic(self.root_image, target)
        for here, there in zip(path, path[1:]):
            x = step(x, self.local_action(x).inverse().apply(edge_color(here, there)))
        return x

    def pruned(self) -> 'RegularTreeElement':
        actions = dict(self.actions)
        changed = True
        while changed:
            changed = False
            parents = {w[:-1] for w in actions if w}
            for word in sorted(actions, key=len, reverse=True):
                if word and word not in parents and actions[word] == actions[word[:-1]]:
                    del actions[word]
                    changed = True
                    break
        return RegularTreeElement(self.n, self.root_image, actions)

    def is_identity(self) -> bool:
        pruned = self.pruned()
        return pruned.root_image == () and set(pruned.actions) == {()} and pruned.actions[()].is_identity()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RegularTreeElement):
            return NotImplemented
        a, b = self.pruned(), other.pruned()
        return a.n == b.n and a.root_image == b.root_image and a.actions == b.actions

    def __hash__(self) -> int:
        return hash((self.n, self.root_image))

    def to_json(self) -> Dict[str, object]:
        return {
            "n": self.n,
            "root_image": word_str(self.root_image),
            "actions": [
                {"vertex": word_str(w), **self.actions[w].to_json()}
                for w in sorted(self.actions, key=lambda w: (len(w), tuple(color_key(c) for c in w)))
            ],
        }

    @classmethod
    def from_json(cls, data: Dict[str, object]) -> 'RegularTreeElement':
        n = None if data["n"] is None else int(data["n"])
        actions = {parse_word(item["vertex"]): action_from_json(item) for item in data["actions"]}
        return cls(n, parse_word(data["root_image"]), actions)


def regular_compose(g: RegularTreeElement, h: RegularTreeElement) -> RegularTreeElement:
    """g after h."""
    if g.n != h.n:
        raise BadArity("Cannot compose elements over different alphabets")
    support = {()}
    for word in set(h.actions) | {h.preimage(w) for w in g.actions}:
        support.update(word[:i] for i in range(len(word) + 1))
    actions = {w: g.local_action(h.evaluate(w)).compose(h.local_action(w)) for w in support}
    return RegularTreeElement(g.n, g.evaluate(h.root_image), actions).pruned()


def regular_invert(g: RegularTreeElement) -> RegularTreeElement:
    support = {()}
    for word in g.actions:
        image = g.evaluate(word)
        support.update(image[:i] for i in range(len(image) + 1))
    actions = {w: g.local_action(g.preimage(w)).inverse() for w in support}
    return RegularTreeElement(g.n, g.preimage(()), actions).pruned()


def regular_membership(g: RegularTreeElement, group: Union[PermutationGroup, DenseGroup]) -> bool:
    """Support actions decide membership: every other vertex copies one of them."""
    return all(group.contains(action) for action in g.actions.values())


def regular_patchwork(
    n: Optional[int],
    f: Dict[Word, Word],
    branch_rule: Optional[Dict[Word, LocalAction]] = None,
    require_center_closed: bool = True,
) -> RegularTreeElement:
    """Regular-tree counterpart of ``patchwork``: f on a center-closed set plus chosen local actions.

    A distance preserving f extends uniquely to the hull, so callers that
    close up the domain themselves may pass ``require_center_closed=False``.

    Raises:
        NotCenterClosed: If the domain or the image is not center-closed
        NotPartialHomomorphism: If f is not distance preserving
        BoundaryMismatch: If branch_rule disagrees with f
    """
    branch_rule = dict(branch_rule or {})
    if not f:
        raise NotPartialHomomorphism("Patchwork needs a non-empty domain")
    for word in list(f) + list(f.values()):
        validate_word(n, word)
    domain = sorted(f, key=len)
    for points in ((domain, [f[w] for w in domain]) if require_center_closed else ()):
        closed = set(points)
        for i, a in enumerate(points):
            for j, b in enumerate(points[i + 1:], i + 1):
                for c in points[j + 1:]:
                    if word_center(a, b, c) not in closed:
                        raise NotCenterClosed(f"Center of {word_str(a)}, {word_str(b)}, {word_str(c)} is missing")
    if len(set(f.values())) != len(f):
        raise NotPartialHomomorphism("f is not injective")
    for a in domain:
        for b in domain:
            if word_distance(a, b) != word_distance(f[a], f[b]):
                raise NotPartialHomomorphism(f"f does not preserve the distance between {word_str(a)} and {word_str(b)}")

    image: Dict[Word, Word] = {domain[0]: f[domain[0]]}
    for i, a in enumerate(domain):
        for b in domain[i + 1:]:
            for u, w in zip(word_geodesic(a, b), word_geodesic(f[a], f[b])):
                image.setdefault(u, w)
    unknown = set(branch_rule) - set(image)
    if unknown:
        raise BoundaryMismatch(f"Branch rule names vertices outside the hull: {sorted(map(word_str, unknown))}")

    actions: Dict[Word, LocalAction] = {}
    for v, fv in image.items():
        constraints = {
            edge_color(v, w): edge_color(fv, image[w]) for w in image if word_distance(v, w) == 1
        }
        if v in branch_rule:
            action = branch_rule[v]
            for source, target in constraints.items():
                if action.apply(source) != target:
                    raise BoundaryMismatch(f"Branch rule at {word_str(v)} sends {source} to {action.apply(source)}, f needs {target}")
            actions[v] = action
        elif n is None:
            actions[v] = _complete_dense(constraints)
        else:
            actions[v] = _complete_ear(n, constraints)

    top = min(image, key=len)
    current, current_image = top, image[top]
    while current:
        action = actions[current]
        up, up_image = current[:-1], step(current_image, action.apply(current[-1]))
        actions.setdefault(up, action)
        current, current_image = up, up_image
    return RegularTreeElement(n, current_image, actions).pruned()


def random_regular_element(
    rng: random.Random,
    n: int,
    depth: int = 3,
    group: Optional[PermutationGroup] = None,
    size: int = 3,
) -> RegularTreeElement:
    """Random element of the Burger-Mozes group U(N) with support of the given depth."""
    group = group or PermutationGroup.symmetric(n)
    elements = sorted(group.elements)
    support = {()}
    for _ in range(size):
        word: Word = ()
        for _ in range(rng.randint(0, depth)):
            options = [Ear(i) for i in range(1, n + 1) if not word or word[-1] != Ear(i)]
            word = word + (rng.choice(options),)
        support.update(word[:i] for i in range(len(word) + 1))
    root_image: Word = ()
    for _ in range(rng.randint(0, 2)):
        options = [Ear(i) for i in range(1, n + 1) if not root_image or root_image[-1] != Ear(i)]
        root_image = root_image + (rng.choice(options),)
    actions: Dict[Word, LocalAction] = {}
    for word in sorted(support, key=len):
        if not word:
            actions[word] = EarAction(rng.choice(elements))
            continue
        edge = word[-1]
        wanted = actions[word[:-1]].apply(edge).index
        options = [perm for perm in elements if perm[edge.index - 1] == wanted]
        actions[word] = EarAction(rng.choice(options))
    return RegularTreeElement(n, root_image, actions).pruned()
