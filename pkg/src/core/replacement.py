"""
Replacement Systems
===================

Edge replacement systems, their graph expansions, and the limit-space
combinatorics read off them: the gluing relation, cells, cut-point orders,
circles and arcs, and the tree and dendrite of circles of the rabbit and
airplane systems.

Expansions are immutable values. Every vertex keeps a stable identity: base
vertices by name, and the vertex created when expanding edge word w by
(w, name in the replacement graph).
"""

import itertools
import logging
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

import networkx as nx

from .errors import (
    Disconnected,
    InvalidSystem,
    InvalidWord,
    NoSuchEdge,
    NotAirplaneSystem,
    NotRabbitSystem,
    NotStabilized,
)

logger = logging.getLogger(__name__)

EdgeWord = Tuple[str, ...]

BLACK = "black"
BLUE = "blue"
RED = "red"


# =============================================================================
# GRAPHS AND SYSTEMS
# =============================================================================

@dataclass(frozen=True)
class Edge:
    name: str
    source: str
    target: str
    color: str

    def to_json(self) -> Dict[str, str]:
        return {"name": self.name, "source": self.source, "target": self.target, "color": self.color}


@dataclass(frozen=True)
class RepGraph:
    """Directed multigraph (V, E, iota, tau); loops and parallel edges allowed."""
    vertices: Tuple[str, ...]
    edges: Tuple[Edge, ...]

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise InvalidSystem(f"Repeated vertex names in {self.vertices}")
        names = [e.name for e in self.edges]
        if len(set(names)) != len(names):
            raise InvalidSystem(f"Repeated edge names in {names}")
        for e in self.edges:
            if e.source not in self.vertices or e.target not in self.vertices:
                raise InvalidSystem(f"Edge {e.name} has an endpoint outside {self.vertices}")

    @cached_property
    def _by_name(self) -> Dict[str, Edge]:
        return {e.name: e for e in self.edges}

    def edge(self, name: str) -> Edge:
        try:
            return self._by_name[name]
        except KeyError:
            raise NoSuchEdge(f"No edge named {name}")

    def __contains__(self, name: object) -> bool:
        return name in self._by_name

    def to_json(self) -> Dict[str, object]:
        return {"vertices": list(self.vertices), "edges": [e.to_json() for e in self.edges]}

    @classmethod
    def from_json(cls, data: Dict[str, object]) -> 'RepGraph':
        try:
            edges = tuple(Edge(str(e["name"]), str(e["source"]), str(e["target"]), str(e["color"])) for e in data["edges"])
            return cls(tuple(str(v) for v in data["vertices"]), edges)
        except (KeyError, TypeError) as e:
            raise InvalidSystem(f"Malformed graph: {e}")


@dataclass(frozen=True)
class Replacement:
    graph: RepGraph
    iota: str
    tau: str

    def __post_init__(self):
        if self.iota == self.tau:
            raise InvalidSystem("Initial and terminal vertices of a replacement graph must differ")
        for v in (self.iota, self.tau):
            if v not in self.graph.vertices:
                raise InvalidSystem(f"Replacement vertex {v} is not in the graph")


@dataclass(frozen=True)
class ReplacementSystem:
    """A base graph plus, for every color, a replacement graph with iota != tau."""
    name: str
    colors: Tuple[str, ...]
    base: RepGraph
    replacements: Dict[str, Replacement] = field(default_factory=dict)

    def __post_init__(self):
        if not self.colors or len(set(self.colors)) != len(self.colors):
            raise InvalidSystem(f"Colors must be a non-empty list of distinct names, got {self.colors}")
        if set(self.replacements) != set(self.colors):
            raise InvalidSystem(f"Need exactly one replacement graph per color {self.colors}")
        graphs = [self.base] + [r.graph for r in self.replacements.values()]
        for graph in graphs:
            for e in graph.edges:
                if e.color not in self.colors:
                    raise InvalidSystem(f"Edge {e.name} uses undeclared color {e.color}")

    def replacement(self, color: str) -> Replacement:
        return self.replacements[color]

    def to_json(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "colors": list(self.colors),
            "base": self.base.to_json(),
            "replacements": {
                color: {**self.replacements[color].graph.to_json(), "iota": self.replacements[color].iota, "tau": self.replacements[color].tau}
                for color in self.colors
            },
        }

    @classmethod
    def from_json(cls, data: Dict[str, object]) -> 'ReplacementSystem':
        """Parse the JSON schema.

        Raises:
            InvalidSystem: If the document is malformed or violates an invariant
        """
        try:
            replacements = {
                str(color): Replacement(RepGraph.from_json(r), str(r["iota"]), str(r["tau"]))
                for color, r in data["replacements"].items()
            }
            return cls(str(data.get("name", "custom")), tuple(str(c) for c in data["colors"]), RepGraph.from_json(data["base"]), replacements)
        except (KeyError, TypeError, AttributeError) as e:
            raise InvalidSystem(f"Malformed replacement system: {e}")


# =============================================================================
# BUILTIN SYSTEMS
# =============================================================================

def _monochrome(name: str, base: RepGraph, graph: RepGraph, iota: str = "i", tau: str = "t") -> ReplacementSystem:
    return ReplacementSystem(name, (BLACK,), base, {BLACK: Replacement(graph, iota, tau)})


def rabbit(n: int) -> ReplacementSystem:
    """Bouquet X1..Xn; replacement path 0, n through a center with loops 1..n-1."""
    if n < 2:
        raise InvalidSystem(f"The rabbit system needs n >= 2, got {n}")
    base = RepGraph(("v",), tuple(Edge(f"X{i}", "v", "v", BLACK) for i in range(1, n + 1)))
    edges = [Edge("0", "i", "c", BLACK)]
    edges += [Edge(str(i), "c", "c", BLACK) for i in range(1, n)]
    edges.append(Edge(str(n), "c", "t", BLACK))
    return _monochrome(f"rabbit{n}", base, RepGraph(("i", "c", "t"), tuple(edges)))


def basilica() -> ReplacementSystem:
    base = RepGraph(("v",), (Edge("L", "v", "v", BLACK), Edge("R", "v", "v", BLACK)))
    graph = RepGraph(("i", "c", "t"), (Edge("0", "i", "c", BLACK), Edge("1", "c", "c", BLACK), Edge("2", "c", "t", BLACK)))
    return _monochrome("basilica", base, graph)


def airplane() -> ReplacementSystem:
    base = RepGraph(("l", "r"), (Edge("s", "l", "r", BLUE),))
    blue = RepGraph(("i", "cl", "cr", "t"), (
        Edge("b1", "cl", "i", BLUE),
        Edge("b2", "cr", "cl", RED),
        Edge("b3", "cl", "cr", RED),
        Edge("b4", "cr", "t", BLUE),
    ))
    red = RepGraph(("i", "c", "ct", "t"), (
        Edge("r1", "i", "c", RED),
        Edge("r2", "c", "t", RED),
        Edge("r3", "c", "ct", BLUE),
    ))
    return ReplacementSystem("airplane", (BLUE, RED), base, {BLUE: Replacement(blue, "i", "t"), RED: Replacement(red, "i", "t")})


def bubble_bath() -> ReplacementSystem:
    """Three parallel edges; its arc recursion never stabilizes."""
    base = RepGraph(("b", "t"), tuple(Edge(name, "b", "t", BLACK) for name in ("l", "c", "r")))
    graph = RepGraph(("i", "cl", "cr", "t"), (
        Edge("1", "cl", "i", BLACK),
        Edge("2", "cr", "cl", BLACK),
        Edge("3", "cl", "cr", BLACK),
        Edge("4", "cr", "t", BLACK),
    ))
    return _monochrome("bubble_bath", base, graph)


def interval() -> ReplacementSystem:
    """Binary subdivision of [0, 1]: w0111... and w1000... name the same point."""
    base = RepGraph(("a", "b"), (Edge("I", "a", "b", BLACK),))
    graph = RepGraph(("i", "m", "t"), (Edge("0", "i", "m", BLACK), Edge("1", "m", "t", BLACK)))
    return _monochrome("interval", base, graph)


BUILTIN_SYSTEMS = {
    "basilica": basilica,
    "airplane": airplane,
    "bubble_bath": bubble_bath,
    "interval": interval,
}


def builtin_system(name: str) -> ReplacementSystem:
    """Look up a builtin by name; rabbits are ``rabbitN`` or ``rabbit:N``.

    Raises:
        InvalidSystem: If no builtin has that name
    """
    key = name.strip().lower().replace("-", "_")
    if key in BUILTIN_SYSTEMS:
        return BUILTIN_SYSTEMS[key]()
    if key.startswith("rabbit"):
        digits = key[len("rabbit"):].lstrip(":")
        if digits.isdigit():
            return rabbit(int(digits))
    raise InvalidSystem(f"Unknown builtin system '{name}' (known: {', '.join(sorted(BUILTIN_SYSTEMS))}, rabbitN)")


# =============================================================================
# GRAPH EXPANSIONS
# =============================================================================

@dataclass(frozen=True)
class GluingVertex:
    """Base vertex ``name`` (empty word), or vertex ``name`` created by expanding ``word``."""
    word: EdgeWord
    name: str

    @property
    def key(self) -> str:
        return ".".join(self.word) + ":" + self.name

    @classmethod
    def from_key(cls, key: str) -> 'GluingVertex':
        word, _, name = key.rpartition(":")
        return cls(tuple(word.split(".")) if word else (), name)

    def __str__(self) -> str:
        return f"{''.join(self.word)}:{self.name}" if self.word else self.name


@dataclass(frozen=True)
class ExpansionEdge:
    word: EdgeWord
    source: GluingVertex
    target: GluingVertex
    color: str

    @property
    def label(self) -> str:
        return "".join(self.word)

    def to_json(self) -> Dict[str, object]:
        return {"word": list(self.word), "source": self.source.key, "target": self.target.key, "color": self.color}


@dataclass(frozen=True)
class GraphExpansion:
    """Graph obtained from the base graph by a finite sequence of edge expansions."""
    system: ReplacementSystem
    vertices: Tuple[GluingVertex, ...]
    edges: Tuple[ExpansionEdge, ...]
    history: Tuple[EdgeWord, ...] = ()

    @cached_property
    def _by_word(self) -> Dict[EdgeWord, ExpansionEdge]:
        return {e.word: e for e in self.edges}

    def edge(self, word: Sequence[str]) -> ExpansionEdge:
        try:
            return self._by_word[tuple(word)]
        except KeyError:
            raise NoSuchEdge(f"No edge {''.join(word)} in this expansion")

    def __contains__(self, word: object) -> bool:
        return tuple(word) in self._by_word

    @property
    def words(self) -> List[EdgeWord]:
        return [e.word for e in self.edges]

    def multigraph(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        graph.add_nodes_from(self.vertices)
        for e in self.edges:
            graph.add_edge(e.source, e.target, key=e.word, color=e.color)
        return graph

    def simple_graph(self) -> nx.Graph:
        """Loops dropped and parallel edges merged; ``colors`` holds the merged colors."""
        graph = nx.Graph()
        graph.add_nodes_from(self.vertices)
        for e in self.edges:
            if e.source == e.target:
                continue
            if graph.has_edge(e.source, e.target):
                graph[e.source][e.target]["colors"].add(e.color)
            else:
                graph.add_edge(e.source, e.target, colors={e.color})
        return graph

    def subdivided_graph(self) -> nx.Graph:
        """Simple graph with every edge split at a midpoint node (two for loops)."""
        graph = nx.Graph()
        graph.add_nodes_from(self.vertices)
        for e in self.edges:
            if e.source == e.target:
                nx.add_path(graph, [e.source, ("edge", e.word, 0), ("edge", e.word, 1), e.target])
            else:
                nx.add_path(graph, [e.source, ("edge", e.word, 0), e.target])
        return graph

    def to_json(self) -> Dict[str, object]:
        return {
            "system": self.system.name,
            "vertices": [v.key for v in self.vertices],
            "edges": [e.to_json() for e in self.edges],
            "history": [list(w) for w in self.history],
        }

    @classmethod
    def from_json(cls, data: Dict[str, object], system: ReplacementSystem) -> 'GraphExpansion':
        edges = tuple(
            ExpansionEdge(tuple(e["word"]), GluingVertex.from_key(e["source"]), GluingVertex.from_key(e["target"]), e["color"])
            for e in data["edges"]
        )
        vertices = tuple(GluingVertex.from_key(v) for v in data["vertices"])
        return cls(system, vertices, edges, tuple(tuple(w) for w in data.get("history", [])))

    def to_dot(self) -> str:
        from ..utils.dot import dot_graph

        nodes = [(v.key, {"label": str(v), "shape": "point"}) for v in self.vertices]
        edges = [
            (e.source.key, e.target.key, {"label": e.label, "color": e.color if e.color != BLACK else "black"})
            for e in self.edges
        ]
        return dot_graph(self.system.name, nodes, edges, directed=True)

    def to_svg(self, size: int = 600) -> str:
        from ..utils.svg import svg_document, svg_line, svg_point, svg_text

        graph = self.multigraph()
        if len(graph) < 500:
            layout = nx.spring_layout(graph, seed=0)
        else:
            layout = nx.circular_layout(graph)
        scale = lambda xy: (size / 2 + 0.45 * size * float(xy[0]), size / 2 - 0.45 * size * float(xy[1]))
        elements = []
        for e in self.edges:
            (x1, y1), (x2, y2) = scale(layout[e.source]), scale(layout[e.target])
            elements.append(svg_line(x1, y1, x2, y2, stroke=e.color))
            elements.append(svg_text((x1 + x2) / 2, (y1 + y2) / 2, e.label, size=9))
        for v in self.vertices:
            elements.append(svg_point(*scale(layout[v]), radius=3))
        return svg_document(size, size, elements)


def base_expansion(system: ReplacementSystem) -> GraphExpansion:
    vertices = tuple(GluingVertex((), v) for v in system.base.vertices)
    edges = tuple(
        ExpansionEdge((e.name,), GluingVertex((), e.source), GluingVertex((), e.target), e.color)
        for e in system.base.edges
    )
    return GraphExpansion(system, vertices, edges)


def _replace(system: ReplacementSystem, edge: ExpansionEdge) -> Tuple[List[GluingVertex], List[ExpansionEdge]]:
    """Fresh copy of the replacement graph glued in place of ``edge``."""
    replacement = system.replacement(edge.color)
    glue = {replacement.iota: edge.source, replacement.tau: edge.target}
    fresh = [GluingVertex(edge.word, v) for v in replacement.graph.vertices if v not in glue]
    glue.update((v.name, v) for v in fresh)
    new_edges = [
        ExpansionEdge(edge.word + (r.name,), glue[r.source], glue[r.target], r.color)
        for r in replacement.graph.edges
    ]
    return fresh, new_edges


def expand_edge(g: GraphExpansion, word: Sequence[str]) -> GraphExpansion:
    """Replace one edge by its replacement graph.

    Raises:
        NoSuchEdge: If the edge is not in g
    """
    target = g.edge(word)
    fresh, new_edges = _replace(g.system, target)
    edges: List[ExpansionEdge] = []
    for e in g.edges:
        edges.extend(new_edges if e.word == target.word else [e])
    logger.debug(f"Expanded {target.label} into {len(new_edges)} edges")
    return GraphExpansion(g.system, g.vertices + tuple(fresh), tuple(edges), g.history + (target.word,))


def expand_all(g: GraphExpansion) -> GraphExpansion:
    """Expand every edge of g once."""
    vertices = list(g.vertices)
    edges: List[ExpansionEdge] = []
    for e in g.edges:
        fresh, new_edges = _replace(g.system, e)
        vertices.extend(fresh)
        edges.extend(new_edges)
    return GraphExpansion(g.system, tuple(vertices), tuple(edges), g.history + tuple(e.word for e in g.edges))


def full_expansion(system: ReplacementSystem, depth: int) -> GraphExpansion:
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    g = base_expansion(system)
    for _ in range(depth):
        g = expand_all(g)
    logger.debug(f"{system.name} depth {depth}: {len(g.vertices)} vertices, {len(g.edges)} edges")
    return g


def endpoints(system: ReplacementSystem, word: Sequence[str]) -> Tuple[GluingVertex, GluingVertex, str]:
    """Source, target and color of an edge word, without building the expansion.

    Raises:
        InvalidWord: If some prefix of the word is not an edge of an expansion
    """
    word = tuple(word)
    if not word or word[0] not in system.base:
        raise InvalidWord(f"{''.join(word) or 'empty word'} does not start with a base edge")
    first = system.base.edge(word[0])
    source, target, color = GluingVertex((), first.source), GluingVertex((), first.target), first.color
    for k in range(1, len(word)):
        replacement = system.replacement(color)
        if word[k] not in replacement.graph:
            raise InvalidWord(f"{word[k]} is not an edge of the {color} replacement graph")
        r = replacement.graph.edge(word[k])
        glue = lambda v: source if v == replacement.iota else target if v == replacement.tau else GluingVertex(word[:k], v)
        source, target, color = glue(r.source), glue(r.target), r.color
    return source, target, color


def cells(g: GraphExpansion, word: Sequence[str]) -> List[ExpansionEdge]:
    """Edges of g inside the cell of ``word`` (those whose words extend it)."""
    word = tuple(word)
    endpoints(g.system, word)
    return [e for e in g.edges if e.word[:len(word)] == word]


# =============================================================================
# GLUING
# =============================================================================

@dataclass(frozen=True)
class PeriodicWord:
    """The infinite word prefix . period . period . ..."""
    prefix: EdgeWord
    period: EdgeWord

    def __post_init__(self):
        if not self.period:
            raise InvalidWord("The period of an infinite word cannot be empty")

    def letters(self) -> Iterator[str]:
        yield from self.prefix
        yield from itertools.cycle(self.period)

    def phase(self, k: int) -> Tuple[str, int]:
        """Where the k-th letter (1-based) sits: in the prefix or at a period offset."""
        if k <= len(self.prefix):
            return ("prefix", k)
        return ("period", (k - len(self.prefix) - 1) % len(self.period))

    def __str__(self) -> str:
        return "".join(self.prefix) + "(" + "".join(self.period) + ")*"


def _edge_walk(system: ReplacementSystem, word: PeriodicWord) -> Iterator[Tuple[GluingVertex, GluingVertex, str, EdgeWord]]:
    """Endpoints and color of each prefix of the word, one step at a time."""
    letters = word.letters()
    first = next(letters)
    if first not in system.base:
        raise InvalidWord(f"{word} does not start with a base edge")
    edge = system.base.edge(first)
    prefix: EdgeWord = (first,)
    source, target, color = GluingVertex((), edge.source), GluingVertex((), edge.target), edge.color
    yield source, target, color, prefix
    for letter in letters:
        replacement = system.replacement(color)
        if letter not in replacement.graph:
            raise InvalidWord(f"{word}: {letter} is not an edge of the {color} replacement graph")
        r = replacement.graph.edge(letter)
        glue = {replacement.iota: source, replacement.tau: target}
        source = glue.get(r.source, GluingVertex(prefix, r.source))
        target = glue.get(r.target, GluingVertex(prefix, r.target))
        color = r.color
        prefix = prefix + (letter,)
        yield source, target, color, prefix


def are_glued(system: ReplacementSystem, x: PeriodicWord, y: PeriodicWord, depth: Optional[int] = None) -> bool:
    """Whether the prefixes of x and y stay incident.

    With ``depth`` every prefix pair up to that length must be incident.
    Without it the relation is decided exactly: the incidence pattern of two
    eventually periodic words is eventually periodic, and the words are glued
    when every pair on that cycle is incident.

    Raises:
        InvalidWord: If either word leaves the symbol space
    """
    walk_x, walk_y = _edge_walk(system, x), _edge_walk(system, y)
    seen: Dict[Tuple, int] = {}
    incident: List[bool] = []
    same = True
    for k in itertools.count(1):
        xs, xt, xc, xw = next(walk_x)
        ys, yt, yc, yw = next(walk_y)
        same = same and xw[-1] == yw[-1]
        pattern = (xs == ys, xs == yt, xt == ys, xt == yt)
        incident.append(any(pattern))
        if depth is not None:
            if k >= depth:
                return all(incident)
            continue
        state = (x.phase(k), y.phase(k), xc, yc, pattern, same)
        if state in seen and x.phase(k)[0] == "period" and y.phase(k)[0] == "period":
            return all(incident[seen[state]:k - 1])
        seen.setdefault(state, k - 1)
    raise AssertionError("unreachable")


# =============================================================================
# CUT POINTS AND CIRCLES
# =============================================================================

def component_counts(g: GraphExpansion) -> Dict[GluingVertex, int]:
    """Number of connected components of g minus v, for every vertex v.

    Removing v leaves one piece per block through v, plus the components
    that never touched v.
    """
    graph = g.simple_graph()
    components = nx.number_connected_components(graph)
    blocks: Dict[GluingVertex, int] = {v: 0 for v in graph}
    for block in nx.biconnected_components(graph):
        for v in block:
            blocks[v] += 1
    return {v: components - 1 + blocks[v] for v in graph}


def vertex_order(g: GraphExpansion, v: GluingVertex, max_depth: int = 6) -> int:
    """Components left by removing v, once two consecutive expansions agree.

    Raises:
        InvalidWord: If v is not a vertex of g
        NotStabilized: If the count still changes after ``max_depth`` expansions
    """
    if v not in g.vertices:
        raise InvalidWord(f"{v} is not a vertex of this expansion")
    previous: Optional[int] = None
    current = g
    for _ in range(max_depth + 1):
        count = component_counts(current)[v]
        if count == previous:
            return count
        previous = count
        current = expand_all(current)
    raise NotStabilized(f"Order of {v} still changing after {max_depth} expansions")


@dataclass(frozen=True)
class Cycle:
    """Undirected cycle of an expansion, edges in walking order."""
    edges: Tuple[EdgeWord, ...]
    vertices: Tuple[GluingVertex, ...]

    @property
    def edge_set(self) -> frozenset:
        return frozenset(self.edges)

    @property
    def vertex_set(self) -> frozenset:
        return frozenset(self.vertices)

    def labels(self) -> List[str]:
        return ["".join(w) for w in self.edges]

    def to_json(self) -> Dict[str, object]:
        return {"edges": self.labels(), "vertices": [v.key for v in self.vertices]}


def _cycle_from_nodes(nodes: Sequence) -> Cycle:
    words: List[EdgeWord] = []
    vertices: List[GluingVertex] = []
    for node in nodes:
        if isinstance(node, GluingVertex):
            vertices.append(node)
        elif not words or words[-1] != node[1]:
            words.append(node[1])
    if len(words) > 1 and words[0] == words[-1]:
        words.pop()
    return Cycle(tuple(words), tuple(vertices))


def circles(g: GraphExpansion) -> List[Cycle]:
    """Every undirected cycle of g.

    Circles of the limit space correspond to these only for systems whose
    arc recursion stabilizes (see ``arcs_between``).
    """
    graph = g.subdivided_graph()
    found: List[Cycle] = []
    for block in nx.biconnected_components(graph):
        if len(block) < 3:
            continue
        sub = graph.subgraph(block)
        if all(d == 2 for _, d in sub.degree()):
            start = next(v for v in block if isinstance(v, GluingVertex))
            order = [start] + [w for _, w in nx.dfs_edges(sub, start)]
            found.append(_cycle_from_nodes(order))
        else:
            found.extend(_cycle_from_nodes(c) for c in nx.simple_cycles(sub))
    return sorted(found, key=lambda c: (len(c.edges), sorted(c.labels())))


def cycle_counts(g: GraphExpansion) -> Dict[GluingVertex, int]:
    counts = {v: 0 for v in g.vertices}
    for cycle in circles(g):
        for v in cycle.vertex_set:
            counts[v] += 1
    return counts


# =============================================================================
# ARCS
# =============================================================================

def replacement_paths(system: ReplacementSystem, color: str) -> List[Tuple[str, ...]]:
    """Undirected simple paths from iota to tau in the replacement graph of ``color``."""
    replacement = system.replacement(color)
    graph = nx.Graph()
    graph.add_nodes_from(("vertex", v) for v in replacement.graph.vertices)
    for e in replacement.graph.edges:
        if e.source != e.target:
            nx.add_path(graph, [("vertex", e.source), ("edge", e.name), ("vertex", e.target)])
    paths = nx.all_simple_paths(graph, ("vertex", replacement.iota), ("vertex", replacement.tau))
    return sorted(tuple(node[1] for node in path if node[0] == "edge") for path in paths)


def _divergence_points(system: ReplacementSystem, color: str, paths: List[Tuple[str, ...]]) -> List[str]:
    """Replacement vertices where two iota-tau paths part ways, read from either end."""
    replacement = system.replacement(color)
    points: Set[str] = set()
    for a, b in itertools.combinations(paths, 2):
        for first, second, start in ((a, b, replacement.iota), (a[::-1], b[::-1], replacement.tau)):
            here = start
            for x, y in zip(first, second):
                if x != y:
                    points.add(here)
                    break
                e = replacement.graph.edge(x)
                here = e.target if e.source == here else e.source
    return sorted(points)


@dataclass
class ArcReport:
    """Outcome of the arc recursion between two gluing vertices.

    When every reachable replacement graph has a unique iota-tau path the
    recursion stabilizes and each skeleton is exactly one arc (one circle
    when the endpoints coincide). Otherwise ``branching`` lists, per color,
    the competing paths and the vertices where they split.
    """
    p: GluingVertex
    q: GluingVertex
    skeletons: List[Tuple[EdgeWord, ...]]
    stabilized: bool
    branching: Dict[str, Dict[str, List]] = field(default_factory=dict)

    def to_json(self) -> Dict[str, object]:
        return {
            "p": self.p.key,
            "q": self.q.key,
            "stabilized": self.stabilized,
            "skeletons": [["".join(w) for w in s] for s in self.skeletons],
            "branching": self.branching,
        }


def arcs_between(g: GraphExpansion, p: GluingVertex, q: GluingVertex) -> ArcReport:
    """Run the arc recursion between p and q (circles through p when p == q).

    Raises:
        Disconnected: If no path joins p and q, or some reachable replacement
            graph has no iota-tau path
    """
    for v in (p, q):
        if v not in g.vertices:
            raise InvalidWord(f"{v} is not a vertex of this expansion")
    if p == q:
        skeletons = [c.edges for c in circles(g) if p in c.vertex_set]
    else:
        graph = g.subdivided_graph()
        skeletons = sorted(
            tuple(node[1] for node in path if not isinstance(node, GluingVertex) and node[2] == 0)
            for path in nx.all_simple_paths(graph, p, q)
        )
    if not skeletons:
        raise Disconnected(f"No path joins {p} and {q}")

    colors = {g.edge(w).color for s in skeletons for w in s}
    queue = list(colors)
    paths: Dict[str, List[Tuple[str, ...]]] = {}
    while queue:
        color = queue.pop()
        if color in paths:
            continue
        paths[color] = replacement_paths(g.system, color)
        if not paths[color]:
            raise Disconnected(f"The {color} replacement graph has no path from iota to tau")
        replacement = g.system.replacement(color)
        for path in paths[color]:
            queue.extend(replacement.graph.edge(name).color for name in path)

    branching = {
        color: {"paths": [list(path) for path in options], "branch_points": _divergence_points(g.system, color, options)}
        for color, options in sorted(paths.items()) if len(options) > 1
    }
    if branching:
        logger.warning(f"Arc recursion between {p} and {q} branches at colors {sorted(branching)}")
    return ArcReport(p, q, skeletons, not branching, branching)


# =============================================================================
# TREE AND DENDRITE OF CIRCLES
# =============================================================================

def rabbit_arity(system: ReplacementSystem) -> int:
    """The n of an n-rabbit system, read from its shape.

    Raises:
        NotRabbitSystem: If the system is not shaped like an n-rabbit
    """
    if len(system.colors) != 1 or len(system.base.vertices) != 1:
        raise NotRabbitSystem(f"{system.name} is not a rabbit system: needs one color and one base vertex")
    n = len(system.base.edges)
    replacement = system.replacement(system.colors[0])
    graph = replacement.graph
    centers = set(graph.vertices) - {replacement.iota, replacement.tau}
    loops = [e for e in graph.edges if e.source == e.target]
    paths = [e for e in graph.edges if e.source != e.target]
    if (
        n < 2
        or len(centers) != 1
        or len(loops) != n - 1
        or any(e.source not in centers for e in loops)
        or sorted((e.source, e.target) for e in paths) != sorted([(replacement.iota, *centers), (*centers, replacement.tau)])
    ):
        raise NotRabbitSystem(f"{system.name} is not shaped like an n-rabbit system")
    return n


def is_airplane_system(system: ReplacementSystem) -> bool:
    reference = airplane().to_json()
    candidate = system.to_json()
    reference.pop("name")
    candidate.pop("name")
    return candidate == reference


@dataclass
class CircleTree:
    """Bipartite incidence graph of cycles and the gluing vertices on them."""
    graph: nx.Graph
    cycles: List[Cycle]
    n: int

    def is_tree(self) -> bool:
        return nx.is_tree(self.graph)

    def cut_point_degrees(self) -> Dict[GluingVertex, int]:
        return {node[1]: d for node, d in self.graph.degree() if node[0] == "point"}

    def circle_degrees(self) -> List[int]:
        return [self.graph.degree(("circle", i)) for i in range(len(self.cycles))]

    def is_bipartite(self) -> bool:
        return all(a[0] != b[0] for a, b in self.graph.edges())

    def to_json(self) -> Dict[str, object]:
        return {
            "n": self.n,
            "is_tree": self.is_tree(),
            "circles": [c.to_json() for c in self.cycles],
            "cut_points": {v.key: d for v, d in sorted(self.cut_point_degrees().items(), key=lambda kv: kv[0].key)},
        }


def tree_of_circles(g: GraphExpansion) -> CircleTree:
    """Tree of circles of an n-rabbit expansion.

    Raises:
        NotRabbitSystem: If g does not expand an n-rabbit system
    """
    n = rabbit_arity(g.system)
    cycles = circles(g)
    graph = nx.Graph()
    for i, cycle in enumerate(cycles):
        graph.add_node(("circle", i))
        for v in cycle.vertex_set:
            graph.add_edge(("circle", i), ("point", v))
    logger.debug(f"Tree of circles: {len(cycles)} circles, {graph.number_of_nodes() - len(cycles)} cut points")
    return CircleTree(graph, cycles, n)


@dataclass
class CircleDendrite:
    """Airplane expansion with every red cycle contracted to one node."""
    graph: nx.Graph
    cycles: List[Cycle]
    cut_points: List[int]

    def is_tree(self) -> bool:
        return nx.is_tree(self.graph)

    def circle_degrees(self) -> List[int]:
        return [self.graph.degree(("circle", i)) for i in range(len(self.cycles))]

    def point_orders(self) -> Dict[GluingVertex, int]:
        return {node[1]: d for node, d in self.graph.degree() if node[0] == "point"}

    def components_without(self, i: int) -> int:
        graph = self.graph.copy()
        graph.remove_node(("circle", i))
        return nx.number_connected_components(graph)

    def to_json(self) -> Dict[str, object]:
        return {
            "is_tree": self.is_tree(),
            "circles": [c.to_json() for c in self.cycles],
            "circle_cut_points": self.cut_points,
            "point_orders": {v.key: d for v, d in sorted(self.point_orders().items(), key=lambda kv: kv[0].key)},
        }


def dendrite_of_circles(g: GraphExpansion) -> CircleDendrite:
    """Contract each cycle of an airplane expansion to a node.

    Raises:
        NotAirplaneSystem: If g does not expand the airplane system
    """
    if not is_airplane_system(g.system):
        raise NotAirplaneSystem(f"{g.system.name} is not the airplane system")
    cycles = circles(g)
    node_of: Dict[GluingVertex, Tuple] = {v: ("point", v) for v in g.vertices}
    on_cycle: Set[EdgeWord] = set()
    for i, cycle in enumerate(cycles):
        on_cycle.update(cycle.edges)
        for v in cycle.vertices:
            node_of[v] = ("circle", i)
    graph = nx.Graph()
    graph.add_nodes_from(set(node_of.values()))
    off_cycle = [e for e in g.edges if e.word not in on_cycle]
    for e in off_cycle:
        graph.add_edge(node_of[e.source], node_of[e.target], word=e.word)
    cut_points = [
        sum(1 for v in cycle.vertex_set if any(v in (e.source, e.target) for e in off_cycle))
        for cycle in cycles
    ]
    return CircleDendrite(graph, cycles, cut_points)


# =============================================================================
# AXIOM CHECKS
# =============================================================================

@dataclass
class AxiomCheck:
    condition: str
    passed: bool
    detail: str


@dataclass
class AxiomReport:
    system: str
    which: str
    depth: int
    checks: List[AxiomCheck]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[str]:
        return [c.condition for c in self.checks if not c.passed]

    def to_json(self) -> Dict[str, object]:
        return {
            "system": self.system,
            "which": self.which,
            "depth": self.depth,
            "ok": self.ok,
            "checks": [{"condition": c.condition, "passed": c.passed, "detail": c.detail} for c in self.checks],
        }


def _cycle_nodes(graph: nx.Graph, cycle: Cycle) -> Set:
    """Nodes of a cycle in the subdivided graph, midpoints included."""
    nodes: Set = set(cycle.vertices)
    for word in cycle.edges:
        nodes.update(node for node in (("edge", word, 0), ("edge", word, 1)) if node in graph)
    return nodes


def _cycle_path(graph: nx.Graph, a: Set, b: Set) -> List:
    """Shortest path in the subdivided graph from cycle a to cycle b."""
    shared = a & b
    if shared:
        return [min(shared, key=str)]
    _, paths = nx.multi_source_dijkstra(graph, a)
    reachable = [paths[v] for v in b if v in paths]
    return min(reachable, key=len) if reachable else []


def _separated_by_cut_point(graph: nx.Graph, a: Set, b: Set, path: List) -> bool:
    for v in path:
        if not isinstance(v, GluingVertex):
            continue
        left, right = a - {v}, b - {v}
        if not left or not right:
            continue
        rest = graph.subgraph(set(graph) - {v})
        if not nx.node_connected_component(rest, next(iter(left))) & right:
            return True
    return False


def _separated_by_blue(g: GraphExpansion, path: List) -> bool:
    return any(not isinstance(node, GluingVertex) and g.edge(node[1]).color == BLUE for node in path)



def check_axioms(
    system: ReplacementSystem,
    which: str,
    depth: int,
    n: Optional[int] = None,
    samples: int = 30,
    seed: int = 0,
) -> AxiomReport:
    """Finite-depth checks of the rabbit or airplane conditions.

    density: every cell of the depth-``depth`` expansion gains, one expansion
    later, an interior vertex on two circles (rabbit) or a cut point on a
    circle (airplane). separation: sampled pairs of cycles are split by a cut
    point (rabbit) or by a blue edge, whose cell holds a third circle
    (airplane). disjointness (airplane): cycles share no vertex. order:
    vertex orders equal n (rabbit) or are at most 2 (airplane).
    """
    if which not in ("rabbit", "airplane"):
        raise ValueError(f"which must be 'rabbit' or 'airplane', got {which}")
    if which == "rabbit" and n is None:
        n = len(system.base.edges)
    g = full_expansion(system, depth)
    finer = expand_all(g)
    finer_orders = component_counts(finer)
    finer_cycles = cycle_counts(finer)
    checks: List[AxiomCheck] = []

    by_word: Dict[EdgeWord, List[GluingVertex]] = {}
    for v in finer.vertices:
        by_word.setdefault(v.word, []).append(v)
    bad_cells = []
    for e in g.edges:
        interior = by_word.get(e.word, [])
        if which == "rabbit":
            good = any(finer_cycles[v] >= 2 for v in interior)
        else:
            good = any(finer_cycles[v] >= 1 and finer_orders[v] >= 2 for v in interior)
        if not good:
            bad_cells.append(e.label)
    checks.append(AxiomCheck(
        "density", not bad_cells,
        f"{len(g.edges)} cells checked" if not bad_cells else f"cells without the required point: {bad_cells[:5]}",
    ))

    cycles = circles(g)
    graph = g.subdivided_graph()
    nodes = [_cycle_nodes(graph, c) for c in cycles]
    pairs = list(itertools.combinations(range(len(cycles)), 2))
    random.Random(seed).shuffle(pairs)
    unseparated = []
    for i, j in pairs[:samples]:
        path = _cycle_path(graph, nodes[i], nodes[j])
        if which == "rabbit":
            ok = _separated_by_cut_point(graph, nodes[i], nodes[j], path)
        else:
            ok = _separated_by_blue(g, path)
        if not ok:
            unseparated.append((cycles[i].labels(), cycles[j].labels()))
    checks.append(AxiomCheck(
        "separation", not unseparated,
        f"{min(samples, len(pairs))} cycle pairs checked" if not unseparated else f"unseparated cycles: {unseparated[:3]}",
    ))

    if which == "airplane":
        touching = [
            (a.labels(), b.labels()) for a, b in itertools.combinations(cycles, 2) if a.vertex_set & b.vertex_set
        ]
        checks.append(AxiomCheck(
            "disjointness", not touching,
            f"{len(cycles)} cycles pairwise disjoint" if not touching else f"cycles sharing a vertex: {touching[:3]}",
        ))

    coarse_orders = component_counts(g)
    if which == "rabbit":
        wrong = {str(v): finer_orders[v] for v in g.vertices if finer_orders[v] != n}
    else:
        wrong = {str(v): finer_orders[v] for v in g.vertices if finer_orders[v] > 2}
    unstable = [str(v) for v in g.vertices if coarse_orders[v] != finer_orders[v]]
    detail = f"orders stable on {len(g.vertices) - len(unstable)} of {len(g.vertices)} vertices"
    if wrong:
        detail = f"wrong orders: {dict(list(wrong.items())[:5])}"
    checks.append(AxiomCheck("order", not wrong, detail))

    report = AxiomReport(system.name, which, depth, checks)
    if report.ok:
        logger.info(f"{system.name}: {which} conditions hold at depth {depth}")
    else:
        logger.warning(f"{system.name}: {which} conditions fail at depth {depth}: {report.failures}")
    return report
