"""
Verification Suites
===================

Named property checks grouped into suites (cyclic, trees, dendrites,
replacement, laminations). Every check runs on seeded randomness sized by a
BudgetConfig and reports pass/fail with a short detail and the property it
exercises. Results are collected into a pandas DataFrame for JSON/CSV export.
"""

import itertools
import logging
import random
import time
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .colored_trees import (
    Dense,
    DenseAction,
    DenseGroup,
    Ear,
    PermutationGroup,
    QuasiIsometry,
    Word,
    canonical_coloring,
    compose,
    invert,
    orientation_hom,
    random_angle,
    random_element,
    random_regular_element,
    random_vertex,
    regular_compose,
    regular_invert,
    truncate,
    verify_legal,
)
from .config import BudgetConfig, get_config
from .cyclic_order import (
    Angle,
    Classification,
    FinitePartialMap,
    Orientation,
    PiecewiseAffineMap,
    Side,
    classify,
    extend_point,
    nu,
    orient,
    separates,
    split,
    split_orient,
    split_successor,
    three_transitive_witness,
    transitive_witness,
    two_transitive_witness,
)
from .dendrites import (
    BranchPoint,
    DendriteApprox,
    action_classification,
    embed_tree,
    kaleidoscopic_membership,
    lift,
    patchwork_dendrite,
)
from .errors import NotBijection
from .laminations import (
    Leaf,
    airplane_seed,
    automorphism_check,
    classes,
    crosses,
    forward_invariance_violations,
    generate,
    is_unlinked,
    orbit,
    period,
    seed_lamination,
)
from .replacement import (
    BLUE,
    RED,
    Edge,
    PeriodicWord,
    RepGraph,
    Replacement,
    ReplacementSystem,
    airplane,
    are_glued,
    arcs_between,
    base_expansion,
    basilica,
    bubble_bath,
    check_axioms,
    circles,
    dendrite_of_circles,
    expand_edge,
    full_expansion,
    interval,
    rabbit,
    tree_of_circles,
    vertex_order,
)

logger = logging.getLogger(__name__)


class Suite(Enum):
    CYCLIC = "cyclic"
    TREES = "trees"
    DENDRITES = "dendrites"
    REPLACEMENT = "replacement"
    LAMINATIONS = "laminations"


@dataclass(frozen=True)
class CheckContext:
    """Budget and seed shared by the checks of one run."""
    budget: BudgetConfig
    seed: int = 0

    def rng(self, name: str) -> random.Random:
        return random.Random(f"{self.seed}:{name}")


Outcome = Tuple[bool, str]
CheckFunction = Callable[[CheckContext], Outcome]


@dataclass(frozen=True)
class RegisteredCheck:
    name: str
    suite: Suite
    anchor: str
    function: CheckFunction


@dataclass
class CheckResult:
    name: str
    suite: str
    anchor: str
    passed: bool
    detail: str
    seconds: float

    def to_json(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "suite": self.suite,
            "anchor": self.anchor,
            "passed": self.passed,
            "detail": self.detail,
            "seconds": round(self.seconds, 3),
        }


_CHECKS: List[RegisteredCheck] = []


def register(suite: Suite, anchor: str) -> Callable[[CheckFunction], CheckFunction]:
    """Add a check to a suite; the function name becomes the check name."""
    def decorator(function: CheckFunction) -> CheckFunction:
        _CHECKS.append(RegisteredCheck(function.__name__.lstrip("_"), suite, anchor, function))
        return function
    return decorator


def registered_checks(suite: Union[str, Suite] = "all") -> List[RegisteredCheck]:
    """Checks of one suite (or all of them) in registration order.

    Raises:
        ValueError: On an unknown suite name
    """
    if isinstance(suite, Suite):
        return [c for c in _CHECKS if c.suite is suite]
    if suite == "all":
        return list(_CHECKS)
    try:
        wanted = Suite(suite)
    except ValueError:
        known = ", ".join(["all"] + [s.value for s in Suite])
        raise ValueError(f"Unknown suite '{suite}' (use {known})")
    return [c for c in _CHECKS if c.suite is wanted]


# =============================================================================
# REPORT
# =============================================================================

REPORT_COLUMNS = ["name", "suite", "anchor", "passed", "detail", "seconds"]


@dataclass
class VerificationReport:
    """Outcome of a verification run."""
    results: List[CheckResult]
    budget: BudgetConfig
    seed: int = 0

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> List[str]:
        return [r.name for r in self.results if not r.passed]

    @property
    def frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.to_json() for r in self.results], columns=REPORT_COLUMNS)

    def summary(self) -> pd.DataFrame:
        """Passed and total counts per suite."""
        frame = self.frame
        if frame.empty:
            return pd.DataFrame(columns=["passed", "total", "seconds"])
        grouped = frame.groupby("suite", sort=False)
        return pd.DataFrame({
            "passed": grouped["passed"].sum().astype(int),
            "total": grouped["passed"].count(),
            "seconds": grouped["seconds"].sum().round(3),
        })

    def to_json(self) -> Dict[str, object]:
        return {
            "ok": self.ok,
            "seed": self.seed,
            "budget": {
                "radius": self.budget.radius,
                "cap": self.budget.cap,
                "samples": self.budget.samples,
                "depth": self.budget.depth,
                "generations": self.budget.generations,
            },
            "checks": [r.to_json() for r in self.results],
        }

    def to_csv(self) -> str:
        return self.frame.to_csv(index=False)

    def to_text(self) -> str:
        lines = []
        for r in self.results:
            mark = "PASS" if r.passed else "FAIL"
            lines.append(f"[{mark}] {r.suite}/{r.name} ({r.anchor}): {r.detail} [{r.seconds:.2f}s]")
        lines.append(f"{len(self.results) - len(self.failures)} of {len(self.results)} checks passed")
        return "\n".join(lines)


def run_check(check: RegisteredCheck, context: CheckContext) -> CheckResult:
    """Run one check; any exception counts as a failure with the error as detail."""
    start = time.perf_counter()
    try:
        passed, detail = check.function(context)
    except Exception as e:
        logger.error(f"Check {check.name} raised {type(e).__name__}: {e}")
        passed, detail = False, f"{type(e).__name__}: {e}"
    seconds = time.perf_counter() - start
    if not passed:
        logger.warning(f"Check {check.suite.value}/{check.name} failed: {detail}")
    return CheckResult(check.name, check.suite.value, check.anchor, bool(passed), detail, seconds)


def run_suites(
    suite: Union[str, Suite] = "all",
    budget: Optional[BudgetConfig] = None,
    seed: int = 0,
) -> VerificationReport:
    """Run every check of the selected suite(s).

    Args:
        suite: ``all`` or one suite name
        budget: Sizes for the checks; defaults to the configured budget
        seed: Seed for every sampled check

    Returns:
        VerificationReport: One row per check
    """
    budget = budget or get_config().budget
    context = CheckContext(budget, seed)
    checks = registered_checks(suite)
    results = [run_check(check, context) for check in checks]
    report = VerificationReport(results, budget, seed)
    logger.info(f"Verification ({suite}): {len(results) - len(report.failures)} of {len(results)} checks passed")
    return report


# =============================================================================
# HELPERS
# =============================================================================

def _distinct_angles(rng: random.Random, count: int, max_denominator: int = 24) -> List[Angle]:
    found: List[Angle] = []
    while len(found) < count:
        angle = random_angle(rng, max_denominator)
        if angle not in found:
            found.append(angle)
    return found


def _monotone_map(rng: random.Random, size: int, reversing: bool = False) -> FinitePartialMap:
    sources = sorted(_distinct_angles(rng, size))
    targets = sorted(_distinct_angles(rng, size))
    shift = rng.randrange(size)
    targets = targets[shift:] + targets[:shift]
    if reversing:
        targets.reverse()
    return FinitePartialMap(tuple(zip(sources, targets)))


def _grid(*denominators: int) -> List[Angle]:
    return sorted({Angle.of(Fraction(k, q)) for q in denominators for k in range(q)})


def _failures(bad: Sequence, what: str, total: int) -> Outcome:
    if bad:
        return False, f"{len(bad)} of {total} {what} fail, first: {bad[0]}"
    return True, f"{total} {what} checked"


# =============================================================================
# CYCLIC ORDERS
# =============================================================================

def _inside(x: Angle, start: Angle, end: Angle) -> bool:
    if start.value < end.value:
        return start.value < x.value < end.value
    return x.value > start.value or x.value < end.value


@register(Suite.CYCLIC, "cyclic order axioms")
def cyclic_order_axioms(context: CheckContext) -> Outcome:
    bad = []
    total = 0
    positive = Orientation.POSITIVE
    for points in (_grid(16), _grid(7, 14)):
        for a, b, c in itertools.permutations(points, 3):
            total += 1
            abc = orient(a, b, c)
            if abc is not orient(b, c, a) or abc is not -orient(b, a, c):
                bad.append(("cyclicity/antisymmetry", str(a), str(b), str(c)))
        for a, b, c, d in itertools.permutations(points[:12], 4):
            if orient(a, b, c) is positive and orient(a, c, d) is positive and orient(a, b, d) is not positive:
                bad.append(("transitivity", str(a), str(b), str(c), str(d)))
    return _failures(bad, "triples", total)


@register(Suite.CYCLIC, "separation of endpoint pairs")
def separation_relation(context: CheckContext) -> Outcome:
    bad = []
    total = 0
    for points in (_grid(16), _grid(7, 14)):
        for quad in itertools.combinations(points, 4):
            for a, b, c, d in itertools.permutations(quad):
                total += 1
                expected = _inside(b, a, c) != _inside(d, a, c)
                if separates(a, b, c, d) != expected or separates(a, b, c, d) != separates(b, c, d, a):
                    bad.append(tuple(map(str, (a, b, c, d))))
    return _failures(bad, "quadruples", total)


@register(Suite.CYCLIC, "preserve/reverse classification of finite maps")
def monotone_classification(context: CheckContext) -> Outcome:
    rng = context.rng("monotone")
    count = context.budget.samples * 25
    bad = []
    for i in range(count):
        kind = i % 3
        if kind == 2:
            size = rng.randint(4, 6)
            m = _monotone_map(rng, size)
            targets = list(m.targets)
            j = rng.randrange(size - 1)
            targets[j], targets[j + 1] = targets[j + 1], targets[j]
            m = FinitePartialMap(tuple(zip(m.sources, targets)))
            expected = Classification.NEITHER
        else:
            m = _monotone_map(rng, rng.randint(3, 6), reversing=kind == 1)
            expected = Classification.REVERSING if kind == 1 else Classification.PRESERVING
        if classify(m) is not expected or classify(m.inverse()) is not expected:
            bad.append((expected.value, m.to_json()))
    return _failures(bad, "maps", count)


@register(Suite.CYCLIC, "piecewise affine transitivity witnesses")
def transitivity_witnesses(context: CheckContext) -> Outcome:
    rng = context.rng("witnesses")
    bad = []
    for _ in range(context.budget.samples):
        a, b = _distinct_angles(rng, 2)
        a2, b2 = _distinct_angles(rng, 2)
        w = two_transitive_witness(a, b, a2, b2)
        if w(a) != a2 or w(b) != b2 or w.classification is not Classification.PRESERVING:
            bad.append(("two", str(a), str(b), str(a2), str(b2)))

        points = _distinct_angles(rng, 3)
        images = _distinct_angles(rng, 3)
        if orient(*points) is not orient(*images):
            images[1], images[2] = images[2], images[1]
        w = three_transitive_witness(points, images)
        if [w(p) for p in points] != images:
            bad.append(("three", [str(p) for p in points], [str(q) for q in images]))

        x, y = _distinct_angles(rng, 2)
        if transitive_witness([x], [y])(x) != y:
            bad.append(("one", str(x), str(y)))
    return _failures(bad, "witness triples", context.budget.samples)


@register(Suite.CYCLIC, "back-and-forth extension keeps monotonicity")
def extension_step(context: CheckContext) -> Outcome:
    rng = context.rng("extend")
    bad = []
    for i in range(context.budget.samples * 5):
        m = _monotone_map(rng, rng.randint(3, 5), reversing=i % 2 == 1)
        x = next(a for a in iter(lambda: random_angle(rng, 30), None) if a not in m)
        extended = extend_point(m, x)
        y = extended(x)
        if y in m.targets or classify(extended) is not classify(m):
            bad.append((m.to_json(), str(x), str(y)))
    return _failures(bad, "extensions", context.budget.samples * 5)


@register(Suite.CYCLIC, "split points carry a cyclic order over the base")
def split_structure(context: CheckContext) -> Outcome:
    rng = context.rng("split")
    count = context.budget.samples * 5 // 2
    bad = []
    for _ in range(count):
        points = _distinct_angles(rng, rng.randint(3, 7))
        chosen = [p for p in points if rng.random() < 0.4]
        out = split(points, chosen)
        if len(out) != len(points) + len(chosen):
            bad.append(("size", len(out)))
            continue
        for p, q, r in itertools.permutations(out, 3):
            pqr = split_orient(p, q, r)
            if pqr is not split_orient(q, r, p) or pqr is not -split_orient(q, p, r):
                bad.append(("axioms", str(p), str(q), str(r)))
                break
            if len({nu(p), nu(q), nu(r)}) == 3 and pqr is not orient(nu(p), nu(q), nu(r)):
                bad.append(("projection", str(p), str(q), str(r)))
                break
        for a in chosen:
            minus = next(p for p in out if p.base == a and p.side is Side.MINUS)
            successor = split_successor(out, minus)
            if successor.base != a or successor.side is not Side.PLUS:
                bad.append(("successor", str(a), str(successor)))
    return _failures(bad, "configurations", count)


# =============================================================================
# COLORED TREES
# =============================================================================

@register(Suite.TREES, "canonical coloring is legal")
def canonical_legal(context: CheckContext) -> Outcome:
    radius = min(context.budget.radius, 5)
    cap = min(context.budget.cap, 5)
    bad = []
    for n in (2, 3, 4):
        report = verify_legal(truncate(n, radius, cap), canonical_coloring(n))
        if not report:
            bad.append((n, str(report.vertex), report.condition))
    return _failures(bad, f"arities at radius {radius}, cap {cap}", 3)


@register(Suite.TREES, "legal colorings form an orbit")
def pushforward_legal(context: CheckContext) -> Outcome:
    rng = context.rng("pushforward")
    count = context.budget.samples * 5
    radius = min(context.budget.radius, 3)
    trees = {n: truncate(n, radius, 3) for n in (2, 3, 4)}
    bad = []
    for i in range(count):
        n = 2 + i % 3
        g = random_element(rng, n)
        report = verify_legal(trees[n], canonical_coloring(n).pushforward(g))
        if not report:
            bad.append((n, str(report.vertex), report.condition))
    return _failures(bad, "pushforwards", count)


@register(Suite.TREES, "composition law of the universal group")
def composition_law(context: CheckContext) -> Outcome:
    rng = context.rng("composition")
    count = context.budget.samples * 5
    bad = []
    for i in range(count):
        n = 2 + i % 3
        group = DenseGroup.AUT_S if i % 2 else DenseGroup.AUT_O
        g = random_element(rng, n, dense_group=group)
        h = random_element(rng, n, dense_group=group)
        gh, g_inv = compose(g, h), invert(g)
        for _ in range(5):
            v = random_vertex(rng, n, rng.randint(0, 5))
            if gh.evaluate(v) != g.evaluate(h.evaluate(v)) or g_inv.evaluate(g.evaluate(v)) != v:
                bad.append((n, str(v)))
                break
    return _failures(bad, "pairs", count)


@register(Suite.TREES, "orientation homomorphism is multiplicative")
def orientation_multiplicative(context: CheckContext) -> Outcome:
    rng = context.rng("orientation")
    count = context.budget.samples * 5
    bad = []
    for i in range(count):
        n = 2 + i % 3
        g, h = random_element(rng, n), random_element(rng, n)
        product = orientation_hom(compose(g, h))
        expected = orientation_hom(g).compose(orientation_hom(h))
        if product != expected or product.rotation_shift() is None:
            bad.append((n, product.perm, expected.perm))
    return _failures(bad, "pairs", count)


def _sphere_distances(vertices: Sequence[Tuple[int, ...]], depth: int) -> Callable[[int, int], np.ndarray]:
    """Pairwise tree distances between prefix-encoded vertices, one row block at a time."""
    encoded = np.full((len(vertices), max(depth, 1)), -1, dtype=np.int64)
    for i, v in enumerate(vertices):
        encoded[i, :len(v)] = v
    lengths = np.array([len(v) for v in vertices], dtype=np.int64)

    def rows(start: int, stop: int) -> np.ndarray:
        left = encoded[start:stop, np.newaxis, :]
        same = (left == encoded[np.newaxis, :, :]) & (left >= 0)
        common = np.cumprod(same, axis=2).sum(axis=2)
        return lengths[start:stop, np.newaxis] + lengths[np.newaxis, :] - 2 * common

    return rows


@register(Suite.TREES, "quasi-isometry distortion bounds")
def quasi_isometry_bounds(context: CheckContext) -> Outcome:
    return quasi_isometry_distortion(3, context.budget.radius + 2, context.budget.cap)


def quasi_isometry_distortion(k: int, radius: int, cap: int) -> Outcome:
    """Check d - 2 <= d' <= d for every pair of the truncation and exact basepoint distances."""
    q = QuasiIsometry(k, radius, cap)
    sources = q.vertices
    images = [q(v) for v in sources]
    if any(len(a) != len(b) for a, b in zip(sources, images)):
        return False, "distance to the basepoint is not preserved"
    source_rows = _sphere_distances(sources, radius)
    image_rows = _sphere_distances(images, radius)
    block = 128
    for start in range(0, len(sources), block):
        stop = min(start + block, len(sources))
        d, e = source_rows(start, stop), image_rows(start, stop)
        if np.any(e > d) or np.any(e < d - 2):
            i, j = np.argwhere((e > d) | (e < d - 2))[0]
            return False, f"pair {sources[start + i]}, {sources[j]}: distance {d[i, j]} maps to {e[i, j]}"
    pairs = len(sources) * (len(sources) - 1) // 2
    return True, f"{pairs} pairs within d - 2 <= d' <= d (k={k}, radius={radius}, cap={cap})"


@register(Suite.TREES, "regular tree elements compose pointwise")
def regular_composition(context: CheckContext) -> Outcome:
    rng = context.rng("regular")
    count = context.budget.samples * 2
    bad = []
    for i in range(count):
        n = 3 + i % 2
        g, h = random_regular_element(rng, n), random_regular_element(rng, n)
        gh, g_inv = regular_compose(g, h), regular_invert(g)
        for _ in range(5):
            word = _random_word(rng, n, rng.randint(0, 5))
            if gh(word) != g(h(word)) or g_inv(g(word)) != word:
                bad.append((n, [str(c) for c in word]))
                break
    return _failures(bad, "pairs", count)


def _random_word(rng: random.Random, n: Optional[int], length: int) -> Word:
    word: Word = ()
    while len(word) < length:
        letter = Ear(rng.randint(1, n)) if n is not None else Dense(random_angle(rng, 8))
        if not word or word[-1] != letter:
            word = word + (letter,)
    return word


# =============================================================================
# DENDRITES
# =============================================================================

def _arc_point(rng: random.Random, word: Word) -> BranchPoint:
    scale = 2 ** rng.randint(2, 4)
    return BranchPoint(word, Fraction(2 * rng.randrange(scale // 2) + 1, scale))


@register(Suite.DENDRITES, "refinement places a branch point with the requested colors")
def refinement_colors(context: CheckContext) -> Outcome:
    rng = context.rng("refine")
    bad = []
    total = 0
    for n in (3, None):
        d = DendriteApprox(n)
        for _ in range(context.budget.samples):
            w1 = _random_word(rng, n, rng.randint(0, context.budget.depth))
            w2 = _random_word(rng, n, rng.randint(0, context.budget.depth))
            if w1 == w2:
                continue
            b1, b2 = d.add_node(w1), d.add_node(w2)
            if n is None:
                i, j = _distinct_angles(rng, 2, 4)
            else:
                i, j = (Angle.of(Fraction(k, n)) for k in rng.sample(range(n), 2))
            b = d.refine_between(b1, b2, i, j)
            total += 1
            if d.color_toward(b, b1) != i or d.color_toward(b, b2) != j or not d.between(b, b1, b2):
                bad.append((n, str(b1), str(b2), str(i), str(j), str(b)))
    return _failures(bad, "refinements", total)


@register(Suite.DENDRITES, "tree embeds into the dendrite preserving betweenness and colors")
def embedding_conditions(context: CheckContext) -> Outcome:
    record = embed_tree(3, context.budget.depth, DendriteApprox(3))
    betweenness = record.betweenness_violations()
    colors = record.color_violations()
    arcs = record.arc_point_violations()
    if betweenness or colors or arcs:
        return False, f"{len(betweenness)} betweenness, {len(colors)} color and {len(arcs)} arc point violations"
    return True, f"{len(record.tree_vertices)} embedded vertices and {len(record.arc_points)} arc points consistent"


@register(Suite.DENDRITES, "lifting is a homomorphism keeping local actions")
def lift_homomorphism(context: CheckContext) -> Outcome:
    rng = context.rng("lift")
    depth = max(context.budget.depth, 2)
    record = embed_tree(3, depth, DendriteApprox(3))
    d = record.approx
    points = list(record.mapping.values())
    while len(points) < context.budget.samples * 5 // 2:
        word = _random_word(rng, 3, rng.randint(1, depth + 1))
        points.append(d.materialize(_arc_point(rng, word) if rng.random() < 0.5 else BranchPoint(word)))
    pairs = context.budget.samples * 5 // 4
    bad = []
    for _ in range(pairs):
        g = random_regular_element(rng, 3, depth=depth - 1, group=PermutationGroup.cyclic(3), size=2)
        h = random_regular_element(rng, 3, depth=depth - 1, size=2)
        lg, lh = lift(g, record), lift(h, record)
        product = lg.compose(lh)
        moved = [p for p in points if product(p) != lg(lh(p))]
        if moved:
            bad.append(("product", str(moved[0])))
        wrong = [v for v in g.support if lg.local_action(record.mapping[v]) != g.local_action(v)]
        if wrong:
            bad.append(("local action", [str(c) for c in wrong[0]]))
        if not kaleidoscopic_membership(lg, PermutationGroup.cyclic(3)):
            bad.append(("membership", g.to_json()))
    broken = record.lifted_violations(lift(random_regular_element(rng, 3, depth=depth - 1, size=2), record))
    if broken:
        bad.append(("refined point", [str(x) for x in broken[0]]))
    return _failures(bad, f"pairs on {len(points)} points", pairs)


@register(Suite.DENDRITES, "patchwork involution reversing one branch point")
def patchwork_involution(context: CheckContext) -> Outcome:
    rng = context.rng("involution")
    d = DendriteApprox(None)
    b = d.add_node(())
    flip = DenseAction(PiecewiseAffineMap.reflection())
    h = patchwork_dendrite(d, [b], [b], {b: b}, {b: flip})
    third, two_thirds = Angle.of(Fraction(1, 3)), Angle.of(Fraction(2, 3))
    if h.local_action(b).apply(Dense(third)) != Dense(two_thirds):
        return False, "branch 1/3 is not sent to 2/3"
    if action_classification(None, h.local_action(b)) is not Classification.REVERSING:
        return False, "local action at the fixed point is not reversing"
    if kaleidoscopic_membership(h, DenseGroup.AUT_O) or not kaleidoscopic_membership(h, DenseGroup.AUT_S):
        return False, "membership in AutO/AutS is wrong"
    points = []
    for _ in range(context.budget.samples + 10):
        word = _random_word(rng, None, rng.randint(1, 3))
        points.append(d.materialize(_arc_point(rng, word) if rng.random() < 0.5 else BranchPoint(word)))
    moved = [p for p in points if h(h(p)) != p]
    if moved or not h.compose(h).skeleton.is_identity():
        return False, f"h o h moves {len(moved)} points"
    return True, f"h o h fixes {len(points)} points"


# =============================================================================
# REPLACEMENT SYSTEMS
# =============================================================================

def _with_blue_edges(name: str, edges: Sequence[Edge]) -> ReplacementSystem:
    system = airplane()
    blue = system.replacement(BLUE)
    graph = RepGraph(blue.graph.vertices, tuple(edges))
    return ReplacementSystem(
        name, system.colors, system.base,
        {BLUE: Replacement(graph, blue.iota, blue.tau), RED: system.replacement(RED)},
    )


def airplane_extra_contact() -> ReplacementSystem:
    """Airplane with a third red edge between the two cut points; circles touch."""
    edges = airplane().replacement(BLUE).graph.edges
    return _with_blue_edges("airplane_extra_contact", edges + (Edge("b5", "cl", "cr", RED),))


def airplane_red_ends() -> ReplacementSystem:
    """Airplane whose outer blue edges are red; no blue edge separates neighboring circles."""
    edges = tuple(
        Edge(e.name, e.source, e.target, RED if e.name in ("b1", "b4") else e.color)
        for e in airplane().replacement(BLUE).graph.edges
    )
    return _with_blue_edges("airplane_red_ends", edges)


def rabbit_missing_loop(n: int = 3) -> ReplacementSystem:
    """n-rabbit whose replacement graph lost loop 2; centers get order n - 1."""
    system = rabbit(n)
    black = system.colors[0]
    replacement = system.replacement(black)
    graph = RepGraph(replacement.graph.vertices, tuple(e for e in replacement.graph.edges if e.name != "2"))
    return ReplacementSystem(
        f"rabbit{n}_missing_loop", system.colors, system.base,
        {black: Replacement(graph, replacement.iota, replacement.tau)},
    )


PLANTED_DEFECTS: Dict[str, Tuple[Callable[[], ReplacementSystem], str, str]] = {
    "airplane_extra_contact": (airplane_extra_contact, "airplane", "disjointness"),
    "rabbit_missing_loop": (rabbit_missing_loop, "rabbit", "order"),
    "airplane_red_ends": (airplane_red_ends, "airplane", "separation"),
}


@register(Suite.REPLACEMENT, "airplane expansion words and colors")
def airplane_figure_data(context: CheckContext) -> Outcome:
    g = full_expansion(airplane(), 1)
    labels = {e.label: e.color for e in g.edges}
    expected = {"sb1": BLUE, "sb2": RED, "sb3": RED, "sb4": BLUE}
    if labels != expected:
        return False, f"depth 1 edges {labels}"
    finer = {e.label: e.color for e in expand_edge(g, ("s", "b2")).edges if e.label.startswith("sb2")}
    expected = {"sb2r1": RED, "sb2r2": RED, "sb2r3": BLUE}
    if finer != expected:
        return False, f"expanding sb2 gives {finer}"
    return True, "sb1..sb4 and sb2r1..sb2r3 match"


@register(Suite.REPLACEMENT, "basilica first expansion")
def basilica_counts(context: CheckContext) -> Outcome:
    base = base_expansion(basilica())
    g = full_expansion(basilica(), 1)
    counts = (len(base.vertices), len(base.edges), len(g.vertices), len(g.edges))
    return counts == (1, 2, 3, 6), f"vertices/edges at depth 0 and 1: {counts}"


@register(Suite.REPLACEMENT, "tree of circles of the rabbits")
def rabbit_tree_of_circles(context: CheckContext) -> Outcome:
    depth = min(context.budget.depth, 4)
    bad = []
    for n in (2, 3, 4):
        tree = tree_of_circles(full_expansion(rabbit(n), depth))
        degrees = set(tree.cut_point_degrees().values())
        if not tree.is_tree() or not tree.is_bipartite() or degrees != {n}:
            bad.append((n, tree.is_tree(), sorted(degrees)))
    return _failures(bad, f"rabbits at depth {depth}", 3)


@register(Suite.REPLACEMENT, "dendrite of circles of the airplane")
def airplane_dendrite_of_circles(context: CheckContext) -> Outcome:
    depth = min(context.budget.depth, 4)
    dendrite = dendrite_of_circles(full_expansion(airplane(), depth))
    orders = dendrite.point_orders()
    if not dendrite.is_tree():
        return False, f"depth {depth} contraction has a cycle"
    if any(order > 2 for order in orders.values()):
        return False, f"point orders {sorted(set(orders.values()))}"
    return True, f"{len(dendrite.cycles)} circles contracted, point orders <= 2"


@register(Suite.REPLACEMENT, "vertex orders stabilize")
def vertex_orders(context: CheckContext) -> Outcome:
    rng = context.rng("orders")
    bad = []
    total = 0
    for n in (2, 3):
        g = full_expansion(rabbit(n), 1)
        for v in g.vertices:
            total += 1
            if vertex_order(g, v) != n:
                bad.append((f"rabbit{n}", str(v), vertex_order(g, v)))
    g = full_expansion(airplane(), 2)
    on_circles = sorted({v for c in circles(g) for v in c.vertices}, key=str)
    for v in rng.sample(on_circles, min(len(on_circles), context.budget.samples // 4 or 1)):
        total += 1
        if vertex_order(g, v) != 2:
            bad.append(("airplane", str(v), vertex_order(g, v)))
    return _failures(bad, "vertices", total)


@register(Suite.REPLACEMENT, "rabbit and airplane conditions hold")
def axioms_hold(context: CheckContext) -> Outcome:
    depth = context.budget.depth + 1
    bad = []
    for n in (2, 3, 4):
        report = check_axioms(rabbit(n), "rabbit", depth, n=n, samples=context.budget.samples, seed=context.seed)
        if not report.ok:
            bad.append((f"rabbit{n}", report.failures))
    report = check_axioms(airplane(), "airplane", depth, samples=context.budget.samples, seed=context.seed)
    if not report.ok:
        bad.append(("airplane", report.failures))
    return _failures(bad, f"systems at depth {depth}", 4)


@register(Suite.REPLACEMENT, "planted defects are caught")
def planted_defects(context: CheckContext) -> Outcome:
    bad = []
    for name, (build, which, condition) in PLANTED_DEFECTS.items():
        report = check_axioms(build(), which, max(context.budget.depth, 3), samples=10 ** 6, seed=context.seed)
        if condition not in report.failures:
            bad.append((name, condition, report.failures))
    return _failures(bad, "fixtures", len(PLANTED_DEFECTS))


@register(Suite.REPLACEMENT, "gluing relation on periodic words")
def gluing_examples(context: CheckContext) -> Outcome:
    left = PeriodicWord(("L",), ("1",))
    right = PeriodicWord(("R",), ("1",))
    if are_glued(basilica(), left, right):
        return False, f"{left} and {right} glued in the basilica"
    low = PeriodicWord(("I", "0"), ("1",))
    high = PeriodicWord(("I", "1"), ("0",))
    if not are_glued(interval(), low, high) or not are_glued(interval(), low, low):
        return False, f"{low} and {high} not glued in the interval"
    return True, "basilica pair apart, interval pair glued"


@register(Suite.REPLACEMENT, "arc recursion stabilizes exactly for unique paths")
def arc_recursion(context: CheckContext) -> Outcome:
    g = full_expansion(interval(), 2)
    unique = arcs_between(g, g.vertices[0], g.vertices[1])
    h = full_expansion(bubble_bath(), 1)
    branching = arcs_between(h, h.vertices[0], h.vertices[1])
    if not unique.stabilized or len(unique.skeletons) != 1:
        return False, "interval arc did not stabilize to one path"
    if branching.stabilized:
        return False, "bubble bath arc recursion reported as stable"
    return True, f"interval stable; bubble bath branches at {sorted(branching.branching)}"


# =============================================================================
# LAMINATIONS
# =============================================================================

@register(Suite.LAMINATIONS, "seed angles of the rabbit")
def rabbit_seed_angles(context: CheckContext) -> Outcome:
    endpoints = [str(a) for a in seed_lamination("rabbit:3").endpoints]
    return endpoints == ["1/7", "2/7", "4/7"], f"rabbit:3 seed endpoints {endpoints}"


@register(Suite.LAMINATIONS, "airplane seed leaf has period three")
def airplane_orbit(context: CheckContext) -> Outcome:
    path = [str(leaf) for leaf in orbit(airplane_seed())]
    expected = ["{3/7, 4/7}", "{1/7, 6/7}", "{2/7, 5/7}"]
    return path == expected and period(airplane_seed()) == 3, f"orbit {path}"


LAMINATION_SEEDS = ("basilica", "rabbit:3", "rabbit:4", "airplane")


@register(Suite.LAMINATIONS, "pullbacks stay unlinked and forward invariant")
def unlinked_invariant(context: CheckContext) -> Outcome:
    generations = min(context.budget.generations, 8)
    bad = []
    for seed in LAMINATION_SEEDS:
        lam = generate(seed, generations)
        missing = forward_invariance_violations(lam)
        if not is_unlinked(lam.leaves) or missing:
            bad.append((seed, len(missing)))
    return _failures(bad, f"seeds at generation {generations}", len(LAMINATION_SEEDS))


@register(Suite.LAMINATIONS, "class sizes")
def class_sizes(context: CheckContext) -> Outcome:
    generations = min(context.budget.generations, 8)
    bad = []
    for seed, size in (("basilica", 2), ("rabbit:3", 3), ("rabbit:4", 4), ("airplane", 2)):
        sizes = {len(c) for c in classes(generate(seed, generations))}
        if sizes != {size}:
            bad.append((seed, sorted(sizes)))
    return _failures(bad, "seeds", 4)


@register(Suite.LAMINATIONS, "automorphisms preserve order and classes")
def lamination_automorphisms(context: CheckContext) -> Outcome:
    lam = generate("basilica", 2)
    points = list(lam.endpoints)
    if not automorphism_check(lam, FinitePartialMap.identity_on(points)):
        return False, "identity rejected"
    swapped = points[:]
    swapped[0], swapped[1] = swapped[1], swapped[0]
    if automorphism_check(lam, FinitePartialMap(tuple(zip(points, swapped)))):
        return False, "swapping two endpoints accepted"
    try:
        automorphism_check(lam, FinitePartialMap.identity_on(points[1:]))
    except NotBijection:
        return True, f"{len(points)} endpoints: identity accepted, swap rejected, partial map refused"
    return False, "partial map accepted"


@register(Suite.LAMINATIONS, "crossing leaves are separating pairs")
def crossing_is_separation(context: CheckContext) -> Outcome:
    rng = context.rng("crossing")
    count = context.budget.samples * 5
    bad = []
    for _ in range(count):
        a, b, c, d = _distinct_angles(rng, 4, 30)
        l1, l2 = Leaf.of(a.value, b.value), Leaf.of(c.value, d.value)
        if crosses(l1, l2) != separates(l1.a, l2.a, l1.b, l2.b) or crosses(l1, l2) != crosses(l2, l1):
            bad.append((str(l1), str(l2)))
    return _failures(bad, "leaf pairs", count)
