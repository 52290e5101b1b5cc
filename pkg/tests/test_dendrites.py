"""Tests for dendrite approximations, the tree embedding and lifted homeomorphisms."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core.colored_trees import (
    DenseGroup,
    Ear,
    EarAction,
    PermutationGroup,
    RegularTreeElement,
    random_regular_element,
)
from src.core.cyclic_order import Angle, parse_angle
from src.core.dendrites import (
    BranchPoint,
    DendriteApprox,
    angle_color,
    arc_colors,
    color_angle,
    embed_tree,
    kaleidoscopic_membership,
    lift,
    patchwork_dendrite,
    _dense_pair,
)
from src.core.errors import BadArity, InvalidAddress, SameColor, SamePoint, SupportExceedsDepth, UnknownBranchPoint

from tests.strategies import distinct_angles

ROOT_POINT = BranchPoint(())


def node(*ears: int) -> BranchPoint:
    return BranchPoint(tuple(Ear(i) for i in ears))


# =============================================================================
# COLORS
# =============================================================================

class TestColors:
    def test_ear_angles(self):
        assert color_angle(3, Ear(3)) == parse_angle("2/3")
        assert angle_color(3, "1/3") == Ear(2)
        with pytest.raises(InvalidAddress):
            angle_color(3, "1/4")

    @pytest.mark.parametrize("n", [2, 3, None])
    def test_arc_colors_flip_with_direction(self, n):
        low, high = arc_colors(n, Fraction(1, 4))
        assert low != high
        assert arc_colors(n, Fraction(3, 4)) == (high, low)

    @pytest.mark.parametrize("t", [Fraction(0), Fraction(1), Fraction(1, 2)])
    def test_arc_colors_reject_reserved_positions(self, t):
        with pytest.raises(InvalidAddress):
            arc_colors(3, t)

    def test_needs_two_colors(self):
        with pytest.raises(BadArity):
            DendriteApprox(1)


# =============================================================================
# APPROXIMATIONS
# =============================================================================

class TestApproximation:
    def test_grow_and_colors(self):
        d = DendriteApprox(3)
        b = d.grow(ROOT_POINT, "1/3")
        assert b == node(2)
        assert d.color_toward(ROOT_POINT, b) == parse_angle("1/3")
        assert d.color_toward(b, ROOT_POINT) == parse_angle("1/3")
        with pytest.raises(SamePoint):
            d.color_toward(b, b)

    def test_unknown_points_are_rejected(self):
        d = DendriteApprox(3)
        with pytest.raises(UnknownBranchPoint):
            d.path(ROOT_POINT, node(1))

    def test_center_and_betweenness(self):
        d = DendriteApprox(3)
        for ears in ((1,), (2,), (1, 2), (1, 3)):
            d.add_node(tuple(Ear(i) for i in ears))
        assert d.center(node(1), node(2), node(1, 2)) == node(1)
        assert d.between(ROOT_POINT, node(2), node(1, 2))
        assert not d.is_center_closed({node(2), node(1, 2), node(1, 3)})
        assert d.is_center_closed({node(1), node(2), node(1, 2), node(1, 3)})

    @pytest.mark.parametrize("n, i, j", [(3, "0", "1/3"), (4, "1/2", "3/4"), (None, "0", "1/2"), (None, "1/5", "2/3")])
    def test_refine_between(self, n, i, j):
        d = DendriteApprox(n)
        far = d.grow(d.grow(ROOT_POINT, "1/3" if n != 4 else "1/4"), "0")
        b = d.refine_between(ROOT_POINT, far, i, j)
        assert not b.is_node
        assert d.between(b, ROOT_POINT, far)
        assert d.color_toward(b, ROOT_POINT) == parse_angle(i)
        assert d.color_toward(b, far) == parse_angle(j)
        assert set(d.chart(b).values()) == {parse_angle(i), parse_angle(j)}

    def test_refine_after_narrowing_toward_one_end(self):
        d = DendriteApprox(None)
        far = d.grow(ROOT_POINT, "1/2")
        near = d.refine_between(ROOT_POINT, far, *_dense_pair(19))
        assert near.position < Fraction(1, 2 ** 18)
        low, high = _dense_pair(0)
        b = d.refine_between(ROOT_POINT, far, low, high)
        assert 0 < b.position < near.position
        assert d.color_toward(b, ROOT_POINT) == low
        assert d.color_toward(b, far) == high

    def test_repeated_refinement_toward_the_root(self):
        d = DendriteApprox(3)
        far = d.grow(ROOT_POINT, "1/3")
        points = []
        for k in range(40):
            i, j = ("0", "2/3") if k % 2 else ("2/3", "1/3")
            b = d.refine_between(ROOT_POINT, far, i, j)
            assert d.between(b, ROOT_POINT, far)
            assert d.color_toward(b, ROOT_POINT) == parse_angle(i)
            points.append(b)
        positions = [p.position for p in points]
        assert positions == sorted(positions, reverse=True)
        assert len(set(positions)) == 40

    def test_refine_errors(self):
        d = DendriteApprox(3)
        b = d.grow(ROOT_POINT, "0")
        with pytest.raises(SamePoint):
            d.refine_between(b, b, "0", "1/3")
        with pytest.raises(SameColor):
            d.refine_between(ROOT_POINT, b, "1/3", "1/3")
        with pytest.raises(InvalidAddress):
            d.refine_between(ROOT_POINT, b, "1/4", "1/3")

    def test_json_lists_charts(self):
        d = DendriteApprox(2)
        d.grow(ROOT_POINT, "1/2")
        data = d.to_json()
        assert data["n"] == 2
        assert [item["id"] for item in data["branch_points"]] == ["root", "e2"]
        assert [sorted(arc) for arc in data["arcs"]] == [["e2", "root"]]

    def test_branch_point_parse(self):
        point = BranchPoint.parse("e1.e2@1/3")
        assert point == BranchPoint((Ear(1), Ear(2)), Fraction(1, 3))
        assert str(point) == "e1.e2@1/3"


refinement_steps = st.lists(st.tuples(st.booleans(), distinct_angles(2, 12)), min_size=1, max_size=12)


class TestRefinementSequences:
    @settings(max_examples=40, deadline=None)
    @given(refinement_steps)
    def test_every_refinement_lands_inside_with_its_colors(self, steps):
        d = DendriteApprox(None)
        far = d.grow(ROOT_POINT, "1/3")
        start, end = ROOT_POINT, far
        placed = []
        for keep_start, (i, j) in steps:
            b = d.refine_between(start, end, i, j)
            assert b not in (start, end)
            assert d.between(b, start, end)
            assert d.color_toward(b, start) == i
            assert d.color_toward(b, end) == j
            placed.append((b, d.color_toward(b, ROOT_POINT), d.color_toward(b, far)))
            if keep_start:
                end = b
            else:
                start = b
        for b, toward_root, toward_far in placed:
            assert d.between(b, ROOT_POINT, far)
            assert d.color_toward(b, ROOT_POINT) == toward_root
            assert d.color_toward(b, far) == toward_far


# =============================================================================
# EMBEDDING AND LIFTING
# =============================================================================

class TestEmbedding:
    @pytest.mark.parametrize("n", [2, 3])
    def test_embedding_preserves_betweenness_and_colors(self, n):
        record = embed_tree(n, 2, DendriteApprox(n))
        assert record.betweenness_violations() == []
        assert record.color_violations() == []

    @pytest.mark.parametrize("n, depth", [(2, 2), (3, 2), (4, 1)])
    def test_every_tree_edge_gets_a_refined_point(self, n, depth):
        record = embed_tree(n, depth, DendriteApprox(n))
        assert len(record.arc_points) == len(record.mapping) - 1
        assert all(not p.is_node for p in record.arc_points.values())
        assert record.arc_point_violations() == []
        assert record.betweenness_violations() == []

    def test_depth_zero_maps_the_root(self):
        record = embed_tree(3, 0, DendriteApprox(3))
        assert record.mapping == {(): ROOT_POINT}
        assert record.arc_points == {}

    def test_arity_must_match(self):
        with pytest.raises(BadArity):
            embed_tree(3, 1, DendriteApprox(4))

    def test_support_must_fit(self):
        identity = EarAction.identity(3)
        deep = (Ear(1), Ear(2), Ear(1))
        g = RegularTreeElement(3, (), {deep[:i]: identity for i in range(4)})
        with pytest.raises(SupportExceedsDepth):
            lift(g, embed_tree(3, 1, DendriteApprox(3)))

    def test_lift_is_a_homomorphism(self, rng):
        record = embed_tree(3, 2, DendriteApprox(3))
        d = record.approx
        arc_point = d.refine_between(ROOT_POINT, node(1, 2), "0", "1/3")
        points = [ROOT_POINT, node(1), node(2, 3), arc_point]
        for _ in range(8):
            g = random_regular_element(rng, 3, depth=2, group=PermutationGroup.cyclic(3))
            h = random_regular_element(rng, 3, depth=2, group=PermutationGroup.cyclic(3))
            lg, lh = lift(g, record), lift(h, record)
            lgh = lg.compose(lh)
            for p in points:
                assert lgh(p) == lg(lh(p))
            assert kaleidoscopic_membership(lg, DenseGroup.AUT_O)
            assert kaleidoscopic_membership(lg, PermutationGroup.cyclic(3))

    def test_arc_points_keep_their_colors(self, rng):
        record = embed_tree(3, 2, DendriteApprox(3))
        d = record.approx
        arc_point = d.refine_between(ROOT_POINT, node(2), "0", "1/3")
        g = lift(random_regular_element(rng, 3, depth=1), record)
        image = g(arc_point)
        assert set(d.chart(image).values()) == set(d.chart(arc_point).values())


class TestPatchwork:
    def test_swap_two_branches(self):
        d = DendriteApprox(3)
        d.add_node((Ear(1),))
        d.add_node((Ear(2),))
        h = patchwork_dendrite(d, {ROOT_POINT, node(1)}, {ROOT_POINT, node(2)}, {ROOT_POINT: ROOT_POINT, node(1): node(2)})
        assert h(node(1)) == node(2)
        assert h(ROOT_POINT) == ROOT_POINT
        assert kaleidoscopic_membership(h, PermutationGroup.symmetric(3))
        assert not kaleidoscopic_membership(h, PermutationGroup.cyclic(3))
        assert not kaleidoscopic_membership(h, DenseGroup.AUT_O)
        assert kaleidoscopic_membership(h, DenseGroup.AUT_S)

    def test_angles_in_dense_dendrite(self):
        d = DendriteApprox(None)
        b = d.grow(ROOT_POINT, "2/5")
        assert b.node[0].angle == Angle(2, 5)


class TestLiftOnRefinedPoints:
    def test_lift_keeps_betweenness_and_colors_at_arc_points(self, rng):
        record = embed_tree(3, 2, DendriteApprox(3))
        for _ in range(6):
            g = lift(random_regular_element(rng, 3, depth=1), record)
            assert record.lifted_violations(g) == []

    def test_points_refined_after_lifting(self, rng):
        record = embed_tree(3, 2, DendriteApprox(3))
        d = record.approx
        child = record.mapping[(Ear(1),)]
        edge_point = record.arc_points[((), (Ear(1),))]
        g = lift(random_regular_element(rng, 3, depth=1), record)
        fresh = d.refine_between(edge_point, child, "1/3", "2/3")
        assert d.between(g(fresh), g(edge_point), g(child))
        assert d.color_toward(g(fresh), g(edge_point)) == parse_angle("1/3")
        assert d.color_toward(g(fresh), g(child)) == parse_angle("2/3")

    def test_inverse_lift_undoes_arc_points(self, rng):
        record = embed_tree(3, 2, DendriteApprox(3))
        g = lift(random_regular_element(rng, 3, depth=1), record)
        inverse = g.inverse()
        for p in list(record.arc_points.values()):
            assert inverse(g(p)) == p
