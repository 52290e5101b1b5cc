"""Tests for the biregular tree, its automorphisms and the regular-tree variant."""

import pytest

from src.core.colored_trees import (
    ROOT,
    Dense,
    DenseAction,
    DenseGroup,
    Ear,
    EarAction,
    PermutationGroup,
    QuasiIsometry,
    RegularTreeElement,
    TreeElement,
    VertexAddress,
    between,
    canonical_coloring,
    children,
    circle_color,
    compose,
    distance,
    half_edge_color,
    invert,
    label,
    membership,
    neighbor,
    orientation_hom,
    patchwork,
    random_element,
    random_regular_element,
    random_vertex,
    regular_compose,
    regular_invert,
    regular_membership,
    regular_patchwork,
    tree_center,
    truncate,
    validate_address,
    verify_legal,
)
from src.core.cyclic_order import PiecewiseAffineMap, parse_angle
from src.core.errors import (
    BadArity,
    InconsistentElement,
    InvalidAddress,
    NotPartialHomomorphism,
    OutOfRadius,
    WrongSide,
)
from src.core.verification import quasi_isometry_distortion


def circle_child(text: str) -> VertexAddress:
    return VertexAddress((Dense(parse_angle(text)),))


# =============================================================================
# ADDRESSES
# =============================================================================

class TestAddresses:
    def test_parse_and_str(self):
        v = VertexAddress.parse("1/2.e2.1/3")
        assert str(v) == "1/2.e2.1/3"
        assert v.is_cutpoint and v.depth == 3
        w = VertexAddress.parse("1/2.e2")
        assert w.is_circle and w.depth == 2
        assert ROOT.is_circle
        assert VertexAddress.parse("root") == ROOT

    def test_last_letter_is_the_color_leaving_the_parent(self):
        cut = VertexAddress.parse("1/2")
        circle = VertexAddress.parse("1/2.e2")
        assert cut.is_cutpoint and isinstance(label(cut), Dense)
        assert circle.is_circle and isinstance(label(circle), Ear)
        assert half_edge_color(ROOT, cut) == Dense(parse_angle("1/2"))
        assert half_edge_color(cut, circle) == Ear(2)
        assert neighbor(ROOT, Dense(parse_angle("1/2"))) == cut
        assert neighbor(cut, Ear(2)) == circle

    def test_letters_cannot_lead_back(self):
        with pytest.raises(InvalidAddress):
            validate_address(3, VertexAddress.parse("0.e1"))
        with pytest.raises(InvalidAddress):
            validate_address(3, VertexAddress.parse("0.e4"))
        with pytest.raises(InvalidAddress):
            validate_address(3, VertexAddress((Ear(2),)))

    def test_neighbor_returns_parent_across_label(self):
        c = circle_child("1/2")
        assert neighbor(ROOT, Dense(parse_angle("1/2"))) == c
        assert neighbor(c, Ear(1)) == ROOT
        assert neighbor(c, Ear(2)) == c.child(Ear(2))
        with pytest.raises(InvalidAddress):
            neighbor(ROOT, Ear(2))

    def test_metric(self):
        a = VertexAddress.parse("0.e2.1/2")
        b = VertexAddress.parse("0.e3")
        c = VertexAddress.parse("1/3")
        assert distance(a, b) == 3
        assert between(circle_child("0"), a, c)
        assert tree_center(a, b, c) == circle_child("0")

    def test_circle_color(self):
        assert circle_color(ROOT) == 1
        assert circle_color(VertexAddress.parse("0.e3")) == 3
        with pytest.raises(WrongSide):
            circle_color(circle_child("0"))

    def test_circle_children_need_a_cap(self):
        with pytest.raises(ValueError):
            children(3, ROOT)
        assert [str(v) for v in children(3, circle_child("0"))] == ["0/1.e2", "0/1.e3"]


# =============================================================================
# LOCAL ACTIONS
# =============================================================================

class TestLocalActions:
    def test_rotations_compose(self):
        r = EarAction.rotation(3, 1)
        assert r.compose(r) == EarAction.rotation(3, 2)
        assert r.compose(r.inverse()).is_identity()
        assert EarAction((2, 1, 3)).rotation_shift() is None

    def test_group_sizes(self):
        assert len(PermutationGroup.cyclic(4).elements) == 4
        assert len(PermutationGroup.symmetric(3).elements) == 6
        assert len(PermutationGroup.trivial(3).elements) == 1

    def test_dense_groups(self):
        flip = DenseAction(PiecewiseAffineMap.reflection())
        assert DenseGroup.AUT_S.contains(flip)
        assert not DenseGroup.AUT_O.contains(flip)
        assert DenseGroup.TRIVIAL.contains(DenseAction.identity())
        assert not DenseGroup.AUT_O.contains(EarAction.identity(3))


# =============================================================================
# ELEMENTS
# =============================================================================

class TestTreeElement:
    def test_identity(self):
        g = TreeElement.identity(3)
        v = VertexAddress.parse("1/2.e3.1/4")
        assert g(v) == v
        assert g.is_identity()

    def test_root_image_must_be_a_circle(self):
        with pytest.raises(InconsistentElement):
            TreeElement(3, circle_child("0"), {ROOT: DenseAction.identity()})

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_composition_law(self, rng, n):
        for _ in range(10):
            g, h = random_element(rng, n), random_element(rng, n)
            gh = compose(g, h)
            for _ in range(5):
                v = random_vertex(rng, n, rng.randint(0, 4))
                assert gh(v) == g(h(v))

    @pytest.mark.parametrize("n", [2, 3])
    def test_inverse(self, rng, n):
        for _ in range(10):
            g = random_element(rng, n, dense_group=DenseGroup.AUT_S)
            assert compose(g, invert(g)).is_identity()
            v = random_vertex(rng, n, 3)
            assert g.preimage(g(v)) == v

    def test_random_elements_are_members(self, rng):
        for _ in range(10):
            g = random_element(rng, 3)
            assert membership(g, PermutationGroup.cyclic(3), DenseGroup.AUT_O)

    def test_orientation_is_multiplicative(self, rng):
        for _ in range(10):
            g, h = random_element(rng, 3), random_element(rng, 3)
            assert orientation_hom(compose(g, h)) == orientation_hom(g).compose(orientation_hom(h))

    def test_json_round_trip(self, rng):
        g = random_element(rng, 3)
        assert TreeElement.from_json(g.to_json()) == g


class TestPatchwork:
    def test_moves_a_cut_point(self):
        g = patchwork(3, {ROOT, circle_child("0")}, {ROOT, circle_child("1/2")},
                      {ROOT: ROOT, circle_child("0"): circle_child("1/2")})
        assert g(ROOT) == ROOT
        assert g(circle_child("0")) == circle_child("1/2")
        assert membership(g, PermutationGroup.cyclic(3), DenseGroup.AUT_O)

    def test_rejects_non_isometric_maps(self):
        far = VertexAddress.parse("0.e2.1/2")
        with pytest.raises(NotPartialHomomorphism):
            patchwork(3, {ROOT, circle_child("0")}, {ROOT, far}, {ROOT: ROOT, circle_child("0"): far})


# =============================================================================
# LEGAL COLORINGS
# =============================================================================

class TestLegalColorings:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_canonical_coloring_is_legal(self, n):
        assert verify_legal(truncate(n, 4, 3), canonical_coloring(n))

    def test_override_breaks_injectivity(self):
        v = circle_child("0")
        coloring = canonical_coloring(3).with_override(v, v.child(Ear(2)), Ear(3))
        report = verify_legal(truncate(3, 3, 3), coloring)
        assert not report.ok
        assert report.vertex == v
        assert report.condition == "out-injective"

    def test_pushforward_stays_legal(self, rng):
        tree = truncate(3, 3, 3)
        for _ in range(5):
            assert verify_legal(tree, canonical_coloring(3).pushforward(random_element(rng, 3)))

    def test_truncation_sizes(self):
        assert truncate(2, 0, 2).vertices == (ROOT,)
        # root, 3 cut points, 3 * 2 circles
        assert len(truncate(3, 2, 3).vertices) == 10
        with pytest.raises(BadArity):
            truncate(1, 2, 2)

    def test_dot_export(self):
        dot = truncate(2, 1, 2).to_dot()
        assert dot.startswith("graph")
        assert "0/1" in dot


# =============================================================================
# QUASI-ISOMETRY
# =============================================================================

class TestQuasiIsometry:
    def test_root_and_radius(self):
        qi = QuasiIsometry(3, 3, 2)
        assert qi(()) == ()
        assert len(qi.vertices) == 1 + 2 + 4 + 8
        with pytest.raises(OutOfRadius):
            qi((0, 0, 0, 0))

    def test_distortion_is_bounded(self):
        passed, detail = quasi_isometry_distortion(3, 4, 3)
        assert passed, detail


# =============================================================================
# REGULAR TREES
# =============================================================================

class TestRegularTree:
    @pytest.mark.parametrize("n", [3, 4])
    def test_compose_and_invert(self, rng, n):
        for _ in range(10):
            g, h = random_regular_element(rng, n), random_regular_element(rng, n)
            word = (Ear(1), Ear(2), Ear(1))
            assert regular_compose(g, h)(word) == g(h(word))
            assert regular_compose(g, regular_invert(g)).is_identity()
            assert regular_membership(g, PermutationGroup.symmetric(n))

    def test_patchwork_translates_the_root(self):
        g = regular_patchwork(3, {(): (Ear(1),)})
        assert g(()) == (Ear(1),)
        assert g((Ear(2),)) == (Ear(1), Ear(2))
        assert g((Ear(1),)) == ()

    def test_json_round_trip(self, rng):
        g = random_regular_element(rng, 3)
        assert RegularTreeElement.from_json(g.to_json()) == g
