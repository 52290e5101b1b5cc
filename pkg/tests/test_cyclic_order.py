"""Tests for angles, cyclic orientation, monotone maps and the split construction."""

from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from src.core.cyclic_order import (
    ZERO,
    Angle,
    Classification,
    FinitePartialMap,
    Orientation,
    PiecewiseAffineMap,
    Side,
    SplitPoint,
    arc_length,
    canonical_angles,
    classify,
    cyclic_successor,
    extend_point,
    in_open_arc,
    nu,
    orient,
    parse_angle,
    separates,
    sorted_from,
    split,
    split_orient,
    split_successor,
    three_transitive_witness,
    transitive_witness,
    two_transitive_witness,
)
from src.core.errors import (
    DegeneratePair,
    DegenerateQuadruple,
    DegenerateTriple,
    NotInjective,
    NotMember,
    NotMonotone,
    NotSubset,
    Singleton,
    TooFewPoints,
)
from tests.strategies import angles, distinct_angles


def a(text: str) -> Angle:
    return parse_angle(text)


# =============================================================================
# ANGLES
# =============================================================================

class TestAngle:
    def test_reduces_mod_one(self):
        assert Angle.of("3/2") == a("1/2")
        assert Angle.of(Fraction(-1, 3)) == a("2/3")
        assert Angle.of(1) == ZERO

    def test_rejects_unreduced_or_out_of_range(self):
        with pytest.raises(ValueError):
            Angle(2, 4)
        with pytest.raises(ValueError):
            Angle(1, 1)
        with pytest.raises(ValueError):
            Angle(0, 0)

    def test_parse_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse_angle("one half")

    def test_arithmetic_and_doubling(self):
        assert a("1/3") + a("2/3") == ZERO
        assert a("1/4") - a("1/2") == a("3/4")
        assert -a("1/5") == a("4/5")
        assert a("4/7").doubled() == a("1/7")
        assert str(a("2/6")) == "1/3"

    def test_canonical_enumeration_starts_with_small_denominators(self):
        first = [str(x) for _, x in zip(range(6), canonical_angles())]
        assert first == ["0/1", "1/2", "1/3", "2/3", "1/4", "3/4"]

    def test_arc_length_of_full_turn(self):
        assert arc_length(a("1/3"), a("1/3")) == 1
        assert arc_length(a("3/4"), a("1/4")) == Fraction(1, 2)

    def test_sorted_from_starts_at_given_angle(self):
        points = [a("0"), a("1/4"), a("1/2"), a("3/4")]
        assert sorted_from(points, a("1/2")) == [a("1/2"), a("3/4"), a("0"), a("1/4")]


# =============================================================================
# ORIENTATION
# =============================================================================

class TestOrientation:
    def test_basic_orientations(self):
        assert orient(a("0"), a("1/4"), a("1/2")) is Orientation.POSITIVE
        assert orient(a("0"), a("1/2"), a("1/4")) is Orientation.NEGATIVE
        assert Orientation.NEGATIVE * Orientation.NEGATIVE is Orientation.POSITIVE

    def test_degenerate_triple(self):
        with pytest.raises(DegenerateTriple):
            orient(a("0"), a("0"), a("1/2"))

    @given(distinct_angles(3))
    def test_cyclic_and_antisymmetric(self, points):
        x, y, z = points
        assert orient(x, y, z) is orient(y, z, x)
        assert orient(x, z, y) is -orient(x, y, z)

    @given(distinct_angles(4))
    def test_transitive(self, points):
        w, x, y, z = points
        positive = Orientation.POSITIVE
        if orient(w, x, y) is positive and orient(w, y, z) is positive:
            assert orient(w, x, z) is positive

    def test_separation(self):
        assert separates(a("0"), a("1/4"), a("1/2"), a("3/4"))
        assert not separates(a("0"), a("1/2"), a("1/4"), a("3/4"))
        with pytest.raises(DegenerateQuadruple):
            separates(a("0"), a("1/4"), a("0"), a("3/4"))

    @given(distinct_angles(4))
    def test_separation_is_symmetric_in_the_pairs(self, points):
        w, x, y, z = points
        assert separates(w, x, y, z) == separates(x, y, z, w)
        assert separates(w, x, y, z) == separates(y, x, w, z)

    def test_open_arc(self):
        assert in_open_arc(a("0"), a("3/4"), a("1/4"))
        assert not in_open_arc(a("1/2"), a("3/4"), a("1/4"))
        assert not in_open_arc(a("3/4"), a("3/4"), a("1/4"))


# =============================================================================
# FINITE AND PIECEWISE AFFINE MAPS
# =============================================================================

class TestFinitePartialMap:
    def test_sorted_by_source(self):
        m = FinitePartialMap.from_dict({"1/2": "0", "1/4": "1/3"})
        assert m.sources == (a("1/4"), a("1/2"))
        assert m(a("1/2")) == ZERO
        assert a("1/4") in m

    def test_rejects_repeated_target(self):
        with pytest.raises(NotInjective):
            FinitePartialMap.from_dict({"0": "1/2", "1/4": "1/2"})

    def test_json_round_trip(self):
        m = FinitePartialMap.from_dict({"1/3": "2/3", "0": "1/5"})
        assert FinitePartialMap.from_json(m.to_json()) == m

    def test_classification(self):
        points = ["0", "1/4", "1/2", "3/4"]
        assert classify(FinitePartialMap.identity_on(points)) is Classification.PRESERVING
        reflected = FinitePartialMap.from_dict({p: str(-a(p)) for p in points})
        assert classify(reflected) is Classification.REVERSING
        swapped = FinitePartialMap.from_dict({"0": "1/4", "1/4": "0", "1/2": "1/2", "3/4": "3/4"})
        assert classify(swapped) is Classification.NEITHER

    def test_classify_needs_three_points(self):
        with pytest.raises(TooFewPoints):
            classify(FinitePartialMap.identity_on(["0", "1/2"]))

    @given(distinct_angles(5), st.integers(0, 4))
    def test_rotating_targets_preserves_order(self, points, shift):
        ordered = sorted(points)
        targets = ordered[shift:] + ordered[:shift]
        m = FinitePartialMap(tuple(zip(ordered, targets)))
        assert classify(m) is Classification.PRESERVING
        assert classify(m.inverse()) is Classification.PRESERVING


class TestPiecewiseAffineMap:
    def test_rotation_and_reflection(self):
        assert PiecewiseAffineMap.rotation("1/3")(a("1/2")) == a("5/6")
        assert PiecewiseAffineMap.reflection()(a("1/4")) == a("3/4")
        assert PiecewiseAffineMap.reflection("1/2")(a("1/4")) == a("1/4")
        assert PiecewiseAffineMap.reflection().classification is Classification.REVERSING

    def test_rejects_non_monotone_anchors(self):
        with pytest.raises(NotMonotone):
            PiecewiseAffineMap(((a("0"), a("1/4")), (a("1/4"), a("0")), (a("1/2"), a("1/2")), (a("3/4"), a("3/4"))))

    def test_normalization_drops_collinear_anchors(self):
        m = PiecewiseAffineMap(((a("0"), a("1/3")), (a("1/2"), a("5/6"))))
        assert m == PiecewiseAffineMap.rotation("1/3")
        assert m.breakpoints == ()

    @given(distinct_angles(4), st.integers(0, 3))
    def test_interpolant_restricts_to_the_map(self, points, shift):
        ordered = sorted(points)
        m = FinitePartialMap(tuple(zip(ordered, ordered[shift:] + ordered[:shift])))
        g = PiecewiseAffineMap.interpolating(m)
        assert g.restrict(ordered) == m

    @given(distinct_angles(4), st.integers(0, 3))
    def test_inverse_composes_to_identity(self, points, shift):
        ordered = sorted(points)
        g = PiecewiseAffineMap.interpolating(FinitePartialMap(tuple(zip(ordered, ordered[shift:] + ordered[:shift]))))
        assert g.compose(g.inverse()).is_identity()
        assert g.inverse().compose(g).is_identity()

    def test_composition_of_reflections_is_a_rotation(self):
        r = PiecewiseAffineMap.reflection("1/2").compose(PiecewiseAffineMap.reflection())
        assert r == PiecewiseAffineMap.rotation("1/2")

    def test_json_round_trip(self):
        g = two_transitive_witness(a("0"), a("1/2"), a("1/3"), a("1/2"))
        assert PiecewiseAffineMap.from_json(g.to_json()) == g


class TestWitnesses:
    @given(distinct_angles(4))
    def test_two_transitive_witness_hits_targets(self, points):
        x, y, x2, y2 = points
        g = two_transitive_witness(x, y, x2, y2)
        assert g(x) == x2
        assert g(y) == y2
        assert g.classification is Classification.PRESERVING

    def test_two_transitive_rejects_degenerate_pairs(self):
        with pytest.raises(DegeneratePair):
            two_transitive_witness(a("0"), a("0"), a("1/2"), a("1/3"))

    def test_three_transitive(self):
        points = [a("0"), a("1/3"), a("2/3")]
        images = [a("1/8"), a("1/4"), a("7/8")]
        g = three_transitive_witness(points, images)
        assert [g(p) for p in points] == images

    def test_three_transitive_needs_three(self):
        with pytest.raises(TooFewPoints):
            three_transitive_witness([a("0"), a("1/2")], [a("0"), a("1/2")])

    def test_orders_must_agree(self):
        with pytest.raises(NotMonotone):
            transitive_witness([a("0"), a("1/4"), a("1/2")], [a("0"), a("1/2"), a("1/4")])


class TestExtendPoint:
    @settings(max_examples=60)
    @given(distinct_angles(4), angles(), st.integers(0, 3), st.booleans())
    def test_extension_keeps_direction_and_interpolant(self, points, x, shift, reverse):
        ordered = sorted(points)
        assume(x not in ordered)
        targets = ordered[shift:] + ordered[:shift]
        if reverse:
            targets = [-t for t in targets]
        m = FinitePartialMap(tuple(zip(ordered, targets)))
        extended = extend_point(m, x)
        assert len(extended) == len(m) + 1
        assert classify(extended) is classify(m)
        assert PiecewiseAffineMap.interpolating(extended) == PiecewiseAffineMap.interpolating(m)

    def test_existing_source_is_rejected(self):
        m = FinitePartialMap.identity_on(["0", "1/2", "3/4"])
        with pytest.raises(NotMember):
            extend_point(m, a("1/2"))


# =============================================================================
# SPLIT
# =============================================================================

class TestSplit:
    def test_doubles_split_points_in_place(self):
        result = split([a("0"), a("1/4"), a("1/2")], [a("1/4")])
        assert [str(p) for p in result] == ["0/1", "1/4-", "1/4+", "1/2"]
        assert [nu(p) for p in result] == [a("0"), a("1/4"), a("1/4"), a("1/2")]

    def test_output_starts_at_first_point(self):
        result = split([a("1/2"), a("0"), a("1/4")], [])
        assert [nu(p) for p in result] == [a("1/2"), a("0"), a("1/4")]

    def test_rejects_foreign_split_points(self):
        with pytest.raises(NotSubset):
            split([a("0"), a("1/2")], [a("1/3")])

    def test_split_orientation_puts_minus_before_plus(self):
        minus, plus = SplitPoint(a("1/4"), Side.MINUS), SplitPoint(a("1/4"), Side.PLUS)
        assert split_orient(minus, plus, SplitPoint(a("1/2"))) is Orientation.POSITIVE
        assert split_orient(plus, minus, SplitPoint(a("1/2"))) is Orientation.NEGATIVE

    def test_successors(self):
        points = split([a("0"), a("1/4"), a("1/2")], [a("1/4")])
        assert split_successor(points, SplitPoint(a("1/4"), Side.MINUS)) == SplitPoint(a("1/4"), Side.PLUS)
        assert split_successor(points, SplitPoint(a("1/2"))) == SplitPoint(a("0"))

    def test_cyclic_successor(self):
        points = [a("0"), a("1/4"), a("1/2")]
        assert cyclic_successor(points, a("1/2")) == a("0")
        assert cyclic_successor(points, a("0")) == a("1/4")
        with pytest.raises(Singleton):
            cyclic_successor([a("0")], a("0"))
        with pytest.raises(NotMember):
            cyclic_successor(points, a("3/4"))
