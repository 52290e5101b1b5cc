"""Tests for leaves, polygon classes and lamination pullback."""

from fractions import Fraction

import pytest
from hypothesis import given

from src.core.cyclic_order import FinitePartialMap, parse_angle, separates
from src.core.errors import BadArity, DegeneratePair, NotBijection
from src.core.laminations import (
    Lamination,
    Leaf,
    PolygonClass,
    airplane_seed,
    automorphism_check,
    basilica_seed,
    classes,
    crosses,
    endpoint_classes,
    forward_invariance_violations,
    generate,
    is_unlinked,
    orbit,
    period,
    pullback,
    rabbit_seed,
    seed_lamination,
)
from tests.strategies import distinct_angles

SEEDS = ("basilica", "rabbit:3", "rabbit:4", "airplane")


def leaf(x: str, y: str) -> Leaf:
    return Leaf.of(parse_angle(x), parse_angle(y))


# =============================================================================
# LEAVES
# =============================================================================

class TestLeaf:
    def test_endpoints_are_ordered(self):
        assert leaf("2/3", "1/3") == leaf("1/3", "2/3")
        assert str(leaf("2/3", "1/3")) == "{1/3, 2/3}"
        with pytest.raises(DegeneratePair):
            leaf("1/5", "1/5")

    def test_length_is_the_short_arc(self):
        assert leaf("0", "3/4").length == Fraction(1, 4)
        assert leaf("1/3", "2/3").length == Fraction(1, 3)

    def test_doubling(self):
        assert leaf("1/3", "2/3").doubled() == leaf("1/3", "2/3")
        assert leaf("0", "1/2").doubled() is None

    def test_halves(self):
        pairing_a, pairing_b = leaf("1/3", "2/3").halves()
        assert set(pairing_a) == {leaf("1/6", "1/3"), leaf("2/3", "5/6")}
        assert set(pairing_b) == {leaf("1/6", "5/6"), leaf("1/3", "2/3")}

    def test_crossing(self):
        assert crosses(leaf("0", "1/2"), leaf("1/4", "3/4"))
        assert not crosses(leaf("0", "1/2"), leaf("1/2", "3/4"))
        assert not crosses(leaf("1/8", "1/4"), leaf("1/2", "3/4"))

    @given(distinct_angles(4))
    def test_crossing_is_separation(self, points):
        a, b, c, d = points
        l1, l2 = Leaf(a, b), Leaf(c, d)
        assert crosses(l1, l2) == crosses(l2, l1)
        assert crosses(l1, l2) == separates(l1.a, l2.a, l1.b, l2.b)

    def test_json(self):
        assert Leaf.from_json(["3/7", "4/7"]) == airplane_seed()
        with pytest.raises(ValueError):
            Leaf.from_json(["3/7"])


class TestOrbits:
    def test_airplane_leaf_has_period_three(self):
        assert [str(x) for x in orbit(airplane_seed())] == ["{3/7, 4/7}", "{1/7, 6/7}", "{2/7, 5/7}"]
        assert period(airplane_seed()) == 3

    def test_basilica_leaf_is_fixed(self):
        assert period(leaf("1/3", "2/3")) == 1

    def test_preperiodic_leaf(self):
        assert period(leaf("1/6", "1/3")) is None


# =============================================================================
# POLYGONS AND SEEDS
# =============================================================================

class TestSeeds:
    def test_rabbit_seed(self):
        seed = rabbit_seed(3)
        assert [str(a) for a in seed.angles] == ["1/7", "2/7", "4/7"]
        assert len(seed.sides()) == 3
        assert seed.doubled() == seed

    def test_basilica_seed_is_one_leaf(self):
        assert basilica_seed().sides() == (leaf("1/3", "2/3"),)

    def test_rabbit_needs_two_angles(self):
        with pytest.raises(BadArity):
            rabbit_seed(1)
        with pytest.raises(ValueError):
            PolygonClass((parse_angle("1/3"),))

    def test_seed_names(self):
        assert [str(a) for a in seed_lamination("rabbit:3").endpoints] == ["1/7", "2/7", "4/7"]
        assert seed_lamination("rabbit4").seed == "rabbit:4"
        with pytest.raises(ValueError):
            seed_lamination("cauliflower")

    def test_critical_chord(self):
        assert seed_lamination("basilica").critical_chord == leaf("1/4", "3/4")


# =============================================================================
# PULLBACK
# =============================================================================

class TestPullback:
    def test_basilica_first_pullback(self):
        lam = pullback(seed_lamination("basilica"))
        assert lam.generation == 1
        assert lam.leaves == (leaf("1/6", "5/6"), leaf("1/3", "2/3"))
        assert lam.frontier == (leaf("1/6", "5/6"),)

    def test_airplane_first_pullback_avoids_the_critical_diameter(self):
        lam = pullback(seed_lamination("airplane"))
        assert lam.critical_chord == leaf("1/4", "3/4")
        assert set(lam.frontier) == {leaf("3/14", "11/14"), leaf("2/7", "5/7")}
        assert not any(crosses(x, lam.critical_chord) for x in lam.leaves)

    def test_generation_limits(self):
        with pytest.raises(ValueError):
            generate("basilica", -1)
        with pytest.raises(ValueError):
            generate("basilica", 5, max_generations=4)
        assert generate("basilica", 0) == seed_lamination("basilica")

    @pytest.mark.parametrize("seed", SEEDS)
    def test_unlinked_and_forward_invariant(self, seed):
        lam = generate(seed, 4)
        assert is_unlinked(lam.leaves)
        assert forward_invariance_violations(lam) == []
        assert len(lam) > len(seed_lamination(seed))

    @pytest.mark.parametrize("seed, size", [("basilica", 2), ("rabbit:3", 3), ("rabbit:4", 4), ("airplane", 2)])
    def test_class_sizes(self, seed, size):
        assert {len(c) for c in classes(generate(seed, 3))} == {size}

    def test_endpoint_classes(self):
        lam = generate("basilica", 1)
        relation = endpoint_classes(lam)
        assert relation[parse_angle("1/6")] == relation[parse_angle("5/6")]
        assert relation[parse_angle("1/3")] != relation[parse_angle("1/6")]

    def test_generation_continues_from_a_lamination(self):
        lam = generate("rabbit:3", 2)
        assert generate(lam, 1) == generate("rabbit:3", 3)

    def test_json_round_trip(self):
        lam = generate("airplane", 2)
        assert Lamination.from_json(lam.to_json()) == lam
        with pytest.raises(ValueError):
            Lamination.from_json({"seed": "airplane"})

    def test_svg(self):
        svg = generate("rabbit:3", 1).to_svg()
        assert svg.startswith("<svg")
        assert "<polygon" in svg


class TestAutomorphisms:
    def test_identity_swap_and_partial(self):
        lam = generate("basilica", 2)
        points = list(lam.endpoints)
        assert automorphism_check(lam, FinitePartialMap.identity_on(points))
        swapped = points[:]
        swapped[0], swapped[1] = swapped[1], swapped[0]
        assert not automorphism_check(lam, FinitePartialMap(tuple(zip(points, swapped))))
        with pytest.raises(NotBijection):
            automorphism_check(lam, FinitePartialMap.identity_on(points[1:]))

    def test_rotation_of_the_rabbit_triangle(self):
        lam = seed_lamination("rabbit:3")
        points = list(lam.endpoints)
        rotated = points[1:] + points[:1]
        assert automorphism_check(lam, FinitePartialMap(tuple(zip(points, rotated))))
