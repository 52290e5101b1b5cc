"""Hypothesis strategies shared by the property tests."""

from fractions import Fraction

from hypothesis import strategies as st

from src.core.cyclic_order import Angle


def angles(max_denominator: int = 48) -> st.SearchStrategy:
    """Angles p/q with q up to ``max_denominator``."""
    return st.integers(1, max_denominator).flatmap(
        lambda q: st.integers(0, q - 1).map(lambda p: Angle.of(Fraction(p, q)))
    )


def distinct_angles(count: int, max_denominator: int = 48) -> st.SearchStrategy:
    return st.lists(angles(max_denominator), min_size=count, max_size=count, unique=True)
