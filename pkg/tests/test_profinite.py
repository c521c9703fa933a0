"""
Unit tests for the profinite integers.

Covers the canonical embedding of Z, elements with explicit p-adic
coordinates, residues by Chinese remaindering, exact division and the ring
homomorphism properties of the residue maps.
"""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modules import profinite
from tests.strategies import profinite_elements
from utils.errors import InvalidComponent, NotDivisible

moduli = st.integers(min_value=2, max_value=60)


@pytest.fixture
def u() -> profinite.ProfiniteElement:
    """2-adic coordinate 1, every other coordinate 0."""
    return profinite.from_prime_component(2, 1, 0)


class TestConstruction:
    """Building elements and rejecting invalid coordinates."""

    def test_integer_residue(self):
        assert profinite.residue(profinite.from_integer(17), 5) == 2
        assert profinite.residue(profinite.from_integer(-1), 7) == 6

    def test_integers_are_recognised(self, u):
        assert profinite.from_integer(4).is_integer()
        assert not u.is_integer()

    def test_prime_component_residues(self, u):
        # u = 1 mod 2 and u = 0 mod 3
        assert profinite.residue(u, 6) == 3
        assert profinite.residue(u, 2) == 1
        assert profinite.residue(u, 9) == 0

    def test_rational_coordinate(self):
        third = profinite.from_prime_component(2, Fraction(1, 3))
        assert profinite.residue(third, 2) == 1
        # 1/3 = 3 mod 8 since 3 * 3 = 9
        assert profinite.residue(third, 8) == 3

    def test_coordinate_with_p_in_denominator(self):
        with pytest.raises(InvalidComponent):
            profinite.from_prime_component(2, Fraction(1, 2))

    def test_default_needs_explicit_coordinates(self):
        with pytest.raises(InvalidComponent):
            profinite.from_components({}, Fraction(1, 3))

    def test_default_with_matching_coordinate(self):
        x = profinite.from_components({3: 1}, Fraction(1, 3))
        assert x.coordinate(3) == 1
        assert x.coordinate(5) == Fraction(1, 3)

    def test_non_prime_index(self):
        with pytest.raises(InvalidComponent):
            profinite.from_prime_component(4, 1)

    def test_normal_form_drops_redundant_coordinates(self):
        x = profinite.from_components({2: 5, 3: 5}, 5)
        assert x == profinite.from_integer(5)
        assert x.support == ()

    def test_json_form(self, u):
        assert u.to_json() == {"support": {"2": "1"}, "default": "0"}
        assert profinite.from_json(u.to_json()) == u


class TestArithmetic:
    """Ring operations, valuations and exact division."""

    def test_idempotent(self, u):
        assert u * u == u
        assert u * (1 - u) == profinite.from_integer(0)

    def test_valuation(self):
        assert profinite.from_integer(12).valuation(2) == 2
        assert profinite.from_integer(12).valuation(5) == 0
        assert profinite.from_integer(0).valuation(3) == float("inf")

    def test_divide_exact(self, u):
        half = profinite.divide_exact(u - 1, 2)
        assert profinite.from_integer(2) * half == u - 1

    def test_divide_exact_rejects_remainder(self):
        with pytest.raises(NotDivisible):
            profinite.divide_exact(profinite.from_integer(7), 2)

    def test_linear_combination(self, u):
        x = profinite.linear_combination([(3, u)], constant=1)
        assert profinite.residue(x, 2) == 0
        assert profinite.residue(x, 3) == 1

    def test_residue_rejects_bad_modulus(self, u):
        with pytest.raises(ValueError):
            profinite.residue(u, 0)

    def test_residue_table(self, u):
        table = profinite.residue_table(u, range(2, 7))
        assert list(table.columns) == ["n", "residue", "divisible"]
        assert table.loc[table["n"] == 3, "divisible"].item()
        assert not table.loc[table["n"] == 2, "divisible"].item()

    def test_random_elements_are_valid(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            x = profinite.random_element(rng)
            for p in x.support_primes():
                assert x.coordinate(p).denominator % p != 0


class TestResidueProperties:
    """Residue maps are ring homomorphisms Z^ -> Z/n."""

    @given(profinite_elements(), profinite_elements(), moduli)
    def test_additive(self, x, y, n):
        expected = (profinite.residue(x, n) + profinite.residue(y, n)) % n
        assert profinite.residue(x + y, n) == expected

    @given(profinite_elements(), profinite_elements(), moduli)
    def test_multiplicative(self, x, y, n):
        expected = (profinite.residue(x, n) * profinite.residue(y, n)) % n
        assert profinite.residue(x * y, n) == expected

    @given(profinite_elements(), st.sampled_from([2, 3, 5, 7, 11, 13]))
    def test_exactly_one_shift_divisible(self, x, p):
        hits = [i for i in range(p) if profinite.is_divisible(x + i, p)]
        assert len(hits) == 1

    @settings(max_examples=50)
    @given(profinite_elements(), st.integers(min_value=2, max_value=30))
    def test_division_with_remainder(self, x, n):
        r = profinite.residue(x, n)
        y = profinite.divide_exact(x - r, n)
        assert profinite.from_integer(n) * y + r == x
