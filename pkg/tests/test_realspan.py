"""
Unit tests for exact span elements and their signs.
"""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from modules.realspan import (
    INV_PI,
    LAURENT,
    SQRT,
    BaseReal,
    GammaDescriptor,
    check_independence,
    compare,
    evaluate,
    find_small_relation,
    inv_pi_minus_one,
    mul_by_gamma,
    parse_base_real,
    pi_power,
    rational,
    sign,
    sqrt_rational,
)
from tests.strategies import seeds
from utils.errors import IndependenceViolation, InvalidBaseReal, OutsideSpan, PrecisionExhausted


class TestBaseReals:
    """Canonical forms of the base reals."""

    def test_sqrt_is_reduced(self):
        assert sqrt_rational(8) == sqrt_rational(2).scale(2)
        assert sqrt_rational(Fraction(1, 2)) == sqrt_rational(2).scale(Fraction(1, 2))

    def test_sqrt_of_square_is_rejected(self):
        with pytest.raises(InvalidBaseReal):
            sqrt_rational(4)

    def test_sqrt_of_negative_is_rejected(self):
        with pytest.raises(InvalidBaseReal):
            sqrt_rational(-2)

    def test_non_squarefree_radicand(self):
        with pytest.raises(InvalidBaseReal):
            BaseReal(SQRT, 12)

    def test_pi_zero_is_one(self):
        assert pi_power(0) == rational(1)

    @pytest.mark.parametrize("text, expected", [
        ("0", None),
        ("3/4", rational(Fraction(3, 4))),
        ("sqrt(8)", sqrt_rational(2).scale(2)),
        ("2*pi", pi_power(1).scale(2)),
        ("pi^-2", pi_power(-2)),
        ("pi^(3)", pi_power(3)),
        ("inv(pi-1)", inv_pi_minus_one()),
        ("-1/2 * 1/(pi-1)", inv_pi_minus_one().scale(Fraction(-1, 2))),
    ])
    def test_parse(self, text, expected):
        value = parse_base_real(text)
        if expected is None:
            assert value.is_zero()
        else:
            assert value == expected

    def test_parse_rejects_unknown(self):
        with pytest.raises(InvalidBaseReal):
            parse_base_real("e^2")

    def test_text(self):
        assert str(sqrt_rational(2).scale(3)) == "3*sqrt(2)"
        assert str(inv_pi_minus_one()) == "inv(pi-1)"


class TestSigns:
    """Exact zero tests and interval refinement."""

    def test_single_base_signs(self):
        assert sign(sqrt_rational(2)) == 1
        assert sign(pi_power(-3).scale(-1)) == -1
        assert sign(rational(0)) == 0

    def test_pi_against_its_best_approximation(self):
        assert sign(pi_power(1) - rational(Fraction(355, 113))) == -1

    def test_budget_exhausted(self):
        with pytest.raises(PrecisionExhausted) as info:
            sign(pi_power(1) - rational(Fraction(355, 113)), max_bits=8)
        assert info.value.max_bits == 8

    def test_inverse_of_pi_minus_one(self):
        # 1/(pi - 1) is about 0.467
        assert compare(inv_pi_minus_one(), rational(Fraction(1, 2))) == -1
        assert compare(inv_pi_minus_one(), rational(Fraction(2, 5))) == 1

    def test_sqrt_two_against_seven_fifths(self):
        assert compare(sqrt_rational(2), rational(Fraction(7, 5))) == 1

    def test_enclosure_contains_value(self):
        enclosure = evaluate(pi_power(1), 64)
        assert enclosure.lo < Fraction(314159266, 10**8)
        assert enclosure.hi > Fraction(314159265, 10**8)

    def test_precision_floor(self):
        with pytest.raises(ValueError):
            evaluate(pi_power(1), 4)


class TestGamma:
    """Multiplication by gamma = q * pi^k."""

    def test_pi_times_inverse(self):
        result = mul_by_gamma(inv_pi_minus_one(), GammaDescriptor(1, 1), LAURENT)
        assert result == inv_pi_minus_one() + rational(1)

    def test_inverse_pi_times_inverse(self):
        result = mul_by_gamma(inv_pi_minus_one(), GammaDescriptor(1, -1), LAURENT)
        assert result == inv_pi_minus_one() - pi_power(-1)

    def test_shift_of_powers(self):
        value = pi_power(2) + rational(3)
        result = mul_by_gamma(value, GammaDescriptor(2, -1), LAURENT)
        assert result == pi_power(1).scale(2) + pi_power(-1).scale(6)

    def test_finite_span_rejects_pi(self):
        with pytest.raises(OutsideSpan):
            mul_by_gamma(rational(1), GammaDescriptor(1, 1))

    def test_sqrt_leaves_laurent_span(self):
        with pytest.raises(OutsideSpan):
            mul_by_gamma(sqrt_rational(2), GammaDescriptor(1, 1), LAURENT)

    def test_rational_gamma_on_finite_span(self):
        assert mul_by_gamma(sqrt_rational(2), GammaDescriptor(3)) == sqrt_rational(2).scale(3)

    def test_parse_and_inverse(self):
        gamma = GammaDescriptor.parse("2*pi^-1")
        assert gamma == GammaDescriptor(Fraction(2), -1)
        assert gamma.inverse() == GammaDescriptor(Fraction(1, 2), 1)
        assert gamma.text() == "2*pi^-1"

    def test_integer_coefficients_are_coerced(self):
        assert GammaDescriptor(1, 1).inverse().q == Fraction(1)
        assert GammaDescriptor(1).is_one

    def test_parse_rejects_sqrt(self):
        with pytest.raises(InvalidBaseReal):
            GammaDescriptor.parse("sqrt(2)")


class TestIndependence:
    """Spot checks of declared Q-linear independence."""

    def test_independent_values(self):
        check_independence([("a", rational(1)), ("b", sqrt_rational(2)), ("c", pi_power(1))])

    def test_rational_multiples(self):
        with pytest.raises(IndependenceViolation):
            check_independence([("a", sqrt_rational(2)), ("b", sqrt_rational(8))])

    def test_three_term_relation(self):
        values = [("a", rational(1)), ("b", sqrt_rational(2)), ("c", rational(1) + sqrt_rational(2))]
        with pytest.raises(IndependenceViolation) as info:
            check_independence(values)
        assert "*c" in str(info.value)

    def test_sum_of_bases_alone_is_independent(self):
        check_independence([("a", rational(1) + sqrt_rational(2))])

    def test_zero_value(self):
        with pytest.raises(IndependenceViolation):
            check_independence([("a", pi_power(1)), ("b", rational(0))])

    def test_laurent_window(self):
        values = [(f"pi^{k}", pi_power(k)) for k in range(-2, 3)]
        check_independence(values + [("u", inv_pi_minus_one()), ("v", sqrt_rational(2))])

    @settings(max_examples=25, deadline=None)
    @given(seeds)
    def test_combination_of_other_values_is_rejected(self, seed):
        rng = np.random.default_rng(seed)
        p, q = (int(rng.choice([-3, -2, -1, 1, 2, 3])) for _ in range(2))
        values = [
            ("a", sqrt_rational(2)),
            ("b", pi_power(1)),
            ("c", inv_pi_minus_one()),
            ("d", sqrt_rational(2).scale(p) + inv_pi_minus_one().scale(q)),
        ]
        with pytest.raises(IndependenceViolation):
            check_independence(values)

    def test_inv_base_constant(self):
        assert INV_PI.text() == "inv(pi-1)"


class TestRelationSearch:
    """Small integer relations among rationals and enclosures."""

    def test_finds_relation(self):
        numbers = [Fraction(1, 3), Fraction(1, 5), Fraction(8, 15)]
        relation = find_small_relation(numbers)
        assert relation is not None
        assert any(relation)
        assert sum(c * x for c, x in zip(relation, numbers)) == 0

    def test_height_limits_the_search(self):
        assert find_small_relation([Fraction(1), Fraction(1000)], height=100) is None

    def test_zero_entry(self):
        assert find_small_relation([Fraction(2), Fraction(0)]) == (0, 1)

    def test_no_relation_among_independent_reals(self):
        enclosures = [evaluate(sqrt_rational(2), 128), evaluate(pi_power(1), 128)]
        numbers = [Fraction(1)] + [(e.lo + e.hi) / 2 for e in enclosures]
        assert find_small_relation(numbers) is None

