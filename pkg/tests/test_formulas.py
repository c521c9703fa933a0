"""
Unit tests for Presburger formula syntax: canonical atoms, parsing and printing.
"""

import pytest
from hypothesis import given, settings

from modules.formulas import (
    FALSE,
    TRUE,
    And,
    DivCong,
    Eq,
    Exists,
    Leq,
    Not,
    Or,
    Term,
    cong,
    conj,
    disj,
    eq,
    free_vars,
    geq,
    is_quantifier_free,
    parse,
    parse_term,
    size,
)
from tests.strategies import open_formulas
from utils.errors import FormulaSyntaxError, UnboundVariable

x = Term.var("x")
y = Term.var("y")


class TestTerms:
    """Linear terms over integer variables."""

    def test_build_drops_zero_coefficients(self):
        t = Term.build({"x": 2, "y": 0}, const=3)
        assert t.variables() == ("x",)
        assert str(t) == "2*x + 3"

    def test_arithmetic(self):
        t = x.scale(3) - y + Term.constant(1)
        assert t.coef("x") == 3 and t.coef("y") == -1
        assert t.evaluate({"x": 2, "y": 5}) == 2
        assert t.substitute("x", y) == y.scale(2) + Term.constant(1)

    def test_unassigned_variable(self):
        with pytest.raises(UnboundVariable):
            x.evaluate({})

    def test_parse_term(self):
        assert parse_term("-x + 3y - 2") == Term.build({"x": -1, "y": 3}, const=-2)


class TestCanonicalAtoms:
    """Atoms are normalised on construction."""

    def test_inequality_is_tightened(self):
        # 2x >= 3 becomes x >= 2
        assert geq(x.scale(2) - Term.constant(3)) == Leq(Term.constant(2), x)

    def test_constant_atoms_collapse(self):
        assert geq(Term.constant(-1)) == FALSE
        assert eq(Term.constant(0)) == TRUE

    def test_unsatisfiable_equality(self):
        assert eq(x.scale(2) - Term.constant(3)) == FALSE

    def test_equality_sign(self):
        assert eq(Term.constant(4) - x.scale(2)) == Eq(x, Term.constant(2))

    def test_congruence_normalisation(self):
        assert cong(4, x.scale(2), 1) == FALSE
        assert cong(4, x.scale(2), 2) == DivCong(2, x, 1)
        assert cong(-3, x, 5) == DivCong(3, x, 2)
        assert cong(1, x, 0) == TRUE

    def test_zero_modulus(self):
        with pytest.raises(ValueError):
            cong(0, x, 0)

    def test_boolean_simplification(self):
        a = geq(x)
        assert conj([a, FALSE]) == FALSE
        assert conj([a, Not(a)]) == FALSE
        assert disj([a, Not(a)]) == TRUE
        assert conj([a, TRUE, a]) == a


class TestParser:
    """Reading the formula grammar."""

    def test_inequality(self):
        f = parse("x + 2 <= 3*y")
        assert f == Leq(Term.constant(2), Term.build({"x": -1, "y": 3}))
        assert str(f) == "-x + 3*y >= 2"

    def test_strict_and_not_equal(self):
        assert parse("x < 3") == parse("x <= 2")
        assert parse("x > 3") == parse("x >= 4")
        assert parse("x != 3") == Not(Eq(x, Term.constant(3)))

    def test_congruence(self):
        assert parse("2*x == 1 (mod 3)") == DivCong(3, x.scale(2), 1)

    def test_precedence(self):
        f = parse("x = 0 | x = 1 & y = 2")
        assert isinstance(f, Or)
        assert isinstance(f.args[1], And)

    def test_implication(self):
        f = parse("x >= 0 -> x >= 1")
        assert isinstance(f, Or)
        assert f.args[0] == Not(geq(x))

    def test_quantifier_block(self):
        f = parse("A x, y. x + y = y + x")
        assert free_vars(f) == set()
        assert not is_quantifier_free(f)

    def test_free_variables(self):
        assert free_vars(parse("E y. x = 2*y")) == {"x"}

    def test_bound_variables_are_renamed_apart(self):
        f = parse("x = 1 & E x. x = 2")
        assert isinstance(f, And)
        inner = f.args[1]
        assert isinstance(inner, Exists) and inner.var != "x"
        assert free_vars(f) == {"x"}

    def test_size(self):
        assert size(parse("x = 0 | !(y >= 1)")) == 4

    @pytest.mark.parametrize("text", ["x +", "x = ", "E . x = 1", "x == 1 (mod 0)", "x = 1)", "x # 2"])
    def test_syntax_errors(self, text):
        with pytest.raises(FormulaSyntaxError) as info:
            parse(text)
        assert info.value.position >= 0


class TestPrinting:
    """Printed formulas read back to the same formula."""

    @pytest.mark.parametrize("text", [
        "A x. E y. (x = 2*y | x = 2*y + 1)",
        "E y. (x <= 3*y & !(x + y == 1 (mod 4)))",
        "true",
        "x - 2*y = 1 -> x >= -4",
    ])
    def test_examples(self, text):
        f = parse(text)
        assert parse(str(f)) == f

    @settings(max_examples=60, deadline=None)
    @given(open_formulas())
    def test_random_formulas(self, f):
        assert parse(str(f)) == f
