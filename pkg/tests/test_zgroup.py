"""
Unit tests for finitely described Z-groups.

Covers spec validation, certified elements, residues and division with
remainder, the lexicographic order, and separation by one-variable formulas.
"""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from modules import profinite
from modules.demos import exm_spec
from modules.formulas import parse
from modules.presburger import eval_qf_model
from modules.realspan import LAURENT, SpanElement, pi_power, rational, sqrt_rational
from modules.zgroup import (
    ORDERED,
    Congruence,
    DDimension,
    LGenerator,
    Model,
    ModelSpec,
    PointFormula,
    SameType,
    build_model,
    laurent_exponent,
    spec_from_json,
)
from tests.strategies import seeds
from utils.errors import (
    EqualElements,
    GeneratorInZ,
    IndependenceViolation,
    InvalidSpec,
    ModeError,
    NotInGroup,
    OutsideSpan,
    SeparationFailed,
    ZGroupError,
)
from utils.sparse import SparseVector

ZERO = SpanElement()


@pytest.fixture
def u() -> profinite.ProfiniteElement:
    return profinite.from_prime_component(2, 1, 0)


class TestSpecValidation:
    """build_model rejects malformed specs."""

    def test_json_round_trip(self):
        assert spec_from_json(exm_spec().to_json()) == exm_spec()

    def test_missing_key(self):
        with pytest.raises(InvalidSpec):
            spec_from_json({"l_generators": [{"name": "u", "nu1": "sqrt(2)"}]})

    def test_generator_in_z(self):
        spec = ModelSpec(l_generators=(LGenerator("u", profinite.from_integer(3), sqrt_rational(2)),))
        with pytest.raises(GeneratorInZ):
            build_model(spec)

    def test_dependent_generators(self, u):
        spec = ModelSpec(l_generators=(
            LGenerator("u", u, sqrt_rational(2)),
            LGenerator("v", u * 2, sqrt_rational(3)),
        ))
        with pytest.raises(InvalidSpec):
            build_model(spec)

    def test_duplicate_names(self, u):
        spec = ModelSpec(
            d_basis=(DDimension("u", rational(1)),),
            l_generators=(LGenerator("u", u, sqrt_rational(2)),),
        )
        with pytest.raises(InvalidSpec):
            build_model(spec)

    def test_both_levels_zero(self, u):
        spec = ModelSpec(
            d_basis=(DDimension("d0", ZERO, ZERO),),
            l_generators=(LGenerator("u", u, sqrt_rational(2)),),
        )
        with pytest.raises(InvalidSpec):
            build_model(spec)

    def test_dependent_level_values(self, u):
        spec = ModelSpec(
            d_basis=(DDimension("d0", rational(1)),),
            l_generators=(LGenerator("u", u, rational(2)),),
        )
        with pytest.raises(IndependenceViolation):
            build_model(spec)

    def test_laurent_takes_no_d_basis(self, u):
        spec = ModelSpec(
            span_structure=LAURENT,
            d_basis=(DDimension("d0", rational(1)),),
            l_generators=(LGenerator("u", u, sqrt_rational(2)),),
        )
        with pytest.raises(InvalidSpec):
            build_model(spec)

    def test_unknown_mode(self):
        with pytest.raises(InvalidSpec):
            build_model(ModelSpec(mode="partial"))

    def test_level_two_values_are_promoted(self, u):
        spec = ModelSpec(
            d_basis=(DDimension("d0", ZERO, rational(1)),),
            l_generators=(LGenerator("u", u, ZERO, sqrt_rational(2)),),
        )
        model = build_model(spec)
        assert model.d_level_value("d0", 1) == rational(1)
        assert model.level2_dims() == []

    def test_leibnizian(self, u):
        model = build_model(ModelSpec(mode=ORDERED, l_generators=(LGenerator("u", u, sqrt_rational(2)),)))
        assert model.is_leibnizian()
        assert model.describe()["leibnizian"] is True


class TestElements:
    """Certified elements and their arithmetic."""

    def test_purity_certificate(self, exm_model):
        half = exm_model.elem({}, -1, {"u": 1}, 2)
        assert half.scale(2) == exm_model.gen("u") - exm_model.one()
        with pytest.raises(NotInGroup):
            exm_model.elem({}, 0, {"u": 1}, 2)
        with pytest.raises(NotInGroup):
            exm_model.elem({}, 1, None, 0)

    def test_unknown_names(self, exm_model):
        with pytest.raises(InvalidSpec):
            exm_model.elem({"d9": 1})
        with pytest.raises(InvalidSpec):
            exm_model.elem({}, 0, {"w": 1})

    def test_residues(self, exm_model):
        u = exm_model.gen("u")
        assert exm_model.residue_elem(u, 6) == 3
        assert exm_model.residue_elem(exm_model.d_unit("d0", Fraction(1, 3)), 7) == 0
        assert exm_model.residue_elem(exm_model.from_int(-1), 5) == 4

    def test_division_with_remainder(self, exm_model):
        u = exm_model.gen("u")
        k, y = exm_model.divide_by_p_with_remainder(u, 2)
        assert k == 1
        assert y.scale(2) + exm_model.from_int(1) == u

    def test_decompose(self, exm_model):
        x = exm_model.elem({"d0": Fraction(1, 2)}, -1, {"u": 1}, 2)
        d, l = exm_model.decompose(x)
        assert d + l == x
        assert d.is_pure_d() and l.d.is_zero()

    def test_json_round_trip(self, exm_model, rng):
        for x in exm_model.random_elements(rng, 20):
            assert exm_model.element_from_json(exm_model.element_to_json(x)) == x

    def test_standard_integers(self, exm_model):
        assert exm_model.from_int(5).integer_value() == 5
        with pytest.raises(ValueError):
            exm_model.gen("u").integer_value()

    def test_text(self, exm_model):
        x = exm_model.elem({"d0": 2}, -1, {"u": 1}, 2)
        assert exm_model.element_text(x) == "2*d0 + (-1 + 1*u)/2"

    @settings(max_examples=25, deadline=None)
    @given(seeds)
    def test_division_by_primes(self, exm_model, seed):
        x = exm_model.random_element(np.random.default_rng(seed))
        for p in (2, 3, 5):
            k, y = exm_model.divide_by_p_with_remainder(x, p)
            assert 0 <= k < p
            assert y.scale(p) + exm_model.from_int(k) == x
            assert exm_model.residue_elem(x, p) == k


class TestOrder:
    """Lexicographic order through nu1, nu2 and the integer part."""

    def test_valuations(self, exm_model):
        x = exm_model.elem({"d0": 3}, 0, {"u": 2})
        assert exm_model.nu(x, 1) == rational(3) + sqrt_rational(2).scale(2)
        assert exm_model.nu(x, 2).is_zero()

    def test_infinite_elements(self, exm_model):
        d0, u = exm_model.d_unit("d0"), exm_model.gen("u")
        assert exm_model.compare(d0, exm_model.from_int(10**6)) == 1
        assert exm_model.compare(u, d0) == 1
        assert exm_model.compare(u.scale(5), d0.scale(7)) == 1
        assert exm_model.compare(u.scale(7), d0.scale(10)) == -1

    def test_integers(self, exm_model):
        assert exm_model.compare(exm_model.from_int(2), exm_model.from_int(3)) == -1
        assert exm_model.sign_elem(exm_model.zero()) == 0

    def test_unordered_model(self, unordered_model):
        with pytest.raises(ModeError):
            unordered_model.compare(unordered_model.one(), unordered_model.zero())
        with pytest.raises(ModeError):
            unordered_model.nu(unordered_model.one())

    @settings(max_examples=25, deadline=None)
    @given(seeds)
    def test_ordered_group_axioms(self, exm_model, seed):
        x, y, z = exm_model.random_elements(np.random.default_rng(seed), 3)
        c = exm_model.compare(x, y)
        assert c == -exm_model.compare(y, x)
        assert (c == 0) == (x == y)
        assert exm_model.compare(x + z, y + z) == c
        assert not (exm_model.sign_elem(x) > 0 and exm_model.compare(x, exm_model.one()) < 0)

    @settings(max_examples=15, deadline=None)
    @given(seeds)
    def test_laurent_axioms(self, laurent_model, seed):
        x, y = laurent_model.random_elements(np.random.default_rng(seed), 2)
        assert laurent_model.compare(x, y) == -laurent_model.compare(y, x)
        assert laurent_model.compare(x.scale(3), x.scale(2)) == laurent_model.sign_elem(x)


class TestLaurent:
    """D spanned by the powers of pi."""

    def test_dimension_names(self, laurent_model):
        assert laurent_model.dim_key("pi^1") == "pi"
        assert laurent_model.dim_key("1") == "1"
        assert laurent_exponent("pi^-2") == -2
        with pytest.raises(InvalidSpec):
            laurent_exponent("sqrt(2)")

    def test_level_one_value(self, laurent_model):
        x = laurent_model.elem({"pi": 2, "1": -1})
        assert laurent_model.nu(x, 1) == pi_power(1).scale(2) - rational(1)

    def test_preimage(self, laurent_model):
        w = pi_power(1) + rational(2)
        assert laurent_model.nu1_preimage(w) == SparseVector({"pi": 1, "1": 2})
        with pytest.raises(OutsideSpan):
            laurent_model.nu1_preimage(sqrt_rational(2))

    def test_finite_preimage(self, exm_model):
        assert exm_model.nu1_preimage(rational(3)) == SparseVector({"d0": 3})
        assert not exm_model.in_d_values(sqrt_rational(2))


class TestSeparation:
    """One-variable formulas true at x and false at y."""

    def _check(self, model, x, y):
        witness = model.separate(x, y)
        f = witness.formula("v")
        assert eval_qf_model(f, model, {"v": x})
        assert not eval_qf_model(f, model, {"v": y})
        return witness

    def test_standard_integer(self, exm_model):
        witness = self._check(exm_model, exm_model.from_int(3), exm_model.from_int(4))
        assert witness == PointFormula(3, 3)

    def test_congruence(self, exm_model):
        witness = self._check(exm_model, exm_model.gen("u"), exm_model.one())
        assert witness == Congruence(3, 0)

    def test_sign(self, exm_model):
        d0 = exm_model.d_unit("d0")
        assert isinstance(self._check(exm_model, d0, -d0), PointFormula)

    def test_same_type(self, exm_model):
        d0 = exm_model.d_unit("d0")
        assert isinstance(exm_model.separate(d0, d0.scale(2)), SameType)
        f = parse("v >= 3 & v == 1 (mod 4)")
        assert eval_qf_model(f, exm_model, {"v": d0}) == eval_qf_model(f, exm_model, {"v": d0.scale(2)})

    def test_equal_elements(self, exm_model):
        with pytest.raises(EqualElements):
            exm_model.separate(exm_model.one(), exm_model.one())

    def test_exhausted_modulus_search(self, exm_model, monkeypatch):
        monkeypatch.setattr(Model, "_witness_modulus", lambda self, x, y: 1)
        with pytest.raises(SeparationFailed) as info:
            exm_model.separate(exm_model.gen("u"), exm_model.one())
        assert isinstance(info.value, ZGroupError)

    def test_unordered_inequalities(self, unordered_model):
        with pytest.raises(ModeError):
            eval_qf_model(parse("v >= 0"), unordered_model, {"v": unordered_model.one()})

    def test_random_pairs(self, exm_model, rng):
        xs = exm_model.random_elements(rng, 30)
        for x, y in zip(xs, xs[1:]):
            if x == y:
                continue
            witness = exm_model.separate(x, y)
            if not isinstance(witness, SameType):
                self._check(exm_model, x, y)


class TestReporting:
    def test_valuation_table(self, exm_model):
        table = exm_model.valuation_table()
        assert list(table["entry"]) == ["d0", "u"]
        assert table.loc[table["entry"] == "u", "nu1"].item() == "sqrt(2)"
