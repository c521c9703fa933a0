"""
Tests for witness automorphisms, their verification and the rigidity decision.
"""

from fractions import Fraction

import numpy as np
import pytest

from modules import profinite
from modules.demos import d_shift_spec, l_translate_spec, laurent_spec, non_archimedean_spec
from modules.realspan import GammaDescriptor, sqrt_rational
from modules.rigidity import (
    COUNTEREXAMPLE_GAMMA,
    FINITE_DIM,
    GH,
    NON_RIGID,
    RIGID,
    SUBFIELD,
    UNKNOWN,
    DShift,
    FGamma,
    LTranslate,
    adversarial_search,
    aut_from_gh,
    automorphism_from_json,
    build_f_gamma,
    d_shift_witness,
    decide_rigidity,
    doubling_witness,
    extract_gh,
    gamma_candidates,
    gamma_obstruction,
    identity,
    l_translate_witness,
    multiplier_condition_report,
    near_zero_elements,
    valuation_pairs,
    verify_automorphism,
)
from modules.zgroup import ORDERED, UNORDERED, LGenerator, ModelSpec, build_model
from utils.errors import GammaNotAdmissible, InvalidSpec, NotInvertible, PreconditionFailed
from utils.sparse import SparseVector

QUICK = dict(samples=30, trials=60, seed=3)


def _leibnizian(mode: str):
    u = profinite.from_prime_component(2, 1, 0)
    return build_model(ModelSpec(mode=mode, l_generators=(LGenerator("u", u, sqrt_rational(2)),)))


class TestWitnessForms:
    """Applying, inverting and serialising the four witness shapes."""

    def test_gh_inverse(self, exm_model, rng):
        f = aut_from_gh(exm_model, g={"d0": {"d0": 3}}, h={"u": {"d0": Fraction(1, 2)}})
        inverse = f.inverse(exm_model)
        for x in exm_model.random_elements(rng, 20):
            assert inverse.apply(exm_model, f.apply(exm_model, x)) == x

    def test_gh_fixes_integers(self, exm_model):
        f = aut_from_gh(exm_model, g=5, h={"u": {"d0": 1}})
        assert f.apply(exm_model, exm_model.from_int(7)) == exm_model.from_int(7)
        assert f.apply(exm_model, exm_model.gen("u")) == exm_model.elem({"d0": 1}, 0, {"u": 1})

    def test_singular_g(self, exm_model):
        with pytest.raises(NotInvertible):
            aut_from_gh(exm_model, g={"d0": {}})
        with pytest.raises(NotInvertible):
            aut_from_gh(exm_model, g=0)

    def test_unknown_generator(self, exm_model):
        with pytest.raises(InvalidSpec):
            aut_from_gh(exm_model, h={"w": {"d0": 1}})

    def test_laurent_shift(self, laurent_model):
        f = aut_from_gh(laurent_model, g=GammaDescriptor(2, 1))
        assert f.apply(laurent_model, laurent_model.d_unit("pi")) == laurent_model.d_unit("pi^2", 2)
        with pytest.raises(InvalidSpec):
            aut_from_gh(laurent_model, g={"1": {"1": 2}})

    def test_identity(self, exm_model):
        assert identity().is_identity()
        assert not doubling_witness(exm_model).is_identity()

    def test_d_shift_inverse(self):
        assert DShift(Fraction(2)).inverse(None) == DShift(Fraction(1, 2))
        with pytest.raises(PreconditionFailed):
            DShift(Fraction(-1))

    def test_f_pi_inverse(self, laurent_model, rng):
        forward = FGamma(GammaDescriptor(1, 1))
        backward = forward.inverse(laurent_model)
        assert backward == FGamma(GammaDescriptor(1, -1))
        for x in laurent_model.random_elements(rng, 20):
            assert backward.apply(laurent_model, forward.apply(laurent_model, x)) == x

    def test_f_pi_moves_u_into_d(self, laurent_model):
        u = laurent_model.gen("u")
        assert FGamma(GammaDescriptor(1, 1)).apply(laurent_model, u) == laurent_model.elem({"1": 1}, 0, {"u": 1})

    @pytest.mark.parametrize("make", [
        lambda m: aut_from_gh(m, g={"d0": {"d0": 3}}, h={"u": {"d0": "1/2"}}),
        lambda m: DShift(Fraction(3)),
        lambda m: LTranslate((("u", SparseVector({"d0": 1})),)),
        lambda m: FGamma(GammaDescriptor(Fraction(1, 2), -1)),
    ])
    def test_json_forms(self, exm_model, make):
        f = make(exm_model)
        assert automorphism_from_json(f.to_json()) == f

    def test_json_rejects_unknown_form(self):
        with pytest.raises(InvalidSpec):
            automorphism_from_json({"form": "rotation"})

    def test_extract_gh(self, exm_model):
        f = aut_from_gh(exm_model, g={"d0": {"d0": 3}}, h={"u": {"d0": 1}})
        g, h = extract_gh(exm_model, f)
        assert g == {"d0": SparseVector({"d0": 3})}
        assert h == {"u": SparseVector({"d0": 1})}

    def test_extract_gh_of_f_pi(self, laurent_model):
        g, h = extract_gh(laurent_model, FGamma(GammaDescriptor(1, 1)))
        assert g == GammaDescriptor(1, 1)
        assert h == {"u": SparseVector({"1": 1})}


class TestConstructions:
    """Preconditions of the structural witnesses and of f_gamma."""

    def test_d_shift_needs_l_below_level_one(self, exm_model):
        with pytest.raises(PreconditionFailed):
            d_shift_witness(exm_model)
        assert d_shift_witness(build_model(d_shift_spec())) == DShift(Fraction(2))

    def test_l_translate_needs_level_two_d(self, exm_model):
        with pytest.raises(PreconditionFailed):
            l_translate_witness(exm_model)
        witness = l_translate_witness(build_model(l_translate_spec()))
        assert witness.images == (("u", SparseVector({"d0": 1})),)

    def test_gamma_on_finite_span(self, exm_model):
        assert gamma_obstruction(exm_model, GammaDescriptor(2)) is not None
        with pytest.raises(GammaNotAdmissible):
            build_f_gamma(exm_model, GammaDescriptor(2))
        with pytest.raises(GammaNotAdmissible):
            build_f_gamma(exm_model, GammaDescriptor(-1))

    def test_gamma_on_laurent_span(self, laurent_model):
        assert gamma_obstruction(laurent_model, GammaDescriptor(1, 1)) is None
        assert gamma_obstruction(laurent_model, GammaDescriptor(2)) is not None

    def test_gamma_candidates(self):
        laurent = gamma_candidates(True, max_power=2, height=3)
        assert laurent[0] == GammaDescriptor(1, 1)
        # rationals come by height, smaller value first within a height
        assert laurent[1] == GammaDescriptor(Fraction(1, 2), 1)
        assert GammaDescriptor(1, -1) in laurent
        finite = gamma_candidates(False, height=3)
        assert all(g.pi_power == 0 and not g.is_one for g in finite)

    def test_multiplier_condition(self, exm_model, laurent_model):
        finite = multiplier_condition_report(exm_model)
        assert finite.branches == (FINITE_DIM, SUBFIELD)
        laurent = multiplier_condition_report(laurent_model)
        assert laurent.branch == COUNTEREXAMPLE_GAMMA
        assert laurent.gamma == GammaDescriptor(1, 1)
        assert laurent.candidates_checked == 1


class TestVerification:
    """Sample-based checks of candidate automorphisms."""

    def test_near_zero_elements(self, exm_model, unordered_model):
        near_zero = near_zero_elements(exm_model, count=6)
        assert near_zero
        signs = {exm_model.sign_elem(p) for p in near_zero}
        assert signs == {-1, 1}
        assert near_zero_elements(unordered_model) == []

    def test_doubling_breaks_the_order(self, exm_model):
        report = verify_automorphism(exm_model, doubling_witness(exm_model), **QUICK)
        assert not report.passed
        assert "order" in report.failed_checks()

    def test_doubling_in_unordered_group(self, unordered_model):
        report = verify_automorphism(unordered_model, doubling_witness(unordered_model), **QUICK)
        assert report.passed and report.non_identity
        frame = report.to_frame()
        assert frame.loc[frame["check"] == "order", "status"].item() == "skipped"

    def test_fail_fast(self, exm_model):
        report = verify_automorphism(exm_model, doubling_witness(exm_model), fail_fast=True, **QUICK)
        skipped = [c.name for c in report.checks if c.skipped]
        assert skipped == ["additivity", "residues", "inverse"]

    def test_identity_is_not_a_witness(self, exm_model):
        report = verify_automorphism(exm_model, identity(), **QUICK)
        assert report.passed
        assert not report.non_identity

    def test_f_pi(self, laurent_model):
        report = verify_automorphism(laurent_model, FGamma(GammaDescriptor(1, 1)), **QUICK)
        assert report.passed and report.non_identity
        assert report.to_json()["passed"] is True

    def test_valuation_pairs(self, laurent_model, rng):
        elements = laurent_model.random_elements(rng, 10)
        frame = valuation_pairs(laurent_model, FGamma(GammaDescriptor(1, 1)), elements)
        assert np.allclose(frame["nu1_fx"], np.pi * frame["nu1_x"])


class TestDecision:
    """Verdicts on the worked examples."""

    def test_finite_span_is_rigid(self, exm_model):
        verdict = decide_rigidity(exm_model, **QUICK)
        assert verdict.status == RIGID
        assert verdict.witness is None
        assert verdict.to_json()["multiplier_condition"]["branch"] == FINITE_DIM

    def test_laurent_is_not_rigid(self, laurent_model):
        verdict = decide_rigidity(laurent_model, **QUICK)
        assert verdict.status == NON_RIGID
        assert verdict.witness == FGamma(GammaDescriptor(1, 1))
        assert verdict.report.passed
        assert automorphism_from_json(verdict.to_json()) == verdict.witness

    def test_unordered_doubling(self, unordered_model):
        verdict = decide_rigidity(unordered_model, **QUICK)
        assert verdict.status == NON_RIGID
        assert isinstance(verdict.witness, GH)

    @pytest.mark.parametrize("mode", [ORDERED, UNORDERED])
    def test_leibnizian_is_rigid(self, mode):
        assert decide_rigidity(_leibnizian(mode), **QUICK).status == RIGID

    @pytest.mark.parametrize("make_spec, witness_type", [
        (d_shift_spec, DShift),
        (l_translate_spec, LTranslate),
        (non_archimedean_spec, LTranslate),
    ])
    def test_structural_witnesses(self, make_spec, witness_type):
        verdict = decide_rigidity(build_model(make_spec()), **QUICK)
        assert verdict.status == NON_RIGID
        assert isinstance(verdict.witness, witness_type)
        assert verdict.report.non_identity

    def test_no_small_gamma(self):
        verdict = decide_rigidity(build_model(laurent_spec(sqrt_rational(2))), **QUICK)
        assert verdict.status == UNKNOWN
        assert verdict.condition.branch == UNKNOWN

    def test_verdict_without_witness(self, exm_model):
        with pytest.raises(InvalidSpec):
            automorphism_from_json(decide_rigidity(exm_model, **QUICK).to_json())


class TestAdversarialSearch:
    """Random GH maps and small gammas against the verifier."""

    def test_rigid_model_admits_none(self, exm_model):
        result = adversarial_search(exm_model, candidates=60, seed=5, samples=10, trials=10)
        assert result.candidates == 60
        assert result.found_none
        assert result.to_json()["passing_non_identity"] == []

    def test_laurent_model_admits_f_pi(self, laurent_model):
        result = adversarial_search(laurent_model, candidates=20, seed=5, samples=10, trials=10)
        assert not result.found_none
        assert "f_gamma with gamma = pi" in result.passing["description"].tolist()
