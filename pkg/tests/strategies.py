"""Hypothesis strategies for profinite integers, model elements and formulas"""

from fractions import Fraction

import numpy as np
from hypothesis import strategies as st

from modules import profinite
from utils.formula_gen import random_formula

PRIMES = (2, 3, 5, 7, 11)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
small_ints = st.integers(min_value=-50, max_value=50)


@st.composite
def profinite_elements(draw, primes=PRIMES):
    """Elements with a few explicit p-adic coordinates and an integral default"""
    chosen = draw(st.lists(st.sampled_from(primes), unique=True, max_size=3))
    coords = {}
    for p in chosen:
        num = draw(st.integers(min_value=-30, max_value=30))
        den = draw(st.integers(min_value=1, max_value=12).filter(lambda d, p=p: d % p != 0))
        coords[p] = Fraction(num, den)
    default = draw(small_ints)
    return profinite.from_components(coords, default)


def model_elements(model, count: int = 1):
    """Certified random elements of `model`, driven by a drawn seed"""
    return seeds.map(lambda seed: model.random_elements(np.random.default_rng(seed), count))


def open_formulas(free=("x",), max_bound=2, unbounded_outer=False):
    """Random open formulas; guarded ones are decided exactly by `eval_bounded`,
    unbounded ones by `eval_outer_unbounded`"""
    return seeds.map(
        lambda seed: random_formula(
            np.random.default_rng(seed), free, max_bound, unbounded_outer=unbounded_outer
        )
    )
