"""Seeded random Presburger formulas for soundness runs

Bound variables carry an explicit guard -R <= y <= R, so bounded brute-force
evaluation with bound R is exact for the generated formulas. With
`unbounded_outer` the outermost quantifier ranges over all of Z; those
formulas are checked with `presburger.eval_outer_unbounded`.
"""

from typing import List, Sequence

import numpy as np

from app.config import FORMULA_GUARD
from modules.formulas import (
    DivCong,
    Exists,
    Forall,
    Formula,
    Term,
    cong,
    conj,
    disj,
    eq,
    geq,
    implies,
    negate,
)

FREE_COEFF = 5
BOUND_COEFF = 3
CONSTANT_RANGE = 10
MODULI = (2, 3, 4, 5, 6)


def _coefficient(rng: np.random.Generator, bound: bool) -> int:
    limit = BOUND_COEFF if bound else FREE_COEFF
    while True:
        c = int(rng.integers(-limit, limit, endpoint=True))
        if c:
            return c


def random_atom(
    rng: np.random.Generator,
    free: Sequence[str],
    bound: Sequence[str],
    allow_congruence: bool = True,
) -> Formula:
    """One linear atom over one or two of the given variables"""
    names = list(free) + list(bound)
    count = min(len(names), int(rng.integers(1, 2, endpoint=True)))
    chosen = rng.choice(len(names), size=count, replace=False)
    term = Term.constant(int(rng.integers(-CONSTANT_RANGE, CONSTANT_RANGE, endpoint=True)))
    for index in chosen:
        name = names[int(index)]
        term = term + Term.var(name, _coefficient(rng, name in bound))
    roll = rng.random()
    if allow_congruence and roll < 0.3:
        modulus = int(rng.choice(MODULI))
        return cong(modulus, term, int(rng.integers(0, modulus)))
    if roll < 0.5:
        return eq(term)
    return geq(term)


def random_body(rng: np.random.Generator, free: Sequence[str], bound: Sequence[str]) -> Formula:
    """Boolean combination of two or three atoms, at most one congruence"""
    count = int(rng.integers(2, 3, endpoint=True))
    parts: List[Formula] = []
    congruences = 0
    for _ in range(count):
        atom = random_atom(rng, free, bound, allow_congruence=congruences == 0)
        congruences += isinstance(atom, DivCong)
        if rng.random() < 0.2:
            atom = negate(atom)
        parts.append(atom)
    body = parts[0]
    for part in parts[1:]:
        body = conj([body, part]) if rng.random() < 0.5 else disj([body, part])
    return body


def guarded(quantifier: str, name: str, body: Formula, guard: int = FORMULA_GUARD) -> Formula:
    """E y. (-R <= y <= R & body)  or  A y. (-R <= y <= R -> body)"""
    var = Term.var(name)
    window = conj([geq(var + Term.constant(guard)), geq(Term.constant(guard) - var)])
    if quantifier == "E":
        return Exists(name, conj([window, body]))
    return Forall(name, implies(window, body))


def random_formula(
    rng: np.random.Generator,
    free: Sequence[str] = ("x",),
    max_bound: int = 2,
    guard: int = FORMULA_GUARD,
    unbounded_outer: bool = False,
) -> Formula:
    """Open formula with a block of up to `max_bound` quantifiers of one kind

    With `unbounded_outer` there is at least one quantifier and the outermost
    one carries no guard.
    """
    low = 1 if unbounded_outer else 0
    bound = ["y", "z"][: int(rng.integers(low, max(low, max_bound), endpoint=True))]
    body = random_body(rng, free, bound)
    quantifier = "E" if rng.random() < 0.5 else "A"
    guarded_names = bound[1:] if unbounded_outer else bound
    for name in reversed(guarded_names):
        body = guarded(quantifier, name, body, guard)
    if unbounded_outer:
        body = Exists(bound[0], body) if quantifier == "E" else Forall(bound[0], body)
    return body


def random_sentence(rng: np.random.Generator, guard: int = FORMULA_GUARD) -> Formula:
    """Closed formula with one quantifier alternation over guarded variables"""
    body = random_body(rng, ["x"], ["y"])
    outer, inner = ("A", "E") if rng.random() < 0.5 else ("E", "A")
    return guarded(outer, "x", guarded(inner, "y", body, guard), guard)
