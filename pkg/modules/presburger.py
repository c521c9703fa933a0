"""Module for Presburger quantifier elimination and evaluation

Quantifiers are removed innermost first with Cooper's method. Before the
general construction each existential is simplified: it distributes over
disjunctions, conjuncts free of the variable are pulled out, and an equality
c*x + s = 0 eliminates x directly as c | s together with the remaining
conjuncts scaled by |c|. The output is quantifier-free, in negation normal
form, and may contain congruences over several variables; `normalize`
expands those into single-variable congruences.
"""

import itertools
import logging
import math
from typing import Dict, List, Mapping

from app.config import DEFAULT_NODE_CAP, DNF_SPLIT_LIMIT
from modules.formulas import (
    And,
    Const,
    DivCong,
    Eq,
    Exists,
    FALSE,
    Forall,
    Formula,
    Leq,
    Not,
    Or,
    TRUE,
    Term,
    atom_term,
    atoms,
    canonical_atom,
    cong,
    conj,
    disj,
    eq,
    free_vars,
    geq,
    is_quantifier_free,
    map_atoms,
    rename_bound,
    size,
    substitute,
)
from utils.errors import CapacityExceeded, ModeError, UnboundVariable

logger = logging.getLogger(__name__)


def nnf(f: Formula, negated: bool = False) -> Formula:
    """Negation normal form over canonical atoms; only congruences stay under a negation"""
    if isinstance(f, Const):
        return Const(f.value != negated)
    if isinstance(f, (Leq, Eq, DivCong)):
        atom = canonical_atom(f)
        if isinstance(atom, Const) or not negated:
            return nnf(atom, negated) if isinstance(atom, Const) else atom
        t = atom_term(atom)
        if isinstance(atom, Leq):
            return geq(-t - Term.constant(1))
        if isinstance(atom, Eq):
            return disj([geq(t - Term.constant(1)), geq(-t - Term.constant(1))])
        return Not(atom)
    if isinstance(f, Not):
        return nnf(f.arg, not negated)
    if isinstance(f, (And, Or)):
        parts = [nnf(a, negated) for a in f.args]
        use_and = isinstance(f, And) != negated
        return conj(parts) if use_and else disj(parts)
    raise ValueError("nnf expects a quantifier-free formula")


def _check_cap(node_cap: int, estimate: int) -> None:
    if estimate > node_cap:
        raise CapacityExceeded(node_cap, estimate)


def _eliminate_by_equality(var: str, equality: Eq, conjuncts: List[Formula]) -> Formula:
    """exists x (c*x + s = 0 & phi)  ->  c | s & phi scaled by |c| with |c|*x := -sign(c)*s"""
    t = atom_term(equality)
    c = t.coef(var)
    k = abs(c)
    s = t.without(var)
    replacement = s.scale(-1 if c > 0 else 1)

    def transform(atom):
        at = atom_term(atom)
        e = at.coef(var)
        if not e:
            return atom
        new = at.without(var).scale(k) + replacement.scale(e)
        if isinstance(atom, Leq):
            return geq(new)
        if isinstance(atom, Eq):
            return eq(new)
        return cong(atom.modulus * k, new, 0)

    rest = [map_atoms(f, transform) for f in conjuncts if f is not equality]
    return conj([cong(k, s, 0)] + rest)


def _coefficient(atom, var: str) -> int:
    """Coefficient of var; congruences use the representative nearest 0"""
    c = atom_term(atom).coef(var)
    if isinstance(atom, DivCong) and 2 * c > atom.modulus:
        c -= atom.modulus
    return c


def _cooper(var: str, f: Formula, node_cap: int) -> Formula:
    """Cooper's construction for exists var. f, f in negation normal form"""
    coefs = [abs(_coefficient(a, var)) for a in atoms(f) if _coefficient(a, var)]
    scale = math.lcm(*coefs) if coefs else 1

    def unit_coefficient(atom):
        t = atom_term(atom)
        c = _coefficient(atom, var)
        if not c:
            return atom
        k = scale // abs(c)
        new = t.without(var).scale(k) + Term.var(var, 1 if c > 0 else -1)
        if isinstance(atom, Leq):
            return geq(new)
        if isinstance(atom, Eq):
            return conj([geq(new), geq(-new)])
        return cong(atom.modulus * k, new, 0)

    g = map_atoms(f, unit_coefficient)
    if scale > 1:
        g = conj([g, cong(scale, Term.var(var), 0)])

    lower: Dict[Term, None] = {}
    upper: Dict[Term, None] = {}
    delta = 1
    for atom in atoms(g):
        t = atom_term(atom)
        c = t.coef(var)
        if not c:
            continue
        if isinstance(atom, DivCong):
            delta = math.lcm(delta, atom.modulus)
        elif c > 0:
            lower[-t.without(var)] = None
        else:
            upper[t.without(var)] = None

    use_lower = len(lower) <= len(upper)
    bounds = list(lower if use_lower else upper)
    _check_cap(node_cap, delta * (len(bounds) + 1) * size(g))
    logger.debug(
        "eliminating %s: delta=%d, %d %s bounds, %d nodes",
        var, delta, len(bounds), "lower" if use_lower else "upper", size(g),
    )

    def at_infinity(atom):
        if isinstance(atom, Leq):
            c = atom_term(atom).coef(var)
            if c:
                return FALSE if (c > 0) == use_lower else TRUE
        return atom

    g_inf = map_atoms(g, at_infinity)
    disjuncts = []
    for j in range(delta):
        disjuncts.append(substitute(g_inf, var, Term.constant(j)))
        for b in bounds:
            candidate = b + Term.constant(j) if use_lower else b - Term.constant(j)
            disjuncts.append(substitute(g, var, candidate))
    return disj(disjuncts)


def _exists(var: str, f: Formula, node_cap: int) -> Formula:
    f = nnf(f)
    if var not in free_vars(f):
        return f
    if isinstance(f, Or):
        return disj(_exists(var, d, node_cap) for d in f.args)
    conjuncts = list(f.args) if isinstance(f, And) else [f]
    outside = [c for c in conjuncts if var not in free_vars(c)]
    inside = [c for c in conjuncts if var in free_vars(c)]

    splits = [c for c in inside if isinstance(c, Or)]
    if splits and math.prod(len(c.args) for c in splits) <= DNF_SPLIT_LIMIT:
        plain = [c for c in inside if not isinstance(c, Or)]
        branches = (conj(plain + list(combo)) for combo in itertools.product(*(c.args for c in splits)))
        return conj(outside + [disj(_exists(var, b, node_cap) for b in branches)])

    equalities = [c for c in inside if isinstance(c, Eq)]
    if equalities:
        pivot = min(equalities, key=lambda e: abs(atom_term(e).coef(var)))
        return conj(outside + [nnf(_eliminate_by_equality(var, pivot, inside))])

    return conj(outside + [_cooper(var, conj(inside), node_cap)])


def _eliminate(f: Formula, node_cap: int) -> Formula:
    if isinstance(f, Exists):
        return _exists(f.var, _eliminate(f.body, node_cap), node_cap)
    if isinstance(f, Forall):
        body = _eliminate(f.body, node_cap)
        return nnf(_exists(f.var, nnf(body, negated=True), node_cap), negated=True)
    if isinstance(f, Not):
        return nnf(_eliminate(f.arg, node_cap), negated=True)
    if isinstance(f, And):
        return conj(_eliminate(a, node_cap) for a in f.args)
    if isinstance(f, Or):
        return disj(_eliminate(a, node_cap) for a in f.args)
    return nnf(f)


def eliminate_quantifiers(f: Formula, node_cap: int = DEFAULT_NODE_CAP) -> Formula:
    """Equivalent quantifier-free formula; congruences may mention several variables"""
    result = _eliminate(rename_bound(f), node_cap)
    _check_cap(node_cap, size(result))
    logger.debug("quantifier elimination finished with %d nodes", size(result))
    return result


def _expand_congruence(atom: DivCong, node_cap: int) -> Formula:
    names = atom.term.variables()
    m = atom.modulus
    if len(names) == 1:
        c = atom.term.coeffs[0][1]
        return cong(m, Term.var(names[0]), atom.residue * pow(c, -1, m))
    # residues of x_i only matter modulo m / gcd(m, c_i)
    periods = [m // math.gcd(m, c) for _, c in atom.term.coeffs]
    _check_cap(node_cap, math.prod(periods) * len(names))
    branches = []
    for residues in itertools.product(*(range(p) for p in periods)):
        value = sum(c * r for (_, c), r in zip(atom.term.coeffs, residues))
        if (value - atom.residue) % m == 0:
            branches.append(
                conj(cong(p, Term.var(name), r) for name, p, r in zip(names, periods, residues))
            )
    return disj(branches)


def normalize(f: Formula, node_cap: int = DEFAULT_NODE_CAP) -> Formula:
    """Quantifier-free formula over inequalities S >= n and single-variable congruences"""
    if not is_quantifier_free(f):
        raise ValueError("normalize expects a quantifier-free formula")

    def normal_atom(atom):
        atom = canonical_atom(atom)
        if isinstance(atom, Eq):
            t = atom_term(atom)
            return conj([geq(t), geq(-t)])
        if isinstance(atom, DivCong):
            return _expand_congruence(atom, node_cap)
        return atom

    result = map_atoms(f, normal_atom)
    _check_cap(node_cap, size(result))
    return result


def is_normal_form(f: Formula) -> bool:
    if not is_quantifier_free(f):
        return False
    for atom in atoms(f):
        if isinstance(atom, Leq):
            continue
        if isinstance(atom, DivCong) and len(atom.term.coeffs) == 1 and atom.term.coeffs[0][1] == 1:
            continue
        return False
    return True


def eval_qf_int(f: Formula, sigma: Mapping[str, int]) -> bool:
    """Truth value over Z of a quantifier-free formula"""
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Leq):
        return f.lhs.evaluate(sigma) <= f.rhs.evaluate(sigma)
    if isinstance(f, Eq):
        return f.lhs.evaluate(sigma) == f.rhs.evaluate(sigma)
    if isinstance(f, DivCong):
        return (f.term.evaluate(sigma) - f.residue) % f.modulus == 0
    if isinstance(f, Not):
        return not eval_qf_int(f.arg, sigma)
    if isinstance(f, And):
        return all(eval_qf_int(a, sigma) for a in f.args)
    if isinstance(f, Or):
        return any(eval_qf_int(a, sigma) for a in f.args)
    raise ValueError("eval_qf_int got a quantified formula; use eval_bounded")


def eval_bounded(f: Formula, sigma: Mapping[str, int], bound: int) -> bool:
    """Brute-force truth value with quantifiers ranging over [-bound, bound]"""
    if isinstance(f, (Exists, Forall)):
        values = range(-bound, bound + 1)
        test = any if isinstance(f, Exists) else all
        return test(eval_bounded(f.body, {**sigma, f.var: v}, bound) for v in values)
    if isinstance(f, Not):
        return not eval_bounded(f.arg, sigma, bound)
    if isinstance(f, And):
        return all(eval_bounded(a, sigma, bound) for a in f.args)
    if isinstance(f, Or):
        return any(eval_bounded(a, sigma, bound) for a in f.args)
    return eval_qf_int(f, sigma)


def search_radius(var: str, body: Formula, sigma: Mapping[str, int], inner_bound: int) -> int:
    """Radius R: if some var satisfies body, one does with |var| <= R

    Variables of `body` outside sigma must range over [-inner_bound, inner_bound].
    Past the largest offset any var-atom can carry, every inequality and
    equality in var is constant, so the body is periodic in var with the lcm of
    its var-congruence moduli.
    """
    reach, period = 0, 1
    for atom in atoms(body):
        t = atom_term(atom)
        if not t.coef(var):
            continue
        if isinstance(atom, DivCong):
            period = math.lcm(period, atom.modulus)
            continue
        offset = abs(t.const)
        for name, c in t.coeffs:
            if name != var:
                offset += abs(c) * (abs(int(sigma[name])) if name in sigma else inner_bound)
        reach = max(reach, offset)
    return reach + period


def eval_outer_unbounded(f: Formula, sigma: Mapping[str, int], inner_bound: int) -> bool:
    """Exact truth value when the outermost quantifiers range over Z and the
    ones below them are guarded by |v| <= inner_bound"""
    if isinstance(f, (Exists, Forall)):
        radius = search_radius(f.var, f.body, sigma, inner_bound)
        test = any if isinstance(f, Exists) else all
        return test(
            eval_bounded(f.body, {**sigma, f.var: v}, inner_bound) for v in range(-radius, radius + 1)
        )
    if isinstance(f, Not):
        return not eval_outer_unbounded(f.arg, sigma, inner_bound)
    if isinstance(f, And):
        return all(eval_outer_unbounded(a, sigma, inner_bound) for a in f.args)
    if isinstance(f, Or):
        return any(eval_outer_unbounded(a, sigma, inner_bound) for a in f.args)
    return eval_qf_int(f, sigma)


def decide_sentence(f: Formula, node_cap: int = DEFAULT_NODE_CAP) -> bool:
    """Truth of a closed formula in <Z, +, <=> (hence in every Z-group)"""
    free = free_vars(f)
    if free:
        raise UnboundVariable(sorted(free)[0])
    return eval_qf_int(eliminate_quantifiers(f, node_cap), {})


def _model_value(term: Term, model, sigma: Mapping):
    total = model.from_int(term.const)
    for name, c in term.coeffs:
        if name not in sigma:
            raise UnboundVariable(name)
        total = model.add(total, model.int_scale(c, sigma[name]))
    return total


def eval_qf_model(f: Formula, model, sigma: Mapping) -> bool:
    """Truth value of a quantifier-free formula at model elements

    Congruences use the model's residue maps and inequalities its order, so
    an unordered model only evaluates equalities and congruences.
    """
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Leq):
        if not model.ordered:
            raise ModeError("inequalities need an ordered model")
        diff = _model_value(f.rhs - f.lhs, model, sigma)
        return model.compare(diff, model.zero()) >= 0
    if isinstance(f, Eq):
        return _model_value(f.lhs - f.rhs, model, sigma) == model.zero()
    if isinstance(f, DivCong):
        value = _model_value(f.term, model, sigma)
        return model.residue_elem(value, f.modulus) == f.residue % f.modulus
    if isinstance(f, Not):
        return not eval_qf_model(f.arg, model, sigma)
    if isinstance(f, And):
        return all(eval_qf_model(a, model, sigma) for a in f.args)
    if isinstance(f, Or):
        return any(eval_qf_model(a, model, sigma) for a in f.args)
    raise ValueError("eval_qf_model expects a quantifier-free formula")
