"""Module for Presburger formula syntax

Terms are integer linear combinations of variables. Atoms come in canonical
form through `geq`, `eq` and `cong`:

    Leq(n, S)        S >= n   (S has no constant, coefficients coprime)
    Eq(S, n)         S = n
    DivCong(m, S, r) S == r (mod m), 0 <= r < m, coefficients reduced mod m

Constant atoms collapse to TRUE / FALSE. The parser accepts the grammar

    formula := formula "->" formula | formula "|" formula | formula "&" formula
             | "!" formula | ("A" | "E") var ("," var)* "." formula
             | "(" formula ")" | "true" | "false" | atom
    atom    := term ("=" | "<=" | ">=" | "<" | ">" | "!=") term
             | term "==" integer "(mod" integer ")"
    term    := ["-"] summand (("+" | "-") summand)*
    summand := integer | var | integer ["*"] var
"""

import math
import re
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Set, Tuple, Union

from utils.errors import FormulaSyntaxError, UnboundVariable


@dataclass(frozen=True)
class Term:
    """sum(coef * var) + const; `coeffs` is sorted with no zero entries"""

    coeffs: Tuple[Tuple[str, int], ...] = ()
    const: int = 0

    @classmethod
    def build(cls, pairs: Union[Mapping[str, int], Iterable[Tuple[str, int]]] = (), const: int = 0) -> "Term":
        acc: Dict[str, int] = {}
        items = pairs.items() if isinstance(pairs, Mapping) else pairs
        for name, coef in items:
            acc[name] = acc.get(name, 0) + int(coef)
        return cls(tuple(sorted((n, c) for n, c in acc.items() if c)), int(const))

    @classmethod
    def var(cls, name: str, coef: int = 1) -> "Term":
        return cls.build([(name, coef)])

    @classmethod
    def constant(cls, n: int) -> "Term":
        return cls((), int(n))

    def coef(self, name: str) -> int:
        for n, c in self.coeffs:
            if n == name:
                return c
        return 0

    def variables(self) -> Tuple[str, ...]:
        return tuple(n for n, _ in self.coeffs)

    @property
    def is_constant(self) -> bool:
        return not self.coeffs

    def linear_part(self) -> "Term":
        return Term(self.coeffs, 0)

    def content(self) -> int:
        """gcd of the variable coefficients (0 for a constant)"""
        g = 0
        for _, c in self.coeffs:
            g = math.gcd(g, c)
        return g

    def __add__(self, other: "Term") -> "Term":
        return Term.build(self.coeffs + other.coeffs, self.const + other.const)

    def __neg__(self) -> "Term":
        return Term(tuple((n, -c) for n, c in self.coeffs), -self.const)

    def __sub__(self, other: "Term") -> "Term":
        return self + (-other)

    def scale(self, k: int) -> "Term":
        if k == 0:
            return Term()
        return Term(tuple((n, c * k) for n, c in self.coeffs), self.const * k)

    def without(self, name: str) -> "Term":
        return Term(tuple((n, c) for n, c in self.coeffs if n != name), self.const)

    def substitute(self, name: str, value: "Term") -> "Term":
        c = self.coef(name)
        if not c:
            return self
        return self.without(name) + value.scale(c)

    def rename(self, old: str, new: str) -> "Term":
        return Term.build(((new if n == old else n), c) for n, c in self.coeffs) + Term.constant(self.const)

    def evaluate(self, sigma: Mapping[str, int]) -> int:
        total = self.const
        for name, c in self.coeffs:
            if name not in sigma:
                raise UnboundVariable(name)
            total += c * int(sigma[name])
        return total

    def __str__(self) -> str:
        parts: List[str] = []
        for name, c in self.coeffs:
            mag = abs(c)
            body = name if mag == 1 else f"{mag}*{name}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        if self.const or not parts:
            if not parts:
                parts.append(str(self.const))
            else:
                parts.append(f"+ {self.const}" if self.const > 0 else f"- {-self.const}")
        return " ".join(parts)


class Formula:
    """Base class of formula nodes"""

    def __and__(self, other: "Formula") -> "Formula":
        return conj([self, other])

    def __or__(self, other: "Formula") -> "Formula":
        return disj([self, other])

    def __invert__(self) -> "Formula":
        return negate(self)

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True, eq=True)
class Const(Formula):
    value: bool


@dataclass(frozen=True)
class Leq(Formula):
    """lhs <= rhs"""

    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Eq(Formula):
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class DivCong(Formula):
    """term == residue (mod modulus)"""

    modulus: int
    term: Term
    residue: int


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    args: Tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    args: Tuple[Formula, ...]


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


TRUE = Const(True)
FALSE = Const(False)

Atom = Union[Leq, Eq, DivCong]
ATOM_TYPES = (Leq, Eq, DivCong)


# Canonical constructors

def geq(t: Term) -> Formula:
    """t >= 0, tightened by the coefficient gcd"""
    if t.is_constant:
        return TRUE if t.const >= 0 else FALSE
    g = t.content()
    linear = Term(tuple((n, c // g) for n, c in t.coeffs))
    bound = -((t.const) // g)  # ceil(-const / g)
    return Leq(Term.constant(bound), linear)


def eq(t: Term) -> Formula:
    """t = 0"""
    if t.is_constant:
        return TRUE if t.const == 0 else FALSE
    g = t.content()
    if t.const % g:
        return FALSE
    if t.coeffs[0][1] < 0:
        g = -g
    linear = Term(tuple((n, c // g) for n, c in t.coeffs))
    return Eq(linear, Term.constant(-t.const // g))


def cong(modulus: int, t: Term, residue: int = 0) -> Formula:
    """t == residue (mod modulus); negative moduli and out-of-range residues are normalised"""
    m = abs(int(modulus))
    if m == 0:
        raise ValueError("congruence modulus must be nonzero")
    if m == 1:
        return TRUE
    r = (int(residue) - t.const) % m
    reduced = Term.build((n, c % m) for n, c in t.coeffs)
    if reduced.is_constant:
        return TRUE if r == 0 else FALSE
    g = math.gcd(m, reduced.content())
    if r % g:
        return FALSE
    m, r = m // g, r // g
    if m == 1:
        return TRUE
    return DivCong(m, Term(tuple((n, c // g) for n, c in reduced.coeffs)), r)


def leq(lhs: Term, rhs: Term) -> Formula:
    return geq(rhs - lhs)


def equals(lhs: Term, rhs: Term) -> Formula:
    return eq(lhs - rhs)


def canonical_atom(atom: Formula) -> Formula:
    if isinstance(atom, Leq):
        return geq(atom.rhs - atom.lhs)
    if isinstance(atom, Eq):
        return eq(atom.lhs - atom.rhs)
    if isinstance(atom, DivCong):
        return cong(atom.modulus, atom.term, atom.residue)
    return atom


def atom_term(atom: Atom) -> Term:
    """The term compared against 0: t >= 0, t = 0, or t == 0 (mod m)"""
    if isinstance(atom, Leq):
        return atom.rhs - atom.lhs
    if isinstance(atom, Eq):
        return atom.lhs - atom.rhs
    return atom.term - Term.constant(atom.residue)


def rebuild_atom(atom: Atom, t: Term) -> Formula:
    """Atom of the same kind over the new term (t >= 0, t = 0, t == 0 mod m)"""
    if isinstance(atom, Leq):
        return geq(t)
    if isinstance(atom, Eq):
        return eq(t)
    return cong(atom.modulus, t, 0)


# Boolean constructors

def _dedupe(items: Iterable[Formula]) -> List[Formula]:
    seen: Set[Formula] = set()
    out = []
    for item in items:
        if item not in seen:
            seen.add(item)
            out.append(item)
    return out


def conj(items: Iterable[Formula]) -> Formula:
    flat: List[Formula] = []
    for item in items:
        if item == FALSE:
            return FALSE
        if item == TRUE:
            continue
        flat.extend(item.args if isinstance(item, And) else [item])
    flat = _dedupe(flat)
    present = set(flat)
    if any(isinstance(f, Not) and f.arg in present for f in flat):
        return FALSE
    if not flat:
        return TRUE
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(items: Iterable[Formula]) -> Formula:
    flat: List[Formula] = []
    for item in items:
        if item == TRUE:
            return TRUE
        if item == FALSE:
            continue
        flat.extend(item.args if isinstance(item, Or) else [item])
    flat = _dedupe(flat)
    present = set(flat)
    if any(isinstance(f, Not) and f.arg in present for f in flat):
        return TRUE
    if not flat:
        return FALSE
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def negate(f: Formula) -> Formula:
    if isinstance(f, Const):
        return Const(not f.value)
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def implies(a: Formula, b: Formula) -> Formula:
    return disj([negate(a), b])


# Traversals

def free_vars(f: Formula) -> Set[str]:
    if isinstance(f, ATOM_TYPES):
        return set(atom_term(f).variables())
    if isinstance(f, Const):
        return set()
    if isinstance(f, Not):
        return free_vars(f.arg)
    if isinstance(f, (And, Or)):
        out: Set[str] = set()
        for arg in f.args:
            out |= free_vars(arg)
        return out
    return free_vars(f.body) - {f.var}


def all_vars(f: Formula) -> Set[str]:
    if isinstance(f, (Exists, Forall)):
        return all_vars(f.body) | {f.var}
    if isinstance(f, Not):
        return all_vars(f.arg)
    if isinstance(f, (And, Or)):
        out: Set[str] = set()
        for arg in f.args:
            out |= all_vars(arg)
        return out
    return free_vars(f)


def size(f: Formula) -> int:
    """Number of AST nodes"""
    if isinstance(f, Not):
        return 1 + size(f.arg)
    if isinstance(f, (And, Or)):
        return 1 + sum(size(a) for a in f.args)
    if isinstance(f, (Exists, Forall)):
        return 1 + size(f.body)
    return 1


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, (Exists, Forall)):
        return False
    if isinstance(f, Not):
        return is_quantifier_free(f.arg)
    if isinstance(f, (And, Or)):
        return all(is_quantifier_free(a) for a in f.args)
    return True


def atoms(f: Formula) -> Iterator[Atom]:
    if isinstance(f, ATOM_TYPES):
        yield f
    elif isinstance(f, Not):
        yield from atoms(f.arg)
    elif isinstance(f, (And, Or)):
        for arg in f.args:
            yield from atoms(arg)
    elif isinstance(f, (Exists, Forall)):
        yield from atoms(f.body)


def map_atoms(f: Formula, fn: Callable[[Atom], Formula]) -> Formula:
    """Rebuild a quantifier-free formula, replacing every atom by fn(atom)"""
    if isinstance(f, ATOM_TYPES):
        return fn(f)
    if isinstance(f, Const):
        return f
    if isinstance(f, Not):
        return negate(map_atoms(f.arg, fn))
    if isinstance(f, And):
        return conj(map_atoms(a, fn) for a in f.args)
    if isinstance(f, Or):
        return disj(map_atoms(a, fn) for a in f.args)
    raise ValueError("map_atoms expects a quantifier-free formula")


def substitute(f: Formula, name: str, value: Term) -> Formula:
    """Replace a free variable by a term in a quantifier-free formula"""
    return map_atoms(f, lambda a: rebuild_atom(a, atom_term(a).substitute(name, value)))


def rename_var(f: Formula, old: str, new: str) -> Formula:
    """Rename free occurrences of a variable"""
    if isinstance(f, ATOM_TYPES):
        if isinstance(f, DivCong):
            return DivCong(f.modulus, f.term.rename(old, new), f.residue)
        return type(f)(f.lhs.rename(old, new), f.rhs.rename(old, new))
    if isinstance(f, Const):
        return f
    if isinstance(f, Not):
        return Not(rename_var(f.arg, old, new))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(rename_var(a, old, new) for a in f.args))
    if f.var == old:
        return f
    return type(f)(f.var, rename_var(f.body, old, new))


def _fresh(base: str, used: Set[str]) -> str:
    stem = base.split("_")[0] or "v"
    i = 1
    while f"{stem}_{i}" in used:
        i += 1
    return f"{stem}_{i}"


def rename_bound(f: Formula, used: Optional[Set[str]] = None) -> Formula:
    """Rename bound variables so none is bound twice or shadows a free variable"""
    if used is None:
        used = set(free_vars(f))
    if isinstance(f, (Exists, Forall)):
        var, body = f.var, f.body
        if var in used:
            new = _fresh(var, used | all_vars(body))
            body = rename_var(body, var, new)
            var = new
        used.add(var)
        return type(f)(var, rename_bound(body, used))
    if isinstance(f, Not):
        return Not(rename_bound(f.arg, used))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(rename_bound(a, used) for a in f.args))
    return f


# Printing

def _format_atom(atom: Atom) -> str:
    if isinstance(atom, Leq):
        if atom.lhs.is_constant and atom.rhs.const == 0:
            return f"{atom.rhs} >= {atom.lhs.const}"
        return f"{atom.lhs} <= {atom.rhs}"
    if isinstance(atom, Eq):
        return f"{atom.lhs} = {atom.rhs}"
    return f"{atom.term} == {atom.residue} (mod {atom.modulus})"


def format_formula(f: Formula, parent: int = 0) -> str:
    """Render in the parser's grammar; precedence levels: -> 1, | 2, & 3, ! 4"""
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, ATOM_TYPES):
        return _format_atom(f)
    if isinstance(f, Not):
        inner = format_formula(f.arg, 4)
        return f"!{inner}" if isinstance(f.arg, (Const, Not)) else f"!({format_formula(f.arg)})"
    if isinstance(f, (And, Or)):
        level = 3 if isinstance(f, And) else 2
        sep = " & " if isinstance(f, And) else " | "
        text = sep.join(format_formula(a, level) for a in f.args)
        return f"({text})" if parent >= level else text
    letter = "E" if isinstance(f, Exists) else "A"
    text = f"{letter} {f.var}. {format_formula(f.body, 0)}"
    return f"({text})" if parent > 0 else text


# Parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)|"
    r"(?P<op>->|<=|>=|==|!=|[=<>!&|().,+\-*]))"
)
_KEYWORDS = {"A", "E", "true", "false", "mod"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        match = _TOKEN.match(text, pos)
        if not match:
            raise FormulaSyntaxError(pos, "a token", text[pos])
        kind = match.lastgroup
        start = match.start(kind)
        tokens.append(Token(kind, match.group(kind), start))
        pos = match.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.index + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.current
        self.index += 1
        return token

    def accept(self, text: str) -> bool:
        if self.current.text == text and self.current.kind != "eof":
            self.index += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if self.current.text != text or self.current.kind == "eof":
            raise FormulaSyntaxError(self.current.position, repr(text), self.current.text or "end of input")
        return self.advance()

    def expect_int(self) -> int:
        sign = -1 if self.accept("-") else 1
        if self.current.kind != "int":
            raise FormulaSyntaxError(self.current.position, "an integer", self.current.text or "end of input")
        return sign * int(self.advance().text)

    def parse(self) -> Formula:
        formula = self.implication()
        if self.current.kind != "eof":
            raise FormulaSyntaxError(self.current.position, "end of input", self.current.text)
        return formula

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.accept("->"):
            return implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        parts = [self.conjunction()]
        while self.accept("|"):
            parts.append(self.conjunction())
        return disj(parts) if len(parts) > 1 else parts[0]

    def conjunction(self) -> Formula:
        parts = [self.unary()]
        while self.accept("&"):
            parts.append(self.unary())
        return conj(parts) if len(parts) > 1 else parts[0]

    def unary(self) -> Formula:
        token = self.current
        if self.accept("!"):
            return negate(self.unary())
        if token.kind == "ident" and token.text in ("A", "E"):
            self.advance()
            names = [self.variable()]
            while self.accept(","):
                names.append(self.variable())
            self.expect(".")
            body = self.implication()
            node = Forall if token.text == "A" else Exists
            for name in reversed(names):
                body = node(name, body)
            return body
        return self.primary()

    def variable(self) -> str:
        token = self.current
        if token.kind != "ident" or token.text in _KEYWORDS:
            raise FormulaSyntaxError(token.position, "a variable name", token.text or "end of input")
        return self.advance().text

    def primary(self) -> Formula:
        token = self.current
        if self.accept("("):
            inner = self.implication()
            self.expect(")")
            return inner
        if token.kind == "ident" and token.text in ("true", "false"):
            self.advance()
            return TRUE if token.text == "true" else FALSE
        return self.atom()

    def atom(self) -> Formula:
        lhs = self.term()
        op = self.current
        if op.text not in ("=", "<=", ">=", "<", ">", "==", "!=") or op.kind == "eof":
            raise FormulaSyntaxError(op.position, "a comparison", op.text or "end of input")
        self.advance()
        rhs = self.term()
        if op.text == "==" and self.current.text == "(" and self.peek().text == "mod":
            self.advance()
            self.advance()
            modulus = self.expect_int()
            self.expect(")")
            if not rhs.is_constant:
                raise FormulaSyntaxError(op.position, "an integer residue", str(rhs))
            if modulus == 0:
                raise FormulaSyntaxError(op.position, "a nonzero modulus", "0")
            return cong(modulus, lhs, rhs.const)
        if op.text in ("=", "=="):
            return equals(lhs, rhs)
        if op.text == "!=":
            return negate(equals(lhs, rhs))
        if op.text == "<=":
            return leq(lhs, rhs)
        if op.text == ">=":
            return leq(rhs, lhs)
        if op.text == "<":
            return leq(lhs + Term.constant(1), rhs)
        return leq(rhs + Term.constant(1), lhs)

    def term(self) -> Term:
        total = Term()
        sign = 1
        if self.accept("-"):
            sign = -1
        else:
            self.accept("+")
        total = total + self.summand().scale(sign)
        while self.current.text in ("+", "-") and self.current.kind == "op":
            sign = 1 if self.advance().text == "+" else -1
            total = total + self.summand().scale(sign)
        return total

    def summand(self) -> Term:
        token = self.current
        if token.kind == "int":
            value = int(self.advance().text)
            if self.accept("*"):
                if self.current.kind == "int":
                    return Term.constant(value * int(self.advance().text))
                return Term.var(self.variable(), value)
            if self.current.kind == "ident" and self.current.text not in _KEYWORDS:
                return Term.var(self.advance().text, value)
            return Term.constant(value)
        if token.kind == "ident" and token.text not in _KEYWORDS:
            self.advance()
            return Term.var(token.text)
        raise FormulaSyntaxError(token.position, "a term", token.text or "end of input")


def parse(text: str) -> Formula:
    """Parse formula text; atoms are canonical and bound variables renamed apart"""
    return rename_bound(_Parser(text).parse())


def parse_term(text: str) -> Term:
    parser = _Parser(text)
    result = parser.term()
    if parser.current.kind != "eof":
        raise FormulaSyntaxError(parser.current.position, "end of term", parser.current.text)
    return result
