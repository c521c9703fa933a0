"""Module for exact elements of Q-linear spans of independent reals

A span element is a finite rational combination of canonical base reals
(1, sqrt(s) with s squarefree, pi^k, 1/(pi - 1)). Zero-testing is exact by
the declared independence of the bases; signs of nonzero elements are found
by refining dyadic enclosures until they exclude 0.
"""

import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

import sympy
from mpmath import mp, mpf, pslq

from app.config import (
    DEFAULT_MAX_BITS,
    INDEPENDENCE_CHECK_BITS,
    RELATION_SEARCH_HEIGHT,
    RELATION_SEARCH_STEPS,
    START_BITS,
)
from utils.errors import IndependenceViolation, InvalidBaseReal, OutsideSpan, PrecisionExhausted
from utils.intervals import Interval, pi_interval, sqrt_interval
from utils.number_utils import factorize, format_rational, to_fraction
from utils.sparse import SparseVector

logger = logging.getLogger(__name__)

RATIONAL = "rational"
SQRT = "sqrt"
PI_POWER = "pi-power"
INV_PI_MINUS_ONE = "inv-pi-minus-one"

FINITE = "finite"
LAURENT = "laurent-pi"


@dataclass(frozen=True, order=True)
class BaseReal:
    """Canonical base real; `arg` is the squarefree radicand or the power of pi"""

    kind: str
    arg: int = 0

    def __post_init__(self):
        if self.kind == RATIONAL and self.arg != 1:
            raise InvalidBaseReal("the only rational base is 1")
        if self.kind == SQRT and (self.arg < 2 or any(e > 1 for _, e in factorize(self.arg))):
            raise InvalidBaseReal(f"sqrt base needs a squarefree radicand >= 2, got {self.arg}")
        if self.kind == PI_POWER and self.arg == 0:
            raise InvalidBaseReal("pi^0 is written as 1")
        if self.kind not in (RATIONAL, SQRT, PI_POWER, INV_PI_MINUS_ONE):
            raise InvalidBaseReal(f"unknown base kind {self.kind!r}")

    @property
    def is_laurent(self) -> bool:
        """True for 1 and the powers of pi"""
        return self.kind in (RATIONAL, PI_POWER)

    def text(self) -> str:
        if self.kind == RATIONAL:
            return "1"
        if self.kind == SQRT:
            return f"sqrt({self.arg})"
        if self.kind == PI_POWER:
            return "pi" if self.arg == 1 else f"pi^{self.arg}"
        return "inv(pi-1)"

    def __str__(self) -> str:
        return self.text()


ONE = BaseReal(RATIONAL, 1)
INV_PI = BaseReal(INV_PI_MINUS_ONE)


class SpanElement(SparseVector):
    """Rational combination of BaseReals"""

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for base, coeff in self.items:
            if base == ONE:
                terms.append(format_rational(coeff))
            elif coeff == 1:
                terms.append(base.text())
            else:
                terms.append(f"{format_rational(coeff)}*{base.text()}")
        return " + ".join(terms).replace("+ -", "- ")

    def single_base(self) -> Optional[Tuple[Fraction, BaseReal]]:
        if len(self) != 1:
            return None
        base, coeff = self.items[0]
        return coeff, base


def rational(q) -> SpanElement:
    return SpanElement.unit(ONE, to_fraction(q))


def sqrt_rational(q) -> SpanElement:
    """sqrt(q) as c*sqrt(s) with s squarefree"""
    value = to_fraction(q)
    if value <= 0:
        raise InvalidBaseReal(f"sqrt needs a positive argument, got {format_rational(value)}")
    product = value.numerator * value.denominator
    outside, radicand = 1, 1
    for p, e in factorize(product):
        outside *= p ** (e // 2)
        radicand *= p ** (e % 2)
    if radicand == 1:
        raise InvalidBaseReal(f"sqrt({format_rational(value)}) is rational")
    return SpanElement.unit(BaseReal(SQRT, radicand), Fraction(outside, value.denominator))


def pi_power(k: int) -> SpanElement:
    if k == 0:
        return SpanElement.unit(ONE)
    return SpanElement.unit(BaseReal(PI_POWER, k))


def inv_pi_minus_one() -> SpanElement:
    return SpanElement.unit(INV_PI)


_BASE_PATTERN = re.compile(
    r"^(?:(?P<coeff>[-+]?\d+(?:/\d+)?)\s*\*\s*)?(?P<base>.+)$"
)


def parse_base_real(text: str) -> SpanElement:
    """Read "1/2", "sqrt(2)", "pi", "pi^k", "inv(pi-1)", optionally prefixed by "q*" """
    raw = str(text).strip().replace(" ", "")
    if raw in ("", "0"):
        return SpanElement()
    match = _BASE_PATTERN.match(raw)
    coeff = to_fraction(match.group("coeff")) if match and match.group("coeff") else Fraction(1)
    body = match.group("base") if match else raw
    if re.fullmatch(r"[-+]?\d+(/\d+)?", body):
        return rational(to_fraction(body)).scale(coeff)
    sqrt_match = re.fullmatch(r"sqrt\((\d+(?:/\d+)?)\)", body)
    if sqrt_match:
        return sqrt_rational(sqrt_match.group(1)).scale(coeff)
    if body == "pi":
        return pi_power(1).scale(coeff)
    pow_match = re.fullmatch(r"pi\^\(?(-?\d+)\)?", body)
    if pow_match:
        return pi_power(int(pow_match.group(1))).scale(coeff)
    if body in ("inv(pi-1)", "1/(pi-1)"):
        return inv_pi_minus_one().scale(coeff)
    raise InvalidBaseReal(f"cannot read base real {text!r}")


@dataclass(frozen=True)
class RealSpan:
    """A declared span: a finite list of bases, or the Laurent family {pi^k} + {1/(pi-1)}"""

    structure: str = FINITE
    basis: Tuple[BaseReal, ...] = ()

    def contains_base(self, base: BaseReal) -> bool:
        if self.structure == LAURENT:
            return base.is_laurent or base == INV_PI
        return base in self.basis

    def contains(self, e: SpanElement) -> bool:
        return all(self.contains_base(base) for base, _ in e.items)


@dataclass(frozen=True)
class GammaDescriptor:
    """gamma = q * pi^k"""

    q: Fraction
    pi_power: int = 0

    def __post_init__(self):
        object.__setattr__(self, "q", to_fraction(self.q))
        object.__setattr__(self, "pi_power", int(self.pi_power))

    @property
    def is_positive(self) -> bool:
        return self.q > 0

    @property
    def is_one(self) -> bool:
        return self.q == 1 and self.pi_power == 0

    def inverse(self) -> "GammaDescriptor":
        return GammaDescriptor(1 / self.q, -self.pi_power)

    def as_span_element(self) -> SpanElement:
        return pi_power(self.pi_power).scale(self.q)

    def text(self) -> str:
        if self.pi_power == 0:
            return format_rational(self.q)
        base = pi_power(self.pi_power).single_base()[1].text()
        return base if self.q == 1 else f"{format_rational(self.q)}*{base}"

    @classmethod
    def parse(cls, text: str) -> "GammaDescriptor":
        value = parse_base_real(text)
        single = value.single_base()
        if single is None or not single[1].is_laurent:
            raise InvalidBaseReal(f"gamma must be q*pi^k, got {text!r}")
        coeff, base = single
        return cls(coeff, 0 if base == ONE else base.arg)

    def __str__(self) -> str:
        return self.text()


def _shift_base(base: BaseReal, k: int) -> SpanElement:
    """pi^k * base inside the Laurent span"""
    if k == 0:
        return SpanElement.unit(base)
    if base == ONE:
        return pi_power(k)
    if base.kind == PI_POWER:
        return pi_power(base.arg + k)
    if base == INV_PI:
        # pi^k/(pi-1) = sum_{i<k} pi^i + 1/(pi-1);  pi^-k/(pi-1) = 1/(pi-1) - sum_{i=1..k} pi^-i
        out = inv_pi_minus_one()
        if k > 0:
            for i in range(k):
                out = out + pi_power(i)
        else:
            for i in range(1, -k + 1):
                out = out - pi_power(-i)
        return out
    raise OutsideSpan(f"pi^{k} * {base.text()} leaves the span")


def mul_by_gamma(e: SpanElement, gamma: GammaDescriptor, structure: str = FINITE) -> SpanElement:
    """Exact coordinates of gamma * e"""
    if gamma.pi_power != 0 and structure != LAURENT:
        raise OutsideSpan(f"finite spans support rational gamma only, got {gamma}")
    shifted = e.map_keys(lambda base: _shift_base(base, gamma.pi_power))
    return SpanElement(shifted.items).scale(gamma.q)


def _base_enclosure(base: BaseReal, bits: int) -> Interval:
    if base == ONE:
        return Interval.exact(Fraction(1), bits)
    if base.kind == SQRT:
        return sqrt_interval(base.arg, bits)
    if base.kind == PI_POWER:
        return pi_interval(bits).power(base.arg).rounded(bits)
    return (pi_interval(bits) - Interval.exact(Fraction(1), bits)).reciprocal().rounded(bits)


def evaluate(e: SpanElement, bits: int) -> Interval:
    """Dyadic enclosure of the exact value of e"""
    if bits < 8:
        raise ValueError(f"precision must be at least 8 bits, got {bits}")
    total_coeff = sum(abs(c) for _, c in e.items)
    max_power = max((abs(b.arg) for b, _ in e.items if b.kind == PI_POWER), default=0)
    work = bits + 8 + int(total_coeff).bit_length() + 2 * max_power
    acc = Interval.exact(Fraction(0), work)
    for base, coeff in e.items:
        acc = acc + _base_enclosure(base, work).scale(coeff)
    return acc.rounded(bits)


def sign(e: SpanElement, max_bits: int = DEFAULT_MAX_BITS) -> int:
    """Sign of e; exact zero test, refined enclosures otherwise"""
    if e.is_zero():
        return 0
    single = e.single_base()
    if single is not None:
        # every base real is positive
        return 1 if single[0] > 0 else -1
    bits = min(START_BITS, max_bits)
    while True:
        s = evaluate(e, bits).sign()
        if s:
            return s
        if bits >= max_bits:
            raise PrecisionExhausted(max_bits)
        logger.debug("sign of %s undecided at %d bits", e, bits)
        bits = min(2 * bits, max_bits)


def compare(e1: SpanElement, e2: SpanElement, max_bits: int = DEFAULT_MAX_BITS) -> int:
    return sign(e1 - e2, max_bits)


def find_small_relation(
    numbers: Sequence[Fraction],
    bits: int = INDEPENDENCE_CHECK_BITS,
    height: int = RELATION_SEARCH_HEIGHT,
) -> Optional[Tuple[int, ...]]:
    """Integer relation sum(c_i * x_i) ~ 0 with every |c_i| <= height, or None

    PSLQ at `bits` of working precision; a hit is only a candidate and callers
    confirm it on enclosures.
    """
    if len(numbers) < 2:
        return None
    for i, x in enumerate(numbers):
        if x == 0:
            return tuple(int(j == i) for j in range(len(numbers)))
    with mp.workprec(max(bits, 53)):
        relation = pslq(
            [mpf(x.numerator) / x.denominator for x in numbers],
            maxcoeff=height,
            maxsteps=RELATION_SEARCH_STEPS,
        )
    if relation is None or max(abs(int(c)) for c in relation) > height:
        return None
    return tuple(int(c) for c in relation)


def _relation_text(labels: Sequence[str], coeffs: Sequence[Fraction]) -> str:
    terms = [f"{format_rational(c)}*{label}" for label, c in zip(labels, coeffs) if c]
    return " + ".join(terms) + " = 0"


def check_independence(
    values: Sequence[Tuple[str, SpanElement]],
    bits: int = INDEPENDENCE_CHECK_BITS,
    height: int = RELATION_SEARCH_HEIGHT,
) -> None:
    """Check that labelled span values are Q-linearly independent

    Exact part: the coordinate vectors over the canonical bases must have full
    rank. Numeric part: no relation with coefficients up to `height` may hold
    on the enclosures of the values themselves.
    """
    if not values:
        return
    labels = [label for label, _ in values]
    bases = sorted({base for _, value in values for base in value.keys()})
    coords = [[value.get(base) for base in bases] for _, value in values]
    matrix = sympy.Matrix(
        len(bases), len(values), lambda i, j: sympy.Rational(coords[j][i].numerator, coords[j][i].denominator)
    )
    if matrix.rank() < len(values):
        kernel = matrix.nullspace()[0]
        scale = math.lcm(*[int(entry.q) for entry in kernel])
        coeffs = [Fraction(int(entry * scale)) for entry in kernel]
        raise IndependenceViolation(f"the values satisfy {_relation_text(labels, coeffs)}")

    enclosures = [evaluate(value, bits) for _, value in values]
    relation = find_small_relation([(e.lo + e.hi) / 2 for e in enclosures], bits, height)
    if relation is not None:
        residual = Interval.exact(Fraction(0), bits)
        for c, e in zip(relation, enclosures):
            residual = residual + e.scale(c)
        if residual.contains(Fraction(0)):
            raise IndependenceViolation(
                f"the values look like {_relation_text(labels, [Fraction(c) for c in relation])}"
            )
        logger.debug("relation %s rejected on enclosures at %d bits", relation, bits)
    logger.debug("independence check passed for %d values over %d bases", len(values), len(bases))


def span_elements_text(values: Iterable[SpanElement]) -> List[str]:
    return [str(v) for v in values]
