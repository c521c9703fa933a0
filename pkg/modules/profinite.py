"""Module for exact arithmetic in the profinite completion of Z

An element of Z^ = prod_p Z_p is stored as finitely many rational p-adic
coordinates plus a rational default used at every other prime. The class is
closed under ring operations and exact division, and equality is structural
after normalisation.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

import numpy as np
import pandas as pd

from app.config import SAMPLE_COEFF_BOUND
from utils.errors import InvalidComponent, NotDivisible
from utils.number_utils import (
    RationalLike,
    combine_residues,
    factorize,
    format_rational,
    is_prime,
    prime_divisors,
    rational_mod,
    to_fraction,
)


@dataclass(frozen=True)
class PadicComponent:
    """A rational coordinate u/v attached to the prime p, with p not dividing v"""

    prime: int
    value: Fraction

    def __post_init__(self):
        if self.value.denominator % self.prime == 0:
            raise InvalidComponent(
                f"{format_rational(self.value)} is not a {self.prime}-adic integer"
            )


@dataclass(frozen=True)
class ProfiniteElement:
    """Normalised element of Z^: `support` is a sorted tuple of (prime, coordinate)"""

    support: Tuple[Tuple[int, Fraction], ...]
    default: Fraction

    def coordinate(self, p: int) -> Fraction:
        for prime, value in self.support:
            if prime == p:
                return value
        return self.default

    def components(self) -> List[PadicComponent]:
        return [PadicComponent(p, v) for p, v in self.support]

    def support_primes(self) -> List[int]:
        return [p for p, _ in self.support]

    def is_integer(self) -> bool:
        # normal form of k in Z has empty support and integral default
        return not self.support and self.default.denominator == 1

    def valuation(self, p: int) -> float:
        """p-adic valuation of the p-coordinate (inf for 0)"""
        value = self.coordinate(p)
        if value == 0:
            return float("inf")
        count, num = 0, value.numerator
        while num % p == 0:
            num //= p
            count += 1
        return count

    def __add__(self, other: "ProfiniteElement") -> "ProfiniteElement":
        return add(self, _coerce(other))

    __radd__ = __add__

    def __neg__(self) -> "ProfiniteElement":
        return neg(self)

    def __sub__(self, other: "ProfiniteElement") -> "ProfiniteElement":
        return add(self, neg(_coerce(other)))

    def __rsub__(self, other: int) -> "ProfiniteElement":
        return add(_coerce(other), neg(self))

    def __mul__(self, other: "ProfiniteElement") -> "ProfiniteElement":
        return mul(self, _coerce(other))

    __rmul__ = __mul__

    def to_json(self) -> dict:
        return {
            "support": {str(p): format_rational(v) for p, v in self.support},
            "default": format_rational(self.default),
        }

    def __str__(self) -> str:
        if not self.support:
            return format_rational(self.default)
        parts = ", ".join(f"{p}: {format_rational(v)}" for p, v in self.support)
        return f"<{parts}; else {format_rational(self.default)}>"


def _coerce(value) -> ProfiniteElement:
    if isinstance(value, ProfiniteElement):
        return value
    if isinstance(value, int):
        return from_integer(value)
    raise TypeError(f"cannot combine ProfiniteElement with {type(value).__name__}")


def _normalize(coords: Mapping[int, Fraction], default: Fraction) -> ProfiniteElement:
    """Validate coordinates, drop entries equal to an integral default, sort"""
    for p, value in coords.items():
        if value.denominator % p == 0:
            raise InvalidComponent(f"coordinate {format_rational(value)} at {p} is not {p}-integral")
    for q in prime_divisors(default.denominator):
        if q not in coords:
            raise InvalidComponent(
                f"default {format_rational(default)} needs an explicit coordinate at {q}"
            )
    kept = tuple(
        sorted(
            (p, value)
            for p, value in coords.items()
            if not (value == default and default.denominator % p != 0)
        )
    )
    return ProfiniteElement(kept, default)


def from_integer(k: int) -> ProfiniteElement:
    """Canonical embedding Z -> Z^"""
    return ProfiniteElement((), Fraction(int(k)))


def from_prime_component(p: int, q: RationalLike, default: RationalLike = 0) -> ProfiniteElement:
    """Element equal to q at the prime p and to `default` at every other prime"""
    if not is_prime(p):
        raise InvalidComponent(f"{p} is not a prime")
    value = to_fraction(q)
    base = to_fraction(default)
    PadicComponent(p, value)
    extra = set(prime_divisors(base.denominator)) - {p}
    if extra:
        raise InvalidComponent(
            f"default {format_rational(base)} has denominator primes {sorted(extra)} outside {{{p}}}"
        )
    return _normalize({p: value}, base)


def from_components(components: Mapping[int, RationalLike], default: RationalLike = 0) -> ProfiniteElement:
    """Element with the given coordinates at finitely many primes"""
    for p in components:
        if not is_prime(int(p)):
            raise InvalidComponent(f"{p} is not a prime")
    coords = {int(p): to_fraction(v) for p, v in components.items()}
    return _normalize(coords, to_fraction(default))


def _primes_of(*elements: ProfiniteElement) -> List[int]:
    primes = set()
    for x in elements:
        primes.update(x.support_primes())
    return sorted(primes)


def add(x: ProfiniteElement, y: ProfiniteElement) -> ProfiniteElement:
    primes = _primes_of(x, y)
    coords = {p: x.coordinate(p) + y.coordinate(p) for p in primes}
    return _normalize(coords, x.default + y.default)


def neg(x: ProfiniteElement) -> ProfiniteElement:
    return ProfiniteElement(tuple((p, -v) for p, v in x.support), -x.default)


def sub(x: ProfiniteElement, y: ProfiniteElement) -> ProfiniteElement:
    return add(x, neg(y))


def mul(x: ProfiniteElement, y: ProfiniteElement) -> ProfiniteElement:
    primes = _primes_of(x, y)
    coords = {p: x.coordinate(p) * y.coordinate(p) for p in primes}
    return _normalize(coords, x.default * y.default)


def linear_combination(terms: Iterable[Tuple[int, ProfiniteElement]], constant: int = 0) -> ProfiniteElement:
    """constant + sum of k * x over the given (k, x) pairs"""
    total = from_integer(constant)
    for k, x in terms:
        if k:
            total = add(total, mul(from_integer(k), x))
    return total


def residue(x: ProfiniteElement, n: int) -> int:
    """res_n(x) in [0, n), combining prime-power residues by CRT"""
    if n < 1:
        raise ValueError(f"modulus must be >= 1, got {n}")
    if n == 1:
        return 0
    parts: Dict[int, int] = {}
    for p, k in factorize(n):
        modulus = p ** k
        parts[modulus] = rational_mod(x.coordinate(p), modulus)
    return combine_residues(parts) % n


def is_divisible(x: ProfiniteElement, n: int) -> bool:
    return residue(x, n) == 0


def divide_exact(x: ProfiniteElement, n: int) -> ProfiniteElement:
    """The unique y with n*y = x; requires res_n(x) = 0"""
    r = residue(x, n)
    if r != 0:
        raise NotDivisible(f"{x} is not divisible by {n} (residue {r})")
    primes = sorted(set(x.support_primes()) | set(prime_divisors(n)))
    coords = {p: x.coordinate(p) / n for p in primes}
    return _normalize(coords, x.default / n)


def from_json(obj: Mapping) -> ProfiniteElement:
    """Read {"support": {"2": "1/3"}, "default": "0"}"""
    support = obj.get("support", {}) or {}
    return from_components({int(p): v for p, v in support.items()}, obj.get("default", "0"))


def residue_table(x: ProfiniteElement, moduli: Iterable[int]) -> pd.DataFrame:
    """Residues of x for a range of moduli"""
    rows = []
    for n in moduli:
        r = residue(x, n)
        rows.append({"n": n, "residue": r, "divisible": r == 0})
    return pd.DataFrame(rows)


def random_element(
    rng: np.random.Generator,
    primes: Sequence[int] = (2, 3, 5, 7, 11),
    bound: int = SAMPLE_COEFF_BOUND,
) -> ProfiniteElement:
    """Random element with a few explicit coordinates and a small default"""
    chosen = [p for p in primes if rng.random() < 0.5]
    coords = {}
    for p in chosen:
        den = int(rng.integers(1, bound, endpoint=True))
        while den % p == 0:
            den += 1
        coords[p] = Fraction(int(rng.integers(-bound, bound, endpoint=True)), den)
    den = 1
    for p in chosen:
        if rng.random() < 0.3:
            den *= p
    return _normalize(coords, Fraction(int(rng.integers(-bound, bound, endpoint=True)), den))
