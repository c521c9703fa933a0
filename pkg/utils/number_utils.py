"""Number-theoretic helpers: primes, CRT, rational text forms, continued fractions"""

from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Tuple, Union

import sympy
from sympy.ntheory.continued_fraction import (
    continued_fraction_convergents,
    continued_fraction_iterator,
)
from sympy.ntheory.modular import crt

RationalLike = Union[int, str, Fraction]


def to_fraction(value: RationalLike) -> Fraction:
    """Coerce an int, Fraction or "u/v" string into a Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as a rational")


def format_rational(value: Fraction) -> str:
    """Render a rational as "u" or "u/v" """
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def is_prime(p: int) -> bool:
    return bool(sympy.isprime(p))


@lru_cache(maxsize=4096)
def factorize(n: int) -> Tuple[Tuple[int, int], ...]:
    """Prime factorisation of |n| as sorted (prime, exponent) pairs"""
    if n == 0:
        raise ValueError("cannot factor 0")
    return tuple(sorted(sympy.factorint(abs(n)).items()))


def prime_divisors(n: int) -> List[int]:
    return [p for p, _ in factorize(n)]


def primes_up_to(bound: int) -> List[int]:
    return list(sympy.primerange(2, bound + 1))


def combine_residues(residues: Dict[int, int]) -> int:
    """Chinese remaindering of {modulus: residue} with pairwise coprime moduli"""
    if not residues:
        return 0
    moduli = list(residues.keys())
    values = [residues[m] for m in moduli]
    result = crt(moduli, values)
    if result is None:
        raise ValueError(f"incompatible residues {residues}")
    return int(result[0])


def rational_mod(value: Fraction, modulus: int) -> int:
    """u/v mod modulus, assuming gcd(v, modulus) = 1"""
    inverse = pow(value.denominator, -1, modulus)
    return (value.numerator * inverse) % modulus


def convergents(value: Fraction, count: int) -> Iterator[Fraction]:
    """First `count` continued-fraction convergents of a rational"""
    terms = continued_fraction_iterator(sympy.Rational(value.numerator, value.denominator))
    for index, approx in enumerate(continued_fraction_convergents(terms)):
        if index >= count:
            return
        yield Fraction(int(approx.p), int(approx.q))


def rationals_by_height(height: int, positive_only: bool = False) -> List[Fraction]:
    """All rationals u/v with |u|, v <= height, ordered by height then value"""
    seen = set()
    out = []
    for h in range(1, height + 1):
        layer = []
        for den in range(1, h + 1):
            for num in range(-h, h + 1):
                if max(abs(num), den) != h:
                    continue
                q = Fraction(num, den)
                if q in seen or (positive_only and q <= 0):
                    continue
                seen.add(q)
                layer.append(q)
        out.extend(sorted(layer, key=lambda q: (abs(q), q < 0)))
    return out
