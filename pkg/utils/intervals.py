"""Dyadic interval arithmetic with outward rounding"""

import math
from fractions import Fraction
from functools import lru_cache
from typing import Optional

# extra bits carried by constant enclosures before the final outward rounding
GUARD_BITS = 20


def _floor_dyadic(value: Fraction, bits: int) -> Fraction:
    return Fraction(math.floor(value * (1 << bits)), 1 << bits)


def _ceil_dyadic(value: Fraction, bits: int) -> Fraction:
    return Fraction(math.ceil(value * (1 << bits)), 1 << bits)


class Interval:
    """Closed interval [lo, hi] with dyadic endpoints on a 2^-precision grid"""

    __slots__ = ("lo", "hi", "precision")

    def __init__(self, lo: Fraction, hi: Fraction, precision: int):
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi
        self.precision = precision

    @classmethod
    def exact(cls, value: Fraction, precision: int) -> "Interval":
        return cls(Fraction(value), Fraction(value), precision)

    def rounded(self, bits: Optional[int] = None) -> "Interval":
        """Round outward onto the 2^-bits grid"""
        bits = self.precision if bits is None else bits
        return Interval(_floor_dyadic(self.lo, bits), _ceil_dyadic(self.hi, bits), bits)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, value: Fraction) -> bool:
        return self.lo <= value <= self.hi

    def sign(self) -> Optional[int]:
        """+1 / -1 when the interval excludes 0, 0 for the point 0, None when undecided"""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        if self.lo == self.hi == 0:
            return 0
        return None

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi, min(self.precision, other.precision))

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo, self.precision)

    def __sub__(self, other: "Interval") -> "Interval":
        return self + (-other)

    def scale(self, factor: Fraction) -> "Interval":
        a, b = self.lo * factor, self.hi * factor
        return Interval(min(a, b), max(a, b), self.precision)

    def __mul__(self, other: "Interval") -> "Interval":
        products = [self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi]
        return Interval(min(products), max(products), min(self.precision, other.precision))

    def reciprocal(self) -> "Interval":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError(f"reciprocal of interval containing 0: {self!r}")
        return Interval(1 / self.hi, 1 / self.lo, self.precision)

    def power(self, exponent: int) -> "Interval":
        """Integer power of a positive interval"""
        if self.lo <= 0:
            raise ValueError("power() expects a positive interval")
        if exponent < 0:
            return self.power(-exponent).reciprocal()
        return Interval(self.lo ** exponent, self.hi ** exponent, self.precision)

    def __repr__(self) -> str:
        return f"Interval([{float(self.lo):.12g}, {float(self.hi):.12g}], {self.precision} bits)"


def _arctan_inverse_scaled(x: int, scale: int):
    """floor-accumulated scale*arctan(1/x) and the number of terms summed"""
    total = 0
    power = scale // x
    k = 0
    sign = 1
    while power:
        total += sign * (power // (2 * k + 1))
        power //= x * x
        sign = -sign
        k += 1
    return total, k


@lru_cache(maxsize=64)
def pi_interval(bits: int) -> Interval:
    """Machin enclosure pi = 16 atan(1/5) - 4 atan(1/239), tail and floor errors bounded"""
    work = bits + GUARD_BITS
    scale = 1 << work
    a5, n5 = _arctan_inverse_scaled(5, scale)
    a239, n239 = _arctan_inverse_scaled(239, scale)
    # each floored term and the alternating tail contribute < 1 unit
    error = 16 * (n5 + 1) + 4 * (n239 + 1)
    centre = 16 * a5 - 4 * a239
    return Interval(Fraction(centre - error, scale), Fraction(centre + error, scale), work).rounded(bits)


@lru_cache(maxsize=256)
def sqrt_interval(radicand: int, bits: int) -> Interval:
    """Enclosure of sqrt(radicand) via integer Newton (math.isqrt)"""
    root = math.isqrt(radicand << (2 * bits))
    lo = Fraction(root, 1 << bits)
    hi = lo if root * root == radicand << (2 * bits) else Fraction(root + 1, 1 << bits)
    return Interval(lo, hi, bits)
