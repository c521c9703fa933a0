"""Module for finitely described Z-groups G = D + L

D is a divisible Q-vector space given by named dimensions; in a Laurent
model its dimensions are the powers of pi, named "1", "pi", "pi^-1", ...
L is the pure closure of Z + sum_j Z*u_j inside the profinite integers, so an
element carries a d-part and an l-part (a0 + sum_j a_j*u_j) / m. Ordered
models compare through two real valuations nu1, nu2 and then the integer
part (lexicographic order with Z convex).
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import sympy

from app.config import DEFAULT_MAX_BITS, LAURENT_SAMPLE_WINDOW, SAMPLE_COEFF_BOUND
from modules import profinite
from modules.formulas import Formula, Term, cong, conj, geq, negate
from modules.profinite import ProfiniteElement
from modules.realspan import (
    FINITE,
    LAURENT,
    PI_POWER,
    RealSpan,
    SpanElement,
    check_independence,
    parse_base_real,
    pi_power,
    sign,
)
from utils.errors import (
    EqualElements,
    GeneratorInZ,
    IndependenceViolation,
    InvalidSpec,
    ModeError,
    NotInGroup,
    OutsideSpan,
    SeparationFailed,
)
from utils.number_utils import format_rational, to_fraction
from utils.sparse import SparseVector

logger = logging.getLogger(__name__)

ORDERED = "ordered"
UNORDERED = "unordered"


@dataclass(frozen=True)
class DDimension:
    """One Q-dimension of D with its level-1 and level-2 values"""

    name: str
    nu1: SpanElement = field(default_factory=SpanElement)
    nu2: SpanElement = field(default_factory=SpanElement)


@dataclass(frozen=True)
class LGenerator:
    name: str
    u: ProfiniteElement
    nu1: SpanElement = field(default_factory=SpanElement)
    nu2: SpanElement = field(default_factory=SpanElement)


@dataclass(frozen=True)
class ModelSpec:
    mode: str = ORDERED
    span_structure: str = FINITE
    d_basis: Tuple[DDimension, ...] = ()
    l_generators: Tuple[LGenerator, ...] = ()

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "span_structure": self.span_structure,
            "d_basis": [
                {"name": d.name, "nu1": str(d.nu1), "nu2": str(d.nu2)} for d in self.d_basis
            ],
            "l_generators": [
                {"name": g.name, "profinite": g.u.to_json(), "nu1": str(g.nu1), "nu2": str(g.nu2)}
                for g in self.l_generators
            ],
        }


def _level_value(text, where: str) -> SpanElement:
    value = parse_base_real("0" if text is None else str(text))
    if len(value) > 1:
        raise InvalidSpec(f"{where}: level value must be a single base real or 0, got {text!r}")
    return value


def spec_from_json(obj: Mapping) -> ModelSpec:
    """Read a model spec from its JSON form"""
    try:
        d_basis = tuple(
            DDimension(str(d["name"]), _level_value(d.get("nu1"), d["name"]), _level_value(d.get("nu2"), d["name"]))
            for d in obj.get("d_basis", [])
        )
        l_generators = tuple(
            LGenerator(
                str(g["name"]),
                profinite.from_json(g["profinite"]),
                _level_value(g.get("nu1"), g["name"]),
                _level_value(g.get("nu2"), g["name"]),
            )
            for g in obj.get("l_generators", [])
        )
    except KeyError as exc:
        raise InvalidSpec(f"missing key {exc.args[0]!r} in model spec") from exc
    return ModelSpec(
        mode=obj.get("mode", ORDERED),
        span_structure=obj.get("span_structure", FINITE),
        d_basis=d_basis,
        l_generators=l_generators,
    )


def _normalize_l(a0: int, a: Sequence[int], m: int) -> Tuple[int, Tuple[int, ...], int]:
    if m == 0:
        raise NotInGroup("denominator must be nonzero")
    if m < 0:
        a0, a, m = -a0, [-x for x in a], -m
    g = math.gcd(a0, m, *a)
    return a0 // g, tuple(x // g for x in a), m // g


@dataclass(frozen=True)
class Element:
    """d-part plus l-part (a0 + sum a_j u_j) / m, normalised so gcd(a0, a, m) = 1"""

    d: SparseVector
    a0: int
    a: Tuple[int, ...]
    m: int = 1

    @classmethod
    def make(cls, d, a0: int, a: Sequence[int], m: int = 1) -> "Element":
        vector = d if isinstance(d, SparseVector) else SparseVector(d)
        a0, a, m = _normalize_l(int(a0), [int(x) for x in a], int(m))
        return cls(vector, a0, a, m)

    def _check(self, other: "Element") -> None:
        if len(self.a) != len(other.a):
            raise ValueError("elements belong to models with different generators")

    def __add__(self, other: "Element") -> "Element":
        self._check(other)
        lcm = self.m * other.m // math.gcd(self.m, other.m)
        s, t = lcm // self.m, lcm // other.m
        return Element.make(
            self.d + other.d,
            self.a0 * s + other.a0 * t,
            [x * s + y * t for x, y in zip(self.a, other.a)],
            lcm,
        )

    def __neg__(self) -> "Element":
        return Element(-self.d, -self.a0, tuple(-x for x in self.a), self.m)

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def scale(self, k: int) -> "Element":
        return Element.make(self.d.scale(k), self.a0 * k, [x * k for x in self.a], self.m)

    @property
    def l_key(self) -> Tuple[int, Tuple[int, ...], int]:
        return self.a0, self.a, self.m

    def has_l_part(self) -> bool:
        return self.a0 != 0 or any(self.a)

    def is_pure_d(self) -> bool:
        return not self.has_l_part()

    def is_standard(self) -> bool:
        """True for elements of Z"""
        return self.d.is_zero() and not any(self.a) and self.m == 1

    def integer_value(self) -> int:
        if not self.is_standard():
            raise ValueError("element is not a standard integer")
        return self.a0

    def to_json(self, generators: Sequence[str]) -> dict:
        return {
            "d": {str(k): format_rational(v) for k, v in self.d.items},
            "a0": self.a0,
            "a": {name: x for name, x in zip(generators, self.a) if x},
            "m": self.m,
        }


@dataclass(frozen=True)
class Congruence:
    """v == residue (mod modulus)"""

    modulus: int
    residue: int

    def formula(self, var: str = "v") -> Formula:
        return cong(self.modulus, Term.var(var), self.residue)

    def to_json(self) -> dict:
        return {"kind": "congruence", "modulus": self.modulus, "residue": self.residue,
                "formula": str(self.formula())}


@dataclass(frozen=True)
class PointFormula:
    """lower <= v <= upper (either side optional), negated when `negated`"""

    lower: Optional[int] = None
    upper: Optional[int] = None
    negated: bool = False

    def formula(self, var: str = "v") -> Formula:
        v = Term.var(var)
        parts = []
        if self.lower is not None:
            parts.append(geq(v - Term.constant(self.lower)))
        if self.upper is not None:
            parts.append(geq(Term.constant(self.upper) - v))
        body = conj(parts)
        return negate(body) if self.negated else body

    def to_json(self) -> dict:
        return {"kind": "point", "lower": self.lower, "upper": self.upper, "negated": self.negated,
                "formula": str(self.formula())}


@dataclass(frozen=True)
class SameType:
    def to_json(self) -> dict:
        return {"kind": "same-type"}


Separation = Union[Congruence, PointFormula, SameType]


def laurent_dim_name(k: int) -> str:
    return str(pi_power(k))


def laurent_exponent(name: str) -> int:
    """k for the D dimension named pi^k"""
    single = parse_base_real(name).single_base()
    if single is None or single[0] != 1 or not single[1].is_laurent:
        raise InvalidSpec(f"{name!r} is not a power of pi")
    base = single[1]
    return base.arg if base.kind == PI_POWER else 0


def _canonical_laurent_name(name: str) -> str:
    return laurent_dim_name(laurent_exponent(name))


class Model:
    """Validated Z-group built from a ModelSpec"""

    def __init__(self, spec: ModelSpec, max_bits: int = DEFAULT_MAX_BITS):
        self.spec = spec
        self.max_bits = max_bits
        self.ordered = spec.mode == ORDERED
        self.laurent = spec.span_structure == LAURENT
        self.generators: Tuple[str, ...] = tuple(g.name for g in spec.l_generators)
        self.us: Tuple[ProfiniteElement, ...] = tuple(g.u for g in spec.l_generators)
        self.dims: Tuple[str, ...] = tuple(d.name for d in spec.d_basis)
        self.d_nu1: Dict[str, SpanElement] = {d.name: d.nu1 for d in spec.d_basis}
        self.d_nu2: Dict[str, SpanElement] = {d.name: d.nu2 for d in spec.d_basis}
        self.l_nu1: Tuple[SpanElement, ...] = tuple(g.nu1 for g in spec.l_generators)
        self.l_nu2: Tuple[SpanElement, ...] = tuple(g.nu2 for g in spec.l_generators)
        if self.laurent:
            self.d_span = RealSpan(LAURENT)
        else:
            bases = sorted({b for v in self.d_nu1.values() for b, _ in v.items})
            self.d_span = RealSpan(FINITE, tuple(bases))
        self._nu1_inverse: Dict[object, Tuple[str, Fraction]] = {}
        if not self.laurent:
            for name, value in self.d_nu1.items():
                single = value.single_base()
                if single is not None:
                    self._nu1_inverse[single[1]] = (name, single[0])

    # construction

    def zero(self) -> Element:
        return Element(SparseVector(), 0, (0,) * len(self.generators), 1)

    def one(self) -> Element:
        return self.from_int(1)

    def from_int(self, k: int) -> Element:
        return Element.make(SparseVector(), int(k), (0,) * len(self.generators), 1)

    def dim_key(self, name: str) -> str:
        if self.laurent:
            return _canonical_laurent_name(name)
        if name not in self.d_nu1:
            raise InvalidSpec(f"unknown D dimension {name!r}")
        return name

    def d_unit(self, name: str, coefficient=1) -> Element:
        return self.elem({name: coefficient})

    def gen(self, name: str) -> Element:
        return self.elem({}, 0, {name: 1}, 1)

    def _coefficient_tuple(self, a: Union[Mapping[str, int], Sequence[int], None]) -> Tuple[int, ...]:
        if a is None:
            return (0,) * len(self.generators)
        if isinstance(a, Mapping):
            unknown = set(a) - set(self.generators)
            if unknown:
                raise InvalidSpec(f"unknown L generators {sorted(unknown)}")
            return tuple(int(a.get(name, 0)) for name in self.generators)
        if len(a) != len(self.generators):
            raise InvalidSpec(f"expected {len(self.generators)} generator coefficients, got {len(a)}")
        return tuple(int(x) for x in a)

    def elem(self, d_coords: Optional[Mapping] = None, a0: int = 0, a=None, m: int = 1) -> Element:
        """Certified element d + (a0 + sum a_j u_j) / m"""
        if int(m) < 1:
            raise NotInGroup(f"denominator must be >= 1, got {m}")
        d = SparseVector((self.dim_key(str(k)), to_fraction(v)) for k, v in (d_coords or {}).items())
        x = Element.make(d, a0, self._coefficient_tuple(a), m)
        self.certify(x)
        return x

    def certify(self, x: Element) -> None:
        """Purity certificate: a0 + sum a_j u_j must be divisible by m"""
        if x.m == 1:
            return
        total = profinite.linear_combination(zip(x.a, self.us), x.a0)
        r = profinite.residue(total, x.m)
        if r != 0:
            raise NotInGroup(
                f"({x.a0} + {self._l_text(x)}) / {x.m} is not in the group (residue {r} mod {x.m})"
            )

    def _l_text(self, x: Element) -> str:
        parts = [f"{c}*{name}" for name, c in zip(self.generators, x.a) if c]
        return " + ".join(parts) or "0"

    def element_from_json(self, obj: Mapping) -> Element:
        return self.elem(obj.get("d", {}), int(obj.get("a0", 0)), obj.get("a", {}), int(obj.get("m", 1)))

    def element_to_json(self, x: Element) -> dict:
        return x.to_json(self.generators)

    def element_text(self, x: Element) -> str:
        parts = [f"{format_rational(v)}*{k}" for k, v in x.d.items]
        if x.has_l_part():
            l_text = " + ".join([str(x.a0)] + [f"{c}*{n}" for n, c in zip(self.generators, x.a) if c])
            parts.append(f"({l_text})/{x.m}" if x.m != 1 else f"({l_text})")
        return " + ".join(parts) or "0"

    # group structure

    def add(self, x: Element, y: Element) -> Element:
        return x + y

    def neg(self, x: Element) -> Element:
        return -x

    def sub(self, x: Element, y: Element) -> Element:
        return x - y

    def int_scale(self, k: int, x: Element) -> Element:
        return x.scale(int(k))

    def l_value(self, x: Element) -> ProfiniteElement:
        """The l-part of x as an element of the profinite integers"""
        total = profinite.linear_combination(zip(x.a, self.us), x.a0)
        return profinite.divide_exact(total, x.m)

    def residue_elem(self, x: Element, n: int) -> int:
        """res_n(x); the d-part lies in the kernel"""
        if n == 1:
            return 0
        return profinite.residue(self.l_value(x), n)

    def divide_by_p_with_remainder(self, x: Element, p: int) -> Tuple[int, Element]:
        """(k, y) with x = p*y + k and 0 <= k < p"""
        k = self.residue_elem(x, p)
        y = Element.make(x.d.scale(Fraction(1, p)), x.a0 - k * x.m, x.a, x.m * p)
        self.certify(y)
        return k, y

    def decompose(self, x: Element) -> Tuple[Element, Element]:
        d_part = Element(x.d, 0, (0,) * len(self.generators), 1)
        l_part = Element(SparseVector(), x.a0, x.a, x.m)
        return d_part, l_part

    def is_leibnizian(self) -> bool:
        return not self.laurent and not self.dims

    # valuations and order

    def d_level_value(self, name: str, level: int) -> SpanElement:
        if self.laurent:
            return parse_base_real(name) if level == 1 else SpanElement()
        return (self.d_nu1 if level == 1 else self.d_nu2)[name]

    def level1_dims(self) -> List[str]:
        if self.laurent:
            return self.sample_dims()
        return [name for name in self.dims if not self.d_nu1[name].is_zero()]

    def level2_dims(self) -> List[str]:
        if self.laurent:
            return []
        return [name for name in self.dims if self.d_nu1[name].is_zero()]

    def level1_generators(self) -> List[str]:
        return [name for name, value in zip(self.generators, self.l_nu1) if not value.is_zero()]

    def in_d_values(self, w: SpanElement) -> bool:
        """True when w lies in nu1(D)"""
        if self.laurent:
            return all(base.is_laurent for base, _ in w.items)
        return all(base in self._nu1_inverse for base, _ in w.items)

    def nu1_preimage(self, w: SpanElement) -> SparseVector:
        """The d-vector of D whose level-1 value is w"""
        if not self.in_d_values(w):
            raise OutsideSpan(f"{w} is not a level-1 value of D")
        if self.laurent:
            return SparseVector((base.text(), c) for base, c in w.items)
        coords = {}
        for base, c in w.items:
            name, scale = self._nu1_inverse[base]
            coords[name] = c / scale
        return SparseVector(coords)

    def nu(self, x: Element, level: int = 1) -> SpanElement:
        """Exact level-1 or level-2 value of x"""
        if not self.ordered:
            raise ModeError("valuations are only defined for ordered models")
        if level not in (1, 2):
            raise ValueError(f"level must be 1 or 2, got {level}")
        total = SpanElement()
        for name, c in x.d.items:
            total = total + self.d_level_value(name, level).scale(c)
        l_values = self.l_nu1 if level == 1 else self.l_nu2
        l_total = SpanElement()
        for coefficient, value in zip(x.a, l_values):
            if coefficient:
                l_total = l_total + value.scale(coefficient)
        return total + l_total.scale(Fraction(1, x.m))

    def compare(self, x: Element, y: Element) -> int:
        """Lexicographic comparison: nu1, then nu2, then the integer difference"""
        if not self.ordered:
            raise ModeError("compare needs an ordered model")
        diff = x - y
        if diff.d.is_zero() and not diff.has_l_part():
            return 0
        for level in (1, 2):
            s = sign(self.nu(diff, level), self.max_bits)
            if s:
                return s
        if not diff.is_standard():
            raise InvalidSpec(f"{self.element_text(diff)} has zero valuations but is not an integer")
        value = diff.integer_value()
        return (value > 0) - (value < 0)

    def sign_elem(self, x: Element) -> int:
        return self.compare(x, self.zero())

    # separation

    def _witness_modulus(self, x: Element, y: Element) -> int:
        """A modulus at which the l-parts of x and y must differ"""
        z = self.l_value(x) - self.l_value(y)
        for p, value in z.support:
            if value != 0:
                return p ** (int(z.valuation(p)) + 1)
        if z.default == 0:
            raise InvalidSpec("distinct l-parts with equal profinite values; generators are dependent")
        excluded = set(z.support_primes())
        p = 2
        while p in excluded or z.default.numerator % p == 0:
            p = int(sympy.nextprime(p))
        return p

    def separate(self, x: Element, y: Element) -> Separation:
        """A formula in one variable true at x and false at y, or SameType"""
        if x == y:
            raise EqualElements(f"{self.element_text(x)} equals {self.element_text(y)}")
        if x.is_standard():
            c = x.integer_value()
            return PointFormula(c, c)
        if x.l_key != y.l_key:
            bound = self._witness_modulus(x, y)
            for n in range(2, bound + 1):
                rx = self.residue_elem(x, n)
                if rx != self.residue_elem(y, n):
                    return Congruence(n, rx)
            raise SeparationFailed(f"no separating modulus up to {bound}")
        if y.is_standard():
            c = y.integer_value()
            return PointFormula(c, c, negated=True)
        if self.ordered:
            sx, sy = self.sign_elem(x), self.sign_elem(y)
            if sx != sy:
                return PointFormula(lower=0) if sx > 0 else PointFormula(upper=0)
        return SameType()

    # sampling

    def sample_dims(self) -> List[str]:
        if self.laurent:
            window = LAURENT_SAMPLE_WINDOW
            return [laurent_dim_name(k) for k in range(-window, window + 1)]
        return list(self.dims)

    def random_element(self, rng: np.random.Generator, bound: int = SAMPLE_COEFF_BOUND) -> Element:
        """Random certified element; a0 is chosen to satisfy the purity certificate"""
        d = {}
        for name in self.sample_dims():
            if rng.random() < 0.6:
                num = int(rng.integers(-bound, bound, endpoint=True))
                den = int(rng.integers(1, 3, endpoint=True))
                d[name] = Fraction(num, den)
        a = tuple(int(rng.integers(-bound, bound, endpoint=True)) for _ in self.generators)
        m = int(rng.choice([1, 1, 2, 3, 4, 6])) if self.generators else 1
        partial = profinite.linear_combination(zip(a, self.us))
        a0 = -profinite.residue(partial, m) + m * int(rng.integers(-bound, bound, endpoint=True))
        return self.elem(d, a0, a, m)

    def random_elements(self, rng: np.random.Generator, count: int) -> List[Element]:
        return [self.random_element(rng) for _ in range(count)]

    def spanning_elements(self) -> List[Element]:
        """1, the D units and the generators"""
        return [self.one()] + [self.d_unit(name) for name in self.sample_dims()] + [
            self.gen(name) for name in self.generators
        ]

    # reporting

    def valuation_table(self) -> pd.DataFrame:
        rows = []
        for name in self.sample_dims():
            rows.append({
                "entry": name,
                "part": "D",
                "nu1": str(self.d_level_value(name, 1)),
                "nu2": str(self.d_level_value(name, 2)),
                "profinite": "",
            })
        for g in self.spec.l_generators:
            rows.append({"entry": g.name, "part": "L", "nu1": str(g.nu1), "nu2": str(g.nu2),
                         "profinite": str(g.u)})
        return pd.DataFrame(rows)

    def describe(self) -> dict:
        return {
            "mode": self.spec.mode,
            "span_structure": self.spec.span_structure,
            "d_dimensions": "pi^k, k in Z" if self.laurent else list(self.dims),
            "l_generators": list(self.generators),
            "leibnizian": self.is_leibnizian(),
        }


def _promote_levels(spec: ModelSpec) -> ModelSpec:
    entries = list(spec.d_basis) + list(spec.l_generators)
    if spec.mode != ORDERED or spec.span_structure == LAURENT or not entries:
        return spec
    if any(not e.nu1.is_zero() for e in entries):
        return spec
    logger.warning("no entry has a level-1 value; promoting level-2 values to level 1")
    return ModelSpec(
        mode=spec.mode,
        span_structure=spec.span_structure,
        d_basis=tuple(DDimension(d.name, d.nu2, SpanElement()) for d in spec.d_basis),
        l_generators=tuple(LGenerator(g.name, g.u, g.nu2, SpanElement()) for g in spec.l_generators),
    )


def _check_generators(spec: ModelSpec) -> None:
    for g in spec.l_generators:
        if g.u.is_integer():
            raise GeneratorInZ(f"generator {g.name} = {g.u} is a standard integer")
    if not spec.l_generators:
        return
    primes = sorted({p for g in spec.l_generators for p in g.u.support_primes()})
    rows = [[1] + [sympy.Rational(g.u.coordinate(p).numerator, g.u.coordinate(p).denominator)
                   for g in spec.l_generators] for p in primes]
    rows.append([1] + [sympy.Rational(g.u.default.numerator, g.u.default.denominator)
                       for g in spec.l_generators])
    rank = sympy.Matrix(rows).rank()
    if rank < len(spec.l_generators) + 1:
        raise InvalidSpec("1 and the generators satisfy a Z-linear relation in the profinite integers")


def _check_levels(spec: ModelSpec) -> None:
    laurent = spec.span_structure == LAURENT
    level1: List[Tuple[str, SpanElement]] = []
    level2: List[Tuple[str, SpanElement]] = []
    entries = [(d.name, d.nu1, d.nu2) for d in spec.d_basis] + [
        (g.name, g.nu1, g.nu2) for g in spec.l_generators
    ]
    for name, nu1, nu2 in entries:
        if nu1.is_zero() and nu2.is_zero():
            raise InvalidSpec(f"{name} has both levels zero; the order would not be total")
        if not nu1.is_zero():
            level1.append((f"nu1({name})", nu1))
        else:
            level2.append((f"nu2({name})", nu2))
    if laurent:
        for name, value in level1:
            if value.single_base() and value.single_base()[1].is_laurent:
                raise IndependenceViolation(f"{name} = {value} lies in the span of the powers of pi")
        window = range(-LAURENT_SAMPLE_WINDOW, LAURENT_SAMPLE_WINDOW + 1)
        level1 = [(f"nu1({laurent_dim_name(k)})", pi_power(k)) for k in window] + level1
    check_independence(level1)
    check_independence(level2)


def build_model(spec: ModelSpec, max_bits: int = DEFAULT_MAX_BITS) -> Model:
    """Validate a spec and build its model"""
    if spec.mode not in (ORDERED, UNORDERED):
        raise InvalidSpec(f"mode must be {ORDERED!r} or {UNORDERED!r}, got {spec.mode!r}")
    if spec.span_structure not in (FINITE, LAURENT):
        raise InvalidSpec(f"span_structure must be {FINITE!r} or {LAURENT!r}, got {spec.span_structure!r}")
    names = [d.name for d in spec.d_basis] + [g.name for g in spec.l_generators]
    if len(set(names)) != len(names):
        raise InvalidSpec(f"entry names must be distinct, got {names}")
    if spec.span_structure == LAURENT and spec.d_basis:
        raise InvalidSpec("Laurent models have the implicit D basis pi^k; d_basis must be empty")
    _check_generators(spec)
    spec = _promote_levels(spec)
    if spec.mode == ORDERED:
        _check_levels(spec)
    model = Model(spec, max_bits=max_bits)
    logger.info(
        "built %s model with %d D dimensions and %d L generators",
        spec.mode, len(model.dims), len(model.generators),
    )
    return model
