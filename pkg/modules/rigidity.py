"""Module for automorphisms of Z-groups and the rigidity decision

Witnesses come in four shapes: the (g, h) form f(d + l) = g(d) + h(l) + l,
doubling of the level-1 D block, translation of the l-part into D, and the
multiplicative maps f_gamma(x) = x + nu_D^-1((gamma - 1) * nu1(x)).
Every NonRigid verdict carries a witness that passed verify_automorphism.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, ClassVar, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import sympy

from app.config import (
    ADVERSARIAL_CANDIDATES,
    ADVERSARIAL_HEIGHT,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    GAMMA_SEARCH_HEIGHT,
    INDEPENDENCE_CHECK_BITS,
    LAURENT_GAMMA_MAX_POWER,
    NEAR_ZERO_CONVERGENTS,
    RESIDUE_CHECK_MODULUS,
)
from modules import profinite
from modules.realspan import ONE, GammaDescriptor, SpanElement, evaluate, mul_by_gamma
from modules.zgroup import Element, Model, laurent_dim_name, laurent_exponent
from utils.errors import (
    GammaNotAdmissible,
    InvalidSpec,
    NotInvertible,
    OutsideSpan,
    PreconditionFailed,
    ZGroupError,
)
from utils.number_utils import convergents, format_rational, rationals_by_height, to_fraction
from utils.sparse import SparseVector

logger = logging.getLogger(__name__)

ProgressCallback = Optional[Callable[[float, str], None]]
VectorMap = Tuple[Tuple[str, SparseVector], ...]

RIGID = "Rigid"
NON_RIGID = "NonRigid"
UNKNOWN = "Unknown"

FINITE_DIM = "FiniteDim"
SUBFIELD = "Subfield"
COUNTEREXAMPLE_GAMMA = "CounterexampleGamma"


def _vector_json(v: SparseVector) -> dict:
    return {str(k): format_rational(c) for k, c in v.items}


def _vector_from_json(obj: Optional[Mapping]) -> SparseVector:
    return SparseVector((str(k), to_fraction(c)) for k, c in (obj or {}).items())


def _map_json(images: VectorMap) -> dict:
    return {name: _vector_json(v) for name, v in images}


def _map_from_json(obj: Optional[Mapping]) -> VectorMap:
    return tuple(sorted((str(k), _vector_from_json(v)) for k, v in (obj or {}).items()))


def _vector_text(v: SparseVector) -> str:
    if v.is_zero():
        return "0"
    return " + ".join(f"{format_rational(c)}*{k}" for k, c in v.items).replace("+ -", "- ")


def _with_d(x: Element, d: SparseVector) -> Element:
    return Element(d, x.a0, x.a, x.m)


def _l_image(model: Model, x: Element, images: Mapping[str, SparseVector]) -> SparseVector:
    """(sum_j a_j * images[u_j]) / m; zero on 1 and on D"""
    total = SparseVector()
    for name, a in zip(model.generators, x.a):
        if a and name in images:
            total = total + images[name].scale(a)
    return total.scale(Fraction(1, x.m))


def _is_level1(model: Model, name: str) -> bool:
    return not model.d_level_value(name, 1).is_zero()


class Automorphism:
    """Base class for witness maps; instances are immutable"""

    form: ClassVar[str] = ""

    def apply(self, model: Model, x: Element) -> Element:
        raise NotImplementedError

    def inverse(self, model: Model) -> "Automorphism":
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def describe(self) -> str:
        return self.form


@dataclass(frozen=True)
class GH(Automorphism):
    """f(d + l) = g(d) + h(l) + l

    `g` lists the images of the D dimensions (missing ones are fixed);
    a Laurent model uses `shift` = q * pi^k instead.
    """

    g: VectorMap = ()
    shift: Optional[GammaDescriptor] = None
    h: VectorMap = ()

    form: ClassVar[str] = "gh"

    def g_map(self, d: SparseVector) -> SparseVector:
        if self.shift is not None:
            k, q = self.shift.pi_power, self.shift.q
            return d.map_keys(lambda name: SparseVector.unit(laurent_dim_name(laurent_exponent(name) + k), q))
        images = dict(self.g)
        return d.map_keys(lambda name: images.get(name, SparseVector.unit(name)))

    def apply(self, model: Model, x: Element) -> Element:
        return _with_d(x, self.g_map(x.d) + _l_image(model, x, dict(self.h)))

    def inverse(self, model: Model) -> "GH":
        if self.shift is not None:
            g_inv = GH(shift=self.shift.inverse())
        else:
            g_inv = GH(g=_inverse_images(model, self.g))
        h_inv = tuple((name, -g_inv.g_map(v)) for name, v in self.h)
        return GH(g=g_inv.g, shift=g_inv.shift, h=h_inv)

    def is_identity(self) -> bool:
        if self.shift is not None and not self.shift.is_one:
            return False
        fixed = all(v == SparseVector.unit(name) for name, v in self.g)
        return fixed and all(v.is_zero() for _, v in self.h)

    def to_json(self) -> dict:
        return {
            "form": self.form,
            "g": None if self.shift is not None else _map_json(self.g),
            "shift": None if self.shift is None else self.shift.text(),
            "h": _map_json(self.h),
        }

    def describe(self) -> str:
        if self.shift is not None:
            g_text = f"g = multiplication by {self.shift}"
        elif self.g:
            g_text = "g: " + ", ".join(f"{name} -> {_vector_text(v)}" for name, v in self.g)
        else:
            g_text = "g = id"
        h_text = ", ".join(f"h({name}) = {_vector_text(v)}" for name, v in self.h if not v.is_zero())
        return f"{g_text}; {h_text or 'h = 0'}"


def _g_matrix(model: Model, images: VectorMap) -> sympy.Matrix:
    lookup = dict(images)
    columns = [lookup.get(name, SparseVector.unit(name)) for name in model.dims]
    return sympy.Matrix(len(model.dims), len(model.dims), lambda i, j: sympy.Rational(
        columns[j].get(model.dims[i]).numerator, columns[j].get(model.dims[i]).denominator
    ))


def _inverse_images(model: Model, images: VectorMap) -> VectorMap:
    if not model.dims:
        return ()
    matrix = _g_matrix(model, images)
    if matrix.det() == 0:
        raise NotInvertible("g is singular on the D dimensions")
    inv = matrix.inv()
    out = []
    for j, name in enumerate(model.dims):
        column = {model.dims[i]: Fraction(int(inv[i, j].p), int(inv[i, j].q)) for i in range(len(model.dims))}
        out.append((name, SparseVector(column)))
    return tuple(out)


@dataclass(frozen=True)
class DShift(Automorphism):
    """Multiply the level-1 D block by `factor` and fix everything else"""

    factor: Fraction = Fraction(2)

    form: ClassVar[str] = "d-shift"

    def __post_init__(self):
        if self.factor <= 0:
            raise PreconditionFailed(f"d-shift factor must be positive, got {self.factor}")

    def apply(self, model: Model, x: Element) -> Element:
        d = x.d.map_keys(
            lambda name: SparseVector.unit(name, self.factor if _is_level1(model, name) else 1)
        )
        return _with_d(x, d)

    def inverse(self, model: Model) -> "DShift":
        return DShift(1 / self.factor)

    def to_json(self) -> dict:
        return {"form": self.form, "factor": format_rational(self.factor)}

    def describe(self) -> str:
        return f"multiply the level-1 part of D by {format_rational(self.factor)}"


@dataclass(frozen=True)
class LTranslate(Automorphism):
    """x -> x + f0(x), with f0 sending generators into D and vanishing on D"""

    images: VectorMap = ()

    form: ClassVar[str] = "l-translate"

    def apply(self, model: Model, x: Element) -> Element:
        return _with_d(x, x.d + _l_image(model, x, dict(self.images)))

    def inverse(self, model: Model) -> "LTranslate":
        return LTranslate(tuple((name, -v) for name, v in self.images))

    def to_json(self) -> dict:
        return {"form": self.form, "images": _map_json(self.images)}

    def describe(self) -> str:
        return ", ".join(f"{name} -> {name} + {_vector_text(v)}" for name, v in self.images)


@dataclass(frozen=True)
class FGamma(Automorphism):
    """f_gamma(x) = x + nu_D^-1((gamma - 1) * nu1(x))"""

    gamma: GammaDescriptor

    form: ClassVar[str] = "f-gamma"

    def apply(self, model: Model, x: Element) -> Element:
        if self.gamma.is_one:
            return x
        value = model.nu(x, 1)
        moved = mul_by_gamma(value, self.gamma, model.spec.span_structure) - value
        return _with_d(x, x.d + model.nu1_preimage(moved))

    def inverse(self, model: Model) -> "FGamma":
        return FGamma(self.gamma.inverse())

    def to_json(self) -> dict:
        return {"form": self.form, "gamma": self.gamma.text()}

    def describe(self) -> str:
        return f"f_gamma with gamma = {self.gamma}"


def identity() -> GH:
    return GH()


def automorphism_from_json(obj: Mapping) -> Automorphism:
    """Read a witness; a full verdict document is accepted too"""
    if "status" in obj:
        if not obj.get("witness"):
            raise InvalidSpec(f"{obj['status']} verdict carries no witness")
        obj = obj["witness"]
    form = obj.get("form")
    if form == GH.form:
        shift = obj.get("shift")
        return GH(
            g=_map_from_json(obj.get("g")),
            shift=GammaDescriptor.parse(str(shift)) if shift else None,
            h=_map_from_json(obj.get("h")),
        )
    if form == DShift.form:
        return DShift(to_fraction(obj.get("factor", 2)))
    if form == LTranslate.form:
        return LTranslate(_map_from_json(obj.get("images")))
    if form == FGamma.form:
        return FGamma(GammaDescriptor.parse(str(obj["gamma"])))
    raise InvalidSpec(f"unknown automorphism form {form!r}")


# construction

GInput = Union[None, int, str, Fraction, GammaDescriptor, Mapping]


def _d_vector(model: Model, value) -> SparseVector:
    pairs = value.items if isinstance(value, SparseVector) else value.items()
    return SparseVector((model.dim_key(str(k)), to_fraction(c)) for k, c in pairs)


def _h_images(model: Model, h: Optional[Mapping]) -> VectorMap:
    images = []
    for name, value in (h or {}).items():
        if name not in model.generators:
            raise InvalidSpec(f"h is given on unknown generator {name!r}")
        images.append((name, _d_vector(model, value)))
    return tuple(sorted(images))


def aut_from_gh(model: Model, g: GInput = None, h: Optional[Mapping] = None) -> GH:
    """Automorphism d + l -> g(d) + h(l) + l

    `g` is None (identity), a scalar c (c * id), a Laurent shift, or a map
    from D dimensions to their images.
    """
    images = _h_images(model, h)
    if isinstance(g, (int, str, Fraction)) and not isinstance(g, bool):
        c = to_fraction(g)
        if c == 0:
            raise NotInvertible("g = 0 is not invertible")
        if model.laurent:
            g = GammaDescriptor(c)
        else:
            g = {name: {name: c} for name in model.dims}
    if model.laurent:
        if g is None:
            return GH(h=images)
        if not isinstance(g, GammaDescriptor):
            raise InvalidSpec("a Laurent model takes g as a shift q*pi^k")
        if g.q == 0:
            raise NotInvertible("g = 0 is not invertible")
        return GH(shift=None if g.is_one else g, h=images)
    if isinstance(g, GammaDescriptor):
        if g.pi_power != 0:
            raise InvalidSpec("a finite model takes g as a rational matrix")
        g = {name: {name: g.q} for name in model.dims}
    g_images = tuple(sorted((model.dim_key(str(k)), _d_vector(model, v)) for k, v in (g or {}).items()))
    aut = GH(g=g_images, h=images)
    _inverse_images(model, g_images)
    return aut


def doubling_witness(model: Model) -> GH:
    return aut_from_gh(model, g=2)


def extract_gh(model: Model, f: Automorphism) -> Tuple[Union[Dict[str, SparseVector], GammaDescriptor], Dict[str, SparseVector]]:
    """(g, h) with aut_from_gh(model, g, h) equal to f on the D units and generators"""
    h = {}
    for name in model.generators:
        u = model.gen(name)
        moved = f.apply(model, u) - u
        if moved.has_l_part():
            raise PreconditionFailed(f"f changes the l-part of {name}")
        h[name] = moved.d
    if model.laurent:
        image = f.apply(model, model.d_unit(laurent_dim_name(0)))
        if image.has_l_part() or len(image.d) != 1:
            raise PreconditionFailed("f is not a monomial shift on D")
        name, q = image.d.items[0]
        return GammaDescriptor(q, laurent_exponent(name)), h
    g = {}
    for name in model.dims:
        image = f.apply(model, model.d_unit(name))
        if image.has_l_part():
            raise PreconditionFailed(f"f moves the D unit {name} out of D")
        g[name] = image.d
    return g, h


def d_shift_witness(model: Model) -> DShift:
    """Doubling of the level-1 D block; needs L inside the level-2 subgroup"""
    if not model.ordered:
        raise PreconditionFailed("d-shift witnesses are for ordered models")
    if model.level1_generators():
        raise PreconditionFailed("L is cofinal: some generator has a nonzero level-1 value")
    if not model.level1_dims():
        raise PreconditionFailed("no D dimension has a nonzero level-1 value")
    return DShift(Fraction(2))


def l_translate_witness(model: Model) -> LTranslate:
    """Send one level-1 generator u to u + d for a level-2 D unit d"""
    if not model.ordered:
        raise PreconditionFailed("l-translate witnesses are for ordered models")
    level2 = model.level2_dims()
    generators = model.level1_generators()
    if not level2:
        raise PreconditionFailed("D is cofinal: every D dimension has a nonzero level-1 value")
    if not generators:
        raise PreconditionFailed("no L generator has a nonzero level-1 value")
    return LTranslate(((generators[0], SparseVector.unit(level2[0])),))


def gamma_obstruction(model: Model, gamma: GammaDescriptor) -> Optional[str]:
    """Why gamma*D'' = D'' or (gamma - 1)*L'' in D'' fails, or None"""
    structure = model.spec.span_structure
    try:
        for name in model.level1_dims():
            value = model.d_level_value(name, 1)
            for factor in (gamma, gamma.inverse()):
                image = mul_by_gamma(value, factor, structure)
                if not model.in_d_values(image):
                    return f"{factor} * nu1({name}) = {image} is not in D''"
        for name, value in zip(model.generators, model.l_nu1):
            moved = mul_by_gamma(value, gamma, structure) - value
            if not model.in_d_values(moved):
                return f"({gamma} - 1) * nu1({name}) = {moved} is not in D''"
    except OutsideSpan as exc:
        return str(exc)
    return None


def build_f_gamma(model: Model, gamma: GammaDescriptor) -> FGamma:
    if not model.ordered:
        raise GammaNotAdmissible("f_gamma needs an ordered model")
    if model.level2_dims() or not model.level1_dims():
        raise GammaNotAdmissible("f_gamma needs an archimedean D with nonzero level-1 values")
    if not gamma.is_positive:
        raise GammaNotAdmissible(f"gamma must be positive, got {gamma}")
    if gamma.is_one:
        return FGamma(gamma)
    reason = gamma_obstruction(model, gamma)
    if reason is not None:
        raise GammaNotAdmissible(reason)
    return FGamma(gamma)


# verification

CHECKS = ("unit", "in_group", "order", "additivity", "residues", "inverse")


@dataclass
class CheckResult:
    name: str
    passed: bool = True
    checked: int = 0
    counterexample: Optional[str] = None
    skipped: bool = False


@dataclass
class VerificationReport:
    automorphism: str
    mode: str
    samples: int
    checks: List[CheckResult]
    non_identity: bool = False
    moved_example: Optional[str] = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed_checks(self) -> List[str]:
        return [c.name for c in self.checks if not c.passed]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([
            {
                "check": c.name,
                "status": "skipped" if c.skipped else ("pass" if c.passed else "FAIL"),
                "checked": c.checked,
                "counterexample": c.counterexample or "",
            }
            for c in self.checks
        ])

    def to_json(self) -> dict:
        return {
            "automorphism": self.automorphism,
            "mode": self.mode,
            "samples": self.samples,
            "passed": self.passed,
            "non_identity": self.non_identity,
            "moved_example": self.moved_example,
            "checks": [
                {"check": c.name, "passed": c.passed, "checked": c.checked, "skipped": c.skipped,
                 "counterexample": c.counterexample}
                for c in self.checks
            ],
        }


def _midpoint(e: SpanElement, bits: int) -> Fraction:
    enclosure = evaluate(e, bits)
    return (enclosure.lo + enclosure.hi) / 2


def near_zero_elements(
    model: Model,
    count: int = NEAR_ZERO_CONVERGENTS,
    bits: int = INDEPENDENCE_CHECK_BITS,
) -> List[Element]:
    """q*e_i - p*e_j for convergents p/q of nu(e_i)/nu(e_j), on each level"""
    if not model.ordered:
        return []
    near_zero = []
    for level in (1, 2):
        basis = []
        for name in model.sample_dims():
            value = model.d_level_value(name, level)
            if not value.is_zero() and (level == 1 or model.d_level_value(name, 1).is_zero()):
                basis.append((model.d_unit(name), value))
        for name, nu1, nu2 in zip(model.generators, model.l_nu1, model.l_nu2):
            value = nu1 if level == 1 else nu2
            if not value.is_zero() and (level == 1 or nu1.is_zero()):
                basis.append((model.gen(name), value))
        for i, (x, vx) in enumerate(basis):
            for y, vy in basis[i + 1:]:
                ratio = _midpoint(vx, bits) / _midpoint(vy, bits)
                for approx in convergents(ratio, count):
                    candidate = x.scale(approx.denominator) - y.scale(approx.numerator)
                    if candidate != model.zero():
                        near_zero.append(candidate)
    return near_zero


def verify_automorphism(
    model: Model,
    f: Automorphism,
    samples: int = DEFAULT_SAMPLES,
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    fail_fast: bool = False,
    progress_callback: ProgressCallback = None,
    rng: Optional[np.random.Generator] = None,
    near_zero: Optional[List[Element]] = None,
) -> VerificationReport:
    """Check f on random certified elements and near-zero elements"""
    rng = rng if rng is not None else np.random.default_rng(seed)
    pool = model.spanning_elements() + model.random_elements(rng, samples)
    near_zero = near_zero_elements(model) if near_zero is None else near_zero
    everything = pool + near_zero
    results = {name: CheckResult(name) for name in CHECKS}
    images: Dict[Element, Element] = {}

    def image(x: Element) -> Element:
        if x not in images:
            images[x] = f.apply(model, x)
        return images[x]

    def fail(name: str, text: str) -> None:
        results[name].passed = False
        if results[name].counterexample is None:
            results[name].counterexample = text

    def pairs(source: Sequence[Element], count: int) -> List[Tuple[Element, Element]]:
        idx = rng.integers(0, len(source), size=(count, 2))
        return [(source[int(i)], source[int(j)]) for i, j in idx]

    text = model.element_text

    def check_unit() -> None:
        one = model.one()
        results["unit"].checked = 1
        if image(one) != one:
            fail("unit", f"f(1) = {text(image(one))}")

    def check_in_group() -> None:
        for x in everything:
            results["in_group"].checked += 1
            try:
                model.certify(image(x))
            except ZGroupError as exc:
                fail("in_group", f"f({text(x)}): {exc}")
                return

    def check_order() -> None:
        if not model.ordered:
            results["order"].skipped = True
            return
        zero = model.zero()
        for x, y in [(p, zero) for p in near_zero + pool] + pairs(pool, trials):
            results["order"].checked += 1
            before, after = model.compare(x, y), model.compare(image(x), image(y))
            if before != after:
                fail("order", f"compare({text(x)}, {text(y)}) = {before} but the images compare as {after}")
                return

    def check_additivity() -> None:
        for x, y in pairs(everything, trials):
            results["additivity"].checked += 1
            if f.apply(model, x + y) != image(x) + image(y):
                fail("additivity", f"f({text(x)} + {text(y)}) != f({text(x)}) + f({text(y)})")
                return

    def check_residues() -> None:
        for x in pool:
            before, after = model.l_value(x), model.l_value(image(x))
            for n in range(2, RESIDUE_CHECK_MODULUS + 1):
                results["residues"].checked += 1
                if profinite.residue(before, n) != profinite.residue(after, n):
                    fail("residues", f"res_{n} differs at {text(x)}")
                    return

    def check_inverse() -> None:
        inverse = f.inverse(model)
        for x in pool:
            results["inverse"].checked += 1
            if inverse.apply(model, image(x)) != x:
                fail("inverse", f"f^-1(f({text(x)})) != {text(x)}")
                return

    stages = [
        ("unit", check_unit),
        ("in_group", check_in_group),
        ("order", check_order),
        ("additivity", check_additivity),
        ("residues", check_residues),
        ("inverse", check_inverse),
    ]
    for index, (name, stage) in enumerate(stages):
        try:
            stage()
        except ZGroupError as exc:
            fail(name, f"{type(exc).__name__}: {exc}")
        if progress_callback:
            progress_callback((index + 1) / len(stages), f"{name} check")
        if fail_fast and not results[name].passed:
            for later, _ in stages[index + 1:]:
                results[later].skipped = True
            break

    report = VerificationReport(f.describe(), model.spec.mode, len(pool), [results[n] for n in CHECKS])
    for x in everything:
        try:
            moved = image(x)
        except ZGroupError:
            break
        if moved != x:
            report.non_identity = True
            report.moved_example = f"f({text(x)}) = {text(moved)}"
            break
    logger.debug("verified %s: passed=%s", report.automorphism, report.passed)
    return report


def valuation_pairs(model: Model, f: Automorphism, elements: Sequence[Element], bits: int = 64) -> pd.DataFrame:
    """nu1(x) against nu1(f(x)) as floats, for plotting"""
    rows = []
    for x in elements:
        y = f.apply(model, x)
        rows.append({
            "element": model.element_text(x),
            "nu1_x": float(_midpoint(model.nu(x, 1), bits)),
            "nu1_fx": float(_midpoint(model.nu(y, 1), bits)),
        })
    return pd.DataFrame(rows)


# multiplier condition: the only gamma > 0 with gamma*D'' = D'' and (gamma - 1)*L'' in D'' is 1

@dataclass(frozen=True)
class MultiplierCondition:
    branches: Tuple[str, ...]
    gamma: Optional[GammaDescriptor] = None
    candidates_checked: int = 0
    reason: str = ""

    @property
    def branch(self) -> str:
        return self.branches[0]

    def to_json(self) -> dict:
        return {
            "branch": self.branch,
            "branches": list(self.branches),
            "gamma": None if self.gamma is None else self.gamma.text(),
            "candidates_checked": self.candidates_checked,
            "reason": self.reason,
        }


def gamma_candidates(
    laurent: bool,
    max_power: int = LAURENT_GAMMA_MAX_POWER,
    height: int = GAMMA_SEARCH_HEIGHT,
) -> List[GammaDescriptor]:
    """q*pi^k for k = 1, -1, 2, -2, ... then rational q != 1; small heights first"""
    qs = rationals_by_height(height, positive_only=True)
    powers = [s * k for k in range(1, max_power + 1) for s in (1, -1)] if laurent else []
    out = [GammaDescriptor(q, k) for k in powers for q in qs]
    out += [GammaDescriptor(q, 0) for q in qs if q != 1]
    return out


def multiplier_condition_report(
    model: Model,
    max_power: int = LAURENT_GAMMA_MAX_POWER,
    height: int = GAMMA_SEARCH_HEIGHT,
) -> MultiplierCondition:
    if not model.laurent:
        branches = (FINITE_DIM,)
        reason = "dim_Q(D'') is finite, so the multiplier condition holds"
        if all(base == ONE for base in model.d_span.basis):
            branches = (FINITE_DIM, SUBFIELD)
            reason += "; D'' = Q is a subfield of R"
        return MultiplierCondition(branches, reason=reason)
    candidates = gamma_candidates(True, max_power, height)
    for index, gamma in enumerate(candidates, 1):
        if gamma_obstruction(model, gamma) is None:
            logger.info("gamma = %s satisfies the multiplier equations", gamma)
            return MultiplierCondition(
                (COUNTEREXAMPLE_GAMMA,), gamma=gamma, candidates_checked=index,
                reason=f"gamma = {gamma} satisfies gamma*D'' = D'' and (gamma - 1)*L'' in D''",
            )
    return MultiplierCondition(
        (UNKNOWN,), candidates_checked=len(candidates),
        reason=f"no gamma = q*pi^k with |k| <= {max_power} and height(q) <= {height} is admissible",
    )


# decision

@dataclass
class Verdict:
    status: str
    justification: List[str] = field(default_factory=list)
    witness: Optional[Automorphism] = None
    report: Optional[VerificationReport] = None
    condition: Optional[MultiplierCondition] = None

    def to_json(self) -> dict:
        out = {"status": self.status, "justification": list(self.justification)}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        if self.report is not None:
            out["verification"] = self.report.to_json()
        if self.condition is not None:
            out["multiplier_condition"] = self.condition.to_json()
        return out


def _witness_for_split_d(model: Model) -> Automorphism:
    try:
        return l_translate_witness(model)
    except PreconditionFailed:
        return d_shift_witness(model)


def decide_rigidity(
    model: Model,
    samples: int = DEFAULT_SAMPLES,
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    progress_callback: ProgressCallback = None,
) -> Verdict:
    """Rigid / NonRigid with a verified witness / Unknown"""
    condition = None
    if not model.ordered:
        if model.is_leibnizian():
            return Verdict(RIGID, [
                "unordered model with D = 0",
                "the residue map embeds G into the profinite integers and fixes every element",
            ])
        justification = ["unordered model with D != 0", "d + l -> 2d + l is an automorphism"]
        witness = doubling_witness(model)
    elif model.is_leibnizian():
        return Verdict(RIGID, [
            "ordered model with D = 0 is Leibnizian: distinct elements have distinct types",
            "a Leibnizian structure has no automorphism but the identity",
        ])
    else:
        level1, level2 = model.level1_dims(), model.level2_dims()
        if level1 and level2:
            justification = ["D is not archimedean: its values lie on both levels"]
            witness = _witness_for_split_d(model)
        elif not level1:
            justification = ["D is not cofinal: every D value lies at level 2"]
            witness = l_translate_witness(model)
        elif not model.level1_generators():
            justification = ["L is not cofinal: every generator value lies at level 2"]
            witness = d_shift_witness(model)
        else:
            justification = ["D is archimedean and cofinal", "L is cofinal"]
            condition = multiplier_condition_report(model)
            justification.append(condition.reason)
            if condition.branch == FINITE_DIM:
                justification.append(
                    "with D archimedean and cofinal and L cofinal, G is rigid iff the multiplier condition holds"
                )
                logger.info("model is rigid")
                return Verdict(RIGID, justification, condition=condition)
            if condition.branch == UNKNOWN:
                return Verdict(UNKNOWN, justification, condition=condition)
            witness = build_f_gamma(model, condition.gamma)

    report = verify_automorphism(model, witness, samples, trials, seed=seed, progress_callback=progress_callback)
    if not report.passed or not report.non_identity:
        reason = ", ".join(report.failed_checks()) or "identity on every sample"
        logger.warning("witness %s failed verification: %s", witness.describe(), reason)
        justification.append(f"witness {witness.describe()} failed verification ({reason})")
        return Verdict(UNKNOWN, justification, report=report, condition=condition)
    logger.info("model is not rigid: %s", witness.describe())
    return Verdict(NON_RIGID, justification, witness, report, condition)


# adversarial search on the rigid side

@dataclass
class AdversarialResult:
    frame: pd.DataFrame

    @property
    def candidates(self) -> int:
        return len(self.frame)

    @property
    def passing(self) -> pd.DataFrame:
        if self.frame.empty:
            return self.frame
        return self.frame[self.frame["passed"] & self.frame["non_identity"]]

    @property
    def found_none(self) -> bool:
        return self.passing.empty

    def to_json(self) -> dict:
        return {
            "candidates": self.candidates,
            "constructed": int(self.frame["constructed"].sum()) if not self.frame.empty else 0,
            "passing_non_identity": self.passing["description"].tolist(),
        }


def _pick(rng: np.random.Generator, values: Sequence[Fraction], nonzero: bool = False) -> Fraction:
    while True:
        q = values[int(rng.integers(0, len(values)))]
        if q or not nonzero:
            return q


def _random_gh(model: Model, rng: np.random.Generator, values: Sequence[Fraction]) -> Tuple[GInput, dict]:
    dims = model.sample_dims()
    if model.laurent:
        k = int(rng.integers(-LAURENT_GAMMA_MAX_POWER, LAURENT_GAMMA_MAX_POWER, endpoint=True))
        g: GInput = GammaDescriptor(_pick(rng, values, nonzero=True), k)
    else:
        g = {}
        for name in dims:
            if rng.random() < 0.5:
                g[name] = {name: _pick(rng, values, nonzero=True)}
            else:
                g[name] = {other: _pick(rng, values) for other in dims}
    h = {}
    for name in model.generators:
        if dims and rng.random() < 0.7:
            chosen = rng.choice(len(dims), size=min(len(dims), 2), replace=False)
            h[name] = {dims[int(i)]: _pick(rng, values) for i in chosen}
    return g, h


def adversarial_search(
    model: Model,
    candidates: int = ADVERSARIAL_CANDIDATES,
    height: int = ADVERSARIAL_HEIGHT,
    seed: int = DEFAULT_SEED,
    samples: int = 20,
    trials: int = 20,
    progress_callback: ProgressCallback = None,
) -> AdversarialResult:
    """Try GH forms and small gammas; a rigid model admits none but the identity"""
    rng = np.random.default_rng(seed)
    values = rationals_by_height(height)
    gammas = gamma_candidates(model.laurent, LAURENT_GAMMA_MAX_POWER, height)[: max(1, candidates // 10)]
    near_zero = near_zero_elements(model)
    rows = []
    for index in range(candidates):
        row = {"candidate": index, "kind": "", "description": "", "constructed": False,
               "passed": False, "non_identity": False, "failed_check": ""}
        try:
            if index < len(gammas):
                row["kind"] = "gamma"
                row["description"] = f"f_gamma with gamma = {gammas[index]}"
                f: Automorphism = build_f_gamma(model, gammas[index])
            else:
                row["kind"] = "gh"
                g, h = _random_gh(model, rng, values)
                f = aut_from_gh(model, g, h)
                row["description"] = f.describe()
        except ZGroupError as exc:
            row["failed_check"] = f"construction: {exc}"
            rows.append(row)
            continue
        row["constructed"] = True
        report = verify_automorphism(
            model, f, samples, trials, fail_fast=True,
            rng=np.random.default_rng([seed, index]), near_zero=near_zero,
        )
        row["passed"] = report.passed
        row["non_identity"] = report.non_identity
        row["failed_check"] = ", ".join(report.failed_checks())
        rows.append(row)
        if progress_callback and (index + 1) % 50 == 0:
            progress_callback((index + 1) / candidates, f"{index + 1}/{candidates} candidates")
    result = AdversarialResult(pd.DataFrame(rows))
    logger.info(
        "adversarial search: %d candidates, %d non-identity automorphisms passed",
        result.candidates, len(result.passing),
    )
    return result
