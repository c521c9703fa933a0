"""Exception hierarchy for the Z-group toolkit"""

from typing import Optional


class ZGroupError(ValueError):
    """Base class for every domain error raised by the toolkit"""


# Profinite integers

class InvalidComponent(ZGroupError):
    """A p-adic coordinate whose denominator is divisible by p"""


class NotDivisible(ZGroupError):
    """Exact division requested for an element with nonzero residue"""


# Real spans

class InvalidBaseReal(ZGroupError):
    """Malformed or non-canonical base real"""


class PrecisionExhausted(ZGroupError):
    """Sign could not be separated from zero within the bit budget"""

    def __init__(self, max_bits: int):
        super().__init__(f"interval still straddles 0 at {max_bits} bits")
        self.max_bits = max_bits


class OutsideSpan(ZGroupError):
    """A product or preimage leaves the declared span"""


class IndependenceViolation(ZGroupError):
    """Declared Q-linearly independent reals are dependent"""


# Presburger formulas

class FormulaSyntaxError(ZGroupError):
    """Parse error with position and expected token"""

    def __init__(self, position: int, expected: str, found: Optional[str] = None):
        found_text = f", found {found!r}" if found is not None else ""
        super().__init__(f"at position {position}: expected {expected}{found_text}")
        self.position = position
        self.expected = expected


class CapacityExceeded(ZGroupError):
    """Formula grew beyond the node cap"""

    def __init__(self, cap: int, size: int):
        super().__init__(f"formula size {size} exceeds node cap {cap}")
        self.cap = cap
        self.size = size


class UnboundVariable(ZGroupError):
    """Evaluation met a free variable with no assigned value"""

    def __init__(self, name: str):
        super().__init__(f"variable {name!r} is not assigned")
        self.name = name


# Models

class InvalidSpec(ZGroupError):
    """Model spec is structurally invalid"""


class GeneratorInZ(ZGroupError):
    """An L-generator is a standard integer"""


class NotInGroup(ZGroupError):
    """Purity certificate failed: the element is not in the group"""


class SeparationFailed(ZGroupError):
    """No modulus up to the witness bound tells two l-parts apart"""


class EqualElements(ZGroupError):
    """Separation requested for two equal elements"""


class UnknownDemo(ZGroupError):
    """Demo name not in the catalogue"""


class ModeError(ZGroupError):
    """Operation needs the order but the model is unordered"""


# Rigidity

class NotInvertible(ZGroupError):
    """The linear part of a witness is singular"""


class PreconditionFailed(ZGroupError):
    """A witness construction does not apply to this model"""


class GammaNotAdmissible(ZGroupError):
    """gamma violates gamma*D'' = D'' or (gamma - 1)*L'' within D''"""
