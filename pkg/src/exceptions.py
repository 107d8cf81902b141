"""
Exceptions raised by the toolkit
"""


class ToolkitError(Exception):
    """Base class for every toolkit error"""


# Arithmetic input errors

class NotPrime(ToolkitError, ValueError):
    """A prime was required"""


class NotOddPrime(ToolkitError, ValueError):
    """An odd prime was required"""


class ZeroInput(ToolkitError, ValueError):
    """Zero has no squarefree part"""


class NotAField(ToolkitError, ValueError):
    """Q(sqrt(D)) is not a quadratic field for D in {0, 1}"""


# Polynomial errors

class ZeroPolynomial(ToolkitError, ValueError):
    """The zero polynomial was passed where a nonzero one is needed"""


class ConstantPolynomial(ToolkitError, ValueError):
    """A polynomial of degree at least one was required"""


class RadicalResidue(ToolkitError):
    """A product over Q(sqrt(a)) kept a nonzero radical part"""


class NonIntegralResult(ToolkitError):
    """Clearing the content did not produce integer coefficients"""


# Registry errors

class UnsupportedLevel(ToolkitError, ValueError):
    """The level N is not one of the hyperelliptic levels in the registry"""


class RegistryError(ToolkitError):
    """The registry data file is missing, corrupt or fails its checksum"""


class MissingFactorization(ToolkitError):
    """The registry has no Q(sqrt(a)) factorization for the level"""


# Engine errors

class InsufficientPrecision(ToolkitError):
    """
    The modulus p^l is too small to decide the requested conclusion

    Attributes:
        needed_exponent: An exponent that would be large enough
    """

    def __init__(self, message: str, needed_exponent: int):
        super().__init__(message)
        self.needed_exponent = needed_exponent


class EscalationExceeded(ToolkitError):
    """
    Saturation or missing precision persisted up to the escalation limit

    Attributes:
        last_exponent: The last exponent that was tried
    """

    def __init__(self, message: str, last_exponent: int):
        super().__init__(message)
        self.last_exponent = last_exponent


# Verification errors

class HypothesisViolated(ToolkitError, ValueError):
    """The hypotheses of the criterion being applied do not hold"""


class NoRoot(ToolkitError):
    """The model polynomial has no suitable root modulo p"""


class Exhausted(ToolkitError):
    """The scan limit was reached before enough witnesses were found"""


# Elliptic family errors

class CuspParameter(ToolkitError, ValueError):
    """The parameter is a cusp value of the family (u = 0 or u = -1)"""


class Undefined(ToolkitError, ValueError):
    """The j-invariant has no finite valuation at this parameter"""


# Command line errors

class UnknownTable(ToolkitError, ValueError):
    """The requested table does not exist"""
