"""Exception hierarchy with stable error codes for the CLI."""

from __future__ import annotations


class HeightForgeError(Exception):
    """Base class. ``code`` is the stable identifier surfaced by the CLI."""

    code = "ERROR"


class UnsupportedPrime(HeightForgeError):
    code = "UNSUPPORTED_PRIME"

    def __init__(self, p: int, reason: str):
        super().__init__(f"prime {p} is not supported: {reason}")
        self.p = p
        self.reason = reason


class PrecisionExhausted(HeightForgeError):
    code = "PRECISION_EXHAUSTED"


class TVanishesAtPoint(HeightForgeError):
    code = "T_VANISHES"


class KernelMeetsSubspace(HeightForgeError):
    code = "KERNEL_MEETS_SUBSPACE"


class DependentBasis(HeightForgeError):
    code = "DEPENDENT_BASIS"


class IrreducibilityNotCertified(HeightForgeError):
    code = "IRREDUCIBILITY_NOT_CERTIFIED"


class NotOnVariety(HeightForgeError):
    code = "NOT_ON_VARIETY"


class BoundInapplicable(HeightForgeError):
    code = "BOUND_INAPPLICABLE"


class CongruenceFailure(HeightForgeError):
    code = "CONGRUENCE_FAILURE"


class ParseError(HeightForgeError):
    code = "PARSE_ERROR"

    def __init__(self, message: str, text: str = "", position: int | None = None):
        if position is not None:
            message = f"{message} at position {position}"
            if text:
                message += f"\n  {text}\n  {' ' * position}^"
        super().__init__(message)
        self.position = position
