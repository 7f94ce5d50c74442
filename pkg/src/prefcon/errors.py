"""Error types shared across the package.

Every error carries a stable ``code`` string so the CLI and the HTTP service
can map failures to documented outcomes without string-matching messages.
"""

from __future__ import annotations


class PrefconError(Exception):
    """Base class; ``code`` identifies the failure kind."""

    code = "ERROR"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details


class ValidationError(PrefconError):
    """A precondition on an operation's inputs does not hold."""

    code = "VALIDATION"


class NotStrictPartialOrder(ValidationError):
    code = "NOT_SPO"


class ConNotSubset(ValidationError):
    code = "CON_NOT_SUBSET"


class ProtectNotSubset(ValidationError):
    code = "PROTECT_NOT_SUBSET"


class ProtectionConflict(PrefconError):
    """The closed protected set overlaps the edges being discarded."""

    code = "PROTECTION_CONFLICT"


class NotFinitelyStratifiable(PrefconError):
    code = "NOT_FINITELY_STRATIFIABLE"


class OracleTooLarge(PrefconError):
    code = "ORACLE_TOO_LARGE"


class MixedSignSet(ValidationError):
    code = "MIXED_SIGN_SET"


class FormulaSizeLimit(PrefconError):
    """Normalization would exceed the configured atom budget."""

    code = "FORMULA_SIZE_LIMIT"


class IterationCap(PrefconError):
    """A fixpoint loop hit its defensive bound; should be unreachable."""

    code = "ITERATION_CAP"


class FormulaParseError(PrefconError):
    """Syntax error in formula text; ``position`` is a 0-based offset."""

    code = "PARSE_ERROR"

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})", position=position)
        self.position = position


class FormulaTypeError(PrefconError):
    """Well-formed syntax applied against the schema incorrectly."""

    code = "TYPE_ERROR"


class DatasetError(PrefconError):
    code = "PARSE_ERROR"


class DuplicateKey(DatasetError):
    code = "DUPLICATE_KEY"


class SkylineSpecError(ValidationError):
    """min/max requested on an attribute whose domain is not ordered."""

    code = "SPEC_ON_C_ATTRIBUTE"
