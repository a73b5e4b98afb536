"""Exception hierarchy shared by the library and the CLI.

The CLI maps these onto exit codes: usage/parse problems exit 2,
resource guards exit 3.
"""


class ZdglabError(Exception):
    """Base class for every error raised by zdglab."""


class DimensionMismatch(ZdglabError, ValueError):
    pass


class AlgebraError(ZdglabError, ValueError):
    """Malformed structure constants or mismatched operands."""


class NotLocalError(AlgebraError):
    pass


class StructuralImpossibility(ZdglabError, RuntimeError):
    """An invariant record that cannot occur for a correct engine."""


class PresentationError(ZdglabError, ValueError):
    """Syntax or semantic problem in a ring presentation."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class InfiniteQuotient(PresentationError):
    pass


class UnsupportedCharacteristic(ZdglabError, ValueError):
    pass


class PhiPreconditionError(ZdglabError, ValueError):
    """Raised by build_phi; ``code`` is one of NOT_LOCAL, RESIDUE_DEG,
    M2_NOT_PRINCIPAL, M3_NONZERO."""

    def __init__(self, code, message):
        self.code = code
        super().__init__(f"{code}: {message}")


class ResourceBoundExceeded(ZdglabError, RuntimeError):
    """Enumeration or search budget exceeded."""


class BudgetExceeded(ResourceBoundExceeded):
    pass
