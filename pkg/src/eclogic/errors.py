"""Exception hierarchy shared across the package."""


class EclogicError(Exception):
    """Base class for all package errors."""


class FormulaSyntaxError(EclogicError):
    """Raised by the parser; carries the offending position."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class BindingError(EclogicError):
    """Formula refers to a variable or value the signature does not declare."""


class ModelValidationError(EclogicError):
    """A model document violates a structural invariant."""


class FragmentError(EclogicError):
    """Operation applied to a formula outside its defined fragment."""


class BudgetExceededError(EclogicError):
    """An enumeration or construction would exceed its configured budget."""


class DerivationError(EclogicError):
    """A derivation file is malformed (distinct from a line failing to check)."""
