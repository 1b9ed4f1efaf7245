"""Exception types shared across the package."""


class StructuralError(ValueError):
    """Malformed input: wrong site count, bad dimensions, empty collections."""


class ContractViolation(ValueError):
    """Numerically invalid input: non-Hermitian, non-positive, wrong trace."""
