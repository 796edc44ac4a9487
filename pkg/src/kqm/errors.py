"""Exception types shared across the package."""

from __future__ import annotations


class KqmError(Exception):
    """Base class for every error raised by this package."""


class DomainError(KqmError, ValueError):
    """An input violates a positivity or range precondition."""


class DuplicateNode(KqmError, ValueError):
    """Interpolation nodes are not pairwise distinct."""


class RangeError(KqmError, IndexError):
    """A sequence index falls outside the available data."""


class PositivityError(KqmError, ValueError):
    """A requested construction is not positive on its integer tail.

    ``witness`` is the smallest integer at which positivity fails.
    """

    def __init__(self, message: str, witness: int):
        super().__init__(f"{message} (first failure at n={witness})")
        self.witness = witness


class CapError(KqmError, ValueError):
    """A preimage enumeration would exceed the supplied depth cap."""


class AdmissibilityError(KqmError, ValueError):
    """Branch data do not satisfy the hypotheses a solver requires."""


class ConstructionError(KqmError, RuntimeError):
    """A search-based construction gave up before finding a valid member."""


class SchemaError(KqmError, ValueError):
    """A problem file failed validation; ``path`` points at the offending node."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path
