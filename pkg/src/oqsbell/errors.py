"""Exception types raised by the library."""


class OQSBellError(Exception):
    """Base class for all library errors."""


class InvalidDimensionError(OQSBellError, ValueError):
    pass


class PreconditionError(OQSBellError, ValueError):
    pass


class NumericalError(OQSBellError, ArithmeticError):
    """A numerical consistency check failed (residue, drift, negativity)."""


class DegenerateSteadyStateError(OQSBellError):
    """The Liouvillian has more than one stationary state."""

    def __init__(self, multiplicity, eigenvalues):
        self.multiplicity = multiplicity
        self.eigenvalues = eigenvalues
        super().__init__(
            f"null space of the Liouvillian has dimension {multiplicity}; "
            f"eigenvalues of smallest modulus: {list(eigenvalues)}"
        )


class ConvergenceError(OQSBellError):
    pass


class ConfigError(OQSBellError, ValueError):
    pass
