"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ValenceMismatchError(ValueError):
    """Two series (or a series and a parameter set) disagree on the valence."""


class NormalizationError(ValueError):
    """Weights that must sum to one do not."""


class DegenerateClassError(ValueError):
    """The class normalization constant is nonpositive and the requested
    operation is meaningless there (e.g. extremal coefficients)."""


class SchemaError(ValueError):
    """A JSON document does not match the expected schema."""


class SingularRatioError(ArithmeticError):
    """The denominator of the membership ratio vanished at a point.

    The offending point is attached as ``z``.
    """

    def __init__(self, z: complex, message: str | None = None):
        self.z = complex(z)
        super().__init__(message or f"ratio denominator vanished at z={self.z!r}")


class QuadratureError(ArithmeticError):
    """Numerical quadrature failed to reach its accuracy target.

    The achieved absolute error estimate is attached as ``estimate``.
    """

    def __init__(self, estimate: float, message: str | None = None):
        self.estimate = float(estimate)
        super().__init__(
            message or f"quadrature did not converge (error estimate {self.estimate:.3e})"
        )


class DegenerateClassWarning(UserWarning):
    """Results were computed for a degenerate class (normalization <= 0)."""
