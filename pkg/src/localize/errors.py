"""Exception and warning types shared across the package."""


class LocalizeError(ValueError):
    """Base class for invalid inputs to the localization routines."""


class SkewFormError(LocalizeError):
    """Input is not a valid real skew-symmetric matrix of even dimension."""


class DegenerateLinearizationError(LocalizeError):
    """The linearization at a zero is singular, so no square root of its determinant exists."""


class NonRegularError(LocalizeError):
    """A Cartan element (or sl(2) element) is not regular: some root value vanishes."""


class SpecError(LocalizeError):
    """A root-system document failed to parse or violated one or more invariants.

    ``violations`` holds one message per failed check.
    """

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class NotAZeroError(LocalizeError):
    """The point passed to ``linearize`` is not a zero of the generated vector field."""


class UnspecifiedMultiplicityError(LocalizeError):
    """Multiplicities were requested for a cycle whose multiplicity table is not known."""


class ConditioningWarning(UserWarning):
    """Near-coincident arguments amplify rounding error in a ratio of determinants."""


class OrderingWarning(UserWarning):
    """An orbit parameter violates the chamber (ordering / positivity) condition."""
