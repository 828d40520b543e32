"""Exception hierarchy for quantbounds."""


class QuantBoundsError(Exception):
    """Base class for all errors raised by this package."""


class InputError(QuantBoundsError, ValueError):
    """Arguments violate a documented precondition."""


class UnderdeterminedError(InputError):
    """Not enough samples to identify the requested number of parameters."""


class MissingDataError(QuantBoundsError, KeyError):
    """A tabulated quantity was requested at a point that is not tabulated."""

    def __str__(self):
        return Exception.__str__(self)


class InfeasibleError(QuantBoundsError):
    """No configuration satisfies the adjusted-confidence constraint."""


class DivergenceError(QuantBoundsError, RuntimeError):
    """A simulated trajectory left the admissible range."""
