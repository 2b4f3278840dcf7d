"""Exception types shared across the package."""


class NlgError(Exception):
    """Base class for all package errors."""


class InputError(NlgError, ValueError):
    """Malformed input: bad file, bad parameters, shape mismatch."""


class NotPrime(InputError):
    pass


class FieldMismatch(InputError):
    pass


class DivisionByZero(NlgError, ZeroDivisionError):
    pass


class DimensionMismatch(InputError):
    pass


class DegreeError(InputError):
    pass


class TooLarge(NlgError):
    """A configured enumeration or dimension cap would be exceeded."""


class StrategyError(InputError):
    """A strategy is incompatible with the game it is used on."""


class InvalidGame(InputError):
    pass


class InvariantError(NlgError):
    """An operator family or state violates its declared invariants."""


class Unsolved(NlgError):
    """The SDP solver did not converge; ``best`` carries the last iterate."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
