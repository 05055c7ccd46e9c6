"""Exception hierarchy shared across the engine."""


class AlgTorsionError(Exception):
    """Base class for all engine errors."""


class ValidationError(AlgTorsionError):
    """Input data violates a structural invariant (bad surface spec, bad schema, ...)."""

    def __init__(self, message, locus=None):
        self.locus = locus
        if locus:
            message = f"{locus}: {message}"
        super().__init__(message)


class UnknownGeneratorError(AlgTorsionError):
    """A monomial or operator refers to a generator id that is not registered."""


class TruncationError(AlgTorsionError):
    """An operator term increases action or otherwise escapes the declared truncation."""


class SeriesDivergenceError(AlgTorsionError):
    """An iterated bracket failed to raise the hbar order, so the series cannot terminate."""


class InvariantBreach(AlgTorsionError):
    """An internal consistency check failed; results must not be trusted."""
