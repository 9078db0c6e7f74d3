"""Shared exception types.

ValueError subclasses signal bad inputs or violated preconditions; the
RuntimeError subclasses signal that a verified mathematical property failed
or that a computation hit a configured resource limit.
"""


class PreconditionError(ValueError):
    """A documented hypothesis of an operation does not hold.

    Carries the list of failed hypotheses so callers can report them all.
    """

    def __init__(self, failures):
        if isinstance(failures, str):
            failures = [failures]
        self.failures = list(failures)
        super().__init__("; ".join(self.failures))


class CheckFailure(RuntimeError):
    """A verified identity exceeded its tolerance."""


class SpectralSplitError(RuntimeError):
    """Core/nil eigenvalue separation is too weak to split reliably.

    nil_edge and core_edge carry the straddling moduli when the refusal
    came from the eigenvalue gap diagnostic, else None.
    """

    def __init__(self, message: str, nil_edge: float | None = None,
                 core_edge: float | None = None):
        super().__init__(message)
        self.nil_edge = nil_edge
        self.core_edge = core_edge


class BandwidthCapError(RuntimeError):
    """An operator composition exceeded the configured bandwidth cap."""


class ResolventDomainError(ValueError):
    """lambda lies outside the disk where the resolvent series converges."""
