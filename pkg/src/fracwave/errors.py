"""Exception hierarchy shared by all fracwave modules.

Two broad families matter for the CLI exit codes: precondition/data
problems (exit 3) and numerical failures (exit 4).
"""


class FracwaveError(Exception):
    """Base class for all package errors."""


class PreconditionError(FracwaveError):
    """An operation was called outside its documented domain."""


class SymbolDomainError(PreconditionError):
    """Symbol derivative requested at a point where it is singular."""


class DegenerateWindowError(PreconditionError):
    """A fit or measurement window contains no usable samples."""


class InsufficientSamplesError(PreconditionError):
    """Too few above-floor samples to fit a decay exponent."""


class AllBelowFloorError(PreconditionError):
    """Every sample in the window sits below the noise floor."""


class EmptyWindowError(PreconditionError):
    """All window samples were discarded by a guard rule."""


class UnknownModelError(FracwaveError):
    """Requested preset name is not in the catalog."""

    def __init__(self, name, available):
        self.name = name
        self.available = tuple(available)
        super().__init__(
            f"unknown model {name!r}; available: {', '.join(self.available)}"
        )


class NumericsError(FracwaveError):
    """Base class for numerical failures (CLI exit 4)."""


class QuadratureError(NumericsError):
    """Adaptive quadrature could not reach the requested tolerance."""

    def __init__(self, message, achieved=None):
        self.achieved = achieved
        super().__init__(message)


class IntegrationDivergedError(NumericsError):
    """Time stepper produced non-finite values."""

    def __init__(self, message, last_good_time=None):
        self.last_good_time = last_good_time
        super().__init__(message)


class NonContractionError(NumericsError):
    """Fixed-point iteration distances failed to decrease."""


class MaxIterationsError(NumericsError):
    """Fixed-point iteration hit its iteration cap before converging."""
