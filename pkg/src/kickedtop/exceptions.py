"""Exception hierarchy shared by all kickedtop modules."""


class KickedTopError(Exception):
    """Base class for every error raised by this package."""


class PreconditionError(KickedTopError, ValueError):
    """An input violates the documented precondition of an operation."""


class UnsupportedCaseError(PreconditionError):
    pass


class SingularParameterError(PreconditionError):
    """Raised for Lambda = 0, where the Floquet matrix is undefined."""


class ResonanceError(PreconditionError):
    """The precession angle is resonant; carries the ResonanceReport."""

    def __init__(self, report):
        self.report = report
        super().__init__(
            f"omega={report.omega!r} is resonant for d={report.d} "
            f"(witness q/p={report.witness[0]}/{report.witness[1]})"
        )


class NumericalError(KickedTopError, RuntimeError):
    """Base for failures of an iterative numerical procedure."""


class SolverError(NumericalError):
    def __init__(self, message, Lambda=None):
        self.Lambda = Lambda
        if Lambda is not None:
            message = f"{message} (Lambda={Lambda!r})"
        super().__init__(message)


class TrackingError(NumericalError):
    """Branch matching stayed ambiguous after the refinement cap."""

    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{message} (at {location!r})"
        super().__init__(message)


class RadiusError(NumericalError):
    pass


class InterpolationError(NumericalError):
    pass
