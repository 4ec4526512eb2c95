class SingularityToolkitError(Exception):
    code = 'ERROR'


class PreconditionError(SingularityToolkitError):
    code = 'PRECONDITION'


class DegenerateError(SingularityToolkitError):
    """Normalized sum too small to carry a sign: the point lies on a zero level line."""
    code = 'DEGENERATE'


class DivisionDegenerateError(SingularityToolkitError):
    code = 'DIVISION_DEGENERATE'


class OnCurveError(SingularityToolkitError):
    code = 'ON_CURVE'


class NotClosedError(SingularityToolkitError):
    code = 'NOT_CLOSED'


class NoSeedsError(SingularityToolkitError):
    code = 'NO_SEEDS'


class ResolutionTooCoarseError(SingularityToolkitError):
    code = 'RESOLUTION_TOO_COARSE'


class TouchesBoundaryError(SingularityToolkitError):
    code = 'TOUCHES_BOUNDARY'


class InconclusiveError(SingularityToolkitError):
    code = 'INCONCLUSIVE'

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class EpsilonRangeError(SingularityToolkitError, ValueError):
    code = 'EPSILON_RANGE'


class UndersampledError(SingularityToolkitError):
    code = 'UNDERSAMPLED'


class ZeroMassError(SingularityToolkitError):
    code = 'ZERO_MASS'


class ConfigError(SingularityToolkitError):
    code = 'PARSE_ERROR'
