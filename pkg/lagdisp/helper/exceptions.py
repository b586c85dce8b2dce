class InputError(ValueError):
    """
    Raised when arguments or configuration values are outside the
    domain an operation accepts.
    """
    pass


class SingularTimeError(InputError):
    """
    Raised when a propagator is requested at a time too close to a
    multiple of pi, where its kernel is singular.
    """
    pass


class ResolutionError(InputError):
    """
    Raised when a quadrature grid cannot resolve the highest mode of a
    spectral set.
    """
    pass


class TruncationError(RuntimeError):
    """
    Raised when a series could not be truncated within tolerance.
    """
    pass


class SeriesTruncationError(TruncationError):
    """Power series did not converge within max_terms"""
    pass
