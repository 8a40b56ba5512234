"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """An argument violates a documented precondition."""


class UnsupportedConfigurationError(RuntimeError):
    """The requested combination of options has no supported code path."""


class InternalInvariantError(AssertionError):
    """An internal consistency check failed (indicates a bug, not bad input)."""


class StalledSamplerError(RuntimeError):
    """The constrained sampler could not find a replacement point.

    Carries the partial run result (everything accumulated up to the stall)
    on the ``partial_result`` attribute so callers can inspect or report it.
    """

    def __init__(self, message, partial_result=None):
        super().__init__(message)
        self.partial_result = partial_result


class DegenerateBetaBoundsError(RuntimeError):
    """The inferred exponent bounds collapsed to a single value.

    The uncorrected log-evidence is preserved on ``uncorrected_log_z`` so
    reporting code can distinguish this failure from a missing run.
    """

    def __init__(self, message, uncorrected_log_z=None):
        super().__init__(message)
        self.uncorrected_log_z = uncorrected_log_z
