"""Exception types shared across the package."""


class PssframeError(Exception):
    """Base class for package errors."""


class ChartMismatchError(PssframeError):
    """Fields living on different charts were combined."""


class StructureGateError(PssframeError):
    """Input frame data failed the structure-equation gate."""

    def __init__(self, res1, res2, threshold):
        self.res1 = res1
        self.res2 = res2
        self.threshold = threshold
        super().__init__(
            "structure residuals (%.3e, %.3e) exceed gate %.3e"
            % (res1, res2, threshold)
        )


class DegenerateFrameError(PssframeError):
    """Frame coefficient matrix is singular where a caller needs it inverted."""


class EvolutionError(PssframeError):
    """Time integration failed (blow-up or step-bound violation)."""


class ConfigError(PssframeError):
    """Run configuration is missing keys or has malformed values."""
