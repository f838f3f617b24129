"""Exception types shared across the package."""


class NlsLabError(Exception):
    """Base class for all package-specific errors."""


class NegativePowerZeroMode(NlsLabError):
    """Negative-power spectral multiplier applied to a field with nonzero mean.

    On a periodic box the zero mode cannot be inverted, so |xi|^(2s) with
    s < 0 is only defined on zero-mean fields.
    """


class DivergentIntegral(NlsLabError):
    """The requested integral diverges (embedding hypothesis 2q > N violated)."""


class DegenerateDenominator(NlsLabError):
    """Ratio undefined because both sample points vanish."""


class InadmissibleExponents(NlsLabError):
    """No interpolation weight satisfies the exponent balance condition."""


class PicardDiverged(NlsLabError):
    """Fixed-point iteration distances grew for several consecutive sweeps."""

    def __init__(self, message, distances=None):
        super().__init__(message)
        self.distances = list(distances) if distances is not None else []


class HypothesisViolation(NlsLabError):
    """Operation invoked outside the parameter range it is valid for."""


class InsufficientData(NlsLabError):
    """Not enough usable snapshots for the requested fit."""


class NegativeEnergy(NlsLabError):
    """Initial energy is negative; the bound under test assumes it is not."""


class CoincidentPoints(NlsLabError):
    """Pair-distance weight evaluated at x == y."""


class SupportOverflow(NlsLabError):
    """Rescaled field no longer fits inside the periodic box."""


class ConfigError(NlsLabError):
    """Run configuration failed validation."""
