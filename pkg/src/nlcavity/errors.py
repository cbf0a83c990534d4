"""Exception hierarchy.

``ConfigError`` subclasses map to CLI exit code 2, ``NumericalError``
subclasses to exit code 3.
"""


class NLCavityError(Exception):
    pass


class ConfigError(NLCavityError, ValueError):
    pass


class UnitError(ConfigError):
    pass


class NumericalError(NLCavityError, RuntimeError):
    pass


class NonConvergence(NumericalError):
    pass


class StepUnderflow(NumericalError):
    pass


class NormMismatch(NumericalError):
    pass


class BathTooNarrow(NumericalError):
    pass


class ApproximationOutOfRange(NLCavityError, ValueError):
    pass


class Unachievable(NLCavityError, ValueError):
    pass


class AmbiguousBranchWarning(UserWarning):
    pass


class ZeroField(NLCavityError, ValueError):
    pass


class GridMismatch(NLCavityError, ValueError):
    pass


class UnachievableNorm(NLCavityError, ValueError):
    pass


class BandwidthViolation(NLCavityError, ValueError):
    pass


class AdiabaticityViolation(NLCavityError, ValueError):
    pass


class SingularTailWarning(UserWarning):
    pass


class DriveUnderResolved(NLCavityError, ValueError):
    pass
