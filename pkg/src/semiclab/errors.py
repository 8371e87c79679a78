"""Exception types shared across the package."""


class GuardError(RuntimeError):
    """A numerical guard tripped; the run cannot be trusted."""

    flag = "guard"


class DomainTooSmallError(GuardError):
    flag = "boundary"


class NyquistError(GuardError):
    flag = "nyquist"


class ResolutionError(GuardError):
    flag = "resolution"


class NormDriftError(GuardError):
    flag = "norm"


class SizeCapError(ValueError):
    """Dense (oracle-scale) operation requested beyond its size cap."""


class ConfigError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass
