"""Exception types shared across the package."""


class DoubleLambdaError(Exception):
    """Base class for all package errors."""


class DomainError(DoubleLambdaError, ValueError):
    """An operation was called with physically inadmissible arguments."""


class ConfigError(DoubleLambdaError, ValueError):
    """A configuration (file or object) failed validation."""


class GridResolutionError(ConfigError):
    """A grid violates a solver resolution guard; refuse to step."""


class SingularDecompositionError(DomainError):
    """Polariton decomposition requested at vanishing controls (theta = pi/2)."""


class SingularityError(DoubleLambdaError, ValueError):
    """Strict-mode susceptibility evaluation hit a pole."""


class NumericalBlowupError(DoubleLambdaError, RuntimeError):
    """The propagation produced a non-finite value; names the first bad cell."""

    def __init__(self, iz: int, it: int, z: float, t: float):
        self.iz = iz
        self.it = it
        self.z = z
        self.t = t
        super().__init__(
            f"non-finite field value at grid cell (iz={iz}, it={it}), "
            f"z={z:.6e} a.u., t'={t:.6e} a.u."
        )
