"""Exception types shared across the package."""


class FoultError(Exception):
    """Base class for numerical and validation failures raised by this package."""


class CirculantEmbeddingError(FoultError):
    """Circulant embedding produced a negative eigenvalue beyond tolerance.

    Recoverable: callers may fall back to the Cholesky sampler.
    """

    def __init__(self, min_eigenvalue, tolerance):
        self.min_eigenvalue = float(min_eigenvalue)
        self.tolerance = float(tolerance)
        super().__init__(
            f"circulant spectrum has eigenvalue {self.min_eigenvalue:.3e} "
            f"below tolerance {-self.tolerance:.3e}"
        )


class CholeskyError(FoultError):
    """Covariance matrix numerically non positive definite, even after jitter."""


class QuadratureError(FoultError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message, achieved_error):
        self.achieved_error = float(achieved_error)
        super().__init__(f"{message} (achieved error estimate {self.achieved_error:.3e})")


class EigensolverError(FoultError):
    """Jacobi sweeps did not reduce the off-diagonal norm under the threshold."""


class DegenerateSweepError(FoultError):
    """Too few usable points survived the moment-sweep exclusion rules."""


class LatticeCoverageError(FoultError):
    """A spatial lattice does not cover the realized path range plus margin."""
