"""Exception types raised by the numerical kernels."""


class NodalThetaError(Exception):
    """Base class for all library-specific failures."""


class NonConvergent(NodalThetaError):
    """A truncated series could not meet its tail bound within the index budget."""


class PoleAt(NodalThetaError):
    """An evaluation point coincides (to rounding) with a pole of the integrand."""


class QuadratureFailure(NodalThetaError):
    """Adaptive quadrature exhausted its refinement budget."""


class BranchStepTooLarge(NodalThetaError):
    """A path step changed the tracked argument by more than the continuity bound."""


class PoleProximity(NodalThetaError):
    """A path passes closer to an identified point than the safety margin."""


class ContourThroughZero(NodalThetaError):
    """A winding contour runs too close to a zero; the caller should resample."""


class ZeroCollision(NodalThetaError):
    """Subdivision could not isolate the expected number of simple zeros."""


class DegenerateC(NodalThetaError):
    """The shift parameter c fails a genericity guard (theta value too small)."""


class NewtonDivergence(NodalThetaError):
    """Newton iteration left its basin or failed to converge within max_iters."""


class JacobianSingular(NodalThetaError):
    """The derivative driving a Newton step dropped below the singularity floor."""


class NoValidEpsilon(NodalThetaError):
    """Every candidate radius failed the period-freeness sampling test."""
