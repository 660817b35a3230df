"""Exception types shared across the package.

Physical-domain violations raise :class:`DomainError`, numerical
failures (non-convergence, truncation caps, failed quadratures) raise
:class:`NumericalError`, and structurally singular tori get the more
specific :class:`DegenerateTorusError`.
"""

__all__ = [
    "DomainError",
    "CriticalCouplingError",
    "NumericalError",
    "DegenerateTorusError",
]


class DomainError(ValueError):
    """An input lies outside the physical domain of the operation."""


class CriticalCouplingError(DomainError):
    """Coupling too strong for the requested angular momentum channel.

    Raised when (l + 1/2)^2 <= alpha^2, where the effective radial
    problem loses its lower bound (classical fall to the center).
    """


class NumericalError(RuntimeError):
    """An iterative or adaptive numerical procedure failed to converge.

    Solvers attach their last iterate to ``last_iterate`` when one is
    available, so callers can inspect how far the iteration got.
    """

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class DegenerateTorusError(NumericalError):
    """The torus Hessian (or the Newton system built from it) is singular."""
