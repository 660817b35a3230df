"""Relativistic Coulomb spectrum in the pseudoenergy formulation.

The squared problem for a 1/r potential keeps the hydrogen structure
but shifts the angular quantum number: with

    B(n, l) = (n - l - 1/2) + sqrt((l + 1/2)^2 - alpha^2)

the pseudoenergy condition reads eps = -(E^2 / m c^2) alpha^2 / (2 B^2)
and closes to

    E(n, l) = m c^2 [1 + alpha^2 / B(n, l)^2]^(-1/2).

For alpha >= l + 1/2 the square root turns imaginary: the coupling is
supercritical for that channel and the level does not exist.
"""

import math
from dataclasses import dataclass

from .errors import CriticalCouplingError, DomainError
from .kinematics import RelParams

__all__ = ["CoulombParams", "coulomb_pseudoenergy", "coulomb_energy", "FINE_STRUCTURE"]

FINE_STRUCTURE = 7.2973525693e-3


@dataclass(frozen=True)
class CoulombParams:
    """Dimensionless coupling alpha and the kinematic parameters.

    Every l >= 0 channel exists only for alpha < 1/2; larger couplings
    are accepted here but raise per level once a channel with
    (l + 1/2)^2 <= alpha^2 is requested.
    """

    alpha: float = FINE_STRUCTURE
    params: RelParams = RelParams()

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise DomainError("coupling must satisfy 0 < alpha < 1")


def _bracket(n, l, alpha):
    if int(n) != n or int(l) != l:
        raise DomainError("quantum numbers must be integers")
    if n < 1 or l < 0 or l >= n:
        raise DomainError("quantum numbers must satisfy n >= 1 and 0 <= l < n")
    disc = (l + 0.5) ** 2 - alpha * alpha
    if disc <= 0:
        raise CriticalCouplingError(
            "channel l = %d is supercritical for alpha = %g" % (l, alpha)
        )
    return (n - l - 0.5) + math.sqrt(disc)


def coulomb_pseudoenergy(n, l, E, cp: CoulombParams):
    """Pseudoenergy of level (n, l) at physical energy E.

    eps = -(E^2 / m c^2) * alpha^2 / (2 B(n, l)^2); evaluated on the
    self-consistent E this equals (E^2 - m^2 c^4) / (2 m c^2).
    """
    b = _bracket(n, l, cp.alpha)
    mc2 = cp.params.mc2
    return -(E * E / mc2) * cp.alpha**2 / (2.0 * b * b)


def coulomb_energy(n, l, cp: CoulombParams, branch=+1):
    """Self-consistent level energy E = branch * m c^2 [1 + alpha^2/B^2]^(-1/2)."""
    if branch not in (+1, -1):
        raise DomainError("branch must be +1 or -1")
    b = _bracket(n, l, cp.alpha)
    return branch * cp.params.mc2 / math.sqrt(1.0 + cp.alpha**2 / (b * b))
