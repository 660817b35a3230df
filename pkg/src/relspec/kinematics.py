"""Pseudoenergy kinematics for spinless relativistic quantization.

Squaring the relativistic dispersion relation maps the eigenvalue
problem onto a Schroedinger-like one for the pseudoenergy

    eps = (E^2 - m^2 c^4) / (2 m c^2),

so every classical and semiclassical quantity in this package lives on
the eps axis.  The maps in this module convert between eps, the
physical energy E (rest energy included), and the classical momentum
p = sqrt(2 m eps).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = ["RelParams", "Level", "pseudo_energy", "physical_energy", "classical_momentum"]


@dataclass(frozen=True)
class RelParams:
    """Mass, speed of light and hbar in natural units (defaults m = hbar = 1, c = 10)."""

    m: float = 1.0
    c: float = 10.0
    hbar: float = 1.0

    def __post_init__(self):
        if not (self.m > 0 and self.c > 0 and self.hbar > 0):
            raise DomainError("m, c and hbar must all be positive")

    @property
    def mc2(self):
        """Rest energy m c^2."""
        return self.m * self.c**2


@dataclass(frozen=True)
class Level:
    """One spectral level: quantum numbers, pseudoenergy, energy, multiplicity."""

    n: tuple
    eps: float
    E: float
    degeneracy: int = 1

    def __post_init__(self):
        if self.degeneracy < 1:
            raise DomainError("degeneracy must be a positive integer")
        if any(int(ni) != ni or ni < 0 for ni in self.n):
            raise DomainError("quantum numbers must be non-negative integers")


def pseudo_energy(E, params: RelParams = RelParams()):
    """Map a physical energy E to the pseudoenergy (E^2 - m^2 c^4) / (2 m c^2)."""
    E = np.asarray(E, dtype=float)
    mc2 = params.mc2
    # factored difference of squares: E - mc2 is exact near the rest
    # energy, so small eps keeps full relative accuracy
    out = (np.abs(E) - mc2) * (np.abs(E) + mc2) / (2.0 * params.m * params.c**2)
    return out if out.ndim else float(out)


def physical_energy(eps, params: RelParams = RelParams(), branch=+1):
    """Invert the pseudoenergy map, E = branch * sqrt(2 m c^2 eps + m^2 c^4).

    branch selects the particle (+1) or antiparticle (-1) sheet.  The
    radicand must be non-negative; eps < -m c^2 / 2 has no real energy.
    """
    if branch not in (+1, -1):
        raise DomainError("branch must be +1 or -1")
    eps = np.asarray(eps, dtype=float)
    mc2 = params.mc2
    radicand = 2.0 * params.m * params.c**2 * eps + mc2 * mc2
    if np.any(radicand < 0):
        raise DomainError("pseudoenergy below -m*c^2/2 has no real physical energy")
    out = branch * np.sqrt(radicand)
    return out if out.ndim else float(out)


def classical_momentum(eps, params: RelParams = RelParams()):
    """Classical momentum p = sqrt(2 m eps) of the squared problem.

    Identical to sqrt(E^2 - m^2 c^4) / c on the physical shell.
    """
    eps = np.asarray(eps, dtype=float)
    if np.any(eps < 0):
        raise DomainError("classical momentum requires eps >= 0")
    out = np.sqrt(2.0 * params.m * eps)
    return out if out.ndim else float(out)
