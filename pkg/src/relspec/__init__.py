"""Semiclassical densities of states for relativistic integrable systems.

The package computes the density of states of spinless relativistic
systems semiclassically, from the classical periodic orbits of the
associated pseudoenergy Hamiltonian, and validates the machinery
against two exactly solvable benchmarks: the rectangular box billiard
and the Coulomb potential.
"""

from .billiard import (
    BilliardTorus,
    BoxGeometry,
    billiard_model,
    edge_density,
    eikonal,
    energy_scale,
    exact_levels,
    exact_resummed_density,
    face_density,
    osc_density_closed,
    saddle_closed_form,
    tf_density_closed,
)
from .coulomb import FINE_STRUCTURE, CoulombParams, coulomb_energy, coulomb_pseudoenergy
from .errors import CriticalCouplingError, DegenerateTorusError, DomainError, NumericalError
from .kinematics import Level, RelParams, classical_momentum, physical_energy, pseudo_energy
from .special import (
    ThetaParams,
    bessel_j0,
    gaussian_kernel,
    spherical_j0,
    theta_direct,
    theta_resummed,
)
from .spectra import DensityGrid, broadened_density, compare, find_peaks, staircase
from .trace import (
    HamiltonianModel,
    QuadratureSpec,
    SaddleSolution,
    maslov_nu,
    orbit_term,
    oscillating_density,
    solve_saddle,
    stability,
    thomas_fermi_density,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "RelParams", "Level", "pseudo_energy", "physical_energy", "classical_momentum",
    "ThetaParams", "spherical_j0", "bessel_j0", "theta_direct", "theta_resummed",
    "gaussian_kernel",
    "HamiltonianModel", "SaddleSolution", "QuadratureSpec", "solve_saddle", "stability",
    "maslov_nu", "orbit_term", "oscillating_density", "thomas_fermi_density",
    "BoxGeometry", "BilliardTorus", "billiard_model", "energy_scale", "exact_levels",
    "saddle_closed_form", "eikonal", "osc_density_closed", "face_density", "edge_density",
    "tf_density_closed", "exact_resummed_density",
    "CoulombParams", "coulomb_pseudoenergy", "coulomb_energy", "FINE_STRUCTURE",
    "DensityGrid", "broadened_density", "staircase", "compare", "find_peaks",
    "DomainError", "CriticalCouplingError", "NumericalError", "DegenerateTorusError",
]
