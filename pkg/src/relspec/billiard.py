"""Rectangular 3-d box billiard: exact spectrum and closed-form densities.

The box with Dirichlet walls is the exactly solvable benchmark for the
trace engine.  In action variables the torus Hamiltonian is

    H(I) = (pi^2 / 2m) sum_i I_i^2 / a_i^2,

quantized exactly by I_i = hbar n_i, n_i >= 1.  All closed forms below
are expressed through the box energy scale E0 = pi^2 hbar^2 / (2 m L^2)
and the orbit eikonal S(k) = sqrt(2 m eps) * 2 sqrt(sum k_i^2 a_i^2).

Besides the periodic-orbit family of the full torus, the resummed
density keeps the boundary families (two-dimensional "face" orbits and
one-dimensional "edge" orbits) produced by Poisson resummation of the
exact partition function; with the correct coefficients (1, -1/2, +1/4)
the k = 0 parts reproduce the smooth volume, surface and edge terms.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError
from .kinematics import Level, RelParams, classical_momentum, physical_energy
from .spectra import DensityGrid
from .special import bessel_j0, spherical_j0
from .sums import CompensatedSum
from .trace import HamiltonianModel, SaddleSolution, maslov_nu

__all__ = [
    "BoxGeometry",
    "BilliardTorus",
    "billiard_model",
    "energy_scale",
    "exact_levels",
    "saddle_closed_form",
    "eikonal",
    "osc_density_closed",
    "face_density",
    "edge_density",
    "tf_density_closed",
    "exact_resummed_density",
]

_DAMPING_FLOOR = 1e-10
_GROUP_CHUNK = 4096


@dataclass(frozen=True)
class BoxGeometry:
    """Edge lengths of the box and the reference length L (geometric mean)."""

    a1: float
    a2: float
    a3: float
    L: float = None

    def __post_init__(self):
        if not (self.a1 > 0 and self.a2 > 0 and self.a3 > 0):
            raise DomainError("box edges must be positive")
        if self.L is None:
            object.__setattr__(self, "L", (self.a1 * self.a2 * self.a3) ** (1.0 / 3.0))
        elif self.L <= 0:
            raise DomainError("reference length must be positive")

    @property
    def a(self):
        return np.array([self.a1, self.a2, self.a3])

    @property
    def volume(self):
        return self.a1 * self.a2 * self.a3

    @property
    def surface(self):
        return 2.0 * (self.a1 * self.a2 + self.a2 * self.a3 + self.a1 * self.a3)

    @property
    def edge_length(self):
        return self.a1 + self.a2 + self.a3


class BilliardTorus(HamiltonianModel):
    """Torus Hamiltonian of the box billiard, H(I) = (pi^2/2m) sum I_i^2/a_i^2."""

    def __init__(self, geom: BoxGeometry, m: float):
        if m <= 0:
            raise DomainError("mass must be positive")
        self._geom = geom
        self._m = m
        self._inv_a2 = 1.0 / geom.a**2

    @property
    def D(self):
        return 3

    @property
    def mu(self):
        # two hard-wall reflections per libration cycle and direction
        return np.array([4.0, 4.0, 4.0])

    @property
    def geometry(self):
        return self._geom

    def value(self, I):
        I = np.asarray(I, dtype=float)
        return 0.5 * math.pi**2 / self._m * float(I * I @ self._inv_a2)

    def gradient(self, I):
        I = np.asarray(I, dtype=float)
        return math.pi**2 / self._m * I * self._inv_a2

    def hessian(self, I):
        return np.diag(math.pi**2 / self._m * self._inv_a2)

    def commensurate_ray(self, k):
        # omega_i ~ I_i / a_i^2, so I ~ k_i a_i^2 makes omega parallel to k
        return np.asarray(k, dtype=float) * self._geom.a**2

    def __repr__(self):
        return "BilliardTorus(a=%r, m=%r)" % (list(self._geom.a), self._m)


def billiard_model(geom: BoxGeometry, params: RelParams) -> BilliardTorus:
    """Adapter from box geometry to the generic trace-engine model."""
    return BilliardTorus(geom, params.m)


def energy_scale(geom: BoxGeometry, params: RelParams):
    """Box energy scale E0 = pi^2 hbar^2 / (2 m L^2)."""
    return math.pi**2 * params.hbar**2 / (2.0 * params.m * geom.L**2)


def exact_levels(geom: BoxGeometry, params: RelParams, eps_max):
    """All box levels with eps <= eps_max, degeneracies merged exactly.

    eps(n) = (hbar^2 pi^2 / 2m) sum n_i^2 / a_i^2 with n_i >= 1.  Levels
    that coincide as exact rationals of the squared edge lengths are
    merged into one Level carrying the summed degeneracy; the stored n
    is the lexicographically smallest member.
    """
    if eps_max <= 0:
        return []
    scale = params.hbar**2 * math.pi**2 / (2.0 * params.m)
    a = geom.a
    n_caps = np.floor(a * math.sqrt(2.0 * params.m * eps_max) / (math.pi * params.hbar))
    n_caps = n_caps.astype(int) + 1
    inv_q = [1 / (Fraction(ai) ** 2) for ai in a]
    groups = {}
    for n in itertools.product(*(range(1, c + 1) for c in n_caps)):
        key = n[0] ** 2 * inv_q[0] + n[1] ** 2 * inv_q[1] + n[2] ** 2 * inv_q[2]
        eps = scale * float(key)
        if eps > eps_max:
            continue
        groups.setdefault(key, []).append(n)
    levels = []
    for key, members in groups.items():
        eps = scale * float(key)
        levels.append(
            Level(
                n=min(members),
                eps=eps,
                E=physical_energy(eps, params),
                degeneracy=len(members),
            )
        )
    levels.sort(key=lambda lv: lv.eps)
    return levels


def eikonal(geom: BoxGeometry, params: RelParams, eps, k):
    """Orbit eikonal S(k) = sqrt(2 m eps) * 2 sqrt(sum k_i^2 a_i^2) = p L_k."""
    k = np.asarray(k, dtype=float)
    if k.shape != (3,):
        raise DomainError("k must have three components")
    if eps < 0:
        raise DomainError("eikonal requires eps >= 0")
    return classical_momentum(eps, params) * 2.0 * math.sqrt(float(k * k @ geom.a**2))


def saddle_closed_form(geom: BoxGeometry, params: RelParams, eps, k) -> SaddleSolution:
    """The resonant torus of the box billiard in closed form.

    tau = sqrt(2m/eps) sqrt(sum (a_i k_i)^2),  I_i = 2 m a_i^2 k_i / (tau pi),
    with diagonal Hessian pi^2/(m a_i^2) and quadratic form 2 eps.
    """
    k = np.asarray(k)
    if k.shape != (3,) or not np.issubdtype(k.dtype, np.integer) or np.any(k <= 0):
        raise DomainError("closed-form saddle needs strictly positive integer k")
    if eps <= 0:
        raise DomainError("closed-form saddle requires eps > 0")
    m = params.m
    a = geom.a
    kf = k.astype(float)
    lam = float(kf * kf @ (a * a))
    tau = math.sqrt(2.0 * m / eps) * math.sqrt(lam)
    I = 2.0 * m * a**2 * kf / (tau * math.pi)
    omega = math.pi**2 / m * I / a**2
    hess = np.diag(math.pi**2 / (m * a**2))
    detH = math.pi**6 / (m**3 * float(np.prod(a * a)))
    quad_form = 2.0 * eps
    model = BilliardTorus(geom, m)
    r_freq = 2.0 * math.pi * kf - tau * omega
    r_shell = eps - model.value(I)
    return SaddleSolution(
        k=np.array(k),
        I_bar=I,
        tau_bar=tau,
        omega=omega,
        H=hess,
        detH=detH,
        quad_form=quad_form,
        nu=maslov_nu(hess, quad_form),
        eikonal=eikonal(geom, params, eps, k),
        residual=float(max(np.max(np.abs(r_freq)), abs(r_shell))),
    )


def _weighted_groups(a_sq, k_max, include_zero):
    """Distinct values of sum k_i^2 a_i^2 over the |k_i| <= k_max lattice.

    Enumerates only k_i >= 0 and weights each point by 2^(#nonzero),
    which covers the sign orbits of the summand (it depends on k_i^2
    only).  Returns (lam, weight) with lam ascending; lam = 0 is the
    k = 0 point, included on request.
    """
    dims = len(a_sq)
    grids = np.meshgrid(*([np.arange(k_max + 1)] * dims), indexing="ij")
    ks = np.stack([gr.ravel() for gr in grids], axis=1).astype(float)
    lam = ks**2 @ np.asarray(a_sq, dtype=float)
    weight = 2.0 ** np.sum(ks > 0, axis=1)
    if not include_zero:
        keep = lam > 0
        lam, weight = lam[keep], weight[keep]
    uniq, inverse = np.unique(lam, return_inverse=True)
    mult = np.bincount(inverse, weights=weight)
    return uniq, mult


def _family_sum(lam, weight, eps_grid, params, sigma, oscillator):
    """sum_j weight_j * oscillator(p(eps) * 2 sqrt(lam_j) / hbar), damped.

    The Gaussian damping exp(-(tau sigma / hbar)^2 / 2) uses the family
    period tau = sqrt(2m/eps) sqrt(lam).  Terms whose damping falls
    below 1e-10 are dropped exactly (zeroed elementwise), which keeps
    every grid point's value independent of how a caller slices the
    grid: the group list and chunk layout depend only on the geometry.
    """
    eps_grid = np.asarray(eps_grid, dtype=float)
    hbar = params.hbar
    m = params.m
    p = np.sqrt(2.0 * m * eps_grid)
    acc = CompensatedSum(eps_grid.shape)
    for start in range(0, lam.size, _GROUP_CHUNK):
        lam_c = lam[start : start + _GROUP_CHUNK]
        w_c = weight[start : start + _GROUP_CHUNK]
        args = np.outer(p, 2.0 * np.sqrt(lam_c) / hbar)
        vals = oscillator(args)
        if sigma > 0:
            damp = np.exp(-0.5 * np.outer(2.0 * m / eps_grid, lam_c) * (sigma / hbar) ** 2)
            vals = vals * np.where(damp < _DAMPING_FLOOR, 0.0, damp)
        # pairwise add.reduce groups by row length only, so values never
        # depend on how many grid rows share the call (BLAS gemv would)
        acc.add(np.add.reduce(vals * w_c, axis=1))
    return acc.total


def _check_density_args(eps_grid, k_max, sigma):
    eps_grid = np.asarray(eps_grid, dtype=float)
    if np.any(eps_grid <= 0):
        raise DomainError("density grids require eps > 0")
    if k_max < 0:
        raise DomainError("k_max must be >= 0")
    if sigma < 0:
        raise DomainError("sigma must be >= 0")
    return eps_grid


def osc_density_closed(geom, params, eps_grid, k_max, sigma=0.0):
    """Oscillating part of the torus-family density, summed in closed form.

    (pi / 4 E0) sqrt(eps/E0) (a1 a2 a3 / L^3) sum_{k != 0} j0(S(k)/hbar)
    over the lattice box |k_i| <= k_max; k = 0 is excluded (it carries
    the smooth volume term).
    """
    eps_grid = _check_density_args(eps_grid, k_max, sigma)
    e0 = energy_scale(geom, params)
    lam, weight = _weighted_groups(geom.a**2, k_max, include_zero=False)
    osc = _family_sum(lam, weight, eps_grid, params, sigma, spherical_j0)
    pref = (
        0.25 * math.pi / e0 * np.sqrt(eps_grid / e0) * geom.volume / geom.L**3
    )
    meta = {
        "producer": "osc_density_closed",
        "geometry": list(geom.a),
        "k_max": k_max,
        "sigma": sigma,
    }
    return DensityGrid(eps_grid, pref * osc, meta)


def face_density(geom, params, i, j, eps_grid, k_max, sigma=0.0):
    """Density of one two-dimensional boundary family (face i-j).

    (pi / 4 E0) (a_i a_j / L^2) sum_k J0(S_2(k)/hbar) over the full
    two-index lattice including k = (0, 0), whose constant is the
    surface part of the smooth density.
    """
    if i == j or not {i, j} <= {0, 1, 2}:
        raise DomainError("face indices must be two distinct axes from {0, 1, 2}")
    i, j = min(i, j), max(i, j)  # canonical order: the i-j and j-i faces are one family
    eps_grid = _check_density_args(eps_grid, k_max, sigma)
    e0 = energy_scale(geom, params)
    a = geom.a
    lam, weight = _weighted_groups(np.array([a[i] ** 2, a[j] ** 2]), k_max, include_zero=True)
    vals = _family_sum(lam, weight, eps_grid, params, sigma, bessel_j0)
    pref = 0.25 * math.pi / e0 * a[i] * a[j] / geom.L**2
    meta = {
        "producer": "face_density",
        "axes": [i, j],
        "k_max": k_max,
        "sigma": sigma,
    }
    return DensityGrid(eps_grid, pref * vals, meta)


def edge_density(geom, params, i, eps_grid, k_max, sigma=0.0):
    """Density of one one-dimensional boundary family (edge i).

    a_i / (2 L sqrt(E0 eps)) sum_k cos(2 sqrt(2 m eps) k a_i / hbar)
    over all |k| <= k_max including k = 0.
    """
    if i not in (0, 1, 2):
        raise DomainError("edge index must be one of {0, 1, 2}")
    eps_grid = _check_density_args(eps_grid, k_max, sigma)
    e0 = energy_scale(geom, params)
    ai = geom.a[i]
    lam, weight = _weighted_groups(np.array([ai**2]), k_max, include_zero=True)
    vals = _family_sum(lam, weight, eps_grid, params, sigma, np.cos)
    pref = ai / (2.0 * geom.L * np.sqrt(e0 * eps_grid))
    meta = {
        "producer": "edge_density",
        "axis": i,
        "k_max": k_max,
        "sigma": sigma,
    }
    return DensityGrid(eps_grid, pref * vals, meta)


def tf_density_closed(geom, params, eps):
    """Smooth density of the box: volume, surface and edge terms.

    (1/E0) [ (pi/4) sqrt(eps/E0) V/L^3 - (pi/8) S/(2 L^2)
             + (1/8) sqrt(E0/eps) P/L ]

    with V the volume, S the total surface and P the total edge length.
    """
    eps = np.asarray(eps, dtype=float)
    if np.any(eps <= 0):
        raise DomainError("smooth density requires eps > 0")
    e0 = energy_scale(geom, params)
    term_v = 0.25 * math.pi * np.sqrt(eps / e0) * geom.volume / geom.L**3
    term_s = 0.125 * math.pi * geom.surface / (2.0 * geom.L**2)
    term_e = 0.125 * np.sqrt(e0 / eps) * geom.edge_length / geom.L
    out = (term_v - term_s + term_e) / e0
    return out if out.ndim else float(out)


def exact_resummed_density(geom, params, eps_grid, k_max, sigma=0.0):
    """Boundary-corrected resummed density of the box spectrum.

    Assembles the three Poisson-resummed families with coefficients
    (1, -1/2, +1/4):

        g = g_torus - (1/2) sum_faces g_face + (1/4) sum_edges g_edge

    where every family includes its k = 0 point, so at k_max = 0 the
    assembly collapses to the smooth density exactly.  Each oscillating
    term is damped by exp(-(tau sigma/hbar)^2/2), the leading Fourier
    attenuation of Gaussian broadening; with k_max and sigma chosen
    consistently the result reproduces the broadened exact spectrum.
    """
    eps_grid = _check_density_args(eps_grid, k_max, sigma)
    e0 = energy_scale(geom, params)
    a = geom.a
    a_sq = a**2

    lam3, w3 = _weighted_groups(a_sq, k_max, include_zero=True)
    g = _family_sum(lam3, w3, eps_grid, params, sigma, spherical_j0)
    g = g * (0.25 * math.pi / e0 * np.sqrt(eps_grid / e0) * geom.volume / geom.L**3)

    for i, j in ((0, 1), (1, 2), (0, 2)):
        lam2, w2 = _weighted_groups(np.array([a_sq[i], a_sq[j]]), k_max, include_zero=True)
        face = _family_sum(lam2, w2, eps_grid, params, sigma, bessel_j0)
        g = g - 0.5 * face * (0.25 * math.pi / e0 * a[i] * a[j] / geom.L**2)

    for i in (0, 1, 2):
        lam1, w1 = _weighted_groups(np.array([a_sq[i]]), k_max, include_zero=True)
        edge = _family_sum(lam1, w1, eps_grid, params, sigma, np.cos)
        g = g + 0.25 * edge * (a[i] / (2.0 * geom.L * np.sqrt(e0 * eps_grid)))

    meta = {
        "producer": "exact_resummed_density",
        "geometry": list(a),
        "L": geom.L,
        "k_max": k_max,
        "sigma": sigma,
    }
    return DensityGrid(eps_grid, g, meta)
