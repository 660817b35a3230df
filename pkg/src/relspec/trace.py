"""Trace formula engine for integrable systems in action variables.

For a D-torus Hamiltonian eps = H(I) the oscillating part of the
density of states is a sum over rational frequency ratios, one term
per repetition vector k (all components positive here, the +-k partner
enters as a factor 2):

    d g_k = (1/2pi) (2pi/hbar)^((D+1)/2) tau^-((D-1)/2)
            |det Hess * omega.Hinv.omega|^(-1/2)
            cos( 2pi k.(I/hbar - mu/4) - pi nu / 4 )

evaluated on the resonant torus that solves the saddle conditions

    2 pi k_i = tau * omega_i(I),    eps = H(I).

``solve_saddle`` locates that torus by a damped Newton iteration,
``orbit_term`` assembles one cosine term, ``oscillating_density`` sums
them over a k box, and ``thomas_fermi_density`` supplies the smooth
phase-space volume term by quadrature.
"""

import abc
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import DegenerateTorusError, DomainError, NumericalError
from .kinematics import RelParams
from .spectra import DensityGrid
from .sums import CompensatedSum

__all__ = [
    "HamiltonianModel",
    "SaddleSolution",
    "QuadratureSpec",
    "solve_saddle",
    "stability",
    "maslov_nu",
    "orbit_term",
    "oscillating_density",
    "thomas_fermi_density",
]

_EIG_DEGENERACY_CUTOFF = 1e-12


class HamiltonianModel(abc.ABC):
    """Classical torus Hamiltonian H(I) on the positive action orthant.

    Subclasses provide the dimension D, the Maslov phase vector mu, and
    value / gradient / hessian of H.  The gradient is the frequency
    vector omega(I).  ``commensurate_ray`` may be overridden with a
    direction along which omega is parallel to k; the default ray k
    itself is good enough to seed Newton for well-behaved models.
    """

    @property
    @abc.abstractmethod
    def D(self) -> int:
        """Number of action variables."""

    @property
    @abc.abstractmethod
    def mu(self) -> np.ndarray:
        """Maslov phase vector entering the action phase k.(I/hbar - mu/4)."""

    @abc.abstractmethod
    def value(self, I):
        """H(I)."""

    @abc.abstractmethod
    def gradient(self, I):
        """omega(I) = dH/dI."""

    @abc.abstractmethod
    def hessian(self, I):
        """d^2 H / dI dI, symmetric (D, D)."""

    def commensurate_ray(self, k):
        """Direction in action space used to seed the saddle search."""
        return np.asarray(k, dtype=float)


@dataclass
class SaddleSolution:
    """A resonant torus: actions, period, frequencies and stability data."""

    k: np.ndarray
    I_bar: np.ndarray
    tau_bar: float
    omega: np.ndarray
    H: np.ndarray
    detH: float
    quad_form: float
    nu: int
    eikonal: float
    residual: float


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls for the smooth-term quadrature and its eps derivative."""

    rel_tol: float = 1e-6
    fd_step: float = 0.05   # relative central-difference step in eps
    limit: int = 200        # adaptive subdivision limit per axis

    def __post_init__(self):
        if not (0 < self.rel_tol < 1e-2 and 0 < self.fd_step < 0.5):
            raise DomainError("unreasonable quadrature controls")


def _check_k(k, D, positive):
    k = np.asarray(k)
    if k.shape != (D,) or not np.issubdtype(k.dtype, np.integer):
        raise DomainError("k must be an integer vector of length D")
    if not np.any(k):
        raise DomainError("k = 0 is the smooth term, not an orbit")
    if positive and np.any(k <= 0):
        raise DomainError("saddle solving requires all k components >= 1")
    return k


def _residual(model, eps, k, I, tau):
    omega = model.gradient(I)
    r = np.empty(model.D + 1)
    r[: model.D] = 2.0 * math.pi * k - tau * omega
    r[model.D] = eps - model.value(I)
    return r, omega


def solve_saddle(model, eps, k, guess=None, tol=1e-12, max_iter=50):
    """Locate the resonant torus for repetition vector k at pseudoenergy eps.

    Solves 2 pi k = tau * omega(I), eps = H(I) for (I, tau) by a damped
    Newton iteration and returns a fully populated SaddleSolution.

    Parameters
    ----------
    model : HamiltonianModel
    eps : float
        Pseudoenergy, must be > 0.
    k : sequence of int
        Repetition numbers, every component >= 1.
    guess : (I0, tau0), optional
        Starting point.  Default seeds along model.commensurate_ray(k),
        scaled onto the energy shell by bisection.
    tol : float
        Convergence threshold on max |residual| / (1 + |eps|).
    max_iter : int

    Raises
    ------
    DegenerateTorusError
        Singular Newton matrix or singular/degenerate torus Hessian.
    NumericalError
        No convergence within max_iter; carries the last iterate.
    """
    if eps <= 0:
        raise DomainError("saddle search requires eps > 0")
    k = _check_k(k, model.D, positive=True)
    if guess is None:
        I0, tau0 = _default_guess(model, eps, k)
    else:
        I0 = np.asarray(guess[0], dtype=float).copy()
        tau0 = float(guess[1])
    I, tau = I0, tau0
    kf = np.asarray(k, dtype=float)
    r, omega = _residual(model, eps, kf, I, tau)
    scale = tol * (1.0 + abs(eps))
    for _ in range(max_iter):
        if np.max(np.abs(r)) <= scale:
            break
        hess = model.hessian(I)
        jac = np.zeros((model.D + 1, model.D + 1))
        jac[: model.D, : model.D] = -tau * hess
        jac[: model.D, model.D] = -omega
        jac[model.D, : model.D] = -omega
        try:
            step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            raise DegenerateTorusError("singular Newton matrix at the current iterate")
        lam = 1.0
        r_norm = np.linalg.norm(r)
        for _bt in range(40):
            I_new = I + lam * step[: model.D]
            tau_new = tau + lam * step[model.D]
            if tau_new > 0 and np.all(I_new >= 0):
                r_new, omega_new = _residual(model, eps, kf, I_new, tau_new)
                if np.linalg.norm(r_new) < r_norm or np.max(np.abs(r_new)) <= scale:
                    break
            lam *= 0.5
        else:
            raise NumericalError(
                "saddle Newton stalled while backtracking", last_iterate=(I, tau)
            )
        I, tau, r, omega = I_new, tau_new, r_new, omega_new
    else:
        raise NumericalError(
            "saddle Newton did not converge in %d iterations" % max_iter,
            last_iterate=(I, tau),
        )
    return _package_solution(model, eps, k, I, tau, r, omega)


def _default_guess(model, eps, k):
    ray = np.asarray(model.commensurate_ray(k), dtype=float)
    if np.any(ray < 0) or not np.any(ray > 0):
        raise DomainError("commensurate ray must be a nonzero non-negative direction")
    ray = ray / np.linalg.norm(ray)

    def shell(s):
        return model.value(s * ray) - eps

    s_hi = 1.0
    for _ in range(200):
        if shell(s_hi) > 0:
            break
        s_hi *= 2.0
    else:
        raise NumericalError("could not bracket the energy shell along the seed ray")
    s_lo = s_hi
    for _ in range(200):
        s_lo *= 0.5
        if shell(s_lo) < 0:
            break
    else:
        raise NumericalError("could not bracket the energy shell along the seed ray")
    s = brentq(shell, s_lo, s_hi, xtol=1e-300, rtol=1e-15)
    I0 = s * ray
    omega0 = model.gradient(I0)
    denom = float(omega0 @ omega0)
    if denom == 0.0:
        raise DegenerateTorusError("zero frequency vector on the seed shell")
    tau0 = 2.0 * math.pi * float(np.asarray(k) @ omega0) / denom
    if tau0 <= 0:
        tau0 = abs(tau0) or 1.0
    return I0, tau0


def _package_solution(model, eps, k, I, tau, r, omega):
    hess = model.hessian(I)
    detH, quad_form = _stability_forms(hess, 2.0 * math.pi * np.asarray(k, float) / tau)
    nu = maslov_nu(hess, quad_form)
    eikonal = 2.0 * math.pi * float(np.asarray(k, float) @ I)
    return SaddleSolution(
        k=np.array(k),
        I_bar=I,
        tau_bar=float(tau),
        omega=np.asarray(omega, dtype=float),
        H=hess,
        detH=detH,
        quad_form=quad_form,
        nu=nu,
        eikonal=eikonal,
        residual=float(np.max(np.abs(r))),
    )


def _stability_forms(hess, omega):
    hess = np.asarray(hess, dtype=float)
    eigs = np.linalg.eigvalsh(hess)
    cutoff = _EIG_DEGENERACY_CUTOFF * np.max(np.abs(eigs)) if eigs.size else 0.0
    if np.any(np.abs(eigs) <= cutoff):
        raise DegenerateTorusError("torus Hessian has a (near-)zero eigenvalue")
    detH = float(np.prod(eigs))
    quad_form = float(omega @ np.linalg.solve(hess, omega))
    return detH, quad_form


def stability(model, sol: SaddleSolution):
    """Stability data (detH, quad_form, detM) of a converged saddle.

    Frequencies are rebuilt from the resonance condition omega = 2 pi k
    / tau and cross-checked against the model gradient; a relative
    mismatch above 1e-8 means the solution does not belong to the model.
    """
    omega_res = 2.0 * math.pi * np.asarray(sol.k, dtype=float) / sol.tau_bar
    omega_grad = np.asarray(model.gradient(sol.I_bar), dtype=float)
    denom = np.linalg.norm(omega_grad)
    if denom == 0 or np.linalg.norm(omega_res - omega_grad) / denom > 1e-8:
        raise NumericalError("resonance frequencies disagree with the model gradient")
    hess = model.hessian(sol.I_bar)
    detH, quad_form = _stability_forms(hess, omega_res)
    return detH, quad_form, detH * quad_form


def maslov_nu(hess, quad_form):
    """Index nu = N+ - N- - N0 from the Hessian signature.

    N+/N- count positive/negative Hessian eigenvalues; the extra time
    direction contributes N0 = 1 exactly when the frequency quadratic
    form omega.Hinv.omega is positive.
    """
    hess = np.asarray(hess, dtype=float)
    eigs = np.linalg.eigvalsh(hess)
    cutoff = _EIG_DEGENERACY_CUTOFF * np.max(np.abs(eigs)) if eigs.size else 0.0
    if np.any(np.abs(eigs) <= cutoff):
        raise DegenerateTorusError("torus Hessian has a (near-)zero eigenvalue")
    n_plus = int(np.sum(eigs > 0))
    n_minus = int(np.sum(eigs < 0))
    n_zero = 1 if quad_form > 0 else 0
    return n_plus - n_minus - n_zero


def orbit_term(model, sol: SaddleSolution, params: RelParams):
    """One periodic-orbit cosine term of the oscillating density.

    Covers a single repetition vector k; the reflected partner -k is
    accounted for by the factor 2 in ``oscillating_density``.
    """
    hbar = params.hbar
    D = model.D
    amp = (
        (1.0 / (2.0 * math.pi))
        * (2.0 * math.pi / hbar) ** ((D + 1) / 2.0)
        * sol.tau_bar ** (-(D - 1) / 2.0)
        / math.sqrt(abs(sol.detH * sol.quad_form))
    )
    mu = np.asarray(model.mu, dtype=float)
    phase = (
        sol.eikonal / hbar
        - 0.5 * math.pi * float(np.asarray(sol.k, float) @ mu)
        - 0.25 * math.pi * sol.nu
    )
    return amp * math.cos(phase)


def oscillating_density(model, eps_grid, k_enum, params: RelParams, sigma=0.0):
    """Sum of 2 * orbit_term over the positive k box, 1 <= k_i <= k_enum.

    Terms are damped by exp(-(tau * sigma / hbar)^2 / 2) when sigma > 0,
    the leading Fourier attenuation of a Gaussian-broadened spectrum.
    k is swept in lexicographic order with compensated accumulation, so
    the result is reproducible bit for bit.  A failed saddle never
    aborts the sum: the term is skipped and recorded in meta["skipped"].
    """
    if k_enum < 0:
        raise DomainError("k_enum must be >= 0")
    if sigma < 0:
        raise DomainError("sigma must be >= 0")
    eps_grid = np.asarray(eps_grid, dtype=float)
    if np.any(eps_grid <= 0):
        raise DomainError("oscillating density requires eps > 0")
    g = np.zeros_like(eps_grid)
    skipped = []
    k_list = list(itertools.product(range(1, k_enum + 1), repeat=model.D))
    warm = {}
    for i, eps in enumerate(eps_grid):
        acc = CompensatedSum()
        for k in k_list:
            try:
                sol = solve_saddle(model, float(eps), np.array(k), guess=warm.get(k))
            except (DegenerateTorusError, NumericalError) as exc:
                skipped.append({"eps": float(eps), "k": list(k), "error": str(exc)})
                warm.pop(k, None)
                continue
            warm[k] = (sol.I_bar.copy(), sol.tau_bar)
            term = 2.0 * orbit_term(model, sol, params)
            if sigma > 0:
                term *= math.exp(-0.5 * (sol.tau_bar * sigma / params.hbar) ** 2)
            acc.add(term)
        g[i] = acc.total
    meta = {
        "producer": "oscillating_density",
        "model": repr(model),
        "k_enum": k_enum,
        "sigma": sigma,
        "skipped": skipped,
    }
    return DensityGrid(eps_grid, g, meta)


def thomas_fermi_density(model, eps, params: RelParams, quadrature: QuadratureSpec = None):
    """Smooth density of states hbar^-D * d/d eps Vol{ I >= 0 : H(I) <= eps }.

    The orthant volume below the energy shell is integrated by nested
    adaptive quadrature (H must be increasing in each action on the
    orthant, which holds for every model shipped here); the eps
    derivative is a Richardson-extrapolated central difference.
    """
    if eps < 0:
        raise DomainError("thomas_fermi_density requires eps >= 0")
    if eps == 0.0:
        return 0.0
    spec = quadrature or QuadratureSpec()

    def volume(e):
        return _orthant_volume(model, e, spec)

    h = spec.fd_step * eps

    def central(hh):
        return (volume(eps + hh) - volume(eps - hh)) / (2.0 * hh)

    d1 = central(h)
    d2 = central(0.5 * h)
    return (4.0 * d2 - d1) / (3.0 * params.hbar**model.D)


def _axis_extent(model, eps, prefix, axis):
    """Upper root of H(prefix, t, 0, ..) = eps along one action axis."""
    D = model.D

    def point(t):
        I = np.zeros(D)
        I[: len(prefix)] = prefix
        I[axis] = t
        return I

    f0 = model.value(point(0.0)) - eps
    if f0 >= 0:
        return 0.0
    t_hi = 1.0
    for _ in range(200):
        if model.value(point(t_hi)) - eps > 0:
            break
        t_hi *= 2.0
    else:
        raise NumericalError("energy shell unbounded along an action axis")
    return brentq(lambda t: model.value(point(t)) - eps, 0.0, t_hi, rtol=1e-14)


def _orthant_volume(model, eps, spec, prefix=()):
    axis = len(prefix)
    if axis == model.D - 1:
        return _axis_extent(model, eps, prefix, axis)
    upper = _axis_extent(model, eps, prefix, axis)
    if upper == 0.0:
        return 0.0
    val, err = quad(
        lambda t: _orthant_volume(model, eps, spec, prefix + (t,)),
        0.0,
        upper,
        epsabs=0.0,
        epsrel=0.1 * spec.rel_tol,
        limit=spec.limit,
    )
    if not math.isfinite(val):
        raise NumericalError("phase-space volume quadrature failed")
    if abs(err) > spec.rel_tol * max(abs(val), 1e-300):
        raise NumericalError("phase-space volume quadrature did not reach tolerance")
    return val
