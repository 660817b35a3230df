"""Generic trace engine: saddles, stability, orbit terms, smooth term."""

import math

import numpy as np
import pytest

from relspec import (
    BoxGeometry,
    DegenerateTorusError,
    DomainError,
    HamiltonianModel,
    NumericalError,
    QuadratureSpec,
    RelParams,
    billiard_model,
    eikonal,
    energy_scale,
    maslov_nu,
    orbit_term,
    oscillating_density,
    solve_saddle,
    stability,
    thomas_fermi_density,
)
from relspec.trace import _stability_forms

PARAMS = RelParams()
CUBE = BoxGeometry(math.pi, math.pi, math.pi)


class LinearModel(HamiltonianModel):
    """H = w0 * I, flat torus: the Hessian is identically zero."""

    def __init__(self, w0=2.0):
        self.w0 = w0

    @property
    def D(self):
        return 1

    @property
    def mu(self):
        return np.array([2.0])

    def value(self, I):
        return self.w0 * float(np.asarray(I)[0])

    def gradient(self, I):
        return np.array([self.w0])

    def hessian(self, I):
        return np.zeros((1, 1))


class Quad1D(HamiltonianModel):
    """H = c0 * I^2 in one degree of freedom."""

    def __init__(self, c0=3.0):
        self.c0 = c0

    @property
    def D(self):
        return 1

    @property
    def mu(self):
        return np.array([4.0])

    def value(self, I):
        return self.c0 * float(np.asarray(I)[0]) ** 2

    def gradient(self, I):
        return 2.0 * self.c0 * np.asarray(I, dtype=float)

    def hessian(self, I):
        return np.array([[2.0 * self.c0]])


def test_model_derivative_consistency():
    # finite differences pin gradient and hessian of the box model
    rng = np.random.default_rng(23)
    for _ in range(5):
        geom = BoxGeometry(*rng.uniform(1.0, 4.0, 3))
        model = billiard_model(geom, PARAMS)
        I = rng.uniform(0.5, 5.0, 3)
        grad = model.gradient(I)
        hess = model.hessian(I)
        assert np.max(np.abs(hess - hess.T)) < 1e-12
        h = 1e-6
        for i in range(3):
            dI = np.zeros(3)
            dI[i] = h
            fd = (model.value(I + dI) - model.value(I - dI)) / (2.0 * h)
            assert abs(fd - grad[i]) / abs(grad[i]) < 1e-6
            fd_row = (model.gradient(I + dI) - model.gradient(I - dI)) / (2.0 * h)
            denom = np.max(np.abs(hess)) or 1.0
            assert np.max(np.abs(fd_row - hess[i])) / denom < 1e-5


def test_saddle_matches_closed_form():
    model = billiard_model(CUBE, PARAMS)
    sol = solve_saddle(model, 50.0, np.array([1, 1, 1]))
    assert np.max(np.abs(sol.I_bar - 10.0 / math.sqrt(3.0))) < 1e-10
    assert sol.tau_bar == pytest.approx(math.pi * math.sqrt(3.0) / 5.0, rel=1e-10)
    assert sol.quad_form == pytest.approx(100.0, rel=1e-10)
    assert sol.detH == pytest.approx(1.0, rel=1e-12)
    assert sol.nu == 2


def test_saddle_k_scaling():
    # doubling k doubles the period and leaves the torus actions fixed
    model = billiard_model(CUBE, PARAMS)
    s1 = solve_saddle(model, 50.0, np.array([1, 1, 1]))
    s2 = solve_saddle(model, 50.0, np.array([2, 2, 2]))
    assert s2.tau_bar == pytest.approx(2.0 * s1.tau_bar, rel=1e-12)
    assert np.max(np.abs(s2.I_bar - s1.I_bar)) < 1e-10
    assert s2.eikonal == pytest.approx(2.0 * s1.eikonal, rel=1e-12)


def test_saddle_solution_invariants():
    rng = np.random.default_rng(7)
    for _ in range(8):
        geom = BoxGeometry(*rng.uniform(1.5, 5.0, 3))
        model = billiard_model(geom, PARAMS)
        eps = float(rng.uniform(5.0, 80.0))
        k = rng.integers(1, 4, 3)
        sol = solve_saddle(model, eps, k)
        assert sol.residual <= 1e-12 * (1.0 + abs(eps))
        assert sol.tau_bar > 0 and np.all(sol.I_bar >= 0)
        # stability data recomputes from the stored Hessian
        detH, quad, detM = stability(model, sol)
        assert detH == pytest.approx(sol.detH, rel=1e-10)
        assert quad == pytest.approx(sol.quad_form, rel=1e-10)
        assert detM == pytest.approx(detH * quad, rel=1e-12)
        # commensurability k_i w_j = k_j w_i
        w = sol.omega
        for i in range(3):
            for j in range(3):
                assert abs(k[i] * w[j] - k[j] * w[i]) <= 1e-9 * abs(k[i] * w[j])
        # resonance frequencies vs model gradient
        w_res = 2.0 * math.pi * k / sol.tau_bar
        assert np.max(np.abs(w_res - w)) / np.max(np.abs(w)) < 1e-8
        # engine eikonal 2 pi k.I equals the box form p * L_k
        assert sol.eikonal == pytest.approx(eikonal(geom, PARAMS, eps, k), rel=1e-10)


def test_saddle_errors():
    model = billiard_model(CUBE, PARAMS)
    with pytest.raises(DomainError):
        solve_saddle(model, -1.0, np.array([1, 1, 1]))
    with pytest.raises(DomainError):
        solve_saddle(model, 50.0, np.array([1, 0, 1]))
    with pytest.raises(DomainError):
        solve_saddle(model, 50.0, np.array([1.5, 1.0, 1.0]))
    with pytest.raises(DegenerateTorusError):
        solve_saddle(LinearModel(), 3.0, np.array([1]))
    with pytest.raises(NumericalError) as err:
        solve_saddle(
            model,
            50.0,
            np.array([1, 1, 1]),
            guess=(np.array([500.0, 0.01, 40.0]), 99.0),
            max_iter=1,
        )
    assert err.value.last_iterate is not None


def test_maslov_examples():
    assert maslov_nu(np.diag([1.0, 2.0, 3.0]), 1.0) == 2
    assert maslov_nu(-np.eye(3), -1.0) == -3
    assert maslov_nu(np.diag([1.0, 1.0, -1.0]), 1.0) == 0
    with pytest.raises(DegenerateTorusError):
        maslov_nu(np.diag([1.0, 1e-20, 1.0]), 1.0)


def test_stability_algebra():
    # diagonal H = h*1, w = (w,w,w): detM = h^3 * 3w^2/h = 3 h^2 w^2
    h, w = 0.7, 1.9
    detH, quad = _stability_forms(h * np.eye(3), np.full(3, w))
    assert detH * quad == pytest.approx(3.0 * h**2 * w**2, rel=1e-12)


def test_stability_rejects_foreign_solution():
    model = billiard_model(CUBE, PARAMS)
    sol = solve_saddle(model, 50.0, np.array([1, 1, 1]))
    sol.tau_bar *= 1.01
    with pytest.raises(NumericalError):
        stability(model, sol)


def test_orbit_term_cube_value():
    # closed reduction: term = sin(20 pi sqrt(3)) / sqrt(3) at eps = 50
    model = billiard_model(CUBE, PARAMS)
    sol = solve_saddle(model, 50.0, np.array([1, 1, 1]))
    term = orbit_term(model, sol, PARAMS)
    expected = math.sin(20.0 * math.pi * math.sqrt(3.0)) / math.sqrt(3.0)
    assert term == pytest.approx(expected, rel=1e-10)
    assert term == pytest.approx(0.5216147301825421, abs=5e-13)


def test_orbit_term_vanishing_phase():
    # S(k)/hbar = pi at eps = 1/24 for the cube diagonal family
    model = billiard_model(CUBE, PARAMS)
    eps = 1.0 / 24.0
    sol = solve_saddle(model, eps, np.array([1, 1, 1]))
    assert sol.eikonal == pytest.approx(math.pi, rel=1e-12)
    assert abs(orbit_term(model, sol, PARAMS)) < 1e-10


def test_orbit_term_amplitude_halves():
    model = billiard_model(CUBE, PARAMS)
    s1 = solve_saddle(model, 50.0, np.array([1, 1, 1]))
    s2 = solve_saddle(model, 50.0, np.array([2, 2, 2]))
    amp1 = orbit_term(model, s1, PARAMS) / math.cos(
        s1.eikonal - 0.5 * math.pi * float(s1.k @ model.mu) - 0.25 * math.pi * s1.nu
    )
    amp2 = orbit_term(model, s2, PARAMS) / math.cos(
        s2.eikonal - 0.5 * math.pi * float(s2.k @ model.mu) - 0.25 * math.pi * s2.nu
    )
    assert amp2 == pytest.approx(0.5 * amp1, rel=1e-10)


def test_oscillating_density_matches_lattice_sum():
    """Engine output against the brute-force j0 lattice sum.

    The closed-form summand depends only on |k_i|, so the all-nonzero
    lattice restricted to |k_i| <= 2 is 2^3 copies of the positive
    orthant the engine sweeps.
    """
    geom = BoxGeometry(math.pi, 1.1 * math.pi, 0.9 * math.pi)
    model = billiard_model(geom, PARAMS)
    grid = np.linspace(20.0, 60.0, 5)
    dens = oscillating_density(model, grid, 2, PARAMS)
    assert not dens.meta["skipped"]
    e0 = energy_scale(geom, PARAMS)
    pref = 0.25 * math.pi / e0 * np.sqrt(grid / e0) * geom.volume / geom.L**3
    brute = np.zeros_like(grid)
    rng = [-2, -1, 1, 2]
    for k1 in rng:
        for k2 in rng:
            for k3 in rng:
                S = np.array(
                    [eikonal(geom, PARAMS, e, np.array([k1, k2, k3])) for e in grid]
                )
                brute += np.sinc(S / np.pi)
    brute *= pref
    assert np.max(np.abs(dens.g - brute) / np.abs(brute)) < 1e-9


def test_oscillating_density_edge_cases():
    model = billiard_model(CUBE, PARAMS)
    grid = np.linspace(10.0, 20.0, 4)
    empty = oscillating_density(model, grid, 0, PARAMS)
    assert np.all(empty.g == 0.0)
    damped = oscillating_density(model, grid, 1, PARAMS, sigma=1e6)
    assert np.max(np.abs(damped.g)) < 1e-300
    with pytest.raises(DomainError):
        oscillating_density(model, grid, -1, PARAMS)
    with pytest.raises(DomainError):
        oscillating_density(model, np.array([-1.0, 2.0]), 1, PARAMS)
    with pytest.raises(DomainError):
        oscillating_density(model, grid, 1, PARAMS, sigma=-0.1)


def test_oscillating_density_records_skips():
    dens = oscillating_density(LinearModel(), np.array([1.0, 2.0]), 1, PARAMS)
    assert np.all(dens.g == 0.0)
    assert len(dens.meta["skipped"]) == 2


def test_thomas_fermi_billiard():
    # quadrature against the closed volume term of the box
    model = billiard_model(CUBE, PARAMS)
    e0 = energy_scale(CUBE, PARAMS)
    for eps in (10.0, 30.0, 50.0):
        lead = 0.25 * math.pi / e0 * math.sqrt(eps / e0)
        got = thomas_fermi_density(model, eps, PARAMS)
        assert abs(got - lead) / lead < 1e-4
    assert thomas_fermi_density(model, 50.0, PARAMS) == pytest.approx(
        5.0 * math.pi, rel=1e-4
    )


def test_thomas_fermi_1d_and_edges():
    c0 = 3.0
    model = Quad1D(c0)
    for eps in (0.5, 4.0):
        expected = 1.0 / (2.0 * math.sqrt(c0 * eps))
        assert thomas_fermi_density(model, eps, PARAMS) == pytest.approx(
            expected, rel=1e-5
        )
    assert thomas_fermi_density(model, 0.0, PARAMS) == 0.0
    with pytest.raises(DomainError):
        thomas_fermi_density(model, -1.0, PARAMS)


def test_quadrature_spec_validation():
    with pytest.raises(DomainError):
        QuadratureSpec(rel_tol=0.5)
    with pytest.raises(DomainError):
        QuadratureSpec(fd_step=0.9)
