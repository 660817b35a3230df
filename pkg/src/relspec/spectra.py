"""Spectral post-processing: broadening, counting, comparison, peaks.

Everything here operates on the pseudoenergy axis.  A DensityGrid is
the common container for sampled densities of states; producers attach
their configuration to ``meta`` so results stay self-describing.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .special import gaussian_kernel

__all__ = ["DensityGrid", "broadened_density", "staircase", "compare", "find_peaks"]


@dataclass
class DensityGrid:
    """A density of states sampled on a strictly increasing eps grid."""

    eps: np.ndarray
    g: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.eps = np.asarray(self.eps, dtype=float)
        self.g = np.asarray(self.g, dtype=float)
        if self.eps.ndim != 1 or self.eps.shape != self.g.shape:
            raise DomainError("eps and g must be 1-d arrays of equal length")
        if self.eps.size >= 2 and not np.all(np.diff(self.eps) > 0):
            raise DomainError("eps grid must be strictly increasing")
        if not self.meta:
            raise DomainError("meta must identify the producing computation")


def broadened_density(levels, eps_grid, sigma):
    """Gaussian-broadened delta comb of a level list.

    g(eps) = sum_n deg_n * exp(-(eps - eps_n)^2 / 2 sigma^2) / (sigma sqrt(2 pi))

    An empty level list yields the zero grid with a warning flag in meta.
    """
    if sigma <= 0:
        raise DomainError("sigma must be positive")
    eps_grid = np.asarray(eps_grid, dtype=float)
    meta = {"producer": "broadened_density", "sigma": sigma, "n_levels": len(levels)}
    if not levels:
        meta["warning"] = "empty level list"
        return DensityGrid(eps_grid, np.zeros_like(eps_grid), meta)
    centers = np.array([lv.eps for lv in levels])
    weights = np.array([float(lv.degeneracy) for lv in levels])
    g = gaussian_kernel(eps_grid[:, None] - centers[None, :], sigma) @ weights
    return DensityGrid(eps_grid, g, meta)


def staircase(levels, eps):
    """Cumulative level count N(eps) = sum of degeneracies with eps_n <= eps."""
    eps_arr = np.asarray(eps, dtype=float)
    flat = np.atleast_1d(eps_arr)
    if levels:
        centers = np.array([lv.eps for lv in levels], dtype=float)
        weights = np.array([lv.degeneracy for lv in levels], dtype=float)
        counts = (centers[None, :] <= flat[:, None]) @ weights
    else:
        counts = np.zeros(flat.shape)
    if eps_arr.ndim == 0:
        return int(counts[0])
    return counts


def compare(a: DensityGrid, b: DensityGrid, window=None):
    """Relative L2 distance and max abs deviation of two densities.

    Both grids must be sampled on the identical eps array; the relative
    L2 norm uses trapezoid quadrature weights over the window.
    """
    if not np.array_equal(a.eps, b.eps):
        raise DomainError("compare requires identical eps grids")
    eps = a.eps
    if window is None:
        window = (eps[0], eps[-1])
    lo, hi = window
    if lo >= hi or lo < eps[0] or hi > eps[-1]:
        raise DomainError("window must be a non-empty range inside the grid")
    mask = (eps >= lo) & (eps <= hi)
    if mask.sum() < 2:
        raise DomainError("window contains fewer than two grid points")
    e = eps[mask]
    da = a.g[mask]
    db = b.g[mask]
    w = np.zeros_like(e)
    w[1:] += 0.5 * np.diff(e)
    w[:-1] += 0.5 * np.diff(e)
    diff = da - db
    norm_a = np.sqrt(np.sum(w * da * da))
    norm_d = np.sqrt(np.sum(w * diff * diff))
    if norm_a == 0.0:
        rel = 0.0 if norm_d == 0.0 else np.inf
    else:
        rel = norm_d / norm_a
    return float(rel), float(np.max(np.abs(diff)))


def find_peaks(grid: DensityGrid):
    """Strict interior local maxima of g, refined by a local parabola.

    Returns an array of refined peak positions in eps.  Needs at least
    three grid points; a monotone profile yields an empty array.
    """
    if grid.eps.size < 3:
        raise DomainError("find_peaks needs at least three grid points")
    g = grid.g
    eps = grid.eps
    idx = np.nonzero((g[1:-1] > g[:-2]) & (g[1:-1] > g[2:]))[0] + 1
    peaks = []
    for i in idx:
        x0, x1, x2 = eps[i - 1], eps[i], eps[i + 1]
        y0, y1, y2 = g[i - 1], g[i], g[i + 1]
        # vertex of the parabola through the three bracketing samples
        denom = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0)
        if denom == 0:
            peaks.append(x1)
            continue
        num = (x1 - x0) ** 2 * (y1 - y2) - (x1 - x2) ** 2 * (y1 - y0)
        peaks.append(x1 - 0.5 * num / denom)
    return np.array(peaks)
