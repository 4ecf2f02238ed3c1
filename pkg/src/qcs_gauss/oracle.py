"""Grid-quadrature cross-checks for one-mode states.

Everything here integrates the Wigner function directly on a uniform grid
with the trapezoid rule, independently of the pairwise closed forms in
:mod:`qcs_gauss.core`. Each reported integral is computed on the grid and
on the same grid with every other node dropped; if the two disagree by more
than ``RICHARDSON_RTOL`` the grid is declared too coarse.
"""

from dataclasses import dataclass
import math

import numpy as np

from .core import GaussianSumState, moments, wigner, wigner_gradient
from .errors import DimensionMismatch, GridTooCoarse

RICHARDSON_RTOL = 1e-3
NEGATIVITY_ATOL = 1e-8
DEFAULT_POINTS = 801
# |W| - W has kinks where W changes sign, so the trapezoid rule is only
# second order there; negativity defaults to a finer grid.
NEGATIVITY_POINTS = 1601
MIN_HALF_WIDTH = 8.0

# Cap on grid nodes times terms held in memory at once for the generic path.
_EVAL_BLOCK = 1 << 21


@dataclass(frozen=True)
class GridSpec:
    half_width: float
    points_per_axis: int = DEFAULT_POINTS
    center: tuple = (0.0, 0.0)

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")
        if self.points_per_axis < 64:
            raise ValueError("points_per_axis must be at least 64")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    def axes(self):
        cx, cp = self.center
        n = self.points_per_axis
        return (
            np.linspace(cx - self.half_width, cx + self.half_width, n),
            np.linspace(cp - self.half_width, cp + self.half_width, n),
        )

    @property
    def step(self):
        return 2 * self.half_width / (self.points_per_axis - 1)


def _one_mode(state):
    if state.n_modes != 1:
        raise DimensionMismatch("the quadrature oracle handles one-mode states only")


def auto_grid(state, points_per_axis=DEFAULT_POINTS):
    """Square grid centred on the state's mean and wide enough for every term."""
    _one_mode(state)
    center, _ = moments(state)
    reach = np.max(np.abs(state.means.real - center[None, :]))
    diag = np.max(np.abs(np.diagonal(state.covs, axis1=1, axis2=2).real))
    half = max(MIN_HALF_WIDTH, float(reach + 6 * math.sqrt(diag)))
    return GridSpec(half, points_per_axis, tuple(center))


# ---------------------------------------------------------------------------
# evaluation on a grid


def _separable(state):
    covs = state.covs
    return bool(np.all(covs[:, 0, 1] == 0) and np.all(covs[:, 1, 0] == 0))


def _grid_separable(state, xs, ps, gradient):
    # W[i, j] = sum_m c_m gx_m(xs[i]) gp_m(ps[j]) as a matrix product
    vx = state.covs[:, 0, 0]
    vp = state.covs[:, 1, 1]
    dx = xs[None, :] - state.means[:, 0, None]
    dp = ps[None, :] - state.means[:, 1, None]
    log_gx = -0.5 * dx**2 / vx[:, None]
    log_gp = -0.5 * dp**2 / vp[:, None]
    peak = np.max(log_gx.real, axis=1, keepdims=True)
    log_gx = log_gx - peak
    log_gp = log_gp + (state.log_coeffs + state.log_norms)[:, None] + peak
    gx, gp = np.exp(log_gx), np.exp(log_gp)
    w = gx.T @ gp
    if not gradient:
        return w, None
    wx = (-(dx / vx[:, None]) * gx).T @ gp
    wp = gx.T @ (-(dp / vp[:, None]) * gp)
    return w, np.stack([wx, wp])


def _grid_generic(state, xs, ps, gradient):
    xx, pp = np.meshgrid(xs, ps, indexing="ij")
    pts = np.column_stack([xx.ravel(), pp.ravel()])
    w = np.empty(pts.shape[0], dtype=complex)
    g = np.empty(pts.shape, dtype=complex) if gradient else None
    step = max(1, _EVAL_BLOCK // state.n_terms)
    for start in range(0, pts.shape[0], step):
        chunk = pts[start : start + step]
        w[start : start + step] = wigner(state, chunk)
        if gradient:
            g[start : start + step] = wigner_gradient(state, chunk)
    shape = xx.shape
    w = w.reshape(shape)
    if gradient:
        g = np.stack([g[:, 0].reshape(shape), g[:, 1].reshape(shape)])
    return w, g


def wigner_grid(state, grid=None, gradient=False):
    """Wigner function (and optionally its analytic gradient) on a grid.

    Returns:
        tuple: ``(xs, ps, W, grad)`` with ``W[i, j] = W(xs[i], ps[j])`` and
        ``grad`` of shape ``(2, len(xs), len(ps))`` or ``None``
    """
    _one_mode(state)
    grid = grid or auto_grid(state)
    xs, ps = grid.axes()
    if _separable(state):
        w, g = _grid_separable(state, xs, ps, gradient)
    else:
        w, g = _grid_generic(state, xs, ps, gradient)
    return xs, ps, w, g


def _trapz2(values, xs, ps):
    return float(np.trapezoid(np.trapezoid(values, ps, axis=1), xs, axis=0))


def _checked_integral(values, xs, ps, what, atol=0.0):
    fine = _trapz2(values, xs, ps)
    coarse = _trapz2(values[::2, ::2], xs[::2], ps[::2])
    if abs(fine - coarse) > RICHARDSON_RTOL * abs(fine) + atol:
        raise GridTooCoarse(fine, coarse, what)
    return fine


# ---------------------------------------------------------------------------
# Wigner functions given in closed form


class FockLossyWigner:
    """Wigner function of the Fock state ``|k>`` after 50% loss.

    ``W_k(x, p) = (x^2 + p^2)^k exp(-(x^2 + p^2)) / (pi k!)``
    """

    def __init__(self, k):
        if k < 0:
            raise ValueError("k must be non-negative")
        self.k = int(k)
        self._norm = 1 / (math.pi * math.factorial(self.k))

    def __call__(self, x, p):
        u = np.asarray(x) ** 2 + np.asarray(p) ** 2
        return self._norm * u**self.k * np.exp(-u)

    def gradient(self, x, p):
        x, p = np.asarray(x, dtype=float), np.asarray(p, dtype=float)
        u = x**2 + p**2
        if self.k:
            radial = self._norm * np.exp(-u) * (self.k * u ** (self.k - 1) - u**self.k)
        else:
            radial = -self._norm * np.exp(-u)
        return np.stack([2 * x * radial, 2 * p * radial])


def fock_lossy_wigner(k):
    return FockLossyWigner(k)


def _function_grid(fn, grid):
    xs, ps = grid.axes()
    xx, pp = np.meshgrid(xs, ps, indexing="ij")
    w = np.asarray(fn(xx, pp), dtype=complex)
    if hasattr(fn, "gradient"):
        g = np.asarray(fn.gradient(xx, pp), dtype=complex)
    else:
        g = np.stack(np.gradient(w, xs, ps))
    return xs, ps, w, g


def _default_grid(target):
    if isinstance(target, GaussianSumState):
        return auto_grid(target)
    return GridSpec(MIN_HALF_WIDTH)


def _grid_data(target, grid, gradient=True):
    grid = grid or _default_grid(target)
    if isinstance(target, GaussianSumState):
        return wigner_grid(target, grid, gradient=gradient)
    return _function_grid(target, grid)


# ---------------------------------------------------------------------------
# integrals


def purity_numeric(target, grid=None):
    """``2 pi`` times the integral of ``|W|^2``."""
    xs, ps, w, _ = _grid_data(target, grid, gradient=False)
    return 2 * math.pi * _checked_integral(np.abs(w) ** 2, xs, ps, "purity")


def grad_overlap_numeric(target, grid=None):
    """``2 pi`` times the integral of ``|grad W|^2``."""
    xs, ps, _, g = _grid_data(target, grid)
    return 2 * math.pi * _checked_integral(np.sum(np.abs(g) ** 2, axis=0), xs, ps, "gradient")


def qcs_numeric(target, grid=None):
    """Squared QCS as the ratio of grid integrals of ``|grad W|^2`` and ``|W|^2``.

    Args:
        target: a one-mode :class:`GaussianSumState`, or a callable ``W(x, p)``
            on arrays; a ``gradient(x, p)`` method is used when present,
            otherwise the gradient is taken by finite differences on the grid
        grid (GridSpec): defaults to :func:`auto_grid` for states and a
            half-width-8 grid at the origin for callables

    Raises:
        GridTooCoarse: if either integral fails the half-step check
    """
    xs, ps, w, g = _grid_data(target, grid)
    num = _checked_integral(np.sum(np.abs(g) ** 2, axis=0), xs, ps, "gradient")
    den = _checked_integral(np.abs(w) ** 2, xs, ps, "purity")
    return num / (2 * den)


def negativity_volume(target, grid=None):
    """Integral of the negative part of the Wigner function, ``(|W| - W) / 2``.

    Tails beyond the grid are ignored; for GKP states the grid covers the
    kept lattice only.
    """
    if grid is None and isinstance(target, GaussianSumState):
        grid = auto_grid(target, NEGATIVITY_POINTS)
    xs, ps, w, _ = _grid_data(target, grid, gradient=False)
    w = w.real
    return _checked_integral(0.5 * (np.abs(w) - w), xs, ps, "negativity", atol=NEGATIVITY_ATOL)


def wigner_min(target, grid=None):
    """Smallest value of ``Re W`` over the grid nodes."""
    _, _, w, _ = _grid_data(target, grid, gradient=False)
    return float(np.min(w.real))


def wigner_section(state, xs, p=0.0):
    """``W(x, p)`` along a line of constant ``p``."""
    pts = np.column_stack([np.asarray(xs, dtype=float), np.full(len(xs), float(p))])
    return wigner(state, pts)


# ---------------------------------------------------------------------------
# gradient self-check


def finite_difference_gradient(state, points, h=1e-5):
    """Central-difference gradient of ``W`` at each point."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    dim = points.shape[1]
    out = np.empty(points.shape, dtype=complex)
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = h
        out[:, i] = (wigner(state, points + e) - wigner(state, points - e)) / (2 * h)
    return out


def gradient_fd_discrepancy(state, points, h=1e-5):
    """Max absolute gap between the analytic and finite-difference gradients."""
    return float(np.max(np.abs(wigner_gradient(state, points) - finite_difference_gradient(state, points, h))))
