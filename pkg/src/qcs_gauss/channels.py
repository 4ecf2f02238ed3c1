"""Deterministic Gaussian channels acting term by term on Gaussian-sum states.

A channel ``(X, Y, d)`` maps every term as ``gamma -> X gamma X^T + Y`` and
``mu -> X mu + d``; coefficients and the number of terms never change.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DimensionMismatch

SYMPLECTIC_TOL = 1e-12
CP_TOL = 1e-12


def symplectic_form(n_modes):
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True, eq=False)
class GaussianChannel:
    """A Gaussian map ``(X, Y, d)`` on ``n`` modes.

    Raw triples are accepted without a complete-positivity check, so non-CP
    maps can be built on purpose; the named constructors in this module are
    checked.
    """

    X: np.ndarray
    Y: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        x = np.array(self.X, dtype=float)
        y = np.array(self.Y, dtype=float)
        d = np.array(self.d, dtype=float).reshape(-1)
        dim = d.size
        if dim % 2 or x.shape != (dim, dim) or y.shape != (dim, dim):
            raise DimensionMismatch(f"channel shapes {x.shape}, {y.shape}, {d.shape} are inconsistent")
        if np.max(np.abs(y - y.T), initial=0.0) > 1e-12:
            raise ValueError("Y must be symmetric")
        for name, value in (("X", x), ("Y", y), ("d", d)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def n_modes(self):
        return self.d.size // 2

    def then(self, other):
        """Channel equal to applying ``self`` first and ``other`` second."""
        return compose(self, other)

    def __call__(self, state):
        return apply(self, state)


def apply(channel, state):
    if channel.n_modes != state.n_modes:
        raise DimensionMismatch(
            f"channel acts on {channel.n_modes} modes, state has {state.n_modes}"
        )
    x = channel.X
    covs = np.einsum("ij,tjk,lk->til", x, state.covs, x) + channel.Y
    means = state.means @ x.T + channel.d
    return state.with_arrays(means=means, covs=covs)


def compose(first, second):
    x2 = second.X
    return GaussianChannel(x2 @ first.X, x2 @ first.Y @ x2.T + second.Y, x2 @ first.d + second.d)


def is_symplectic(x, tol=SYMPLECTIC_TOL):
    omega = symplectic_form(x.shape[0] // 2)
    return float(np.max(np.abs(x @ omega @ x.T - omega))) <= tol


def is_completely_positive(channel, tol=CP_TOL):
    """Check ``Y + i/2 Omega - i/2 X Omega X^T >= 0``."""
    omega = symplectic_form(channel.n_modes)
    m = channel.Y + 0.5j * omega - 0.5j * channel.X @ omega @ channel.X.T
    return float(np.min(np.linalg.eigvalsh(m))) >= -tol


def _checked(channel, unitary=False):
    if unitary and not is_symplectic(channel.X):
        raise ValueError("unitary channel matrix is not symplectic")
    if not is_completely_positive(channel):
        raise ValueError("channel is not completely positive")
    return channel


def identity(n_modes=1):
    dim = 2 * n_modes
    return GaussianChannel(np.eye(dim), np.zeros((dim, dim)), np.zeros(dim))


def loss(eta, n_modes=1):
    """Pure-loss channel with transmissivity ``eta`` in ``(0, 1]`` on every mode."""
    if not 0 < eta <= 1:
        raise ValueError(f"transmissivity must lie in (0, 1], got {eta!r}")
    dim = 2 * n_modes
    return _checked(
        GaussianChannel(math.sqrt(eta) * np.eye(dim), (1 - eta) * np.eye(dim) / 2, np.zeros(dim))
    )


def displacement(d):
    """Phase-space shift by the real vector ``d`` (length ``2n``)."""
    d = np.asarray(d, dtype=float).reshape(-1)
    dim = d.size
    return _checked(GaussianChannel(np.eye(dim), np.zeros((dim, dim)), d), unitary=True)


def _single_mode(block, mode, n_modes):
    if not 0 <= mode < n_modes:
        raise DimensionMismatch(f"mode {mode} out of range for {n_modes} modes")
    dim = 2 * n_modes
    x = np.eye(dim)
    x[2 * mode : 2 * mode + 2, 2 * mode : 2 * mode + 2] = block
    return _checked(GaussianChannel(x, np.zeros((dim, dim)), np.zeros(dim)), unitary=True)


def rotation(theta, mode=0, n_modes=1):
    """Phase rotation by ``theta`` (counter-clockwise in the ``(x, p)`` plane)."""
    c, s = math.cos(theta), math.sin(theta)
    return _single_mode(np.array([[c, -s], [s, c]]), mode, n_modes)


def squeezing(r, mode=0, n_modes=1):
    """Squeezing that takes vacuum to ``diag(e^{-2r}, e^{2r}) / 2``."""
    return _single_mode(np.diag([math.exp(-r), math.exp(r)]), mode, n_modes)
