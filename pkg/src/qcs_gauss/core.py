"""Gaussian-sum states and the closed-form purity / QCS engine.

A state on ``n`` modes is a Wigner function of the form

    W(r) = sum_m c_m G(r; mu_m, gamma_m)

where each ``G`` is a normalized, possibly complex, Gaussian function of the
real phase-space vector ``r = (x_1, p_1, ..., x_n, p_n)`` (hbar = 1, vacuum
covariance ``I/2``). Coefficients are stored as complex logarithms because
breeding and GKP states pair astronomically small coefficients with
astronomically large Gaussian peaks.

The purity and the gradient overlap are double sums over term pairs. Both
use the same kernel

    K_mn = c_m conj(c_n) exp(A_mn) / sqrt(det(gamma_m + conj(gamma_n)))

so their ratio (the squared QCS) is free of any ``(2 pi)^n`` factor.
"""

from dataclasses import dataclass
from functools import cached_property
import math
import warnings

import numpy as np
from scipy.spatial import cKDTree

from .errors import (
    BranchWarning,
    DimensionMismatch,
    HermiticityViolation,
    NonPositiveDefinite,
    PurityOutOfRange,
    SingularCovariance,
    SingularPairSum,
)
from .linalg import bilinear, logsumexp_complex, lu_logdet, near_branch_cut

COND_LIMIT = 1e14
SYMMETRY_TOL = 1e-12
NORMALIZATION_TOL = 1e-8
HERMITICITY_TOL = 1e-10

# Upper bound on the number of (m, n) pairs evaluated in one row block.
PAIR_BLOCK = 1 << 17


def _readonly(a):
    a.setflags(write=False)
    return a


def _as_log_coeff(coeff):
    coeff = complex(coeff)
    if coeff == 0:
        return complex(-np.inf, 0.0)
    return complex(np.log(coeff))


@dataclass(frozen=True, eq=False)
class GaussianTerm:
    """One summand ``c G(r; mu, gamma)`` of a Gaussian-sum Wigner function.

    The coefficient is held as ``log_coeff`` (principal complex log); use
    :meth:`from_coeff` to build a term from a plain coefficient.
    """

    log_coeff: complex
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = _readonly(np.array(self.mean, dtype=complex).reshape(-1))
        cov = _readonly(np.array(self.cov, dtype=complex))
        if mean.size % 2 or cov.shape != (mean.size, mean.size):
            raise DimensionMismatch(
                f"mean of length {mean.size} and cov of shape {cov.shape} do not describe 2n quadratures"
            )
        object.__setattr__(self, "log_coeff", complex(self.log_coeff))
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @classmethod
    def from_coeff(cls, coeff, mean, cov):
        return cls(_as_log_coeff(coeff), mean, cov)

    @property
    def coeff(self):
        return complex(np.exp(self.log_coeff))

    @property
    def n_modes(self):
        return self.mean.size // 2

    def conj(self):
        return GaussianTerm(np.conj(self.log_coeff), self.mean.conj(), self.cov.conj())


class GaussianSumState:
    """An ``n``-mode state whose Wigner function is a finite sum of Gaussians.

    Instances are immutable. Terms are stored as stacked arrays so that the
    pairwise kernels can be vectorized; :attr:`terms` gives the list view.

    Args:
        log_coeffs (array[complex]): shape ``(T,)``
        means (array[complex]): shape ``(T, 2n)``
        covs (array[complex]): shape ``(T, 2n, 2n)``
    """

    def __init__(self, log_coeffs, means, covs):
        log_coeffs = np.array(log_coeffs, dtype=complex).reshape(-1)
        means = np.array(means, dtype=complex)
        covs = np.array(covs, dtype=complex)
        if means.ndim != 2 or means.shape[1] % 2 or means.shape[1] == 0:
            raise DimensionMismatch(f"means must have shape (T, 2n), got {means.shape}")
        t, dim = means.shape
        if log_coeffs.shape != (t,) or covs.shape != (t, dim, dim):
            raise DimensionMismatch(
                f"inconsistent term arrays: {log_coeffs.shape}, {means.shape}, {covs.shape}"
            )
        if t == 0:
            raise DimensionMismatch("a state needs at least one term")
        self.log_coeffs = _readonly(log_coeffs)
        self.means = _readonly(means)
        self.covs = _readonly(covs)

    @classmethod
    def from_terms(cls, terms):
        terms = list(terms)
        if not terms:
            raise DimensionMismatch("a state needs at least one term")
        dims = {term.mean.size for term in terms}
        if len(dims) != 1:
            raise DimensionMismatch(f"terms disagree on phase-space dimension: {sorted(dims)}")
        return cls(
            [term.log_coeff for term in terms],
            np.stack([term.mean for term in terms]),
            np.stack([term.cov for term in terms]),
        )

    @property
    def n_modes(self):
        return self.means.shape[1] // 2

    @property
    def n_terms(self):
        return self.means.shape[0]

    @property
    def coeffs(self):
        return np.exp(self.log_coeffs)

    @property
    def terms(self):
        return [
            GaussianTerm(lc, mu, cov)
            for lc, mu, cov in zip(self.log_coeffs, self.means, self.covs)
        ]

    def __len__(self):
        return self.n_terms

    def __repr__(self):
        return f"GaussianSumState(n_modes={self.n_modes}, n_terms={self.n_terms})"

    def conj(self):
        return GaussianSumState(self.log_coeffs.conj(), self.means.conj(), self.covs.conj())

    def with_arrays(self, log_coeffs=None, means=None, covs=None):
        return GaussianSumState(
            self.log_coeffs if log_coeffs is None else log_coeffs,
            self.means if means is None else means,
            self.covs if covs is None else covs,
        )

    def normalized(self):
        """Copy with coefficients rescaled so that they sum to one."""
        return self.with_arrays(log_coeffs=self.log_coeffs - logsumexp_complex(self.log_coeffs))

    @cached_property
    def _cov_factors(self):
        cond = np.linalg.cond(self.covs)
        bad = np.flatnonzero(~(cond < COND_LIMIT))
        if bad.size:
            raise SingularCovariance(int(bad[0]))
        inv = np.linalg.inv(self.covs)
        dim = self.means.shape[1]
        logdet, _ = lu_logdet(2 * np.pi * self.covs)
        return inv, logdet, dim

    @property
    def inv_covs(self):
        return self._cov_factors[0]

    @property
    def log_norms(self):
        """``-log sqrt(det(2 pi gamma_m))`` per term."""
        return -0.5 * self._cov_factors[1]


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Diagnostics:
    normalization_residual: float
    hermiticity_residual: float
    symmetry_residuals: np.ndarray

    def ok(self, normalization_tol=NORMALIZATION_TOL, hermiticity_tol=HERMITICITY_TOL):
        return (
            self.normalization_residual <= normalization_tol
            and self.hermiticity_residual <= hermiticity_tol
            and bool(np.all(self.symmetry_residuals <= SYMMETRY_TOL))
        )


def _closure_features(log_coeffs, means, covs):
    lc = np.asarray(log_coeffs)
    re = np.where(np.isfinite(lc.real), lc.real, -1e4)
    phase = np.where(np.isfinite(lc.real), lc.imag, 0.0)
    iu = np.triu_indices(covs.shape[1])
    upper = covs[:, iu[0], iu[1]]
    return np.column_stack(
        [re, np.cos(phase), np.sin(phase), means.real, means.imag, upper.real, upper.imag]
    )


def validate(state):
    """Report how far ``state`` is from a normalized, real Wigner function.

    Nothing is raised; callers decide what to do with the residuals.

    Returns:
        Diagnostics: ``normalization_residual = |sum c_m - 1|``;
        ``hermiticity_residual`` is the largest distance from any term to the
        nearest complex conjugate of a term, relative to the size of its
        parameters; ``symmetry_residuals`` holds ``max|gamma - gamma^T|`` per term.
    """
    total = np.sum(state.coeffs)
    norm_res = float(abs(total - 1.0))
    feats = _closure_features(state.log_coeffs, state.means, state.covs)
    conj_feats = _closure_features(state.log_coeffs.conj(), state.means.conj(), state.covs.conj())
    dist, _ = cKDTree(feats).query(conj_feats, k=1)
    scale = np.maximum(1.0, np.max(np.abs(feats), axis=1))
    herm_res = float(np.max(dist / scale))
    sym = np.max(np.abs(state.covs - np.swapaxes(state.covs, 1, 2)), axis=(1, 2))
    return Diagnostics(norm_res, herm_res, sym)


# ---------------------------------------------------------------------------
# Wigner function


def _check_points(state, points):
    points = np.asarray(points, dtype=float)
    single = points.ndim == 1
    points = np.atleast_2d(points)
    if points.shape[-1] != 2 * state.n_modes:
        raise DimensionMismatch(
            f"phase point has length {points.shape[-1]}, state needs {2 * state.n_modes}"
        )
    return points, single


def _term_exponents(state, points):
    # (N, T, 2n) displacements and (N, T) log-values of c_m G_m
    diff = points[:, None, :] - state.means[None, :, :]
    inv = state.inv_covs
    solved = np.einsum("tij,ntj->nti", inv, diff)
    quad = np.einsum("nti,nti->nt", diff, solved)
    logs = state.log_coeffs[None, :] + state.log_norms[None, :] - 0.5 * quad
    return logs, solved


def wigner(state, points):
    """Evaluate the (complex) Wigner function at real phase points.

    Args:
        state (GaussianSumState): the state
        points (array[float]): shape ``(2n,)`` or ``(N, 2n)``

    Returns:
        complex or array[complex]: ``W`` at each point
    """
    points, single = _check_points(state, points)
    out = np.empty(points.shape[0], dtype=complex)
    step = max(1, PAIR_BLOCK // state.n_terms)
    for start in range(0, points.shape[0], step):
        logs, _ = _term_exponents(state, points[start : start + step])
        out[start : start + step] = np.sum(np.exp(logs), axis=1)
    return complex(out[0]) if single else out


def wigner_eval(state, point):
    """``W(point)`` for a single phase point."""
    point = np.asarray(point, dtype=float)
    if point.ndim != 1:
        raise DimensionMismatch("wigner_eval takes a single phase point; use wigner() for arrays")
    return wigner(state, point)


def wigner_gradient(state, points):
    """Analytic gradient ``sum_m c_m grad G_m`` with ``grad G = -gamma^-1 (r - mu) G``."""
    points, single = _check_points(state, points)
    out = np.empty(points.shape, dtype=complex)
    step = max(1, PAIR_BLOCK // state.n_terms)
    for start in range(0, points.shape[0], step):
        logs, solved = _term_exponents(state, points[start : start + step])
        out[start : start + step] = -np.einsum("nt,nti->ni", np.exp(logs), solved)
    return out[0] if single else out


# ---------------------------------------------------------------------------
# pairwise overlaps


@dataclass(frozen=True, eq=False)
class OverlapDatum:
    """Quantities produced by multiplying ``G_m`` with ``conj(G_n)``.

    Attributes:
        gamma_sum: ``gamma_m + conj(gamma_n)``
        gamma_prod_inv: the product covariance ``Gamma``, defined through
            ``Gamma^-1 = gamma_m^-1 + conj(gamma_n)^-1``
        d: mean of the product Gaussian
        A: exponent of the product prefactor
        log_kernel: ``log(c_m conj(c_n)) + A - 1/2 log det(gamma_sum)``
    """

    gamma_sum: np.ndarray
    gamma_prod_inv: np.ndarray
    d: np.ndarray
    A: complex
    log_kernel: complex

    @property
    def kernel(self):
        return complex(np.exp(self.log_kernel))


def pairwise_overlap(term_m, term_n):
    """Overlap data for one ordered pair of terms.

    ``A`` and ``d`` are evaluated in the difference form
    ``A = -1/2 delta^T S^-1 delta`` and ``d = mu_m - gamma_m S^-1 delta`` with
    ``S = gamma_m + conj(gamma_n)`` and ``delta = mu_m - conj(mu_n)``. These are
    algebraically identical to the information-form expressions but do not
    subtract large quadratic forms from each other.

    Raises:
        SingularCovariance: if either covariance is singular
        SingularPairSum: if ``S`` is numerically singular
    """
    for index, term in enumerate((term_m, term_n)):
        if not np.linalg.cond(term.cov) < COND_LIMIT:
            raise SingularCovariance(index)
    if term_m.mean.size != term_n.mean.size:
        raise DimensionMismatch("terms act on different numbers of modes")
    s = term_m.cov + term_n.cov.conj()
    cond = np.linalg.cond(s)
    if not cond < COND_LIMIT:
        raise SingularPairSum((0, 1), cond)
    s_inv = np.linalg.inv(s)
    delta = term_m.mean - term_n.mean.conj()
    v = s_inv @ delta
    a = -0.5 * (delta @ v)
    d = term_m.mean - term_m.cov @ v
    gamma = term_m.cov @ s_inv @ term_n.cov.conj()
    logdet, phase = lu_logdet(s)
    if near_branch_cut(phase):
        warnings.warn(f"sqrt(det) branch ambiguous for pair: phase {float(phase):.3f}", BranchWarning)
    log_kernel = term_m.log_coeff + np.conj(term_n.log_coeff) + a - 0.5 * complex(logdet)
    return OverlapDatum(s, gamma, d, complex(a), complex(log_kernel))


@dataclass(frozen=True)
class PairSums:
    """Scaled double sums: true value is ``exp(log_shift) * <field>``."""

    log_shift: float
    purity_sum: complex
    grad_sum: complex
    max_abs_A: float
    n_branch_warnings: int


def _pair_block(state, rows, cols):
    covs, means, lcs = state.covs, state.means, state.log_coeffs
    s = covs[rows, None] + covs[None, cols].conj()
    cond = np.linalg.cond(s)
    bad = np.argwhere(~(cond < COND_LIMIT))
    if bad.size:
        i, j = bad[0]
        raise SingularPairSum((rows[i], cols[j]), float(cond[i, j]))
    s_inv = np.linalg.inv(s)
    delta = means[rows, None, :] - means[None, cols, :].conj()
    v = np.einsum("abij,abj->abi", s_inv, delta)
    a = -0.5 * np.einsum("abi,abi->ab", delta, v)
    logdet, phase = lu_logdet(s)
    log_k = lcs[rows, None] + lcs[None, cols].conj() + a - 0.5 * logdet
    grad = np.trace(s_inv, axis1=-2, axis2=-1) - np.einsum("abi,abi->ab", v, v)
    return log_k, grad, a, phase


def pair_sums(state, triangular=False, block=PAIR_BLOCK):
    """Accumulate the purity and gradient double sums over all term pairs.

    The ``(m, n)`` index set is partitioned into contiguous blocks of rows
    ``m``; each block is reduced with its own log-shift and blocks are merged
    in increasing row order, so the result is bit-for-bit reproducible for a
    given ``block`` size.

    With ``triangular=True`` only pairs ``m <= n`` are evaluated and the
    off-diagonal contributions enter as ``2 Re K_mn``, using
    ``K_nm = conj(K_mn)``.
    """
    t = state.n_terms
    rows_per_block = max(1, block // t)
    shift = -np.inf
    p_acc = 0j
    g_acc = 0j
    max_a = 0.0
    n_branch = 0
    all_cols = np.arange(t)
    for start in range(0, t, rows_per_block):
        rows = np.arange(start, min(t, start + rows_per_block))
        cols = all_cols[start:] if triangular else all_cols
        log_k, grad, a, phase = _pair_block(state, rows, cols)
        if triangular:
            upper = cols[None, :] >= rows[:, None]
            log_k = np.where(upper, log_k, -np.inf)
        finite = np.isfinite(log_k.real)
        if finite.any():
            max_a = max(max_a, float(np.max(np.abs(a[finite]))))
            n_branch += int(np.count_nonzero(near_branch_cut(phase) & finite))
            b_shift = float(np.max(log_k.real[finite]))
            new_shift = max(shift, b_shift)
            scale_old = math.exp(shift - new_shift) if np.isfinite(shift) else 0.0
            k = np.exp(log_k - new_shift)
            if triangular:
                diag = cols[None, :] == rows[:, None]
                p_blk = np.sum(np.where(diag, k.real, 2 * k.real))
                g_blk = np.sum(np.where(diag, (k * grad).real, 2 * (k * grad).real))
            else:
                p_blk = np.sum(k)
                g_blk = np.sum(k * grad)
            p_acc = p_acc * scale_old + p_blk
            g_acc = g_acc * scale_old + g_blk
            shift = new_shift
    if n_branch:
        warnings.warn(
            f"{n_branch} pair(s) have sqrt(det) phases within 0.1 rad of the branch cut",
            BranchWarning,
        )
    return PairSums(shift, complex(p_acc), complex(g_acc), max_a, n_branch)


def _scaled_real(value, log_shift):
    return float(value.real * math.exp(log_shift)) if np.isfinite(log_shift) else 0.0


def purity(state, **kwargs):
    """Closed-form ``Tr rho^2`` as a double sum over pairs of terms.

    A value outside ``(0, 1 + 1e-8]`` is returned unchanged together with a
    :class:`PurityOutOfRange` warning.
    """
    sums = pair_sums(state, **kwargs)
    value = _scaled_real(sums.purity_sum, sums.log_shift)
    if not 0 < value <= 1 + NORMALIZATION_TOL:
        warnings.warn(f"purity {value!r} outside (0, 1]", PurityOutOfRange)
    return value


def grad_overlap(state, **kwargs):
    """Gradient double sum ``sum K_mn (Tr S^-1 + (d - mu_n*)^T gamma_n*^-1 gamma_m^-1 (d - mu_m))``.

    Equals ``(2 pi)^n`` times the integral of ``|grad W|^2``.
    """
    sums = pair_sums(state, **kwargs)
    return _scaled_real(sums.grad_sum, sums.log_shift)


@dataclass(frozen=True)
class QcsReport:
    purity: float
    grad_overlap: float
    qcs_squared: float
    hermiticity_residual: float
    n_terms: int
    max_abs_A: float
    imag_residual: float = 0.0

    def as_dict(self):
        return {
            "qcs_squared": self.qcs_squared,
            "purity": self.purity,
            "grad_overlap": self.grad_overlap,
            "hermiticity_residual": self.hermiticity_residual,
            "n_terms": self.n_terms,
            "max_abs_A": self.max_abs_A,
            "imag_residual": self.imag_residual,
        }


def qcs(state, **kwargs):
    """Squared quadrature coherence scale with diagnostics."""
    sums = pair_sums(state, **kwargs)
    p, g = sums.purity_sum, sums.grad_sum
    imag = max(abs(p.imag) / abs(p), abs(g.imag) / max(abs(g), 1e-300))
    return QcsReport(
        purity=_scaled_real(p, sums.log_shift),
        grad_overlap=_scaled_real(g, sums.log_shift),
        qcs_squared=float(g.real / (2 * state.n_modes * p.real)),
        hermiticity_residual=validate(state).hermiticity_residual,
        n_terms=state.n_terms,
        max_abs_A=sums.max_abs_A,
        imag_residual=float(imag),
    )


def qcs_squared(state, **kwargs):
    """Shortcut for ``qcs(state).qcs_squared`` without the closure check."""
    sums = pair_sums(state, **kwargs)
    return float(sums.grad_sum.real / (2 * state.n_modes * sums.purity_sum.real))


# ---------------------------------------------------------------------------
# moments and the pure / Gaussian shortcuts


def moments(state, tol=HERMITICITY_TOL):
    """Mean vector and covariance matrix of the state.

    Raises:
        HermiticityViolation: if either moment has an imaginary part larger
            than ``tol`` relative to its scale
    """
    c = state.coeffs
    mean = np.einsum("t,ti->i", c, state.means)
    second = np.einsum("t,tij->ij", c, state.covs) + np.einsum(
        "t,ti,tj->ij", c, state.means, state.means
    )
    cov = second - np.outer(mean, mean)
    for name, value in (("mean", mean), ("cov", cov)):
        scale = max(1.0, float(np.max(np.abs(value.real))))
        if np.max(np.abs(value.imag)) > tol * scale:
            raise HermiticityViolation(
                f"{name} has imaginary residue {np.max(np.abs(value.imag)):.3g}"
            )
    cov = cov.real
    return mean.real, 0.5 * (cov + cov.T)


def _check_cov(cov, n_modes):
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (2 * n_modes, 2 * n_modes):
        raise DimensionMismatch(f"expected a {2 * n_modes}x{2 * n_modes} covariance, got {cov.shape}")
    return cov


def qcs_pure_from_covariance(cov, n_modes=1):
    """QCS squared of a pure state: ``Tr(gamma) / n``."""
    cov = _check_cov(cov, n_modes)
    return float(np.trace(cov) / n_modes)


def qcs_gaussian(cov, n_modes=1):
    """QCS squared of a Gaussian state: ``Tr(gamma^-1) / (4n)``."""
    cov = _check_cov(cov, n_modes)
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        raise NonPositiveDefinite("covariance matrix is not positive definite") from None
    inv_chol = np.linalg.inv(chol)
    return float(np.sum(inv_chol**2) / (4 * n_modes))
