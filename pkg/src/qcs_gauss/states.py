"""Constructors for Gaussian-sum states: Gaussian states, cats, GKP, bred states."""

import math
import os

import numpy as np
from scipy.special import gammaln

from .core import GaussianSumState, GaussianTerm
from .errors import TermCapExceeded, TruncationTooTight

DEFAULT_MAX_TERMS = 20000


def max_terms():
    """Term-count cap, overridable through the ``QCS_MAX_TERMS`` environment variable."""
    return int(os.environ.get("QCS_MAX_TERMS", DEFAULT_MAX_TERMS))


def _check_cap(n_terms):
    cap = max_terms()
    if n_terms > cap:
        raise TermCapExceeded(f"construction needs {n_terms} terms, cap is {cap}")


def _single(mean, cov):
    mean = np.asarray(mean, dtype=complex)
    return GaussianSumState(np.zeros(1), mean[None, :], np.asarray(cov, dtype=complex)[None])


def vacuum(n_modes=1):
    dim = 2 * n_modes
    return _single(np.zeros(dim), np.eye(dim) / 2)


def coherent(alpha):
    """Coherent state ``|alpha>``; a sequence of amplitudes gives a product state."""
    alphas = np.atleast_1d(np.asarray(alpha, dtype=complex))
    mean = np.sqrt(2) * np.column_stack([alphas.real, alphas.imag]).reshape(-1)
    return _single(mean, np.eye(mean.size) / 2)


def squeezed_vacuum(r):
    """``S(r)|0>`` with covariance ``diag(e^{-2r}, e^{2r}) / 2``."""
    return _single(np.zeros(2), np.diag([math.exp(-2 * r), math.exp(2 * r)]) / 2)


def cat(alpha):
    """Even cat state ``|alpha> + |-alpha>`` as four Gaussian terms."""
    alpha = complex(alpha)
    a2 = abs(alpha) ** 2
    log_norm = -math.log(2.0) - math.log1p(math.exp(-2 * a2))
    mu1 = np.sqrt(2) * np.array([alpha.real, alpha.imag], dtype=complex)
    mu3 = np.sqrt(2) * np.array([1j * alpha.imag, -1j * alpha.real])
    log_coeffs = np.array([log_norm, log_norm, log_norm - 2 * a2, log_norm - 2 * a2], dtype=complex)
    means = np.stack([mu1, -mu1, mu3, mu3.conj()])
    covs = np.repeat((np.eye(2) / 2)[None], 4, axis=0)
    return GaussianSumState(log_coeffs, means, covs).normalized()


# ---------------------------------------------------------------------------
# GKP


def _gkp_lattice(epsilon, cutoff, a0, a1):
    """Arrays describing the (ket, bra) lattice ``n = 2k + t`` with ``|k| <= cutoff``."""
    amps = {0: complex(a0), 1: complex(a1)}
    parities = [t for t in (0, 1) if amps[t] != 0]
    n_vals = np.concatenate([2 * np.arange(-cutoff, cutoff + 1) + t for t in parities])
    ket, bra = np.meshgrid(n_vals, n_vals, indexing="ij")
    ket, bra = ket.ravel(), bra.ravel()
    log_amp = {t: np.log(amps[t]) for t in parities}
    log_a = np.array([log_amp[t] for t in ket % 2]) + np.conj(np.array([log_amp[t] for t in bra % 2]))
    return ket, bra, log_a


def _gkp_log_weights(epsilon, ket, bra):
    tot = ket + bra
    return 0.5 * math.pi / math.sinh(2 * epsilon) * tot**2 - 0.5 * math.pi / math.tanh(epsilon) * (
        ket**2 + bra**2
    )


def _gkp_peak_log_magnitude(epsilon, ket, bra):
    # log of |c| * sup_r |G| for the shared diagonal covariance (up to a constant)
    im_mu_p = 0.5 * math.sqrt(math.pi) / math.sinh(epsilon) * (bra - ket)
    var_p = 0.5 / math.tanh(epsilon)
    return _gkp_log_weights(epsilon, ket, bra) + 0.5 * im_mu_p**2 / var_p


def gkp_cutoff(epsilon, rel_tol=1e-14):
    """Smallest symmetric lattice cutoff meeting the truncation policy.

    Every dropped term must have a peak magnitude below ``rel_tol`` times the
    largest kept one, and the cutoff is at least ``ceil(3 / sqrt(epsilon))``.
    """
    k = math.ceil(3 / math.sqrt(epsilon))
    while True:
        kept = np.arange(-2 * k, 2 * k + 2)
        ring = np.array([-2 * k - 2, -2 * k - 1, 2 * k + 2, 2 * k + 3])
        kept_max = np.max(_gkp_peak_log_magnitude(epsilon, kept, kept))
        dropped = np.max(_gkp_peak_log_magnitude(epsilon, ring[:, None], kept[None, :]))
        if dropped - kept_max < math.log(rel_tol):
            return k
        k += 1


def gkp(epsilon, a0=1.0, a1=0.0, cutoff=None):
    """Fock-damped GKP state ``exp(-epsilon n) (a0 |0>_GKP + a1 |1>_GKP)``.

    Each term pairs a ket lattice site ``n`` with a bra site ``n'`` (position
    ``n sqrt(pi)``) and has covariance ``diag(tanh eps, coth eps) / 2``, mean
    ``(sqrt(pi)/2) (sech(eps) (n + n'), i csch(eps) (n' - n))`` and weight
    ``a_n conj(a_n') exp(pi/2 csch(2 eps) (n + n')^2 - pi/2 coth(eps) (n^2 + n'^2))``.

    Args:
        epsilon (float): damping, must be positive
        a0, a1 (complex): logical amplitudes
        cutoff (int or None): lattice half-width ``K`` for ``k, l in [-K, K]``;
            ``None`` picks it adaptively via :func:`gkp_cutoff`

    Raises:
        TruncationTooTight: if an explicit cutoff drops a term whose peak
            magnitude exceeds ``1e-10`` of the largest kept one
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if a0 == 0 and a1 == 0:
        raise ValueError("a0 and a1 cannot both vanish")
    if cutoff is None:
        cutoff = gkp_cutoff(epsilon)
    else:
        cutoff = int(cutoff)
        kept = np.arange(-2 * cutoff, 2 * cutoff + 2)
        ring = np.array([-2 * cutoff - 2, -2 * cutoff - 1, 2 * cutoff + 2, 2 * cutoff + 3])
        kept_max = np.max(_gkp_peak_log_magnitude(epsilon, kept, kept))
        dropped = np.max(_gkp_peak_log_magnitude(epsilon, ring[:, None], kept[None, :]))
        if dropped - kept_max > math.log(1e-10):
            raise TruncationTooTight(
                f"cutoff {cutoff} drops terms at relative magnitude {math.exp(dropped - kept_max):.3g}"
            )
    ket, bra, log_a = _gkp_lattice(epsilon, cutoff, a0, a1)
    _check_cap(ket.size)
    log_c = log_a + _gkp_log_weights(epsilon, ket, bra)
    root_pi = math.sqrt(math.pi)
    means = np.column_stack(
        [
            0.5 * root_pi / math.cosh(epsilon) * (ket + bra) + 0j,
            0.5j * root_pi / math.sinh(epsilon) * (bra - ket),
        ]
    )
    cov = np.diag([math.tanh(epsilon), 1 / math.tanh(epsilon)]) / 2
    covs = np.repeat(cov[None].astype(complex), ket.size, axis=0)
    return GaussianSumState(log_c, means, covs).normalized()


# ---------------------------------------------------------------------------
# breeding


def displaced_squeezed_cross_term(beta, delta, r):
    """Wigner term of ``D(beta) S(r)|0><0|S(r)^dag D(delta)^dag`` for real displacements.

    The returned log-coefficient is the overlap prefactor
    ``-exp(2r) (beta - delta)^2 / 2``, before any global normalization.
    """
    beta, delta = float(beta), float(delta)
    e2r = math.exp(2 * r)
    mean = math.sqrt(0.5) * np.array([beta + delta, 1j * e2r * (delta - beta)])
    cov = np.diag([math.exp(-2 * r), e2r]) / 2
    return GaussianTerm(-0.5 * e2r * (beta - delta) ** 2, mean, cov)


def gkp_spacing_alpha(rounds):
    """Initial cat amplitude giving a final grid spacing of ``2 sqrt(pi)``."""
    return math.sqrt(2 ** (rounds + 1) * math.pi)


def breed(alpha=None, r=0.0, rounds=0, protocol="slow", recenter=True):
    """State after ``rounds`` of breeding with post-selection on ``p = 0``.

    The output is ``sum_k binom(K, k) D(k alpha / sqrt(2^M)) S(r)|0>`` with
    ``K = M + 1`` for the slow protocol and ``K = 2^M`` for the efficient one.
    Its density operator has one Gaussian term per ``(k, k')`` pair.

    Args:
        alpha (float or None): initial cat amplitude; ``None`` uses
            :func:`gkp_spacing_alpha` so the output grid has spacing ``2 sqrt(pi)``
        r (float): squeezing of the input cats
        rounds (int): number of breeding rounds ``M >= 0``
        protocol (str): ``"slow"`` or ``"efficient"``
        recenter (bool): displace along ``x`` so the grid is centred on the origin

    Raises:
        TermCapExceeded: if ``(K + 1)^2`` exceeds :func:`max_terms`
    """
    rounds = int(rounds)
    if rounds < 0:
        raise ValueError("rounds must be non-negative")
    if protocol == "slow":
        big_k = rounds + 1
    elif protocol == "efficient":
        big_k = 2**rounds
    else:
        raise ValueError(f"unknown breeding protocol {protocol!r}")
    _check_cap((big_k + 1) ** 2)
    if alpha is None:
        alpha = gkp_spacing_alpha(rounds)
    alpha = float(alpha)
    step = alpha / math.sqrt(2**rounds)
    ks = np.arange(big_k + 1)
    log_binom = gammaln(big_k + 1) - gammaln(ks + 1) - gammaln(big_k - ks + 1)
    betas = ks * step
    shift = math.sqrt(2) * betas[-1] / 2 if recenter else 0.0
    e2r = math.exp(2 * r)
    bk, bd = np.meshgrid(betas, betas, indexing="ij")
    lk, ld = np.meshgrid(log_binom, log_binom, indexing="ij")
    bk, bd, lk, ld = bk.ravel(), bd.ravel(), lk.ravel(), ld.ravel()
    log_c = lk + ld - 0.5 * e2r * (bk - bd) ** 2
    means = np.column_stack(
        [math.sqrt(0.5) * (bk + bd) - shift + 0j, 1j * math.sqrt(0.5) * e2r * (bd - bk)]
    )
    cov = np.diag([math.exp(-2 * r), e2r]) / 2
    covs = np.repeat(cov[None].astype(complex), bk.size, axis=0)
    return GaussianSumState(log_c.astype(complex), means, covs).normalized()


def gkp_reference_epsilon(r):
    """Damping whose GKP state matches squeezing ``r`` via ``tanh(eps) = exp(-2r)``."""
    return math.atanh(math.exp(-2 * r))
