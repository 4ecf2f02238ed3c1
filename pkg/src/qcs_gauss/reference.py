"""Closed-form QCS values for benchmark states, used as test fixtures.

All functions assume real amplitudes and take squared QCS values.
"""

import math

import numpy as np


def qcs2_cat(alpha):
    a2 = abs(alpha) ** 2
    return 1 + 2 * a2 * math.tanh(a2)


def _cat_loss_ratio(a2, eta):
    # sinh(u) / (cosh(u) + cosh(v) + 2) with u = 4 a2 eta - 2 a2, v = 2 a2, overflow-safe
    u, v = 4 * a2 * eta - 2 * a2, 2 * a2
    m = max(abs(u), v)
    num = 0.5 * (math.exp(u - m) - math.exp(-u - m))
    den = 0.5 * (math.exp(u - m) + math.exp(-u - m)) + 0.5 * (math.exp(v - m) + math.exp(-v - m))
    return num / (den + 2 * math.exp(-m))


def qcs2_cat_lossy(alpha, eta):
    """Cat state ``|alpha> + |-alpha>`` after a loss channel of transmissivity ``eta``."""
    a2 = abs(alpha) ** 2
    return 1 + 4 * eta * a2 * _cat_loss_ratio(a2, eta)


def cat_decay_slope(alpha):
    """``d qcs2_cat_lossy / d eta`` at ``eta = 1``."""
    a2 = abs(alpha) ** 2
    return 2 * a2 * (2 * a2 + math.tanh(a2))


def qcs2_squeezed_lossy(r, eta):
    """Squeezed vacuum ``S(r)|0>`` after a loss channel."""
    c = eta * math.cosh(2 * r) - eta
    return 1 / ((1 - 2 * eta) * c / (c + 1) + 1)


def qcs2_gkp_approx(epsilon):
    """Rough small-damping trend of the GKP QCS, ``e^-eps (tanh eps + coth eps)``."""
    return math.exp(-epsilon) * (math.tanh(epsilon) + 1 / math.tanh(epsilon))


def qcs2_squeezed_cat(alpha, r):
    """Squeezed cat ``(1 + D(alpha)) S(r)|0>``, i.e. breeding with zero rounds."""
    x = 0.5 * alpha**2 * math.exp(2 * r)
    # (e^{4r} + 1) / (e^x + 1) in log space
    ratio = math.exp(np.logaddexp(0.0, 4 * r) - np.logaddexp(0.0, x))
    return 0.5 * alpha**2 * (1 - ratio) + math.cosh(2 * r)
