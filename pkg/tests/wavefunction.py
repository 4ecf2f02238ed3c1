"""Position-space wavefunctions used as an independent check of the Gaussian-sum engine."""

import math

import numpy as np


def mehler_kernel(x, y, epsilon):
    """``<x| exp(-epsilon n) |y>`` for the harmonic oscillator with unit frequency."""
    q = math.exp(-epsilon)
    q2 = q * q
    return np.exp(-((1 + q2) * (x**2 + y**2) - 4 * q * x * y) / (2 * (1 - q2))) / math.sqrt(
        math.pi * (1 - q2)
    )


def gkp_wavefunction(xs, epsilon, a0=1.0, a1=0.0, cutoff=40):
    """Unnormalized Fock-damped GKP wavefunction on the points ``xs``."""
    xs = np.asarray(xs, dtype=float)
    psi = np.zeros(xs.shape, dtype=complex)
    for n in range(-2 * cutoff, 2 * cutoff + 2):
        amp = a0 if n % 2 == 0 else a1
        if amp:
            psi += amp * mehler_kernel(xs, n * math.sqrt(math.pi), epsilon)
    return psi


def normalize(psi, xs):
    return psi / math.sqrt(np.trapezoid(np.abs(psi) ** 2, xs))


def wigner_point(psi_fn, x, p, half_width=12.0, n=6001):
    """``W(x, p) = (1/pi) int psi(x + y) conj(psi(x - y)) exp(-2 i p y) dy``."""
    ys = np.linspace(-half_width, half_width, n)
    integrand = psi_fn(x + ys) * np.conj(psi_fn(x - ys)) * np.exp(-2j * p * ys)
    return np.trapezoid(integrand, ys) / math.pi


def pure_qcs_squared(psi, xs):
    """``Var(x) + Var(p)`` of a normalized one-mode wavefunction sampled on ``xs``."""
    dx = xs[1] - xs[0]
    rho = np.abs(psi) ** 2
    mean_x = np.trapezoid(xs * rho, xs)
    var_x = np.trapezoid((xs - mean_x) ** 2 * rho, xs)
    dpsi = np.gradient(psi, dx)
    mean_p = np.trapezoid(np.conj(psi) * (-1j) * dpsi, xs).real
    var_p = np.trapezoid(np.abs(dpsi) ** 2, xs) - mean_p**2
    return var_x + var_p
