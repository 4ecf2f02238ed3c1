"""Small batched linear-algebra kernels for stacks of (complex) matrices."""

import numpy as np


def lu_logdet(a):
    """Log-determinant of a stack of square matrices via partial-pivot LU.

    The log is accumulated as a sum of principal logs of the pivots plus
    ``i*pi`` per row swap, then the imaginary part is wrapped into
    ``(-pi, pi]``. For matrices with positive determinant (every real
    positive-definite matrix) the result is real.

    Args:
        a (array[complex]): shape ``(..., d, d)``

    Returns:
        tuple[array, array]: ``(logdet, raw_phase)`` where ``raw_phase`` is the
        unwrapped accumulated imaginary part, kept for branch diagnostics.
    """
    a = np.array(a, dtype=complex, copy=True)
    batch_shape = a.shape[:-2]
    d = a.shape[-1]
    a = a.reshape((-1, d, d))
    rows = np.arange(a.shape[0])
    log_acc = np.zeros(a.shape[0], dtype=complex)
    for j in range(d):
        piv = j + np.argmax(np.abs(a[:, j:, j]), axis=1)
        swap = piv != j
        if np.any(swap):
            tmp = a[rows[swap], j, :].copy()
            a[rows[swap], j, :] = a[rows[swap], piv[swap], :]
            a[rows[swap], piv[swap], :] = tmp
            log_acc[swap] += 1j * np.pi
        pivot = a[:, j, j]
        with np.errstate(divide="ignore"):
            log_acc += np.log(pivot)
        if j + 1 < d:
            with np.errstate(divide="ignore", invalid="ignore"):
                factors = a[:, j + 1 :, j] / pivot[:, None]
            a[:, j + 1 :, :] -= factors[:, :, None] * a[:, j, None, :]
    raw_phase = log_acc.imag.copy()
    wrapped = np.angle(np.exp(1j * raw_phase))
    logdet = log_acc.real + 1j * wrapped
    return logdet.reshape(batch_shape), raw_phase.reshape(batch_shape)


def near_branch_cut(phase, tol=0.1):
    """True where a wrapped log-determinant phase lies within ``tol`` of +-pi."""
    wrapped = np.angle(np.exp(1j * np.asarray(phase)))
    return np.pi - np.abs(wrapped) < tol


def bilinear(u, m, v):
    """Batched ``u^T m v`` without conjugation."""
    return np.einsum("...i,...ij,...j->...", u, m, v)


def logsumexp_complex(logs, axis=None):
    """``log(sum(exp(logs)))`` for complex logs, shifted by the max real part."""
    logs = np.asarray(logs, dtype=complex)
    shift = np.max(logs.real, axis=axis, keepdims=True)
    shift = np.where(np.isfinite(shift), shift, 0.0)
    total = np.sum(np.exp(logs - shift), axis=axis, keepdims=True)
    with np.errstate(divide="ignore"):
        out = np.log(total) + shift
    if axis is None:
        return complex(out.reshape(()))
    return np.squeeze(out, axis=axis)
