"""Independent reference computations used by the tests.

Nothing here imports the code under test; each routine is the slow,
literal version of the formula it checks.
"""

import math

import numpy as np
from scipy.special import gammaln


def cwt_quadrature(x, scales, dt, cutoff):
    """Direct Riemann sum  sum_n x[n] psi((n-j)/a) / sqrt(a) * dt  for every scale a and shift j."""
    x = np.asarray(x, dtype=float)
    L = x.shape[0]
    out = np.zeros((len(scales), L))
    u_samples = np.subtract.outer(np.arange(L), np.arange(L)).T  # [j, n] = n - j
    for i, a in enumerate(scales):
        u = u_samples / a
        w = np.exp(-u * u / 2.0) * np.cos(5.0 * u)
        w[np.abs(u) > cutoff] = 0.0
        out[i] = w @ x / math.sqrt(a) * dt
    return out


def cwt_fine_row_energy(signal_fn, duration, rate, freqs, upsample=16):
    """Row energies of the continuous transform of ``signal_fn`` on [0, duration), zero outside.

    The integral over t is approximated on a grid ``upsample`` times finer
    than the sampling grid; shifts are evaluated at the original sample
    instants. Scales are in seconds here: a_sec = Fc / f.
    """
    fc = 5.0 / (2.0 * math.pi)
    fine_dt = 1.0 / (rate * upsample)
    t = np.arange(int(round(duration / fine_dt))) * fine_dt
    xs = signal_fn(t)
    shifts = np.arange(int(round(duration * rate))) / rate
    energies = []
    for f in freqs:
        a_sec = fc / f
        u = (t[np.newaxis, :] - shifts[:, np.newaxis]) / a_sec
        w = np.exp(-u * u / 2.0) * np.cos(5.0 * u)
        coeffs = (w @ xs) * fine_dt / math.sqrt(a_sec)
        energies.append(float(np.sum(coeffs**2)))
    return np.array(energies)


def ggd_loglik_grid(x, scales, shapes):
    """Exact log-likelihood of a zero-mean GGD on a (shape x scale) grid."""
    x = np.abs(np.asarray(x, dtype=float))
    n = x.shape[0]
    scales = np.asarray(scales, dtype=float)
    out = np.empty((len(shapes), len(scales)))
    logx = np.log(x[x > 0])
    for i, tau in enumerate(shapes):
        s_tau = np.sum(np.exp(tau * logx))
        out[i] = n * (math.log(tau) - np.log(2.0 * scales) - gammaln(1.0 / tau)) - s_tau / scales**tau
    return out


def kernel_density_naive(points, q, h2):
    """Term-by-term mean of isotropic Gaussian densities N(q | p, h2 I)."""
    total = 0.0
    for p in points:
        d2 = sum((qi - pi) ** 2 for qi, pi in zip(q, p))
        total += math.exp(-d2 / (2.0 * h2)) / (2.0 * math.pi * h2) ** (len(q) / 2.0)
    return total / len(points)


def knn_exhaustive(X, y, q, k):
    """Sort every (distance, index) pair; majority of k; even split -> nearest point's class."""
    ranked = sorted((sum((a - b) ** 2 for a, b in zip(row, q)), i) for i, row in enumerate(X))
    top = [y[i] for _, i in ranked[:k]]
    ones = sum(top)
    zeros = k - ones
    if ones == zeros:
        return y[ranked[0][1]], (zeros, ones)
    return int(ones > zeros), (zeros, ones)
