"""Zero-mean generalized Gaussian density and its maximum-likelihood fit.

    f(x; s, tau) = tau / (2 s Gamma(1/tau)) * exp(-|x/s|**tau)

For a fixed shape the likelihood is maximised in closed form by
``s(tau) = (tau/n * sum|x|**tau) ** (1/tau)``; substituting it leaves a
one-dimensional profile likelihood in ``tau`` whose stationary point is
found by safeguarded root finding inside ``[0.05, 20]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import digamma, gammaln

from .errors import DegenerateData, NoConvergence

SHAPE_BOUNDS = (0.05, 20.0)


@dataclass(frozen=True)
class GgdParams:
    scale: float
    shape: float
    log_likelihood: float = float("nan")

    def __post_init__(self):
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError(f"scale must be positive and finite, got {self.scale}")
        if not (self.shape > 0 and math.isfinite(self.shape)):
            raise ValueError(f"shape must be positive and finite, got {self.shape}")

    @property
    def variance(self) -> float:
        return self.scale**2 * math.exp(gammaln(3.0 / self.shape) - gammaln(1.0 / self.shape))


@dataclass(frozen=True)
class SolverOptions:
    shape_bounds: tuple[float, float] = SHAPE_BOUNDS
    xtol: float = 1e-8
    max_iter: int = 200


@dataclass(frozen=True)
class FitDiagnostics:
    iterations: int
    initial_shape: float
    at_bound: str | None = None
    converged: bool = True


@dataclass(frozen=True)
class GgdFit(GgdParams):
    diagnostics: FitDiagnostics = field(default=None, compare=False)


def ggd_logpdf(x, p: GgdParams):
    x = np.asarray(x, dtype=float)
    out = (
        math.log(p.shape)
        - math.log(2.0 * p.scale)
        - gammaln(1.0 / p.shape)
        - np.abs(x / p.scale) ** p.shape
    )
    return float(out) if out.ndim == 0 else out


def ggd_pdf(x, p: GgdParams):
    return np.exp(ggd_logpdf(x, p))


def log_likelihood(data, scale: float, shape: float) -> float:
    return float(np.sum(ggd_logpdf(data, GgdParams(scale, shape))))


def sample_ggd(p: GgdParams, n: int, seed: int | None = None) -> np.ndarray:
    """``n`` draws as ``sign * scale * G**(1/shape)`` with ``G ~ Gamma(1/shape, 1)``."""
    rng = np.random.default_rng(seed)
    g = rng.gamma(1.0 / p.shape, 1.0, size=n)
    sign = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    return sign * p.scale * g ** (1.0 / p.shape)


class _AbsPowers:
    """Caches log|x| of the nonzero samples; zeros contribute nothing to sum |x|^tau."""

    def __init__(self, data: np.ndarray):
        absx = np.abs(data)
        self.n = data.shape[0]
        self.norm = float(absx.max())
        nz = absx[absx > 0] / self.norm
        self.logs = np.log(nz)

    def sums(self, tau: float) -> tuple[float, float]:
        # sum |y|^tau and sum |y|^tau log|y| for y = x / norm, all |y| <= 1
        w = np.exp(tau * self.logs)
        return float(w.sum()), float(w @ self.logs)

    def profile_scale(self, tau: float) -> float:
        s, _ = self.sums(tau)
        return (tau * s / self.n) ** (1.0 / tau)

    def profile_loglik(self, tau: float) -> float:
        scale = self.profile_scale(tau)
        return self.n * (math.log(tau) - math.log(2.0 * scale) - gammaln(1.0 / tau) - 1.0 / tau)

    def score(self, tau: float) -> float:
        """d/dtau of the per-sample profile log-likelihood."""
        s, s_log = self.sums(tau)
        return 1.0 / tau + digamma(1.0 / tau) / tau**2 + math.log(tau * s / self.n) / tau**2 - s_log / (tau * s)


def _kurtosis_ratio(tau: float) -> float:
    return math.exp(gammaln(5.0 / tau) + gammaln(1.0 / tau) - 2.0 * gammaln(3.0 / tau))


def moment_shape(data, bounds: tuple[float, float] = SHAPE_BOUNDS) -> float:
    """Shape whose theoretical kurtosis matches the sample's (about zero)."""
    x = np.asarray(data, dtype=float)
    x = x / np.max(np.abs(x))
    m2 = np.mean(x**2)
    kurt = np.mean(x**4) / m2**2
    lo, hi = bounds
    # kurtosis decreases monotonically in tau
    if kurt >= _kurtosis_ratio(lo):
        return lo
    if kurt <= _kurtosis_ratio(hi):
        return hi
    a, b = math.log(lo), math.log(hi)
    for _ in range(100):
        mid = 0.5 * (a + b)
        if _kurtosis_ratio(math.exp(mid)) > kurt:
            a = mid
        else:
            b = mid
    return math.exp(0.5 * (a + b))


def _bracket(score, guess: float, lo: float, hi: float) -> tuple[float, float] | str:
    """Expand geometrically from the guess until the score changes sign."""
    f0 = score(guess)
    if f0 == 0.0:
        return guess, guess
    # positive score: likelihood still rising, root lies above
    step = 1.25
    a = guess
    while True:
        b = min(a * step, hi) if f0 > 0 else max(a / step, lo)
        fb = score(b)
        if (fb > 0) != (f0 > 0) or fb == 0.0:
            return (a, b) if a < b else (b, a)
        if b in (lo, hi):
            return "upper" if b == hi else "lower"
        a = b
        step *= 1.5


def _solve(score, a: float, b: float, xtol: float, max_iter: int) -> tuple[float, int]:
    """Root of ``score`` in ``[a, b]``: secant steps, bisection whenever they stall or leave the bracket."""
    fa, fb = score(a), score(b)
    if fa == 0.0:
        return a, 0
    if fb == 0.0:
        return b, 0
    x_prev, f_prev = a, fa
    x, fx = b, fb
    for it in range(1, max_iter + 1):
        if b - a < xtol:
            return 0.5 * (a + b), it
        cand = x - fx * (x - x_prev) / (fx - f_prev) if fx != f_prev else None
        if cand is None or not (a < cand < b) or abs(cand - x) > 0.5 * (b - a):
            cand = 0.5 * (a + b)
        fc = score(cand)
        if fc == 0.0:
            return cand, it
        if (fc > 0) == (fa > 0):
            a, fa = cand, fc
        else:
            b, fb = cand, fc
        step = abs(cand - x)
        x_prev, f_prev, x, fx = x, fx, cand, fc
        if step < xtol:
            return cand, it
    raise NoConvergence(f"shape search did not converge in {max_iter} iterations")


def fit_ggd_mle(data, opts: SolverOptions = SolverOptions()) -> GgdFit:
    """Maximum-likelihood (scale, shape) of a zero-mean GGD; the data are not re-centred."""
    x = np.asarray(data, dtype=float).ravel()
    if x.shape[0] < 8:
        raise DegenerateData(f"need at least 8 samples, got {x.shape[0]}")
    if not np.all(np.isfinite(x)):
        raise DegenerateData("data contain non-finite values")
    if np.all(x == x[0]) or not np.any(x):
        raise DegenerateData("data are constant; no finite-scale maximiser")

    powers = _AbsPowers(x)
    lo, hi = opts.shape_bounds
    guess = min(max(moment_shape(x, opts.shape_bounds), lo), hi)
    found = _bracket(powers.score, guess, lo, hi)
    at_bound = None
    if isinstance(found, str):
        at_bound = found
        tau, iters = (hi if found == "upper" else lo), 0
    else:
        tau, iters = _solve(powers.score, found[0], found[1], opts.xtol, opts.max_iter)

    scale = powers.profile_scale(tau) * powers.norm
    loglik = powers.profile_loglik(tau) - powers.n * math.log(powers.norm)
    return GgdFit(scale, tau, loglik, FitDiagnostics(iters, guess, at_bound))


def profile_scale(data, shape: float) -> float:
    """Likelihood-maximising scale for a fixed shape."""
    x = np.asarray(data, dtype=float).ravel()
    if not np.any(x):
        raise DegenerateData("all-zero data")
    return _AbsPowers(x).profile_scale(shape) * float(np.max(np.abs(x)))
