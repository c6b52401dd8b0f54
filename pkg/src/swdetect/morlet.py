"""Real Morlet continuous wavelet transform over a pseudo-frequency band.

Scales are measured in samples: row ``i`` of the transform correlates the
segment with ``psi((n - j) / a_i) / sqrt(a_i)`` and multiplies by the
sampling period, i.e. a Riemann sum of the continuous inner product. The
pseudo-frequency of scale ``a`` is ``F_c / (a * dt)`` with
``F_c = 5 / (2*pi)``, the carrier frequency of ``cos(5t)``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import fftconvolve

from .errors import BadBand, GridRateMismatch
from .segmenter import Segment

CENTER_FREQUENCY = 5.0 / (2.0 * math.pi)
# exp(-t^2/2) drops below 1e-8 past this argument
SUPPORT_CUTOFF = math.sqrt(2.0 * math.log(1e8))


def morlet_psi(t):
    """Mother wavelet ``exp(-t**2/2) * cos(5t)``; accepts scalars or arrays."""
    t = np.asarray(t, dtype=float)
    out = np.exp(-0.5 * t * t) * np.cos(5.0 * t)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ScaleGrid:
    scales: np.ndarray
    pseudo_freqs_hz: np.ndarray
    sampling_period_s: float

    @property
    def sample_rate_hz(self) -> float:
        return 1.0 / self.sampling_period_s

    def __len__(self) -> int:
        return len(self.scales)


def scale_to_frequency(scale, rate: float):
    return CENTER_FREQUENCY * rate / np.asarray(scale, dtype=float)


def frequency_to_scale(freq, rate: float):
    return CENTER_FREQUENCY * rate / np.asarray(freq, dtype=float)


def build_scale_grid(rate: float, f_min: float = 1.0, f_max: float = 3.0, n_scales: int = 21) -> ScaleGrid:
    """Log-spaced pseudo-frequencies on ``[f_min, f_max]``, highest first so scales increase."""
    if not rate > 0:
        raise BadBand(f"sample rate must be positive, got {rate}")
    if not (0 < f_min < f_max < rate / 2):
        raise BadBand(f"need 0 < f_min < f_max < Nyquist ({rate / 2:g} Hz), got [{f_min}, {f_max}]")
    if n_scales < 1:
        raise BadBand("n_scales must be at least 1")
    freqs = np.geomspace(f_max, f_min, n_scales)
    scales = frequency_to_scale(freqs, rate)
    for arr in (freqs, scales):
        arr.setflags(write=False)
    return ScaleGrid(scales, freqs, 1.0 / rate)


def _kernels(grid: ScaleGrid, length: int) -> np.ndarray:
    # offsets beyond length-1 never overlap the segment
    half = min(int(math.floor(SUPPORT_CUTOFF * grid.scales.max())), length - 1)
    m = np.arange(-half, half + 1, dtype=float)
    arg = m[np.newaxis, :] / grid.scales[:, np.newaxis]
    kern = morlet_psi(arg) / np.sqrt(grid.scales)[:, np.newaxis]
    kern[np.abs(arg) > SUPPORT_CUTOFF] = 0.0
    return kern * grid.sampling_period_s


@dataclass(frozen=True)
class WaveletCoefficients:
    matrix: np.ndarray
    grid: ScaleGrid
    channel_label: str = ""
    segment_start_index: int = 0


def transform(samples, grid: ScaleGrid) -> np.ndarray:
    """Coefficient matrix (scales x time) of a 1-D sample vector, zero-padded at both ends."""
    x = np.asarray(samples, dtype=float)
    length = x.shape[0]
    kern = _kernels(grid, length)
    half = (kern.shape[1] - 1) // 2
    # psi is even, so convolution equals the correlation in the transform
    full = fftconvolve(np.broadcast_to(x, (len(grid), length)), kern, mode="full", axes=1)
    return np.ascontiguousarray(full[:, half : half + length])


def cwt(seg: Segment, grid: ScaleGrid) -> WaveletCoefficients:
    if not math.isclose(seg.sample_rate_hz * grid.sampling_period_s, 1.0, rel_tol=1e-9):
        raise GridRateMismatch(
            f"grid built for {grid.sample_rate_hz:g} Hz, segment sampled at {seg.sample_rate_hz:g} Hz"
        )
    matrix = transform(seg.samples, grid)
    matrix.setflags(write=False)
    return WaveletCoefficients(matrix, grid, seg.channel_label, seg.start_index)


def cwt_direct(samples, grid: ScaleGrid) -> np.ndarray:
    """Reference transform: explicit O(L^2) sum per scale, no FFT."""
    x = np.asarray(samples, dtype=float)
    n = np.arange(x.shape[0], dtype=float)
    offsets = n[np.newaxis, :] - n[:, np.newaxis]  # [j, n] = n - j
    out = np.empty((len(grid), x.shape[0]))
    for i, a in enumerate(grid.scales):
        arg = offsets / a
        weights = np.exp(-0.5 * arg**2) * np.cos(5.0 * arg)
        weights[np.abs(arg) > SUPPORT_CUTOFF] = 0.0
        out[i] = weights @ x / math.sqrt(a) * grid.sampling_period_s
    return out


def save_coefficients_csv(coeffs: WaveletCoefficients, path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        n = coeffs.matrix.shape[1]
        writer.writerow(["pseudo_freq_hz"] + [f"t{j}" for j in range(n)])
        for freq, row in zip(coeffs.grid.pseudo_freqs_hz, coeffs.matrix):
            writer.writerow([repr(float(freq))] + [repr(float(v)) for v in row])
