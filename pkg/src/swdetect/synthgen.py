"""Synthetic EEG: spike-and-wave channels, background channels and labelled datasets.

A discharge period ``P = 1 / swd_freq_hz`` holds one complex: a Gaussian
spike (30 ms FWHM) centred at ``0.15 P`` followed by a negative half-sine
slow wave spanning ``[0.25 P, 0.85 P]``. Background is 1/f noise plus a
10 Hz alpha rhythm. All randomness comes from ``numpy.random.default_rng``
seeded per call.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from .signal import Annotation, ClassLabel, EegRecording, save_annotations_json, save_recording_csv

CHANNELS_1020 = (
    "Fp1", "Fp2", "F7", "F3", "Fz", "F4", "F8", "T3", "C3", "Cz", "C4",
    "T4", "T5", "P3", "Pz", "P4", "T6", "O1", "O2", "Oz", "FT10", "FT9",
)

SPIKE_FWHM_S = 0.030
SPIKE_CENTER = 0.15
WAVE_START = 0.25
WAVE_FRACTION = 0.60
ALPHA_HZ = 10.0
ALPHA_POWER = 0.3
CLIP_RMS = 6.0

# per-recording draws used by gen_dataset (uniform, inclusive)
SWD_FREQ_RANGE = (2.0, 3.0)
AMPLITUDE_JITTER = (0.7, 1.3)


@dataclass(frozen=True)
class SynthSpec:
    sample_rate_hz: float = 256.0
    swd_freq_hz: float = 3.0
    spike_amp_uv: float = 150.0
    wave_amp_uv: float = 100.0
    noise_amp_uv: float = 20.0
    duration_s: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if not self.sample_rate_hz > 0:
            raise ValueError("sample_rate_hz must be positive")
        if not 1.0 <= self.swd_freq_hz <= 3.0:
            raise ValueError(f"swd_freq_hz must lie in [1, 3] Hz, got {self.swd_freq_hz}")
        if min(self.spike_amp_uv, self.wave_amp_uv, self.noise_amp_uv) < 0:
            raise ValueError("amplitudes must be non-negative")
        if not self.duration_s > 0:
            raise ValueError("duration_s must be positive")

    @property
    def n_samples(self) -> int:
        return int(round(self.duration_s * self.sample_rate_hz))

    def times(self) -> np.ndarray:
        return np.arange(self.n_samples) / self.sample_rate_hz


# held-out "patient": weaker, slower discharges than the training population
PATIENT_SPEC = SynthSpec(spike_amp_uv=60.0, wave_amp_uv=40.0, noise_amp_uv=20.0)
PATIENT_FREQ_RANGE = (1.0, 2.0)


def pink_noise(n: int, rng: np.random.Generator) -> np.ndarray:
    """Zero-mean, unit-RMS noise with a 1/f power spectrum (DC removed)."""
    if n < 2:
        return np.zeros(n)
    spectrum = np.fft.rfft(rng.standard_normal(n))
    f = np.arange(spectrum.shape[0], dtype=float)
    f[0] = np.inf
    x = np.fft.irfft(spectrum / np.sqrt(f), n)
    x -= x.mean()
    return x / np.sqrt(np.mean(x**2))


def _clip(x: np.ndarray, rms: float) -> np.ndarray:
    return np.clip(x, -CLIP_RMS * rms, CLIP_RMS * rms)


def swd_complexes(spec: SynthSpec) -> np.ndarray:
    """Noiseless spike-and-wave train for the spec's duration."""
    t = spec.times()
    period = 1.0 / spec.swd_freq_hz
    n_complex = int(math.floor(spec.duration_s * spec.swd_freq_hz + 1e-9))
    sd = SPIKE_FWHM_S / (2.0 * math.sqrt(2.0 * math.log(2.0)))
    out = np.zeros_like(t)
    for k in range(n_complex):
        base = k * period
        out += spec.spike_amp_uv * np.exp(-0.5 * ((t - base - SPIKE_CENTER * period) / sd) ** 2)
        start = base + WAVE_START * period
        width = WAVE_FRACTION * period
        inside = (t >= start) & (t <= start + width)
        out[inside] -= spec.wave_amp_uv * np.sin(math.pi * (t[inside] - start) / width)
    return out


def gen_swd_channel(spec: SynthSpec) -> np.ndarray:
    rng = np.random.default_rng(spec.seed)
    noise = spec.noise_amp_uv * pink_noise(spec.n_samples, rng)
    return swd_complexes(spec) + _clip(noise, spec.noise_amp_uv)


def gen_background_channel(spec: SynthSpec) -> np.ndarray:
    """Pink noise plus a 10 Hz alpha rhythm, rescaled to RMS ``noise_amp_uv``."""
    rng = np.random.default_rng(spec.seed)
    pink = pink_noise(spec.n_samples, rng)
    phase = rng.uniform(0.0, 2.0 * math.pi)
    alpha = math.sqrt(2.0) * np.sin(2.0 * math.pi * ALPHA_HZ * spec.times() + phase)
    x = math.sqrt(1.0 - ALPHA_POWER) * pink + math.sqrt(ALPHA_POWER) * alpha
    rms = math.sqrt(float(np.mean(x**2)))
    if rms == 0:
        return np.zeros(spec.n_samples)
    return _clip(spec.noise_amp_uv * x / rms, spec.noise_amp_uv)


def gen_recording(spec: SynthSpec, episodes=(), labels=("Fp1",)) -> tuple[EegRecording, list[Annotation]]:
    """Background on every channel with discharges added over ``episodes`` of (onset_s, duration_s)."""
    data = []
    annotations = []
    for c, label in enumerate(labels):
        x = gen_background_channel(replace(spec, seed=_child_seed(spec.seed, c)))
        for onset, duration in episodes:
            i0 = int(round(onset * spec.sample_rate_hz))
            burst = swd_complexes(replace(spec, duration_s=duration))
            i1 = min(i0 + burst.shape[0], x.shape[0])
            x[i0:i1] += burst[: i1 - i0]
            annotations.append(Annotation(label, float(onset), float(duration), ClassLabel.SWD))
        data.append(x)
    return EegRecording(spec.sample_rate_hz, tuple(labels), np.array(data)), annotations


def _child_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


@dataclass(frozen=True)
class LabeledRecording:
    recording: EegRecording
    annotations: list
    label: ClassLabel
    spec: SynthSpec


def gen_dataset(
    n_swd: int = 106,
    n_bg: int = 106,
    seed: int = 0,
    spec: SynthSpec = SynthSpec(),
    freq_range: tuple[float, float] = SWD_FREQ_RANGE,
) -> list[LabeledRecording]:
    """``n_swd`` discharge recordings followed by ``n_bg`` background recordings.

    Each recording is one channel of ``spec.duration_s`` seconds, annotated
    over its whole length. Per recording, the discharge rate is drawn from
    ``freq_range`` and every amplitude is multiplied by a factor from
    ``AMPLITUDE_JITTER``.
    """
    if n_swd < 1 or n_bg < 1:
        raise ValueError("need at least one recording of each class")
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n_swd + n_bg):
        is_swd = i < n_swd
        jitter = rng.uniform(*AMPLITUDE_JITTER, size=3)
        inst = replace(
            spec,
            swd_freq_hz=float(rng.uniform(*freq_range)),
            spike_amp_uv=spec.spike_amp_uv * float(jitter[0]),
            wave_amp_uv=spec.wave_amp_uv * float(jitter[1]),
            noise_amp_uv=spec.noise_amp_uv * float(jitter[2]),
            seed=int(rng.integers(0, 2**31 - 1)),
        )
        channel = CHANNELS_1020[i % len(CHANNELS_1020)]
        x = gen_swd_channel(inst) if is_swd else gen_background_channel(inst)
        rec = EegRecording(inst.sample_rate_hz, (channel,), x[np.newaxis, :])
        label = ClassLabel.SWD if is_swd else ClassLabel.NON_SWD
        ann = [Annotation(channel, 0.0, rec.duration_s, label)]
        out.append(LabeledRecording(rec, ann, label, inst))
    return out


def write_dataset(dataset: list[LabeledRecording], outdir) -> Path:
    """One CSV + annotation JSON per recording and a ``manifest.json`` index."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, item in enumerate(dataset):
        stem = f"rec_{i:04d}"
        save_recording_csv(item.recording, outdir / f"{stem}.csv")
        save_annotations_json(item.annotations, outdir / f"{stem}.json")
        entries.append({"recording": f"{stem}.csv", "annotations": f"{stem}.json", "label": item.label.token, "spec": asdict(item.spec)})
    manifest = outdir / "manifest.json"
    manifest.write_text(json.dumps({"recordings": entries}, indent=1, sort_keys=True) + "\n")
    return manifest
