"""MFCC + delta + delta-delta frame features and frame labeling.

The pipeline follows python_speech_features 0.6 defaults: pre-emphasis
0.97, rectangular window, 512-point power spectrum, 26 triangular mel
filters, orthonormal DCT-II, sinusoidal lifter of 22, c0 replaced by
the log frame energy.  Framing differs on purpose: only complete
windows are used, so ``T = 1 + (N - window) // step`` with no padding.
"""

from __future__ import annotations

import math
import struct
import wave
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.fft import dct

__all__ = [
    "FeatureConfig",
    "FeatureMatrix",
    "SegmentAnnotation",
    "compute_features",
    "num_frames",
    "mel_filterbank",
    "delta",
    "label_frames",
    "read_wav",
    "write_features",
    "read_features",
]

_FEAT_MAGIC = b"MAPSFEAT1"

# overlaps closer than this (seconds) count as ties
_TIE_TOL = 1e-9


@dataclass(frozen=True)
class FeatureConfig:
    sample_rate: int = 16000
    window_length: float = 0.025
    frame_step: float = 0.010
    num_cepstra: int = 13
    num_filters: int = 26
    nfft: int = 512
    preemphasis: float = 0.97
    lifter: int = 22
    delta_window: int = 2
    energy_floor: float = 1e-10
    low_freq: float = 0.0
    high_freq: float | None = None

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if not 0 < self.frame_step <= self.window_length:
            raise ValueError("need 0 < frame_step <= window_length")
        if self.num_cepstra < 1:
            raise ValueError("num_cepstra must be >= 1")
        if self.delta_window < 1:
            raise ValueError("delta_window must be >= 1")
        if self.window_samples < 1 or self.step_samples < 1:
            raise ValueError("window and step must span at least one sample")

    @property
    def window_samples(self) -> int:
        return _to_samples(self.window_length, self.sample_rate)

    @property
    def step_samples(self) -> int:
        return _to_samples(self.frame_step, self.sample_rate)

    @property
    def fft_size(self) -> int:
        # never truncate a frame
        n = self.nfft
        while n < self.window_samples:
            n *= 2
        return n

    @property
    def dim(self) -> int:
        return 3 * self.num_cepstra


def _to_samples(seconds: float, rate: int) -> int:
    return int(math.floor(seconds * rate + 1e-9))


@dataclass(frozen=True)
class FeatureMatrix:
    frames: np.ndarray
    config: FeatureConfig = field(default_factory=FeatureConfig)

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=float)
        if frames.ndim != 2 or frames.shape[1] != self.config.dim:
            raise ValueError(f"expected T x {self.config.dim} features, got {frames.shape}")
        object.__setattr__(self, "frames", frames)

    def __len__(self):
        return self.frames.shape[0]

    @property
    def mfcc(self):
        return self.frames[:, : self.config.num_cepstra]


@dataclass(frozen=True)
class SegmentAnnotation:
    label: str
    start: float
    end: float

    def __post_init__(self):
        if not self.start < self.end:
            raise ValueError(f"segment {self.label!r} has start >= end")


def num_frames(n_samples: int, config: FeatureConfig) -> int:
    win, step = config.window_samples, config.step_samples
    if n_samples < win:
        return 0
    return 1 + (n_samples - win) // step


def hz_to_mel(hz):
    return 2595.0 * np.log10(1.0 + np.asarray(hz, dtype=float) / 700.0)


def mel_to_hz(mel):
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=float) / 2595.0) - 1.0)


def mel_filterbank(config: FeatureConfig) -> np.ndarray:
    """Triangular filters on FFT bins, shape ``num_filters x (nfft//2 + 1)``."""
    nfft = config.fft_size
    high = config.high_freq or config.sample_rate / 2
    if high > config.sample_rate / 2:
        raise ValueError("high_freq exceeds the Nyquist frequency")
    mels = np.linspace(hz_to_mel(config.low_freq), hz_to_mel(high), config.num_filters + 2)
    bins = np.floor((nfft + 1) * mel_to_hz(mels) / config.sample_rate)
    fb = np.zeros((config.num_filters, nfft // 2 + 1))
    idx = np.arange(nfft // 2 + 1)
    for j in range(config.num_filters):
        lo, mid, hi = bins[j], bins[j + 1], bins[j + 2]
        up = (idx >= lo) & (idx < mid)
        down = (idx >= mid) & (idx < hi)
        fb[j, up] = (idx[up] - lo) / (mid - lo)
        fb[j, down] = (hi - idx[down]) / (hi - mid)
    return fb


def delta(feat, N: int = 2):
    """Regression deltas over ``N`` frames each side, edges replicated."""
    feat = np.asarray(feat, dtype=float)
    if N < 1:
        raise ValueError("N must be >= 1")
    T = feat.shape[0]
    padded = np.pad(feat, ((N, N), (0, 0)), mode="edge")
    out = np.zeros_like(feat)
    for n in range(1, N + 1):
        out += n * (padded[N + n : N + n + T] - padded[N - n : N - n + T])
    return out / (2 * sum(n * n for n in range(1, N + 1)))


def _frame(signal, config):
    win, step = config.window_samples, config.step_samples
    T = num_frames(signal.size, config)
    idx = np.arange(win)[None, :] + step * np.arange(T)[:, None]
    return signal[idx]


def compute_features(samples, config: FeatureConfig | None = None) -> FeatureMatrix:
    """T x 39 matrix: 13 MFCCs (c0 = log energy), their deltas, then delta-deltas."""
    config = config or FeatureConfig()
    x = np.asarray(samples, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise ValueError("samples contain non-finite values")
    if x.size < config.window_samples:
        raise ValueError(
            f"audio has {x.size} samples, shorter than one "
            f"{config.window_samples}-sample window"
        )
    x = np.append(x[0], x[1:] - config.preemphasis * x[:-1])
    frames = _frame(x, config)
    nfft = config.fft_size
    pspec = np.abs(np.fft.rfft(frames, nfft)) ** 2 / nfft
    energy = np.maximum(pspec.sum(axis=1), config.energy_floor)
    fbank = np.maximum(pspec @ mel_filterbank(config).T, config.energy_floor)

    cep = dct(np.log(fbank), type=2, axis=1, norm="ortho")[:, : config.num_cepstra]
    if config.lifter > 0:
        n = np.arange(cep.shape[1])
        cep = cep * (1 + (config.lifter / 2.0) * np.sin(np.pi * n / config.lifter))
    cep[:, 0] = np.log(energy)

    d1 = delta(cep, config.delta_window)
    d2 = delta(d1, config.delta_window)
    return FeatureMatrix(np.hstack([cep, d1, d2]), config)


def label_frames(
    segments: Sequence[SegmentAnnotation],
    T: int,
    config: FeatureConfig | None = None,
) -> list[str]:
    """Label each frame with the segment covering most of its window.

    Frame ``u`` spans ``[u * step, u * step + window]``.  On a tie the
    earlier segment wins.
    """
    config = config or FeatureConfig()
    segs = sorted(segments, key=lambda s: s.start)
    starts = np.array([s.start for s in segs])
    ends = np.array([s.end for s in segs])
    labels = []
    for u in range(T):
        lo = u * config.frame_step
        hi = lo + config.window_length
        overlap = np.minimum(ends, hi) - np.maximum(starts, lo)
        if overlap.size == 0 or overlap.max() <= 0:
            raise ValueError(f"frame {u} [{lo:.3f}, {hi:.3f}] overlaps no segment")
        best = int(np.flatnonzero(overlap >= overlap.max() - _TIE_TOL)[0])
        labels.append(segs[best].label)
    return labels


def read_wav(path) -> tuple[np.ndarray, int]:
    """Read a mono 16-bit PCM WAV; returns raw integer-valued samples and the rate."""
    try:
        w = wave.open(str(path), "rb")
    except (wave.Error, EOFError) as exc:
        raise ValueError(f"{path}: unreadable WAV ({exc})") from None
    with w:
        if w.getnchannels() != 1:
            raise ValueError(f"{path}: expected mono audio, got {w.getnchannels()} channels")
        if w.getsampwidth() != 2:
            raise ValueError(f"{path}: expected 16-bit PCM, got {8 * w.getsampwidth()}-bit")
        rate = w.getframerate()
        data = w.readframes(w.getnframes())
    return np.frombuffer(data, dtype="<i2").astype(float), rate


def write_features(feats: FeatureMatrix, path) -> None:
    T, dim = feats.frames.shape
    body = feats.frames.astype("<f4").tobytes(order="C")
    Path(path).write_bytes(_FEAT_MAGIC + struct.pack("<II", T, dim) + body)


def read_features(path) -> np.ndarray:
    """Load a feature dump as a T x dim float array."""
    data = Path(path).read_bytes()
    n = len(_FEAT_MAGIC)
    if data[:n] != _FEAT_MAGIC:
        raise ValueError(f"{path}: not a feature dump (bad magic)")
    T, dim = struct.unpack_from("<II", data, n)
    if len(data) - n - 8 != 4 * T * dim:
        raise ValueError(f"{path}: truncated feature dump")
    return np.frombuffer(data, dtype="<f4", offset=n + 8).reshape(T, dim).astype(float)
