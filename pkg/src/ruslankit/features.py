"""Time-frequency analysis: STFT/ISTFT, linear and 80-band mel
spectrograms, and the L1 spectrogram losses.

Defaults (44.1 kHz material): fft 2048, win 2048 (~46 ms), hop 512
(~11.6 ms), periodic Hann, reflective centering.  The mel targets are
log-compressed 80-band mel spectrograms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .audio import Waveform
from .errors import (InvalidBandRange, InvalidConfig, NegativeLoss,
                     ShapeMismatch, SignalTooShort)

MEL_BANDS = 80
LOG_FLOOR = 1e-5


def hann_window(length: int) -> np.ndarray:
    """Periodic Hann taper (suited to overlap-add analysis)."""
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(length) / length)


@dataclass(frozen=True)
class StftConfig:
    fft_size: int = 2048
    win_length: int = 2048
    hop_length: int = 512
    window: str = "hann"
    center: bool = True

    def __post_init__(self):
        if self.fft_size <= 0 or self.fft_size & (self.fft_size - 1):
            raise InvalidConfig(f"fft_size {self.fft_size} is not a power of two")
        if not 0 < self.hop_length <= self.win_length <= self.fft_size:
            raise InvalidConfig("need 0 < hop <= win <= fft")
        if self.window != "hann":
            raise InvalidConfig(f"unknown window {self.window!r}")

    @property
    def bin_count(self) -> int:
        return self.fft_size // 2 + 1

    def window_vector(self) -> np.ndarray:
        """Window embedded in an fft_size frame, centered and zero-padded."""
        w = hann_window(self.win_length)
        if self.win_length == self.fft_size:
            return w
        pad = (self.fft_size - self.win_length) // 2
        out = np.zeros(self.fft_size)
        out[pad: pad + self.win_length] = w
        return out

    def check_invertible(self) -> None:
        """The squared window must keep nonzero overlap-add mass wherever a
        sample is synthesized, or the least-squares inverse is undefined."""
        w2 = self.window_vector() ** 2
        cover = np.zeros(self.fft_size + 8 * self.hop_length)
        for start in range(0, cover.size - self.fft_size + 1, self.hop_length):
            cover[start: start + self.fft_size] += w2
        interior = cover[self.fft_size: -self.fft_size]
        if interior.size and np.min(interior) < 1e-10:
            raise InvalidConfig("window/hop pair has overlap-add gaps")


def frame_count(n_samples: int, cfg: StftConfig) -> int:
    if cfg.center:
        return 1 + n_samples // cfg.hop_length
    if n_samples < cfg.win_length:
        raise SignalTooShort(f"{n_samples} samples < window {cfg.win_length}")
    return 1 + (n_samples - cfg.win_length) // cfg.hop_length


def stft(wave: Waveform, cfg: StftConfig = StftConfig()) -> np.ndarray:
    """Complex spectrogram, frames x (fft/2 + 1)."""
    x = wave.samples
    n_frames = frame_count(x.size, cfg)
    if cfg.center:
        pad = cfg.fft_size // 2
        x = np.pad(x, pad, mode="reflect") if x.size > 1 \
            else np.pad(x, pad, mode="constant")
        window = cfg.window_vector()
        frame_len = cfg.fft_size
    else:
        window = hann_window(cfg.win_length)
        frame_len = cfg.win_length
    idx = (np.arange(n_frames)[:, None] * cfg.hop_length + np.arange(frame_len)[None, :])
    frames = x[idx] * window[None, :]
    return np.fft.rfft(frames, n=cfg.fft_size, axis=1)


def istft(spec: np.ndarray, cfg: StftConfig = StftConfig(),
          sample_rate: int = 44100) -> Waveform:
    """Least-squares overlap-add inverse of `stft`.

    Output length: (frames-1)*hop for centered analysis, win + (frames-1)*hop
    otherwise.
    """
    cfg.check_invertible()
    spec = np.asarray(spec)
    if spec.ndim != 2 or spec.shape[1] != cfg.bin_count:
        raise InvalidConfig(f"expected frames x {cfg.bin_count}, got {spec.shape}")
    n_frames = spec.shape[0]
    frames = np.fft.irfft(spec, n=cfg.fft_size, axis=1)

    if cfg.center:
        window = cfg.window_vector()
        frame_len = cfg.fft_size
    else:
        window = hann_window(cfg.win_length)
        frame_len = cfg.win_length
        frames = frames[:, :frame_len]

    total = frame_len + (n_frames - 1) * cfg.hop_length
    signal = np.zeros(total)
    weight = np.zeros(total)
    for m in range(n_frames):
        start = m * cfg.hop_length
        signal[start: start + frame_len] += frames[m] * window
        weight[start: start + frame_len] += window**2
    nonzero = weight > 1e-10
    signal[nonzero] /= weight[nonzero]

    if cfg.center:
        pad = cfg.fft_size // 2
        signal = signal[pad: total - pad]
    return Waveform(signal, sample_rate)


@dataclass(frozen=True)
class LinearSpectrogram:
    """Magnitude spectrogram, frames x (fft/2 + 1)."""

    values: np.ndarray
    sample_rate: int
    config: StftConfig = field(default_factory=StftConfig)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", v)
        if v.ndim != 2 or v.shape[1] != self.config.bin_count:
            raise ShapeMismatch(f"expected frames x {self.config.bin_count}, got {v.shape}")
        if v.size and (np.min(v) < 0 or not np.all(np.isfinite(v))):
            raise ShapeMismatch("magnitudes must be finite and >= 0")


@dataclass(frozen=True)
class MelSpectrogram:
    """Mel-filtered spectrogram, frames x 80; log-compressed when flagged."""

    values: np.ndarray
    log_compressed: bool = True

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", v)
        if v.ndim != 2 or v.shape[1] != MEL_BANDS:
            raise ShapeMismatch(f"expected frames x {MEL_BANDS}, got {v.shape}")
        if v.size and not np.all(np.isfinite(v)):
            raise ShapeMismatch("mel values must be finite")


def linear_spectrogram(wave: Waveform, cfg: StftConfig = StftConfig()) -> LinearSpectrogram:
    return LinearSpectrogram(np.abs(stft(wave, cfg)), wave.sample_rate, cfg)


def _hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def _mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(bands: int, bin_count: int, sample_rate: int,
                   f_min: float = 0.0, f_max: float | None = None) -> np.ndarray:
    """Triangular filters on the mel scale, peak height 1, bands x bins."""
    nyquist = sample_rate / 2.0
    if f_max is None:
        f_max = nyquist
    if not 0 <= f_min < f_max <= nyquist:
        raise InvalidBandRange(f"need 0 <= f_min < f_max <= {nyquist}, "
                               f"got [{f_min}, {f_max}]")
    points = _mel_to_hz(np.linspace(_hz_to_mel(f_min), _hz_to_mel(f_max), bands + 2))
    freqs = np.linspace(0.0, nyquist, bin_count)
    fb = np.zeros((bands, bin_count))
    for b in range(bands):
        lo, mid, hi = points[b], points[b + 1], points[b + 2]
        rising = (freqs - lo) / max(mid - lo, 1e-12)
        falling = (hi - freqs) / max(hi - mid, 1e-12)
        fb[b] = np.clip(np.minimum(rising, falling), 0.0, 1.0)
    return fb


def mel_spectrogram(lin: LinearSpectrogram, bands: int = MEL_BANDS,
                    f_min: float = 0.0, f_max: float | None = None,
                    log_compress: bool = True) -> MelSpectrogram:
    fb = mel_filterbank(bands, lin.config.bin_count, lin.sample_rate, f_min, f_max)
    mel = lin.values @ fb.T
    if log_compress:
        mel = np.log(np.maximum(mel, LOG_FLOOR))
    return MelSpectrogram(mel, log_compressed=log_compress)


@dataclass(frozen=True)
class LossReport:
    mel_loss: float
    lin_loss: float
    total_loss: float


def _values(spec) -> np.ndarray:
    return np.asarray(spec.values if hasattr(spec, "values") else spec, dtype=np.float64)


def _l1_mean(predicted, target) -> float:
    p, t = _values(predicted), _values(target)
    if p.shape != t.shape:
        raise ShapeMismatch(f"shapes differ: {p.shape} vs {t.shape}")
    return float(np.mean(np.abs(p - t)))


def loss_mel(predicted, target) -> float:
    """Mean absolute difference over all mel entries."""
    return _l1_mean(predicted, target)


def loss_lin(predicted, target) -> float:
    """Mean absolute difference over all linear-spectrogram entries."""
    return _l1_mean(predicted, target)


def loss_total(mel_loss_value: float, lin_loss_value: float) -> LossReport:
    if mel_loss_value < 0 or lin_loss_value < 0:
        raise NegativeLoss(f"loss terms must be >= 0, got "
                           f"({mel_loss_value}, {lin_loss_value})")
    return LossReport(mel_loss_value, lin_loss_value, mel_loss_value + lin_loss_value)
