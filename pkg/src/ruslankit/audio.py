"""WAV ingestion and emission in the corpus recording format (mono
16-bit PCM), silence trimming, and percentile-based SNR estimation."""

from __future__ import annotations

import wave
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (CorruptFile, DegenerateSignal, EmptyAfterTrim,
                     OutOfRangeSample, UnsupportedFormat)

CORPUS_SAMPLE_RATE = 44100
DEFAULT_TRIM_THRESHOLD_DB = -50.0
DEFAULT_TRIM_WINDOW_MS = 20.0


@dataclass(frozen=True)
class Waveform:
    samples: np.ndarray  # float64 amplitudes in [-1, 1]
    sample_rate: int

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=np.float64))
        if self.sample_rate <= 0:
            raise UnsupportedFormat(f"sample rate {self.sample_rate} must be positive")
        if self.samples.ndim != 1:
            raise UnsupportedFormat("waveform must be single-channel")
        if self.samples.size and not np.all(np.isfinite(self.samples)):
            raise OutOfRangeSample("waveform contains non-finite samples")

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


def read_wav(path: str | Path) -> Waveform:
    """Decode a mono 16-bit PCM RIFF/WAVE file; samples scaled by 1/32768."""
    try:
        with wave.open(str(path), "rb") as wav:
            channels = wav.getnchannels()
            width = wav.getsampwidth()
            comp = wav.getcomptype()
            rate = wav.getframerate()
            n = wav.getnframes()
            raw = wav.readframes(n)
    except (wave.Error, EOFError) as exc:
        raise CorruptFile(f"{path}: {exc}") from None
    if comp != "NONE":
        raise UnsupportedFormat(f"{path}: compression {comp!r}, expected linear PCM")
    if channels != 1:
        raise UnsupportedFormat(f"{path}: {channels} channels, expected mono")
    if width != 2:
        raise UnsupportedFormat(f"{path}: {8 * width}-bit samples, expected 16-bit")
    if len(raw) < 2 * n:
        raise CorruptFile(f"{path}: truncated data chunk")
    ints = np.frombuffer(raw, dtype="<i2")
    return Waveform(ints.astype(np.float64) / 32768.0, rate)


def write_wav(wave_out: Waveform, path: str | Path) -> None:
    """Emit mono 16-bit little-endian PCM; out-of-range samples raise
    instead of clipping silently."""
    x = wave_out.samples
    if x.size and (np.min(x) < -1.0 or np.max(x) > 1.0):
        bad = float(x[np.argmax(np.abs(x))])
        raise OutOfRangeSample(f"sample {bad} outside [-1, 1]")
    ints = np.clip(np.rint(x * 32768.0), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as wav:
        wav.setnchannels(1)
        wav.setsampwidth(2)
        wav.setframerate(wave_out.sample_rate)
        wav.writeframes(ints.tobytes())


def wav_duration(path: str | Path) -> float:
    """Duration in seconds from the WAV header, without decoding."""
    try:
        with wave.open(str(path), "rb") as wav:
            return wav.getnframes() / wav.getframerate()
    except (wave.Error, EOFError, ZeroDivisionError) as exc:
        raise CorruptFile(f"{path}: {exc}") from None


def _window_rms(x: np.ndarray, window: int) -> np.ndarray:
    """RMS of consecutive non-overlapping windows, last one possibly short."""
    n_full = x.size // window
    out = []
    if n_full:
        out.append(np.sqrt(np.mean(x[: n_full * window].reshape(n_full, window) ** 2, axis=1)))
    tail = x[n_full * window:]
    if tail.size:
        out.append(np.array([np.sqrt(np.mean(tail**2))]))
    return np.concatenate(out) if out else np.array([])


def trim_silence(wave_in: Waveform,
                 threshold_db: float = DEFAULT_TRIM_THRESHOLD_DB,
                 window_ms: float = DEFAULT_TRIM_WINDOW_MS) -> Waveform:
    """Remove leading/trailing regions whose windowed RMS falls below the
    threshold (dB re full scale); boundaries accurate to one window."""
    if threshold_db >= 0:
        raise ValueError("threshold_db must be negative (dB re full scale)")
    if window_ms <= 0:
        raise ValueError("window_ms must be positive")
    window = max(1, round(window_ms / 1000.0 * wave_in.sample_rate))
    rms = _window_rms(wave_in.samples, window)
    threshold = 10.0 ** (threshold_db / 20.0)
    loud = np.flatnonzero(rms >= threshold)
    if loud.size == 0:
        raise EmptyAfterTrim("entire signal below the silence threshold")
    start = int(loud[0]) * window
    stop = min((int(loud[-1]) + 1) * window, wave_in.samples.size)
    return Waveform(wave_in.samples[start:stop].copy(), wave_in.sample_rate)


def estimate_snr(wave_in: Waveform, noise_percentile: float = 0.1,
                 window_ms: float = DEFAULT_TRIM_WINDOW_MS) -> float:
    """10*log10(P_signal / P_noise) with the noise floor taken as the mean
    power of the lowest-energy windows up to the percentile."""
    if wave_in.samples.size == 0:
        raise DegenerateSignal("empty waveform")
    if not 0.0 < noise_percentile < 0.5:
        raise ValueError("noise_percentile must be in (0, 0.5)")
    window = max(1, round(window_ms / 1000.0 * wave_in.sample_rate))
    n_full = max(1, wave_in.samples.size // window)
    usable = wave_in.samples[: n_full * window]
    powers = np.mean(usable.reshape(n_full, -1) ** 2, axis=1) if usable.size \
        else np.array([np.mean(wave_in.samples**2)])
    powers = np.sort(powers)
    k = max(1, int(np.ceil(noise_percentile * powers.size)))
    if k >= powers.size:
        k = powers.size - 1 or 1
    noise_power = float(np.mean(powers[:k]))
    signal_power = float(np.mean(powers[k:])) if k < powers.size else noise_power
    if noise_power == 0.0:
        raise DegenerateSignal("noise power is exactly zero")
    return 10.0 * np.log10(signal_power / noise_power)
