"""Phase retrieval from magnitude-only linear spectrograms.

Momentum-accelerated Griffin-Lim: each iteration projects the estimate
onto the set of consistent spectrograms (istft then stft), restores the
target magnitude, and extrapolates with momentum `alpha`:

    proj_k  = replace_magnitude(stft(istft(c_k)))
    c_{k+1} = proj_k + alpha * (proj_k - proj_{k-1})

`alpha = 0` is the classic alternating-projection scheme.  Defaults:
300 iterations, alpha 0.99.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import Waveform
from .errors import InvalidConfig, NegativeMagnitude, ZeroTarget
from .features import LinearSpectrogram, StftConfig, istft, stft

CONVERGENCE_FLOOR_DB = -100.0


@dataclass(frozen=True)
class GriffinLimConfig:
    iterations: int = 300
    alpha: float = 0.99
    init_phase: str = "zeros"  # "zeros" or "random"
    seed: int = 0

    def __post_init__(self):
        if self.iterations < 0:
            raise InvalidConfig("iterations must be >= 0")
        if not 0.0 <= self.alpha < 1.0:
            raise InvalidConfig("alpha must be in [0, 1)")
        if self.init_phase not in ("zeros", "random"):
            raise InvalidConfig(f"unknown init_phase {self.init_phase!r}")


def _replace_magnitude(spec: np.ndarray, mag: np.ndarray) -> np.ndarray:
    # divide componentwise by the real norm: numpy's complex-by-real
    # division is off by one ulp even for x/|x|
    norm = np.abs(spec)
    safe = np.where(norm > 0, norm, 1.0)
    unit = spec.real / safe + 1j * (spec.imag / safe)
    return mag * np.where(norm > 0, unit, 1.0)


def griffin_lim(mag: LinearSpectrogram | np.ndarray,
                gl_cfg: GriffinLimConfig = GriffinLimConfig(),
                stft_cfg: StftConfig | None = None,
                sample_rate: int | None = None) -> Waveform:
    """Reconstruct a waveform from a magnitude spectrogram.

    Deterministic given the phase initialization; the final output is the
    inverse transform of the target magnitude with the last phase estimate.
    """
    if isinstance(mag, LinearSpectrogram):
        stft_cfg = stft_cfg or mag.config
        sample_rate = sample_rate or mag.sample_rate
        target = mag.values
    else:
        stft_cfg = stft_cfg or StftConfig()
        sample_rate = sample_rate or 44100
        target = np.asarray(mag, dtype=np.float64)
    if target.size and np.min(target) < 0:
        raise NegativeMagnitude("magnitude entries must be >= 0")
    stft_cfg.check_invertible()

    if gl_cfg.init_phase == "zeros":
        phase = np.zeros_like(target)
    else:
        rng = np.random.default_rng(gl_cfg.seed)
        phase = rng.uniform(-np.pi, np.pi, size=target.shape)
    estimate = target * np.exp(1j * phase)

    prev_proj = estimate
    for _ in range(gl_cfg.iterations):
        consistent = stft(istft(estimate, stft_cfg, sample_rate), stft_cfg)
        proj = _replace_magnitude(consistent, target)
        estimate = proj + gl_cfg.alpha * (proj - prev_proj)
        prev_proj = proj

    final = _replace_magnitude(estimate, target)
    return istft(final, stft_cfg, sample_rate)


def spectral_convergence(target: LinearSpectrogram | np.ndarray,
                         reconstructed: Waveform,
                         stft_cfg: StftConfig | None = None) -> float:
    """20*log10 of the relative Frobenius error between the target
    magnitude and the reconstruction's magnitude, floored at -100 dB."""
    if isinstance(target, LinearSpectrogram):
        stft_cfg = stft_cfg or target.config
        t = target.values
    else:
        stft_cfg = stft_cfg or StftConfig()
        t = np.asarray(target, dtype=np.float64)
    t_norm = np.linalg.norm(t)
    if t_norm == 0:
        raise ZeroTarget("target magnitude is identically zero")
    mag = np.abs(stft(reconstructed, stft_cfg))
    if mag.shape != t.shape:
        raise InvalidConfig(f"reconstruction yields {mag.shape} frames/bins, "
                            f"target has {t.shape}")
    err = np.linalg.norm(mag - t) / t_norm
    if err <= 10 ** (CONVERGENCE_FLOOR_DB / 20.0):
        return CONVERGENCE_FLOOR_DB
    return float(20.0 * np.log10(err))
