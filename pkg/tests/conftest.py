import numpy as np
import pytest

from ruslankit.audio import Waveform, write_wav
from ruslankit.charset import Charset
from ruslankit.textnorm import AcronymLexicon


@pytest.fixture(scope="session")
def charset():
    return Charset.default()


@pytest.fixture(scope="session")
def lexicon():
    return AcronymLexicon({
        "СССР": "эс эс эс эр",
        "ВУЗ": "вуз",
        "МГУ": "эм гэ у",
    })


def sine_wave(freq=440.0, duration=1.0, amplitude=0.8, fs=44100):
    t = np.arange(int(round(duration * fs))) / fs
    return Waveform(amplitude * np.sin(2 * np.pi * freq * t), fs)


def speech_like(duration=3.0, fs=44100, seed=0):
    """Deterministic harmonic fixture: gliding f0 with a formant-shaped
    harmonic stack, amplitude-modulated at syllable rate."""
    rng = np.random.default_rng(seed)
    n = int(round(duration * fs))
    t = np.arange(n) / fs
    f0 = 120.0 + 30.0 * np.sin(2 * np.pi * 0.7 * t)
    phase0 = 2 * np.pi * np.cumsum(f0) / fs
    signal = np.zeros(n)
    for k in range(1, 13):
        formant_gain = np.exp(-((k * 130.0 - 600.0) / 500.0) ** 2) \
            + 0.4 * np.exp(-((k * 130.0 - 1200.0) / 400.0) ** 2)
        signal += (formant_gain / k) * np.sin(k * phase0 + rng.uniform(0, 2 * np.pi))
    envelope = 0.55 + 0.45 * np.sin(2 * np.pi * 3.1 * t + 0.9)
    signal *= envelope
    signal += 1e-4 * rng.standard_normal(n)
    return Waveform(0.7 * signal / np.max(np.abs(signal)), fs)


@pytest.fixture(scope="session")
def sine_fixture():
    return sine_wave()


@pytest.fixture(scope="session")
def speech_fixture():
    return speech_like()


def build_corpus(directory, texts, durations=None, fs=44100):
    """Write a manifest plus one sine WAV per text; returns manifest path."""
    durations = durations or [0.5] * len(texts)
    lines = []
    for i, (text, dur) in enumerate(zip(texts, durations)):
        name = f"utt_{i:03d}"
        write_wav(sine_wave(duration=dur, fs=fs), directory / f"{name}.wav")
        lines.append(f"{name}|{name}.wav|{text}")
    manifest = directory / "manifest.txt"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return manifest


@pytest.fixture()
def two_utterance_manifest(tmp_path):
    """The hand-counted pair: 12+2 symbols, 2+1 words, 3 unique words."""
    return build_corpus(tmp_path, ["Привет, мир!", "Да"], durations=[1.0, 0.5])
