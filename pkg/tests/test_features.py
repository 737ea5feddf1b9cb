import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ruslankit import rslf
from ruslankit.audio import Waveform
from ruslankit.errors import (CorruptFile, InvalidBandRange, InvalidConfig,
                              NegativeLoss, ShapeMismatch, SignalTooShort)
from ruslankit.features import (LinearSpectrogram, StftConfig,
                                hann_window, istft, linear_spectrogram,
                                loss_lin, loss_mel, loss_total,
                                mel_filterbank, mel_spectrogram, stft)

FS = 44100


def l1_mean_bruteforce(a, b):
    """Independent oracle: explicit double loop."""
    total = 0.0
    rows, cols = a.shape
    for i in range(rows):
        for j in range(cols):
            total += abs(a[i][j] - b[i][j])
    return total / (rows * cols)


# --- config -------------------------------------------------------------

def test_config_validation():
    StftConfig()  # defaults are valid
    with pytest.raises(InvalidConfig):
        StftConfig(fft_size=1000)  # not a power of two
    with pytest.raises(InvalidConfig):
        StftConfig(hop_length=4096)  # hop > win
    with pytest.raises(InvalidConfig):
        StftConfig(win_length=4096)  # win > fft
    with pytest.raises(InvalidConfig):
        StftConfig(window="hamming")


# --- stft ----------------------------------------------------------------

def test_stft_frame_counts():
    cfg = StftConfig()
    n = FS
    assert stft(Waveform(np.zeros(n), FS), cfg).shape \
        == (1 + n // cfg.hop_length, cfg.bin_count)
    nc = StftConfig(center=False)
    assert stft(Waveform(np.zeros(n), FS), nc).shape \
        == (1 + (n - nc.win_length) // nc.hop_length, nc.bin_count)
    with pytest.raises(SignalTooShort):
        stft(Waveform(np.zeros(100), FS), nc)


def test_stft_zero_signal_all_zero():
    spec = stft(Waveform(np.zeros(FS // 4), FS))
    assert np.all(spec == 0)


def test_stft_impulse_magnitudes_equal_window():
    # closed form: each frame of a shifted unit impulse has |X[k]| equal to
    # the window sample at the impulse offset, at every bin
    cfg = StftConfig(fft_size=256, win_length=256, hop_length=64, center=False)
    n = 1024
    pos = 300
    x = np.zeros(n)
    x[pos] = 1.0
    mag = np.abs(stft(Waveform(x, FS), cfg))
    window = hann_window(cfg.win_length)
    for m in range(mag.shape[0]):
        offset = pos - m * cfg.hop_length
        expected = window[offset] if 0 <= offset < cfg.win_length else 0.0
        assert np.allclose(mag[m], expected, atol=1e-12)


def test_stft_sine_peak_bin():
    # round(440 * 2048 / 44100) = 20
    t = np.arange(FS) / FS
    wave = Waveform(0.5 * np.sin(2 * np.pi * 440.0 * t), FS)
    mag = np.abs(stft(wave))
    mid = mag[mag.shape[0] // 2]
    assert int(np.argmax(mid)) == 20


# --- istft round trip ------------------------------------------------------

def interior_error(x, y, guard):
    n = min(x.size, y.size)
    sl = slice(guard, n - guard)
    return float(np.max(np.abs(x[:n][sl] - y[:n][sl])))


def test_istft_roundtrip_random_noise():
    cfg = StftConfig()
    rng = np.random.default_rng(0)
    x = rng.normal(0, 0.3, FS)
    y = istft(stft(Waveform(x, FS), cfg), cfg, FS)
    assert interior_error(x, y.samples, cfg.fft_size) <= 1e-6


def test_istft_roundtrip_speech_fixture(speech_fixture):
    cfg = StftConfig()
    y = istft(stft(speech_fixture, cfg), cfg, speech_fixture.sample_rate)
    assert interior_error(speech_fixture.samples, y.samples, cfg.fft_size) <= 1e-6


def test_istft_zero_matrix():
    cfg = StftConfig()
    out = istft(np.zeros((10, cfg.bin_count), dtype=complex), cfg, FS)
    assert np.all(out.samples == 0)
    assert out.samples.size == (10 - 1) * cfg.hop_length


def test_istft_output_length_formula():
    cfg = StftConfig()
    for frames in (2, 7, 33):
        out = istft(np.zeros((frames, cfg.bin_count), dtype=complex), cfg, FS)
        assert out.samples.size == (frames - 1) * cfg.hop_length
    nc = StftConfig(center=False)
    out = istft(np.zeros((5, nc.bin_count), dtype=complex), nc, FS)
    assert out.samples.size == nc.win_length + 4 * nc.hop_length


def test_istft_rejects_bad_shape():
    with pytest.raises(InvalidConfig):
        istft(np.zeros((4, 7), dtype=complex), StftConfig(), FS)


def test_roundtrip_many_random_signals():
    cfg = StftConfig(fft_size=512, win_length=512, hop_length=128)
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(3 * cfg.fft_size, 6 * cfg.fft_size))
        x = rng.uniform(-0.9, 0.9, n)
        y = istft(stft(Waveform(x, FS), cfg), cfg, FS)
        worst = max(worst, interior_error(x, y.samples, cfg.fft_size))
    assert worst <= 1e-6


def test_parseval_consistency():
    # sum |X[k]|^2 over one-sided bins (doubling the interior) equals
    # fft_size times the windowed frame energy
    cfg = StftConfig(center=False)
    rng = np.random.default_rng(1)
    x = rng.normal(0, 0.25, 4 * cfg.fft_size)
    spec = stft(Waveform(x, FS), cfg)
    window = hann_window(cfg.win_length)
    for m in range(spec.shape[0]):
        frame = x[m * cfg.hop_length: m * cfg.hop_length + cfg.win_length] * window
        time_energy = np.sum(frame**2)
        mags = np.abs(spec[m]) ** 2
        freq_energy = (mags[0] + mags[-1] + 2 * np.sum(mags[1:-1])) / cfg.fft_size
        assert abs(freq_energy - time_energy) <= 1e-6 * max(time_energy, 1e-12)


# --- mel -------------------------------------------------------------------

def test_mel_filterbank_shape_and_coverage():
    cfg = StftConfig()
    fb = mel_filterbank(80, cfg.bin_count, FS)
    assert fb.shape == (80, cfg.bin_count)
    freqs = np.linspace(0, FS / 2, cfg.bin_count)
    weights = fb.sum(axis=0)
    interior = (freqs > 0) & (freqs < FS / 2)
    assert np.all(weights[interior] > 0)


def test_mel_band_range_validation():
    cfg = StftConfig()
    with pytest.raises(InvalidBandRange):
        mel_filterbank(80, cfg.bin_count, FS, f_min=5000, f_max=100)
    with pytest.raises(InvalidBandRange):
        mel_filterbank(80, cfg.bin_count, FS, f_max=40000)


def test_mel_of_zero_signal_is_log_floor():
    lin = linear_spectrogram(Waveform(np.zeros(FS // 4), FS))
    mel = mel_spectrogram(lin)
    assert mel.values.shape[1] == 80
    assert np.allclose(mel.values, np.log(1e-5))


def test_mel_single_bin_impulse_hits_at_most_two_filters():
    cfg = StftConfig()
    fb = mel_filterbank(80, cfg.bin_count, FS)
    spectrum = np.zeros((1, cfg.bin_count))
    spectrum[0, 400] = 1.0
    lin = LinearSpectrogram(spectrum, FS, cfg)
    mel = mel_spectrogram(lin, log_compress=False)
    assert int(np.count_nonzero(mel.values[0])) <= 2
    assert np.count_nonzero(mel.values[0]) == np.count_nonzero(fb[:, 400])


def test_mel_band_count_fixed_80():
    for n in (FS // 8, FS // 4):
        lin = linear_spectrogram(Waveform(np.random.default_rng(0).normal(0, 0.1, n), FS))
        assert mel_spectrogram(lin).values.shape[1] == 80


# --- losses -------------------------------------------------------------------

def test_loss_identity_and_offset():
    a = np.full((3, 80), 2.0)
    b = np.full((3, 80), 3.0)
    assert loss_mel(a, a) == 0.0
    assert loss_mel(a, b) == pytest.approx(1.0)
    assert loss_lin(a, a) == 0.0


def test_loss_matches_bruteforce_oracle():
    rng = np.random.default_rng(5)
    a = rng.normal(size=(3, 80))
    b = rng.normal(size=(3, 80))
    assert loss_mel(a, b) == pytest.approx(l1_mean_bruteforce(a, b), abs=1e-12)
    c = rng.normal(size=(4, 1025))
    d = rng.normal(size=(4, 1025))
    assert loss_lin(c, d) == pytest.approx(l1_mean_bruteforce(c, d), abs=1e-12)


def test_loss_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        loss_mel(np.zeros((2, 80)), np.zeros((3, 80)))


def test_loss_total():
    report = loss_total(0.0, 0.0)
    assert report.total_loss == 0.0
    report = loss_total(0.3, 0.7)
    assert report.total_loss == pytest.approx(1.0)
    rng = np.random.default_rng(6)
    for _ in range(20):
        a, b = rng.uniform(0, 10, 2)
        assert loss_total(a, b).total_loss == a + b
    with pytest.raises(NegativeLoss):
        loss_total(-0.1, 0.5)


FINITE = st.floats(min_value=-50, max_value=50, allow_nan=False)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.lists(FINITE, min_size=4, max_size=4), min_size=2, max_size=5),
       st.lists(st.lists(FINITE, min_size=4, max_size=4), min_size=2, max_size=5),
       st.lists(st.lists(FINITE, min_size=4, max_size=4), min_size=2, max_size=5))
def test_loss_metric_axioms(xs, ys, zs):
    rows = min(len(xs), len(ys), len(zs))
    a = np.array(xs[:rows])
    b = np.array(ys[:rows])
    c = np.array(zs[:rows])
    dab = loss_mel(a, b)
    assert dab >= 0
    assert dab == pytest.approx(loss_mel(b, a), rel=1e-12)  # symmetry
    assert loss_mel(a, a) == 0.0
    if dab == 0.0:
        assert np.array_equal(a, b)  # zero iff equal
    # triangle inequality
    assert loss_mel(a, c) <= dab + loss_mel(b, c) + 1e-12


# --- container -------------------------------------------------------------------

def test_rslf_roundtrip(tmp_path):
    m = np.random.default_rng(2).normal(size=(17, 80)).astype(np.float32)
    path = tmp_path / "feat.rslf"
    rslf.write_matrix(m, path)
    back = rslf.read_matrix(path)
    assert back.shape == (17, 80)
    assert np.allclose(back, m, atol=0)
    header = path.read_bytes()[:16]
    assert header[:4] == b"RSLF"
    assert int.from_bytes(header[4:8], "little") == 1
    assert int.from_bytes(header[8:12], "little") == 17
    assert int.from_bytes(header[12:16], "little") == 80


def test_rslf_rejects_corruption(tmp_path):
    path = tmp_path / "bad.rslf"
    path.write_bytes(b"WRNG" + b"\0" * 12)
    with pytest.raises(CorruptFile):
        rslf.read_matrix(path)
    rslf.write_matrix(np.zeros((2, 2)), path)
    data = path.read_bytes()
    path.write_bytes(data[:-4])  # truncate payload
    with pytest.raises(CorruptFile):
        rslf.read_matrix(path)
