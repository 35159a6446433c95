import numpy as np
import pytest

from linedemix.baselines import PeriodogramConfig, music, periodogram
from linedemix.model import LineSpectrum, forward, generate_instance, wrap_distance


def test_periodogram_config_validation():
    with pytest.raises(ValueError):
        PeriodogramConfig(window="blackman")


def test_periodogram_grid_size_validation():
    y = np.ones(16, dtype=complex)
    with pytest.raises(ValueError):
        periodogram(y, PeriodogramConfig(grid_size=32))


def test_periodogram_single_on_grid_sinusoid():
    n = 32
    y = forward(LineSpectrum([0.25], [1.0]), n)
    grid, mags, peaks = periodogram(y)
    assert grid[np.argmax(mags)] == pytest.approx(0.25)
    assert 0.25 in peaks
    assert mags.max() == pytest.approx(1.0, rel=1e-12)


def test_periodogram_two_separated_lines():
    n = 64
    y = forward(LineSpectrum([0.2, 0.6], [1.0, 1.0]), n)
    _, _, peaks = periodogram(y, PeriodogramConfig(peak_rel_threshold=0.8))
    assert any(abs(p - 0.2) < 1.0 / n for p in peaks)
    assert any(abs(p - 0.6) < 1.0 / n for p in peaks)


def test_periodogram_global_phase_invariance():
    inst = generate_instance(41, 3, 2, 0.07, seed=1)
    _, mags1, _ = periodogram(inst.y)
    _, mags2, _ = periodogram(np.exp(1.3j) * inst.y.y)
    np.testing.assert_allclose(mags1, mags2, atol=1e-12)


def test_periodogram_windowed_runs():
    inst = generate_instance(41, 2, 0, 0.1, seed=2)
    for window in ("hann", "hamming"):
        grid, mags, _ = periodogram(inst.y, PeriodogramConfig(window=window))
        assert grid.size == mags.size == 8 * 41


def test_music_noiseless_three_lines():
    inst = generate_instance(41, 3, 0, 3.0 / 40, seed=7)
    freqs = music(inst.y, 3)
    assert freqs.size == 3
    err = max(wrap_distance(f, inst.spectrum.frequencies).min() for f in freqs)
    assert err < 1e-6


def test_music_single_line():
    n = 41
    y = forward(LineSpectrum([0.3721], [1.0 - 0.4j]), n)
    freqs = music(y, 1)
    assert abs(freqs[0] - 0.3721) < 1e-8


def test_music_amplitude_scaling_invariance():
    inst = generate_instance(41, 3, 0, 3.0 / 40, seed=7)
    f1 = music(inst.y, 3)
    f2 = music(5.0 * inst.y.y, 3)
    np.testing.assert_allclose(f1, f2, atol=1e-9)


def test_music_model_order_validation():
    y = np.ones(16, dtype=complex)
    with pytest.raises(ValueError):
        music(y, 8)  # k >= n/2
    with pytest.raises(ValueError):
        music(y, 3, subarray=2)
