import numpy as np
import pytest

from linedemix.certificate import certificate_for_instance
from linedemix.decode import (
    DecodeConfig,
    amplitude_ls,
    decode_supports,
    run_demix,
    trimming_check,
)
from linedemix.model import generate_instance, recovery_score, wrap_distance


def test_decode_config_validation():
    with pytest.raises(ValueError):
        DecodeConfig(eta_tol=0.0)
    with pytest.raises(ValueError):
        DecodeConfig(poly_tol=0.6)
    with pytest.raises(ValueError):
        DecodeConfig(grid_oversample=8)


def test_decode_zero_dual_gives_empty_supports():
    T_hat, omega_hat = decode_supports(np.zeros(31, dtype=complex), 0.1)
    assert T_hat.size == 0
    assert omega_hat.size == 0


def test_decode_single_spike_indicator():
    lam = 0.2
    eta = np.zeros(31, dtype=complex)
    eta[4] = lam  # sample index 5
    _, omega_hat = decode_supports(eta, lam)
    np.testing.assert_array_equal(omega_hat, [5])


def test_decode_certificate_dual_recovers_supports():
    # a valid certificate interpolates the sign patterns, so its coefficients
    # act as an exact dual vector for support decoding
    n = 101
    inst = generate_instance(n, 3, 5, 3.0 / 100, seed=0)
    poly, report = certificate_for_instance(inst)
    assert report.valid
    T_hat, omega_hat = decode_supports(poly.q, 1.0 / np.sqrt(n))
    np.testing.assert_array_equal(omega_hat, inst.spikes.indices)
    assert T_hat.size == 3
    err = max(wrap_distance(f, inst.spectrum.frequencies).min() for f in T_hat)
    assert err < 1e-6 / n


def test_amplitude_ls_joint_exact_on_true_supports():
    inst = generate_instance(41, 3, 4, 0.06, seed=1)
    spectrum, spikes = amplitude_ls(inst.y, inst.spectrum.frequencies,
                                    inst.spikes.indices)
    np.testing.assert_allclose(spectrum.amplitudes, inst.spectrum.amplitudes,
                               atol=1e-10)
    np.testing.assert_allclose(spikes.amplitudes, inst.spikes.amplitudes,
                               atol=1e-10)


def test_amplitude_ls_masked_mode():
    inst = generate_instance(41, 2, 3, 0.1, seed=6)
    spectrum, spikes = amplitude_ls(inst.y, inst.spectrum.frequencies,
                                    inst.spikes.indices, mode="masked")
    np.testing.assert_allclose(spectrum.amplitudes, inst.spectrum.amplitudes,
                               atol=1e-10)
    np.testing.assert_allclose(spikes.amplitudes, inst.spikes.amplitudes,
                               atol=1e-10)


def test_amplitude_ls_spurious_frequency_near_zero():
    inst = generate_instance(31, 2, 2, 0.1, seed=3)
    freqs = np.append(inst.spectrum.frequencies, 0.77)
    spectrum, _ = amplitude_ls(inst.y, freqs, inst.spikes.indices)
    assert np.min(np.abs(spectrum.amplitudes)) < 1e-10


def test_amplitude_ls_empty_supports():
    spectrum, spikes = amplitude_ls(np.ones(10, dtype=complex), [], [])
    assert len(spectrum) == 0
    assert len(spikes) == 0


def test_amplitude_ls_overcomplete_rejected():
    y = np.ones(5, dtype=complex)
    with pytest.raises(ValueError):
        amplitude_ls(y, [0.1, 0.2, 0.3], [1, 2, 3], mode="joint")
    with pytest.raises(ValueError):
        amplitude_ls(y, [0.1, 0.2, 0.3, 0.4], [1, 2], mode="masked")
    with pytest.raises(ValueError):
        amplitude_ls(y, [0.1], [1], mode="bogus")


def test_run_demix_exact_on_separated_instance():
    inst = generate_instance(31, 2, 3, 2.52 / 30, seed=0)
    result = run_demix(inst.y)
    score = recovery_score(inst, result.spectrum, result.spikes)
    assert result.solve.converged
    assert score.exact_demix
    assert score.relative_mse < 1e-8


def test_trimming_preserves_exactness():
    inst = generate_instance(31, 2, 3, 2.52 / 30, seed=0)
    # drop one line, keep all spikes
    assert trimming_check(inst, inst.spectrum.frequencies[:1], inst.spikes.indices)
    # drop one spike, keep all lines
    assert trimming_check(inst, inst.spectrum.frequencies, inst.spikes.indices[:-1])


def test_trimming_rejects_non_subset():
    inst = generate_instance(31, 2, 3, 2.52 / 30, seed=0)
    with pytest.raises(ValueError):
        trimming_check(inst, [0.123456], inst.spikes.indices)
