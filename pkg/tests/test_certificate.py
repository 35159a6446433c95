import numpy as np
import pytest

from linedemix.certificate import (
    DualPolynomial,
    SingularSystemError,
    build_system,
    centered_spike_indices,
    certificate_for_instance,
    clean_certificate,
    construct_certificate,
    half_length,
    modulated_signs,
    spike_basis,
    verify_certificate,
)
from linedemix.kernels import build_kernel, kernel_eval
from linedemix.model import generate_instance


def test_half_length():
    assert half_length(61) == 30
    assert half_length(201) == 100
    assert half_length(16) == 7


def test_centered_spike_indices():
    # n = 11, m = 5: sample index l maps to l - 6
    np.testing.assert_array_equal(centered_spike_indices([1, 6, 11], 11), [-5, 0, 5])


def test_modulated_signs_unit_modulus():
    inst = generate_instance(31, 3, 4, 0.05, amp_law="gaussian", seed=2)
    h, r = modulated_signs(inst)
    np.testing.assert_allclose(np.abs(h), 1.0, atol=1e-12)
    np.testing.assert_allclose(np.abs(r), 1.0, atol=1e-12)


def test_dual_polynomial_eval_grid_matches_eval():
    rng = np.random.default_rng(0)
    q = rng.standard_normal(21) + 1j * rng.standard_normal(21)
    poly = DualPolynomial(q, 0.1)
    grid_size = 128
    f = np.arange(grid_size) / grid_size
    for order in (0, 1):
        np.testing.assert_allclose(poly.eval_grid(grid_size, order),
                                   poly.eval(f, order), atol=1e-9)


def test_dual_polynomial_rejects_even_length():
    with pytest.raises(ValueError):
        DualPolynomial(np.zeros(4, dtype=complex), 0.1)


def test_build_system_single_frequency_clean_is_identity():
    spec = build_kernel(50)
    system = build_system(spec, [0.37], [], 101)
    np.testing.assert_allclose(system.D, np.eye(2), atol=1e-9)


def test_build_system_offdiagonal_is_kernel_at_lag():
    spec = build_kernel(500)
    system = build_system(spec, [0.2, 0.7], [], 1001)
    assert system.D0[0, 1] == pytest.approx(kernel_eval(spec, -0.5, 0), abs=1e-13)
    assert system.D0[1, 0] == pytest.approx(kernel_eval(spec, 0.5, 0), abs=1e-13)


def test_build_system_even_n_rejected():
    spec = build_kernel(50)
    with pytest.raises(ValueError):
        build_system(spec, [0.2], [], 100)


def test_spike_basis_norm_bound():
    # ||b(u)||^2 <= 10 k for all |u| <= m at m = 1000
    spec = build_kernel(1000)
    k = 5
    freqs = np.linspace(0.05, 0.85, k)
    u = np.array([-1000, -500, 0, 500, 1000])
    B = spike_basis(u, freqs, spec.kappa)
    norms_sq = np.sum(np.abs(B) ** 2, axis=0)
    assert np.all(norms_sq <= 10 * k)


def test_single_line_certificate_is_shifted_kernel():
    spec = build_kernel(50)
    poly = clean_certificate(spec, [0.5], np.array([1.0 + 0j]))
    f = np.array([0.5, 0.3, 0.62])
    expected = kernel_eval(spec, f - 0.5, 0)
    np.testing.assert_allclose(poly.eval(f), expected, atol=1e-10)
    assert poly.eval(0.5) == pytest.approx(1.0, abs=1e-10)


def test_clean_certificate_interpolates_and_is_valid():
    spec = build_kernel(100)
    T = [0.1, 0.35, 0.62, 0.9]
    h = np.exp(1j * np.array([0.3, 1.1, -2.0, 2.5]))
    poly = clean_certificate(spec, T, h)
    assert np.max(np.abs(poly.eval(np.array(T)) - h)) < 1e-8
    assert np.max(np.abs(poly.eval(np.array(T), 1))) < 1e-6 / spec.kappa
    report = verify_certificate(poly, T, [], 201, h=h, grid_size=40200)
    assert report.valid
    assert report.offsupport_max < 1.0


def test_clean_certificate_derivative_bound():
    # sup_f kappa |Q'(f)| stays below 1 + 1e-6 for a valid clean certificate
    spec = build_kernel(100)
    T = [0.1, 0.35, 0.62, 0.9]
    h = np.exp(1j * np.array([0.3, 1.1, -2.0, 2.5]))
    poly = clean_certificate(spec, T, h)
    deriv = poly.eval_grid(20_000, 1)
    assert spec.kappa * np.max(np.abs(deriv)) <= 1.0 + 1e-6


def test_empty_spike_set_reduces_to_clean_certificate():
    spec = build_kernel(50)
    T = [0.2, 0.6]
    h = np.exp(1j * np.array([0.4, -1.0]))
    p_clean = clean_certificate(spec, T, h)
    system = build_system(spec, T, [], 101)
    p_robust = construct_certificate(system, h, np.empty(0, dtype=complex), 0.5, spec)
    assert np.max(np.abs(p_clean.q - p_robust.q)) < 1e-12


def test_robust_certificate_properties():
    n = 101
    lam = 1.0 / np.sqrt(n)
    inst = generate_instance(n, 3, 5, 3.0 / 100, seed=0)
    poly, report = certificate_for_instance(inst)
    assert report.valid
    assert report.interpolation_err < 1e-8
    # coefficients on the spike support equal lam * r bit-exactly
    _, r = modulated_signs(inst)
    omega_c = centered_spike_indices(inst.spikes.indices, n)
    np.testing.assert_array_equal(poly.q[omega_c + poly.m], lam * r)
    assert report.q_on_omega_err == 0.0
    off = np.setdiff1d(np.arange(-poly.m, poly.m + 1), omega_c)
    assert np.max(np.abs(poly.q[off + poly.m])) < lam


def test_sign_duality_identity():
    # Re<q, y> = sum |x_j| + lam * sum |z_l| for a constructed certificate
    n = 101
    lam = 1.0 / np.sqrt(n)
    inst = generate_instance(n, 3, 5, 3.0 / 100, seed=0)
    poly, _ = certificate_for_instance(inst)
    dual = np.vdot(poly.q, inst.y.y).real
    primal = (np.sum(np.abs(inst.spectrum.amplitudes))
              + lam * np.sum(np.abs(inst.spikes.amplitudes)))
    assert abs(dual - primal) < 1e-8 * primal


def test_clustered_support_certificate_invalid():
    n = 101
    spec = build_kernel(half_length(n))
    T = [0.3, 0.3 + 0.3 / n, 0.3 + 0.6 / n]
    h = np.ones(3, dtype=complex)
    system = build_system(spec, T, [], n)
    poly = construct_certificate(system, h, np.empty(0, dtype=complex),
                                 1.0 / np.sqrt(n), spec)
    report = verify_certificate(poly, T, [], n, h=h, grid_size=10_000)
    assert not report.valid


def test_singular_system_rejected():
    spec = build_kernel(50)
    system = build_system(spec, [0.3, 0.3 + 1e-13], [], 101)
    with pytest.raises(SingularSystemError):
        construct_certificate(system, np.ones(2, dtype=complex),
                              np.empty(0, dtype=complex), 0.1, spec)


def test_sign_pattern_size_mismatch_rejected():
    spec = build_kernel(50)
    system = build_system(spec, [0.3, 0.7], [], 101)
    with pytest.raises(ValueError):
        construct_certificate(system, np.ones(3, dtype=complex),
                              np.empty(0, dtype=complex), 0.1, spec)


def test_certificate_for_instance_even_n_rejected():
    inst = generate_instance(32, 2, 2, 0.1, seed=0)
    with pytest.raises(ValueError):
        certificate_for_instance(inst)


def test_report_to_dict_round_trip():
    spec = build_kernel(50)
    poly = clean_certificate(spec, [0.5], np.array([1.0 + 0j]))
    report = verify_certificate(poly, [0.5], [], 101, grid_size=10_000)
    doc = report.to_dict()
    assert doc["valid"] == report.valid
    assert set(doc) == {
        "interpolation_err", "derivative_err", "offsupport_max",
        "q_on_omega_err", "q_off_omega_max", "concavity_ok", "valid",
    }
