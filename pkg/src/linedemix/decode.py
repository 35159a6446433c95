"""Support decoding from a dual vector and amplitude estimation.

The dual vector eta reveals the spike support where |eta_l| reaches lambda
and the spectral support where the dual polynomial |sum_l eta_l e^{-i2pi l f}|
reaches one. Amplitudes are then recovered by least squares, either jointly
over the combined dictionary or from the uncorrupted samples only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .admm import AdmmConfig, SolveReport, admm_solve
from .greedy import GreedyConfig, design_matrix, joint_ls, local_optimize
from .model import Instance, LineSpectrum, Samples, SpikeVector, forward, recovery_score

__all__ = [
    "DecodeConfig",
    "DemixResult",
    "decode_supports",
    "amplitude_ls",
    "run_demix",
    "trimming_check",
]


@dataclass
class DecodeConfig:
    eta_tol: float = 1e-3
    poly_tol: float = 1e-3
    grid_oversample: int = 64
    cluster_radius: float | None = None  # default 0.05/n, set at decode time

    def __post_init__(self):
        if not (0.0 < self.eta_tol < 0.5 and 0.0 < self.poly_tol < 0.5):
            raise ValueError("tolerances must lie in (0, 0.5)")
        if self.grid_oversample < 16:
            raise ValueError("grid_oversample must be at least 16")


def _dual_poly_mags(eta: np.ndarray, grid_size: int) -> np.ndarray:
    n = eta.size
    buf = np.zeros(grid_size, dtype=complex)
    buf[1:n + 1] = eta
    return np.abs(np.fft.fft(buf))


def _refine_peak(eta: np.ndarray, f0: float, width: float) -> float:
    t = np.arange(1, eta.size + 1)

    def neg(f):
        return -abs(np.sum(eta * np.exp(-2j * np.pi * t * f)))

    res = minimize_scalar(neg, bounds=(f0 - width, f0 + width), method="bounded",
                          options={"xatol": 1e-15})
    return float(res.x % 1.0)


def decode_supports(eta: np.ndarray, lam: float,
                    cfg: DecodeConfig | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Extract (frequency support, spike index set) from a dual vector."""
    if cfg is None:
        cfg = DecodeConfig()
    eta = np.asarray(eta, dtype=complex)
    n = eta.size
    omega_hat = np.flatnonzero(np.abs(eta) >= lam * (1.0 - cfg.eta_tol)) + 1

    grid_size = cfg.grid_oversample * n
    mags = _dual_poly_mags(eta, grid_size)
    above = mags >= 1.0 - cfg.poly_tol
    is_peak = (mags >= np.roll(mags, 1)) & (mags > np.roll(mags, -1))
    candidates = np.flatnonzero(above & is_peak) / grid_size
    refined = [_refine_peak(eta, f, 1.0 / grid_size) for f in candidates]

    # merge peaks closer than cluster_radius (wrap-around)
    cluster_radius = cfg.cluster_radius if cfg.cluster_radius is not None else 0.05 / n
    merged: list[float] = []
    for f in sorted(refined):
        d = [min(abs(f - g), 1.0 - abs(f - g)) for g in merged]
        if not d or min(d) > cluster_radius:
            merged.append(f)
    if len(merged) > 1:
        wrap = min(abs(merged[0] - merged[-1]), 1.0 - abs(merged[0] - merged[-1]))
        if wrap <= cluster_radius:
            merged.pop()
    return np.array(merged), omega_hat


def amplitude_ls(y: Samples | np.ndarray, T_hat, Omega_hat,
                 mode: str = "joint") -> tuple[LineSpectrum, SpikeVector]:
    """Amplitude estimation given supports.

    "joint" solves least squares over [sinusoids | spike indicators]; "masked"
    fits the sinusoids on the uncorrupted rows only and assigns each spike the
    residual at its sample.
    """
    yv = y.y if isinstance(y, Samples) else np.asarray(y, dtype=complex)
    n = yv.size
    freqs = np.asarray(list(T_hat), dtype=float)
    omega = np.asarray(list(Omega_hat), dtype=int)
    if mode == "joint":
        if freqs.size + omega.size > n:
            raise ValueError("combined support larger than the sample count")
        x, z, _ = joint_ls(yv, freqs, omega)
    elif mode == "masked":
        if freqs.size > n - omega.size:
            raise ValueError("too many frequencies for the uncorrupted rows")
        rows = np.setdiff1d(np.arange(n), omega - 1)
        A = design_matrix(n, freqs, [])
        if freqs.size:
            x, *_ = np.linalg.lstsq(A[rows], yv[rows], rcond=None)
        else:
            x = np.empty(0, dtype=complex)
        fit = A @ x if freqs.size else np.zeros(n, dtype=complex)
        z = yv[omega - 1] - fit[omega - 1] if omega.size else np.empty(0, dtype=complex)
    else:
        raise ValueError(f"unknown mode: {mode!r}")
    spectrum = LineSpectrum(freqs, x) if freqs.size else LineSpectrum.empty()
    spikes = SpikeVector(n, omega, z) if omega.size else SpikeVector.empty(n)
    return spectrum, spikes


@dataclass
class DemixResult:
    spectrum: LineSpectrum
    spikes: SpikeVector
    eta: np.ndarray
    solve: SolveReport


def _prune(spectrum: LineSpectrum, spikes: SpikeVector,
           rel_tol: float = 1e-6) -> tuple[np.ndarray, np.ndarray]:
    amps = np.concatenate([np.abs(spectrum.amplitudes), np.abs(spikes.amplitudes)])
    if amps.size == 0:
        return spectrum.frequencies, spikes.indices
    thresh = rel_tol * amps.max()
    freqs = spectrum.frequencies[np.abs(spectrum.amplitudes) >= thresh]
    omega = spikes.indices[np.abs(spikes.amplitudes) >= thresh]
    return freqs, omega


def run_demix(y: Samples | np.ndarray, lam: float | None = None,
              admm_cfg: AdmmConfig | None = None,
              decode_cfg: DecodeConfig | None = None,
              ls_mode: str = "joint", polish: bool = True) -> DemixResult:
    """Full pipeline: equality-mode ADMM, support decoding, pruning, an
    optional simplex polish of the frequencies, and a final amplitude fit."""
    yv = y.y if isinstance(y, Samples) else np.asarray(y, dtype=complex)
    n = yv.size
    if lam is None:
        lam = 1.0 / np.sqrt(n)
    if admm_cfg is None:
        admm_cfg = AdmmConfig(lam=lam)
    if decode_cfg is None:
        decode_cfg = DecodeConfig(eta_tol=1e-2, poly_tol=1e-2)

    report = admm_solve(yv, admm_cfg)
    T_hat, omega_hat = decode_supports(report.eta, lam, decode_cfg)
    if T_hat.size + omega_hat.size >= n:
        # a dual far from the boundary-tight regime can flag nearly every
        # candidate; keep only the strongest ones so the joint fit stays
        # overdetermined (the amplitude prune removes the rest anyway)
        t = np.arange(1, n + 1)
        poly_strength = np.abs(np.exp(-2j * np.pi * np.outer(T_hat, t)) @ report.eta)
        spike_strength = np.abs(report.eta[omega_hat - 1]) / lam
        strength = np.concatenate([poly_strength, spike_strength])
        keep = np.sort(np.argsort(strength)[::-1][:n - 1])
        k0 = T_hat.size
        T_hat = T_hat[keep[keep < k0]]
        omega_hat = omega_hat[keep[keep >= k0] - k0]
    spectrum, spikes = amplitude_ls(yv, T_hat, omega_hat, mode=ls_mode)
    T_hat, omega_hat = _prune(spectrum, spikes)
    if polish and T_hat.size:
        T_hat = local_optimize(yv, T_hat, omega_hat, GreedyConfig())
    spectrum, spikes = amplitude_ls(yv, T_hat, omega_hat, mode=ls_mode)
    T_hat, omega_hat = _prune(spectrum, spikes)
    spectrum, spikes = amplitude_ls(yv, T_hat, omega_hat, mode=ls_mode)
    return DemixResult(spectrum, spikes, report.eta, report)


def trimming_check(instance: Instance, subset_T, subset_Omega,
                   lam: float | None = None, **kwargs) -> bool:
    """Demix the trimmed instance that keeps only the given support subsets,
    at the same lambda, and report whether it is recovered exactly."""
    subset_T = np.asarray(list(subset_T), dtype=float)
    subset_Omega = np.asarray(list(subset_Omega), dtype=int)
    keep_f = np.isin(instance.spectrum.frequencies, subset_T)
    keep_o = np.isin(instance.spikes.indices, subset_Omega)
    if not (np.all(np.isin(subset_T, instance.spectrum.frequencies))
            and np.all(np.isin(subset_Omega, instance.spikes.indices))):
        raise ValueError("subsets must be contained in the true supports")
    n = instance.n
    spectrum = LineSpectrum(instance.spectrum.frequencies[keep_f],
                            instance.spectrum.amplitudes[keep_f]) \
        if keep_f.any() else LineSpectrum.empty()
    spikes = SpikeVector(n, instance.spikes.indices[keep_o],
                         instance.spikes.amplitudes[keep_o]) \
        if keep_o.any() else SpikeVector.empty(n)
    w = np.zeros(n, dtype=complex)
    y = forward(spectrum, n) + spikes.dense() + w
    trimmed = Instance(spectrum, spikes, w, Samples(y), instance.seed, instance.params)
    result = run_demix(trimmed.y, lam=lam, **kwargs)
    return recovery_score(trimmed, result.spectrum, result.spikes).exact_demix
