"""Reference spectral estimators: windowed periodogram and spectral MUSIC."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import hankel
from scipy.optimize import minimize_scalar
from scipy.signal import get_window

from .model import Samples

__all__ = ["PeriodogramConfig", "periodogram", "music"]


@dataclass
class PeriodogramConfig:
    window: str = "none"
    grid_size: int | None = None  # default 8n, must be >= 4n
    peak_rel_threshold: float = 0.1

    def __post_init__(self):
        if self.window not in ("none", "hann", "hamming"):
            raise ValueError("window must be none, hann or hamming")


def periodogram(y: Samples | np.ndarray,
                cfg: PeriodogramConfig | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Windowed zero-padded magnitude spectrum.

    Returns (grid frequencies, magnitudes, peak frequencies). Peaks are local
    maxima above ``peak_rel_threshold`` times the global maximum.
    """
    if cfg is None:
        cfg = PeriodogramConfig()
    yv = y.y if isinstance(y, Samples) else np.asarray(y, dtype=complex)
    n = yv.size
    grid_size = cfg.grid_size if cfg.grid_size is not None else 8 * n
    if grid_size < 4 * n:
        raise ValueError("grid_size must be at least 4n")
    w = np.ones(n) if cfg.window == "none" else get_window(cfg.window, n)
    spec = np.abs(np.fft.fft(yv * w, grid_size)) / n
    grid = np.arange(grid_size) / grid_size
    is_peak = (spec >= np.roll(spec, 1)) & (spec > np.roll(spec, -1))
    peaks = grid[is_peak & (spec >= cfg.peak_rel_threshold * spec.max())]
    return grid, spec, peaks


def music(y: Samples | np.ndarray, k: int, subarray: int | None = None,
          grid_size: int | None = None) -> np.ndarray:
    """Spectral MUSIC frequency estimates.

    Builds a Hankel matrix of the samples with ``subarray`` rows (default
    floor(n/2)), takes the noise subspace from its SVD, and returns the k
    largest refined peaks of the pseudospectrum.
    """
    yv = y.y if isinstance(y, Samples) else np.asarray(y, dtype=complex)
    n = yv.size
    if subarray is None:
        subarray = n // 2
    if not (k < n / 2):
        raise ValueError("model order k must be smaller than n/2")
    if not (k < subarray <= n):
        raise ValueError("subarray length must exceed the model order")
    H = hankel(yv[:subarray], yv[subarray - 1:])
    U, _, _ = np.linalg.svd(H, full_matrices=True)
    U_noise = U[:, k:]

    if grid_size is None:
        grid_size = 32 * n
    t = np.arange(subarray)

    def noise_energy(f):
        a = np.exp(2j * np.pi * f * t) / np.sqrt(subarray)
        return float(np.linalg.norm(U_noise.conj().T @ a) ** 2)

    # pseudospectrum on the grid via a batched projection
    grid = np.arange(grid_size) / grid_size
    A = np.exp(2j * np.pi * np.outer(t, grid)) / np.sqrt(subarray)
    energy = np.linalg.norm(U_noise.conj().T @ A, axis=0) ** 2
    pseudo = 1.0 / np.maximum(energy, 1e-300)
    is_peak = (pseudo >= np.roll(pseudo, 1)) & (pseudo > np.roll(pseudo, -1))
    order = np.argsort(pseudo[is_peak])[::-1]
    candidates = grid[is_peak][order[:k]]

    refined = []
    for f0 in candidates:
        res = minimize_scalar(noise_energy, bounds=(f0 - 1.0 / grid_size, f0 + 1.0 / grid_size),
                              method="bounded", options={"xatol": 1e-14})
        refined.append(float(res.x % 1.0))
    return np.sort(np.array(refined))
