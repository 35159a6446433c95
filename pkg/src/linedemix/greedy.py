"""Greedy demixing over the continuous dictionary of sinusoids and spikes.

Each outer iteration selects the atom best correlated with the residual,
refits all amplitudes by least squares, prunes weak atoms, and locally
optimizes all sinusoid frequencies at once with a derivative-free simplex
search whose objective refits amplitudes internally.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .model import LineSpectrum, Samples, SpikeVector

__all__ = [
    "GreedyConfig",
    "GreedyResult",
    "design_matrix",
    "joint_ls",
    "correlation_scan",
    "local_optimize",
    "greedy_demix",
]


@dataclass
class GreedyConfig:
    tau: float | None = None
    fft_oversample: int = 32
    max_atoms: int = 200
    max_outer_iters: int = 60
    simplex_tol: float = 1e-12
    simplex_max_evals: int = 4000
    local_opt: bool = True
    residual_tol: float = 1e-9

    def __post_init__(self):
        if self.fft_oversample < 8:
            raise ValueError("fft_oversample must be at least 8")
        if self.tau is not None and self.tau <= 0:
            raise ValueError("tau must be positive")


@dataclass
class GreedyResult:
    spectrum: LineSpectrum
    spikes: SpikeVector
    residual_norm: float
    iterations: int
    converged: bool
    trace: list = field(default_factory=list)


def design_matrix(n: int, freqs, omega) -> np.ndarray:
    """Columns e^{i 2 pi f l} for each frequency and unit vectors e(l) for
    each spike index, sampled at l = 1..n."""
    freqs = np.asarray(list(freqs), dtype=float)
    omega = np.asarray(list(omega), dtype=int)
    t = np.arange(1, n + 1)
    cols = [np.exp(2j * np.pi * np.outer(t, freqs))] if freqs.size else []
    if omega.size:
        E = np.zeros((n, omega.size), dtype=complex)
        E[omega - 1, np.arange(omega.size)] = 1.0
        cols.append(E)
    if not cols:
        return np.zeros((n, 0), dtype=complex)
    return np.hstack(cols)


def joint_ls(y: np.ndarray, freqs, omega) -> tuple[np.ndarray, np.ndarray, float]:
    """Least-squares amplitudes over the combined dictionary; returns
    (sine amplitudes, spike amplitudes, residual norm)."""
    freqs = np.asarray(list(freqs), dtype=float)
    omega = np.asarray(list(omega), dtype=int)
    A = design_matrix(y.size, freqs, omega)
    if A.shape[1] == 0:
        return np.empty(0, dtype=complex), np.empty(0, dtype=complex), float(np.linalg.norm(y))
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    res = float(np.linalg.norm(y - A @ coef))
    k = freqs.size
    return coef[:k], coef[k:], res


def _corr_poly_max(r: np.ndarray, grid_size: int) -> tuple[float, float]:
    """Coarse argmax of f -> |sum_l r_l e^{-i 2 pi l f}| on a uniform grid."""
    n = r.size
    buf = np.zeros(grid_size, dtype=complex)
    buf[1:n + 1] = r
    mags = np.abs(np.fft.fft(buf))
    j = int(np.argmax(mags))
    return j / grid_size, float(mags[j])


def _refine_corr(r: np.ndarray, f0: float, width: float) -> tuple[float, float]:
    t = np.arange(1, r.size + 1)

    def neg(f):
        return -abs(np.sum(r * np.exp(-2j * np.pi * t * f)))

    res = minimize_scalar(neg, bounds=(f0 - width, f0 + width), method="bounded",
                          options={"xatol": 1e-14})
    return float(res.x % 1.0), float(-res.fun)


def correlation_scan(residual: np.ndarray, cfg: GreedyConfig) -> tuple[str, float | int]:
    """Best atom for the current residual: ("sine", frequency) or ("spike", index)."""
    r = np.asarray(residual, dtype=complex)
    n = r.size
    if not np.any(r):
        raise ValueError("residual is zero")
    grid_size = cfg.fft_oversample * n
    f0, _ = _corr_poly_max(r, grid_size)
    f_best, corr_poly = _refine_corr(r, f0, 1.0 / grid_size)
    sine_corr = corr_poly / np.sqrt(n)  # atoms are unit-norm: a(f)_l = e^{i2pi f l}/sqrt(n)
    spike_idx = int(np.argmax(np.abs(r))) + 1
    spike_corr = float(np.abs(r[spike_idx - 1]))
    if sine_corr >= spike_corr:
        return "sine", f_best
    return "spike", spike_idx


def local_optimize(y: np.ndarray, T_hat, Omega_hat, cfg: GreedyConfig | None = None):
    """Simplex refinement of all frequencies; amplitudes refit inside the
    objective. Returns frequencies achieving a cost no worse than the input."""
    if cfg is None:
        cfg = GreedyConfig()
    freqs = np.asarray(list(T_hat), dtype=float)
    if freqs.size == 0:
        raise ValueError("frequency support must be nonempty")
    omega = np.asarray(list(Omega_hat), dtype=int)
    n = y.size

    def cost(f):
        return joint_ls(y, np.mod(f, 1.0), omega)[2]

    c0 = cost(freqs)
    radius = 0.5 / n
    simplex = np.vstack([freqs] + [freqs + radius * e for e in np.eye(freqs.size)])
    res = minimize(
        cost, freqs, method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "xatol": cfg.simplex_tol, "fatol": cfg.simplex_tol,
            "maxfev": cfg.simplex_max_evals,
        },
    )
    if res.fun <= c0:
        return np.sort(np.mod(res.x, 1.0))
    return np.sort(freqs)


def greedy_demix(y: Samples | np.ndarray, cfg: GreedyConfig | None = None) -> GreedyResult:
    """Run the full greedy loop: select, fit, prune, locally optimize, update."""
    if cfg is None:
        cfg = GreedyConfig()
    yv = y.y if isinstance(y, Samples) else np.asarray(y, dtype=complex)
    n = yv.size
    norm_y = np.linalg.norm(yv)
    tau = cfg.tau if cfg.tau is not None else 1e-6 * norm_y / np.sqrt(n)

    freqs = np.empty(0, dtype=float)
    omega = np.empty(0, dtype=int)
    x = np.empty(0, dtype=complex)
    z = np.empty(0, dtype=complex)
    trace: list = []
    res_norm = norm_y
    converged = norm_y == 0.0
    it = 0

    while not converged and it < cfg.max_outer_iters:
        it += 1
        residual = yv - design_matrix(n, freqs, omega) @ np.concatenate([x, z])
        if np.linalg.norm(residual) < cfg.residual_tol * norm_y:
            converged = True
            break
        kind, param = correlation_scan(residual, cfg)
        if kind == "sine":
            if param not in freqs:
                freqs = np.sort(np.append(freqs, param))
        else:
            if param not in omega:
                omega = np.sort(np.append(omega, param))
        if freqs.size + omega.size > cfg.max_atoms:
            break

        x, z, res_norm = joint_ls(yv, freqs, omega)
        # prune, then optimize locations, then refit
        keep_f = np.abs(x) >= tau
        keep_o = np.abs(z) >= tau
        freqs, omega = freqs[keep_f], omega[keep_o]
        if cfg.local_opt and freqs.size:
            freqs = local_optimize(yv, freqs, omega, cfg)
        x, z, res_norm = joint_ls(yv, freqs, omega)
        trace.append({"iter": it, "residual": res_norm,
                      "n_sines": int(freqs.size), "n_spikes": int(omega.size)})
        if res_norm < cfg.residual_tol * norm_y:
            converged = True

    spectrum = LineSpectrum(freqs, x) if freqs.size else LineSpectrum.empty()
    spikes = SpikeVector(n, omega, z) if omega.size else SpikeVector.empty(n)
    return GreedyResult(spectrum, spikes, res_norm, it, converged, trace)
