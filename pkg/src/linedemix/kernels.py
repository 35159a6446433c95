"""Interpolation kernels: Dirichlet kernels and the triple-product kernel.

The deterministic kernel is a product of three Dirichlet kernels, equivalently
its Fourier coefficients c are the convolution of three rectangle sequences.
The randomized variant zeroes the coefficients on a given index set, which is
handled by the ``mask`` argument of :func:`kernel_eval`.

Coefficient indexing is centered: position i of ``c`` holds the coefficient of
e^{i 2 pi (i - m) f}. Sample index l in 1..n corresponds to centered index
l - (m + 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["KernelSpec", "dirichlet_eval", "build_kernel", "kernel_eval", "kernel_eval_grid"]


@dataclass(frozen=True)
class KernelSpec:
    """Triple-Dirichlet kernel: coefficients c (length 2m+1, centered), widths, kappa."""

    m: int
    widths: tuple[int, int, int]
    c: np.ndarray
    kappa: float

    @property
    def lags(self) -> np.ndarray:
        """Centered coefficient indices -m..m."""
        return np.arange(-self.m, self.m + 1)


def dirichlet_eval(m_tilde: int, f, order: int = 0):
    """Dirichlet kernel D_m(f) = sin((2m+1) pi f) / ((2m+1) sin(pi f)) or derivatives.

    Evaluated via its Fourier series so that all orders share one code path;
    at f = 0 (mod 1) the analytic limits are produced automatically by the
    coefficient sum (1 for order 0, -4 pi^2 m(m+1)/3 for order 2, 0 for odd).
    """
    if order not in (0, 1, 2, 3):
        raise ValueError("order must be in 0..3")
    if m_tilde < 0:
        raise ValueError("m_tilde must be nonnegative")
    f = np.asarray(f, dtype=float)
    l = np.arange(-m_tilde, m_tilde + 1)
    w = (2j * np.pi * l) ** order / (2 * m_tilde + 1)
    val = np.exp(2j * np.pi * np.multiply.outer(f, l)) @ w
    if order % 2 == 0:
        val = val.real
    return val if val.ndim else val[()]


def build_kernel(m: int) -> KernelSpec:
    """Build the triple-Dirichlet kernel of half-length m.

    Widths are m1 = round(0.247 m), m2 = round(0.339 m), m3 = m - m1 - m2,
    so the convolution of the three rectangles has length exactly 2m + 1.
    """
    m1 = round(0.247 * m)
    m2 = round(0.339 * m)
    m3 = m - m1 - m2
    if min(m1, m2, m3) < 1:
        raise ValueError(f"m = {m} too small for three positive widths")
    c = np.ones(2 * m1 + 1) / (2 * m1 + 1)
    for mi in (m2, m3):
        c = np.convolve(c, np.ones(2 * mi + 1) / (2 * mi + 1))
    assert c.size == 2 * m + 1
    l = np.arange(-m, m + 1)
    # K''(0) = -sum_l (2 pi l)^2 c_l
    d2 = -np.sum((2.0 * np.pi * l) ** 2 * c)
    kappa = 1.0 / np.sqrt(abs(d2))
    return KernelSpec(m, (m1, m2, m3), c, kappa)


def _masked_coeffs(spec: KernelSpec, mask) -> np.ndarray:
    c = spec.c
    if mask is None:
        return c
    mask = np.asarray(list(mask), dtype=int)
    if mask.size:
        if mask.min() < -spec.m or mask.max() > spec.m:
            raise ValueError("mask indices must lie in -m..m")
        c = c.copy()
        c[mask + spec.m] = 0.0
    return c


def kernel_eval(spec: KernelSpec, f, order: int = 0, mask=None):
    """Evaluate K^{(order)}(f) = sum_{l not in mask} (i 2 pi l)^order c_l e^{i 2 pi l f}.

    ``mask`` is an optional set of centered indices in -m..m whose coefficients
    are zeroed. The unmasked call gives the deterministic kernel.
    """
    if order not in (0, 1, 2, 3):
        raise ValueError("order must be in 0..3")
    f = np.asarray(f, dtype=float)
    c = _masked_coeffs(spec, mask)
    l = spec.lags
    w = (2j * np.pi * l) ** order * c
    val = np.exp(2j * np.pi * np.multiply.outer(f, l)) @ w
    return val if val.ndim else val[()]


def kernel_eval_grid(spec: KernelSpec, grid_size: int, order: int = 0, mask=None) -> np.ndarray:
    """Evaluate the (masked) kernel on the uniform grid j/grid_size via FFT."""
    if grid_size < 2 * spec.m + 1:
        raise ValueError("grid_size must be at least 2m+1")
    c = _masked_coeffs(spec, mask)
    w = (2j * np.pi * spec.lags) ** order * c
    buf = np.zeros(grid_size, dtype=complex)
    for lag, wl in zip(spec.lags, w):
        buf[lag % grid_size] += wl
    # e^{i 2 pi l f} on f = j/N is an inverse DFT without the 1/N factor
    return np.fft.ifft(buf) * grid_size
