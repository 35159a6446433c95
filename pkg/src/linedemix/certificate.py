"""Dual certificate construction and verification.

A dual polynomial Q(f) = sum_u q_u e^{-i 2 pi u f} certifies exact demixing
when it interpolates the spectral sign pattern on the frequency support, its
coefficients equal lambda times the spike sign pattern on the spike support,
and it stays strictly below the respective bounds everywhere else.

Index conventions. Samples are indexed l = 1..n; the certificate lives in a
centered frame u = l - (m + 1) in -m..m with m = (n - 1)/2 (n odd). Switching
frames multiplies spectral amplitudes by e^{i 2 pi (m+1) f_j} and reindexes
spikes; polynomial magnitudes are unchanged, so validity is frame independent.
The interpolation kernel used to build the polynomial has its coefficients
zeroed on the REFLECTED spike support {-u : u in centered support}: the
coefficient of e^{-i 2 pi u f} in K(f - f_j) comes from the kernel coefficient
at -u, so zeroing the reflection frees exactly the slots that must be pinned
to lambda times the spike signs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import KernelSpec, build_kernel, kernel_eval
from .model import Instance, wrap_distance

__all__ = [
    "DualPolynomial",
    "InterpSystem",
    "CertificateReport",
    "half_length",
    "centered_spike_indices",
    "modulated_signs",
    "build_system",
    "construct_certificate",
    "clean_certificate",
    "verify_certificate",
    "certificate_for_instance",
]


def half_length(n: int) -> int:
    """Half-length m of the coefficient range: (n-1)/2 for odd n, n/2 - 1 for even."""
    return (n - 1) // 2 if n % 2 == 1 else n // 2 - 1


def centered_spike_indices(omega, n: int) -> np.ndarray:
    """Translate sample indices in 1..n to centered indices l - (m+1)."""
    omega = np.asarray(list(omega), dtype=int)
    return np.sort(omega - (half_length(n) + 1))


def modulated_signs(instance: Instance) -> tuple[np.ndarray, np.ndarray]:
    """Sign patterns (h, r) of an instance in the centered frame."""
    m = half_length(instance.n)
    x = instance.spectrum.amplitudes
    f = instance.spectrum.frequencies
    h = x / np.abs(x) * np.exp(2j * np.pi * (m + 1) * f) if x.size else x.copy()
    z = instance.spikes.amplitudes
    r = z / np.abs(z) if z.size else z.copy()
    return h, r


@dataclass(frozen=True)
class DualPolynomial:
    """Coefficients q indexed -m..m (centered) and the regularization weight."""

    q: np.ndarray
    lam: float

    def __post_init__(self):
        q = np.asarray(self.q, dtype=complex)
        if q.size % 2 == 0:
            raise ValueError("coefficient vector must have odd length 2m+1")
        object.__setattr__(self, "q", q)

    @property
    def m(self) -> int:
        return (self.q.size - 1) // 2

    @property
    def lags(self) -> np.ndarray:
        return np.arange(-self.m, self.m + 1)

    def eval(self, f, order: int = 0):
        """Q^{(order)}(f) with Q(f) = sum_u q_u e^{-i 2 pi u f}."""
        f = np.asarray(f, dtype=float)
        w = (-2j * np.pi * self.lags) ** order * self.q
        val = np.exp(-2j * np.pi * np.multiply.outer(f, self.lags)) @ w
        return val if val.ndim else val[()]

    def eval_grid(self, grid_size: int, order: int = 0) -> np.ndarray:
        """Q^{(order)} on the uniform grid j/grid_size, j = 0..grid_size-1."""
        if grid_size < self.q.size:
            raise ValueError("grid_size must be at least 2m+1")
        w = (-2j * np.pi * self.lags) ** order * self.q
        buf = np.zeros(grid_size, dtype=complex)
        for lag, wl in zip(self.lags, w):
            buf[(-lag) % grid_size] += wl
        return np.fft.ifft(buf) * grid_size

    def sample_frame(self) -> np.ndarray:
        """Coefficients reindexed to sample order: position l-1 holds q_{l-(m+1)}."""
        return self.q.copy()


@dataclass(frozen=True)
class InterpSystem:
    """The 2k x 2k interpolation system and its spike coupling."""

    D0: np.ndarray
    D1: np.ndarray
    D2: np.ndarray
    B_omega: np.ndarray
    T: np.ndarray
    omega_centered: np.ndarray

    @property
    def D(self) -> np.ndarray:
        return np.block([[self.D0, self.D1], [-self.D1, self.D2]])


@dataclass(frozen=True)
class CertificateReport:
    interpolation_err: float
    derivative_err: float
    offsupport_max: float
    q_on_omega_err: float
    q_off_omega_max: float
    concavity_ok: bool
    valid: bool

    def to_dict(self) -> dict:
        return {
            "interpolation_err": self.interpolation_err,
            "derivative_err": self.derivative_err,
            "offsupport_max": self.offsupport_max,
            "q_on_omega_err": self.q_on_omega_err,
            "q_off_omega_max": self.q_off_omega_max,
            "concavity_ok": self.concavity_ok,
            "valid": self.valid,
        }


def _check_odd(n: int):
    if n % 2 == 0:
        raise ValueError("certificate construction requires an odd sample count")


def spike_basis(omega_centered, freqs, kappa: float) -> np.ndarray:
    """Matrix with columns b(u) = [e^{-i2pi u f_j}; i 2 pi u kappa e^{-i2pi u f_j}]."""
    u = np.asarray(omega_centered, dtype=int)
    phase = np.exp(-2j * np.pi * np.outer(freqs, u))
    return np.vstack([phase, 1j * 2.0 * np.pi * u * kappa * phase])


def build_system(spec: KernelSpec, T, omega, n: int) -> InterpSystem:
    """Assemble the interpolation matrices for support T and spike set omega.

    ``omega`` holds sample indices in 1..n; the kernel mask is the reflected
    centered set. With empty omega the system reduces to the clean one.
    """
    _check_odd(n)
    freqs = np.asarray(list(T), dtype=float)
    if freqs.size < 1:
        raise ValueError("frequency support must be nonempty")
    omega_c = centered_spike_indices(omega, n)
    mask = -omega_c if omega_c.size else None

    diff = freqs[:, None] - freqs[None, :]
    K0 = kernel_eval(spec, diff.ravel(), 0, mask).reshape(diff.shape)
    K1 = kernel_eval(spec, diff.ravel(), 1, mask).reshape(diff.shape)
    K2 = kernel_eval(spec, diff.ravel(), 2, mask).reshape(diff.shape)
    D0 = K0
    D1 = spec.kappa * K1
    D2 = -spec.kappa**2 * K2
    B = spike_basis(omega_c, freqs, spec.kappa)
    return InterpSystem(D0, D1, D2, B, freqs, omega_c)


class SingularSystemError(np.linalg.LinAlgError):
    def __init__(self, smin: float):
        super().__init__(f"interpolation system is singular (smallest singular value {smin:.3e})")
        self.smallest_singular_value = smin


def construct_certificate(
    system: InterpSystem,
    h: np.ndarray,
    r: np.ndarray,
    lam: float,
    spec: KernelSpec,
) -> DualPolynomial:
    """Solve for the interpolation coefficients and assemble the dual polynomial.

    ``h`` and ``r`` are the centered-frame sign patterns on T and omega. The
    returned coefficients satisfy q = lam * r exactly on the spike support.
    """
    k = system.T.size
    h = np.asarray(h, dtype=complex)
    r = np.asarray(r, dtype=complex)
    if h.size != k or r.size != system.omega_centered.size:
        raise ValueError("sign pattern sizes do not match the system")

    D = system.D
    smin = np.linalg.svd(D, compute_uv=False)[-1]
    if smin <= 1e-10:
        raise SingularSystemError(float(smin))
    rhs = np.concatenate([h, np.zeros(k)]) - lam * (system.B_omega @ r)
    ab = np.linalg.solve(D, rhs)
    alpha, beta = ab[:k], ab[k:]

    m = spec.m
    u = np.arange(-m, m + 1)
    phase = np.exp(2j * np.pi * np.outer(u, system.T))
    q = spec.c * (phase @ alpha - 1j * 2.0 * np.pi * spec.kappa * u * (phase @ beta))
    if system.omega_centered.size:
        q[system.omega_centered + m] = lam * r
    return DualPolynomial(q, lam)


def clean_certificate(spec: KernelSpec, T, h) -> DualPolynomial:
    """Certificate for uncorrupted data: unmasked kernel, no spike constraints."""
    freqs = np.asarray(list(T), dtype=float)
    n = 2 * spec.m + 1
    system = build_system(spec, freqs, [], n)
    return construct_certificate(system, h, np.empty(0, dtype=complex), 1.0, spec)


def verify_certificate(
    poly: DualPolynomial,
    T,
    omega,
    n: int,
    h=None,
    r=None,
    grid_size: int | None = None,
    guard_radius: float | None = None,
    tol_interp: float = 1e-8,
    margin: float = 1e-6,
) -> CertificateReport:
    """Check the validity conditions of a dual polynomial on a fine grid.

    The off-support supremum is taken on the grid excluding guard intervals of
    radius ``guard_radius`` around each support frequency, plus a concavity
    check of |Q|^2 at each frequency. When the sign patterns ``h``/``r`` are
    omitted, the on-support errors are measured against unit modulus only.
    """
    freqs = np.asarray(list(T), dtype=float)
    omega_c = centered_spike_indices(omega, n) if len(list(omega)) else np.empty(0, dtype=int)
    if grid_size is None:
        grid_size = 10_000 * n
    if guard_radius is None:
        guard_radius = 1e-3 / n

    if freqs.size:
        qvals = poly.eval(freqs)
        if h is not None:
            interp_err = float(np.max(np.abs(qvals - np.asarray(h))))
        else:
            interp_err = float(np.max(np.abs(np.abs(qvals) - 1.0)))
        # derivative error scaled by ~kappa so it is comparable to |Q| values
        deriv_err = float(np.max(np.abs(poly.eval(freqs, 1))) / (2.0 * np.pi * max(poly.m, 1)))
    else:
        interp_err = 0.0
        deriv_err = 0.0

    grid = np.arange(grid_size) / grid_size
    mags = np.abs(poly.eval_grid(grid_size))
    # |Q| tends to 1 smoothly at each support point, so the strictness margin
    # can only be demanded away from the support; in the annulus between the
    # guard radius and far_radius the bound is checked without margin
    far_radius = max(guard_radius, 0.02 / n)
    if freqs.size:
        dist = wrap_distance(grid[:, None], freqs[None, :]).min(axis=1)
        off = dist > guard_radius
        far = dist > far_radius
    else:
        off = far = np.ones(grid_size, dtype=bool)
    offsupport_max = float(mags[off].max()) if off.any() else 0.0
    far_max = float(mags[far].max()) if far.any() else 0.0
    near_max = float(mags[off & ~far].max()) if (off & ~far).any() else 0.0

    concavity_ok = True
    if freqs.size:
        step = 1e-4 / n
        for f in freqs:
            sq = np.abs(poly.eval(np.array([f - step, f, f + step]))) ** 2
            if sq[0] - 2.0 * sq[1] + sq[2] >= 0.0:
                concavity_ok = False

    if omega_c.size:
        q_on = poly.q[omega_c + poly.m]
        if r is not None:
            q_on_err = float(np.max(np.abs(q_on - poly.lam * np.asarray(r))))
        else:
            q_on_err = float(np.max(np.abs(np.abs(q_on) - poly.lam)))
    else:
        q_on_err = 0.0
    off_idx = np.setdiff1d(np.arange(-poly.m, poly.m + 1), omega_c)
    q_off_max = float(np.max(np.abs(poly.q[off_idx + poly.m]))) if off_idx.size else 0.0

    valid = bool(
        interp_err < tol_interp
        and far_max < 1.0 - margin
        and near_max < 1.0
        and q_on_err == 0.0
        and q_off_max < poly.lam * (1.0 - margin)
        and concavity_ok
    )
    return CertificateReport(
        interp_err, deriv_err, offsupport_max, q_on_err, q_off_max, concavity_ok, valid
    )


def certificate_for_instance(
    instance: Instance,
    lam: float | None = None,
    spec: KernelSpec | None = None,
    grid_size: int | None = None,
) -> tuple[DualPolynomial, CertificateReport]:
    """Build and verify the certificate for a noiseless instance's supports."""
    n = instance.n
    _check_odd(n)
    if lam is None:
        lam = 1.0 / np.sqrt(n)
    if spec is None:
        spec = build_kernel(half_length(n))
    h, r = modulated_signs(instance)
    system = build_system(spec, instance.spectrum.frequencies, instance.spikes.indices, n)
    poly = construct_certificate(system, h, r, lam, spec)
    report = verify_certificate(
        poly, instance.spectrum.frequencies, instance.spikes.indices, n,
        h=h, r=r, grid_size=grid_size,
    )
    return poly, report
