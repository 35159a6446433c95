"""Signal model: line spectra, sparse spikes, instance generation and scoring.

The measurement model is ``y_l = sum_j x_j exp(i 2 pi f_j l) + z_l + w_l``
for sample indices ``l = 1..n``, with frequencies on the unit circle [0, 1),
a sparse outlier vector ``z`` and an optional dense perturbation ``w``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LineSpectrum",
    "SpikeVector",
    "Samples",
    "Instance",
    "RecoveryScore",
    "InfeasibleSeparationError",
    "SupportSamplingError",
    "forward",
    "min_separation",
    "wrap_distance",
    "hausdorff_distance",
    "generate_instance",
    "picket_fence",
    "recovery_score",
]


class InfeasibleSeparationError(ValueError):
    """Requested separation cannot fit the requested number of lines."""


class SupportSamplingError(RuntimeError):
    """Rejection sampling of a frequency support exceeded the attempt cap."""


@dataclass(frozen=True)
class LineSpectrum:
    """Atomic measure on [0, 1): a list of (frequency, complex amplitude) pairs.

    Entries are kept sorted by frequency; frequencies must be distinct.
    """

    frequencies: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        f = np.atleast_1d(np.asarray(self.frequencies, dtype=float))
        x = np.atleast_1d(np.asarray(self.amplitudes, dtype=complex))
        if f.shape != x.shape:
            raise ValueError("frequencies and amplitudes must have equal length")
        if f.size and (np.any(f < 0.0) or np.any(f >= 1.0)):
            raise ValueError("frequencies must lie in [0, 1)")
        order = np.argsort(f, kind="stable")
        f, x = f[order], x[order]
        if f.size > 1 and np.any(np.diff(f) == 0.0):
            raise ValueError("frequencies must be pairwise distinct")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "amplitudes", x)

    def __len__(self) -> int:
        return self.frequencies.size

    @classmethod
    def empty(cls) -> "LineSpectrum":
        return cls(np.empty(0), np.empty(0, dtype=complex))


@dataclass(frozen=True)
class SpikeVector:
    """Sparse corruption of the samples: nonzero amplitudes at indices in 1..n."""

    n: int
    indices: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        idx = np.atleast_1d(np.asarray(self.indices, dtype=int))
        amp = np.atleast_1d(np.asarray(self.amplitudes, dtype=complex))
        if idx.shape != amp.shape:
            raise ValueError("indices and amplitudes must have equal length")
        if idx.size and (idx.min() < 1 or idx.max() > self.n):
            raise ValueError("spike indices must lie in 1..n")
        keep = amp != 0
        idx, amp = idx[keep], amp[keep]
        order = np.argsort(idx)
        idx, amp = idx[order], amp[order]
        if idx.size > 1 and np.any(np.diff(idx) == 0):
            raise ValueError("spike indices must be distinct")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "amplitudes", amp)

    def __len__(self) -> int:
        return self.indices.size

    def dense(self) -> np.ndarray:
        z = np.zeros(self.n, dtype=complex)
        z[self.indices - 1] = self.amplitudes
        return z

    @classmethod
    def empty(cls, n: int) -> "SpikeVector":
        return cls(n, np.empty(0, dtype=int), np.empty(0, dtype=complex))

    @classmethod
    def from_dense(cls, z: np.ndarray, tol: float = 0.0) -> "SpikeVector":
        z = np.asarray(z, dtype=complex)
        idx = np.flatnonzero(np.abs(z) > tol) + 1
        return cls(z.size, idx, z[idx - 1])


@dataclass(frozen=True)
class Samples:
    """The observed data vector of length n >= 2."""

    y: np.ndarray

    def __post_init__(self):
        y = np.atleast_1d(np.asarray(self.y, dtype=complex))
        if y.size < 2:
            raise ValueError("need at least two samples")
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.y.size


@dataclass(frozen=True)
class Instance:
    """A generated problem: spectrum + spikes + dense noise and the data y."""

    spectrum: LineSpectrum
    spikes: SpikeVector
    dense_noise: np.ndarray
    y: Samples
    seed: int | None = None
    params: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.y.n

    def clean_samples(self) -> np.ndarray:
        """The uncorrupted multisinusoidal samples g."""
        return forward(self.spectrum, self.n)

    def to_json(self) -> str:
        doc = {
            "n": self.n,
            "spectrum": [
                {"f": float(f), "re": float(x.real), "im": float(x.imag)}
                for f, x in zip(self.spectrum.frequencies, self.spectrum.amplitudes)
            ],
            "spikes": [
                {"l": int(l), "re": float(z.real), "im": float(z.imag)}
                for l, z in zip(self.spikes.indices, self.spikes.amplitudes)
            ],
            "noise": [[float(w.real), float(w.imag)] for w in self.dense_noise],
            "seed": self.seed,
            "params": self.params,
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Instance":
        doc = json.loads(text)
        n = int(doc["n"])
        spectrum = LineSpectrum(
            np.array([e["f"] for e in doc["spectrum"]], dtype=float),
            np.array([complex(e["re"], e["im"]) for e in doc["spectrum"]]),
        )
        spikes = SpikeVector(
            n,
            np.array([e["l"] for e in doc["spikes"]], dtype=int),
            np.array([complex(e["re"], e["im"]) for e in doc["spikes"]]),
        )
        noise = np.array([complex(re, im) for re, im in doc["noise"]])
        y = forward(spectrum, n) + spikes.dense() + noise
        return cls(spectrum, spikes, noise, Samples(y), doc.get("seed"), doc.get("params", {}))


def forward(spectrum: LineSpectrum, n: int) -> np.ndarray:
    """Map a line spectrum to its samples g(l) = sum_j x_j e^{i 2 pi f_j l}, l=1..n."""
    if n < 1:
        raise ValueError("n must be positive")
    if len(spectrum) == 0:
        return np.zeros(n, dtype=complex)
    t = np.arange(1, n + 1)
    return np.exp(2j * np.pi * np.outer(t, spectrum.frequencies)) @ spectrum.amplitudes


def wrap_distance(f1, f2):
    """Wrap-around distance on the unit circle."""
    d = np.abs(np.asarray(f1) - np.asarray(f2)) % 1.0
    return np.minimum(d, 1.0 - d)


def min_separation(frequencies) -> float:
    """Smallest wrap-around distance between any two points; inf if < 2 points."""
    f = np.sort(np.unique(np.asarray(list(frequencies), dtype=float) % 1.0))
    if f.size <= 1:
        return np.inf
    gaps = np.diff(f)
    wrap = 1.0 - (f[-1] - f[0])
    return float(min(gaps.min(), wrap))


def hausdorff_distance(f_a, f_b) -> float:
    """Wrap-around Hausdorff distance between two frequency sets.

    Empty vs nonempty gives the maximum wrap distance 0.5; empty vs empty is 0.
    """
    a = np.asarray(list(f_a), dtype=float)
    b = np.asarray(list(f_b), dtype=float)
    if a.size == 0 and b.size == 0:
        return 0.0
    if a.size == 0 or b.size == 0:
        return 0.5
    d = wrap_distance(a[:, None], b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


_MAX_ATTEMPTS = 10**6


def _sample_support(rng: np.random.Generator, k: int, delta_min: float) -> np.ndarray:
    """Sequential rejection sampling of k frequencies with wrap spacing >= delta_min."""
    accepted: list[float] = []
    attempts = 0
    while len(accepted) < k:
        attempts += 1
        if attempts > _MAX_ATTEMPTS:
            raise SupportSamplingError(
                f"could not place {k} frequencies at separation {delta_min} "
                f"within {_MAX_ATTEMPTS} attempts"
            )
        f = float(rng.uniform())
        if all(wrap_distance(f, g) >= delta_min for g in accepted):
            accepted.append(f)
    return np.array(sorted(accepted))


def _sample_amplitudes(rng: np.random.Generator, size: int, amp_law: str) -> np.ndarray:
    phases = rng.uniform(0.0, 2.0 * np.pi, size)
    if amp_law == "unit":
        mags = np.ones(size)
    elif amp_law == "gaussian":
        # complex Gaussian magnitude with uniform phase
        mags = np.abs(rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2.0)
    else:
        raise ValueError(f"unknown amplitude law: {amp_law!r}")
    return mags * np.exp(1j * phases)


def generate_instance(
    n: int,
    k: int,
    s: int,
    delta_min: float,
    amp_law: str = "unit",
    noise_level: float = 0.0,
    seed: int = 0,
    spike_mode: str = "fixed",
) -> Instance:
    """Draw a random instance with separated support and uniform random phases.

    ``spike_mode`` is either "fixed" (exactly s outliers) or "bernoulli"
    (each sample corrupted independently with probability s/n).
    """
    if s > n:
        raise ValueError("cannot place more spikes than samples")
    if k > 0 and k * delta_min >= 1.0:
        raise InfeasibleSeparationError(
            f"k * delta_min = {k * delta_min:.4g} >= 1: no support exists"
        )
    rng = np.random.default_rng(seed)

    freqs = _sample_support(rng, k, delta_min) if k else np.empty(0)
    amps = _sample_amplitudes(rng, k, amp_law)
    spectrum = LineSpectrum(freqs, amps)

    if spike_mode == "fixed":
        idx = np.sort(rng.choice(n, size=s, replace=False)) + 1 if s else np.empty(0, dtype=int)
    elif spike_mode == "bernoulli":
        idx = np.flatnonzero(rng.uniform(size=n) < s / n) + 1
    else:
        raise ValueError(f"unknown spike mode: {spike_mode!r}")
    spikes = SpikeVector(n, idx, _sample_amplitudes(rng, idx.size, amp_law))

    if noise_level > 0.0:
        w = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        w *= noise_level / np.linalg.norm(w)
    else:
        w = np.zeros(n, dtype=complex)

    y = forward(spectrum, n) + spikes.dense() + w
    params = {
        "n": n, "k": k, "s": s, "delta_min": delta_min, "amp_law": amp_law,
        "noise_level": noise_level, "spike_mode": spike_mode,
    }
    return Instance(spectrum, spikes, w, Samples(y), seed, params)


def picket_fence(n: int) -> Instance:
    """The adversarial equispaced instance whose measurements are all zero.

    Requires n to be a perfect square; with kp = sqrt(n) the spectrum has kp
    equispaced unit-weight lines and the spikes cancel every nonzero sample.
    """
    kp = round(np.sqrt(n))
    if kp < 2 or kp * kp != n:
        raise ValueError(f"picket fence needs a perfect square n >= 4, got {n}")
    freqs = np.arange(kp) / kp
    amps = np.full(kp, 1.0 / kp, dtype=complex)
    spectrum = LineSpectrum(freqs, amps)
    idx = np.arange(kp, n + 1, kp)
    spikes = SpikeVector(n, idx, -np.ones(kp, dtype=complex))
    w = np.zeros(n, dtype=complex)
    # the clean samples are exactly 1 at multiples of kp and 0 elsewhere, so
    # the spikes cancel them bit-exactly; avoid the rounding of the float sum
    y = np.zeros(n, dtype=complex)
    return Instance(spectrum, spikes, w, Samples(y), None, {"n": n, "kind": "picket_fence"})


@dataclass(frozen=True)
class RecoveryScore:
    relative_mse: float
    support_hausdorff: float
    spikes_matched: bool
    exact_demix: bool


def recovery_score(
    truth: Instance,
    est_spectrum: LineSpectrum,
    est_spikes: SpikeVector,
    freq_tol: float | None = None,
) -> RecoveryScore:
    """Score an estimate against the ground truth of an instance.

    Exact demixing means relative MSE below 1e-8 on the clean samples plus
    frequency support matched within ``freq_tol`` (default 1e-4/n) and the
    spike support recovered exactly.
    """
    n = truth.n
    if est_spikes.n != n:
        raise ValueError("estimate dimension does not match the instance")
    if freq_tol is None:
        freq_tol = 1e-4 / n

    g = truth.clean_samples()
    g_hat = forward(est_spectrum, n)
    norm_g = np.linalg.norm(g)
    err = np.linalg.norm(g - g_hat)
    if norm_g > 0:
        rel_mse = float(err / norm_g)
    else:
        rel_mse = 0.0 if err == 0 else np.inf

    haus = hausdorff_distance(truth.spectrum.frequencies, est_spectrum.frequencies)
    freqs_ok = (
        len(truth.spectrum) == len(est_spectrum) and haus < freq_tol
    )
    spikes_ok = (
        len(truth.spikes) == len(est_spikes)
        and np.array_equal(truth.spikes.indices, est_spikes.indices)
    )
    exact = bool(rel_mse < 1e-8 and freqs_ok and spikes_ok)
    return RecoveryScore(rel_mse, haus, spikes_ok, exact)
