"""Robust spectral super-resolution: demixing sinusoids from sparse outliers.

The package provides the signal model and instance generators (:mod:`model`),
trigonometric interpolation kernels (:mod:`kernels`), dual-certificate
construction and verification (:mod:`certificate`), an ADMM solver for the
atomic-norm problems (:mod:`admm`), support decoding and the full demixing
pipeline (:mod:`decode`), a greedy continuous-dictionary method
(:mod:`greedy`), periodogram/MUSIC baselines (:mod:`baselines`), and a
seeded experiment harness (:mod:`grid`) with a CLI front end (:mod:`cli`).
"""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    Instance,
    LineSpectrum,
    Samples,
    SpikeVector,
    forward,
    generate_instance,
    min_separation,
    picket_fence,
    recovery_score,
)
