"""Command-line interface.

Subcommands: synth, demix, denoise, greedy, certificate, baseline, grid,
picket. Exit codes: 0 success, 2 bad configuration, 3 solver non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .admm import AdmmConfig, admm_solve
from .baselines import PeriodogramConfig, music, periodogram
from .certificate import certificate_for_instance
from .decode import decode_supports, run_demix
from .greedy import GreedyConfig, greedy_demix
from .grid import ExperimentGrid, run_grid
from .model import Instance, generate_instance, picket_fence, recovery_score

EXIT_OK = 0
EXIT_BAD_CONFIG = 2
EXIT_NO_CONVERGENCE = 3


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _load_instance(path: str) -> Instance:
    with open(path) as fh:
        return Instance.from_json(fh.read())


def _lam_value(text: str, n: int) -> float:
    if text == "auto":
        return 1.0 / math.sqrt(n)
    return float(text)


def _score_dict(score) -> dict:
    return {
        "relative_mse": float(score.relative_mse),
        "support_hausdorff": float(score.support_hausdorff),
        "spikes_matched": bool(score.spikes_matched),
        "exact_demix": bool(score.exact_demix),
    }


def _estimates_dict(spectrum, spikes) -> dict:
    return {
        "spectrum": [
            {"f": float(f), "re": float(x.real), "im": float(x.imag)}
            for f, x in zip(spectrum.frequencies, spectrum.amplitudes)
        ],
        "spikes": [
            {"l": int(l), "re": float(z.real), "im": float(z.imag)}
            for l, z in zip(spikes.indices, spikes.amplitudes)
        ],
    }


def cmd_synth(args) -> int:
    inst = generate_instance(
        args.n, args.k, args.s, args.delta_min, amp_law=args.amp_law,
        noise_level=args.noise_level, seed=args.seed, spike_mode=args.spike_mode,
    )
    _emit(inst.to_json(), args.out)
    return EXIT_OK


def cmd_demix(args) -> int:
    inst = _load_instance(getattr(args, "in"))
    lam = _lam_value(args.lam, inst.n)
    result = run_demix(inst.y, lam=lam)
    doc = {
        "lambda": lam,
        "estimates": _estimates_dict(result.spectrum, result.spikes),
        "eta": [[float(v.real), float(v.imag)] for v in result.eta],
        "solver": result.solve.to_dict(),
        "score": _score_dict(recovery_score(inst, result.spectrum, result.spikes)),
    }
    _emit(json.dumps(doc, indent=2), args.out)
    return EXIT_OK if result.solve.converged else EXIT_NO_CONVERGENCE


def cmd_denoise(args) -> int:
    inst = _load_instance(getattr(args, "in"))
    lam = _lam_value(args.lam, inst.n)
    if args.gamma == "auto":
        sigma = float(np.linalg.norm(inst.dense_noise))
        if sigma == 0.0:
            print("gamma auto needs an instance with dense noise", file=sys.stderr)
            return EXIT_BAD_CONFIG
        gamma = 1.0 / sigma
    else:
        gamma = float(args.gamma)
    report = admm_solve(inst.y, AdmmConfig(lam=lam, gamma=gamma))
    doc = {
        "lambda": lam, "gamma": gamma,
        "g_hat": [[float(v.real), float(v.imag)] for v in report.g_hat],
        "z_hat": [[float(v.real), float(v.imag)] for v in report.z_hat],
        "solver": report.to_dict(),
    }
    _emit(json.dumps(doc, indent=2), args.out)
    return EXIT_OK if report.converged else EXIT_NO_CONVERGENCE


def cmd_greedy(args) -> int:
    inst = _load_instance(getattr(args, "in"))
    cfg = GreedyConfig(tau=args.tau, local_opt=not args.no_local_opt)
    result = greedy_demix(inst.y, cfg)
    doc = {
        "estimates": _estimates_dict(result.spectrum, result.spikes),
        "residual_norm": result.residual_norm,
        "iterations": result.iterations,
        "converged": result.converged,
        "trace": result.trace,
        "score": _score_dict(recovery_score(inst, result.spectrum, result.spikes)),
    }
    _emit(json.dumps(doc, indent=2), args.out)
    return EXIT_OK if result.converged else EXIT_NO_CONVERGENCE


def cmd_certificate(args) -> int:
    inst = _load_instance(getattr(args, "in"))
    lam = _lam_value(args.lam, inst.n)
    _, report = certificate_for_instance(inst, lam=lam, grid_size=args.grid_size)
    _emit(json.dumps(report.to_dict(), indent=2), args.out)
    return EXIT_OK


def cmd_baseline(args) -> int:
    inst = _load_instance(getattr(args, "in"))
    if args.method == "periodogram":
        grid, spec, peaks = periodogram(inst.y, PeriodogramConfig(window=args.window))
        if args.format == "csv":
            lines = ["f,magnitude"] + [
                f"{format(f, '.17g')},{format(v, '.17g')}" for f, v in zip(grid, spec)
            ]
            _emit("\r\n".join(lines) + "\r\n", args.out)
        else:
            _emit(json.dumps({"peaks": [float(p) for p in peaks]}, indent=2), args.out)
    else:
        if args.k is None:
            print("music requires --k", file=sys.stderr)
            return EXIT_BAD_CONFIG
        freqs = music(inst.y, args.k)
        _emit(json.dumps({"frequencies": [float(f) for f in freqs]}, indent=2), args.out)
    return EXIT_OK


def cmd_grid(args) -> int:
    with open(args.config) as fh:
        grid = ExperimentGrid.from_json(fh.read())
    result = run_grid(grid, workers=args.workers)
    if args.format == "csv":
        _emit(result.to_csv(), args.out)
    else:
        _emit(json.dumps(result.to_dict(), indent=2), args.out)
    return EXIT_OK


def cmd_picket(args) -> int:
    inst = picket_fence(args.n)
    result = run_demix(inst.y)
    doc = {
        "y_max_abs": float(np.max(np.abs(inst.y.y))),
        "estimates": _estimates_dict(result.spectrum, result.spikes),
        "exact_demix": recovery_score(inst, result.spectrum, result.spikes).exact_demix,
    }
    _emit(json.dumps(doc, indent=2), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="linedemix",
                                description="Robust spectral super-resolution toolbox")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", default=None, help="output file (default stdout)")
        sp.add_argument("--format", choices=["csv", "json"], default="json")

    sp = sub.add_parser("synth", help="generate a random instance")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--delta-min", type=float, required=True)
    sp.add_argument("--amp-law", choices=["unit", "gaussian"], default="unit")
    sp.add_argument("--noise-level", type=float, default=0.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--spike-mode", choices=["fixed", "bernoulli"], default="fixed")
    common(sp)
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("demix", help="equality-constrained demixing via ADMM")
    sp.add_argument("--in", required=True, help="instance JSON file")
    sp.add_argument("--lambda", dest="lam", default="auto")
    common(sp)
    sp.set_defaults(func=cmd_demix)

    sp = sub.add_parser("denoise", help="atomic-norm denoising via ADMM")
    sp.add_argument("--in", required=True)
    sp.add_argument("--lambda", dest="lam", default="auto")
    sp.add_argument("--gamma", default="auto")
    common(sp)
    sp.set_defaults(func=cmd_denoise)

    sp = sub.add_parser("greedy", help="greedy demixing")
    sp.add_argument("--in", required=True)
    sp.add_argument("--tau", type=float, default=None)
    sp.add_argument("--no-local-opt", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_greedy)

    sp = sub.add_parser("certificate", help="construct and verify a dual certificate")
    sp.add_argument("--in", required=True)
    sp.add_argument("--lambda", dest="lam", default="auto")
    sp.add_argument("--grid-size", type=int, default=None)
    common(sp)
    sp.set_defaults(func=cmd_certificate)

    sp = sub.add_parser("baseline", help="periodogram or MUSIC")
    sp.add_argument("--in", required=True)
    sp.add_argument("--method", choices=["periodogram", "music"], required=True)
    sp.add_argument("--window", choices=["none", "hann", "hamming"], default="none")
    sp.add_argument("--k", type=int, default=None)
    common(sp)
    sp.set_defaults(func=cmd_baseline)

    sp = sub.add_parser("grid", help="run a phase-transition grid")
    sp.add_argument("--config", required=True, help="grid configuration JSON")
    sp.add_argument("--workers", type=int, default=None)
    common(sp)
    sp.set_defaults(func=cmd_grid)

    sp = sub.add_parser("picket", help="adversarial picket-fence demo")
    sp.add_argument("--n", type=int, default=16)
    common(sp)
    sp.set_defaults(func=cmd_picket)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except FloatingPointError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
