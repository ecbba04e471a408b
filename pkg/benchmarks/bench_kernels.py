"""Time the compiled elliptical-beam kernel against the NumPy fallback.

    python3 benchmarks/bench_kernels.py [--n 200000] [--repeat 5]

Reports the best-of-``repeat`` wall time per backend and the largest
absolute difference between their outputs.
"""
from __future__ import annotations

import argparse
import math
import timeit
import warnings

import numpy as np

from atmoqkd import _pykernels, kernels
from atmoqkd.channel import derive_params, season_scenario
from atmoqkd.fading import beam_statistics, sample_beam_vectors


def _inputs(n: int, seed: int):
    sc = season_scenario("summer", distance=10e3)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        params = derive_params(sc)
    v = sample_beam_vectors(beam_statistics(params, sc.beam_waist), n, np.random.default_rng(seed))
    return (v["x0"], v["y0"], v["theta1"], v["theta2"], v["phi"], sc.aperture_radius, sc.beam_waist)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=200_000, help="beam vectors per call")
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    args_in = _inputs(args.n, args.seed)
    backends = {"python": _pykernels}
    try:
        backends["cython"] = kernels.get_backend("cython")
    except ImportError:
        print("compiled extension not available; timing the NumPy fallback only")

    results = {}
    for name, mod in backends.items():
        fn = mod.elliptical_transmittance
        fn(*args_in)  # warm-up
        best = min(timeit.repeat(lambda: fn(*args_in), number=1, repeat=args.repeat))
        results[name] = (best, fn(*args_in))
        print(f"{name:>7}: {best * 1e3:8.2f} ms  ({args.n / best / 1e6:6.2f} M samples/s)")

    if len(results) == 2:
        diff = float(np.max(np.abs(results["cython"][1] - results["python"][1])))
        speedup = results["python"][0] / results["cython"][0]
        print(f"speedup {speedup:.2f}x, max |difference| {diff:.2e}")
        if not math.isfinite(diff) or diff > 1e-12:
            print("WARNING: backends disagree beyond 1e-12")
            return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
