"""Time the compiled and numpy kernels on representative workloads.

    python3 benchmarks/bench_backends.py [--repeat 5]

Workloads: one finite-difference training step's worth of barycenter solves
(15 parameter sets x 64 messages x 3 discs, 8 words each) and the hyperbolic
GloVe energy plus gradient for a 300-word vocabulary.
"""

import argparse
import timeit

import numpy as np

from embolic import _backend
from embolic.disc import RETRACT_RADIUS
from embolic.sampling import MoebiusDistribution, make_rng, sample


def workloads(rng):
    rows, width = 15 * 64 * 3, 8
    z = sample(MoebiusDistribution(0j, 3.0), rows * width, rng).reshape(rows, width)
    w = rng.random((rows, width))
    w /= w.sum(axis=1, keepdims=True)
    n = 300
    u = sample(MoebiusDistribution(0j, 10.0), n, rng)
    m = rng.random((n, 6))
    m /= np.linalg.norm(m, axis=1, keepdims=True)
    S = np.clip(m @ m.T, 0.0, 1.0)
    return {
        "barycenter_batch (2880 rows)": lambda core: core.barycenter_batch(
            z, w, 1e-11, 500, 0.1, 0.5, 1e-4, RETRACT_RADIUS, None
        ),
        "glove_objective+grad (V=300)": lambda core: core.glove_objective(S, u, 2.0, 0.01, True),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    names = _backend.available()
    cores = {name: _backend.load(name) for name in names}
    print(f"{'workload':<32}" + "".join(f"{n + ' [ms]':>16}" for n in names) + f"{'speedup':>10}")
    for label, fn in workloads(make_rng(0)).items():
        best = {}
        for name, core in cores.items():
            fn(core)  # warm up
            best[name] = min(timeit.repeat(lambda: fn(core), number=1, repeat=args.repeat)) * 1e3
        speed = best["python"] / best["cython"] if "cython" in best else float("nan")
        print(f"{label:<32}" + "".join(f"{best[n]:>16.2f}" for n in names) + f"{speed:>9.1f}x")
    if "cython" not in cores:
        print("compiled core not built; only the numpy fallback was timed")


if __name__ == "__main__":
    main()
