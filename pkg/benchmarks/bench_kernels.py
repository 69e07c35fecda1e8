"""Compare the compiled kernels against the numpy fallback.

Times the individual hot kernels and a full fit under each available
backend. Run from the repository root after installing the package:

    python benchmarks/bench_kernels.py [--n 20000] [--k 20] [--dim 2]
"""

import argparse
import time

import numpy as np

from kstarmeans import _core
from kstarmeans.dataset import Dataset
from kstarmeans.kstar import FitConfig, fit
from kstarmeans.synth import SynthSpec, generate


def _time(fn, repeats=5):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_backend(name, points, centroids, subcentroids, data):
    _core.use_backend(name)
    labels = _core.nearest_centroid(points, centroids)
    k = centroids.shape[0]
    rows = {
        "nearest_centroid": _time(lambda: _core.nearest_centroid(points, centroids)),
        "choose_subcluster": _time(lambda: _core.choose_subcluster(points, subcentroids, labels)),
        "cluster_stats": _time(lambda: _core.cluster_stats(points, labels, k)),
        "per_label_ss": _time(lambda: _core.per_label_ss(points, centroids, labels, k)),
        "fit": _time(lambda: fit(data, FitConfig(seed=7)), repeats=3),
    }
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=20000)
    parser.add_argument("--k", type=int, default=20)
    parser.add_argument("--dim", type=int, default=2)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    if args.dim == 2:
        instance = generate(SynthSpec(true_k=args.k, min_sep=5.0,
                                      total_points=args.n, seed=0))
        data = instance.data
    else:
        data = Dataset(rng.normal(size=(args.n, args.dim)))
    points = data.points
    centroids = points[rng.choice(args.n, size=args.k, replace=False)].copy()
    subcentroids = np.stack([centroids - 0.1, centroids + 0.1], axis=1).copy()

    backends = _core.available_backends()
    if "cython" not in backends:
        print("note: compiled extension not built, only the numpy fallback is available")
    results = {name: bench_backend(name, points, centroids, subcentroids, data)
               for name in backends}
    _core.use_backend("cython" if "cython" in backends else "numpy")

    kernels = list(next(iter(results.values())))
    width = max(len(k) for k in kernels)
    header = f"{'kernel':<{width}}  " + "  ".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"  {'speedup':>8}"
    print(f"n={args.n} k={args.k} dim={args.dim}")
    print(header)
    for kernel in kernels:
        line = f"{kernel:<{width}}  " + "  ".join(
            f"{results[b][kernel] * 1e3:>10.3f}ms" for b in backends
        )
        if len(backends) == 2:
            ratio = results["numpy"][kernel] / results["cython"][kernel]
            line += f"  {ratio:>7.2f}x"
        print(line)


if __name__ == "__main__":
    main()
