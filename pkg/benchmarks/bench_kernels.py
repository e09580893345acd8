"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--n 1000] [--epochs 50] [--repeat 3]

Both backends run the same inputs; the SGD outputs are also compared, since
the two are expected to agree bit for bit in sequential mode.
"""
import argparse
import time

import numpy as np

from gsmap import _backend
from gsmap.affinity import fuzzy_graph
from gsmap.dataio import generate_gaussian_clusters
from gsmap.initialization import random_init
from gsmap.knn import build_knn_graph
from gsmap.lowdim import KernelParams
from gsmap.optimizer import OptimizerConfig, optimize


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1000, help="points (multiple of 100)")
    ap.add_argument("--epochs", type=int, default=50)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    X = generate_gaussian_clusters(points_per_cluster=args.n // 10).data.values
    graph, _ = fuzzy_graph(build_knn_graph(X, 10))
    Y0 = random_init(graph.n_vertices, 2, seed=0)
    cfg = OptimizerConfig(n_epochs=args.epochs, seed=0, threads=args.threads)
    kernel = KernelParams(b=1.0)

    backends = ["python"] + (["compiled"] if _backend.COMPILED_AVAILABLE else [])
    if len(backends) == 1:
        print("compiled kernels unavailable; timing the Python fallback only")
    results = {}
    print(f"N={len(X)} D={X.shape[1]} edges={graph.n_edges} epochs={args.epochs} threads={args.threads}")
    print(f"{'stage':<8} {'backend':<9} {'seconds':>9}")
    for stage in ("knn", "sgd"):
        for name in backends:
            if stage == "knn":
                t, out = best_of(lambda: build_knn_graph(X, 10, threads=args.threads, backend=name),
                                 args.repeat)
            else:
                t, out = best_of(lambda: optimize(Y0, graph, kernel, cfg, backend=name), args.repeat)
            results[stage, name] = (t, out)
            print(f"{stage:<8} {name:<9} {t:>9.4f}")
        if len(backends) == 2:
            speedup = results[stage, "python"][0] / results[stage, "compiled"][0]
            print(f"{stage:<8} {'speedup':<9} {speedup:>8.1f}x")

    if len(backends) == 2:
        a, b = results["sgd", "python"][1], results["sgd", "compiled"][1]
        if args.threads == 1:
            print(f"sgd outputs identical: {a.tobytes() == b.tobytes()}")
        ka, kb = results["knn", "python"][1], results["knn", "compiled"][1]
        print(f"knn indices identical: {np.array_equal(ka.indices, kb.indices)}")


if __name__ == "__main__":
    main()
