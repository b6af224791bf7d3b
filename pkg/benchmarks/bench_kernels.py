"""Time the compiled distance kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--points N] [--repeat R]

Prints one row per kernel with the best-of-R time per point and the speedup.
"""
import argparse
import timeit

import numpy as np

from qgeom import kernels
from qgeom.cpolytope import PolytopeModel


def cases(n, rng):
    for d in (2, 3, 4):
        X = rng.normal(size=(n, d * d - 1)) * 0.5
        yield f"statespace d={d}", lambda K, X=X, d=d: K.statespace_distances(X, d)
    for d in (2, 3):
        V = np.ascontiguousarray(PolytopeModel(d).vertices)
        Y = rng.normal(size=(n // 10, V.shape[1])) * 0.6
        yield f"polytope d={d}", lambda K, Y=Y, V=V: K.polytope_distances(Y, V), n // 10
    Z = rng.normal(size=(n, 6))
    yield "simplex d=6", lambda K: K.project_simplex(Z)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    try:
        compiled = kernels.backend("compiled")
    except ImportError:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation`")
    python = kernels.backend("python")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<16} {'python us/pt':>13} {'compiled us/pt':>15} {'speedup':>8}")
    for case in cases(args.points, rng):
        name, fn = case[0], case[1]
        n = case[2] if len(case) > 2 else args.points
        tp = min(timeit.repeat(lambda: fn(python), number=1, repeat=args.repeat)) / n * 1e6
        tc = min(timeit.repeat(lambda: fn(compiled), number=1, repeat=args.repeat)) / n * 1e6
        print(f"{name:<16} {tp:>13.3f} {tc:>15.3f} {tp / tc:>7.1f}x")


if __name__ == "__main__":
    main()
