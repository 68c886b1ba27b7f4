"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each case is run on both backends; the outputs are checked for equality
before timing.
"""
import argparse
import timeit

import numpy as np

from sostree import _kernels_py as py
from sostree.chain import _bucket_cdfs
from sostree.model import ModelParams
from sostree.periodic_system import PeriodicBoundaryLaw
from sostree import special_k2 as k2

try:
    from sostree import _kernels as cy
except ImportError:
    cy = None


def cases():
    par = ModelParams.from_tau(9.0)
    lt = par.log_theta
    slow = ModelParams(0.999, 0.5, 1.0)
    z = np.array([1.0, 4.5, 1.0, 0.3])
    pair = [p for p in k2.asymmetric_solutions(9.0) if p.kind == "asym_branch2"][0]
    law = PeriodicBoundaryLaw([1.0, pair.a, 1.0, pair.b])
    cdfs = _bucket_cdfs(law, par, 50, 1e-14)
    depth = 16
    V = 2 ** (depth + 1) - 1
    raw = np.random.Philox(key=[7, 0]).random_raw(V)
    u = py.uniforms_from_raw(raw)
    return [
        ("residue_sums n=4, theta=0.999", lambda m: m.residue_sums(4, slow.log_theta, 0.5, 1.0, 80000)),
        ("window_sum M=80000", lambda m: m.window_sum(3, z, slow.log_theta, 0.5, 1.0, 0, 80000)),
        ("uff_candidate_cells h=0.01", lambda m: m.uff_candidate_cells(9.0, 0.01, 1200)),
        ("uniforms_from_raw 131071", lambda m: m.uniforms_from_raw(raw)),
        ("tree_heights depth 16", lambda m: m.tree_heights(2, u, cdfs, 50)),
        ("residue_sums n=4, tau=9", lambda m: m.residue_sums(4, lt, 0.5, 1.0, 40)),
    ]


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if cy is None:
        print("compiled extension not available; build with pip install -e . --no-build-isolation")
    print(f"{'kernel':34s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s}  equal")
    for name, fn in cases():
        t_py = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat)) * 1e3
        if cy is None:
            print(f"{name:34s} {t_py:12.3f} {'-':>12s} {'-':>8s}")
            continue
        t_cy = min(timeit.repeat(lambda: fn(cy), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:34s} {t_py:12.3f} {t_cy:12.3f} {t_py / t_cy:8.1f}  {same(fn(py), fn(cy))}")


if __name__ == "__main__":
    main()
