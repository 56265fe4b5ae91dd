"""Compare the numba and numpy kernels for ranks over F_p.

Run ``python benchmarks/bench_rank.py``; the first numba call pays the
compilation cost and is reported separately.
"""
import argparse
import time

import numpy as np

from torusposet import _accel
from torusposet.generators import octahedron_boundary
from torusposet.homology import _boundary_rows
from torusposet.sposet import barycentric_subdivide


def boundary_matrix():
    # 2 -> 1 boundary of the barycentric subdivision of the 4-dim cross-polytope boundary
    K = barycentric_subdivide(octahedron_boundary(4))
    faces = {d: sorted(tuple(sorted(K.atoms(x))) for x in K.of_rank(d + 1)) for d in (1, 2)}
    index = {f: i for i, f in enumerate(faces[1])}
    rows = _boundary_rows(faces[2], index)
    dense = np.zeros((len(rows), len(faces[1])), dtype=np.int64)
    for i, row in enumerate(rows):
        for j, c in row.items():
            dense[i, j] = c
    return dense


def timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 200, 400])
    ap.add_argument("--prime", type=int, default=101)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    cases = [(f"random {n}x{n}", rng.integers(-5, 6, size=(n, n))) for n in args.sizes]
    cases.append(("boundary matrix", boundary_matrix()))

    if _accel.HAVE_NUMBA:
        t0 = time.perf_counter()
        _accel.rank_mod_p([[1, 2], [3, 4]], 3, backend="numba")
        print(f"numba compile + first call: {time.perf_counter() - t0:.3f}s")
    else:
        print("numba unavailable; only the numpy backend is timed")

    print(f"{'case':<20} {'shape':>12} {'rank':>6} {'numpy s':>10} {'numba s':>10} {'speedup':>8}")
    for name, a in cases:
        r = _accel.rank_mod_p(a, args.prime, backend="numpy")
        t_np = timed(lambda: _accel.rank_mod_p(a, args.prime, backend="numpy"), args.repeat)
        if _accel.HAVE_NUMBA:
            assert _accel.rank_mod_p(a, args.prime, backend="numba") == r
            t_nb = timed(lambda: _accel.rank_mod_p(a, args.prime, backend="numba"), args.repeat)
            extra = f"{t_nb:>10.4f} {t_np / t_nb:>7.1f}x"
        else:
            extra = f"{'-':>10} {'-':>8}"
        shape = f"{a.shape[0]}x{a.shape[1]}"
        print(f"{name:<20} {shape:>12} {r:>6} {t_np:>10.4f} {extra}")


if __name__ == "__main__":
    main()
