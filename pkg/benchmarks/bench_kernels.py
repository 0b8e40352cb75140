"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]
"""
import argparse
import json
import time
from fractions import Fraction

import numpy as np

from ccflip import kernels
from ccflip._accel import HAVE_NUMBA, use_backend
from ccflip.generators import gen_gnp, gen_planted, make_rng
from ccflip.graph import UNIT, Clustering, pair_matrices
from ccflip.sampled import VertexStats


def cases():
    rng = make_rng(0)
    g_small = gen_gnp(14, 0.5, 1)
    c_small = Clustering(rng.integers(0, 4, g_small.n))
    w_small = UNIT.flip(c_small, Fraction(1, 2))
    plus, minus = pair_matrices(g_small, w_small)
    A = minus - plus
    L = (c_small.labels[:, None] == c_small.labels[None, :]).astype(np.int64)

    g_or = gen_gnp(10, 0.5, 2)
    p_or, m_or = pair_matrices(g_or, UNIT)
    z = np.zeros((10, 10), dtype=bool)
    ms = np.zeros(10, dtype=np.int64)

    g_big, truth = gen_planted(20, 50, 0.5, 0.02, 3)
    w_big = UNIT.flip(truth, 1)
    c_big = Clustering(rng.integers(0, 40, g_big.n))
    ew = w_big.edge_units(g_big)
    members = rng.choice(g_big.n, 200, replace=False)
    st = VertexStats(g_big, w_big, c_big)
    vs = np.arange(0, 200)
    S = rng.choice(g_big.n, 1024)

    return {
        "subset_deltas n=14": lambda: kernels.subset_deltas(A, L),
        "rgs_search n=10": lambda: kernels.rgs_search(p_or, m_or, z, z, ms),
        "cost_units n=1000": lambda: kernels.cost_units(c_big.labels, g_big.indptr, g_big.indices, ew, 1),
        "delta_units |S|=200": lambda: kernels.delta_units(c_big.labels, c_big.sizes, g_big.indptr,
                                                            g_big.indices, ew, 1, np.sort(members)),
        "est_terms 200x1024": lambda: kernels.est_terms(vs, S, 300, st.labels, g_big.indptr, g_big.indices,
                                                        st.layer_labels, st.layer_units, st.scale,
                                                        st.dw, st.dw_c, st.csize, st.d_c),
    }


def best_time(fn, repeat):
    fn()  # warm-up (and jit compile)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", default=None)
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if HAVE_NUMBA else [])
    rows = []
    for name, fn in cases().items():
        row = {"kernel": name}
        for b in backends:
            with use_backend(b):
                row[b] = best_time(fn, args.repeat)
        rows.append(row)
    print(f"{'kernel':24s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}")
    for r in rows:
        nb = r.get("numba")
        sp = f"{r['numpy'] / nb:8.1f}" if nb else "     n/a"
        print(f"{r['kernel']:24s} {r['numpy'] * 1e3:10.3f} {(nb or float('nan')) * 1e3:10.3f} {sp}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
