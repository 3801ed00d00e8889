"""
Larger input alphabets
======================

When neither sender is binary the outer problem lives on a simplex of
dimension d2 - 1. Padding the first noise-free channel with a duplicate
input letter leaves its capacity unchanged, which makes it a good check.
"""

import time

import numpy as np

import macap
from macap.capacity import estimate_evaluations

t = np.array([[[1, .5], [.5, .5]], [[0, .5], [.5, .5]]])
padded = macap.Mac(np.concatenate([t, t[:, :, 1:]], axis=2))
print("d1, d2 =", padded.d1, padded.d2)

for method, eps in [("grid", 0.8), ("dense_curve", 0.1), ("grid", 0.1)]:
    n = estimate_evaluations(padded, method, eps)
    try:
        t0 = time.perf_counter()
        rep = macap.sum_capacity_general(padded, method, eps)
        print(f"{method:12s} eps={eps}: {rep.value:.4f} nats "
              f"({rep.iterations} inner solves, {time.perf_counter() - t0:.1f}s)")
    except macap.RefusalError as exc:
        print(f"{method:12s} eps={eps}: refused, would need {exc.estimate:,} inner solves "
              f"(estimate {n:,})")
