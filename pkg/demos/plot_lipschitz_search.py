"""
Global maximization with a Lipschitz-like bound
===============================================

Two simplex searches (a grid and a dense space-filling curve) on functions of
the Euclidean norm, plus the one-dimensional sawtooth method that powers the
binary-sender capacity algorithm.
"""

import math

import numpy as np

import macap
from macap.entropy import Modulus

f = lambda x: math.sin(float(np.linalg.norm(x)))
beta = Modulus.linear(1.0)

grid = macap.maximize_grid(f, beta, 3, 0.15)
curve = macap.maximize_dense_curve(f, beta, 3, 0.15)
print(f"sin(|x|) on the 3-simplex, true max {math.sin(1):.4f}")
print(f"  grid:  {grid.best_value:.4f} after {grid.iterations} evaluations")
print(f"  curve: {curve.best_value:.4f} after {curve.iterations} evaluations")

# the curve visits a finite grid in a path that moves one unit at a time
c = macap.SimplexCurve(3, 4)
print("curve vertices:", [tuple(c.grid.counts(k)) for k in range(6)], "...")

# one dimension: sawtooth upper bound, stop when it meets the best value
g = lambda t: math.sin(5 * t) * math.exp(-t)
out = macap.maximize_1d(g, Modulus.linear(6.0), 0.0, 2.0, 1e-4)
print(f"1-d: max {out.best_value:.5f} at t={out.best_point:.4f}, "
      f"bound {out.upper_bound:.5f}, {out.evaluations} evaluations")

# a box is not a simplex; extend via projection and search a hypercube curve
h = lambda x: -float(np.sum((x - 0.3) ** 2))
res = macap.maximize_compact_convex(h, Modulus.linear(4.0), 1.0, macap.lipschitz.project_box(0, 1),
                                    [(0, 1), (0, 1)], 0.05)
print(f"box search: {res.best_value:.4f} at {np.round(res.best_point, 3)}")
