"""
Sum capacity of two noise-free MACs
===================================

Two binary-input, binary-output channels that are noiseless on part of the
input space. For the first, the sum capacity and the capacity over joint
(possibly correlated) inputs coincide; for the second they differ.
"""

import math

import numpy as np

import macap

# transition tensors are indexed [z][b1][b2]
nf1 = macap.Mac([[[1, .5], [.5, .5]], [[0, .5], [.5, .5]]])
nf2 = macap.Mac([[[1, .5], [.5, 0]], [[0, .5], [.5, 1]]])

for name, mac in [("N1", nf1), ("N2", nf2)]:
    rep = macap.sum_capacity_d2_binary(mac, eps=0.01)
    relaxed = macap.relaxed_sum_capacity(mac)
    print(f"{name}: sum capacity in [{rep.value:.4f}, {rep.upper_bound:.4f}] nats "
          f"after {rep.iterations} outer steps; joint-input capacity {relaxed:.4f}")
    print(f"    optimal inputs p = {np.round(rep.inner_point, 4)}, q = {np.round(rep.outer_point, 4)}")

# closed form for the first channel: h(4/5) - (2/5) ln 2
print("closed form N1:", math.log(5) - 0.8 * math.log(4) - 0.4 * math.log(2))

# the inner problem at a fixed q is concave; its value is certified by a gap
r = macap.inner_capacity(nf2, [0.5, 0.5], 1e-8)
print(f"I*(q=1/2) = {r.value:.6f} (gap {r.gap:.1e}, {r.iterations} updates)")

# with a fixed budget instead of a precision we still get an upper bound
rep = macap.sum_capacity_d2_binary(nf2, None, max_iter=10)
print(f"10 steps: best {rep.value:.4f}, certified upper bound {rep.upper_bound:.4f}")
