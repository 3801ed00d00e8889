"""
A PR box turns CHSH into a perfect channel
==========================================

Sharing a PR box lets the CHSH players always win, so the assisted game MAC
delivers the question pair noiselessly: 2 bits per use at uniform inputs.
The no-signalling linear program confirms that winning probability 1 is
attainable.
"""

import math

import numpy as np

import macap

g = macap.chsh()
box = macap.pr_box()
mac = macap.assisted_mac(g, box, macap.passthrough(g, box))

# sender i inputs (x_i, y_i); the answer no longer matters
u = np.full(4, 0.25)
print("assisted I(uniform) =", macap.mutual_information(mac, u, u, base="bits"), "bits")

plain = macap.build_game_mac(g)
print("unassisted I(uniform) =", round(macap.mutual_information(plain, u, u, base="bits"), 4), "bits")

val, v = macap.max_ns_winning_prob(g)
print("no-signalling optimum:", val)
print("optimal conditional table P(y|x), rows x = 00, 01, 10, 11:")
print(np.round(v, 3))

# the signalling game needs real communication; no-signalling boxes do not help
for m in (2, 3, 4):
    val, _ = macap.max_ns_winning_prob(macap.signalling(m, m))
    print(f"signalling({m},{m}): no-signalling value {val:.4f}, 1/m = {1 / m:.4f}")
