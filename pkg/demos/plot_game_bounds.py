"""
Nonlocal games as channels
==========================

Each nonlocal game defines a MAC: senders hold the question, pick an answer,
and the receiver sees the question tuple if the answers win, noise
otherwise. The winning probability of the best strategy then bounds how
much information the channel can carry.
"""

import math

import macap
from macap.games import QUANTUM_VALUES

bits = 1 / math.log(2)

games = [macap.chsh(), macap.magic_square(), macap.multiparty_parity(3), macap.signalling(2, 2)]
for g in games:
    w_cl, strategy = macap.classical_winning_prob(g)
    w_ns, _ = macap.max_ns_winning_prob(g)
    w_all = macap.full_communication_winning_prob(g)
    print(f"{g.name:20s} d={g.d:2d}  classical {w_cl:.4f}  no-signalling {w_ns:.4f}  "
          f"full communication {w_all:.4f}")
    print(f"{'':20s} classical bound {macap.correlation_bound(g.d, w_cl) * bits:.3f} bits, "
          f"ln d = {math.log(g.d) * bits:.3f} bits")

# a quantum strategy for CHSH wins with probability cos^2(pi/8)
w_q = QUANTUM_VALUES["chsh"]
print(f"CHSH quantum bound: {macap.correlation_bound(4, w_q) * bits:.3f} bits")

# multiparty parity only constrains questions with even parity; off-promise
# questions are free wins
w_p, _ = macap.classical_winning_prob(macap.multiparty_parity(3), on_promise=True)
print("parity on promise:", w_p, "-> promise-free", macap.promise_free_winning_prob(w_p, 4, 8))

# deterministic strategies that win K of d questions
d = 9
for K in range(d + 1):
    print(f"  K={K}: {macap.deterministic_max_mi(d, K) * bits:.4f} bits")
