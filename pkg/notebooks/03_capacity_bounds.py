"""
Capacity bounds from a small signal
===================================

A small distance between the signaling channel and a useless channel
implies small capacities. This script turns the envelope into bounds on the
Holevo, classical, private, quantum and entanglement-assisted capacities,
first along time and then along chain length.
"""

# %%
import numpy as np

from lrcap.capacity import capacity_report
from lrcap.lieb_robinson import LRParams, epsilon_finite_range

# %%
# Qubit regions for Alice, Bob and the rest of the chain. The envelope is
# a number; everything else is bookkeeping with dimensions.
lr = LRParams("finite_range", zeta=6.0, dbar=1)
print(f"{'t':>7} {'eps':>10} {'C1':>9} {'C':>9} {'Q':>9} {'CE':>9}")
for t in np.linspace(0, 0.02, 6):
    eps = epsilon_finite_range(1, 1, 2, lr, t)
    r = capacity_report(eps, m_a=2, m_b=2, m_c=2, m_q=2)
    print(f"{t:7.4f} {eps:10.3e} {r.c1_bound:9.4f} {r.c_bound:9.4f} {r.q_bound:9.4f} {r.ce_bound:9.4f}")

# %%
# The raw bounds exceed one bit quickly, which is the trivial ceiling for a
# qubit channel. ``capped()`` reports both views.
r = capacity_report(epsilon_finite_range(1, 1, 2, lr, 0.02), 2, 2, 2, 2)
print("\nraw:", {k: round(v, 3) for k, v in r.as_dict().items() if k.endswith("_bound")})
print("capped:", {k: round(v, 3) for k, v in r.capped().items()})

# %%
# At a fixed time the envelope falls off faster than exponentially with
# distance, so longer chains give sharply smaller capacity bounds.
t = 0.02
print(f"\n{'d(A,B)':>6} {'eps':>10} {'Q bound':>10}")
for d in range(1, 8):
    eps = epsilon_finite_range(1, 1, d, lr, t)
    print(f"{d:6d} {eps:10.3e} {capacity_report(eps, 2, 2, 2 ** max(d - 1, 0), 2).q_bound:10.3e}")

# %%
# The same numbers, with measured distances next to them, come out of the
# command line tool:
#
#     lrcap bound --config configs/chain3_swap.json --out bounds.csv
#     lrcap sweep --config configs/chain3_swap.json --parameter distance --time 0.02
