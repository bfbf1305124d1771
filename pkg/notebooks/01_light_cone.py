"""
How far does a local kick travel?
=================================

A Heisenberg chain with Alice on the first site and Bob on the last. We
compare the exact commutator between Alice's evolved Pauli operator and
Bob's Pauli operator with the finite-range Lieb-Robinson envelope.
"""

# %%
# Build chains of increasing length. The envelope needs a constant ``zeta``;
# ``heuristic_zeta`` takes the largest total coupling strength touching one
# site, which is 6 for unit Heisenberg bonds in the bulk. The envelope
# reaches the trivial ceiling 2 at t = d / (2 e zeta); beyond that it says
# nothing, so each table stops there.
import math

import numpy as np

from lrcap.lieb_robinson import LRParams, epsilon_for_network, heuristic_zeta
from lrcap.linalg import commutator_norm_exact
from lrcap.models import PAULI, chain_network
from lrcap.network import assemble_hamiltonian

for n in (3, 4, 5, 6):
    net = chain_network(n)
    lr = LRParams("finite_range", zeta=heuristic_zeta(net), dbar=1)
    h = assemble_hamiltonian(net)
    t_end = (n - 1) / (2 * math.e * lr.zeta)
    print(f"\n{n} sites, zeta = {lr.zeta:g}, envelope informative until t = {t_end:.4f}")
    print(f"{'t':>8} {'exact':>12} {'envelope':>12}")
    for t in np.linspace(0, t_end, 6):
        exact = commutator_norm_exact(PAULI["Z"], PAULI["Z"], net, t, hamiltonian=h)
        print(f"{t:8.4f} {exact:12.3e} {epsilon_for_network(net, lr, t):12.3e}")

# %%
# The exact value grows like t^d while the envelope grows like (c t)^d with
# a much larger c, so the bound holds with a wide margin at every length.
