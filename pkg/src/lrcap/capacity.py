"""Capacity upper bounds from the trace-norm and diamond-norm distance bounds.

All logarithms are base 2, so bounds are in bits (qubits for ``Q``).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass


def binary_entropy(y: float) -> float:
    """``H2(y) = -y log2 y - (1-y) log2(1-y)`` with ``0 log 0 = 0``."""
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"binary entropy needs 0 <= y <= 1, got {y}")
    if y in (0.0, 1.0):
        return 0.0
    return -y * math.log2(y) - (1.0 - y) * math.log2(1.0 - y)


def g_function(x: float) -> float:
    """``g(x) = (1+x) H2(x / (1+x)) = (1+x) log2(1+x) - x log2 x``."""
    if x < 0:
        raise ValueError(f"g needs x >= 0, got {x}")
    if x == 0:
        return 0.0
    return (1.0 + x) * math.log2(1.0 + x) - x * math.log2(x)


def m_factor(m_a: int, m_b: int, m_c: int) -> int:
    """``M = 2 min(M_A^4, M_A^3 M_B M_C)``."""
    _positive(m_a, m_b, m_c)
    return 2 * min(m_a**4, m_a**3 * m_b * m_c)


def m_star(m_a: int, m_b: int, m_c: int) -> int:
    """Schmidt-rank cap ``min(M_A^2, M_A M_B M_C)``."""
    _positive(m_a, m_b, m_c)
    return min(m_a**2, m_a * m_b * m_c)


def m_prime(m_a: int, m_b: int) -> int:
    _positive(m_a, m_b)
    return min(m_a, m_b)


def _positive(*dims):
    if any(d < 1 for d in dims):
        raise ValueError("dimensions must be positive")


def holevo_bound(epsilon: float, m_a: int, m_b: int) -> float:
    """Holevo-capacity bound from the induced trace-norm bound ``M_A^2 eps``."""
    x = m_a**2 * epsilon / 2
    return x * math.log2(m_b) + g_function(x)


def qc_bounds(epsilon: float, m_factor: int, m_b: int) -> float:
    """Common bound on ``Q`` and ``C`` through the output dimension ``M_B``."""
    me = m_factor * epsilon
    return me * math.log2(m_b) + g_function(me / 2)


def ce_bound(epsilon: float, m_factor: int, m_prime: int) -> float:
    """Entanglement-assisted bound through ``M' = min(M_A, M_B)``."""
    me = m_factor * epsilon
    return me * math.log2(m_prime) + g_function(me / 2)


def final_bounds(epsilon: float, m_factor: int, m_prime: int) -> tuple[float, float]:
    """``(bound on C_P, C, C_E;  bound on Q)``; the second is half the first."""
    classical = ce_bound(epsilon, m_factor, m_prime)
    return classical, classical / 2


@dataclass(frozen=True)
class CapacityReport:
    epsilon: float
    m_a: int
    m_b: int
    m_c: int
    m_q: int
    m_factor: int
    m_prime: int
    m_star: int
    c1_bound: float
    qc_bound: float
    c_bound: float
    cp_bound: float
    q_bound: float
    ce_bound: float

    def capped(self) -> dict:
        """Bounds clipped at the trivial dimension ceilings.

        ``C1, C, C_P, Q <= log2 min(M_Q, M_B)`` and ``C_E <= 2 log2 min(M_Q, M_B)``.
        """
        ceiling = math.log2(min(self.m_q, self.m_b))
        return {
            "c1": min(self.c1_bound, ceiling),
            "qc": min(self.qc_bound, ceiling),
            "c": min(self.c_bound, ceiling),
            "cp": min(self.cp_bound, ceiling),
            "q": min(self.q_bound, ceiling),
            "ce": min(self.ce_bound, 2 * ceiling),
        }

    def as_dict(self) -> dict:
        return asdict(self)


def capacity_report(epsilon: float, m_a: int, m_b: int, m_c: int, m_q: int) -> CapacityReport:
    """All bounds for a given envelope value and dimensions."""
    mf = m_factor(m_a, m_b, m_c)
    mp = m_prime(m_a, m_b)
    classical, quantum = final_bounds(epsilon, mf, mp)
    return CapacityReport(
        epsilon=epsilon,
        m_a=m_a,
        m_b=m_b,
        m_c=m_c,
        m_q=m_q,
        m_factor=mf,
        m_prime=mp,
        m_star=m_star(m_a, m_b, m_c),
        c1_bound=holevo_bound(epsilon, m_a, m_b),
        qc_bound=qc_bounds(epsilon, mf, m_b),
        c_bound=classical,
        cp_bound=classical,
        q_bound=quantum,
        ce_bound=classical,
    )


def report(inst, lr) -> CapacityReport:
    """Capacity bounds for an SNC instance under the envelope ``lr``."""
    from .lieb_robinson import epsilon_for_network
    from .network import dimension_of

    net = inst.net
    part = net.partition
    return capacity_report(
        epsilon_for_network(net, lr, inst.time),
        dimension_of(net, part.a),
        dimension_of(net, part.b),
        dimension_of(net, part.c),
        inst.memory_dim,
    )
