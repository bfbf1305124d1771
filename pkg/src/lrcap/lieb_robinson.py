"""Lieb-Robinson envelopes and the Hamiltonian decay conditions behind them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .network import SpinNetwork, region_diameter, region_distance

KINDS = ("finite_range", "exponential_decay", "power_law")


@dataclass(frozen=True)
class LRParams:
    """Envelope constants.

    ``finite_range`` needs ``zeta`` and ``dbar``; the two long-range kinds
    need ``mu``, ``v`` and ``c``. ``s`` is the budget for the decay
    condition and is optional. The decay-condition exponent and the
    envelope exponent are the same parameter ``mu``.
    """

    kind: str
    zeta: Optional[float] = None
    dbar: Optional[int] = None
    mu: Optional[float] = None
    v: Optional[float] = None
    c: Optional[float] = None
    s: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown envelope kind {self.kind!r}")
        required = ("zeta", "dbar") if self.kind == "finite_range" else ("mu", "v", "c")
        for name in required:
            value = getattr(self, name)
            if value is None or not value > 0:
                raise ValueError(f"{self.kind} envelope needs positive {name}")
        if self.s is not None and not self.s > 0:
            raise ValueError("s must be positive")


def _expect(p: LRParams, kind: str) -> None:
    if p.kind != kind:
        raise ValueError(f"expected {kind} parameters, got {p.kind}")


def epsilon_finite_range(abs_a: int, abs_b: int, dist: int, p: LRParams, t: float) -> float:
    """``2|A||B| (2 e zeta dbar |t| / d)^(d / dbar)``."""
    _expect(p, "finite_range")
    if not dist > 0:
        raise ValueError("distance between regions must be positive")
    base = 2.0 * math.e * p.zeta * p.dbar * abs(t) / dist
    return 2.0 * abs_a * abs_b * base ** (dist / p.dbar)


def epsilon_exp_decay(abs_a: int, abs_b: int, dist: float, p: LRParams, t: float) -> float:
    """``C|A||B| (e^{v|t|} - 1) e^{-mu d}``."""
    _expect(p, "exponential_decay")
    return p.c * abs_a * abs_b * math.expm1(p.v * abs(t)) * math.exp(-p.mu * dist)


def epsilon_power_law(abs_a: int, abs_b: int, dist: float, p: LRParams, t: float) -> float:
    """``C|A||B| (e^{v|t|} - 1) / (1 + d)^mu``."""
    _expect(p, "power_law")
    return p.c * abs_a * abs_b * math.expm1(p.v * abs(t)) / (1.0 + dist) ** p.mu


_ENVELOPES = {
    "finite_range": epsilon_finite_range,
    "exponential_decay": epsilon_exp_decay,
    "power_law": epsilon_power_law,
}


def epsilon(abs_a: int, abs_b: int, dist: float, p: LRParams, t: float) -> float:
    """Dispatch to the envelope selected by ``p.kind``."""
    return _ENVELOPES[p.kind](abs_a, abs_b, dist, p, t)


def epsilon_for_network(net: SpinNetwork, p: LRParams, t: float) -> float:
    """Envelope for the network's own A/B regions."""
    part = net.partition
    dist = region_distance(net.graph, part.a, part.b)
    return epsilon(len(part.a), len(part.b), dist, p, t)


def _term_norm(matrix: np.ndarray) -> float:
    return float(np.abs(np.linalg.eigvalsh(matrix)).max()) if matrix.size else 0.0


def decay_condition_check(
    net: SpinNetwork, mode: str, mu: float, s: float = math.inf
) -> tuple[float, bool]:
    """Evaluate ``sup_x sum_{X containing x} |X| ||H_X|| w(D(X))``.

    ``w`` is ``exp(mu D)`` in ``"exponential"`` mode and ``(1 + D)^mu`` in
    ``"power_law"`` mode. Returns the supremum and whether it is at most ``s``.
    """
    if mode == "exponential":
        weight = lambda diam: math.exp(mu * diam)
    elif mode == "power_law":
        weight = lambda diam: (1.0 + diam) ** mu
    else:
        raise ValueError(f"unknown decay mode {mode!r}")
    per_site = np.zeros(net.n_sites)
    for term in net.terms:
        contribution = (
            len(term.support)
            * _term_norm(term.matrix)
            * weight(region_diameter(net.graph, term.support))
        )
        for x in term.support:
            per_site[x] += contribution
    value = float(per_site.max()) if net.terms else 0.0
    return value, value <= s


def heuristic_zeta(net: SpinNetwork) -> float:
    """Largest total term norm touching a single site.

    A practical seed for the finite-range constant; callers with a rigorous
    value should pass it explicitly.
    """
    if not net.terms:
        raise ValueError("heuristic zeta needs at least one Hamiltonian term")
    per_site = np.zeros(net.n_sites)
    for term in net.terms:
        norm = _term_norm(term.matrix)
        for x in term.support:
            per_site[x] += norm
    return float(per_site.max())
