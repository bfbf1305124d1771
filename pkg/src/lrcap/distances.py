"""Distances between channels and the analytic bounds they are checked against.

Two distances are measured. The induced trace-norm distance
``max_rho ||(Phi - Phi')(rho)||_1`` is a non-convex maximization; it is
estimated by multi-start gradient ascent over pure inputs, so the returned
number is a lower bound. The diamond distance comes from a semidefinite
program and is accurate to the solver's duality gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from . import sdp
from .capacity import m_factor
from .channels import (
    Channel,
    SncInstance,
    depolarizing_phi0,
    depolarizing_phi1,
    snc_channel,
)
from .lieb_robinson import LRParams, epsilon_for_network
from .network import SpinNetwork, dimension_of

SLACK = 1e-6
MAX_CHOI_DIM = 64
DEFAULT_RESTARTS = 64


@dataclass(frozen=True)
class DistanceReport:
    """One measured distance against its analytic right-hand side.

    ``satisfied`` compares the quantity the bound is about (induced distance
    for the trace-norm bound, diamond distance for the diamond bound) with
    ``analytic_rhs``. ``certified`` is true when the diamond value, an upper
    bound on the induced distance, already meets the right-hand side. Both
    are ``None`` when the diamond program was skipped.
    """

    induced_lower: float
    diamond: float
    diamond_gap: float
    analytic_rhs: float
    satisfied: Optional[bool]
    certified: Optional[bool] = None


def _check_pair(phi: Channel, psi: Channel) -> None:
    if (phi.input_dim, phi.output_dim) != (psi.input_dim, psi.output_dim):
        raise ValueError("channels have different input/output dimensions")


class _DifferenceMap:
    """``Delta = phi - psi`` with its adjoint, on Kraus stacks."""

    def __init__(self, phi: Channel, psi: Channel):
        self.kp = np.stack(phi.kraus)
        self.kq = np.stack(psi.kraus)

    def __call__(self, rho):
        a = np.einsum("kab,bc,kdc->ad", self.kp, rho, self.kp.conj())
        b = np.einsum("kab,bc,kdc->ad", self.kq, rho, self.kq.conj())
        return a - b

    def adjoint(self, x):
        a = np.einsum("kba,bc,kcd->ad", self.kp.conj(), x, self.kp)
        b = np.einsum("kba,bc,kcd->ad", self.kq.conj(), x, self.kq)
        return a - b


def _pure_objective(delta: _DifferenceMap, d: int):
    """Negative trace norm of ``Delta(|v><v|)`` and its gradient in real coordinates."""

    def fn(z):
        v = z[:d] + 1j * z[d:]
        nrm = np.linalg.norm(v)
        if nrm < 1e-300:
            return 0.0, np.zeros_like(z)
        u = v / nrm
        out = delta(np.outer(u, u.conj()))
        out = (out + out.conj().T) / 2
        lam, vecs = np.linalg.eigh(out)
        value = np.abs(lam).sum()
        sign = (vecs * np.sign(lam)) @ vecs.conj().T
        g = 2 * delta.adjoint(sign) @ u  # gradient wrt unit vector u
        g = g - np.real(np.vdot(u, g)) * u  # project on the tangent of the sphere
        g = g / nrm
        return -value, -np.concatenate([g.real, g.imag])

    return fn


def induced_trace_distance(
    phi: Channel, psi: Channel, restarts: int = DEFAULT_RESTARTS, seed: int = 0
) -> float:
    """Best value of ``||(phi - psi)(|v><v|)||_1`` found over unit vectors ``v``.

    Starts from every computational basis vector and ``restarts`` random
    vectors drawn from a Philox generator seeded with ``seed``; each start is
    polished with L-BFGS using the analytic gradient. The result never
    exceeds the true induced distance.
    """
    _check_pair(phi, psi)
    d = phi.input_dim
    delta = _DifferenceMap(phi, psi)
    fn = _pure_objective(delta, d)
    rng = np.random.Generator(np.random.Philox(seed))
    starts = [np.concatenate([np.eye(d)[i], np.zeros(d)]) for i in range(d)]
    starts += [rng.standard_normal(2 * d) for _ in range(restarts)]
    best = 0.0
    for z0 in starts:
        res = minimize(fn, z0, jac=True, method="L-BFGS-B", options={"gtol": 1e-12, "ftol": 1e-15})
        value = -float(fn(res.x)[0])
        best = max(best, value, -float(fn(z0)[0]))
    return best


def diamond_distance_full(phi: Channel, psi: Channel, tol: float = 1e-7) -> sdp.SdpSolution:
    """Solve the diamond program and return the full solution."""
    _check_pair(phi, psi)
    d_in, d_out = phi.input_dim, phi.output_dim
    if d_in * d_out > MAX_CHOI_DIM:
        raise ValueError(f"Choi dimension {d_in * d_out} exceeds the limit {MAX_CHOI_DIM}")
    problem = sdp.build_diamond_program(phi.choi - psi.choi, d_in, d_out)
    return sdp.solve(problem, tol=tol)


def diamond_distance(phi: Channel, psi: Channel, tol: float = 1e-7) -> float:
    """``||phi - psi||_diamond`` (2 for perfectly distinguishable channels)."""
    if phi is psi:
        return 0.0
    return diamond_distance_full(phi, psi, tol).primal_value


def entangled_input_lower_bound(phi: Channel, psi: Channel) -> float:
    """Trace norm of the difference applied to half of a maximally entangled state."""
    from .linalg import trace_norm

    return trace_norm(phi.choi - psi.choi) / phi.input_dim


def sandwich_check(
    phi: Channel, psi: Channel, m_q: int, restarts: int = DEFAULT_RESTARTS, seed: int = 0
) -> tuple:
    """Check ``induced <= diamond <= 2 m_q induced`` with ``1e-6`` slack.

    Returns the three booleans ``(lower, upper, both)``.
    """
    induced = induced_trace_distance(phi, psi, restarts, seed)
    diamond = diamond_distance(phi, psi)
    lower = induced <= diamond + SLACK
    upper = diamond <= 2 * m_q * induced + SLACK
    return lower, upper, lower and upper


def _dims(net: SpinNetwork):
    part = net.partition
    return (
        dimension_of(net, part.a),
        dimension_of(net, part.b),
        dimension_of(net, part.c),
    )


def trace_bound_rhs(net: SpinNetwork, lr: LRParams, t: float) -> float:
    """``M_A^2 eps_AB(t)``."""
    m_a = _dims(net)[0]
    return m_a**2 * epsilon_for_network(net, lr, t)


def diamond_bound_rhs(net: SpinNetwork, lr: LRParams, t: float) -> float:
    """``M eps_AB(t)`` with ``M = 2 min(M_A^4, M_A^3 M_B M_C)``."""
    return m_factor(*_dims(net)) * epsilon_for_network(net, lr, t)


def swap_diamond_bound_rhs(net: SpinNetwork, lr: LRParams, t: float) -> float:
    """``2 M_A^3 eps_AB(t)``, valid for swap-in/swap-out encodings."""
    m_a = _dims(net)[0]
    return 2 * m_a**3 * epsilon_for_network(net, lr, t)


def verify_bounds(
    inst: SncInstance,
    lr: LRParams,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
    epsilon_scale: float = 1.0,
) -> tuple[DistanceReport, DistanceReport]:
    """Measure both distances for one instance and compare with the bounds.

    Returns ``(trace_report, diamond_report)``: the first compares the induced
    distance to the non-signaling channel with ``M_A^2 eps``, the second the
    diamond distance to the decoupled channel with ``M eps``. Diamond values
    are ``nan`` when the Choi dimension exceeds :data:`MAX_CHOI_DIM`.
    ``epsilon_scale`` multiplies the envelope and exists to test that
    violations are detected.
    """
    net, t = inst.net, inst.time
    phi = snc_channel(inst)
    phi0 = depolarizing_phi0(net, t, inst.memory_dim)
    phi1 = depolarizing_phi1(net, t, inst.memory_dim)
    trace_rhs = epsilon_scale * trace_bound_rhs(net, lr, t)
    diamond_rhs = epsilon_scale * diamond_bound_rhs(net, lr, t)
    gated = phi.input_dim * phi.output_dim > MAX_CHOI_DIM

    def measure(other):
        induced = induced_trace_distance(phi, other, restarts, seed)
        if gated:
            return induced, math.nan, math.nan
        sol = diamond_distance_full(phi, other)
        return induced, sol.primal_value, sol.gap

    ind0, dia0, gap0 = measure(phi0)
    ind1, dia1, gap1 = measure(phi1)
    trace_report = DistanceReport(
        induced_lower=ind0,
        diamond=dia0,
        diamond_gap=gap0,
        analytic_rhs=trace_rhs,
        satisfied=ind0 <= trace_rhs + SLACK,
        certified=None if gated else dia0 <= trace_rhs + SLACK,
    )
    diamond_report = DistanceReport(
        induced_lower=ind1,
        diamond=dia1,
        diamond_gap=gap1,
        analytic_rhs=diamond_rhs,
        satisfied=None if gated else dia1 <= diamond_rhs + SLACK,
        certified=None if gated else dia1 <= diamond_rhs + SLACK,
    )
    return trace_report, diamond_report
