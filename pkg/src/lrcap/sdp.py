"""Small dense semidefinite programming.

Problems are posed over block-diagonal Hermitian matrices::

    maximize    sum_b Re Tr[C_b X_b]
    subject to  sum_b Tr[A_ib X_b]  (=, <=, >=)  b_i
                X_b >= 0

and solved with an infeasible primal-dual interior-point method using
Nesterov-Todd scaling and Mehrotra's predictor-corrector. Complex blocks are
mapped to real symmetric blocks of twice the size,
``H -> [[Re H, -Im H], [Im H, Re H]] / 2`` for coefficients, so that a single
real kernel handles everything. Inequalities get 1x1 slack blocks.

Coefficient matrices may be dense arrays or ``scipy.sparse`` matrices; the
kernel stores every constraint as padded coordinate lists so that large
numbers of elementary constraints stay cheap.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

log = logging.getLogger(__name__)


class SdpError(RuntimeError):
    pass


class SdpInfeasibleError(SdpError):
    pass


class SdpConvergenceError(SdpError):
    pass


@dataclass
class LinearConstraint:
    """``sum_b Tr[coeffs[b] X_b]  kind  rhs``; ``None`` marks a zero block."""

    coeffs: Sequence
    rhs: float
    kind: str = "eq"

    def __post_init__(self):
        if self.kind not in ("eq", "le", "ge"):
            raise ValueError(f"unknown constraint kind {self.kind!r}")


@dataclass
class SdpProblem:
    """Block-diagonal Hermitian SDP in maximization form.

    ``start`` optionally supplies a strictly feasible ``(X_blocks, y, Z_blocks)``
    triple in the complex formulation; when omitted the solver starts from
    scaled identities.
    """

    objective: Sequence[np.ndarray]
    block_dims: Sequence[int]
    constraints: Sequence[LinearConstraint]
    start: Optional[tuple] = None

    def __post_init__(self):
        if len(self.objective) != len(self.block_dims):
            raise ValueError("one objective block per PSD block")
        for c, n in zip(self.objective, self.block_dims):
            c = _dense(c)
            if c.shape != (n, n):
                raise ValueError(f"objective block shape {c.shape} != ({n}, {n})")
            if np.abs(c - c.conj().T).max() > 1e-12 * max(1.0, np.abs(c).max()):
                raise ValueError("objective block is not Hermitian")
        for con in self.constraints:
            if len(con.coeffs) != len(self.block_dims):
                raise ValueError("constraint must list one coefficient per block")
            for a, n in zip(con.coeffs, self.block_dims):
                if a is None:
                    continue
                if a.shape != (n, n):
                    raise ValueError(f"coefficient shape {a.shape} != ({n}, {n})")
                diff = a - a.conj().T
                err = abs(diff).max() if sp.issparse(diff) else np.abs(diff).max()
                if err > 1e-12 * max(1.0, abs(a).max()):
                    raise ValueError("constraint coefficient is not Hermitian")


@dataclass
class SdpSolution:
    primal_value: float
    dual_value: float
    primal_matrix: list
    dual_vector: np.ndarray
    dual_slack: list
    iterations: int
    gap: float
    primal_residual: float
    dual_residual: float
    history: list = field(default_factory=list, repr=False)


def _dense(a) -> np.ndarray:
    if a is None:
        return None
    return a.toarray() if sp.issparse(a) else np.asarray(a)


# ---------------------------------------------------------------------------
# real kernel: blocks of real symmetric matrices, constraints as padded COO


class _Blocks:
    """Constraint operator ``A`` on a list of real symmetric blocks."""

    def __init__(self, sizes, rows, cols, vals):
        # rows/cols/vals: per block, arrays of shape (m, k_b)
        self.sizes = sizes
        self.rows = rows
        self.cols = cols
        self.vals = vals
        self.m = rows[0].shape[0] if rows else 0

    def apply(self, xs):
        """``A(X)_i = sum_b <A_ib, X_b>``."""
        out = np.zeros(self.m)
        for x, r, c, v in zip(xs, self.rows, self.cols, self.vals):
            out += np.sum(v * x[r, c], axis=1)
        return out

    def adjoint(self, y):
        """``A^T(y)_b = sum_i y_i A_ib``."""
        out = []
        for n, r, c, v in zip(self.sizes, self.rows, self.cols, self.vals):
            mat = np.zeros((n, n))
            np.add.at(mat, (r.ravel(), c.ravel()), (v * y[:, None]).ravel())
            out.append(mat)
        return out

    def schur(self, ws, chunk=256):
        """``M_ij = sum_b <A_ib, W_b A_jb W_b>``."""
        m = self.m
        big = np.zeros((m, m))
        for w, r, c, v in zip(ws, self.rows, self.cols, self.vals):
            k = r.shape[1]
            if k == 0:
                continue
            for start in range(0, m, chunk):
                stop = min(m, start + chunk)
                rj, cj, vj = r[start:stop], c[start:stop], v[start:stop]
                # W A_j W = sum_t v_t W[:, r_t] W[c_t, :]
                left = w[:, rj] * vj[None, :, :]  # (n, cnk, k)
                right = w[cj, :]  # (cnk, k, n)
                waw = np.einsum("ajt,jtb->jab", left, right)
                # M[i, j] = sum_t v_it (W A_j W)[r_it, c_it]
                big[:, start:stop] += np.einsum("it,jit->ij", v, waw[:, r, c])
        return (big + big.T) / 2


def _sym(a):
    return (a + a.T) / 2


def _max_step(x_chol_inv, dx):
    """Largest alpha with ``X + alpha dX`` PSD, given ``L^-1`` for ``X = L L^T``."""
    lam = np.linalg.eigvalsh(_sym(x_chol_inv @ dx @ x_chol_inv.T))
    low = lam[0]
    return np.inf if low >= 0 else -1.0 / low


def _solve_real(c_blocks, ops: _Blocks, b, tol, max_iter, start=None, feas_tol=1e-9):
    sizes = ops.sizes
    n_total = sum(sizes)
    norm_b = np.linalg.norm(b)
    norm_c = np.sqrt(sum(np.sum(c * c) for c in c_blocks))
    if start is None:
        # identity start scaled to the data, in the spirit of SDPT3
        a_norms = np.zeros(ops.m)
        for v in ops.vals:
            a_norms += np.sum(v * v, axis=1)
        a_norms = np.sqrt(a_norms)
        xi = max(10.0, np.sqrt(max(sizes)), float(np.max((1 + np.abs(b)) / (1 + a_norms))) if ops.m else 1.0)
        eta = max(10.0, np.sqrt(max(sizes)), norm_c)
        xs = [xi * np.eye(n) for n in sizes]
        zs = [eta * np.eye(n) for n in sizes]
        y = np.zeros(ops.m)
    else:
        xs, y, zs = start
        xs = [np.array(x, dtype=float) for x in xs]
        zs = [np.array(z, dtype=float) for z in zs]
        y = np.array(y, dtype=float)

    history = []
    for it in range(max_iter + 1):
        pobj = sum(np.sum(c * x) for c, x in zip(c_blocks, xs))
        dobj = float(b @ y)
        r_p = b - ops.apply(xs)
        aty = ops.adjoint(y)
        r_d = [c - a + z for c, a, z in zip(c_blocks, aty, zs)]
        p_inf = np.linalg.norm(r_p) / (1 + norm_b)
        d_inf = np.sqrt(sum(np.sum(r * r) for r in r_d)) / (1 + norm_c)
        mu = sum(np.sum(x * z) for x, z in zip(xs, zs)) / n_total
        gap = abs(dobj - pobj)
        history.append((pobj, dobj, p_inf, d_inf))
        log.debug("it %d pobj %.10g dobj %.10g pinf %.2e dinf %.2e mu %.2e", it, pobj, dobj, p_inf, d_inf, mu)
        if gap <= tol and p_inf <= feas_tol and d_inf <= feas_tol:
            return xs, y, zs, it, pobj, dobj, p_inf, d_inf, history
        if it == max_iter:
            break
        scale_y = np.linalg.norm(y)
        scale_x = max(np.linalg.norm(x) for x in xs)
        if (scale_y > 1e12 or scale_x > 1e12) and (p_inf > 1e-6 or d_inf > 1e-6):
            raise SdpInfeasibleError("iterates diverged; problem looks infeasible or unbounded")

        # Nesterov-Todd scaling per block
        gs, gis, ws, lams, lxinv = [], [], [], [], []
        for x, z in zip(xs, zs):
            lx = np.linalg.cholesky(_sym(x))
            lz = np.linalg.cholesky(_sym(z))
            u, s, vt = np.linalg.svd(lz.T @ lx)
            g = lx @ vt.T / np.sqrt(s)
            gi = (np.sqrt(s)[:, None] * vt) @ sla.solve_triangular(lx, np.eye(len(s)), lower=True)
            gs.append(g)
            gis.append(gi)
            ws.append(_sym(g @ g.T))
            lams.append(s)
            lxinv.append(sla.solve_triangular(lx, np.eye(len(s)), lower=True))
        lzinv = [sla.solve_triangular(np.linalg.cholesky(_sym(z)), np.eye(z.shape[0]), lower=True) for z in zs]

        schur = ops.schur(ws)
        try:
            factor = sla.cho_factor(schur)
            solve_schur = lambda rhs: sla.cho_solve(factor, rhs)
        except np.linalg.LinAlgError:
            reg = schur + 1e-14 * np.trace(schur) / max(ops.m, 1) * np.eye(ops.m)
            lu = sla.lu_factor(reg)
            solve_schur = lambda rhs: sla.lu_solve(lu, rhs)

        wrw = [w @ r @ w for w, r in zip(ws, r_d)]

        def direction(rcs):
            ks = []
            for g, lam, rc in zip(gs, lams, rcs):
                d = rc / (lam[:, None] + lam[None, :])
                ks.append(_sym(g @ d @ g.T))
            rhs = ops.apply([k + q for k, q in zip(ks, wrw)]) - r_p
            dy = solve_schur(rhs)
            atdy = ops.adjoint(dy)
            dzs = [_sym(a - r) for a, r in zip(atdy, r_d)]
            dxs = [_sym(k - w @ dz @ w) for k, w, dz in zip(ks, ws, dzs)]
            return dxs, dy, dzs

        def steps(dxs, dzs, frac):
            ap = min([_max_step(li, dx) for li, dx in zip(lxinv, dxs)] + [np.inf])
            ad = min([_max_step(li, dz) for li, dz in zip(lzinv, dzs)] + [np.inf])
            return min(1.0, frac * ap), min(1.0, frac * ad)

        # predictor
        rc_aff = [-2.0 * np.diag(lam * lam) for lam in lams]
        dxa, dya, dza = direction(rc_aff)
        ap, ad = steps(dxa, dza, 1.0)
        mu_aff = sum(np.sum((x + ap * dx) * (z + ad * dz)) for x, dx, z, dz in zip(xs, dxa, zs, dza)) / n_total
        sigma = min(1.0, max(0.0, (mu_aff / mu) ** 3)) if mu > 0 else 0.0

        # corrector
        rcs = []
        for g, gi, lam, dx, dz in zip(gs, gis, lams, dxa, dza):
            dxt = gi @ dx @ gi.T
            dzt = g.T @ dz @ g
            second = dxt @ dzt
            rcs.append(2 * sigma * mu * np.eye(len(lam)) - 2 * np.diag(lam * lam) - (second + second.T))
        dxs, dy, dzs = direction(rcs)
        frac = 0.9 + 0.09 * min(1.0, 1.0 - sigma) if it > 0 else 0.9
        ap, ad = steps(dxs, dzs, frac)
        xs = [_sym(x + ap * dx) for x, dx in zip(xs, dxs)]
        y = y + ad * dy
        zs = [_sym(z + ad * dz) for z, dz in zip(zs, dzs)]

    raise SdpConvergenceError(
        f"no convergence after {max_iter} iterations (gap {gap:.3g}, "
        f"primal infeasibility {p_inf:.3g}, dual infeasibility {d_inf:.3g})"
    )


# ---------------------------------------------------------------------------
# complex front end


def _embed(h) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    re, im = h.real, h.imag
    return np.block([[re, -im], [im, re]])


def _coo_embed(a, n):
    """Rows, cols, vals of ``emb(A) / 2`` for a Hermitian ``n x n`` matrix."""
    if a is None:
        return np.zeros(0, int), np.zeros(0, int), np.zeros(0)
    coo = sp.coo_matrix(a) if sp.issparse(a) else sp.coo_matrix(np.asarray(a))
    r, c, v = coo.row, coo.col, np.asarray(coo.data, dtype=complex)
    rows, cols, vals = [], [], []
    re, im = v.real, v.imag
    nz_re = re != 0
    nz_im = im != 0
    rows += [r[nz_re], r[nz_re] + n]
    cols += [c[nz_re], c[nz_re] + n]
    vals += [re[nz_re] / 2, re[nz_re] / 2]
    rows += [r[nz_im], r[nz_im] + n]
    cols += [c[nz_im] + n, c[nz_im]]
    vals += [-im[nz_im] / 2, im[nz_im] / 2]
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)


def _pad(entries, m):
    k = max((len(e[0]) for e in entries), default=0)
    rows = np.zeros((m, k), dtype=int)
    cols = np.zeros((m, k), dtype=int)
    vals = np.zeros((m, k))
    for i, (r, c, v) in enumerate(entries):
        rows[i, : len(r)] = r
        cols[i, : len(c)] = c
        vals[i, : len(v)] = v
    return rows, cols, vals


def solve(p: SdpProblem, tol: float = 1e-7, max_iter: int = 200) -> SdpSolution:
    """Solve ``p`` to absolute duality gap ``tol``.

    Raises:
        SdpInfeasibleError: when the iterates diverge.
        SdpConvergenceError: when ``max_iter`` iterations do not suffice.
    """
    n_blocks = len(p.block_dims)
    slacks = [i for i, con in enumerate(p.constraints) if con.kind != "eq"]
    m = len(p.constraints)
    real_sizes = [2 * n for n in p.block_dims] + [1] * len(slacks)
    per_block = [[None] * m for _ in real_sizes]
    for i, con in enumerate(p.constraints):
        for bi, (a, n) in enumerate(zip(con.coeffs, p.block_dims)):
            per_block[bi][i] = _coo_embed(a, n)
    empty = (np.zeros(0, int), np.zeros(0, int), np.zeros(0))
    for s_index, i in enumerate(slacks):
        sign = 1.0 if p.constraints[i].kind == "le" else -1.0
        bi = n_blocks + s_index
        for j in range(m):
            per_block[bi][j] = (np.zeros(1, int), np.zeros(1, int), np.array([sign])) if j == i else empty
    rows, cols, vals = [], [], []
    for entries in per_block:
        entries = [e if e is not None else empty for e in entries]
        r, c, v = _pad(entries, m)
        rows.append(r)
        cols.append(c)
        vals.append(v)
    ops = _Blocks(real_sizes, rows, cols, vals)
    b = np.array([con.rhs for con in p.constraints], dtype=float)
    c_blocks = [_embed(_dense(c)) / 2 for c in p.objective] + [np.zeros((1, 1)) for _ in slacks]

    start = None
    if p.start is not None:
        x0, y0, z0 = p.start
        xs = [_embed(x) for x in x0]
        zs = [_embed(z) / 2 for z in z0]
        if slacks:
            y_arr = np.asarray(y0, dtype=float)
            base = [x for x in xs]
            ax = ops.apply(base + [np.zeros((1, 1)) for _ in slacks])
            for s_index, i in enumerate(slacks):
                sign = 1.0 if p.constraints[i].kind == "le" else -1.0
                xs.append(np.array([[(b[i] - ax[i]) * sign]]))
                zs.append(np.array([[sign * y_arr[i]]]))
        start = (xs, np.asarray(y0, dtype=float), zs)

    xs, y, zs, iters, pobj, dobj, p_inf, d_inf, history = _solve_real(
        c_blocks, ops, b, tol, max_iter, start
    )
    primal = []
    for x, n in zip(xs, p.block_dims):
        re = (x[:n, :n] + x[n:, n:]) / 2
        im = (x[n:, :n] - x[:n, n:]) / 2
        primal.append(re + 1j * im)
    slack = []
    for z, n in zip(zs, p.block_dims):
        re = z[:n, :n] + z[n:, n:]
        im = z[n:, :n] - z[:n, n:]
        slack.append(re + 1j * im)
    return SdpSolution(
        primal_value=float(pobj),
        dual_value=float(dobj),
        primal_matrix=primal,
        dual_vector=y,
        dual_slack=slack,
        iterations=iters,
        gap=abs(dobj - pobj),
        primal_residual=p_inf,
        dual_residual=d_inf,
        history=history,
    )


# ---------------------------------------------------------------------------
# diamond norm program


def _hermitian_basis_constraints(d_in, d_out):
    """Sparse Hermitian basis ``H_k`` of ``n x n`` matrices and ``Tr_out H_k``."""
    n = d_in * d_out
    out = []
    for a in range(n):
        for b_ in range(a, n):
            if a == b_:
                h_list = [sp.coo_matrix(([1.0], ([a], [a])), shape=(n, n))]
            else:
                h_list = [
                    sp.coo_matrix(([1.0, 1.0], ([a, b_], [b_, a])), shape=(n, n)),
                    sp.coo_matrix(([1j, -1j], ([a, b_], [b_, a])), shape=(n, n), dtype=complex),
                ]
            ia, oa = divmod(a, d_out)
            ib, ob = divmod(b_, d_out)
            for h in h_list:
                if oa == ob:
                    val = h.tocsr()[a, b_]
                    if ia == ib:
                        tr = sp.coo_matrix(([val], ([ia], [ia])), shape=(d_in, d_in))
                    else:
                        tr = sp.coo_matrix(
                            ([val, np.conj(val)], ([ia, ib], [ib, ia])), shape=(d_in, d_in), dtype=complex
                        )
                else:
                    tr = None
                out.append((h, tr))
    return out


def build_diamond_program(choi_difference: np.ndarray, d_in: int, d_out: int) -> SdpProblem:
    """Program whose optimum is ``||Delta||_diamond`` for a difference of channels.

    Maximizes ``2 Re Tr[J W]`` over ``0 <= W <= rho (x) I_out`` and density
    matrices ``rho`` on the input, with ``J`` the Choi matrix of the
    difference (input factor first). Blocks are ``(W, S, rho)`` with
    ``S = rho (x) I - W`` as an explicit slack.
    """
    j = np.asarray(choi_difference, dtype=complex)
    n = d_in * d_out
    if j.shape != (n, n):
        raise ValueError(f"Choi difference shape {j.shape} != ({n}, {n})")
    if np.abs(j - j.conj().T).max() > 1e-9 * max(1.0, np.abs(j).max()):
        raise ValueError("Choi difference is not Hermitian")
    j = (j + j.conj().T) / 2
    constraints = []
    for h, tr in _hermitian_basis_constraints(d_in, d_out):
        constraints.append(LinearConstraint((h, h, -tr if tr is not None else None), 0.0))
    constraints.append(LinearConstraint((None, None, np.eye(d_in)), 1.0))

    # strictly feasible start: rho = I/d_in, W = S = rho (x) I / 2;
    # dual: y = (|J| + 1) on the identity part, trace multiplier large enough
    x0 = [np.eye(n) / (2 * d_in), np.eye(n) / (2 * d_in), np.eye(d_in) / d_in]
    big = np.abs(np.linalg.eigvalsh(j)).max() + 1.0
    y_mat = 2 * big * np.eye(n)
    y0 = []
    for h, _ in _hermitian_basis_constraints(d_in, d_out):
        # coefficient of H_k in the expansion of y_mat; basis is orthogonal
        hd = h.toarray()
        y0.append(float(np.real(np.trace(hd.conj().T @ y_mat)) / np.real(np.trace(hd.conj().T @ hd))))
    lam = 2 * big * d_out + 1.0
    y0.append(lam)
    tr_y = np.trace(y_mat.reshape(d_in, d_out, d_in, d_out), axis1=1, axis2=3)
    z0 = [y_mat - 2 * j, y_mat, lam * np.eye(d_in) - tr_y]
    objective = [2 * j, np.zeros((n, n)), np.zeros((d_in, d_in))]
    return SdpProblem(objective, [n, n, d_in], constraints, start=(x0, y0, z0))
