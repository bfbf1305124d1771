"""Command line front end: ``lrcap bound|verify|sweep``.

Exit codes: 0 when every check passes, 2 when a bound is violated, 1 for
usage, configuration or dimension-limit errors.

Output formats are fixed so reruns can be diffed byte for byte. Reals are
written as the shortest decimal that round-trips (``repr``), booleans as
``true``/``false``, and a diamond check that was skipped because the Choi
matrix is too large leaves ``diamond_lhs`` empty and sets
``diamond_ok`` to ``skipped``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import distances
from .capacity import capacity_report
from .channels import Encoding, SncInstance
from .config import ConfigError, NetworkConfig, _encoding, config_from_dict, load_config
from .linalg import partial_trace
from .lieb_robinson import LRParams, epsilon_for_network, heuristic_zeta
from .models import HEISENBERG_BOND, chain_network
from .network import dimension_of

VERIFY_COLUMNS = (
    "t", "epsilon", "induced_lhs", "trace_rhs", "trace_ok",
    "diamond_lhs", "diamond_rhs", "diamond_ok", "c1", "c", "cp", "q", "ce",
)
SWEEP_COLUMNS = ("param",) + VERIFY_COLUMNS + ("error",)
BOUND_COLUMNS = (
    "t", "epsilon", "m_a", "m_b", "m_c", "m_q", "m_factor", "m_prime", "m_star",
    "c1", "qc", "c", "cp", "q", "ce",
    "c1_capped", "qc_capped", "c_capped", "cp_capped", "q_capped", "ce_capped",
)
DEFAULT_DIM_LIMIT = 4096
SKIPPED = "skipped"


class CliError(Exception):
    """A usage or configuration problem; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def dim_limit() -> int:
    raw = os.environ.get("LRCAP_DIM_LIMIT")
    if raw is None:
        return DEFAULT_DIM_LIMIT
    try:
        value = int(raw)
    except ValueError:
        raise CliError(f"LRCAP_DIM_LIMIT must be an integer, got {raw!r}") from None
    if value < 1:
        raise CliError("LRCAP_DIM_LIMIT must be positive")
    return value


def check_dimensions(net, memory_dim: int) -> None:
    """Refuse instances whose memory-plus-network space exceeds the cap."""
    total = memory_dim * net.dimension
    limit = dim_limit()
    if total > limit:
        raise CliError(
            f"dimension limit exceeded: M_Q * dim(network) = {total} > {limit} "
            "(all checks gated; raise LRCAP_DIM_LIMIT to run them)"
        )


def diamond_gated(net, memory_dim: int) -> bool:
    return memory_dim * dimension_of(net, net.partition.b) > distances.MAX_CHOI_DIM


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return ""
    return repr(value)


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return None if math.isnan(value) else value
    return value


def render(rows, columns, fmt: str) -> str:
    if fmt == "json":
        data = [{c: _json_value(r.get(c)) for c in columns} for r in rows]
        return json.dumps(data, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def _write(path, text: str) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    Path(path).write_text(text)


def verify_row(net, lr: LRParams, encoding: Encoding, t: float, seed: int, restarts: int,
               epsilon_scale: float = 1.0) -> dict:
    """Measure both distances at one time and evaluate every bound."""
    inst = SncInstance(net, encoding, t)
    check_dimensions(net, inst.memory_dim)
    trace, diamond = distances.verify_bounds(inst, lr, restarts, seed, epsilon_scale)
    part = net.partition
    eps = epsilon_scale * epsilon_for_network(net, lr, t)
    cap = capacity_report(
        eps,
        dimension_of(net, part.a),
        dimension_of(net, part.b),
        dimension_of(net, part.c),
        inst.memory_dim,
    )
    gated = diamond.satisfied is None
    return {
        "t": t,
        "epsilon": eps,
        "induced_lhs": trace.induced_lower,
        "trace_rhs": trace.analytic_rhs,
        "trace_ok": trace.satisfied,
        "diamond_lhs": diamond.diamond,
        "diamond_rhs": diamond.analytic_rhs,
        "diamond_ok": SKIPPED if gated else diamond.satisfied,
        "c1": cap.c1_bound,
        "c": cap.c_bound,
        "cp": cap.cp_bound,
        "q": cap.q_bound,
        "ce": cap.ce_bound,
    }


def bound_row(cfg: NetworkConfig, t: float) -> dict:
    net = cfg.network
    part = net.partition
    cap = capacity_report(
        epsilon_for_network(net, cfg.lr, t),
        dimension_of(net, part.a),
        dimension_of(net, part.b),
        dimension_of(net, part.c),
        cfg.encoding.memory_dim,
    )
    row = {"t": t, **cap.as_dict()}
    for key in ("c1", "qc", "c", "cp", "q", "ce"):
        row[key] = row.pop(f"{key}_bound")
    row.update({f"{k}_capped": v for k, v in cap.capped().items()})
    return row


def _row_failed(row: dict) -> bool:
    return row.get("trace_ok") is False or row.get("diamond_ok") is False


def _announce_gating(net, memory_dim: int) -> None:
    if diamond_gated(net, memory_dim):
        print(
            f"note: diamond check skipped, Choi dimension "
            f"{memory_dim * dimension_of(net, net.partition.b)} > {distances.MAX_CHOI_DIM}; "
            "trace-norm check still runs",
            file=sys.stderr,
        )


def cmd_bound(cfg: NetworkConfig, out, fmt: str = "csv") -> int:
    """Write capacity bounds over the time grid, as CSV and JSON side by side.

    With ``--out results.csv`` the JSON copy goes to ``results.json`` (and
    the other way round); without ``--out`` only the chosen format is
    printed.
    """
    rows = [bound_row(cfg, t) for t in cfg.times]
    if out is None or str(out) == "-":
        _write(None, render(rows, BOUND_COLUMNS, fmt))
        return 0
    out = Path(out)
    other = "json" if fmt == "csv" else "csv"
    _write(out, render(rows, BOUND_COLUMNS, fmt))
    _write(out.with_suffix(f".{other}"), render(rows, BOUND_COLUMNS, other))
    return 0


def cmd_verify(cfg: NetworkConfig, out, seed: int, restarts: int, fmt: str = "csv",
               epsilon_scale: float = 1.0) -> int:
    net = cfg.network
    check_dimensions(net, cfg.encoding.memory_dim)
    _announce_gating(net, cfg.encoding.memory_dim)
    rows = [verify_row(net, cfg.lr, cfg.encoding, t, seed, restarts, epsilon_scale) for t in cfg.times]
    _write(out, render(rows, VERIFY_COLUMNS, fmt))
    return 2 if any(_row_failed(r) for r in rows) else 0


def chain_from_template(raw: dict, n_sites: int, time: float):
    """Build a path-graph instance of ``n_sites`` sites from a config.

    The first two-site Hamiltonian term of the template is used on every
    bond (Heisenberg coupling if there is none) and the first one-site
    term on every site. Alice holds site 0 and Bob site ``n_sites - 1``.
    A product initial state repeats the template's first-site state on
    every site; any other kind gives the maximally mixed state. The
    envelope and encoding are taken from the template, with an automatic
    ``zeta`` recomputed for each chain.
    """
    template = config_from_dict(raw)
    tnet = template.network
    d = tnet.local_dims[0]
    if any(x != d for x in tnet.local_dims):
        raise ConfigError("distance sweeps need equal local dimensions")
    bond = next((term.matrix for term in tnet.terms if len(term.support) == 2), None)
    if bond is None:
        if d != 2:
            raise ConfigError("distance sweeps need a two-site term for non-qubit sites")
        bond = HEISENBERG_BOND
    onsite = next((term.matrix for term in tnet.terms if len(term.support) == 1), None)
    state = None
    init = raw["initial_state"]
    if init["kind"] == "product":
        site = partial_trace(tnet.initial_state, tnet.local_dims, [0])
        state = site
        for _ in range(n_sites - 1):
            state = np.kron(state, site)
    net = chain_network(n_sites, bond=bond, onsite=onsite, state=state, local_dim=d)
    lr_raw = dict(raw["lr"])
    if lr_raw.get("zeta") in ("auto", "auto_zeta"):
        lr_raw["zeta"] = heuristic_zeta(net)
    lr = LRParams(**lr_raw)
    encoding = _encoding(raw["encoding"], d)
    return net, lr, encoding, time


def _sweep_task(task) -> dict:
    raw, parameter, value, time, seed, restarts, epsilon_scale = task
    row = {"param": value}
    try:
        if parameter == "time":
            cfg = config_from_dict(raw)
            net, lr, enc, t = cfg.network, cfg.lr, cfg.encoding, value
        else:
            net, lr, enc, t = chain_from_template(raw, int(value) + 1, time)
        row.update(verify_row(net, lr, enc, t, seed, restarts, epsilon_scale))
    except Exception as exc:  # recorded per row, never fatal
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def cmd_sweep(cfg: NetworkConfig, parameter: str, out, parallelism: int = 1, seed: int = 0,
              restarts: int = distances.DEFAULT_RESTARTS, fmt: str = "csv",
              epsilon_scale: float = 1.0, lengths=(2, 3, 4, 5, 6), time=None) -> int:
    """Verify rows over the time grid or over chain lengths.

    For ``parameter="distance"`` the ``param`` column is ``d(A, B)`` for
    path graphs with ``lengths`` sites, all evaluated at ``time`` (the end
    of the time grid by default). Rows are written in input order whatever
    the worker count; a failing row records its error and the sweep goes
    on.
    """
    if parameter == "time":
        values = list(cfg.times)
    elif parameter == "distance":
        if any(n < 2 for n in lengths):
            raise CliError("chain lengths must be at least 2")
        values = [n - 1 for n in lengths]
    else:
        raise CliError(f"unknown sweep parameter {parameter!r}")
    t = cfg.times[-1] if time is None else time
    tasks = [(cfg.raw, parameter, v, t, seed, restarts, epsilon_scale) for v in values]
    if parallelism > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            rows = list(pool.map(_sweep_task, tasks))
    else:
        rows = [_sweep_task(task) for task in tasks]
    for r in rows:
        if r.get("error"):
            print(f"row param={r['param']!r} failed: {r['error']}", file=sys.stderr)
        elif r.get("diamond_ok") == SKIPPED:
            print(f"row param={r['param']!r}: diamond check skipped (Choi dimension too large)",
                  file=sys.stderr)
    _write(out, render(rows, SWEEP_COLUMNS, fmt))
    if any(_row_failed(r) for r in rows):
        return 2
    return 1 if any(r.get("error") for r in rows) else 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lrcap", description="Signaling and capacity bounds on spin networks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", required=True, help="network configuration (JSON or YAML)")
        p.add_argument("--out", default=None, help="output file (stdout if omitted)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    def measuring(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--restarts", type=int, default=distances.DEFAULT_RESTARTS,
                       help="random starts for the induced-distance search")
        p.add_argument("--epsilon-scale", type=float, default=1.0,
                       help="multiply the envelope (for testing that violations are caught)")

    common(sub.add_parser("bound", help="capacity bounds over the time grid"))
    p = sub.add_parser("verify", help="measure channel distances against the bounds")
    common(p)
    measuring(p)
    p = sub.add_parser("sweep", help="verify over a time grid or chain lengths")
    common(p)
    measuring(p)
    p.add_argument("--parameter", choices=("time", "distance"), default="time")
    p.add_argument("--parallelism", type=int, default=1)
    p.add_argument("--lengths", default="2,3,4,5,6", help="chain lengths for distance sweeps")
    p.add_argument("--time", type=float, default=None, help="evolution time for distance sweeps")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "restarts", 0) < 0:
            raise CliError("--restarts must be non-negative")
        if getattr(args, "parallelism", 1) < 1:
            raise CliError("--parallelism must be at least 1")
        cfg = load_config(args.config)
        if args.command == "bound":
            return cmd_bound(cfg, args.out, args.format)
        if args.command == "verify":
            return cmd_verify(cfg, args.out, args.seed, args.restarts, args.format, args.epsilon_scale)
        try:
            lengths = tuple(int(x) for x in args.lengths.split(","))
        except ValueError:
            raise CliError(f"--lengths must be comma-separated integers, got {args.lengths!r}") from None
        return cmd_sweep(cfg, args.parameter, args.out, args.parallelism, args.seed, args.restarts,
                         args.format, args.epsilon_scale, lengths, args.time)
    except (CliError, ConfigError) as exc:
        print(f"lrcap: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"lrcap: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
