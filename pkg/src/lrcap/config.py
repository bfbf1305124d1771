"""Network configuration files.

A configuration is a JSON object (YAML with the same structure is accepted
for files ending in ``.yaml``/``.yml``). Complex matrices are written as
``{"re": [[...]], "im": [[...]]}`` with ``im`` optional. Qubit Hamiltonian
terms may instead give ``"pauli": {"XX": 1.0, "ZZ": 0.5}``.

Example::

    {
      "sites": [{"id": "q0", "dim": 2}, {"id": "q1", "dim": 2}, {"id": "q2", "dim": 2}],
      "edges": [["q0", "q1"], ["q1", "q2"]],
      "hamiltonian": [{"support": ["q0", "q1"], "pauli": {"XX": 1, "YY": 1, "ZZ": 1}}],
      "partition": {"a": ["q0"], "b": ["q2"], "c": ["q1"]},
      "initial_state": {"kind": "product", "states": [0, 0, 1]},
      "lr": {"kind": "finite_range", "zeta": "auto_zeta", "dbar": 1},
      "encoding": {"kind": "swap"},
      "time_grid": {"start": 0.0, "stop": 0.05, "points": 8}
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from .channels import (
    Channel,
    Encoding,
    SncInstance,
    classical_encoding_family,
    identity_encoding,
    swap_encoding,
)
from .lieb_robinson import LRParams, heuristic_zeta
from .models import pauli_string
from .network import Graph, HamiltonianTerm, Partition, SpinNetwork, dimension_of


class ConfigError(ValueError):
    pass


_MATRIX = {
    "type": "object",
    "properties": {
        "re": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
        "im": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
    },
    "required": ["re"],
    "additionalProperties": False,
}
_VECTOR = {
    "type": "object",
    "properties": {
        "re": {"type": "array", "items": {"type": "number"}},
        "im": {"type": "array", "items": {"type": "number"}},
    },
    "required": ["re"],
    "additionalProperties": False,
}
_ID = {"type": ["string", "integer"]}

SCHEMA = {
    "type": "object",
    "required": ["sites", "edges", "hamiltonian", "partition", "initial_state", "lr", "encoding", "time_grid"],
    "additionalProperties": False,
    "properties": {
        "sites": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["id", "dim"],
                "properties": {"id": _ID, "dim": {"type": "integer", "minimum": 1}},
                "additionalProperties": False,
            },
        },
        "edges": {"type": "array", "items": {"type": "array", "items": _ID, "minItems": 2, "maxItems": 2}},
        "hamiltonian": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["support"],
                "properties": {
                    "support": {"type": "array", "items": _ID, "minItems": 1},
                    "matrix": _MATRIX,
                    "pauli": {"type": "object", "additionalProperties": {"type": "number"}},
                },
                "oneOf": [{"required": ["matrix"]}, {"required": ["pauli"]}],
                "additionalProperties": False,
            },
        },
        "partition": {
            "type": "object",
            "required": ["a", "b"],
            "properties": {k: {"type": "array", "items": _ID} for k in ("a", "b", "c")},
            "additionalProperties": False,
        },
        "initial_state": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["product", "maximally_mixed", "explicit"]},
                "states": {"type": "array", "items": {"oneOf": [{"type": "integer", "minimum": 0}, _VECTOR]}},
                "matrix": _MATRIX,
            },
            "additionalProperties": False,
        },
        "lr": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["finite_range", "exponential_decay", "power_law"]},
                "zeta": {"oneOf": [{"type": "number", "exclusiveMinimum": 0}, {"enum": ["auto", "auto_zeta"]}]},
                "dbar": {"type": "integer", "minimum": 1},
                "mu": {"type": "number", "exclusiveMinimum": 0},
                "v": {"type": "number", "exclusiveMinimum": 0},
                "c": {"type": "number", "exclusiveMinimum": 0},
                "s": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
        "encoding": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["identity", "swap", "classical_list", "explicit_kraus"]},
                "memory_dim": {"type": "integer", "minimum": 1},
                "maps": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "required": ["kraus"],
                        "properties": {"kraus": {"type": "array", "items": _MATRIX, "minItems": 1}},
                        "additionalProperties": False,
                    },
                },
                "kraus": {"type": "array", "items": _MATRIX, "minItems": 1},
            },
            "additionalProperties": False,
        },
        "time_grid": {
            "type": "object",
            "required": ["start", "stop", "points"],
            "properties": {
                "start": {"type": "number"},
                "stop": {"type": "number"},
                "points": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
    },
}


@dataclass(frozen=True, eq=False)
class NetworkConfig:
    """A validated configuration with its physics objects built."""

    network: SpinNetwork
    lr: LRParams
    encoding: Encoding
    times: tuple
    raw: dict = field(repr=False)
    source: str = ""

    def instance(self, t: float) -> SncInstance:
        return SncInstance(self.network, self.encoding, t)


def _matrix(obj, where) -> np.ndarray:
    try:
        re = np.array(obj["re"], dtype=float)
        im = np.array(obj.get("im", np.zeros_like(re)), dtype=float)
    except ValueError as exc:
        raise ConfigError(f"{where}: ragged matrix ({exc})") from None
    if re.ndim != 2 or re.shape != im.shape:
        raise ConfigError(f"{where}: re/im must be matrices of equal shape")
    return re + 1j * im


def _vector(obj, where) -> np.ndarray:
    re = np.array(obj["re"], dtype=float)
    im = np.array(obj.get("im", np.zeros_like(re)), dtype=float)
    if re.shape != im.shape:
        raise ConfigError(f"{where}: re/im lengths differ")
    return re + 1j * im


def _parse_text(text: str, path: Path) -> dict:
    if path.suffix.lower() in (".yaml", ".yml"):
        import yaml

        try:
            return yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: YAML parse error: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        lines = text.splitlines()
        context = lines[exc.lineno - 1] if 0 < exc.lineno <= len(lines) else ""
        raise ConfigError(
            f"{path}:{exc.lineno}:{exc.colno}: JSON parse error: {exc.msg}\n    {context}"
        ) from None


def load_config(path) -> NetworkConfig:
    """Read, validate and build a configuration file.

    Raises:
        ConfigError: on parse errors (with line context) and on any invalid
            field (the message names the field).
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return config_from_dict(_parse_text(text, path), source=str(path))


def config_from_dict(raw: dict, source: str = "") -> NetworkConfig:
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid field {where}: {exc.message}") from None

    ids = [s["id"] for s in raw["sites"]]
    if len(set(ids)) != len(ids):
        raise ConfigError("sites: duplicate site id")
    index = {sid: i for i, sid in enumerate(ids)}
    dims = [s["dim"] for s in raw["sites"]]

    def resolve(seq, where):
        out = []
        for sid in seq:
            if sid not in index:
                raise ConfigError(f"{where}: unknown site id {sid!r}")
            out.append(index[sid])
        return out

    try:
        graph = Graph(len(ids), frozenset(tuple(resolve(e, f"edges/{k}")) for k, e in enumerate(raw["edges"])))
    except ValueError as exc:
        raise ConfigError(f"edges: {exc}") from None

    terms = []
    for k, term in enumerate(raw["hamiltonian"]):
        where = f"hamiltonian/{k}"
        support = resolve(term["support"], f"{where}/support")
        if "matrix" in term:
            mat = _matrix(term["matrix"], f"{where}/matrix")
            # matrix factors follow the listed support order; reorder to sorted
            mat = _sort_support(mat, support, dims)
        else:
            if any(dims[v] != 2 for v in support):
                raise ConfigError(f"{where}/pauli: Pauli terms need qubit sites")
            mat = np.zeros((2 ** len(support),) * 2, dtype=complex)
            for label, coeff in term["pauli"].items():
                if len(label) != len(support) or set(label) - set("IXYZ"):
                    raise ConfigError(f"{where}/pauli: bad Pauli label {label!r}")
                mat += coeff * pauli_string(label)
            mat = _sort_support(mat, support, dims)
        try:
            terms.append(HamiltonianTerm(tuple(sorted(support)), mat))
        except ValueError as exc:
            raise ConfigError(f"{where}/matrix: {exc}") from None

    part_raw = raw["partition"]
    try:
        partition = Partition(
            tuple(resolve(part_raw["a"], "partition/a")),
            tuple(resolve(part_raw["b"], "partition/b")),
            tuple(resolve(part_raw.get("c", []), "partition/c")),
        )
        partition.validate(graph)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"partition: {exc}") from None

    state = _initial_state(raw["initial_state"], dims)
    try:
        net = SpinNetwork(graph, tuple(dims), tuple(terms), partition, state)
    except ValueError as exc:
        raise ConfigError(f"network: {exc}") from None

    lr = _lr_params(raw["lr"], net)
    encoding = _encoding(raw["encoding"], dimension_of(net, partition.a))
    grid = raw["time_grid"]
    times = tuple(float(t) for t in np.linspace(grid["start"], grid["stop"], grid["points"]))
    return NetworkConfig(net, lr, encoding, times, raw, source)


def _sort_support(mat, support, dims):
    n = len(support)
    sub = [dims[v] for v in support]
    if mat.shape != (int(np.prod(sub)),) * 2:
        raise ConfigError(f"matrix dimension {mat.shape[0]} does not match support dimension {int(np.prod(sub))}")
    order = list(np.argsort(support))
    if order == list(range(n)):
        return mat
    t = mat.reshape(sub * 2).transpose(order + [n + i for i in order])
    return t.reshape(mat.shape)


def _initial_state(section, dims) -> np.ndarray:
    total = int(np.prod(dims))
    kind = section["kind"]
    if kind == "maximally_mixed":
        return np.eye(total, dtype=complex) / total
    if kind == "explicit":
        if "matrix" not in section:
            raise ConfigError("initial_state/matrix: required for explicit states")
        return _matrix(section["matrix"], "initial_state/matrix")
    states = section.get("states")
    if states is None or len(states) != len(dims):
        raise ConfigError("initial_state/states: need one state per site")
    psi = np.ones(1, dtype=complex)
    for k, (s, d) in enumerate(zip(states, dims)):
        if isinstance(s, int):
            if s >= d:
                raise ConfigError(f"initial_state/states/{k}: basis index out of range")
            v = np.zeros(d, dtype=complex)
            v[s] = 1.0
        else:
            v = _vector(s, f"initial_state/states/{k}")
            if v.size != d or np.linalg.norm(v) == 0:
                raise ConfigError(f"initial_state/states/{k}: wrong length or zero vector")
            v = v / np.linalg.norm(v)
        psi = np.kron(psi, v)
    return np.outer(psi, psi.conj())


def _lr_params(section, net) -> LRParams:
    values = dict(section)
    if values.get("zeta") in ("auto", "auto_zeta"):
        try:
            values["zeta"] = heuristic_zeta(net)
        except ValueError as exc:
            raise ConfigError(f"lr/zeta: {exc}") from None
    try:
        return LRParams(**values)
    except ValueError as exc:
        raise ConfigError(f"lr: {exc}") from None


def _encoding(section, a_dim) -> Encoding:
    kind = section["kind"]
    try:
        if kind == "identity":
            return identity_encoding(section.get("memory_dim", a_dim), a_dim)
        if kind == "swap":
            return swap_encoding(section.get("memory_dim", a_dim), a_dim)
        if kind == "classical_list":
            if "maps" not in section:
                raise ConfigError("encoding/maps: required for classical_list")
            maps = [
                Channel.from_kraus([_matrix(k, f"encoding/maps/{i}/kraus") for k in m["kraus"]])
                for i, m in enumerate(section["maps"])
            ]
            return classical_encoding_family(maps)
        if "kraus" not in section or "memory_dim" not in section:
            raise ConfigError("encoding: explicit_kraus needs kraus and memory_dim")
        kraus = [_matrix(k, f"encoding/kraus/{i}") for i, k in enumerate(section["kraus"])]
        enc = Encoding(Channel.from_kraus(kraus), section["memory_dim"])
        if enc.a_dim != a_dim:
            raise ConfigError("encoding/kraus: dimension is not memory_dim * dim(A)")
        return enc
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"encoding: {exc}") from None
