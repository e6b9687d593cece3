"""Versioned JSON formats for networks and parameter sweeps.

A network file looks like::

    {
      "schema_version": 1,
      "nodes": [
        {"id": "a", "inertia": 0.5, "damping": 0.3, "power": 0.0, "noise": 0.04},
        ...
      ],
      "lines": [{"from": "a", "to": "b", "capacity": 10.0}, ...]
    }

Node order in the file defines node indices 1..n.  A sweep file names a
base (a homogeneous complete/star block or a network file), the grid
axes, the variance methods to run and the report scalars to record.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .closedforms import HomogeneousParams
from .errors import ValidationError
from .graphs import WeightedGraph, canonical_complete, canonical_star
from .swing import PowerNetwork

SCHEMA_VERSION = 1
SWEEP_METHODS = ("numeric", "uniform", "closed", "first-order", "mc")
HOMOGENEOUS_AXES = ("gamma", "eta", "damping", "n")
NETWORK_AXES = ("capacity_scale", "inertia_scale", "damping_scale", "noise_scale")
QUANTITY_BLOCKS = ("delta", "omega", "cross")
MC_OVERRIDE_KEYS = ("trajectories", "master_seed", "dt", "burn_in", "horizon", "sample_stride")


def validate_mc_overrides(overrides: Any, context: str) -> dict:
    if not isinstance(overrides, dict):
        raise ValidationError(f"{context}: Monte Carlo overrides must be an object")
    for key in overrides:
        if key not in MC_OVERRIDE_KEYS:
            raise ValidationError(
                f"{context}: unknown Monte Carlo field {key!r}; "
                f"allowed: {', '.join(MC_OVERRIDE_KEYS)}"
            )
    return dict(overrides)


def format_number(x: float) -> str:
    """17-significant-digit decimal form, losslessly round-trippable."""
    return format(float(x), ".17g")


def _require(mapping: dict, key: str, context: str) -> Any:
    if key not in mapping:
        raise ValidationError(f"{context}: missing required field {key!r}")
    return mapping[key]


def _number(value: Any, context: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{context}: expected a number, got {value!r}")
    return float(value)


def _load_json(path: str | Path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"{path}: parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    except OSError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def network_from_dict(data: Any, context: str = "network") -> PowerNetwork:
    """Validated PowerNetwork from a parsed network document."""
    if not isinstance(data, dict):
        raise ValidationError(f"{context}: document must be an object")
    version = _require(data, "schema_version", context)
    if version != SCHEMA_VERSION:
        raise ValidationError(f"{context}: unsupported schema_version {version!r}")

    nodes = _require(data, "nodes", context)
    lines = _require(data, "lines", context)
    if not isinstance(nodes, list) or not nodes:
        raise ValidationError(f"{context}: 'nodes' must be a non-empty list")
    if not isinstance(lines, list):
        raise ValidationError(f"{context}: 'lines' must be a list")

    ids: dict[str, int] = {}
    inertia, damping, power, noise = [], [], [], []
    for pos, node in enumerate(nodes):
        where = f"{context}: nodes[{pos}]"
        if not isinstance(node, dict):
            raise ValidationError(f"{where}: must be an object")
        node_id = str(_require(node, "id", where))
        if node_id in ids:
            raise ValidationError(f"{where}: duplicate node id {node_id!r}")
        ids[node_id] = pos + 1
        for name, target, check in (
            ("inertia", inertia, "positive"),
            ("damping", damping, "positive"),
            ("power", power, None),
            ("noise", noise, "non-negative"),
        ):
            value = _number(_require(node, name, where), f"{where}.{name}")
            if check == "positive" and not value > 0:
                raise ValidationError(f"{where}: field '{name}' must be positive, got {value}")
            if check == "non-negative" and value < 0:
                raise ValidationError(f"{where}: field '{name}' must be non-negative, got {value}")
            target.append(value)

    edges = []
    for pos, line in enumerate(lines):
        where = f"{context}: lines[{pos}]"
        if not isinstance(line, dict):
            raise ValidationError(f"{where}: must be an object")
        src = str(_require(line, "from", where))
        dst = str(_require(line, "to", where))
        for endpoint in (src, dst):
            if endpoint not in ids:
                raise ValidationError(f"{where}: unknown node id {endpoint!r}")
        if src == dst:
            raise ValidationError(f"{where}: line endpoints must differ, got {src!r}")
        capacity = _number(_require(line, "capacity", where), f"{where}.capacity")
        if not capacity > 0:
            raise ValidationError(f"{where}: field 'capacity' must be positive, got {capacity}")
        edges.append((ids[src], ids[dst], capacity))

    seen = set()
    for i, j, _ in edges:
        pair = (min(i, j), max(i, j))
        if pair in seen:
            raise ValidationError(f"{context}: duplicate line between nodes {pair}")
        seen.add(pair)

    topology = WeightedGraph(len(nodes), tuple(edges))
    return PowerNetwork(
        topology,
        np.array(inertia),
        np.array(damping),
        np.array(power),
        np.array(noise),
        labels=tuple(ids),
    )


def load_network(path: str | Path) -> PowerNetwork:
    """Load and validate a network file (connectivity included)."""
    return network_from_dict(_load_json(path), context=str(path))


def network_to_dict(net: PowerNetwork) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "nodes": [
            {
                "id": net.labels[i],
                "inertia": net.inertia[i],
                "damping": net.damping[i],
                "power": net.power[i],
                "noise": net.noise[i],
            }
            for i in range(net.node_count)
        ],
        "lines": [
            {"from": net.labels[i - 1], "to": net.labels[j - 1], "capacity": w}
            for i, j, w in net.topology.edges
        ],
    }


def emit_network(net: PowerNetwork, path: str | Path) -> None:
    """Write a network file that loads back to an identical network."""
    with open(path, "w") as fh:
        json.dump(network_to_dict(net), fh, indent=2, sort_keys=True)
        fh.write("\n")


@dataclass(frozen=True)
class HomogeneousBase:
    """Sweep base: canonical complete/star graph with uniform parameters."""

    kind: str
    n: int
    gamma: float
    eta: float
    damping: float
    noise_by_node: tuple[tuple[int, float], ...]

    def params(self) -> HomogeneousParams:
        noise = np.zeros(self.n)
        for node, amplitude in self.noise_by_node:
            if not 1 <= node <= self.n:
                raise ValidationError(f"noise node index {node} out of range 1..{self.n}")
            noise[node - 1] = amplitude
        return HomogeneousParams(self.n, self.gamma, self.eta, self.damping, noise)

    def network(self) -> PowerNetwork:
        p = self.params()
        graph = canonical_complete(p.n, p.gamma) if self.kind == "complete" else canonical_star(p.n, p.gamma)
        ones = np.ones(p.n)
        return PowerNetwork(graph, p.eta * ones, p.damping * ones, np.zeros(p.n), p.noise)


@dataclass(frozen=True)
class SweepSpec:
    """Parsed sweep document: base, grid axes, methods and recorded scalars."""

    base: HomogeneousBase | PowerNetwork
    axes: tuple[tuple[str, tuple[float, ...]], ...]
    methods: tuple[str, ...]
    quantities: tuple[tuple[str, int, int], ...]
    mc_overrides: dict = field(default_factory=dict)


def sweep_from_dict(data: Any, context: str = "sweep", base_dir: Path | None = None) -> SweepSpec:
    if not isinstance(data, dict):
        raise ValidationError(f"{context}: document must be an object")
    version = _require(data, "schema_version", context)
    if version != SCHEMA_VERSION:
        raise ValidationError(f"{context}: unsupported schema_version {version!r}")

    base_doc = _require(data, "base", context)
    if not isinstance(base_doc, dict):
        raise ValidationError(f"{context}: 'base' must be an object")
    kind = str(_require(base_doc, "kind", f"{context}.base"))
    base: HomogeneousBase | PowerNetwork
    if kind in ("complete", "star"):
        noise_doc = _require(base_doc, "noise", f"{context}.base")
        if not isinstance(noise_doc, dict) or not noise_doc:
            raise ValidationError(f"{context}.base: 'noise' must map node index to amplitude")
        noise_by_node = tuple(
            (int(node), _number(value, f"{context}.base.noise[{node}]"))
            for node, value in sorted(noise_doc.items(), key=lambda kv: int(kv[0]))
        )
        base = HomogeneousBase(
            kind=kind,
            n=int(_number(_require(base_doc, "n", f"{context}.base"), f"{context}.base.n")),
            gamma=_number(_require(base_doc, "gamma", f"{context}.base"), f"{context}.base.gamma"),
            eta=_number(_require(base_doc, "eta", f"{context}.base"), f"{context}.base.eta"),
            damping=_number(_require(base_doc, "damping", f"{context}.base"), f"{context}.base.damping"),
            noise_by_node=noise_by_node,
        )
        allowed_axes = HOMOGENEOUS_AXES
    elif kind == "network":
        path = Path(str(_require(base_doc, "path", f"{context}.base")))
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        base = load_network(path)
        allowed_axes = NETWORK_AXES
    else:
        raise ValidationError(
            f"{context}.base: kind must be 'complete', 'star' or 'network', got {kind!r}"
        )

    axes_doc = _require(data, "axes", context)
    if not isinstance(axes_doc, list) or not axes_doc:
        raise ValidationError(f"{context}: 'axes' must be a non-empty list")
    axes = []
    for pos, axis in enumerate(axes_doc):
        where = f"{context}: axes[{pos}]"
        if not isinstance(axis, dict):
            raise ValidationError(f"{where}: must be an object")
        parameter = str(_require(axis, "parameter", where))
        if parameter not in allowed_axes:
            raise ValidationError(
                f"{where}: parameter {parameter!r} not sweepable for this base; "
                f"allowed: {', '.join(allowed_axes)}"
            )
        grid = _require(axis, "grid", where)
        if not isinstance(grid, list) or not grid:
            raise ValidationError(f"{where}: 'grid' must be a non-empty list")
        axes.append((parameter, tuple(_number(v, f"{where}.grid") for v in grid)))

    methods_doc = _require(data, "methods", context)
    if not isinstance(methods_doc, list) or not methods_doc:
        raise ValidationError(f"{context}: 'methods' must be a non-empty list")
    methods = []
    for method in methods_doc:
        if method not in SWEEP_METHODS:
            raise ValidationError(
                f"{context}: unknown method {method!r}; allowed: {', '.join(SWEEP_METHODS)}"
            )
        methods.append(str(method))

    quantities_doc = _require(data, "quantities", context)
    if not isinstance(quantities_doc, list) or not quantities_doc:
        raise ValidationError(f"{context}: 'quantities' must be a non-empty list")
    quantities = []
    for pos, quantity in enumerate(quantities_doc):
        where = f"{context}: quantities[{pos}]"
        if not isinstance(quantity, dict):
            raise ValidationError(f"{where}: must be an object")
        block = str(_require(quantity, "block", where))
        if block not in QUANTITY_BLOCKS:
            raise ValidationError(
                f"{where}: block must be one of {', '.join(QUANTITY_BLOCKS)}, got {block!r}"
            )
        i = int(_number(_require(quantity, "i", where), f"{where}.i"))
        j = int(_number(_require(quantity, "j", where), f"{where}.j"))
        if i < 1 or j < 1:
            raise ValidationError(f"{where}: indices are 1-based and must be positive")
        quantities.append((block, i, j))

    mc_overrides = validate_mc_overrides(data.get("mc", {}), f"{context}.mc")
    return SweepSpec(base, tuple(axes), tuple(methods), tuple(quantities), mc_overrides)


def load_sweep(path: str | Path) -> SweepSpec:
    """Load and validate a sweep file; relative base paths resolve next to it."""
    path = Path(path)
    return sweep_from_dict(_load_json(path), context=str(path), base_dir=path.parent)
