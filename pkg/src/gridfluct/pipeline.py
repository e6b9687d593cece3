"""Variance-route dispatch, route comparison, sweeps and report serialization.

``run_variance`` takes a validated network through synchronous-state
solve, security check and linearization, then runs the requested route.
The closed-form route additionally requires a homogeneous complete or
star topology; arbitrary node labellings are remapped to the canonical
indexing and the resulting blocks mapped back.
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Any, Iterable, TextIO

import numpy as np

from .closedforms import HomogeneousParams, complete_report, star_report
from .errors import AssumptionViolatedError, ValidationError
from .graphs import canonical_complete, canonical_star
from .montecarlo import SimConfig, default_sim_config, simulate_covariance
from .netfile import HomogeneousBase, SweepSpec, format_number
from .swing import LinearizedSystem, PowerNetwork, linearize, solve_synchronous_state
from .variance import (
    METHOD_CLOSED,
    CovarianceReport,
    asymptotic_variance_numeric,
    asymptotic_variance_uniform_ratio,
    first_order_report,
    make_report,
    uniform_damping_inertia_ratio,
)

VARIANCE_METHODS = ("numeric", "uniform", "closed", "first-order", "mc")
COMPARE_METHODS = ("numeric", "uniform", "closed")

UNIFORM_TOL = 1e-9


@dataclass(frozen=True)
class CanonicalForm:
    """Mapping of a homogeneous network onto canonical complete/star indices."""

    kind: str
    params: HomogeneousParams
    node_to_canonical: np.ndarray  # user node index-1 -> canonical index-1
    line_to_canonical: np.ndarray  # user line index-1 -> canonical index-1
    line_signs: np.ndarray  # +1 if the user orientation matches canonical


def _uniform_value(values: np.ndarray, what: str) -> float:
    center = float(values.mean())
    if np.abs(values - center).max() > UNIFORM_TOL * max(abs(center), 1e-300):
        raise AssumptionViolatedError(f"closed forms require uniform {what} across the network")
    return center


def canonicalize_homogeneous(lin: LinearizedSystem) -> CanonicalForm:
    """Classify a homogeneous linearized network as complete or star.

    Raises AssumptionViolatedError when the weights/inertia/damping are not
    uniform or the topology is neither complete nor a star.
    """
    n, m = lin.node_count, lin.line_count
    gamma = _uniform_value(lin.graph.weights, "line weights")
    eta = _uniform_value(lin.inertia, "inertia")
    damping = _uniform_value(lin.damping, "damping")

    degree = np.zeros(n, dtype=int)
    for i, j, _ in lin.graph.edges:
        degree[i - 1] += 1
        degree[j - 1] += 1

    if m == n * (n - 1) // 2:
        kind = "complete"
        node_map = np.arange(n)
    elif m == n - 1 and degree.max() == n - 1:
        kind = "star"
        root = int(degree.argmax())
        node_map = np.empty(n, dtype=int)
        node_map[root] = 0
        node_map[np.arange(n) != root] = np.arange(1, n)
    else:
        raise AssumptionViolatedError(
            "closed forms defined only for complete/star topologies; "
            f"this network has {n} nodes and {m} lines with neither shape"
        )

    canonical = canonical_complete(n, gamma) if kind == "complete" else canonical_star(n, gamma)
    canonical_index = {(i, j): k for k, (i, j, _) in enumerate(canonical.edges)}
    line_map = np.empty(m, dtype=int)
    signs = np.empty(m)
    for k, (i, j, _) in enumerate(lin.graph.edges):
        ci, cj = node_map[i - 1] + 1, node_map[j - 1] + 1
        if (ci, cj) in canonical_index:
            line_map[k] = canonical_index[(ci, cj)]
            signs[k] = 1.0
        else:
            line_map[k] = canonical_index[(cj, ci)]
            signs[k] = -1.0

    noise = np.empty(n)
    noise[node_map] = lin.noise
    params = HomogeneousParams(n, gamma, eta, damping, noise)
    return CanonicalForm(kind, params, node_map, line_map, signs)


def closed_form_report(lin: LinearizedSystem) -> CovarianceReport:
    """Closed-form covariance of a homogeneous complete/star network,
    remapped back to the network's own node and line ordering."""
    form = canonicalize_homogeneous(lin)
    report = complete_report(form.params) if form.kind == "complete" else star_report(form.params)

    nodes = form.node_to_canonical
    lines = form.line_to_canonical
    signs = form.line_signs
    q_delta = signs[:, None] * report.q_delta[np.ix_(lines, lines)] * signs[None, :]
    q_omega = report.q_omega[np.ix_(nodes, nodes)]
    q_cross = report.q_delta_omega[np.ix_(nodes, lines)] * signs[None, :]
    diagnostics = dict(report.diagnostics)
    diagnostics["canonical_kind"] = form.kind
    return make_report(q_delta, q_omega, q_cross, METHOD_CLOSED, diagnostics)


def linearized(net: PowerNetwork) -> LinearizedSystem:
    """Synchronous state, security check and linearization in one step."""
    return linearize(net, solve_synchronous_state(net))


def run_variance(
    net: PowerNetwork,
    method: str,
    mc_config: SimConfig | None = None,
) -> CovarianceReport:
    """Run one variance route on a network.

    ``method`` is one of numeric | uniform | closed | first-order | mc.
    Method preconditions (uniform ratio, homogeneous complete/star) raise
    AssumptionViolatedError naming the violated assumption.
    """
    if method not in VARIANCE_METHODS:
        raise ValidationError(
            f"unknown method {method!r}; choose from {', '.join(VARIANCE_METHODS)}"
        )
    lin = linearized(net)
    if method == "numeric":
        return asymptotic_variance_numeric(lin)
    if method == "uniform":
        return asymptotic_variance_uniform_ratio(lin)
    if method == "closed":
        return closed_form_report(lin)
    if method == "first-order":
        return first_order_report(lin)
    return simulate_covariance(lin, mc_config)


def applicable_compare_methods(lin: LinearizedSystem) -> list[str]:
    """Exact stationary routes whose preconditions this network satisfies."""
    methods = ["numeric"]
    try:
        uniform_damping_inertia_ratio(lin)
        methods.append("uniform")
    except AssumptionViolatedError:
        pass
    try:
        canonicalize_homogeneous(lin)
        methods.append("closed")
    except AssumptionViolatedError:
        pass
    return methods


@dataclass(frozen=True)
class Comparison:
    """Reports per route plus the worst entrywise relative discrepancy."""

    reports: dict[str, CovarianceReport]
    max_relative_discrepancy: float


def relative_discrepancy(a: np.ndarray, b: np.ndarray) -> float:
    """max |a - b| / (1 + |b|) over entries."""
    return float((np.abs(a - b) / (1.0 + np.abs(b))).max(initial=0.0))


def compare_variance(net: PowerNetwork, methods: Iterable[str] | None = None) -> Comparison:
    """Run all applicable exact routes and report their worst disagreement."""
    lin = linearized(net)
    selected = list(methods) if methods is not None else applicable_compare_methods(lin)
    for method in selected:
        if method not in COMPARE_METHODS:
            raise ValidationError(
                f"compare supports {', '.join(COMPARE_METHODS)}; got {method!r}"
            )
    if "numeric" not in selected:
        selected.insert(0, "numeric")

    reports: dict[str, CovarianceReport] = {}
    for method in selected:
        if method == "numeric":
            reports[method] = asymptotic_variance_numeric(lin)
        elif method == "uniform":
            reports[method] = asymptotic_variance_uniform_ratio(lin)
        else:
            reports[method] = closed_form_report(lin)

    reference = reports["numeric"]
    worst = 0.0
    for method, report in reports.items():
        if method == "numeric":
            continue
        worst = max(
            worst,
            relative_discrepancy(report.q_delta, reference.q_delta),
            relative_discrepancy(report.q_omega, reference.q_omega),
            relative_discrepancy(report.q_delta_omega, reference.q_delta_omega),
        )
    return Comparison(reports, worst)


# ---------------------------------------------------------------------------
# Report serialization
# ---------------------------------------------------------------------------


def report_rows(report: CovarianceReport, extra: dict[str, Any] | None = None) -> list[dict]:
    """Long-format rows: quantity, index_i, index_j, value, method, stderr."""
    stderr_delta = report.diagnostics.get("stderr_delta")
    stderr_omega = report.diagnostics.get("stderr_omega")
    stderr_cross = report.diagnostics.get("stderr_cross")
    rows = []

    def emit(quantity: str, block, stderr_block) -> None:
        if block is None:
            return
        rows_n, cols_n = block.shape
        for i in range(rows_n):
            for j in range(cols_n):
                row = {
                    "quantity": quantity,
                    "index_i": i + 1,
                    "index_j": j + 1,
                    "value": block[i, j],
                    "method": report.method,
                    "stderr": stderr_block[i, j] if stderr_block is not None else None,
                }
                if extra:
                    row.update(extra)
                rows.append(row)

    emit("delta", report.q_delta, stderr_delta)
    emit("omega", report.q_omega, stderr_omega)
    emit("cross", report.q_delta_omega, stderr_cross)
    return rows


def write_rows_csv(rows: list[dict], fh: TextIO, fieldnames: list[str]) -> None:
    writer = csv.DictWriter(fh, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        formatted = {}
        for key in fieldnames:
            value = row.get(key)
            if isinstance(value, bool):
                formatted[key] = str(value).lower()
            elif isinstance(value, float):
                formatted[key] = format_number(value)
            elif value is None:
                formatted[key] = ""
            else:
                formatted[key] = value
        writer.writerow(formatted)


def write_report(report: CovarianceReport, fh: TextIO, fmt: str = "csv") -> None:
    """Serialize one report as CSV (long format) or JSON."""
    if fmt == "csv":
        write_rows_csv(
            report_rows(report), fh,
            ["quantity", "index_i", "index_j", "value", "method", "stderr"],
        )
    elif fmt == "json":
        payload = {
            "method": report.method,
            "q_delta": report.q_delta.tolist(),
            "q_omega": None if report.q_omega is None else report.q_omega.tolist(),
            "q_delta_omega": None
            if report.q_delta_omega is None
            else report.q_delta_omega.tolist(),
            "diagnostics": _jsonable(report.diagnostics),
        }
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    else:
        raise ValidationError(f"unknown output format {fmt!r}; use 'csv' or 'json'")


def emit_report(report: CovarianceReport, path, fmt: str = "csv") -> None:
    """Serialize one report to a file path (csv long format or json)."""
    with open(path, "w") as fh:
        write_report(report, fh, fmt)


def write_comparison(comparison: Comparison, fh: TextIO, fmt: str = "csv") -> None:
    """Serialize a route comparison, one row per entry per method."""
    extra = {"max_relative_discrepancy": comparison.max_relative_discrepancy}
    if fmt == "csv":
        rows = []
        for method in sorted(comparison.reports):
            rows.extend(report_rows(comparison.reports[method], extra=extra))
        write_rows_csv(
            rows, fh,
            ["quantity", "index_i", "index_j", "value", "method", "stderr",
             "max_relative_discrepancy"],
        )
    elif fmt == "json":
        payload = {
            "max_relative_discrepancy": comparison.max_relative_discrepancy,
            "methods": {
                method: {
                    "q_delta": r.q_delta.tolist(),
                    "q_omega": r.q_omega.tolist(),
                    "q_delta_omega": r.q_delta_omega.tolist(),
                }
                for method, r in sorted(comparison.reports.items())
            },
        }
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    else:
        raise ValidationError(f"unknown output format {fmt!r}; use 'csv' or 'json'")


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


def _grid_points(spec: SweepSpec) -> list[dict[str, float]]:
    points: list[dict[str, float]] = [{}]
    for parameter, grid in spec.axes:
        points = [{**point, parameter: value} for point in points for value in grid]
    return points


def _apply_point(spec: SweepSpec, point: dict[str, float]) -> PowerNetwork:
    base = spec.base
    if isinstance(base, HomogeneousBase):
        updates: dict[str, Any] = {}
        for parameter, value in point.items():
            updates[parameter] = int(round(value)) if parameter == "n" else value
        return replace(base, **updates).network()
    scales = {param: point.get(param, 1.0) for param in
              ("capacity_scale", "inertia_scale", "damping_scale", "noise_scale")}
    return PowerNetwork(
        base.topology.with_weights(base.capacities * scales["capacity_scale"]),
        base.inertia * scales["inertia_scale"],
        base.damping * scales["damping_scale"],
        base.power,
        base.noise * scales["noise_scale"],
        labels=base.labels,
    )


def _quantity_value(report: CovarianceReport, block: str, i: int, j: int) -> tuple[float | None, float | None]:
    blocks = {
        "delta": (report.q_delta, report.diagnostics.get("stderr_delta")),
        "omega": (report.q_omega, report.diagnostics.get("stderr_omega")),
        "cross": (report.q_delta_omega, report.diagnostics.get("stderr_cross")),
    }
    values, stderr = blocks[block]
    if values is None:
        return None, None
    if not (1 <= i <= values.shape[0] and 1 <= j <= values.shape[1]):
        raise ValidationError(f"quantity {block}[{i},{j}] out of range for shape {values.shape}")
    return float(values[i - 1, j - 1]), (None if stderr is None else float(stderr[i - 1, j - 1]))


def _sweep_cell(spec: SweepSpec, point: dict[str, float], method: str, seed: int | None) -> dict:
    net = _apply_point(spec, point)
    mc_config = None
    if method == "mc":
        overrides = dict(spec.mc_overrides)
        if seed is not None:
            overrides["master_seed"] = seed
        mc_config = default_sim_config(linearized(net), **overrides)
    report = run_variance(net, method, mc_config=mc_config)
    row: dict[str, Any] = dict(point)
    row["method"] = method
    for block, i, j in spec.quantities:
        value, stderr = _quantity_value(report, block, i, j)
        row[f"{block}_{i}_{j}"] = value
        if method == "mc":
            row[f"{block}_{i}_{j}_stderr"] = stderr
    return row


def thread_count() -> int:
    """Worker cap from GRIDFLUCT_THREADS (default 1, i.e. serial)."""
    raw = os.environ.get("GRIDFLUCT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValidationError(f"GRIDFLUCT_THREADS must be an integer, got {raw!r}") from None


def run_sweep(spec: SweepSpec, seed: int | None = None) -> list[dict]:
    """One row per grid point per method, in deterministic order.

    Grid points enumerate the axes in file order (last axis fastest);
    independent cells may evaluate on up to GRIDFLUCT_THREADS workers, but
    the output assembly order is fixed regardless.
    """
    points = _grid_points(spec)
    cells = [(point, method) for point in points for method in spec.methods]
    workers = thread_count()
    if workers == 1:
        return [_sweep_cell(spec, point, method, seed) for point, method in cells]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_sweep_cell, spec, point, method, seed) for point, method in cells]
        return [future.result() for future in futures]


def sweep_fieldnames(spec: SweepSpec) -> list[str]:
    names = [parameter for parameter, _ in spec.axes]
    names.append("method")
    for block, i, j in spec.quantities:
        names.append(f"{block}_{i}_{j}")
        if "mc" in spec.methods:
            names.append(f"{block}_{i}_{j}_stderr")
    return names


def write_sweep(rows: list[dict], spec: SweepSpec, fh: TextIO) -> None:
    write_rows_csv(rows, fh, sweep_fieldnames(spec))
