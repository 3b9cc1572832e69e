"""Deterministic parameter sweeps with CSV emission.

A sweep walks the cartesian product of one or more parameter axes, solves the
model at every grid point, and collects the requested observables into a flat
table. Grid points are independent and may be solved by a thread pool, but
rows are always emitted in lexicographic axis order so the CSV output is
byte-identical across runs and across degrees of parallelism. Failed points
are kept as rows with an error code, never dropped.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .analysis import (
    ansatz_steady_state,
    classify_regime,
    squeeze_vs_drive,
    sync_metrics,
)
from .boost import boost_verdict
from .errors import ConfigError, QvdpError, SweepError
from .model import ModelParams
from .solvers import TruncationOptions, steady_state_auto

__all__ = [
    "Axis",
    "SweepSpec",
    "SweepTable",
    "run_sweep",
    "emit_csv",
    "write_plot_script",
    "PARAM_NAMES",
    "OUTPUT_KINDS",
    "DEFAULT_PARAMS",
]

PARAM_NAMES = ("gamma1", "gamma2", "delta", "omega", "eta", "kappa")

# Baseline parameter values a sweep starts from before `fixed` and the axis
# coordinates are applied; omega is resolved separately by the drive mode.
DEFAULT_PARAMS = {
    "gamma1": 1.0,
    "gamma2": 1e4,
    "delta": 0.0,
    "eta": 0.0,
    "kappa": 0.0,
}

OUTPUT_KINDS = (
    "mrl",
    "populations",
    "occupation",
    "purity",
    "regime",
    "boost-report",
    "ansatz-comparison",
    "squeeze-drive",
)

_STEADY_KINDS = {"mrl", "populations", "occupation", "purity", "regime", "ansatz-comparison"}


@dataclass(frozen=True)
class Axis:
    """One sweep dimension over a model parameter."""

    name: str
    min: float
    max: float
    count: int
    spacing: str = "linear"  # or "log"

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class SweepSpec:
    """Full description of a sweep: grid, fixed parameters, drive mode, outputs."""

    axes: list[Axis]
    fixed: dict = field(default_factory=dict)
    outputs: tuple = ("mrl",)
    drive_mode: str = "fixed"  # or "scheduled"
    drive_schedule: list | None = None  # [(first-axis value, omega), ...]
    n_populations: int = 6
    workers: int = 1
    trunc: TruncationOptions = field(default_factory=TruncationOptions)


def _validate_spec(spec: SweepSpec) -> None:
    if not spec.axes:
        raise ConfigError("sweep needs at least one axis")
    seen = set()
    for ax in spec.axes:
        if ax.name not in PARAM_NAMES:
            raise ConfigError(f"unknown axis parameter {ax.name!r}; pick from {PARAM_NAMES}")
        if ax.name in seen:
            raise ConfigError(f"duplicate axis {ax.name!r}")
        seen.add(ax.name)
        if ax.count < 2:
            raise ConfigError(f"axis {ax.name!r} needs count >= 2, got {ax.count}")
        if not ax.min < ax.max:
            raise ConfigError(f"axis {ax.name!r} needs min < max, got [{ax.min}, {ax.max}]")
        if ax.spacing not in ("linear", "log"):
            raise ConfigError(f"axis {ax.name!r}: spacing must be linear or log")
        if ax.spacing == "log" and ax.min <= 0:
            raise ConfigError(f"axis {ax.name!r}: log spacing requires min > 0")
    for name in spec.fixed:
        if name not in PARAM_NAMES:
            raise ConfigError(f"unknown fixed parameter {name!r}")
        if name in seen:
            raise ConfigError(f"parameter {name!r} is both fixed and an axis")
    for kind in spec.outputs:
        if kind not in OUTPUT_KINDS:
            raise ConfigError(f"unknown output {kind!r}; pick from {OUTPUT_KINDS}")
    if len(set(spec.outputs)) != len(spec.outputs):
        raise ConfigError("duplicate outputs requested")
    if spec.workers < 1:
        raise ConfigError(f"workers must be >= 1, got {spec.workers}")
    if spec.n_populations < 1:
        raise ConfigError(f"n_populations must be >= 1, got {spec.n_populations}")
    if spec.drive_mode not in ("fixed", "scheduled"):
        raise ConfigError(f"drive_mode must be fixed or scheduled, got {spec.drive_mode!r}")
    if spec.drive_mode == "scheduled":
        if "omega" in seen or "omega" in spec.fixed:
            raise ConfigError("scheduled drive conflicts with an omega axis or fixed omega")
        sched = spec.drive_schedule
        if not sched or len(sched) < 2:
            raise ConfigError("scheduled drive needs a table of at least two (value, omega) pairs")
        xs = [float(x) for x, _ in sched]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ConfigError("drive schedule values must be strictly increasing")
        lead = spec.axes[0]
        if lead.min < xs[0] or lead.max > xs[-1]:
            raise ConfigError(
                "drive schedule does not cover the leading axis range "
                f"[{lead.min}, {lead.max}]"
            )


def _output_columns(spec: SweepSpec) -> list[str]:
    cols: list[str] = [ax.name for ax in spec.axes]
    for kind in spec.outputs:
        if kind == "mrl":
            cols.append("mrl")
        elif kind == "populations":
            cols.extend(f"p{i}" for i in range(spec.n_populations))
        elif kind == "occupation":
            cols.append("occupation")
        elif kind == "purity":
            cols.append("purity")
        elif kind == "regime":
            cols.extend(["regime", "p2"])
        elif kind == "boost-report":
            cols.extend(
                [
                    "numerator",
                    "denominator",
                    "numerator_slope",
                    "denominator_slope",
                    "s_analytic",
                    "analytic_slope",
                    "verdict",
                    "numeric_slope",
                ]
            )
        elif kind == "ansatz-comparison":
            cols.extend(["mrl_ansatz", "mrl_full", "ansatz_rel_err", "rho12_over_rho01"])
        elif kind == "squeeze-drive":
            cols.extend(["s_drive", "s_squeeze", "squeeze_mrl", "squeeze_rho02"])
    cols.extend(["dim", "residual", "error"])
    return cols


def _resolve_params(spec: SweepSpec, coords: dict) -> ModelParams:
    values = dict(DEFAULT_PARAMS)
    values["omega"] = None
    values.update(spec.fixed)
    values.update(coords)
    if values["omega"] is None:
        if spec.drive_mode == "scheduled":
            xs = np.array([x for x, _ in spec.drive_schedule], dtype=float)
            ys = np.array([w for _, w in spec.drive_schedule], dtype=float)
            values["omega"] = float(np.interp(coords[spec.axes[0].name], xs, ys))
        else:
            values["omega"] = 1.0 * values["gamma1"]
    return ModelParams(**values)


def _solve_point(spec: SweepSpec, coords: dict) -> dict:
    row: dict = dict(coords)
    row["error"] = ""
    try:
        params = _resolve_params(spec, coords)
        solution = None
        if any(kind in _STEADY_KINDS for kind in spec.outputs):
            solution = steady_state_auto(params, spec.trunc)
            metrics = sync_metrics(solution.rho)
        for kind in spec.outputs:
            if kind == "mrl":
                row["mrl"] = metrics.mrl
            elif kind == "populations":
                pops = metrics.populations
                for i in range(spec.n_populations):
                    row[f"p{i}"] = float(pops[i]) if i < len(pops) else 0.0
            elif kind == "occupation":
                row["occupation"] = metrics.occupation
            elif kind == "purity":
                row["purity"] = metrics.purity
            elif kind == "regime":
                regime = classify_regime(solution.rho, params)
                row["regime"] = regime.label
                row["p2"] = regime.p2
            elif kind == "boost-report":
                report = boost_verdict(params, numeric=True, trunc=spec.trunc)
                row.update(
                    numerator=report.numerator,
                    denominator=report.denominator,
                    numerator_slope=report.numerator_slope,
                    denominator_slope=report.denominator_slope,
                    s_analytic=report.s_analytic,
                    analytic_slope=report.analytic_slope,
                    verdict=report.verdict,
                    numeric_slope=report.numeric_slope,
                )
            elif kind == "ansatz-comparison":
                _, reduced = ansatz_steady_state(params)
                full = sync_metrics(solution.rho).mrl
                rho01 = abs(solution.rho[0, 1])
                rho12 = abs(solution.rho[1, 2])
                row["mrl_ansatz"] = reduced.mrl
                row["mrl_full"] = full
                row["ansatz_rel_err"] = abs(reduced.mrl - full) / full if full > 0 else None
                row["rho12_over_rho01"] = rho12 / rho01 if rho01 > 0 else None
            elif kind == "squeeze-drive":
                cmp = squeeze_vs_drive(
                    ratio=params.gamma2 / params.gamma1,
                    strength=params.omega,
                    delta=params.delta,
                    gamma1=params.gamma1,
                    kappa=params.kappa,
                    trunc=spec.trunc,
                )
                row.update(
                    s_drive=cmp.s_drive,
                    s_squeeze=cmp.s_squeeze,
                    squeeze_mrl=cmp.squeeze_mrl,
                    squeeze_rho02=cmp.squeeze_rho02,
                )
        if solution is not None:
            row["dim"] = solution.dim
            row["residual"] = solution.residual
    except QvdpError as exc:
        # Keep the coordinates, blank every value column, record the code.
        row = dict(coords)
        row["error"] = exc.code
    return row


@dataclass(frozen=True)
class SweepTable:
    """Ordered columns plus one dict per grid point."""

    columns: list[str]
    rows: list[dict]

    @property
    def n_failed(self) -> int:
        return sum(1 for r in self.rows if r.get("error"))


def run_sweep(spec: SweepSpec) -> SweepTable:
    """Evaluate the sweep grid and return the assembled table.

    Rows follow the lexicographic order of the axis definitions (first axis
    outermost) regardless of `spec.workers`.
    """
    _validate_spec(spec)
    columns = _output_columns(spec)
    names = [ax.name for ax in spec.axes]
    grid = [
        dict(zip(names, (float(v) for v in point)))
        for point in itertools.product(*(ax.values() for ax in spec.axes))
    ]
    if spec.workers == 1:
        rows = [_solve_point(spec, coords) for coords in grid]
    else:
        with ThreadPoolExecutor(max_workers=spec.workers) as pool:
            rows = list(pool.map(lambda c: _solve_point(spec, c), grid))
    if rows and all(r.get("error") for r in rows):
        raise SweepError(
            f"all {len(rows)} grid points failed; first error: {rows[0]['error']}"
        )
    return SweepTable(columns=columns, rows=rows)


def _format_cell(value) -> str:
    if value is None:
        return "nan"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def emit_csv(table: SweepTable, path) -> None:
    """Write the table as UTF-8 CSV: header row, 17-significant-digit floats,
    "nan" for missing values, "\\n" line endings. Deterministic byte-for-byte
    for a given table."""
    lines = [",".join(table.columns)]
    for row in table.rows:
        lines.append(",".join(_format_cell(row.get(col)) for col in table.columns))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def write_plot_script(table: SweepTable, csv_path, script_path) -> None:
    """Emit a small matplotlib script that plots the numeric columns of the CSV.

    The script is plain text referencing the CSV by name; nothing here imports
    a plotting library.
    """
    x = table.columns[0]
    numeric = [
        c
        for c in table.columns[1:]
        if c not in ("regime", "error", "dim")
        and any(isinstance(r.get(c), (int, float)) and not isinstance(r.get(c), bool) for r in table.rows)
    ]
    body = f'''"""Plot columns of {csv_path} against {x!r}."""
import csv

import matplotlib.pyplot as plt

with open({str(csv_path)!r}, encoding="utf-8") as fh:
    rows = list(csv.DictReader(fh))

x = [float(r[{x!r}]) for r in rows]
for column in {numeric!r}:
    y = [float(r[column]) for r in rows]
    plt.plot(x, y, label=column)
plt.xlabel({x!r})
plt.legend()
plt.show()
'''
    with open(script_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(body)
