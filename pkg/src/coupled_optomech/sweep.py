"""Scenario configuration, parameter-grid sweeps, figure presets and output.

A scenario is a flat ``key = value`` file (parsed with :mod:`configparser`,
no section header needed). Rates are given relative to the mechanical
frequency of cavity 1 (``*_over_wm``), the mechanical frequency itself in Hz
(``omega_m_hz``), everything else in SI units. Any per-cavity key accepts a
``_1`` / ``_2`` suffix to override one cavity only.

Sweep axes are declared as ``axis1 = xi_over_wm`` with either
``axis1_min``/``axis1_max``/``axis1_steps`` or an explicit
``axis1_values = 0, 0.1, 0.2`` list; ``axis2`` likewise. Rows are produced in
row-major order (axis 1 outer).
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, NonConvergence, NumericalFailure, UnknownFigure, UnphysicalState
from .gaussian import Bipartition, Mode, log_negativity, reduce, steering, symplectic_eigenvalues
from .linear_dynamics import linear_model, solve_lyapunov
from .cooling import build_moment_system, effective_reduction, steady_moments
from .params import CavityParams, SystemParams, angular, derive
from .steady_state import coupling_fixed_point, pinned_fixed_point, solve_fixed_point

__all__ = [
    "Axis",
    "ScenarioConfig",
    "SweepResult",
    "CSV_HEADER",
    "PRESETS",
    "PRESET_VERSION",
    "parse_config",
    "load_config",
    "preset_config",
    "build_params",
    "evaluate_point",
    "run_sweep",
    "reproduce",
    "emit",
    "to_csv",
    "to_json",
    "read_json",
]

CSV_HEADER = (
    "axis1,axis2,max_real_eig,stable,E_N,g_FM,g_MF,asymmetry,"
    "steering_class,N_b_steady,N_a_steady,status"
)
COLUMNS = tuple(CSV_HEADER.split(","))
MEASURE_COLUMNS = ("E_N", "g_FM", "g_MF", "asymmetry", "steering_class", "N_b_steady", "N_a_steady")

CAVITY_KEYS = (
    "omega_m_hz",
    "gamma_m_over_wm",
    "kappa_over_wm",
    "delta_over_wm",
    "G_over_wm",
    "length",
    "mass",
    "wavelength",
    "power",
    "temperature",
)
SYSTEM_KEYS = ("xi_over_wm", "eta_over_wm", "detuning_mode", "quantities", "bipartition", "output", "format")
AXIS_NAMES = ("xi_over_wm", "eta_over_wm", "delta_over_wm", "G_over_wm", "power", "temperature")
QUANTITIES = ("stability", "logneg", "steering", "cooling", "covariance")
STATUSES = ("ok", "unstable", "marginal", "nonconverged", "unphysical", "failed")
PHYSICALITY_TOL = 1e-8

# Parameters of the entanglement figures: L = 1 mm, m = 5 ng, lambda = 810 nm,
# omega_m = 2 pi 10 MHz, gamma_m = 2 pi 100 Hz, kappa = 2 pi 14 MHz, 35 mW, 0.4 K.
DEFAULTS = {
    "omega_m_hz": 10e6,
    "gamma_m_over_wm": 1e-5,
    "kappa_over_wm": 1.4,
    "delta_over_wm": 1.0,
    "G_over_wm": None,
    "length": 1e-3,
    "mass": 5e-12,
    "wavelength": 810e-9,
    "power": 35e-3,
    "temperature": 0.4,
    "xi_over_wm": 0.0,
    "eta_over_wm": 0.0,
    "detuning_mode": "effective",
    "quantities": ("stability",),
    "bipartition": "cav1-mech1",
    "output": None,
    "format": "csv",
}


@dataclass(frozen=True)
class Axis:
    name: str
    values: tuple

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ConfigError(f"unknown axis {self.name!r}; choose from {', '.join(AXIS_NAMES)}")
        if len(self.values) < 1:
            raise ConfigError(f"axis {self.name} has no values")

    @classmethod
    def linspace(cls, name: str, lo: float, hi: float, steps: int) -> "Axis":
        if steps < 2:
            raise ConfigError(f"axis {name}: steps must be >= 2")
        if not lo < hi:
            raise ConfigError(f"axis {name}: need min < max")
        return cls(name, tuple(float(v) for v in np.linspace(lo, hi, steps)))

    def describe(self) -> dict:
        return {"name": self.name, "values": list(self.values)}


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved scenario: base values, sweep axes and requested outputs."""

    values: dict
    axes: tuple = ()
    quantities: tuple = ("stability",)
    bipartition: str = "cav1-mech1"
    output: str | None = None
    fmt: str = "csv"

    def __post_init__(self):
        if len(self.axes) > 2:
            raise ConfigError("at most two sweep axes")
        if len({a.name for a in self.axes}) != len(self.axes):
            raise ConfigError("sweep axes must be distinct")
        if not self.quantities:
            raise ConfigError("quantity list is empty")
        bad = [q for q in self.quantities if q not in QUANTITIES]
        if bad:
            raise ConfigError(f"unknown quantities {bad}; choose from {', '.join(QUANTITIES)}")
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.fmt!r}")
        if self.values.get("detuning_mode") not in ("effective", "bare"):
            raise ConfigError("detuning_mode must be 'effective' or 'bare'")
        try:
            Bipartition.parse(self.bipartition)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if "cooling" in self.quantities:
            for key in CAVITY_KEYS:
                if _cavity_value(self.values, key, 1) != _cavity_value(self.values, key, 2):
                    raise ConfigError(f"cooling needs identical cavities; {key} differs")
        # fail early on invalid physical parameters
        try:
            build_params(self.values)
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from None

    @property
    def n_points(self) -> int:
        return math.prod(len(a.values) for a in self.axes)

    def grid(self):
        """Axis assignments in row-major order."""
        if not self.axes:
            return [()]
        if len(self.axes) == 1:
            return [(v,) for v in self.axes[0].values]
        return [(u, v) for u in self.axes[0].values for v in self.axes[1].values]

    def resolved(self) -> dict:
        """JSON-friendly description of the whole scenario."""
        return {
            "values": {k: (list(v) if isinstance(v, tuple) else v) for k, v in sorted(self.values.items())},
            "axes": [a.describe() for a in self.axes],
            "quantities": list(self.quantities),
            "bipartition": self.bipartition,
        }


def _cavity_value(values: dict, key: str, j: int):
    return values.get(f"{key}_{j}", values.get(key))


def _parse_scalar(key: str, text: str):
    text = text.strip()
    if key in ("detuning_mode", "bipartition", "output", "format"):
        return text
    if key == "quantities":
        return tuple(q.strip() for q in text.split(",") if q.strip())
    if text.lower() in ("none", ""):
        if key.startswith("G_over_wm"):
            return None
        raise ConfigError(f"{key} needs a value")
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}: not a number: {text!r}") from None


def _known_key(key: str) -> bool:
    if key in SYSTEM_KEYS or key in CAVITY_KEYS:
        return True
    base, _, suffix = key.rpartition("_")
    return suffix in ("1", "2") and base in CAVITY_KEYS


def parse_config(text: str, overrides: dict | None = None, base: dict | None = None) -> ScenarioConfig:
    """Parse scenario text; ``overrides`` (raw strings) take precedence over file keys."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string("[scenario]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    raw = dict(parser["scenario"])
    raw.update(overrides or {})

    values = dict(DEFAULTS if base is None else base)
    axis_raw: dict[int, dict] = {}
    for key, text_value in raw.items():
        if key.startswith("axis"):
            head, _, attr = key.partition("_")
            try:
                idx = int(head[4:])
            except ValueError:
                raise ConfigError(f"bad axis key {key!r}") from None
            if idx not in (1, 2):
                raise ConfigError(f"bad axis key {key!r}; only axis1 and axis2")
            axis_raw.setdefault(idx, {})[attr or "name"] = text_value.strip()
            continue
        if not _known_key(key):
            raise ConfigError(f"unknown key {key!r}")
        values[key] = _parse_scalar(key, text_value)

    axes = []
    for idx in sorted(axis_raw):
        entry = axis_raw[idx]
        name = entry.get("name")
        if name is None:
            raise ConfigError(f"axis{idx} has no name")
        try:
            if "values" in entry:
                if {"min", "max", "steps"} & entry.keys():
                    raise ConfigError(f"axis{idx}: give either values or min/max/steps")
                vals = tuple(float(v) for v in entry["values"].split(",") if v.strip())
                axes.append(Axis(name, vals))
            else:
                missing = {"min", "max", "steps"} - entry.keys()
                if missing:
                    raise ConfigError(f"axis{idx}: missing {sorted(missing)}")
                axes.append(Axis.linspace(name, float(entry["min"]), float(entry["max"]), int(entry["steps"])))
        except ValueError as exc:
            raise ConfigError(f"axis{idx}: {exc}") from None
    if 2 in axis_raw and 1 not in axis_raw:
        raise ConfigError("axis2 given without axis1")

    quantities = values.pop("quantities")
    bipartition = values.pop("bipartition")
    output = values.pop("output")
    fmt = values.pop("format")
    return ScenarioConfig(values, tuple(axes), tuple(quantities), bipartition, output, fmt)


def load_config(path, overrides: dict | None = None) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, overrides)


def build_params(values: dict) -> SystemParams:
    """:class:`SystemParams` in SI units from flat scenario values."""
    w_ref = angular(_cavity_value(values, "omega_m_hz", 1))
    cavs = []
    for j in (1, 2):
        v = {k: _cavity_value(values, k, j) for k in CAVITY_KEYS}
        cavs.append(
            CavityParams(
                length=v["length"],
                mass=v["mass"],
                wavelength=v["wavelength"],
                omega_m=angular(v["omega_m_hz"]),
                gamma_m=v["gamma_m_over_wm"] * w_ref,
                kappa=v["kappa_over_wm"] * w_ref,
                delta0=v["delta_over_wm"] * w_ref,
                power=v["power"],
                temperature=v["temperature"],
            )
        )
    return SystemParams(cavs[0], cavs[1], xi=values["xi_over_wm"] * w_ref, eta=values["eta_over_wm"] * w_ref)


def operating_point(values: dict, params: SystemParams, derived=None):
    """Classical operating point selected by ``G_over_wm`` and ``detuning_mode``."""
    w_ref = params.omega_ref
    delta = params.per_cavity("delta0")
    G = [_cavity_value(values, "G_over_wm", j) for j in (1, 2)]
    if any(g is not None for g in G):
        if any(g is None for g in G):
            raise ConfigError("G_over_wm must be set for both cavities or neither")
        return coupling_fixed_point(params, np.array(G, dtype=float) * w_ref, delta, derived)
    if values["detuning_mode"] == "effective":
        return pinned_fixed_point(params, delta, derived)
    return solve_fixed_point(params, derived)


def _apply_axes(values: dict, axes, point) -> dict:
    out = dict(values)
    for axis, v in zip(axes, point):
        out[axis.name] = v
        # a swept per-cavity quantity applies to both cavities
        out.pop(f"{axis.name}_1", None)
        out.pop(f"{axis.name}_2", None)
    return out


def _blank_row(point) -> dict:
    row = dict.fromkeys(COLUMNS)
    row["axis1"] = point[0] if len(point) > 0 else None
    row["axis2"] = point[1] if len(point) > 1 else None
    return row


def _audit_physical(nu):
    """All symplectic eigenvalues of the full state and of every mode pair."""
    low = symplectic_eigenvalues(nu)[0]
    modes = list(Mode)
    for i, a in enumerate(modes):
        for b in modes[i + 1 :]:
            low = min(low, symplectic_eigenvalues(reduce(nu, Bipartition(a, b)).matrix)[0])
    if low < 0.5 - PHYSICALITY_TOL:
        raise UnphysicalState(f"symplectic eigenvalue {low:.12g} below 1/2")


def evaluate_point(values: dict, quantities=("stability",), bipartition: str = "cav1-mech1", point=()) -> dict:
    """One result row. Measures are filled only at stable, physical points."""
    row = _blank_row(point)
    params = build_params(values)
    derived = derive(params)
    try:
        fp = operating_point(values, params, derived)
    except NonConvergence:
        row["status"] = "nonconverged"
        return row
    model = linear_model(params, fp, derived)
    w = params.omega_ref
    try:
        verdict = model.stability()
    except NumericalFailure:
        row["status"] = "failed"
        return row
    row["max_real_eig"] = verdict.max_real_eig / w
    row["stable"] = verdict.stable
    if verdict.marginal:
        row["status"] = "marginal"
        return row
    if not verdict.stable:
        row["status"] = "unstable"
        return row

    measures = {}
    try:
        nu = solve_lyapunov(model.A / w, model.Q / w).nu
        _audit_physical(nu)
        cm = reduce(nu, Bipartition.parse(bipartition))
        if "logneg" in quantities:
            measures["E_N"] = log_negativity(cm)
        if "steering" in quantities:
            st = steering(cm)
            measures.update(
                g_FM=st.g_a_to_b, g_MF=st.g_b_to_a, asymmetry=st.asymmetry, steering_class=st.steering_class.value
            )
        if "cooling" in quantities:
            mv = steady_moments(build_moment_system(effective_reduction(params, fp, derived)))
            measures.update(N_b_steady=mv.N_b, N_a_steady=mv.N_a)
        if "covariance" in quantities:
            measures["covariance"] = nu.tolist()
    except UnphysicalState:
        row["status"] = "unphysical"
        return row
    except NumericalFailure:
        row["status"] = "failed"
        return row
    row.update(measures)
    row["status"] = "ok"
    return row


def _evaluate_task(task):
    values, quantities, bipartition, point = task
    return evaluate_point(values, quantities, bipartition, point)


@dataclass
class SweepResult:
    rows: list
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> list:
        return [r.get(name) for r in self.rows]


def run_sweep(config: ScenarioConfig, threads: int = 1) -> SweepResult:
    """Evaluate every grid point; row order never depends on ``threads``."""
    if threads < 0:
        raise ConfigError("threads must be >= 0")
    workers = (os.cpu_count() or 1) if threads == 0 else threads
    tasks = [
        (_apply_axes(config.values, config.axes, p), config.quantities, config.bipartition, p) for p in config.grid()
    ]
    if workers == 1 or len(tasks) < 2:
        rows = [_evaluate_task(t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_evaluate_task, tasks, chunksize=chunk))
    return SweepResult(rows, {"scenario": config.resolved()})


# ---------------------------------------------------------------------------
# figure presets

PRESET_VERSION = 1

_XI_FINE = {"axis2": "xi_over_wm", "axis2_min": "0", "axis2_max": "1.2", "axis2_steps": "121"}
PRESETS = {
    "fig2a": {
        "delta_over_wm": "-1",
        "quantities": "stability",
        "axis1": "eta_over_wm", "axis1_min": "0", "axis1_max": "2", "axis1_steps": "201",
        "axis2": "xi_over_wm", "axis2_min": "0", "axis2_max": "2", "axis2_steps": "201",
    },
    "fig2b": {
        "delta_over_wm": "1",
        "quantities": "stability",
        "axis1": "eta_over_wm", "axis1_min": "0", "axis1_max": "2", "axis1_steps": "201",
        "axis2": "xi_over_wm", "axis2_min": "0", "axis2_max": "2", "axis2_steps": "201",
    },
    "fig2c": {
        "delta_over_wm": "1",
        "quantities": "stability",
        "axis1": "eta_over_wm", "axis1_min": "0", "axis1_max": "0.099", "axis1_steps": "100",
        "axis2": "xi_over_wm", "axis2_min": "0", "axis2_max": "1", "axis2_steps": "101",
    },
    "fig3": {
        "quantities": "stability, logneg",
        "axis1": "eta_over_wm", "axis1_values": "0, 0.1, 0.2, 0.3, 0.35",
        **_XI_FINE,
    },
    "figCo": {
        "quantities": "stability, cooling",
        "axis1": "eta_over_wm", "axis1_values": "0, 0.1, 0.2, 0.3",
        **_XI_FINE,
    },
    "fig5a": {
        "eta_over_wm": "0",
        "quantities": "stability, logneg, steering",
        "axis1": "xi_over_wm", "axis1_min": "0", "axis1_max": "1.2", "axis1_steps": "121",
    },
    "fig5b": {
        "eta_over_wm": "0.2",
        "quantities": "stability, logneg, steering",
        "axis1": "xi_over_wm", "axis1_min": "0", "axis1_max": "1.2", "axis1_steps": "121",
    },
}  # fmt: skip


def preset_config(figure_id: str, overrides: dict | None = None) -> ScenarioConfig:
    if figure_id not in PRESETS:
        raise UnknownFigure(f"unknown figure {figure_id!r}; choose from {', '.join(PRESETS)}")
    merged = dict(PRESETS[figure_id])
    merged.update(overrides or {})
    return parse_config("", merged)


def _physical_summary(config: ScenarioConfig) -> dict:
    params = build_params(config.values)
    derived = derive(params)
    cavs = []
    for j, cav in enumerate(params.cavities):
        d = {k: getattr(cav, k) for k in CavityParams.__dataclass_fields__}
        d.update(n_bar=float(derived.n_bar[j]), E=float(derived.E[j]), g0=float(derived.g0[j]), g=float(derived.g[j]))
        cavs.append(d)
    return {"omega_ref": params.omega_ref, "xi": params.xi, "eta": params.eta, "cavities": cavs}


def reproduce(figure_id: str, out_dir, threads: int = 1, fmt: str = "csv") -> tuple[Path, Path]:
    """Run a figure preset and write the table plus a ``.meta.json`` sidecar."""
    config = preset_config(figure_id)
    result = run_sweep(config, threads=threads)
    result.metadata.update(
        figure=figure_id,
        preset_version=PRESET_VERSION,
        preset=PRESETS[figure_id],
        base_physical=_physical_summary(config),
    )
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    table_path = out_dir / f"{figure_id}.{fmt}"
    meta_path = out_dir / f"{figure_id}.meta.json"
    emit(result, fmt, table_path)
    meta_path.write_text(json.dumps(result.metadata, indent=2, sort_keys=True) + "\n")
    return table_path, meta_path


# ---------------------------------------------------------------------------
# output


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, int, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def to_csv(result: SweepResult) -> str:
    if not result.rows:
        raise ConfigError("refusing to write an empty table")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in result.rows:
        writer.writerow([_cell(row.get(c)) for c in COLUMNS])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, np.floating):
        return float(v)
    return v


def to_json(result: SweepResult) -> str:
    if not result.rows:
        raise ConfigError("refusing to write an empty table")
    rows = [{k: _jsonable(v) for k, v in r.items()} for r in result.rows]
    return json.dumps({"metadata": result.metadata, "rows": rows}, indent=1) + "\n"


def read_json(text: str) -> SweepResult:
    data = json.loads(text)
    return SweepResult(data["rows"], data["metadata"])


def emit(result: SweepResult, fmt: str, path) -> Path:
    text = {"csv": to_csv, "json": to_json}.get(fmt)
    if text is None:
        raise ConfigError(f"format must be csv or json, got {fmt!r}")
    path = Path(path)
    path.write_text(text(result))
    return path
