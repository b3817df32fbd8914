"""
Grid sweeps and figure presets producing CSV tables.

Each grid point is an independent task (mean field if driven, linear model,
Lyapunov or RK4 solve, measures). Results come back in grid order no matter
how many worker processes evaluate them.
"""

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np

from . import __version__
from .lindyn import (InstabilityError, build_model, evolve_covariance,
                     lyapunov_residual, stability, steady_covariance)
from .measures import measure_all
from .physpar import (ConfigError, SystemConfig, baseline_config, config_hash,
                      dump_config)

__all__ = [
    "Axis", "SweepSpec", "SweepResult", "MEASURE_COLUMNS", "PRESETS",
    "run_sweep", "figure_preset", "evaluate_point", "write_csv",
    "write_sidecar", "format_csv",
]

MEASURE_COLUMNS = ("E_dd", "purity", "S_c", "S_p", "nu_minus", "min_symplectic",
                   "stable", "residual")
PRESETS = ("fig1a", "fig1b", "fig1c", "fig2a", "fig2b", "fig4", "fig5", "fig6")

GRID_2D = 101
GRID_1D = 201
GRID_TIME = 2001


@dataclass(frozen=True)
class Axis:
    """One sweep axis.

    ``params`` are the SystemConfig attributes set to each value (several
    for tied parameters such as ``delta_a`` and ``delta_c``). ``values``
    are in internal units; the CSV shows ``values / scale``.
    """

    name: str
    params: tuple
    values: tuple
    unit: str = ""
    scale: float = 1.0

    def __post_init__(self):
        if not self.params:
            raise ConfigError(f"axis {self.name!r} sets no parameter")
        if len(self.values) == 0:
            raise ConfigError(f"axis {self.name!r} has an empty grid")
        d = np.diff(np.asarray(self.values, dtype=float))
        if d.size and not (np.all(d > 0) or np.all(d < 0)):
            raise ConfigError(f"axis {self.name!r} grid is not strictly monotone")

    @property
    def display(self):
        return tuple(v / self.scale for v in self.values)


@dataclass(frozen=True)
class SweepSpec:
    base: SystemConfig
    axes: tuple
    mode: str = "steady"
    times: Optional[tuple] = None
    output: Optional[str] = None
    name: str = "sweep"

    def __post_init__(self):
        if self.mode not in ("steady", "evolve"):
            raise ConfigError(f"unknown sweep mode {self.mode!r}")
        if self.mode == "steady" and not 1 <= len(self.axes) <= 2:
            raise ConfigError("steady sweeps take 1 or 2 axes")
        if self.mode == "evolve":
            if len(self.axes) > 1:
                raise ConfigError("evolve sweeps take at most 1 parameter axis")
            t = np.asarray(self.times if self.times is not None else [], dtype=float)
            if t.size == 0 or t[0] != 0 or np.any(np.diff(t) <= 0):
                raise ConfigError("evolve sweeps need a strictly increasing time grid from 0")

    @property
    def columns(self):
        cols = tuple(ax.name for ax in self.axes)
        if self.mode == "evolve":
            cols += ("t",)
        return cols + MEASURE_COLUMNS + ("error",)

    def grid(self):
        """Parameter assignments in row order (first axis outermost)."""
        if not self.axes:
            return [((), {})]
        out = []
        for idx in np.ndindex(*(len(ax.values) for ax in self.axes)):
            display, changes = [], {}
            for ax, i in zip(self.axes, idx):
                display.append(ax.display[i])
                for p in ax.params:
                    changes[p] = ax.values[i]
            out.append((tuple(display), changes))
        return out


@dataclass
class SweepResult:
    spec: SweepSpec
    rows: list = field(default_factory=list)

    @property
    def columns(self):
        return self.spec.columns

    def column(self, name):
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows], dtype=float)

    def __len__(self):
        return len(self.rows)


_NAN_MEASURES = (math.nan,) * 6


def evaluate_point(config, mode="steady", times=None):
    """
    Rows for one parameter point.

    Steady mode returns one row ``(E_dd, purity, S_c, S_p, nu_minus,
    min_symplectic, stable, residual, error)``; evolve mode returns one such row per time
    sample with the time prepended. Failures are captured in ``error``.
    """
    try:
        model = build_model(config)
        rep = stability(model.K)
    except Exception as exc:  # noqa: BLE001 - recorded per row
        msg = f"{type(exc).__name__}: {exc}"
        if mode == "steady":
            return [_NAN_MEASURES + (False, math.nan, msg)]
        return [(t,) + _NAN_MEASURES + (False, math.nan, msg) for t in times]

    if mode == "steady":
        if not rep.stable:
            return [_NAN_MEASURES + (False, math.nan, "unstable")]
        try:
            C = steady_covariance(model.K, model.L, check_stability=False, cond_warn=None)
            res = lyapunov_residual(model.K, C, model.L)
            m = measure_all(C)
        except Exception as exc:  # noqa: BLE001
            return [_NAN_MEASURES + (True, math.nan, f"{type(exc).__name__}: {exc}")]
        return [(m.E_dd, m.purity, m.S_c, m.S_p, m.nu_minus, m.min_symplectic, True, res, "")]

    rows = []
    try:
        traj = evolve_covariance(model.K, model.L, None, times,
                                 extra_rate=max(config.site(1).omega_b, config.site(2).omega_b))
    except Exception as exc:  # noqa: BLE001
        return [(t,) + _NAN_MEASURES + (rep.stable, math.nan, f"{type(exc).__name__}: {exc}")
                for t in times]
    for t, C in zip(times, traj):
        try:
            m = measure_all(C)
            rows.append((t, m.E_dd, m.purity, m.S_c, m.S_p, m.nu_minus, m.min_symplectic,
                         rep.stable, math.nan, ""))
        except Exception as exc:  # noqa: BLE001
            rows.append((t,) + _NAN_MEASURES + (rep.stable, math.nan, f"{type(exc).__name__}: {exc}"))
    return rows


def _task(args):
    config, mode, times = args
    return evaluate_point(config, mode, times)


def run_sweep(spec, workers=1, chunksize=None):
    """
    Evaluate every grid point of ``spec``.

    ``workers > 1`` evaluates points in a process pool. Row order and
    values are identical to the serial run.
    """
    tasks, displays = [], []
    for display, changes in spec.grid():
        try:
            cfg = spec.base.replace(**changes)
        except ConfigError as exc:
            cfg = exc
        tasks.append(cfg)
        displays.append(display)

    times = tuple(spec.times) if spec.mode == "evolve" else None

    def bad_rows(exc):
        msg = f"ConfigError: {exc}"
        if spec.mode == "steady":
            return [_NAN_MEASURES + (False, math.nan, msg)]
        return [(t,) + _NAN_MEASURES + (False, math.nan, msg) for t in times]

    good = [(i, c) for i, c in enumerate(tasks) if isinstance(c, SystemConfig)]
    payload = [(c, spec.mode, times) for _, c in good]
    if workers > 1 and len(payload) > 1:
        if chunksize is None:
            chunksize = max(1, len(payload) // (8 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            computed = list(pool.map(_task, payload, chunksize=chunksize))
    else:
        computed = [_task(p) for p in payload]

    per_point = [None] * len(tasks)
    for (i, _), rows in zip(good, computed):
        per_point[i] = rows
    result = SweepResult(spec=spec)
    for i, cfg in enumerate(tasks):
        rows = per_point[i] if per_point[i] is not None else bad_rows(cfg)
        for r in rows:
            result.rows.append(tuple(displays[i]) + tuple(r))
    return result


def _axis(name, params, grid, unit, scale):
    values = tuple(float(v) * scale for v in grid)
    return Axis(name=name, params=tuple(params), values=values, unit=unit, scale=scale)


def figure_preset(name, base=None, n2d=GRID_2D, n1d=GRID_1D, n_time=GRID_TIME):
    """
    Sweep specification reproducing one figure.

    ``base`` supplies every parameter the preset does not pin; it defaults
    to :func:`magsync.physpar.baseline_config`. Detunings are fixed at
    ``delta_a = delta_c = omega_b`` and ``delta_d = 0.4 omega_b`` and the
    tunneling at ``J = 0.5 g_a`` except on the swept axes.
    """
    if name not in PRESETS:
        raise ValueError(f"unknown figure preset {name!r}; choose from {', '.join(PRESETS)}")
    if base is None:
        base = baseline_config()
    s1 = base.site(1)
    wb, ga = s1.omega_b, s1.g_a
    pinned = dict(delta_a=wb, delta_c=wb, delta_d=0.4 * wb, J_a=0.5 * ga, J_c=0.5 * ga)
    T_grid = np.logspace(-4, 0, n1d)

    if name.startswith("fig1"):
        lam = {"fig1a": 0.0, "fig1b": 0.005, "fig1c": 0.05}[name]
        cfg = base.replace(**pinned, lam=lam * ga, T=0.1e-3)
        grid = np.linspace(0.0, 2.0, n2d)
        axes = (_axis("delta_ac/omega_b", ("delta_a", "delta_c"), grid, "omega_b", wb),
                _axis("delta_d/omega_b", ("delta_d",), grid, "omega_b", wb))
        return SweepSpec(base=cfg, axes=axes, name=name)
    if name in ("fig2a", "fig5"):
        family = (0.02, 0.035, 0.05) if name == "fig2a" else (0.0, 0.025, 0.05)
        cfg = base.replace(**pinned)
        axes = (_axis("lambda/g_a", ("lam",), family, "g_a", ga),
                _axis("T", ("T",), T_grid, "K", 1.0))
        return SweepSpec(base=cfg, axes=axes, name=name)
    if name == "fig2b":
        cfg = base.replace(**pinned, T=0.1e-3)
        axes = (_axis("lambda/g_a", ("lam",), np.linspace(0.0, 0.06, n1d), "g_a", ga),)
        return SweepSpec(base=cfg, axes=axes, name=name)
    if name == "fig4":
        cfg = base.replace(**pinned, lam=0.05 * ga)
        axes = (_axis("T", ("T",), (0.1e-3, 0.05, 0.1), "K", 1.0),
                _axis("J/g_a", ("J_a", "J_c"), np.linspace(0.0, 2.0, n1d), "g_a", ga))
        return SweepSpec(base=cfg, axes=axes, name=name)
    # fig6
    cfg = base.replace(**pinned, lam=0.05 * ga, T=0.1e-3)
    times = tuple(float(t) for t in np.linspace(0.0, 1e-6, n_time))
    return SweepSpec(base=cfg, axes=(), mode="evolve", times=times, name=name)


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, str):
        if any(ch in v for ch in ',"\n'):
            return '"' + v.replace('"', '""') + '"'
        return v
    return repr(float(v))


def format_csv(result, log_base=math.e):
    """CSV text: a ``#`` provenance line, the header, then one line per row."""
    cols = result.columns
    e_idx = cols.index("E_dd")
    conv = 1.0 / math.log(log_base)
    lines = [f"# magsync {__version__} name={result.spec.name} "
             f"config_sha256={config_hash(result.spec.base)} log_base={_base_label(log_base)}",
             ",".join(cols)]
    for row in result.rows:
        row = list(row)
        if conv != 1.0 and not math.isnan(row[e_idx]):
            row[e_idx] = row[e_idx] * conv
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _base_label(log_base):
    return "e" if log_base == math.e else repr(float(log_base))


def write_csv(result, path, log_base=math.e):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_csv(result, log_base))


def write_sidecar(result, path, log_base=math.e):
    """JSON sidecar with the resolved base config, axes and column schema."""
    spec = result.spec
    base = asdict(spec.base)
    doc = {
        "version": __version__,
        "name": spec.name,
        "mode": spec.mode,
        "config_sha256": config_hash(spec.base),
        "config_text": dump_config(spec.base),
        "config": base,
        "axes": [{"name": ax.name, "params": list(ax.params), "unit": ax.unit,
                  "scale": ax.scale, "n": len(ax.values),
                  "first": ax.display[0], "last": ax.display[-1]} for ax in spec.axes],
        "times": None if spec.times is None else {
            "n": len(spec.times), "first": spec.times[0], "last": spec.times[-1], "unit": "s"},
        "columns": list(result.columns),
        "log_base": _base_label(log_base),
        "rows": len(result.rows),
        "units": {"T": "K", "t": "s", "residual": "relative Frobenius norm"},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
