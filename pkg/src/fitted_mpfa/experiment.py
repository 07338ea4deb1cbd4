"""Experiment configuration, named presets and the error-table driver."""

from __future__ import annotations

import csv
import dataclasses
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analytic import DISCOUNT_VARIANTS, exact_boundary, rainbow_max_call, zero_axis_boundary
from .error_metrics import ErrorReport, rel_l2_error
from .grid import TensorGrid, build_graded, build_uniform
from .model import ModelParams
from .schemes import SCHEMES, SchemeOptions, semi_discrete
from .timestepper import RunResult, ThetaScheme, run

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("scheme", "N", "theta", "dtau", "rel_l2", "max_abs", "seconds")
GRID_KINDS = ("uniform", "graded")
BOUNDARY_KINDS = ("exact", "zero-axis")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    schemes: tuple[str, ...] = ("mpfa-up1",)
    n_list: tuple[int, ...] = (50,)
    x_max: float = 300.0
    y_max: float = 300.0
    sigma1: float = 0.3
    sigma2: float = 0.3
    rho: float = 0.5
    r: float = 0.1
    strike: float = 100.0
    maturity: float = 1.0 / 6.0
    theta: float = 0.5
    dtau: float = 0.01
    grid: str = "uniform"
    grid_focus: float = 100.0
    grid_strength: float = 0.0
    rule: str = "donor"
    where: str = "node"
    boundary_tensor: str = "half"
    variant: str = "standard"
    boundary: str = "exact"
    solver: str = "lu"
    seed: int = 0
    out: str = ""

    def __post_init__(self):
        def bad(name, msg):
            raise ConfigError(f"{name}: {msg}")

        for s in self.schemes:
            if s not in SCHEMES:
                bad("schemes", f"unknown scheme {s!r}; choose from {SCHEMES}")
        if not self.schemes:
            bad("schemes", "empty")
        if not self.n_list or any(int(n) != n or n < 4 for n in self.n_list):
            bad("n_list", f"need integers >= 4, got {self.n_list!r}")
        for name in ("x_max", "y_max", "dtau"):
            if not getattr(self, name) > 0:
                bad(name, "must be positive")
        if not 0 <= self.theta <= 1:
            bad("theta", "must lie in [0, 1]")
        if self.grid not in GRID_KINDS:
            bad("grid", f"must be one of {GRID_KINDS}")
        if self.variant not in DISCOUNT_VARIANTS:
            bad("variant", f"must be one of {DISCOUNT_VARIANTS}")
        if self.boundary not in BOUNDARY_KINDS:
            bad("boundary", f"must be one of {BOUNDARY_KINDS}")
        try:
            self.params()
            self.options()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def params(self) -> ModelParams:
        return ModelParams(self.sigma1, self.sigma2, self.rho, self.r, self.strike, self.maturity)

    def options(self) -> SchemeOptions:
        return SchemeOptions(self.rule, self.where, self.boundary_tensor)

    def build_grid(self, n: int) -> TensorGrid:
        if self.grid == "uniform":
            return TensorGrid(build_uniform(n, self.x_max), build_uniform(n, self.y_max))
        return TensorGrid(build_graded(n, self.x_max, self.grid_focus, self.grid_strength),
                          build_graded(n, self.y_max, self.grid_focus, self.grid_strength))

    def boundary_provider(self):
        make = exact_boundary if self.boundary == "exact" else zero_axis_boundary
        return make(self.params(), self.variant)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


# theta = 1 gave the closest agreement with the published error tables
_TABLE_1_3 = dict(x_max=300.0, y_max=300.0, sigma1=0.3, sigma2=0.3, rho=0.5, strike=100.0, maturity=1.0 / 6.0,
                  dtau=0.01, theta=1.0, schemes=SCHEMES)
_TABLE_4_5 = dict(x_max=4.0, y_max=4.0, sigma1=1.0, sigma2=1.0, rho=0.3, r=0.5, strike=1.0, maturity=2.0, theta=1.0,
                  schemes=SCHEMES)
_FIGS = dict(x_max=300.0, y_max=300.0, sigma1=0.3, sigma2=0.3, rho=0.5, r=0.03, strike=100.0,
             maturity=1.0 / 12.0, dtau=0.01, n_list=(100,))

PRESETS: dict[str, dict] = {
    "table1": dict(_TABLE_1_3, r=0.1, n_list=(50, 70, 85, 100, 150)),
    "table2": dict(_TABLE_1_3, r=0.08, n_list=(50, 100, 150)),
    "table3": dict(_TABLE_1_3, r=0.0, n_list=(100, 150)),
    "table4": dict(_TABLE_4_5, dtau=0.01, n_list=(50, 100)),
    "table5": dict(_TABLE_4_5, dtau=0.1, n_list=(50, 100)),
    "fig1": dict(_FIGS),
    "fig2": dict(_FIGS, schemes=("mpfa-up1", "mpfa-up2")),
    "fig3": dict(_FIGS, schemes=("fitted-mpfa-up1", "fitted-mpfa-up2")),
}


def _coerce(name: str, text: str):
    ftype = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}.get(name)
    if ftype is None:
        raise ConfigError(f"{name}: unknown configuration key")
    text = text.strip()
    try:
        if ftype == "tuple[str, ...]":
            return tuple(s.strip() for s in text.split(",") if s.strip())
        if ftype == "tuple[int, ...]":
            return tuple(int(s) for s in text.split(",") if s.strip())
        if ftype == "float":
            if "/" in text:
                num, den = text.split("/")
                return float(num) / float(den)
            return float(text)
        if ftype == "int":
            return int(text)
    except ValueError as exc:
        raise ConfigError(f"{name}: cannot parse {text!r}") from exc
    return text


def parse_overrides(pairs) -> dict:
    """``["r=0.1", "n_list=50,100"]`` -> typed keyword arguments."""
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"expected key=value, got {pair!r}")
        key, val = pair.split("=", 1)
        out[key.strip()] = _coerce(key.strip(), val)
    return out


def load_config_file(path) -> dict:
    """Flat key=value text file; '#' starts a comment."""
    lines = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    return parse_overrides(lines)


def make_config(preset: str | None = None, path=None, **overrides) -> ExperimentConfig:
    """Preset, then config file, then explicit overrides."""
    kw: dict = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"preset: unknown {preset!r}; choose from {sorted(PRESETS)}")
        kw.update(PRESETS[preset])
    if path is not None:
        kw.update(load_config_file(path))
    kw.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**kw)


@dataclass
class SolveOutcome:
    grid: TensorGrid
    result: RunResult
    analytic: np.ndarray
    report: ErrorReport
    theta: ThetaScheme = field(repr=False, default=None)


def solve_one(cfg: ExperimentConfig, scheme: str, n: int) -> SolveOutcome:
    params = cfg.params()
    t0 = time.perf_counter()
    grid = cfg.build_grid(n)
    system = semi_discrete(scheme, grid, params, cfg.options())
    ts = ThetaScheme.covering(cfg.theta, params.maturity, cfg.dtau)
    result = run(ts, system, cfg.boundary_provider(), params.strike, cfg.solver)
    seconds = time.perf_counter() - t0
    x, y = grid.centers()
    ana = np.asarray(rainbow_max_call(x, y, params, variant=cfg.variant)).ravel()
    report = rel_l2_error(result.values, ana, grid, scheme, seconds)
    logger.info("%s N=%d rel_l2=%.6f max_abs=%.4g (%.2fs)", scheme, n, report.rel_l2, report.max_abs, seconds)
    return SolveOutcome(grid, result, ana, report, ts)


def run_experiment(cfg: ExperimentConfig) -> list[dict]:
    """One row per (scheme, N); appended to ``cfg.out`` when set."""
    rows = []
    for scheme in cfg.schemes:
        for n in cfg.n_list:
            out = solve_one(cfg, scheme, n)
            rows.append(dict(scheme=scheme, N=n, theta=cfg.theta, dtau=out.theta.dtau,
                             rel_l2=out.report.rel_l2, max_abs=out.report.max_abs,
                             seconds=out.report.seconds))
    if cfg.out:
        write_rows(cfg.out, rows)
    return rows


def write_rows(path, rows, timing: bool = True) -> None:
    """Append rows to a CSV (header written for a new file).  ``timing=False``
    blanks the wall-clock column so reruns produce identical bytes."""
    path = Path(path)
    new = not path.exists() or path.stat().st_size == 0
    with path.open("a", newline="") as fh:
        w = csv.writer(fh)
        if new:
            w.writerow(CSV_COLUMNS)
        for r in rows:
            w.writerow([r["scheme"], r["N"], repr(float(r["theta"])), repr(float(r["dtau"])),
                        f"{r['rel_l2']:.10e}", f"{r['max_abs']:.10e}",
                        f"{r['seconds']:.3f}" if timing else ""])


def dump_surface(cfg: ExperimentConfig, scheme: str, n: int, path, analytic_only: bool = False) -> np.ndarray:
    """Write 'x y numeric analytic' rows over all cell centres; returns the table."""
    params = cfg.params()
    if analytic_only:
        grid = cfg.build_grid(n)
        x, y = grid.centers()
        ana = np.asarray(rainbow_max_call(x, y, params, variant=cfg.variant)).ravel()
        num = np.full_like(ana, np.nan)
    else:
        out = solve_one(cfg, scheme, n)
        grid, num, ana = out.grid, out.result.values, out.analytic
        x, y = grid.centers()
    table = np.column_stack([x.ravel(), y.ravel(), num, ana])
    try:
        np.savetxt(path, table, fmt="%.12g", header="x y numeric analytic")
    except OSError as exc:
        raise OSError(f"cannot write surface file {path}: {exc}") from exc
    return table
