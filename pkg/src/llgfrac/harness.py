"""Convergence, norm-preservation and stability studies, order fitting, CSV output."""

from __future__ import annotations

import csv
import enum
import io
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import LLGError
from .grid_field import NormTriple, VectorField, make_grid, max_unit_norm_deviation
from .manufactured import ManufacturedProblem, evaluate_run, initial_profile
from .schemes import SchemeConfig, SchemeKind, integrate

WORKERS_ENV = "LLGFRAC_WORKERS"
MAX_3D_NODES = 48


class StudyKind(str, enum.Enum):
    TEMPORAL = "temporal"
    SPATIAL = "spatial"
    COUPLED3D = "coupled3d"
    NORM = "norm"
    STABILITY = "stability"


class StudyError(LLGError):
    def __init__(self, row, resolution, cause):
        super().__init__(f"row {row} ({resolution}) failed: {cause}")
        self.row = row
        self.cause = cause


@dataclass(frozen=True)
class StudyConfig:
    """One table's worth of runs.

    ``refine`` holds time steps k for temporal, norm (1D) and stability studies,
    and mesh sizes h for spatial, coupled3d and 3D norm studies.  ``n`` is the
    node count per axis when h is held fixed; ``nt`` the step count when k is.
    """

    study: StudyKind
    refine: tuple
    scheme: SchemeKind = SchemeKind.FRACTIONAL_GS
    alpha: float = 0.01
    T: float = 0.1
    dim: int = 1
    n: Optional[int] = None
    nt: Optional[int] = None
    forcing_offset: float = 0.5
    allow_large: bool = False
    output: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "study", StudyKind(self.study))
        object.__setattr__(self, "scheme", SchemeKind(self.scheme))
        object.__setattr__(self, "refine", tuple(float(r) for r in self.refine))
        r = np.array(self.refine)
        if len(r) == 0 or not np.all(r > 0):
            raise ValueError("refinement list must be non-empty and positive")
        d = np.diff(r)
        if len(r) > 1 and not (np.all(d > 0) or np.all(d < 0)):
            raise ValueError("refinement list must be strictly monotone")
        if self.dim not in (1, 3):
            raise ValueError("dim must be 1 or 3")
        if not self.T > 0:
            raise ValueError("T must be positive")

    @property
    def sweeps_h(self) -> bool:
        return self.study in (StudyKind.SPATIAL, StudyKind.COUPLED3D) or (
            self.study is StudyKind.NORM and self.dim == 3)


@dataclass(frozen=True)
class ReportRow:
    k: float
    h: float
    n_steps: int
    norms: Optional[NormTriple]
    norm_deviation: Optional[float]
    seconds: float


@dataclass
class ConvergenceReport:
    config: StudyConfig
    rows: list = field(default_factory=list)
    # {"k": {"linf": ..}, "h": {...}}; empty with fewer than two rows
    orders: dict = field(default_factory=dict)


def estimate_order(points: Sequence[tuple]) -> float:
    """Least-squares slope of log(error) against log(step)."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] != 2:
        raise ValueError("need at least two (step, error) pairs")
    if not np.all(pts > 0):
        raise ValueError("steps and errors must be positive")
    x, y = np.log(pts[:, 0]), np.log(pts[:, 1])
    xc = x - x.mean()
    return float(np.sum(xc * (y - y.mean())) / np.sum(xc * xc))


def steps_for(T: float, k: float) -> int:
    steps = round(T / k)
    if steps < 1 or abs(steps * k - T) > 1e-9 * T:
        raise ValueError(f"T={T} is not an integer multiple of k={k}")
    return steps


def intervals_for(h: float) -> int:
    n = round(1.0 / h)
    if n < 2 or abs(n * h - 1.0) > 1e-9:
        raise ValueError(f"1/h must be an integer, got h={h}")
    return n


def _row_plan(cfg: StudyConfig, value: float):
    """Resolve one refinement value to (nodes per axis, n_steps, k, h)."""
    if cfg.study is StudyKind.COUPLED3D or (cfg.study is StudyKind.NORM and cfg.dim == 3):
        intervals = intervals_for(value)
        h = 1.0 / intervals
        steps = max(1, round(cfg.T / (h * h)))
        nodes = intervals + 1
        if nodes > MAX_3D_NODES and not cfg.allow_large:
            raise ValueError(f"{nodes} nodes per axis exceeds the 3D limit of {MAX_3D_NODES}; "
                             "pass allow_large to override")
        return nodes, steps, cfg.T / steps, h
    if cfg.study is StudyKind.SPATIAL:
        if cfg.nt is None:
            raise ValueError("spatial study needs a fixed step count nt")
        intervals = intervals_for(value)
        return intervals + 1, cfg.nt, cfg.T / cfg.nt, 1.0 / intervals
    if cfg.n is None:
        raise ValueError(f"{cfg.study.value} study needs a fixed node count n")
    steps = steps_for(cfg.T, value)
    grid_h = 1.0 / (cfg.n - 1)
    return cfg.n, steps, value, grid_h


def _run_row(cfg: StudyConfig, index: int) -> ReportRow:
    value = cfg.refine[index]
    nodes, steps, k, h = _row_plan(cfg, value)
    dim = 3 if cfg.study is StudyKind.COUPLED3D else cfg.dim
    grid = make_grid(dim, nodes)
    scheme = SchemeConfig(cfg.scheme, k, cfg.alpha)
    start = time.perf_counter()
    try:
        norms = deviation = None
        if cfg.study is StudyKind.NORM:
            m0 = VectorField(grid, initial_profile(grid.coords(), dim))
            _, history = integrate(m0, scheme, steps)
            deviation = max([max_unit_norm_deviation(m0)] + [d.norm_deviation for d in history])
        else:
            problem = ManufacturedProblem(dim, cfg.alpha, cfg.T)
            norms = evaluate_run(problem, grid, scheme, steps, forcing_offset=cfg.forcing_offset)
            if cfg.study is StudyKind.STABILITY:
                # forcing breaks pointwise norm conservation, so the structural
                # check uses an unforced run at the same (h, k)
                elapsed = time.perf_counter() - start
                m0 = VectorField(grid, initial_profile(grid.coords(), dim))
                _, history = integrate(m0, scheme, steps)
                deviation = max(d.norm_deviation for d in history)
                return ReportRow(k, h, steps, norms, deviation, elapsed)
    except LLGError as exc:
        raise StudyError(index, f"k={k:g}, h={h:g}", exc) from exc
    return ReportRow(k, h, steps, norms, deviation, time.perf_counter() - start)


def _fit_orders(rows, attr):
    if len(rows) < 2 or rows[0].norms is None:
        return None
    out = {}
    for name in ("linf", "l2", "h1"):
        pts = [(getattr(r, attr), getattr(r.norms, name)) for r in rows]
        out[name] = estimate_order(pts) if all(e > 0 for _, e in pts) else math.nan
    return out


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def run_study(cfg: StudyConfig) -> ConvergenceReport:
    for value in cfg.refine:  # validate every row before spending time on any
        _row_plan(cfg, value)
    indices = range(len(cfg.refine))
    workers = min(worker_count(), len(cfg.refine))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_row, [cfg] * len(indices), indices))
    else:
        rows = [_run_row(cfg, i) for i in indices]

    report = ConvergenceReport(config=cfg, rows=rows)
    if cfg.study is StudyKind.TEMPORAL:
        fits = {"k": _fit_orders(rows, "k")}
    elif cfg.study is StudyKind.SPATIAL:
        fits = {"h": _fit_orders(rows, "h")}
    elif cfg.study is StudyKind.COUPLED3D:
        fits = {"k": _fit_orders(rows, "k"), "h": _fit_orders(rows, "h")}
    else:
        fits = {}
    report.orders = {key: val for key, val in fits.items() if val is not None}
    return report


def _fmt(x) -> str:
    return "" if x is None else format(float(x), ".17g")


def report_columns(report: ConvergenceReport, include_timing: bool = True) -> list:
    cols = ["k", "h"]
    if report.config.study is not StudyKind.NORM:
        cols += ["linf", "l2", "h1"]
    if report.config.study in (StudyKind.NORM, StudyKind.STABILITY):
        cols.append("norm_deviation")
    if include_timing:
        cols.append("seconds")
    return cols


def format_csv(report: ConvergenceReport, include_timing: bool = True) -> str:
    """Render the report as CSV text with 17 significant digits.

    The order rows are labelled ``order_k`` / ``order_h`` in the k column.
    With ``include_timing=False`` the wall-clock column is dropped and the
    output is byte-identical across runs of the same configuration.
    """
    cols = report_columns(report, include_timing)
    lines = [cols]
    for r in report.rows:
        values = {"k": r.k, "h": r.h, "norm_deviation": r.norm_deviation, "seconds": r.seconds}
        if r.norms is not None:
            values.update(linf=r.norms.linf, l2=r.norms.l2, h1=r.norms.h1)
        lines.append([_fmt(values.get(c)) for c in cols])
    for key, fit in report.orders.items():
        lines.append([f"order_{key}", ""] + [_fmt(fit.get(c)) if c in fit else "" for c in cols[2:]])
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(lines)
    return buf.getvalue()


def write_csv(report: ConvergenceReport, path, include_timing: bool = True) -> None:
    text = format_csv(report, include_timing)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write report to {path}: {exc.strerror}") from exc


def read_csv(path) -> list:
    """Parse a report CSV back into a list of dicts (floats where numeric)."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for row in rows:
        parsed = {}
        for key, val in row.items():
            try:
                parsed[key] = float(val) if val != "" else None
            except ValueError:
                parsed[key] = val
        out.append(parsed)
    return out


def parse_resolution(token: str, T: float) -> float:
    """Parse ``"0.02"``, ``"1/16"`` or ``"T/80"`` into a float."""
    token = token.strip()
    if "/" in token:
        num, den = token.split("/", 1)
        num = num.strip()
        numerator = T if num in ("T", "t") else float(Fraction(num))
        return numerator / float(Fraction(den.strip()))
    return float(token)


TABLE_K = (2e-2, 1e-2, 5e-3, 2.5e-3, 1.25e-3, 6.25e-4)


def preset(name: str) -> StudyConfig:
    """Reference study configurations table1..table6 (3D lists sized for a workstation)."""
    T = 0.1
    presets = {
        "table1": StudyConfig(StudyKind.STABILITY, TABLE_K, scheme=SchemeKind.EXPLICIT_REGULARIZED, n=2001),
        "table2": StudyConfig(StudyKind.TEMPORAL, tuple(T / s for s in (80, 120, 160, 240, 320)), n=2001),
        "table3": StudyConfig(StudyKind.SPATIAL, tuple(1 / s for s in (16, 24, 32, 48, 64)), nt=100_000),
        "table4": StudyConfig(StudyKind.COUPLED3D, tuple(1 / s for s in (10, 20, 24)), dim=3),
        "table5": StudyConfig(StudyKind.NORM, TABLE_K + (3.125e-4,), n=2001),
        "table6": StudyConfig(StudyKind.NORM, tuple(1 / s for s in (10, 20, 24, 28)), dim=3),
    }
    try:
        return presets[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(presets)}") from None


def study_defaults(study: StudyKind, dim: int = 1) -> StudyConfig:
    study = StudyKind(study)
    if study is StudyKind.NORM:
        return preset("table6" if dim == 3 else "table5")
    return preset({
        StudyKind.STABILITY: "table1",
        StudyKind.TEMPORAL: "table2",
        StudyKind.SPATIAL: "table3",
        StudyKind.COUPLED3D: "table4",
    }[study])


def config_summary(cfg: StudyConfig) -> dict:
    d = asdict(cfg)
    d["study"] = cfg.study.value
    d["scheme"] = cfg.scheme.value
    return d


__all__ = [
    "StudyKind", "StudyConfig", "ReportRow", "ConvergenceReport", "StudyError",
    "estimate_order", "run_study", "format_csv", "write_csv", "read_csv", "parse_resolution",
    "preset", "study_defaults"
]
