"""Gamma sweeps and figure pipelines (data CSV plus SVG plot)."""
from __future__ import annotations

import enum
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._io import atomic_write_text, csv_text, fmt
from .analysis import weak_damping_exponent
from .hamiltonians import BasisKind, ModelKind
from .propagator import SimOptions, StepSizeUnderflow, TRAJECTORY_HEADER, propagate
from .pulses import PulseConfig, Sequence
from .svg import Series, line_plot

__all__ = [
    "SweepSpec",
    "SweepRow",
    "SweepResult",
    "FigureId",
    "FigureSpec",
    "default_workers",
    "sweep_gamma",
    "render_figure",
    "linear_grid",
    "log_grid",
]

log = logging.getLogger(__name__)

MODEL_COLORS = {ModelKind.EFFECTIVE: "#1f4fd1", ModelKind.PHENOMENOLOGICAL: "#d62728"}


def linear_grid(lo: float, hi: float, n: int) -> tuple[float, ...]:
    return tuple(float(x) for x in np.linspace(lo, hi, n))


def log_grid(lo: float, hi: float, n: int) -> tuple[float, ...]:
    return tuple(float(x) for x in np.logspace(math.log10(lo), math.log10(hi), n))


def default_workers() -> int:
    """Worker bound from ``STIRAP_WORKERS``, else the available parallelism."""
    env = os.environ.get("STIRAP_WORKERS", "").strip()
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"STIRAP_WORKERS must be a positive integer, got {env!r}") from None
        if n < 1:
            raise ValueError(f"STIRAP_WORKERS must be a positive integer, got {env!r}")
        return n
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:
        return os.cpu_count() or 1


@dataclass(frozen=True)
class SweepSpec:
    cfg: PulseConfig
    gamma_grid: tuple[float, ...]
    models: tuple[ModelKind, ...] = (ModelKind.EFFECTIVE, ModelKind.PHENOMENOLOGICAL)
    include_analytic: bool = False
    output_path: str | os.PathLike | None = None
    basis: BasisKind = BasisKind.ADIABATIC
    opts: SimOptions = field(default_factory=SimOptions)

    def __post_init__(self):
        grid = tuple(float(g) for g in self.gamma_grid)
        if not grid:
            raise ValueError("gamma_grid is empty")
        if any(g < 0 for g in grid):
            raise ValueError("gamma_grid values must be >= 0")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("gamma_grid must be strictly increasing")
        object.__setattr__(self, "gamma_grid", grid)
        object.__setattr__(self, "models", tuple(ModelKind.parse(m) for m in self.models))
        object.__setattr__(self, "basis", BasisKind.parse(self.basis))


@dataclass(frozen=True)
class SweepRow:
    gamma_t: float
    model: ModelKind
    p3_final: float
    p1_final: float
    norm_final: float
    p3_analytic: float | None = None
    error: str | None = None


@dataclass
class SweepResult:
    spec: SweepSpec
    rows: list[SweepRow]

    def column(self, model: ModelKind | str, name: str) -> np.ndarray:
        model = ModelKind.parse(model)
        return np.array([getattr(r, name) for r in self.rows if r.model is model], dtype=float)

    @property
    def gamma_grid(self) -> np.ndarray:
        return np.asarray(self.spec.gamma_grid)

    def header(self) -> tuple[str, ...]:
        base = ("gammaT", "model", "p3_final", "p1_final", "norm_final")
        return base + ("p3_analytic",) if self.spec.include_analytic else base

    def csv(self) -> str:
        rows = []
        for r in self.rows:
            row = [r.gamma_t, r.model.value, r.p3_final, r.p1_final, r.norm_final]
            if self.spec.include_analytic:
                row.append(math.nan if r.p3_analytic is None else r.p3_analytic)
            rows.append(row)
        return csv_text(self.header(), rows)

    def write(self, path) -> Path:
        return atomic_write_text(path, self.csv())


def _run_point(spec: SweepSpec, gamma_t: float, model: ModelKind, exponent: float | None) -> SweepRow:
    analytic = None if exponent is None else math.exp(-2.0 * gamma_t * exponent)
    try:
        tr = propagate(spec.cfg, gamma_t / spec.cfg.t_scale, model, spec.basis, spec.opts)
    except (StepSizeUnderflow, FloatingPointError, ValueError) as exc:
        log.warning("sweep point gammaT=%s model=%s failed: %s", gamma_t, model.value, exc)
        nan = math.nan
        return SweepRow(gamma_t, model, nan, nan, nan, analytic, str(exc))
    return SweepRow(gamma_t, model, tr.p3_final, tr.p1_final, tr.norm_final, analytic)


def sweep_gamma(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    """Propagate every (Gamma T, model) pair of ``spec``.

    Rows are ordered by Gamma, then by the order of ``spec.models``.  Failed
    points are kept as rows with NaN values and an ``error`` message.
    """
    exponents = {}
    if spec.include_analytic:
        # Analytic P3 is exp(-2 Gamma I); the integral I does not depend on Gamma.
        for m in spec.models:
            exponents[m] = weak_damping_exponent(spec.cfg, m) / spec.cfg.t_scale
    jobs = [(g, m) for g in spec.gamma_grid for m in spec.models]
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or len(jobs) == 1:
        rows = [_run_point(spec, g, m, exponents.get(m)) for g, m in jobs]
    else:
        with ThreadPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            rows = list(pool.map(lambda job: _run_point(spec, job[0], job[1], exponents.get(job[1])), jobs))
    result = SweepResult(spec, rows)
    if spec.output_path is not None:
        result.write(spec.output_path)
    return result


class FigureId(enum.Enum):
    FIG2 = "fig2"
    FIG3A = "fig3a"
    FIG3B = "fig3b"
    FIG4A = "fig4a"
    FIG4B = "fig4b"

    @classmethod
    def parse(cls, value: "FigureId | str") -> "FigureId":
        if isinstance(value, cls):
            return value
        return cls(str(value).strip().lower())


# Time-trace defaults: panel (a) effective/intuitive, panel (b) phenomenological/counterintuitive.
_FIG4_DEFAULTS = {
    FigureId.FIG4A: (ModelKind.EFFECTIVE, Sequence.INTUITIVE),
    FigureId.FIG4B: (ModelKind.PHENOMENOLOGICAL, Sequence.COUNTERINTUITIVE),
}


@dataclass(frozen=True)
class FigureSpec:
    """Which figure to reproduce, with optional parameter overrides.

    ``None`` fields fall back to the figure's defaults: alpha T = 10,
    Delta T = 1; Gamma T in [0, 3] (61 points) for fig2/fig3a, log-spaced in
    [1e-2, 1e3] (51 points) for fig3b, and Gamma T = 500 for the fig4 traces.
    """

    figure_id: FigureId
    alpha_t: float = 10.0
    delta_t: float = 1.0
    gamma_grid: tuple[float, ...] | None = None
    gamma_t: float = 500.0
    model: ModelKind | None = None
    sequence: Sequence | None = None
    t_max_over_t: float = 10.0
    opts: SimOptions = field(default_factory=SimOptions)
    stem: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "figure_id", FigureId.parse(self.figure_id))
        if self.model is not None:
            object.__setattr__(self, "model", ModelKind.parse(self.model))
        if self.sequence is not None:
            object.__setattr__(self, "sequence", Sequence.parse(self.sequence))

    def grid(self) -> tuple[float, ...]:
        if self.gamma_grid is not None:
            return tuple(self.gamma_grid)
        if self.figure_id is FigureId.FIG3B:
            return log_grid(1e-2, 1e3, 51)
        return linear_grid(0.0, 3.0, 61)

    def sweep_sequence(self) -> Sequence:
        if self.figure_id is FigureId.FIG2:
            return Sequence.INTUITIVE
        return Sequence.COUNTERINTUITIVE

    def trace_setup(self) -> tuple[ModelKind, Sequence]:
        model, seq = _FIG4_DEFAULTS.get(self.figure_id, (ModelKind.EFFECTIVE, Sequence.INTUITIVE))
        return self.model or model, self.sequence or seq

    def file_stem(self) -> str:
        if self.stem:
            return self.stem
        if self.figure_id in _FIG4_DEFAULTS and (self.model or self.sequence):
            model, seq = self.trace_setup()
            return f"fig4_{model.value}-{seq.value}"
        return self.figure_id.value


def _render_sweep(spec: FigureSpec):
    seq = spec.sweep_sequence()
    cfg = PulseConfig(spec.alpha_t, spec.delta_t, seq, t_max_over_t=spec.t_max_over_t)
    analytic = spec.figure_id is not FigureId.FIG3B
    result = sweep_gamma(SweepSpec(cfg, spec.grid(), include_analytic=analytic, opts=spec.opts))
    g = result.gamma_grid
    series = []
    for m in result.spec.models:
        series.append(Series(f"{m.value} (numeric)", g, result.column(m, "p3_final"), MODEL_COLORS[m],
                             "6,4" if m is ModelKind.EFFECTIVE else None))
    if analytic:
        if seq is Sequence.INTUITIVE:
            series.append(Series("weak-damping formula", g,
                                 result.column(ModelKind.EFFECTIVE, "p3_analytic"), "#555555", "2,3"))
        else:
            for m in result.spec.models:
                series.append(Series(f"{m.value} (weak-damping formula)", g,
                                     result.column(m, "p3_analytic"), MODEL_COLORS[m], "2,3"))
    title = (f"P3 after the pulses, {seq.value} sequence "
             f"(alphaT={fmt(spec.alpha_t)}, deltaT={fmt(spec.delta_t)})")
    svg = line_plot(series, title=title, xlabel="Gamma T", ylabel="P3(+inf)",
                    logx=spec.figure_id is FigureId.FIG3B)
    return result.csv(), svg


def _render_trace(spec: FigureSpec):
    model, seq = spec.trace_setup()
    cfg = PulseConfig(spec.alpha_t, spec.delta_t, seq, t_max_over_t=spec.t_max_over_t)
    tr = propagate(cfg, spec.gamma_t, model, BasisKind.ADIABATIC, spec.opts)
    rows = zip(tr.t_over_t, tr.p1, tr.p2, tr.p3, tr.norm)
    t = tr.t_over_t
    series = [
        Series("P1", t, tr.p1, "#d62728"),
        Series("P2", t, tr.p2, "#2ca02c", "2,3"),
        Series("P3", t, tr.p3, "#1f4fd1", "6,4"),
        Series("norm", t, tr.norm, "#555555", "1,4"),
    ]
    title = f"{model.value}, {seq.value} (alphaT={fmt(spec.alpha_t)}, GammaT={fmt(spec.gamma_t)})"
    svg = line_plot(series, title=title, xlabel="t / T", ylabel="population", ylim=(-0.02, 1.02))
    return csv_text(TRAJECTORY_HEADER, rows), svg


def render_figure(spec: FigureSpec, out_dir="."):
    """Compute a figure's data and write ``<stem>.csv`` and ``<stem>.svg``.

    Returns ``(csv_path, svg_path)``.  On failure neither file is left behind.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = spec.file_stem()
    csv_path, svg_path = out_dir / f"{stem}.csv", out_dir / f"{stem}.svg"
    if spec.figure_id in _FIG4_DEFAULTS:
        csv_data, svg_data = _render_trace(spec)
    else:
        csv_data, svg_data = _render_sweep(spec)
    atomic_write_text(csv_path, csv_data)
    try:
        atomic_write_text(svg_path, svg_data)
    except BaseException:
        csv_path.unlink(missing_ok=True)
        raise
    return csv_path, svg_path

