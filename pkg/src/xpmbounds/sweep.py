"""Parameter sweeps and heat maps over the fidelity bounds.

Sweeps are deterministic: identical specs and inputs produce bit-identical
tables regardless of the worker count, because cells are addressed by index
and assembled in place.  Heat-map peaks are located by a coarse argmax with
deterministic tie-breaking (lowest x, then lowest y) followed by nested
local grid refinement; refinement never reports a value below the coarse
maximum.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, XpmBoundsError
from .fidelity import GateGeometry, f1max_nonuniform, fmax
from .pulses import DiracPulse, GaussianPulse, PulseShape
from .response import ResponseModel, TwoPoleResponse

__all__ = [
    "Axis",
    "SweepSpec",
    "GammaSweepTable",
    "PeakInfo",
    "HeatMap",
    "gamma_sweep",
    "heatmap_f1",
    "find_peak",
    "refine_peak",
]


@dataclass(frozen=True)
class Axis:
    """One sweep axis: ``count`` points from ``lo`` to ``hi``."""

    name: str
    lo: float
    hi: float
    count: int
    spacing: str = "linear"

    def __post_init__(self):
        if self.count < 2:
            raise ConfigurationError(f"axis {self.name}: count must be >= 2")
        if not (self.lo < self.hi):
            raise ConfigurationError(f"axis {self.name}: need lo < hi")
        if self.spacing not in ("linear", "log"):
            raise ConfigurationError(f"axis {self.name}: spacing must be linear|log")
        if self.spacing == "log" and self.lo <= 0.0:
            raise ConfigurationError(f"axis {self.name}: log spacing requires lo > 0")

    def grid(self) -> np.ndarray:
        if self.spacing == "log":
            return np.logspace(math.log10(self.lo), math.log10(self.hi), self.count)
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class SweepSpec:
    """Axes and fixed parameters for an F1 heat map (phi x walk-off)."""

    phi_axis: Axis
    walkoff_axis: Axis
    t_d_rule: str = "half"  # delay = walkoff / 2, symmetric walk-off

    def __post_init__(self):
        if self.t_d_rule != "half":
            raise ConfigurationError(f"unknown t_d rule {self.t_d_rule!r}")


@dataclass(frozen=True)
class GammaSweepTable:
    """Per-damping metrics table (all values omega0-normalized)."""

    gamma_norm: np.ndarray
    omega0_th: np.ndarray
    him_l1_norm: np.ndarray
    fmax: np.ndarray


@dataclass(frozen=True)
class PeakInfo:
    x: float
    y: float
    value: float
    refined: bool


@dataclass(frozen=True)
class HeatMap:
    x_axis: np.ndarray  # phi values, radians
    y_axis: np.ndarray  # walk-off times, seconds
    values: np.ndarray  # shape (len(x_axis), len(y_axis))
    peak: PeakInfo


def gamma_sweep(gamma_min: float, gamma_max: float, count: int,
                spacing: str = "log") -> GammaSweepTable:
    """Duration, spectral metric and most-favorable bound across damping.

    Rows are ordered by the normalized damping; everything is computed in
    omega0-normalized units from the closed forms, so the sweep is exact
    and fast.
    """
    if gamma_min <= 0.0:
        raise ConfigurationError("gamma values must be > 0")
    axis = Axis("gamma_norm", gamma_min, gamma_max, count, spacing)
    gammas = axis.grid()
    th = np.empty_like(gammas)
    him = np.empty_like(gammas)
    fm = np.empty_like(gammas)
    for i, g in enumerate(gammas):
        r = TwoPoleResponse(1.0, float(g))
        th[i] = r.rms_duration()
        him[i] = r.him_l1()
        fm[i] = fmax(r).value
    return GammaSweepTable(gamma_norm=gammas, omega0_th=th, him_l1_norm=him, fmax=fm)


def _cell_value(response: ResponseModel, phi: float, walkoff: float,
                pulse: PulseShape, temperature: float) -> float:
    g = GateGeometry(phi=phi, walkoff_time=walkoff, delay=0.5 * walkoff,
                     temperature=temperature)
    return f1max_nonuniform(g, response, pulse).value


def heatmap_f1(spec: SweepSpec, response: ResponseModel, pulse_kind: str,
               t_psi: float | None = None, temperature: float = 0.0,
               threads: int = 1, refine: bool = True) -> HeatMap:
    """F1 bound over a (phi, walk-off) grid with the symmetric-delay rule.

    Cells whose quadrature fails are emitted as NaN with a warning rather
    than aborting the sweep.  The peak is the coarse argmax refined by two
    successive 10x local grids (skipped with ``refine=False``).
    """
    if pulse_kind == "dirac":
        pulse: PulseShape = DiracPulse(0.0)
    elif pulse_kind == "gaussian":
        if t_psi is None or t_psi <= 0.0:
            raise ConfigurationError("gaussian pulse needs a positive t_psi")
        pulse = GaussianPulse(t_psi=t_psi, center=0.0)
    else:
        raise ConfigurationError(f"unknown pulse kind {pulse_kind!r}")
    phis = spec.phi_axis.grid()
    walkoffs = spec.walkoff_axis.grid()
    values = np.full((phis.size, walkoffs.size), np.nan)

    def fill_row(i: int) -> None:
        for j, w in enumerate(walkoffs):
            try:
                values[i, j] = _cell_value(response, float(phis[i]), float(w),
                                           pulse, temperature)
            except XpmBoundsError as exc:
                warnings.warn(
                    f"heatmap cell (phi={phis[i]:g}, walkoff={w:g}) failed: {exc}",
                    stacklevel=2,
                )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill_row, range(phis.size)))
    else:
        for i in range(phis.size):
            fill_row(i)

    (ix, iy), coarse = find_peak(values)
    peak = PeakInfo(x=float(phis[ix]), y=float(walkoffs[iy]), value=coarse,
                    refined=False)
    if refine:
        f = lambda x, y: _cell_value(response, x, y, pulse, temperature)
        dx = _cell_halfwidth(phis, ix, spec.phi_axis.spacing == "log")
        dy = _cell_halfwidth(walkoffs, iy, spec.walkoff_axis.spacing == "log")
        rx, ry, rv = refine_peak(
            f, peak.x, peak.y, dx, dy,
            log_x=spec.phi_axis.spacing == "log",
            log_y=spec.walkoff_axis.spacing == "log",
            x_bounds=(phis[0], phis[-1]), y_bounds=(walkoffs[0], walkoffs[-1]),
        )
        if rv >= coarse:
            peak = PeakInfo(x=rx, y=ry, value=rv, refined=True)
        else:
            peak = PeakInfo(x=peak.x, y=peak.y, value=coarse, refined=True)
    return HeatMap(x_axis=phis, y_axis=walkoffs, values=values, peak=peak)


def _cell_halfwidth(grid: np.ndarray, i: int, log: bool) -> float:
    if log:
        ratios = grid[1:] / grid[:-1]
        return float(ratios[min(i, ratios.size - 1)])
    steps = np.diff(grid)
    return float(steps[min(i, steps.size - 1)])


def find_peak(values, x_axis=None, y_axis=None):
    """Argmax with deterministic tie-breaking (lowest x, then lowest y).

    Accepts a 1-D table column or a 2-D matrix; NaN cells are skipped, and
    an all-NaN input raises.  Returns ``(index_tuple, value)`` or, when axes
    are given, ``((x, y), value)`` coordinates instead of indices.
    """
    arr = np.asarray(values, dtype=float)
    if arr.size == 0 or np.all(np.isnan(arr)):
        raise ConfigurationError("no finite values to locate a peak in")
    masked = np.where(np.isnan(arr), -np.inf, arr)
    flat = int(np.argmax(masked))  # first occurrence in row-major order
    value = float(masked.ravel()[flat])
    if arr.ndim == 1:
        if x_axis is not None:
            return (float(np.asarray(x_axis)[flat]),), value
        return (flat,), value
    if arr.ndim != 2:
        raise ConfigurationError("find_peak expects a 1-D or 2-D array")
    ix, iy = np.unravel_index(flat, arr.shape)
    if x_axis is not None and y_axis is not None:
        return (float(np.asarray(x_axis)[ix]), float(np.asarray(y_axis)[iy])), value
    return (int(ix), int(iy)), value


def refine_peak(f, x0: float, y0: float, dx: float, dy: float,
                levels: int = 2, points: int = 21,
                log_x: bool = False, log_y: bool = False,
                x_bounds=None, y_bounds=None):
    """Nested local grid search around a coarse argmax.

    Each level lays a ``points x points`` grid across +-1 coarse cell and
    shrinks the cell by 10x, so two levels sharpen the location by about a
    factor 100.  Grid search (not derivative-based) because bound surfaces
    can be non-smooth at uniform-phase-condition boundaries.
    """
    bx, by, bv = float(x0), float(y0), -np.inf
    for _ in range(levels):
        xs = _local_grid(bx, dx, points, log_x, x_bounds)
        ys = _local_grid(by, dy, points, log_y, y_bounds)
        vals = np.full((xs.size, ys.size), np.nan)
        for i, x in enumerate(xs):
            for j, y in enumerate(ys):
                try:
                    vals[i, j] = f(float(x), float(y))
                except XpmBoundsError:
                    continue
        try:
            (ix, iy), v = find_peak(vals)
        except ConfigurationError:
            break
        if v > bv:
            bx, by, bv = float(xs[ix]), float(ys[iy]), v
        dx = dx / 10.0 if not log_x else dx ** 0.1
        dy = dy / 10.0 if not log_y else dy ** 0.1
    return bx, by, bv


def _local_grid(center: float, half: float, points: int, log: bool, bounds):
    if log:
        lo, hi = center / half, center * half
        if bounds is not None:
            lo, hi = max(lo, bounds[0]), min(hi, bounds[1])
        return np.logspace(math.log10(lo), math.log10(hi), points)
    lo, hi = center - half, center + half
    if bounds is not None:
        lo, hi = max(lo, bounds[0]), min(hi, bounds[1])
    return np.linspace(lo, hi, points)
