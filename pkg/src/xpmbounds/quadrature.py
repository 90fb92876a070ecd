"""Adaptive quadrature helpers used throughout the package.

The workhorse is composite trapezoid integration with interval doubling and
one level of Richardson extrapolation; refinement stops once successive
extrapolated estimates agree to a relative tolerance.  Frequency integrals
over spectral densities are truncated where the integrand has decayed below
a relative floor, located by ``scan_peak`` / ``scan_cutoff``.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import ConvergenceError

__all__ = [
    "integrate_doubling",
    "scan_peak",
    "scan_cutoff",
]


def integrate_doubling(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    rel_tol: float = 1e-8,
    scale: float | None = None,
    n0: int = 64,
    max_doublings: int = 22,
) -> float | complex:
    """Integrate ``f`` over ``[a, b]`` by trapezoid doubling with Richardson.

    ``f`` must accept a numpy array and return values of the same shape
    (real or complex).  Convergence is declared when successive Richardson
    estimates differ by less than ``rel_tol`` relative to ``scale`` (by
    default the magnitude of the current estimate).  Raises
    :class:`ConvergenceError` carrying the last estimate if the doubling
    budget is exhausted.
    """
    if b <= a:
        return 0.0
    n = int(n0)
    x = np.linspace(a, b, n + 1)
    y = f(x)
    h = (b - a) / n
    trap = h * (np.sum(y) - 0.5 * (y[0] + y[-1]))
    prev_rich = None
    for _ in range(max_doublings):
        mids = x[:-1] + 0.5 * h
        trap_fine = 0.5 * trap + 0.5 * h * np.sum(f(mids))
        rich = (4.0 * trap_fine - trap) / 3.0
        if prev_rich is not None:
            err = abs(rich - prev_rich)
            ref = abs(rich) if scale is None else scale
            if err <= rel_tol * max(ref, np.finfo(float).tiny):
                return rich
        prev_rich = rich
        trap = trap_fine
        n *= 2
        h *= 0.5
        x = np.linspace(a, b, n + 1)
    raise ConvergenceError(
        f"trapezoid doubling did not converge to rel_tol={rel_tol:g} "
        f"after {max_doublings} doublings on [{a:g}, {b:g}]",
        estimate=prev_rich,
        error_bound=abs(rich - prev_rich) if prev_rich is not None else None,
    )


def scan_peak(f: Callable[[np.ndarray], np.ndarray], w_scale: float,
              decades: float = 8.0, points_per_decade: int = 64) -> tuple[float, float]:
    """Locate the peak of ``|f|`` on a log grid around the scale ``w_scale``.

    Returns ``(w_peak, peak_value)``.  Good enough for the smooth,
    single-lobe spectral magnitudes this package deals with; downstream
    integration only needs the peak for relative thresholds.
    """
    half = decades / 2.0
    grid = w_scale * np.logspace(-half, half, int(decades * points_per_decade))
    vals = np.abs(f(grid))
    i = int(np.argmax(vals))
    return float(grid[i]), float(vals[i])


def scan_cutoff(
    f: Callable[[np.ndarray], np.ndarray],
    start: float,
    threshold: float,
    cap: float = np.inf,
    growth: float = 1.5,
    probes: int = 16,
    max_iter: int = 200,
) -> float:
    """Find a frequency beyond which ``|f|`` stays below ``threshold``.

    Scans geometrically from ``start``: each octave ``[w, growth*w]`` is
    probed at ``probes`` points and accepted as the cutoff once every probe
    is below threshold.  The scan is capped at ``cap`` (tabulated spectra
    carry interpolation artifacts past the sampling bandwidth, so pushing
    beyond it adds noise rather than signal).
    """
    w = float(start)
    for _ in range(max_iter):
        hi = min(w * growth, cap)
        window = np.linspace(w, hi, probes)
        if np.max(np.abs(f(window))) < threshold:
            return hi
        if hi >= cap:
            return cap
        w = hi
    raise ConvergenceError(
        f"integrand never decayed below {threshold:g} within {max_iter} octaves",
        estimate=w,
    )
