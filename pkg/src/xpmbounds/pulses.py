"""Single-photon pulse shapes, represented by their intensity ``|psi(t)|^2``.

Only the intensity enters the fidelity bounds, so that is what each shape
exposes.  Every shape integrates to 1: the Dirac shape exactly, the Gaussian
analytically, tabulated shapes after renormalization on construction.

The Gaussian uses the duration convention ``psi(t) = e^{-2 t^2 / t_psi^2} /
(pi t_psi^2 / 4)^{1/4}``, so the intensity is a normal density with standard
deviation ``t_psi / (2 sqrt(2))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Union

import numpy as np

from .errors import DataValidationError

__all__ = [
    "DiracPulse",
    "GaussianPulse",
    "TabulatedPulse",
    "PulseShape",
    "shifted",
    "pulse_window",
]


@dataclass(frozen=True)
class DiracPulse:
    """Instantaneous pulse: ``|psi(t)|^2 = delta(t - center)``."""

    center: float = 0.0
    kind = "dirac"


@dataclass(frozen=True)
class GaussianPulse:
    """Gaussian pulse of duration ``t_psi`` centered at ``center``."""

    t_psi: float
    center: float = 0.0
    kind = "gaussian"

    def __post_init__(self):
        if not (self.t_psi > 0.0):
            raise ValueError(f"t_psi must be positive, got {self.t_psi!r}")

    @property
    def intensity_std(self) -> float:
        return self.t_psi / (2.0 * math.sqrt(2.0))

    def intensity(self, t):
        t = np.asarray(t, dtype=float)
        z = (t - self.center) / self.t_psi
        return np.exp(-4.0 * z * z) * 2.0 / (self.t_psi * math.sqrt(math.pi))


class TabulatedPulse:
    """Pulse intensity sampled on a strictly increasing time grid.

    Linear between samples and zero outside; renormalized on construction so
    the trapezoid area is 1.
    """

    kind = "tabulated"

    def __init__(self, times, intensity, center: float = 0.0):
        times = np.asarray(times, dtype=float)
        intensity = np.asarray(intensity, dtype=float)
        if times.ndim != 1 or times.shape != intensity.shape or times.size < 2:
            raise DataValidationError("tabulated pulse needs matching 1-D sample arrays")
        if np.any(np.diff(times) <= 0.0):
            raise DataValidationError("tabulated pulse times must be strictly increasing")
        if np.any(intensity < 0.0):
            raise DataValidationError("pulse intensity samples must be nonnegative")
        area = float(np.trapezoid(intensity, times))
        if area <= 0.0:
            raise DataValidationError("pulse intensity has zero area")
        self.times = times + center
        self.values = intensity / area
        self.center = float(center)

    def intensity(self, t):
        t = np.asarray(t, dtype=float)
        return np.interp(t, self.times, self.values, left=0.0, right=0.0)

    def shifted(self, dt: float) -> "TabulatedPulse":
        out = TabulatedPulse.__new__(TabulatedPulse)
        out.times = self.times + dt
        out.values = self.values
        out.center = self.center + dt
        return out


PulseShape = Union[DiracPulse, GaussianPulse, TabulatedPulse]


def shifted(pulse: PulseShape, dt: float) -> PulseShape:
    """The same pulse delayed by ``dt``."""
    if isinstance(pulse, TabulatedPulse):
        return pulse.shifted(dt)
    return replace(pulse, center=pulse.center + dt)


def pulse_window(pulse: PulseShape, n_widths: float = 8.0) -> tuple[float, float]:
    """Interval outside which the pulse intensity is negligible.

    Gaussians get ``center +- n_widths`` intensity standard deviations
    (the default 8 leaves ~1e-15 of the mass outside); tabulated pulses
    their sampled range; Dirac pulses a degenerate point interval.
    """
    if isinstance(pulse, DiracPulse):
        return pulse.center, pulse.center
    if isinstance(pulse, GaussianPulse):
        half = n_widths * pulse.intensity_std
        return pulse.center - half, pulse.center + half
    return float(pulse.times[0]), float(pulse.times[-1])
