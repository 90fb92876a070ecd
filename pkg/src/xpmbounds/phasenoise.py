"""Monte Carlo sampling of the Gaussian phase-noise process.

This module is the stochastic oracle for the analytic ``exp(-<xi^2>/2)``
factors: it synthesizes realizations of the zero-mean stationary Gaussian
process ``xi(t)`` directly from its one-sided spectrum and estimates
characteristic-function quantities from the ensemble.

Synthesis draws independent Gaussian amplitudes per frequency bin,

    xi(t) = sum_j [a_j cos(w_j t) + b_j sin(w_j t)],
    a_j, b_j ~ N(0, S(w_j) dw / pi),

which is exactly stationary and Gaussian by construction with
autocovariance ``(1/pi) integral_0^cutoff S(w) cos(w tau) dw`` (midpoint
discretized).  The variance convention matches the fidelity module:
``S(w) = phi T_w Im H(w) coth(hbar w / 2 k_B T)`` makes the ensemble's
``<e^{i xi}>`` converge to ``exp(-phase_variance/2)``.

Randomness comes from the counter-based Philox generator; realization ``r``
uses the stream ``SeedSequence(entropy=seed, spawn_key=(r,))``, so ensembles
are reproducible bit-for-bit for a given seed on any platform and partition
of the work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.constants import hbar, k as k_B

from .errors import ConfigurationError
from .fidelity import GateGeometry
from .quadrature import integrate_doubling, scan_cutoff, scan_peak
from .response import ResponseModel

__all__ = [
    "NoiseSpectrum",
    "NoiseEnsemble",
    "sample_process",
    "estimate_char",
    "estimate_coherence",
    "dump_ensemble_csv",
]


@dataclass(frozen=True)
class NoiseSpectrum:
    """One-sided spectrum of the phase-noise process.

    ``density(w)`` must be nonnegative on ``[0, cutoff]``.  Spectra built by
    :meth:`from_response` choose ``cutoff`` where the density has decayed to
    1e-8 of its peak; hand-built toy spectra (flat blocks and the like) may
    carry spectral weight right up to their cutoff.
    """

    density: Callable[[np.ndarray], np.ndarray]
    cutoff: float

    @classmethod
    def from_response(cls, g: GateGeometry, r: ResponseModel) -> "NoiseSpectrum":
        """Spectrum ``phi T_w Im H(w) coth(hbar w / 2 k_B T)`` with auto cutoff."""
        pre = g.phi * g.walkoff_time
        if g.temperature > 0.0:
            x_scale = hbar / (2.0 * k_B * g.temperature)
            slope0 = r.him_slope0()

            def density(w):
                w = np.asarray(w, dtype=float)
                small = np.abs(w) * x_scale < 1e-12
                ws = np.where(small, 1.0, w)
                vals = r.h_im(ws) / np.tanh(x_scale * ws)
                return pre * np.where(small, slope0 / x_scale, vals)
        else:

            def density(w):
                return pre * r.h_im(np.asarray(w, dtype=float))

        w_scale = 1.0 / max(r.rms_duration(), 1e-30)
        w_peak, peak = scan_peak(density, w_scale)
        if peak == 0.0:
            return cls(density=density, cutoff=w_scale)
        cap = getattr(r, "nyquist", math.inf)
        # 1e-6 of the peak keeps the truncated tail mass negligible while
        # leaving the bin grid fine enough to resolve the resonance.
        cutoff = scan_cutoff(density, w_peak, 1e-6 * peak, cap=cap)
        return cls(density=density, cutoff=cutoff)

    @classmethod
    def flat(cls, level: float, cutoff: float) -> "NoiseSpectrum":
        """Toy spectrum, constant at ``level`` on ``[0, cutoff]``."""
        return cls(density=lambda w: np.full_like(np.asarray(w, dtype=float), level),
                   cutoff=cutoff)

    def variance(self) -> float:
        """Process variance ``(1/pi) integral_0^cutoff S(w) dw``."""
        return float(integrate_doubling(self.density, 0.0, self.cutoff,
                                        rel_tol=1e-10)) / math.pi


@dataclass
class NoiseEnsemble:
    """Matrix of process realizations on a uniform time grid."""

    xi: np.ndarray  # (n_realizations, n_time), radians
    dt: float
    seed: int
    bin_variance: float  # discretized target variance sum sigma_j^2

    @property
    def n_realizations(self) -> int:
        return self.xi.shape[0]

    @property
    def n_time(self) -> int:
        return self.xi.shape[1]

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_time) * self.dt


def sample_process(spec: NoiseSpectrum, n_real: int, n_time: int, dt: float,
                   seed: int, n_bins: int = 2048,
                   block: int = 1024) -> NoiseEnsemble:
    """Draw ``n_real`` realizations of the process on ``n_time`` grid points.

    Preconditions: ``n_time`` a power of two, and ``dt * cutoff <= pi`` so
    the grid resolves every synthesized frequency (no aliasing).
    Deterministic for a given ``seed`` (and ``n_bins``), independent of the
    block partitioning.
    """
    if n_real < 1:
        raise ConfigurationError(f"n_real must be >= 1, got {n_real}")
    if n_time < 1 or (n_time & (n_time - 1)) != 0:
        raise ConfigurationError(f"n_time must be a power of two, got {n_time}")
    if dt <= 0.0:
        raise ConfigurationError(f"dt must be positive, got {dt!r}")
    if dt * spec.cutoff > math.pi * (1.0 + 1e-12):
        raise ConfigurationError(
            f"aliasing: dt*cutoff = {dt * spec.cutoff:g} exceeds pi; "
            "decrease dt or the spectrum cutoff"
        )
    dw = spec.cutoff / n_bins
    w = (np.arange(n_bins) + 0.5) * dw
    dens = np.asarray(spec.density(w), dtype=float)
    if np.any(dens < 0.0):
        j = int(np.argmin(dens))
        raise ConfigurationError(
            f"spectral density is negative at w={w[j]:g} rad/s ({dens[j]:g})"
        )
    sigma = np.sqrt(dens * dw / math.pi)
    t = np.arange(n_time) * dt
    basis = np.concatenate([np.cos(np.outer(w, t)), np.sin(np.outer(w, t))], axis=0)
    xi = np.empty((n_real, n_time), dtype=float)
    for start in range(0, n_real, block):
        stop = min(start + block, n_real)
        amps = np.empty((stop - start, 2 * n_bins), dtype=float)
        for r_idx in range(start, stop):
            rng = np.random.Generator(
                np.random.Philox(np.random.SeedSequence(entropy=seed,
                                                        spawn_key=(r_idx,)))
            )
            amps[r_idx - start] = rng.standard_normal(2 * n_bins)
        amps[:, :n_bins] *= sigma
        amps[:, n_bins:] *= sigma
        # one identically shaped matvec per realization keeps each row
        # bit-identical no matter how the ensemble is partitioned or grown
        for i in range(stop - start):
            xi[start + i] = amps[i] @ basis
    return NoiseEnsemble(xi=xi, dt=dt, seed=int(seed),
                         bin_variance=float(np.sum(sigma * sigma)))


def _mean_and_stderr(values: np.ndarray) -> tuple[complex, float]:
    """Ensemble mean with jackknife standard error (complex combined)."""
    n = values.size
    mean = complex(np.mean(values))
    if n < 2:
        return mean, 0.0
    dev = values - mean
    var_mean = float(np.sum(dev.real ** 2 + dev.imag ** 2)) / (n * (n - 1))
    return mean, math.sqrt(var_mean)


def estimate_char(ens: NoiseEnsemble,
                  time_index: int | None = None) -> tuple[complex, float]:
    """Estimate ``<e^{i xi(t0)}>`` at a fixed grid time.

    For the zero-mean Gaussian process this converges to
    ``exp(-<xi^2>/2)``; the returned standard error is the jackknife
    estimate for the complex mean.
    """
    if ens.n_realizations == 0:
        raise ConfigurationError("ensemble is empty")
    idx = ens.n_time // 2 if time_index is None else int(time_index)
    if not (0 <= idx < ens.n_time):
        raise ConfigurationError(f"time_index {idx} outside grid [0, {ens.n_time})")
    return _mean_and_stderr(np.exp(1j * ens.xi[:, idx]))


def estimate_coherence(ens: NoiseEnsemble, tau: float) -> tuple[complex, float]:
    """Estimate the two-point coherence ``<e^{i [xi(t0+tau) - xi(t0)]}>``.

    ``tau`` must be a nonnegative multiple of the grid step within the grid
    span.  Real-valued in expectation; 1 at ``tau = 0`` and
    ``exp(-<xi^2>)`` beyond the correlation time.
    """
    steps = tau / ens.dt
    k = int(round(steps))
    if abs(steps - k) > 1e-9 or k < 0 or k >= ens.n_time:
        raise ConfigurationError(
            f"tau = {tau:g} s is not a grid multiple within [0, {(ens.n_time - 1) * ens.dt:g}]"
        )
    return _mean_and_stderr(np.exp(1j * (ens.xi[:, k] - ens.xi[:, 0])))


def dump_ensemble_csv(ens: NoiseEnsemble, path) -> None:
    """Write the ensemble as ``realization,t_fs,xi_rad`` rows."""
    t_fs = ens.times / 1e-15
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("realization,t_fs,xi_rad\n")
        for r_idx in range(ens.n_realizations):
            row = ens.xi[r_idx]
            for j in range(ens.n_time):
                fh.write(f"{r_idx},{t_fs[j]:.9g},{row[j]:.12g}\n")
