"""Fidelity bounds for walk-off XPM conditional-phase gates.

Geometry is parameterized by the conditional phase ``phi``, the walk-off
time ``T_w`` (medium length over the inverse-group-velocity difference) and
the inter-pulse delay ``t_d``: every bound depends on the raw nonlinearity
strength, length and group velocities only through these combinations.

The phase noise that degrades the bounds is a zero-mean Gaussian whose
variance is ``phi * T_w / pi`` times the thermally weighted half-line
integral of ``Im H``; at zero temperature this reduces to
``phi * T_w * him_l1 / (2 pi)`` with ``him_l1`` the full-line metric from
the response module, and every exponential noise factor is
``exp(-variance / 2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np
from scipy.constants import hbar, k as k_B

from .errors import ConfigurationError, ConvergenceError, XpmBoundsError
from .pulses import (
    DiracPulse,
    GaussianPulse,
    PulseShape,
    TabulatedPulse,
    pulse_window,
    shifted,
)
from .quadrature import integrate_doubling, scan_cutoff, scan_peak
from .response import ResponseModel

__all__ = [
    "GateGeometry",
    "FidelityReport",
    "phase_shift_exponent",
    "induced_phase_profile",
    "uniform_conditions",
    "phase_variance",
    "f0_uniform_bound",
    "f0_nonuniform_bound",
    "fmax",
    "f1max_nonuniform",
    "pmp_cascade_bound",
]

DIRECTIONS = ("A_sees_B", "B_sees_A")


@dataclass(frozen=True)
class GateGeometry:
    """Walk-off parameterization of one XPM interaction.

    ``phi`` is the target conditional phase in radians (nonnegative: the
    noise spectrum scales with ``phi`` and must stay nonnegative),
    ``walkoff_time`` the time for the fast pulse to sweep through the slow
    one, ``delay`` the launch delay of the fast pulse, ``temperature`` the
    reservoir temperature in kelvin.
    """

    phi: float
    walkoff_time: float
    delay: float = 0.0
    temperature: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.phi) or self.phi < 0.0:
            raise ConfigurationError(f"phi must be finite and >= 0, got {self.phi!r}")
        if not (self.walkoff_time > 0.0):
            raise ConfigurationError(
                f"walkoff_time must be positive, got {self.walkoff_time!r}"
            )
        if self.delay < 0.0:
            raise ConfigurationError(f"delay must be >= 0, got {self.delay!r}")
        if self.temperature < 0.0:
            raise ConfigurationError(
                f"temperature must be >= 0, got {self.temperature!r}"
            )

    @classmethod
    def from_raw(cls, eta: float, length: float, v_a: float, v_b: float,
                 delay: float = 0.0, temperature: float = 0.0) -> "GateGeometry":
        """Build from nonlinearity strength, medium length and group velocities.

        Requires ``v_b > v_a > 0``; converts via ``1/u = 1/v_a - 1/v_b``,
        ``phi = eta * u`` and ``T_w = length / u``.
        """
        if not (0.0 < v_a < v_b):
            raise ConfigurationError(
                f"need v_b > v_a > 0, got v_a={v_a!r}, v_b={v_b!r}"
            )
        if not (length > 0.0):
            raise ConfigurationError(f"length must be positive, got {length!r}")
        u = 1.0 / (1.0 / v_a - 1.0 / v_b)
        return cls(phi=eta * u, walkoff_time=length / u,
                   delay=delay, temperature=temperature)


@dataclass(frozen=True)
class FidelityReport:
    """A computed bound together with the factors that produced it.

    ``noise_exponent`` is the argument X of the ``exp(-X)`` phase-noise
    factor; ``overlap_real`` is the real part of the phase-kernel double
    integral where one enters the bound (None otherwise).
    """

    bound_kind: str
    value: float
    noise_exponent: float
    overlap_real: float | None
    inputs: Mapping[str, Any] = field(default_factory=dict)
    notes: tuple[str, ...] = ()


def phase_shift_exponent(delta, g: GateGeometry, r: ResponseModel,
                         direction: str = "A_sees_B"):
    """Phase accumulated across the medium at inter-pulse separation ``delta``.

    Equals ``phi * [Hc(delta + T_w) - Hc(delta)]`` when the slow pulse sees
    the fast one, and ``phi * [Hc(delta) - Hc(delta - T_w)]`` the other way
    around; saturates at ``phi`` once the window spans the full response.
    """
    if direction not in DIRECTIONS:
        raise ConfigurationError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    delta = np.asarray(delta, dtype=float)
    if direction == "A_sees_B":
        return g.phi * (r.cumulative(delta + g.walkoff_time) - r.cumulative(delta))
    return g.phi * (r.cumulative(delta) - r.cumulative(delta - g.walkoff_time))


def _vector_integral(fs, lo: float, hi: float, abs_tol: float = 1e-10,
                     n0: int = 128, max_doublings: int = 18):
    """Doubling trapezoid for integrands returning one row per output point."""
    n = n0
    s = np.linspace(lo, hi, n + 1)
    y = fs(s)
    h = (hi - lo) / n
    trap = h * (np.sum(y, axis=-1) - 0.5 * (y[..., 0] + y[..., -1]))
    prev = None
    for _ in range(max_doublings):
        mids = s[:-1] + 0.5 * h
        trap = 0.5 * trap + 0.5 * h * np.sum(fs(mids), axis=-1)
        if prev is not None and np.max(np.abs(trap - prev)) <= abs_tol:
            return trap
        prev = trap
        n *= 2
        h *= 0.5
        s = np.linspace(lo, hi, n + 1)
    from .errors import ConvergenceError

    raise ConvergenceError(
        f"profile quadrature did not reach abs_tol={abs_tol:g}",
        estimate=trap,
        error_bound=float(np.max(np.abs(trap - prev))) if prev is not None else None,
    )


def induced_phase_profile(t_grid, g: GateGeometry, r: ResponseModel,
                          other_pulse: PulseShape,
                          direction: str = "A_sees_B") -> np.ndarray:
    """Conditional phase factor seen at each time given the other pulse.

    Returns ``integral ds e^{i Theta(t - s)} |psi_other(s)|^2`` per grid
    point; each value has modulus <= 1, with equality exactly when the
    phase shift is uniform over the other pulse's support.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if not np.all(np.isfinite(t_grid)):
        raise ConfigurationError("t_grid must be finite")
    theta = lambda d: phase_shift_exponent(d, g, r, direction)
    if isinstance(other_pulse, DiracPulse):
        return np.exp(1j * theta(t_grid - other_pulse.center))
    lo, hi = pulse_window(other_pulse)
    out = np.empty(t_grid.shape, dtype=complex)
    chunk = 256
    flat = t_grid.ravel()
    res = np.empty(flat.shape, dtype=complex)
    for i in range(0, flat.size, chunk):
        tt = flat[i : i + chunk, None]
        fs = lambda s: np.exp(1j * theta(tt - s[None, :])) * other_pulse.intensity(s)[None, :]
        res[i : i + chunk] = _vector_integral(fs, lo, hi)
    out = res.reshape(t_grid.shape)
    return out


def uniform_conditions(t_psi: float, t_h: float) -> tuple[float, float]:
    """Shortest delay and walk-off giving a uniform phase shift.

    Returns ``(t_d, T_w) = (t_psi + t_h, 2 (t_psi + t_h))`` for nominal
    pulse and response durations; degenerate when both are zero.
    """
    if t_psi < 0.0 or t_h < 0.0:
        raise ConfigurationError("t_psi and t_h must be nonnegative")
    total = t_psi + t_h
    if total == 0.0:
        raise ConfigurationError(
            "degenerate geometry: t_psi and t_h cannot both be zero"
        )
    return total, 2.0 * total


def phase_variance(g: GateGeometry, r: ResponseModel,
                   rel_tol: float = 1e-8) -> float:
    """Variance of the phase noise seen by one output field.

    ``<xi^2> = (phi T_w / pi) integral_0^inf Im H(w) coth(hbar w / 2 k_B T) dw``,
    with ``coth == 1`` at T = 0 (where the integral is ``him_l1 / 2``).  The
    integrand's ``w -> 0`` limit at T > 0 is finite,
    ``(d Im H/dw)(0) * 2 k_B T / hbar``.
    """
    if g.phi == 0.0:
        return 0.0
    prefactor = g.phi * g.walkoff_time / math.pi
    if g.temperature == 0.0:
        return 0.5 * prefactor * r.him_l1()
    x_scale = hbar / (2.0 * k_B * g.temperature)  # coth argument per rad/s
    slope0 = r.him_slope0()

    def integrand(w):
        w = np.asarray(w, dtype=float)
        small = np.abs(w) * x_scale < 1e-12
        ws = np.where(small, 1.0, w)
        vals = r.h_im(ws) / np.tanh(x_scale * ws)
        return np.where(small, slope0 / x_scale, vals)

    w_scale = 1.0 / max(r.rms_duration(), 1e-30)
    w_peak, peak = scan_peak(integrand, w_scale)
    peak = max(peak, float(integrand(np.array([w_scale * 1e-6]))[0]))
    if peak == 0.0:
        return 0.0
    cap = getattr(r, "nyquist", math.inf)
    cutoff = scan_cutoff(integrand, w_peak, 1e-9 * peak, cap=cap)
    integral = integrate_doubling(integrand, 0.0, cutoff, rel_tol=rel_tol, n0=512)
    return prefactor * float(integral)


def _bound_from_exponent(kind: str, x: float, inputs: dict,
                         notes: tuple[str, ...] = ()) -> FidelityReport:
    return FidelityReport(
        bound_kind=kind,
        value=(2.0 + math.exp(-x)) / 3.0,  # exactly 1 in the noiseless limit
        noise_exponent=x,
        overlap_real=None,
        inputs=inputs,
        notes=notes,
    )


def f0_uniform_bound(phi: float, t_psi: float, t_h: float,
                     him_l1: float) -> FidelityReport:
    """Vacuum-fidelity upper bound under the uniform-phase-shift conditions.

    ``F0 <= 2/3 + (1/3) exp(-(phi / 2 pi) (t_psi + t_h) him_l1)``.
    """
    if min(phi, t_psi, t_h, him_l1) < 0.0:
        raise ConfigurationError("all arguments must be nonnegative")
    x = (phi / (2.0 * math.pi)) * (t_psi + t_h) * him_l1
    return _bound_from_exponent(
        "F0_uniform", x,
        {"phi": phi, "t_psi": t_psi, "t_h": t_h, "him_l1": him_l1},
    )


def f0_nonuniform_bound(g: GateGeometry, r: ResponseModel) -> FidelityReport:
    """Vacuum-fidelity upper bound without the uniform-phase conditions."""
    x = 0.5 * phase_variance(g, r)
    return _bound_from_exponent(
        "F0_nonuniform", x,
        {"phi": g.phi, "walkoff_time": g.walkoff_time, "temperature": g.temperature},
    )


def fmax(r: ResponseModel) -> FidelityReport:
    """Most favorable bound: pi phase, slow-response regime.

    ``F <= 2/3 + (1/3) exp(-(t_h / 2) him_l1)``; applies to both the vacuum
    and single-photon fidelities.
    """
    t_h = r.rms_duration()
    him = r.him_l1()
    x = 0.5 * t_h * him
    return _bound_from_exponent("Fmax", x, {"t_h": t_h, "him_l1": him})


def _kernel_point(pulse_a: PulseShape, pulse_b: PulseShape):
    """Cross-correlation of the two intensities as a point mass or density.

    Returns ``("point", delta0)`` or ``("density", K, lo, hi)`` with
    ``K(delta) = integral |psi_a(s + delta)|^2 |psi_b(s)|^2 ds``.
    """
    a_dirac = isinstance(pulse_a, DiracPulse)
    b_dirac = isinstance(pulse_b, DiracPulse)
    if a_dirac and b_dirac:
        return ("point", pulse_a.center - pulse_b.center)
    if isinstance(pulse_a, GaussianPulse) and isinstance(pulse_b, GaussianPulse):
        mu = pulse_a.center - pulse_b.center
        var = pulse_a.intensity_std ** 2 + pulse_b.intensity_std ** 2
        return _gauss_kernel(mu, var)
    if a_dirac and isinstance(pulse_b, GaussianPulse):
        return _gauss_kernel(pulse_a.center - pulse_b.center,
                             pulse_b.intensity_std ** 2)
    if b_dirac and isinstance(pulse_a, GaussianPulse):
        return _gauss_kernel(pulse_a.center - pulse_b.center,
                             pulse_a.intensity_std ** 2)
    if a_dirac:
        K = lambda d: pulse_b.intensity(pulse_a.center - np.asarray(d))
        lo_b, hi_b = pulse_window(pulse_b)
        return ("density", K, pulse_a.center - hi_b, pulse_a.center - lo_b)
    if b_dirac:
        K = lambda d: pulse_a.intensity(pulse_b.center + np.asarray(d))
        lo_a, hi_a = pulse_window(pulse_a)
        return ("density", K, lo_a - pulse_b.center, hi_a - pulse_b.center)
    return _numeric_kernel(pulse_a, pulse_b)


def _gauss_kernel(mu: float, var: float):
    std = math.sqrt(var)
    norm = 1.0 / (std * math.sqrt(2.0 * math.pi))

    def K(d):
        z = (np.asarray(d, dtype=float) - mu) / std
        return norm * np.exp(-0.5 * z * z)

    return ("density", K, mu - 8.0 * std, mu + 8.0 * std)


def _numeric_kernel(pulse_a: PulseShape, pulse_b: PulseShape, n_s: int = 4097):
    lo_a, hi_a = pulse_window(pulse_a)
    lo_b, hi_b = pulse_window(pulse_b)
    s = np.linspace(lo_b, hi_b, n_s)
    ib = pulse_b.intensity(s)

    def K(d):
        d = np.atleast_1d(np.asarray(d, dtype=float))
        ia = pulse_a.intensity(d[:, None] + s[None, :])
        return np.trapezoid(ia * ib[None, :], s, axis=-1)

    return ("density", K, lo_a - hi_b, hi_a - lo_b)


def _overlap(g: GateGeometry, r: ResponseModel, pulse_a: PulseShape,
             pulse_b: PulseShape, rel_tol: float = 1e-8) -> complex:
    """``integral dDelta K(Delta) e^{i Theta(Delta)}`` with the A-sees-B phase.

    The kernel has unit mass, so the integral is rewritten as
    ``1 + integral K (e^{i Theta} - 1)`` over the window where ``Theta`` is
    nonzero (separations between ``-T_w`` and the response support); this
    keeps fast-response geometries (picosecond pulses against a femtosecond
    feature) cheap and accurate.
    """
    theta = lambda d: phase_shift_exponent(d, g, r, "A_sees_B")
    kern = _kernel_point(pulse_a, pulse_b)
    if kern[0] == "point":
        return complex(np.exp(1j * theta(kern[1])))
    _, K, lo, hi = kern
    try:
        t_supp = r.support_time(1e-9)
        lo = max(lo, -g.walkoff_time)
        hi = min(hi, t_supp)
    except XpmBoundsError:
        pass  # no finite support estimate; integrate the full kernel window
    if hi <= lo:
        return 1.0 + 0.0j
    integrand = lambda d: K(d) * (np.exp(1j * theta(d)) - 1.0)
    try:
        corr = integrate_doubling(integrand, lo, hi, rel_tol=rel_tol,
                                  scale=1.0, n0=256)
    except ConvergenceError as exc:
        est = None if exc.estimate is None else 1.0 + exc.estimate
        raise ConvergenceError(str(exc), estimate=est,
                               error_bound=exc.error_bound) from None
    return complex(1.0 + corr)


def _check_delayed_pair(pulse_a: PulseShape, pulse_b: PulseShape, delay: float):
    if type(pulse_a) is not type(pulse_b):
        raise ConfigurationError("pulse_b must be pulse_a delayed by the geometry delay")
    tol = 1e-9 * max(abs(delay), 1e-300)
    if isinstance(pulse_a, (DiracPulse, GaussianPulse)):
        off = pulse_b.center - pulse_a.center
        same = abs(off - delay) <= max(tol, 1e-12 * max(abs(off), abs(delay), 1.0))
        if isinstance(pulse_a, GaussianPulse):
            same = same and pulse_a.t_psi == pulse_b.t_psi
        if not same:
            raise ConfigurationError(
                f"pulse_b must be pulse_a delayed by {delay:g} s"
            )
    else:
        if pulse_a.times.shape != pulse_b.times.shape or not np.allclose(
            pulse_b.times - delay, pulse_a.times
        ) or not np.allclose(pulse_a.values, pulse_b.values):
            raise ConfigurationError(
                f"pulse_b must be pulse_a delayed by {delay:g} s"
            )


def f1max_nonuniform(g: GateGeometry, r: ResponseModel, pulse_a: PulseShape,
                     pulse_b: PulseShape | None = None) -> FidelityReport:
    """Single-photon fidelity bound without the uniform-phase conditions.

    ``F1 <= 2/3 - (1/3) exp(-<xi^2>/2) Re integral integral e^{i Theta(t-s)}
    |psi_A(t)|^2 |psi_B(s)|^2 dt ds``, evaluated as a 1-D integral over
    ``Delta = t - s`` against the intensity cross-correlation.  For Dirac
    pulses the overlap collapses to ``cos(phi * Hc(T_w - t_d))``.
    ``pulse_b`` defaults to ``pulse_a`` delayed by the geometry delay, and
    is validated against that relation when supplied.
    """
    if pulse_b is None:
        pulse_b = shifted(pulse_a, g.delay)
    else:
        _check_delayed_pair(pulse_a, pulse_b, g.delay)
    x = 0.5 * phase_variance(g, r)
    overlap = _overlap(g, r, pulse_a, pulse_b)
    value = (2.0 - math.exp(-x) * overlap.real) / 3.0
    return FidelityReport(
        bound_kind="F1max_nonuniform",
        value=value,
        noise_exponent=x,
        overlap_real=overlap.real,
        inputs={
            "phi": g.phi,
            "walkoff_time": g.walkoff_time,
            "delay": g.delay,
            "temperature": g.temperature,
            "pulse_kind": pulse_a.kind,
        },
    )


def pmp_cascade_bound(n_cells: int, r: ResponseModel, per_cell_phi: float,
                      pulse: PulseShape | None = None) -> FidelityReport:
    """Bound for N cascaded XPM + principal-mode-projection unit cells.

    Each cell is assumed to run in the slow-response uniform-phase regime
    with phase ``per_cell_phi``; the per-cell characteristic value is then
    ``exp(-(per_cell_phi / 2 pi) t_h him_l1)`` and the two-point coherence
    term is taken at its maximum, 1.  At fixed total phase the bound is
    independent of N (phase and noise scale together with the nonlinearity),
    and equals the single-cell most-favorable bound at total phase pi.
    """
    if not isinstance(n_cells, (int, np.integer)) or isinstance(n_cells, bool):
        raise ConfigurationError(f"n_cells must be an integer, got {n_cells!r}")
    if n_cells < 1:
        raise ConfigurationError(f"n_cells must be >= 1, got {n_cells}")
    if per_cell_phi < 0.0:
        raise ConfigurationError("per_cell_phi must be nonnegative")
    t_h = r.rms_duration()
    him = r.him_l1()
    per_cell_x = (per_cell_phi / (2.0 * math.pi)) * t_h * him
    x = n_cells * per_cell_x
    notes: tuple[str, ...] = ()
    if pulse is not None and not isinstance(pulse, DiracPulse):
        width = (pulse.t_psi if isinstance(pulse, GaussianPulse)
                 else pulse.times[-1] - pulse.times[0])
        if width > t_h:
            notes = (
                "slow-response assumption violated: pulse duration exceeds "
                "the response duration; the in-regime bound is reported",
            )
    # 1/2 + c^N/3 + 1/6 with the coherence term at its maximum
    value = (2.0 + math.exp(-x)) / 3.0
    return FidelityReport(
        bound_kind="PMP_cascade",
        value=value,
        noise_exponent=x,
        overlap_real=None,
        inputs={
            "n_cells": int(n_cells),
            "per_cell_phi": per_cell_phi,
            "pulse_kind": pulse.kind if pulse is not None else None,
        },
        notes=notes,
    )
