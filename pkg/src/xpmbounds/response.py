"""XPM response-function models.

Two families are supported:

* the single-resonance two-pole family ``H(w) = w0^2 / (w0^2 - w^2 - i*w*g)``
  with normalized damping ``Gamma = g/w0``, which has closed forms for the
  impulse response ``h(t)``, its antiderivative, the RMS duration ``t_h`` and
  the spectral metric ``integral |Im H|``;
* tabulated measured responses loaded from CSV, evaluated through a
  piecewise-linear interpolant whose Fourier transform and moment integrals
  are computed exactly per segment.

Every model is causal (``h(t) = 0`` for ``t < 0``) and normalized to unit
area, and exposes the two scalar metrics that drive all fidelity bounds:
the RMS duration ``t_h`` and the full-line ``integral dw |Im H(w)|``.  The
full-line convention (twice the half-line integral) is what makes the
spectral metric equal the phase-noise variance per unit ``phi*T_w/(2*pi)``;
the closed form for the two-pole family is verified against quadrature in
the test suite under that convention.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .errors import (
    ConvergenceError,
    DataValidationError,
    DivergentMomentError,
    PoleError,
)
from .quadrature import integrate_doubling, scan_cutoff, scan_peak

__all__ = [
    "CRITICAL_GAMMA_TOL",
    "TwoPoleParams",
    "TwoPoleResponse",
    "TabulatedResponse",
    "ResponseMetrics",
    "ResponseModel",
    "two_pole_h",
    "two_pole_H",
    "cumulative_h",
    "rms_duration",
    "him_l1",
    "load_tabulated",
]

# |Gamma - 2| below this is treated as critically damped, keeping the
# piecewise closed forms numerically continuous across the boundary.
CRITICAL_GAMMA_TOL = 1e-6

# Truncation floor for spectral integrals, relative to the integrand peak.
SPECTRAL_FLOOR = 1e-9

_GAUSS3_NODES = np.array([0.5 - math.sqrt(0.15), 0.5, 0.5 + math.sqrt(0.15)])
_GAUSS3_WEIGHTS = np.array([5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0])


@dataclass(frozen=True)
class ResponseMetrics:
    """Scalar summary of a response model.

    ``t_h`` is the RMS duration of ``h`` under ``h^2`` weighting, ``him_l1``
    the full-line ``integral dw |Im H(w)|`` in rad/s, and ``h_area`` the
    (diagnostic) area of ``h``, which should be 1.
    """

    t_h: float
    him_l1: float
    h_area: float


@dataclass(frozen=True)
class TwoPoleParams:
    """Parameters of the single-resonance two-pole response.

    ``omega0`` is the resonance angular frequency (rad/s, > 0) and ``gamma``
    the damping rate (rad/s, >= 0).
    """

    omega0: float
    gamma: float

    def __post_init__(self):
        if not (self.omega0 > 0.0) or not math.isfinite(self.omega0):
            raise ValueError(f"omega0 must be positive and finite, got {self.omega0!r}")
        if self.gamma < 0.0 or not math.isfinite(self.gamma):
            raise ValueError(f"gamma must be nonnegative and finite, got {self.gamma!r}")

    @property
    def Gamma(self) -> float:
        """Dimensionless damping ``gamma / omega0``."""
        return self.gamma / self.omega0

    @property
    def regime(self) -> str:
        """One of ``underdamped``, ``critical``, ``overdamped``."""
        if abs(self.Gamma - 2.0) < CRITICAL_GAMMA_TOL:
            return "critical"
        return "underdamped" if self.Gamma < 2.0 else "overdamped"


def two_pole_h(t, p: TwoPoleParams):
    """Impulse response of the two-pole model; 0 for ``t < 0``.

    Continuous across the critical-damping boundary: within
    ``CRITICAL_GAMMA_TOL`` of ``Gamma = 2`` the critical closed form is used.
    """
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    out = np.zeros_like(t)
    m = t > 0.0
    tm = t[m]
    w0 = p.omega0
    a = 0.5 * p.gamma
    regime = p.regime
    if regime == "critical":
        out[m] = w0 * w0 * tm * np.exp(-w0 * tm)
    elif regime == "underdamped":
        nu = math.sqrt(w0 * w0 - a * a)
        out[m] = w0 * w0 * np.exp(-a * tm) * np.sin(nu * tm) / nu
    else:
        nu = math.sqrt(a * a - w0 * w0)
        lam_slow, lam_fast = a - nu, a + nu
        out[m] = w0 * w0 / (2.0 * nu) * (np.exp(-lam_slow * tm) - np.exp(-lam_fast * tm))
    return out[0] if scalar else out


def two_pole_H(omega, p: TwoPoleParams):
    """Frequency response ``w0^2 / (w0^2 - w^2 - i*w*gamma)``.

    Raises :class:`PoleError` when evaluated exactly on an undamped
    resonance (``gamma = 0`` and ``|omega| = omega0``).
    """
    omega = np.asarray(omega, dtype=float)
    scalar = omega.ndim == 0
    omega = np.atleast_1d(omega)
    if p.gamma == 0.0 and np.any(np.abs(np.abs(omega) - p.omega0) == 0.0):
        raise PoleError(
            f"two-pole response with gamma=0 has a pole at omega=+-{p.omega0:g} rad/s"
        )
    w0sq = p.omega0 * p.omega0
    H = w0sq / (w0sq - omega * omega - 1j * omega * p.gamma)
    return H[0] if scalar else H


def _two_pole_cumulative(t, p: TwoPoleParams):
    """Antiderivative ``Hc(t) = integral_0^t h``; 0 for ``t <= 0``."""
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    out = np.zeros_like(t)
    m = t > 0.0
    tm = t[m]
    w0 = p.omega0
    a = 0.5 * p.gamma
    regime = p.regime
    if regime == "critical":
        out[m] = -np.expm1(-w0 * tm) - w0 * tm * np.exp(-w0 * tm)
    elif regime == "underdamped":
        nu = math.sqrt(w0 * w0 - a * a)
        out[m] = 1.0 - np.exp(-a * tm) * (np.cos(nu * tm) + (a / nu) * np.sin(nu * tm))
    else:
        nu = math.sqrt(a * a - w0 * w0)
        lam_slow, lam_fast = a - nu, a + nu
        # 1 - Hc = (lam_fast e^{-lam_slow t} - lam_slow e^{-lam_fast t}) / (2 nu)
        out[m] = 1.0 - (
            lam_fast * np.exp(-lam_slow * tm) - lam_slow * np.exp(-lam_fast * tm)
        ) / (2.0 * nu)
    return out[0] if scalar else out


def _two_pole_him_l1_norm(Gamma: float) -> float:
    """Full-line ``integral dw |Im H|`` in units of ``omega0``.

    Evaluated with complex arithmetic; for overdamped parameters the inverse
    hyperbolic tangent is continued from below its branch cut (signed-zero
    imaginary part), which is the branch on which the expression is real.
    Near critical damping the 0/0 form is replaced by its limit, 2.
    """
    if Gamma == 0.0:
        # Undamped limit: the spectral weight collapses onto the resonance
        # with total full-line weight pi*omega0.
        return math.pi
    if abs(Gamma - 2.0) < CRITICAL_GAMMA_TOL:
        return 2.0
    g2 = Gamma * Gamma
    s = np.sqrt(complex(g2 - 4.0, 0.0))
    x = (g2 - 2.0) / (Gamma * s)
    if x.imag == 0.0:
        x = complex(x.real, -0.0)
    val = (math.pi * 1j + 2.0 * np.arctanh(x)) / s
    if abs(val.imag) > 1e-8 * abs(val):
        raise ConvergenceError(
            f"closed-form |Im H| integral has imaginary residue {val.imag:g} "
            f"at Gamma={Gamma:g}",
            estimate=val.real,
            error_bound=abs(val.imag),
        )
    return float(val.real)


class TwoPoleResponse:
    """Two-pole response model bound to concrete ``(omega0, gamma)``.

    All evaluations are pure functions of the frozen parameters, so
    instances are safe for concurrent read-only use.
    """

    kind = "two_pole"

    def __init__(self, omega0: float, gamma: float):
        self.params = TwoPoleParams(float(omega0), float(gamma))

    def __repr__(self):
        p = self.params
        return f"TwoPoleResponse(omega0={p.omega0:g}, gamma={p.gamma:g})"

    @property
    def omega0(self) -> float:
        return self.params.omega0

    @property
    def gamma(self) -> float:
        return self.params.gamma

    @property
    def Gamma(self) -> float:
        return self.params.Gamma

    def h(self, t):
        return two_pole_h(t, self.params)

    def H(self, omega):
        return two_pole_H(omega, self.params)

    def h_im(self, omega):
        """``Im H(omega)``, avoiding the PoleError guard (odd, >= 0 for w >= 0)."""
        omega = np.asarray(omega, dtype=float)
        w0sq = self.omega0 * self.omega0
        num = w0sq * omega * self.gamma
        den = (w0sq - omega * omega) ** 2 + (omega * self.gamma) ** 2
        with np.errstate(invalid="ignore"):
            out = np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), np.inf)
        return out

    def cumulative(self, t):
        return _two_pole_cumulative(t, self.params)

    def rms_duration(self) -> float:
        """Closed form ``omega0 t_h = sqrt(1/Gamma^2 + Gamma^2/4 - 1/2)``."""
        G = self.Gamma
        if G == 0.0:
            raise DivergentMomentError(
                "undamped response (gamma=0) has divergent h^2 moments"
            )
        return math.sqrt(1.0 / (G * G) + G * G / 4.0 - 0.5) / self.omega0

    def him_l1(self) -> float:
        return _two_pole_him_l1_norm(self.Gamma) * self.omega0

    def h_area(self) -> float:
        return 1.0

    def him_slope0(self) -> float:
        """``d Im H / dw`` at ``w = 0`` (equals the first moment of h)."""
        return self.gamma / (self.omega0 * self.omega0)

    def support_time(self, eps: float = 1e-9) -> float:
        """Time beyond which ``|1 - Hc(t)| <= eps`` (envelope bound).

        Used to build uniform-phase geometries: beyond this time the
        response has delivered all but ``eps`` of its area.
        """
        if eps <= 0.0 or eps >= 1.0:
            raise ValueError(f"eps must be in (0, 1), got {eps!r}")
        w0 = self.omega0
        a = 0.5 * self.gamma
        regime = self.params.regime
        if regime == "critical":
            x = math.log(1.0 / eps)
            for _ in range(8):
                x = math.log(1.0 / eps) + math.log1p(x)
            return x / w0
        if regime == "underdamped":
            if a == 0.0:
                raise DivergentMomentError(
                    "undamped response (gamma=0) has no finite support time"
                )
            nu = math.sqrt(w0 * w0 - a * a)
            return math.log((w0 / nu) / eps) / a
        nu = math.sqrt(a * a - w0 * w0)
        lam_slow, lam_fast = a - nu, a + nu
        return math.log(lam_fast / (2.0 * nu * eps)) / lam_slow

    def metrics(self) -> ResponseMetrics:
        return ResponseMetrics(
            t_h=self.rms_duration(), him_l1=self.him_l1(), h_area=self.h_area()
        )


def _osc_weights(x):
    """``E0 = integral_0^1 e^{ixu} du`` and ``E1 = integral_0^1 u e^{ixu} du``.

    Closed forms with a Taylor fallback below ``|x| = 1e-3`` to avoid the
    subtractive cancellation of the ``1/x^2`` expressions.
    """
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-3
    xs = np.where(small, 1.0, x)
    ix = 1j * xs
    eix = np.exp(ix)
    e0 = (eix - 1.0) / ix
    e1 = (eix * (ix - 1.0) + 1.0) / (ix * ix)
    if np.any(small):
        ixt = 1j * np.where(small, x, 0.0)
        t0 = np.zeros_like(ixt)
        t1 = np.zeros_like(ixt)
        term = np.ones_like(ixt)
        fact = 1.0
        for k in range(7):
            # term = (ix)^k / k!
            t0 = t0 + term / (k + 1)
            t1 = t1 + term / (k + 2)
            fact *= k + 1
            term = term * ixt / (k + 1)
        e0 = np.where(small, t0, e0)
        e1 = np.where(small, t1, e1)
    return e0, e1


class TabulatedResponse:
    """Measured response ingested from samples, normalized to unit area.

    Between samples ``h`` is linear; outside the sampled support it is zero.
    The Fourier transform and the moment integrals are those of the
    interpolant, computed exactly per segment, so there is no separate
    quadrature error on top of the interpolation error.
    """

    kind = "tabulated"

    def __init__(self, times, values, scale_factor=1.0, normalization_applied=True):
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape or times.size < 2:
            raise DataValidationError("tabulated response needs matching 1-D sample arrays")
        if np.any(np.diff(times) <= 0.0):
            raise DataValidationError("tabulated response times must be strictly increasing")
        if times[0] < 0.0:
            raise DataValidationError("tabulated response has negative-time samples")
        self.times = times
        self.values = values
        self.scale_factor = float(scale_factor)
        self.normalization_applied = bool(normalization_applied)
        cum = np.concatenate(
            ([0.0], np.cumsum(0.5 * (values[1:] + values[:-1]) * np.diff(times)))
        )
        self._cumulative = cum
        steps = np.diff(times)
        self._dt_min = float(np.min(steps))
        self._dt_mean = float((times[-1] - times[0]) / (times.size - 1))
        # Grids uniform up to text-precision jitter take the uniform
        # transform path; at this threshold the worst-case phase error at
        # the Nyquist rate is ~3e-6 rad, far below the metric tolerances.
        ideal = times[0] + np.arange(times.size) * self._dt_mean
        self._uniform = bool(
            np.max(np.abs(times - ideal)) <= 1e-6 * self._dt_mean
        )

    def __repr__(self):
        return (
            f"TabulatedResponse({self.times.size} samples on "
            f"[{self.times[0]:.3e}, {self.times[-1]:.3e}] s)"
        )

    def h(self, t):
        t = np.asarray(t, dtype=float)
        return np.interp(t, self.times, self.values, left=0.0, right=0.0)

    def cumulative(self, t):
        t = np.asarray(t, dtype=float)
        out = np.interp(t, self.times, self._cumulative,
                        left=0.0, right=self._cumulative[-1])
        return np.where(t <= 0.0, 0.0, out)

    def H(self, omega):
        """Exact transform of the piecewise-linear interpolant.

        Per-segment closed forms summed directly per requested frequency
        (no fast transform); uniform sample grids reorganize the same sum
        around powers of ``e^{i w dt}``, which avoids one exponential per
        (frequency, segment) pair.
        """
        omega = np.asarray(omega, dtype=float)
        scalar = omega.ndim == 0
        shape = omega.shape
        omega = np.atleast_1d(omega).ravel()
        out = (self._transform_uniform(omega) if self._uniform
               else self._transform_general(omega))
        return out[0] if scalar else out.reshape(shape)

    def _transform_general(self, omega):
        t0 = self.times[:-1]
        dt = np.diff(self.times)
        h0 = self.values[:-1]
        dh = np.diff(self.values)
        out = np.empty(omega.size, dtype=complex)
        chunk = max(1, int(4_000_000 // max(dt.size, 1)))
        for s in range(0, omega.size, chunk):
            w = omega[s : s + chunk, None]
            x = w * dt[None, :]
            e0, e1 = _osc_weights(x)
            seg = dt[None, :] * np.exp(1j * w * t0[None, :]) * (h0[None, :] * e0 + dh[None, :] * e1)
            out[s : s + chunk] = seg.sum(axis=1)
        return out

    def _transform_uniform(self, omega):
        # The segment sum becomes sum_k c_k z^k with z = e^{i w dt}; block it
        # as (powers within a block) @ (coefficients) x (block phases) so the
        # heavy lifting is a complex GEMM instead of a length-m loop per w.
        dt = self._dt_mean
        m = self.values.size - 1
        L = min(64, m)
        nb = -(-m // L)
        c0 = np.zeros(nb * L)
        c1 = np.zeros(nb * L)
        c0[:m] = self.values[:-1]
        c1[:m] = np.diff(self.values)
        C = np.stack([c0.reshape(nb, L).T, c1.reshape(nb, L).T], axis=-1)  # (L, nb, 2)
        out = np.empty(omega.size, dtype=complex)
        chunk = 32768
        for s in range(0, omega.size, chunk):
            w = omega[s : s + chunk]
            x = w * dt
            e0, e1 = _osc_weights(x)
            z = np.exp(1j * x)
            V = np.empty((w.size, L), dtype=complex)
            V[:, 0] = 1.0
            for j in range(1, L):
                V[:, j] = V[:, j - 1] * z
            zL = V[:, -1] * z
            W = np.empty((w.size, nb), dtype=complex)
            W[:, 0] = 1.0
            for b in range(1, nb):
                W[:, b] = W[:, b - 1] * zL
            Z = np.tensordot(V, C, axes=(1, 0))  # (n, nb, 2)
            s0 = np.einsum("nb,nb->n", W, Z[:, :, 0])
            s1 = np.einsum("nb,nb->n", W, Z[:, :, 1])
            out[s : s + chunk] = dt * np.exp(1j * w * self.times[0]) * (s0 * e0 + s1 * e1)
        return out

    def h_im(self, omega):
        return np.imag(self.H(omega))

    def _segment_moments(self):
        """Exact per-segment integrals of h^2, t h^2, t^2 h^2, t h.

        Gauss-Legendre 3 per segment is exact for polynomials up to degree
        5, which covers every integrand here (h is linear per segment).
        """
        t0 = self.times[:-1, None]
        dt = np.diff(self.times)[:, None]
        h0 = self.values[:-1, None]
        dh = np.diff(self.values)[:, None]
        u = _GAUSS3_NODES[None, :]
        w = _GAUSS3_WEIGHTS[None, :]
        t = t0 + u * dt
        h = h0 + u * dh
        h2 = h * h
        m0 = float(np.sum(w * h2 * dt))
        m1 = float(np.sum(w * t * h2 * dt))
        m2 = float(np.sum(w * t * t * h2 * dt))
        m_th = float(np.sum(w * t * h * dt))
        return m0, m1, m2, m_th

    def rms_duration(self) -> float:
        m0, m1, m2, _ = self._segment_moments()
        if m0 <= 0.0:
            raise DataValidationError("tabulated response has zero h^2 mass")
        var = m2 / m0 - (m1 / m0) ** 2
        return math.sqrt(max(var, 0.0))

    def him_slope0(self) -> float:
        _, _, _, m_th = self._segment_moments()
        return m_th

    def him_l1(self, rel_tol: float = 1e-8) -> float:
        """Full-line ``integral dw |Im H|`` by adaptive quadrature.

        Truncates at the frequency where ``|Im H|`` has decayed below
        ``SPECTRAL_FLOOR`` times its peak, capped at twice the sampling
        Nyquist rate (beyond which the interpolant no longer represents
        the measured response).
        """
        f = lambda w: np.abs(self.h_im(w))
        t_h = self.rms_duration()
        w_peak, peak = scan_peak(f, 1.0 / max(t_h, self._dt_min))
        if peak == 0.0:
            return 0.0
        cutoff = scan_cutoff(f, w_peak, SPECTRAL_FLOOR * peak, cap=self.nyquist)
        span = self.times[-1] - self.times[0]
        n0 = int(min(max(1024, cutoff * span / math.pi), 65536))
        half = integrate_doubling(f, 0.0, cutoff, rel_tol=rel_tol, n0=n0)
        return 2.0 * float(half)

    @property
    def nyquist(self) -> float:
        """Sampling Nyquist rate; spectral integrals are truncated here at
        the latest, since past it the interpolant no longer represents the
        measured response."""
        return math.pi / self._dt_min

    def h_area(self) -> float:
        return float(self._cumulative[-1])

    def support_time(self, eps: float = 1e-9) -> float:
        cum = self._cumulative
        idx = int(np.searchsorted(cum, cum[-1] - eps))
        return float(self.times[min(idx, self.times.size - 1)])

    def metrics(self) -> ResponseMetrics:
        return ResponseMetrics(
            t_h=self.rms_duration(), him_l1=self.him_l1(), h_area=self.h_area()
        )


ResponseModel = Union[TwoPoleResponse, TabulatedResponse]


def cumulative_h(t, r: ResponseModel):
    """``Hc(t) = integral_0^t h``; 0 for ``t <= 0`` and -> 1 as ``t -> inf``."""
    return r.cumulative(t)


def rms_duration(r: ResponseModel) -> float:
    """RMS duration of ``h`` under ``h^2`` weighting."""
    return r.rms_duration()


def him_l1(r: ResponseModel) -> float:
    """Full-line ``integral dw |Im H(w)|`` in rad/s."""
    return r.him_l1()


FS = 1e-15

_MIN_SAMPLES = 8


def _read_text(source) -> str:
    if isinstance(source, (str, Path)):
        path = Path(source)
        if not path.exists():
            raise DataValidationError(f"response file not found: {path}")
        return path.read_text(encoding="utf-8")
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def load_tabulated(source) -> TabulatedResponse:
    """Load a tabulated response from CSV (path, text or byte stream).

    Format: UTF-8, header ``t_fs,h``, one ``time_fs,value`` pair per row,
    ``#``-prefixed comment lines ignored.  Rows must be strictly increasing
    in time with no negative times; at least 8 samples and a nonzero value
    somewhere are required.  Values are rescaled so the trapezoid area of
    ``h`` is 1; the applied multiplier is reported as ``scale_factor``.
    Spectral positivity (``Im H >= 0`` for ``w >= 0`` up to a 1e-9 relative
    tolerance) is a hard validation error.
    """
    text = _read_text(source)
    times_fs: list[float] = []
    values: list[float] = []
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            fields = [f.strip() for f in line.split(",")]
            if fields != ["t_fs", "h"]:
                raise DataValidationError(
                    f"row {lineno}: expected header 't_fs,h', found {line!r}"
                )
            header_seen = True
            continue
        fields = line.split(",")
        if len(fields) != 2:
            raise DataValidationError(
                f"row {lineno}: expected 2 comma-separated fields, found {len(fields)}"
            )
        try:
            t_fs = float(fields[0])
            v = float(fields[1])
        except ValueError:
            raise DataValidationError(f"row {lineno}: malformed numeric value in {line!r}")
        if not (math.isfinite(t_fs) and math.isfinite(v)):
            raise DataValidationError(f"row {lineno}: non-finite value in {line!r}")
        if t_fs < 0.0:
            raise DataValidationError(
                f"row {lineno}: negative time {t_fs:g} fs violates causality"
            )
        if times_fs and t_fs <= times_fs[-1]:
            raise DataValidationError(
                f"row {lineno}: time {t_fs:g} fs is not strictly increasing"
            )
        times_fs.append(t_fs)
        values.append(v)
    if not header_seen:
        raise DataValidationError("no header line 't_fs,h' found")
    if len(times_fs) < _MIN_SAMPLES:
        raise DataValidationError(
            f"fewer than {_MIN_SAMPLES} samples ({len(times_fs)} found)"
        )
    t = np.asarray(times_fs) * FS
    v = np.asarray(values)
    if np.all(v == 0.0):
        raise DataValidationError("all-zero response values")
    area = float(np.trapezoid(v, t))
    if area <= 0.0:
        raise DataValidationError(f"response has nonpositive area {area:g}")
    scale = 1.0 / area
    resp = TabulatedResponse(t, v * scale, scale_factor=scale)
    _check_spectral_positivity(resp)
    return resp


def _check_spectral_positivity(resp: TabulatedResponse) -> None:
    omega = np.linspace(0.0, 0.5 * math.pi / resp._dt_min, 512)[1:]
    him = resp.h_im(omega)
    peak = float(np.max(np.abs(him)))
    floor = -1e-9 * max(1.0, peak)
    worst = float(np.min(him))
    if worst < floor:
        w_bad = float(omega[int(np.argmin(him))])
        raise DataValidationError(
            f"unphysical response: Im H({w_bad:.4g} rad/s) = {worst:.4g} < 0 "
            "(noise spectra must be nonnegative)"
        )
