"""Command-line front end.

Every computation is exposed as a subcommand that writes CSV artifacts and
prints a JSON summary (tool version, echoed inputs, wall time, headline
numbers) to standard output.

Units at the boundary: times in femtoseconds, frequencies in rad/s, phases
in radians; all internal computation is in SI seconds.  When ``--two-pole``
is given without ``--omega0`` the run is in normalized mode: times are
expressed in units of ``1/omega0`` via the ``*-norm`` flags and outputs are
dimensionless (``omega0_th``, ``him_l1_norm``).

Exit codes: 0 success, 2 usage error, 3 data-file validation error,
4 numerical-convergence error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .errors import (
    ConfigurationError,
    ConvergenceError,
    DataValidationError,
    XpmBoundsError,
)
from .fidelity import (
    GateGeometry,
    f1max_nonuniform,
    fmax,
    induced_phase_profile,
    phase_variance,
    pmp_cascade_bound,
)
from .phasenoise import (
    NoiseSpectrum,
    dump_ensemble_csv,
    estimate_char,
    sample_process,
)
from .pulses import DiracPulse, GaussianPulse
from .response import FS, TwoPoleResponse, load_tabulated
from .sweep import Axis, SweepSpec, gamma_sweep, heatmap_f1

_EXIT_USAGE = 2
_EXIT_DATA = 3
_EXIT_NUMERIC = 4


def _add_response_args(p: argparse.ArgumentParser) -> None:
    src = p.add_argument_group("response source (exactly one)")
    src.add_argument("--two-pole", action="store_true",
                     help="use the analytic two-pole response family")
    src.add_argument("--gamma-norm", type=float, metavar="G",
                     help="normalized damping gamma/omega0 (with --two-pole)")
    src.add_argument("--omega0", type=float, metavar="RAD_PER_S",
                     help="resonance frequency; omit for normalized mode")
    src.add_argument("--response-file", metavar="CSV",
                     help="tabulated response CSV (header t_fs,h)")


def _resolve_response(args) -> tuple[object, bool]:
    """Build the response model; returns (model, normalized_mode)."""
    if bool(args.two_pole) == bool(args.response_file):
        raise ConfigurationError(
            "exactly one response source required: --two-pole or --response-file"
        )
    if args.response_file:
        return load_tabulated(args.response_file), False
    if args.gamma_norm is None:
        raise ConfigurationError("--two-pole requires --gamma-norm")
    if args.gamma_norm < 0.0:
        raise ConfigurationError("--gamma-norm must be >= 0")
    omega0 = args.omega0 if args.omega0 is not None else 1.0
    if omega0 <= 0.0:
        raise ConfigurationError("--omega0 must be > 0")
    return TwoPoleResponse(omega0, args.gamma_norm * omega0), args.omega0 is None


def _require_absolute(normalized: bool, why: str) -> None:
    if normalized:
        raise ConfigurationError(
            f"{why} needs an absolute time scale: pass --omega0 with --two-pole "
            "or use --response-file"
        )


def _time_from_flags(args, fs_flag: str, norm_flag: str, normalized: bool,
                     omega0: float | None, required: bool = True) -> float | None:
    """One duration from either its femtosecond or normalized flag."""
    fs_val = getattr(args, fs_flag.replace("-", "_"), None)
    norm_val = getattr(args, norm_flag.replace("-", "_"), None)
    if fs_val is not None and norm_val is not None:
        raise ConfigurationError(f"--{fs_flag} and --{norm_flag} are mutually exclusive")
    if normalized:
        if fs_val is not None:
            raise ConfigurationError(
                f"--{fs_flag} is invalid in normalized mode; use --{norm_flag}"
            )
        if norm_val is None:
            if required:
                raise ConfigurationError(f"missing --{norm_flag}")
            return None
        return norm_val  # omega0 = 1 rad/s, so normalized time is seconds
    if norm_val is not None:
        if omega0 is None:
            raise ConfigurationError(
                f"--{norm_flag} needs a two-pole response with --omega0"
            )
        return norm_val / omega0
    if fs_val is None:
        if required:
            raise ConfigurationError(f"missing --{fs_flag}")
        return None
    return fs_val * FS


def _geometry_from_args(args, normalized: bool, omega0: float | None) -> GateGeometry:
    raw = [args.eta, args.length_m, args.v_a, args.v_b]
    use_raw = any(v is not None for v in raw)
    if use_raw:
        if any(v is None for v in raw):
            raise ConfigurationError(
                "raw geometry needs all of --eta --length-m --v-a --v-b"
            )
        if args.phi_rad is not None or args.walkoff_fs is not None:
            raise ConfigurationError(
                "give either raw geometry flags or (--phi-rad, --walkoff-fs), not both"
            )
        _require_absolute(normalized, "raw geometry")
        delay = _time_from_flags(args, "delay-fs", "delay-norm",
                                 normalized, omega0, required=False) or 0.0
        return GateGeometry.from_raw(args.eta, args.length_m, args.v_a, args.v_b,
                                     delay=delay, temperature=args.temperature_k)
    if args.phi_rad is None:
        raise ConfigurationError("missing --phi-rad (or raw geometry flags)")
    walkoff = _time_from_flags(args, "walkoff-fs", "walkoff-norm", normalized, omega0)
    delay = _time_from_flags(args, "delay-fs", "delay-norm",
                             normalized, omega0, required=False) or 0.0
    return GateGeometry(phi=args.phi_rad, walkoff_time=walkoff, delay=delay,
                        temperature=args.temperature_k)


def _write_csv(path: str, header: str, rows) -> None:
    # 17 significant digits round-trip doubles exactly, so emitted tables
    # carry the computation's full precision
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def _summary(subcommand: str, inputs: dict, started: float, **results) -> dict:
    out = {
        "tool": "xpmbounds",
        "version": __version__,
        "subcommand": subcommand,
        "inputs": inputs,
        "wall_time_s": round(time.perf_counter() - started, 6),
    }
    out.update(results)
    return out


def _echo_inputs(args, skip=("func",)) -> dict:
    return {k: v for k, v in vars(args).items() if k not in skip and v is not None}


def _cmd_metrics(args) -> dict:
    started = time.perf_counter()
    response, normalized = _resolve_response(args)
    m = response.metrics()
    results: dict = {"fmax": fmax(response).value, "h_area": m.h_area}
    if normalized:
        results["omega0_th"] = m.t_h  # omega0 = 1 rad/s
        results["him_l1_norm"] = m.him_l1
    else:
        results["t_h_s"] = m.t_h
        results["t_h_fs"] = m.t_h / FS
        results["him_l1_rad_per_s"] = m.him_l1
        if args.two_pole:
            results["omega0_th"] = m.t_h * args.omega0
            results["him_l1_norm"] = m.him_l1 / args.omega0
    return _summary("metrics", _echo_inputs(args), started, **results)


def _cmd_fmax_sweep(args) -> dict:
    started = time.perf_counter()
    if args.points < 2:
        raise ConfigurationError("--points must be >= 2")
    table = gamma_sweep(args.gamma_min, args.gamma_max, args.points,
                        spacing="log" if args.log else "linear")
    rows = zip(table.gamma_norm, table.omega0_th, table.him_l1_norm, table.fmax)
    _write_csv(args.output, "gamma_norm,omega0_th,him_l1_norm,fmax", rows)
    i = int(np.argmax(table.fmax))
    return _summary(
        "fmax-sweep", _echo_inputs(args), started,
        peak_fmax=float(table.fmax[i]),
        peak_gamma_norm=float(table.gamma_norm[i]),
        rows=int(table.gamma_norm.size),
        csv=args.output,
    )


def _cmd_heatmap(args) -> dict:
    started = time.perf_counter()
    response, normalized = _resolve_response(args)
    _require_absolute(normalized, "the heat map's walk-off axis (fs)")
    t_psi = args.t_psi_fs * FS if args.t_psi_fs is not None else None
    if args.pulse == "gaussian" and t_psi is None:
        raise ConfigurationError("--pulse gaussian requires --t-psi-fs")
    spec = SweepSpec(
        phi_axis=Axis("phi", args.phi_min, args.phi_max, args.phi_points, "linear"),
        walkoff_axis=Axis(
            "walkoff",
            args.walkoff_min_fs * FS,
            args.walkoff_max_fs * FS,
            args.walkoff_points,
            "log" if args.walkoff_log else "linear",
        ),
    )
    hmap = heatmap_f1(spec, response, args.pulse, t_psi=t_psi,
                      temperature=args.temperature_k, threads=args.threads,
                      refine=not args.no_refine)
    rows = (
        (phi, w / FS, hmap.values[i, j])
        for i, phi in enumerate(hmap.x_axis)
        for j, w in enumerate(hmap.y_axis)
    )
    _write_csv(args.output, "phi_rad,walkoff_fs,f1max", rows)
    return _summary(
        "heatmap", _echo_inputs(args), started,
        peak_f1max=hmap.peak.value,
        peak_phi_rad=hmap.peak.x,
        peak_walkoff_fs=hmap.peak.y / FS,
        peak_refined=hmap.peak.refined,
        cells=int(hmap.values.size),
        nan_cells=int(np.count_nonzero(np.isnan(hmap.values))),
        csv=args.output,
    )


def _cmd_phase_profile(args) -> dict:
    started = time.perf_counter()
    response, normalized = _resolve_response(args)
    _require_absolute(normalized, "the phase profile's time grid (fs)")
    omega0 = args.omega0 if args.two_pole else None
    geometry = _geometry_from_args(args, normalized, omega0)
    if args.pulse == "dirac":
        other = DiracPulse(center=geometry.delay)
    else:
        if args.t_psi_fs is None:
            raise ConfigurationError("--pulse gaussian requires --t-psi-fs")
        other = GaussianPulse(t_psi=args.t_psi_fs * FS, center=geometry.delay)
    t_grid = np.linspace(args.t_min_fs, args.t_max_fs, args.t_points) * FS
    direction = "A_sees_B" if args.direction == "a-sees-b" else "B_sees_A"
    profile = induced_phase_profile(t_grid, geometry, response, other, direction)
    rows = zip(t_grid / FS, profile.real, profile.imag,
               np.angle(profile), np.abs(profile))
    _write_csv(args.output, "t_fs,re,im,arg_rad,abs", rows)
    return _summary(
        "phase-profile", _echo_inputs(args), started,
        phi=geometry.phi,
        walkoff_fs=geometry.walkoff_time / FS,
        delay_fs=geometry.delay / FS,
        min_abs=float(np.min(np.abs(profile))),
        max_abs=float(np.max(np.abs(profile))),
        csv=args.output,
    )


def _cmd_pmp(args) -> dict:
    started = time.perf_counter()
    response, _ = _resolve_response(args)
    try:
        cells = [int(tok) for tok in args.n_cells.split(",") if tok.strip()]
    except ValueError:
        raise ConfigurationError(f"--n-cells must be comma-separated integers, got {args.n_cells!r}")
    if not cells:
        raise ConfigurationError("--n-cells is empty")
    rows = []
    bounds = []
    for n in cells:
        per_cell = args.total_phi_rad / n
        report = pmp_cascade_bound(n, response, per_cell, DiracPulse(0.0))
        rows.append((n, per_cell, report.value))
        bounds.append(report.value)
    _write_csv(args.output, "n_cells,per_cell_phi_rad,bound", rows)
    single = fmax(response).value
    return _summary(
        "pmp", _echo_inputs(args), started,
        bound=bounds[0],
        max_spread=float(max(bounds) - min(bounds)),
        fmax=single,
        csv=args.output,
    )


def _cmd_mc_validate(args) -> dict:
    started = time.perf_counter()
    response, normalized = _resolve_response(args)
    omega0 = args.omega0 if args.two_pole else None
    geometry = _geometry_from_args(args, normalized, omega0)
    spectrum = NoiseSpectrum.from_response(geometry, response)
    dt = args.dt_fs * FS if args.dt_fs is not None else math.pi / spectrum.cutoff
    ensemble = sample_process(spectrum, args.realizations, args.n_time, dt,
                              seed=args.seed, n_bins=args.bins)
    estimate, stderr = estimate_char(ensemble)
    analytic = math.exp(-0.5 * phase_variance(geometry, response))
    passed = abs(analytic - estimate) < 3.0 * stderr
    if args.dump_ensemble:
        dump_ensemble_csv(ensemble, args.dump_ensemble)
    return _summary(
        "mc-validate", _echo_inputs(args), started,
        analytic=analytic,
        estimate_re=estimate.real,
        estimate_im=estimate.imag,
        stderr=stderr,
        n_realizations=ensemble.n_realizations,
        **{"pass": bool(passed)},
    )


def _add_geometry_args(p: argparse.ArgumentParser) -> None:
    geo = p.add_argument_group("geometry (phi/walk-off, or raw eta/L/velocities)")
    geo.add_argument("--phi-rad", type=float, help="conditional phase, radians")
    geo.add_argument("--walkoff-fs", type=float, help="walk-off time L/u, fs")
    geo.add_argument("--walkoff-norm", type=float,
                     help="walk-off time in 1/omega0 units (normalized mode)")
    geo.add_argument("--delay-fs", type=float, help="pulse delay t_d, fs (default 0)")
    geo.add_argument("--delay-norm", type=float,
                     help="pulse delay in 1/omega0 units (normalized mode)")
    geo.add_argument("--eta", type=float, help="nonlinearity strength (rad s/m)")
    geo.add_argument("--length-m", type=float, help="medium length, m")
    geo.add_argument("--v-a", type=float, help="slow group velocity, m/s")
    geo.add_argument("--v-b", type=float, help="fast group velocity, m/s")
    geo.add_argument("--temperature-k", type=float, default=0.0,
                     help="reservoir temperature, K (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xpmbounds",
        description="Fidelity bounds for XPM conditional-phase gates under "
                    "group-velocity walk-off.",
    )
    parser.add_argument("--version", action="version",
                        version=f"xpmbounds {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("metrics", help="t_h, integral |Im H| and F_max for a response")
    _add_response_args(p)
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("fmax-sweep", help="F_max versus normalized damping (CSV)")
    p.add_argument("--gamma-min", type=float, required=True)
    p.add_argument("--gamma-max", type=float, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--log", action="store_true", help="log-spaced damping grid")
    p.add_argument("--output", default="fmax_sweep.csv", help="output CSV path")
    p.set_defaults(func=_cmd_fmax_sweep)

    p = sub.add_parser("heatmap", help="F1 bound over a (phi, walk-off) grid (CSV)")
    _add_response_args(p)
    p.add_argument("--pulse", choices=["dirac", "gaussian"], default="dirac")
    p.add_argument("--t-psi-fs", type=float, help="gaussian pulse duration, fs")
    p.add_argument("--phi-min", type=float, default=0.0)
    p.add_argument("--phi-max", type=float, default=2.0 * math.pi)
    p.add_argument("--phi-points", type=int, default=256)
    p.add_argument("--walkoff-min-fs", type=float, default=1.0)
    p.add_argument("--walkoff-max-fs", type=float, default=200.0)
    p.add_argument("--walkoff-points", type=int, default=256)
    p.add_argument("--walkoff-log", action=argparse.BooleanOptionalAction, default=True,
                   help="log-spaced walk-off axis (default)")
    p.add_argument("--temperature-k", type=float, default=0.0)
    p.add_argument("--threads", type=int, default=1, help="worker cap for cells")
    p.add_argument("--no-refine", action="store_true",
                   help="skip local peak refinement")
    p.add_argument("--output", default="heatmap.csv", help="output CSV path")
    p.set_defaults(func=_cmd_heatmap)

    p = sub.add_parser("phase-profile", help="induced phase profile on a time grid (CSV)")
    _add_response_args(p)
    _add_geometry_args(p)
    p.add_argument("--pulse", choices=["dirac", "gaussian"], default="dirac",
                   help="shape of the other field's pulse (centered at the delay)")
    p.add_argument("--t-psi-fs", type=float, help="gaussian pulse duration, fs")
    p.add_argument("--direction", choices=["a-sees-b", "b-sees-a"], default="a-sees-b")
    p.add_argument("--t-min-fs", type=float, required=True)
    p.add_argument("--t-max-fs", type=float, required=True)
    p.add_argument("--t-points", type=int, default=501)
    p.add_argument("--output", default="phase_profile.csv", help="output CSV path")
    p.set_defaults(func=_cmd_phase_profile)

    p = sub.add_parser("pmp", help="cascade bound versus unit-cell count (CSV)")
    _add_response_args(p)
    p.add_argument("--n-cells", default="1,2,10,100",
                   help="comma-separated cell counts (default 1,2,10,100)")
    p.add_argument("--total-phi-rad", type=float, default=math.pi,
                   help="total phase split evenly over the cells (default pi)")
    p.add_argument("--output", default="pmp.csv", help="output CSV path")
    p.set_defaults(func=_cmd_pmp)

    p = sub.add_parser("mc-validate",
                       help="Monte Carlo check of the analytic phase-noise factor")
    _add_response_args(p)
    _add_geometry_args(p)
    p.add_argument("--realizations", type=int, default=100_000)
    p.add_argument("--n-time", type=int, default=8, help="grid points (power of two)")
    p.add_argument("--dt-fs", type=float,
                   help="grid step, fs (default: pi/cutoff, the aliasing limit)")
    p.add_argument("--bins", type=int, default=2048, help="spectral bins")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--dump-ensemble", metavar="CSV",
                   help="write realization,t_fs,xi_rad rows")
    p.set_defaults(func=_cmd_mc_validate)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        summary = args.func(args)
    except DataValidationError as exc:
        print(f"xpmbounds: data validation error: {exc}", file=sys.stderr)
        return _EXIT_DATA
    except ConvergenceError as exc:
        print(f"xpmbounds: numerical convergence error: {exc}", file=sys.stderr)
        return _EXIT_NUMERIC
    except ConfigurationError as exc:
        print(f"xpmbounds: {exc}", file=sys.stderr)
        return _EXIT_USAGE
    except XpmBoundsError as exc:
        print(f"xpmbounds: {exc}", file=sys.stderr)
        return _EXIT_USAGE
    print(json.dumps(summary, indent=2))
    return 0


def main() -> None:
    sys.exit(run())
