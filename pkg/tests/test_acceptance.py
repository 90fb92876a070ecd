"""Acceptance gate: every criterion at its stated tolerance.

Each test prints one ``ACCEPTANCE <name>: PASS|FAIL|SKIPPED`` line; the
measured-response criteria are SKIPPED when no data file is supplied (see
``conftest.raman_data_path``).
"""

import json
import math
import sys
import time

import numpy as np
import pytest
from scipy import integrate

import oracles
from conftest import raman_data_path
from xpmbounds import (
    Axis,
    DiracPulse,
    GateGeometry,
    GaussianPulse,
    SweepSpec,
    TwoPoleResponse,
    f0_uniform_bound,
    f1max_nonuniform,
    fmax,
    heatmap_f1,
    induced_phase_profile,
    load_tabulated,
    pmp_cascade_bound,
    shifted,
    uniform_conditions,
)
from xpmbounds.cli import run
from xpmbounds.quadrature import integrate_doubling


def report(name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {name}: {status} {detail}".rstrip())
    assert ok, f"{name}: {detail}"


def test_fig1_reproduction(tmp_path, capsys):
    started = time.perf_counter()
    out = tmp_path / "fmax_sweep.csv"
    code = run([
        "fmax-sweep", "--gamma-min", "0.05", "--gamma-max", "20",
        "--points", "2000", "--log", "--output", str(out),
    ])
    elapsed = time.perf_counter() - started
    capsys.readouterr()
    rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
    f = np.array([float(r[3]) for r in rows])
    peak = float(np.max(f))
    i = int(np.argmax(f))
    ok = (
        code == 0
        and len(rows) == 2000
        and 0.79 < peak < 0.82
        and 0 < i < f.size - 1
        and np.all(np.diff(f[: i + 1]) > 0.0)       # rises from the 2/3 floor
        and np.all(np.diff(f[i:]) < 0.0)            # falls back toward it
        and f[0] < 2.0 / 3.0 + 1e-6
        and f[-1] < 0.70
        and elapsed < 10.0
    )
    with capsys.disabled():
        report("fig1-fmax-sweep", ok,
               f"(peak={peak:.4f}, ends=({f[0]:.4f},{f[-1]:.4f}), {elapsed:.1f}s)")


def test_closed_form_cross_checks(capsys):
    started = time.perf_counter()
    th_sqrt2 = TwoPoleResponse(1.0, math.sqrt(2.0)).rms_duration()
    th_crit = TwoPoleResponse(1.0, 2.0).rms_duration()
    ok = abs(th_sqrt2 - 1.0 / math.sqrt(2.0)) < 1e-12
    ok &= abs(th_crit - math.sqrt(3.0) / 2.0) < 1e-12

    # full-line |Im H| at critical damping against the analytic antiderivative
    # of 2 w0^3 w / (w0^2 + w^2)^2, which integrates to w0 per half line
    him_crit = TwoPoleResponse(1.0, 2.0).him_l1()
    ok &= abs(him_crit - 2.0) < 1e-8

    # complex-branch closed form against adaptive quadrature
    worst = 0.0
    for gamma in (0.5, 1.0, math.sqrt(2.0), 3.0, 10.0):
        r = TwoPoleResponse(1.0, gamma)
        cutoff = (2.0 * gamma / 1e-10) ** (1.0 / 3.0)
        half = integrate_doubling(lambda w: np.abs(r.h_im(w)), 0.0, cutoff,
                                  rel_tol=1e-9, n0=4096)
        rel = abs(r.him_l1() - 2.0 * half) / (2.0 * half)
        worst = max(worst, rel)
    ok &= worst < 1e-6
    elapsed = time.perf_counter() - started
    ok &= elapsed < 5.0
    with capsys.disabled():
        report("closed-form-cross-checks", ok,
               f"(worst quadrature rel={worst:.2e}, {elapsed:.1f}s)")


def test_duration_minimum(capsys):
    gammas = np.linspace(1.2, 1.7, 5001)
    th = np.array([TwoPoleResponse(1.0, g).rms_duration() for g in gammas])
    g_min = float(gammas[int(np.argmin(th))])
    step = float(gammas[1] - gammas[0])
    ok = abs(g_min - math.sqrt(2.0)) <= step
    with capsys.disabled():
        report("duration-minimum", ok, f"(argmin={g_min:.6f}, grid step={step:.1e})")


def test_uniform_phase_consistency(capsys):
    rng = np.random.default_rng(2024)
    worst_mod = 0.0
    worst_diff = 0.0
    for _ in range(20):
        gamma = float(np.exp(rng.uniform(math.log(0.3), math.log(6.0))))
        r = TwoPoleResponse(1.0, gamma)
        t_psi = float(rng.uniform(0.05, 3.0))
        pulse = GaussianPulse(t_psi=t_psi)
        psi_supp = 8.0 * pulse.intensity_std
        h_supp = r.support_time(1e-9)
        t_d, t_w = uniform_conditions(psi_supp, h_supp)
        g = GateGeometry(phi=math.pi, walkoff_time=t_w, delay=t_d)
        t = np.linspace(-psi_supp / 2.0, psi_supp / 2.0, 17)
        prof = induced_phase_profile(t, g, r, shifted(pulse, t_d))
        worst_mod = max(worst_mod, float(np.max(np.abs(np.abs(prof) - 1.0))))
        f1 = f1max_nonuniform(g, r, pulse).value
        f0 = f0_uniform_bound(math.pi, psi_supp, h_supp, r.him_l1()).value
        worst_diff = max(worst_diff, abs(f1 - f0))
    ok = worst_mod < 1e-6 and worst_diff < 1e-8
    with capsys.disabled():
        report("uniform-phase-consistency", ok,
               f"(|modulus-1| worst={worst_mod:.2e}, |F1-F0| worst={worst_diff:.2e})")


def test_pmp_invariance(capsys):
    r = TwoPoleResponse(1.0, 2.0)
    values = [pmp_cascade_bound(n, r, math.pi / n, DiracPulse()).value
              for n in (1, 2, 10, 100)]
    spread = max(values) - min(values)
    gap = abs(values[0] - fmax(r).value)
    ok = spread < 1e-12 and gap < 1e-12
    with capsys.disabled():
        report("pmp-invariance", ok, f"(spread={spread:.2e}, |bound-Fmax|={gap:.2e})")


def test_mc_oracle(capsys):
    argv = [
        "mc-validate", "--two-pole", "--gamma-norm", "2",
        "--phi-rad", str(math.pi), "--walkoff-norm", str(math.sqrt(3.0)),
        "--realizations", "100000", "--seed", "42",
    ]

    def one_run():
        started = time.perf_counter()
        code = run(argv)
        elapsed = time.perf_counter() - started
        out = capsys.readouterr().out
        assert code == 0
        return json.loads(out), elapsed

    first, t1 = one_run()
    second, t2 = one_run()
    identical = all(first[k] == second[k]
                    for k in ("analytic", "estimate_re", "estimate_im", "stderr"))
    ok = (
        first["pass"] is True
        and identical
        and first["n_realizations"] == 100000
        and t1 < 60.0 and t2 < 60.0
    )
    with capsys.disabled():
        report(
            "mc-oracle", ok,
            f"(|analytic-est|={abs(first['analytic'] - first['estimate_re']):.4f}, "
            f"3*stderr={3 * first['stderr']:.4f}, rerun identical={identical}, "
            f"{t1:.0f}s/{t2:.0f}s)",
        )


def test_heatmap_machinery(capsys):
    started = time.perf_counter()
    r = TwoPoleResponse(1e15, 2e15)
    spec32 = SweepSpec(
        phi_axis=Axis("phi", 0.0, 2.0 * math.pi, 32),
        walkoff_axis=Axis("walkoff", 1e-15, 200e-15, 32, "log"),
    )
    hm = heatmap_f1(spec32, r, "dirac")

    # independent oracle: scipy quadrature for both bound ingredients,
    # evaluated in omega0-normalized units (both are scale-free there)
    w0 = 1e15
    him_norm, _ = integrate.quad(lambda w: oracles.h_im_direct(w, 1.0, 2.0),
                                 0.0, np.inf, epsabs=1e-13, epsrel=1e-13,
                                 limit=800)
    him = 2.0 * him_norm * w0
    hc = {}
    for w_off in hm.y_axis:
        val, _ = integrate.quad(
            lambda t: oracles.h_direct(np.array([t]), 1.0, 2.0)[0],
            0.0, w_off / 2.0 * w0, epsabs=1e-14, epsrel=1e-13, limit=800)
        hc[w_off] = val
    worst = 0.0
    for i, phi in enumerate(hm.x_axis):
        for j, w_off in enumerate(hm.y_axis):
            x = phi * w_off * him / (4.0 * math.pi)
            expected = (2.0 - math.exp(-x) * math.cos(phi * hc[w_off])) / 3.0
            worst = max(worst, abs(hm.values[i, j] - expected))
    ok = worst < 1e-8

    spec64 = SweepSpec(
        phi_axis=Axis("phi", 0.0, 2.0 * math.pi, 64),
        walkoff_axis=Axis("walkoff", 1e-15, 200e-15, 64, "log"),
    )
    hm64 = heatmap_f1(spec64, r, "dirac")
    drift = abs(hm64.peak.value - hm.peak.value)
    ok &= drift < 1e-3
    elapsed = time.perf_counter() - started
    ok &= elapsed < 120.0
    with capsys.disabled():
        report("heatmap-machinery", ok,
               f"(worst cell err={worst:.2e}, halving drift={drift:.2e}, "
               f"{elapsed:.1f}s)")


def test_measured_response_values(capsys):
    path = raman_data_path()
    if not path.exists():
        with capsys.disabled():
            print("ACCEPTANCE measured-response: SKIPPED "
                  f"(no data file at {path}; supply the measured response "
                  "or set XPMBOUNDS_RAMAN_CSV)")
        pytest.skip("measured Raman response file not available")
    resp = load_tabulated(path)
    t_h = resp.rms_duration()
    him = resp.him_l1()
    f = fmax(resp).value
    ok = abs(t_h - 49.2e-15) <= 0.5e-15
    ok &= abs(him - 1.79e14) <= 0.02 * 1.79e14
    ok &= abs(f - 0.671) <= 0.005
    with capsys.disabled():
        report("measured-response", ok,
               f"(t_h={t_h / 1e-15:.2f} fs, him={him:.3e} rad/s, Fmax={f:.4f})")


def test_measured_response_heatmaps(capsys):
    path = raman_data_path()
    if not path.exists():
        with capsys.disabled():
            print("ACCEPTANCE measured-heatmaps: SKIPPED "
                  f"(no data file at {path})")
        pytest.skip("measured Raman response file not available")
    resp = load_tabulated(path)
    spec = SweepSpec(
        phi_axis=Axis("phi", 0.0, 2.0 * math.pi, 128),
        walkoff_axis=Axis("walkoff", 1e-15, 200e-15, 128, "log"),
    )
    dirac = heatmap_f1(spec, resp, "dirac")
    ok = abs(dirac.peak.value - 0.786) <= 0.01
    ok &= abs(dirac.peak.x - 4.25) <= 0.5
    ok &= 10e-15 <= dirac.peak.y <= 26e-15
    spec_g = SweepSpec(
        phi_axis=Axis("phi", 0.0, 2.0 * math.pi, 64),
        walkoff_axis=Axis("walkoff", 1e-15, 200e-15, 64, "log"),
    )
    gauss = heatmap_f1(spec_g, resp, "gaussian", t_psi=3e-12, refine=False)
    gauss_max = float(np.nanmax(gauss.values))
    ok &= gauss_max <= 2.0 / 3.0 + 1e-3
    with capsys.disabled():
        report("measured-heatmaps", ok,
               f"(dirac peak={dirac.peak.value:.4f} at phi={dirac.peak.x:.2f}, "
               f"Tw={dirac.peak.y / 1e-15:.1f} fs; 3ps max={gauss_max:.4f})")


def test_primary_suite_independent_of_figures(capsys):
    # the rendering component is a separate package; nothing here may load it
    loaded = [m for m in sys.modules if m.startswith("figures")]
    ok = loaded == []
    with capsys.disabled():
        report("primary-standalone", ok, "(no figures modules imported)")
