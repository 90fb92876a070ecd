import math

import numpy as np
import pytest

from xpmbounds import (
    Axis,
    ConfigurationError,
    SweepSpec,
    TwoPoleResponse,
    find_peak,
    gamma_sweep,
    heatmap_f1,
    refine_peak,
)

FMAX_CRITICAL = (2.0 + math.exp(-math.sqrt(3.0) / 2.0)) / 3.0


@pytest.fixture(scope="module")
def small_spec():
    return SweepSpec(
        phi_axis=Axis("phi", 0.0, 2.0 * math.pi, 24),
        walkoff_axis=Axis("walkoff", 1e-15, 200e-15, 24, "log"),
    )


@pytest.fixture(scope="module")
def fs_response():
    return TwoPoleResponse(1e15, 2e15)


class TestAxis:
    def test_validation(self):
        with pytest.raises(ConfigurationError):
            Axis("a", 0.0, 1.0, 1)
        with pytest.raises(ConfigurationError):
            Axis("a", 2.0, 1.0, 8)
        with pytest.raises(ConfigurationError):
            Axis("a", 0.0, 1.0, 8, "log")
        with pytest.raises(ConfigurationError):
            Axis("a", 0.0, 1.0, 8, "cubic")

    def test_grids(self):
        lin = Axis("a", 0.0, 1.0, 5).grid()
        np.testing.assert_allclose(lin, [0.0, 0.25, 0.5, 0.75, 1.0])
        log = Axis("a", 1.0, 100.0, 3, "log").grid()
        np.testing.assert_allclose(log, [1.0, 10.0, 100.0])


class TestGammaSweep:
    def test_row_at_critical_damping(self):
        table = gamma_sweep(1.0, 2.0, 11, spacing="linear")
        assert table.gamma_norm[-1] == pytest.approx(2.0)
        assert table.omega0_th[-1] == pytest.approx(math.sqrt(3.0) / 2.0, abs=1e-12)
        assert table.him_l1_norm[-1] == pytest.approx(2.0, abs=1e-8)
        assert table.fmax[-1] == pytest.approx(FMAX_CRITICAL, rel=1e-12)

    def test_rows_ordered(self):
        table = gamma_sweep(0.1, 5.0, 40)
        assert np.all(np.diff(table.gamma_norm) > 0.0)

    def test_peak_within_reported_range(self):
        table = gamma_sweep(0.05, 20.0, 2000, spacing="log")
        peak = float(np.max(table.fmax))
        assert 0.79 < peak < 0.82

    def test_tends_to_two_thirds_at_extremes(self):
        table = gamma_sweep(0.05, 20.0, 2000, spacing="log")
        i = int(np.argmax(table.fmax))
        assert 0 < i < table.fmax.size - 1
        # monotone approach to the 2/3 floor on both flanks
        assert np.all(np.diff(table.fmax[: i + 1]) > 0.0)
        assert np.all(np.diff(table.fmax[i:]) < 0.0)
        assert table.fmax[0] - 2.0 / 3.0 < 1e-9
        assert table.fmax[-1] < 0.70

    def test_requires_positive_gamma(self):
        with pytest.raises(ConfigurationError):
            gamma_sweep(0.0, 1.0, 10)

    def test_deterministic(self):
        a = gamma_sweep(0.1, 10.0, 64)
        b = gamma_sweep(0.1, 10.0, 64)
        assert np.array_equal(a.fmax, b.fmax)


class TestHeatmap:
    def test_dimensions_and_axes(self, small_spec, fs_response):
        hm = heatmap_f1(small_spec, fs_response, "dirac", refine=False)
        assert hm.values.shape == (24, 24)
        assert hm.x_axis.size == 24 and hm.y_axis.size == 24

    def test_zero_phi_column_is_one_third(self, small_spec, fs_response):
        hm = heatmap_f1(small_spec, fs_response, "dirac", refine=False)
        np.testing.assert_allclose(hm.values[0, :], 1.0 / 3.0, atol=1e-12)

    def test_coarse_peak_equals_matrix_max(self, small_spec, fs_response):
        hm = heatmap_f1(small_spec, fs_response, "dirac", refine=False)
        assert hm.peak.value == np.nanmax(hm.values)
        assert not hm.peak.refined

    def test_refined_peak_not_below_coarse(self, small_spec, fs_response):
        coarse = heatmap_f1(small_spec, fs_response, "dirac", refine=False)
        refined = heatmap_f1(small_spec, fs_response, "dirac", refine=True)
        assert refined.peak.refined
        assert refined.peak.value >= coarse.peak.value

    def test_deterministic_and_thread_invariant(self, small_spec, fs_response):
        a = heatmap_f1(small_spec, fs_response, "dirac", refine=False)
        b = heatmap_f1(small_spec, fs_response, "dirac", refine=False, threads=3)
        assert np.array_equal(a.values, b.values)

    def test_gaussian_requires_width(self, small_spec, fs_response):
        with pytest.raises(ConfigurationError):
            heatmap_f1(small_spec, fs_response, "gaussian")

    def test_unknown_pulse_kind(self, small_spec, fs_response):
        with pytest.raises(ConfigurationError):
            heatmap_f1(small_spec, fs_response, "square")

    def test_failed_cells_annotated_and_skipped(self, monkeypatch, small_spec,
                                                fs_response):
        import xpmbounds.sweep as sweep_mod
        from xpmbounds import ConvergenceError

        real = sweep_mod._cell_value

        def flaky(response, phi, walkoff, pulse, temperature):
            if phi > 5.0:
                raise ConvergenceError("cell quadrature stalled")
            return real(response, phi, walkoff, pulse, temperature)

        monkeypatch.setattr(sweep_mod, "_cell_value", flaky)
        with pytest.warns(UserWarning, match="failed"):
            hm = heatmap_f1(small_spec, fs_response, "dirac", refine=False)
        bad = hm.x_axis > 5.0
        assert np.all(np.isnan(hm.values[bad, :]))
        assert np.all(np.isfinite(hm.values[~bad, :]))
        assert hm.peak.value == np.nanmax(hm.values)

    def test_all_cells_failing_raises(self):
        # undamped response at finite temperature has no usable spectrum scale
        undamped = TwoPoleResponse(1e15, 0.0)
        spec = SweepSpec(
            phi_axis=Axis("phi", 0.5, 2.0 * math.pi, 8),
            walkoff_axis=Axis("walkoff", 1e-15, 200e-15, 8, "log"),
        )
        with pytest.warns(UserWarning, match="failed"):
            with pytest.raises(ConfigurationError):
                heatmap_f1(spec, undamped, "dirac", refine=False,
                           temperature=300.0)


class TestFindPeak:
    def test_constant_matrix_tie_break(self):
        (ix, iy), v = find_peak(np.ones((4, 5)))
        assert (ix, iy, v) == (0, 0, 1.0)

    def test_single_spike(self):
        m = np.zeros((6, 6))
        m[3, 4] = 2.0
        (ix, iy), v = find_peak(m)
        assert (ix, iy, v) == (3, 4, 2.0)

    def test_tie_break_lowest_x_then_y(self):
        m = np.zeros((3, 3))
        m[1, 2] = 1.0
        m[2, 0] = 1.0
        assert find_peak(m)[0] == (1, 2)
        m[1, 0] = 1.0
        assert find_peak(m)[0] == (1, 0)

    def test_nan_skipped(self):
        m = np.array([[np.nan, 1.0], [3.0, np.nan]])
        assert find_peak(m) == ((1, 0), 3.0)

    def test_all_nan_raises(self):
        with pytest.raises(ConfigurationError):
            find_peak(np.full((3, 3), np.nan))
        with pytest.raises(ConfigurationError):
            find_peak(np.array([]))

    def test_one_dimensional_table(self):
        col = np.array([0.1, 0.9, 0.4])
        assert find_peak(col) == ((1,), 0.9)
        assert find_peak(col, x_axis=np.array([5.0, 6.0, 7.0])) == ((6.0,), 0.9)

    def test_axes_mapping(self):
        m = np.zeros((2, 3))
        m[1, 2] = 1.0
        coords, v = find_peak(m, x_axis=[10.0, 20.0], y_axis=[1.0, 2.0, 3.0])
        assert coords == (20.0, 3.0)


class TestRefinePeak:
    def test_quadratic_bump(self):
        a, b = 1.234, 5.678
        f = lambda x, y: 1.0 - (x - a) ** 2 - 0.5 * (y - b) ** 2
        # coarse grid argmax lands on (1.0, 5.5); refine from there
        x, y, v = refine_peak(f, 1.0, 5.5, 0.5, 0.5)
        assert abs(x - a) < 0.01 * a
        assert abs(y - b) < 0.01 * b
        assert abs(v - 1.0) < 0.01

    def test_log_axes(self):
        f = lambda x, y: -((math.log(x) - math.log(20.0)) ** 2) - (y - 1.0) ** 2
        x, y, v = refine_peak(f, 10.0, 1.2, 2.0, 0.4, log_x=True)
        assert abs(x - 20.0) / 20.0 < 0.01

    def test_never_below_start_value(self):
        f = lambda x, y: -(x * x) - y * y
        x, y, v = refine_peak(f, 0.3, 0.3, 0.1, 0.1)
        assert v >= f(0.3, 0.3)


def test_grid_halving_peak_stability(fs_response):
    def run(n):
        spec = SweepSpec(
            phi_axis=Axis("phi", 0.0, 2.0 * math.pi, n),
            walkoff_axis=Axis("walkoff", 1e-15, 200e-15, n, "log"),
        )
        return heatmap_f1(spec, fs_response, "dirac").peak.value

    assert abs(run(32) - run(64)) < 1e-3
