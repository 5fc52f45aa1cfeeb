import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import trapezoid

from weakmeas import gaussian_oracle as go
from weakmeas import setups, weak_core as wc
from weakmeas.errors import ConfigurationError, DegenerateSetupError, DomainError, SeriesConvergenceError


def _moment(wave, power):
    return trapezoid(wave.abscissa**power * wave.density(), dx=wave.step)


class TestGridSpec:
    @pytest.mark.parametrize("points", [128, 1000, 3])
    def test_points_must_be_large_power_of_two(self, points):
        with pytest.raises(ConfigurationError):
            go.GridSpec(10.0, points)

    def test_abscissa_convention(self):
        spec = go.GridSpec(4.0, 256)
        u = spec.u_axis()
        assert u[0] == -4.0
        np.testing.assert_allclose(np.diff(u), 8.0 / 256)
        assert spec.dv == pytest.approx(2 * math.pi / (256 * spec.du))

    def test_coverage_violation(self):
        with pytest.raises(ConfigurationError):
            go.initial_wave(1.0, go.GridSpec(3.0, 2**12))

    @pytest.mark.parametrize("s", [1e-6, 1e-3, 0.01, 1.0, 100.0, 1e4])
    def test_default_grid_covers(self, s):
        go.default_grid(s).check_coverage(s)


class TestInitialWave:
    @pytest.mark.parametrize("s", [0.01, 1.0, 10.0])
    def test_moments(self, s):
        wave = go.initial_wave(s, go.default_grid(s))
        assert wave.norm() == pytest.approx(1.0, abs=1e-10)
        assert _moment(wave, 2) == pytest.approx(s / 2, rel=1e-9)
        assert _moment(wave, 4) == pytest.approx(3 * (s / 2) ** 2, rel=1e-8)
        assert _moment(wave, 6) == pytest.approx(go.gaussian_moment_p(6, s), rel=1e-8)


class TestTransforms:
    @pytest.mark.parametrize("s", [0.01, 1.0, 10.0])
    def test_gaussian_to_gaussian(self, s):
        pos = go.to_position_space(go.initial_wave(s, go.default_grid(s)))
        assert pos.norm() == pytest.approx(1.0, abs=1e-10)
        assert _moment(pos, 2) == pytest.approx(1 / (2 * s), rel=1e-8)
        np.testing.assert_allclose(pos.density(), wc.initial_density_v(s, pos.abscissa), atol=1e-12 * math.sqrt(s))

    def test_round_trip(self):
        rng = np.random.default_rng(3)
        spec = go.GridSpec(36.0, 2**12)
        amps = rng.normal(size=spec.points) + 1j * rng.normal(size=spec.points)
        wave = go.WaveGrid(spec, amps)
        back = go.to_momentum_space(go.to_position_space(wave))
        np.testing.assert_allclose(back.amplitudes, amps, atol=1e-10)
        pos = go.to_position_space(wave)
        # discrete Parseval holds for the plain Riemann sum
        assert np.sum(pos.density()) * pos.step == pytest.approx(np.sum(wave.density()) * wave.step, rel=1e-10)

    def test_sine_gives_opposite_displaced_gaussians(self):
        s = 4.0
        wave = go.initial_wave(s, go.default_grid(s))
        kicked = go.WaveGrid(wave.spec, np.sin(wave.abscissa) * wave.amplitudes)
        pos = go.to_position_space(kicked)
        v, amp = pos.abscissa, pos.amplitudes
        i_plus, i_minus = np.argmax(np.abs(amp) * (v > 0)), np.argmax(np.abs(amp) * (v < 0))
        assert v[i_plus] == pytest.approx(1.0, abs=pos.step)
        assert v[i_minus] == pytest.approx(-1.0, abs=pos.step)
        assert amp[i_plus] == pytest.approx(-amp[i_minus], abs=1e-12)

    def test_wrong_space(self):
        wave = go.initial_wave(1.0, go.default_grid(1.0))
        with pytest.raises(ConfigurationError):
            go.to_momentum_space(wave)


class TestPostSelection:
    def test_orthogonal_branch_is_sine_squared(self):
        s = 1.0
        wave = go.initial_wave(s, go.default_grid(s))
        post, prob = go.postselect_amplitudes(0.0, 1.0, wave)
        u = wave.abscissa
        expected = np.sin(u) ** 2 * wc.initial_density_u(s, u) / prob
        np.testing.assert_allclose(post.density(), expected, atol=1e-13)

    @pytest.mark.parametrize("s", [0.1, 1.0, 7.0])
    def test_aav_quarter_turn_probability(self, s):
        setup = setups.aav_setup(math.pi / 2)
        wave = go.initial_wave(s, go.default_grid(s))
        _, prob = go.postselect_wave(setup, s, wave)
        overlap = math.cos(math.pi / 4)
        assert prob == pytest.approx(overlap**2 * 1.0, abs=1e-10)

    @pytest.mark.parametrize("sign", [1.0, -1.0])
    def test_eigenstate_is_transparent(self, sign):
        up = np.array([1.0, 0.0]) if sign > 0 else np.array([0.0, 1.0])
        setup = setups.TwoLevelSetup(up, up, np.diag([1.0, -1.0]))
        wave = go.initial_wave(1.0, go.default_grid(1.0))
        post, prob = go.postselect_wave(setup, 1.0, wave)
        assert prob == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(post.density(), wave.density(), atol=1e-14)

    def test_degenerate(self):
        wave = go.initial_wave(1.0, go.default_grid(1.0))
        with pytest.raises(DegenerateSetupError):
            go.postselect_amplitudes(0.0, 0.0, wave)


class TestOracleReport:
    def test_aav_reference_point(self):
        rep = go.oracle_report(setups.aav_setup(3 * math.pi / 4), 1.0)
        assert rep.mean_v == pytest.approx(0.9557176620136971, rel=1e-8)
        assert max(rep.residuals_vs_closed_form.values()) <= 1e-8

    def test_report_invariants(self):
        rep = go.oracle_report(setups.dsjh_setup(1.0), 0.5)
        assert 0.0 <= rep.post_selection_probability <= 1.0
        assert rep.density_u.min() >= 0 and rep.density_v.min() >= 0
        assert trapezoid(rep.density_u, rep.u) == pytest.approx(1.0, abs=1e-9)
        assert trapezoid(rep.density_v, rep.v) == pytest.approx(1.0, abs=1e-9)
        assert set(rep.residuals_vs_closed_form) == {"z", "mean_q", "mean_p", "var_q", "var_p", "density_u", "density_v"}

    @pytest.mark.parametrize("s", [0.1, 1.0, 5.0])
    def test_orthogonal_means_vanish(self, s):
        rep = go.oracle_report(setups.aav_setup(math.pi), s)
        assert rep.orthogonal
        assert abs(rep.mean_u) <= 1e-10 and abs(rep.mean_v) <= 1e-10
        assert "z_o_series" in rep.residuals_vs_closed_form

    def test_grid_refinement_stability(self):
        s, setup = 1.0, setups.aav_setup(2.0)
        coarse = go.oracle_report(setup, s, go.GridSpec(36.0, 2**14))
        fine = go.oracle_report(setup, s, go.GridSpec(36.0, 2**15))
        for name in ("z", "mean_u", "mean_v", "var_u", "var_v"):
            assert getattr(coarse, name) == pytest.approx(getattr(fine, name), abs=1e-9)


class TestMoments:
    @pytest.mark.parametrize("n, s, expected", [(3, 1.0, 0.0), (4, 2.0, 3.0), (6, 1.0, 1.875), (0, 3.0, 1.0)])
    def test_gaussian_moment(self, n, s, expected):
        assert go.gaussian_moment_p(n, s) == pytest.approx(expected)

    @pytest.mark.parametrize("n", [1, 2, 5])
    def test_vanishing_mixed_moments(self, n):
        assert go.mixed_gaussian_moment("qp_sym", n, 1.0) == 0.0
        assert go.mixed_gaussian_moment("q2p_odd_sym", n, 1.0) == 0.0

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_q2p2n_against_grid_quadrature(self, n):
        # <v^2 u^2n + u^2n v^2> = 2 Re <v phi | v u^2n phi>, evaluated in v-space
        s = 1.0
        wave = go.initial_wave(s, go.default_grid(s))
        weighted = go.WaveGrid(wave.spec, wave.abscissa ** (2 * n) * wave.amplitudes)
        a, b = go.to_position_space(wave), go.to_position_space(weighted)
        v = a.abscissa
        value = 2 * trapezoid(np.conj(v * a.amplitudes) * (v * b.amplitudes), dx=a.step).real
        assert go.mixed_gaussian_moment("q2p2n_sym", n, s) == pytest.approx(value, rel=1e-8)

    def test_bad_kind(self):
        with pytest.raises(DomainError):
            go.mixed_gaussian_moment("other", 1, 1.0)
        with pytest.raises(DomainError):
            go.mixed_gaussian_moment("qp_sym", 0, 1.0)


class TestSeries:
    def test_unit_modulus_sums_to_one(self):
        assert go.series_z(wc.MeasurementPoint.of(2.0, 1j)) == 1.0

    def test_example_point(self):
        pt = wc.MeasurementPoint.of(0.5, 0.5)
        assert go.series_z(pt, 60) == pytest.approx(wc.normalization(pt), abs=1e-10)

    def test_first_term_is_slope_at_origin(self):
        pt = wc.MeasurementPoint.of(1e-6, 0.3)
        h = 1e-6
        slope = (wc.normalization(pt) - 1.0) / h
        first = (go.series_z(pt, 1, check=False) - 1.0) / h
        assert first == pytest.approx(slope, rel=1e-5)

    def test_real_weak_value_gives_zero_momentum(self):
        assert go.series_moments(wc.MeasurementPoint.of(1.0, 2.0)).mean_p == 0.0

    def test_moments_example(self):
        pt = wc.MeasurementPoint.of(1.0, 0.3 + 0.4j)
        ser, ref = go.series_moments(pt, 60), wc.moments_nonorthogonal(pt)
        for name in ("z", "mean_q", "mean_p", "var_q", "var_p"):
            assert getattr(ser, name) == pytest.approx(getattr(ref, name), rel=1e-9, abs=1e-11)

    def test_single_term_reproduces_linear_shifts(self):
        pt = wc.MeasurementPoint.of(1e-6, 0.8 - 2.0j)
        ser = go.series_moments(pt, 1, check=False)
        dq, dp = wc.wu_li_shifts(pt)
        assert ser.mean_q == pytest.approx(dq, rel=1e-14)
        assert ser.mean_p == pytest.approx(dp, rel=1e-14)

    def test_truncation_guard(self):
        with pytest.raises(SeriesConvergenceError):
            go.series_z(wc.MeasurementPoint.of(5.0, 0.3), 5)

    def test_cancellation_guard(self):
        with pytest.raises(SeriesConvergenceError):
            go.series_z(wc.MeasurementPoint.of(40.0, 0.3), 80)

    def test_n_terms_bounds(self):
        with pytest.raises(DomainError):
            go.series_z(wc.MeasurementPoint.of(1.0, 0.3), 0)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.01, 5.0), st.floats(-4.0, 4.0), st.floats(-4.0, 4.0))
    def test_series_matches_closed_forms(self, s, re, im):
        pt = wc.MeasurementPoint.of(s, complex(re, im))
        ser, ref = go.series_moments(pt, 60), wc.moments_nonorthogonal(pt)
        scale = max(1.0, abs(complex(re, im)) ** 2)
        for name in ("z", "mean_q", "mean_p", "var_q", "var_p"):
            assert getattr(ser, name) == pytest.approx(getattr(ref, name), rel=1e-10, abs=1e-10 * scale)

    def test_orthogonal_series(self):
        assert go.series_z_orthogonal(1.0, 40) == pytest.approx(0.63212, abs=5e-6)
        assert go.series_z_orthogonal(1e-9) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("s", [0.01, 0.5, 2.0, 5.0])
    def test_orthogonal_series_matches_grid_probability(self, s):
        rep = go.orthogonal_oracle(s)
        assert go.series_z_orthogonal(s) == pytest.approx(rep.z, rel=1e-8)


class TestHermite:
    @pytest.mark.parametrize("n, x, expected", [(2, 0.0, -1.0), (3, 0.0, 0.0), (2, 1.5, 1.25), (0, 7.0, 1.0)])
    def test_values(self, n, x, expected):
        assert go.hermite(n, x) == pytest.approx(expected)

    def test_matches_numpy_probabilists(self):
        x = np.linspace(-3, 3, 13)
        for n in range(12):
            coeffs = np.zeros(n + 1)
            coeffs[n] = 1
            np.testing.assert_allclose(go.hermite(n, x), np.polynomial.hermite_e.hermeval(x, coeffs), rtol=1e-12, atol=1e-9)

    @given(st.integers(0, 30), st.floats(-5, 5))
    def test_parity_is_exact(self, n, x):
        assert go.hermite(2 * n, -x) == go.hermite(2 * n, x)
        assert go.hermite(2 * n + 1, -x) == -go.hermite(2 * n + 1, x)

    def test_order_ceiling(self):
        with pytest.raises(DomainError):
            go.hermite(65, 0.0)

    def test_even_sum_identity_example(self):
        x = 0.5
        lhs = 2 * go.hermite(2, math.sqrt(2) * x) * go.hermite(0, math.sqrt(2) * x)
        rhs = go.hermite(2, 2 * x) - 1
        assert lhs == pytest.approx(-1.0) and rhs == pytest.approx(-1.0)

    def test_identity_residuals_small_case(self):
        res = go.hermite_identity_residuals(3, [-1.0, 0.5])
        assert max(res.values()) <= 1e-12
