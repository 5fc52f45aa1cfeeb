import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from weakmeas import gaussian_oracle as go
from weakmeas import optimize, setups, weak_core as wc
from weakmeas.errors import DegenerateSetupError, DomainError

LATTICE_S = (0.01, 0.1, 1.0, 10.0)
LATTICE_ANGLES = (0.3, 1.0, 2.0, 2.8, 4.0)

angles = st.floats(0.05, 2 * math.pi - 0.05).filter(lambda a: abs(a - math.pi) > 1e-3)
couplings = st.floats(1e-3, 30.0)


class TestTwoLevelSetup:
    def test_rejects_non_involution(self):
        with pytest.raises(DomainError):
            setups.TwoLevelSetup([1, 0], [1, 0], np.diag([1.0, 2.0]))

    def test_rejects_non_hermitian(self):
        with pytest.raises(DomainError):
            setups.TwoLevelSetup([1, 0], [1, 0], np.array([[0, 1], [0, 0]]))

    def test_rejects_unnormalized(self):
        with pytest.raises(DomainError):
            setups.TwoLevelSetup([1, 1], [1, 0], np.eye(2))

    def test_arrays_are_read_only(self):
        setup = setups.aav_setup(1.0)
        with pytest.raises(ValueError):
            setup.pre[0] = 0


class TestWeakValue:
    def test_eigenvector(self):
        up = np.array([1.0, 0.0])
        overlap, a_w = setups.weak_value_of(setups.TwoLevelSetup(up, up, np.diag([1.0, -1.0])))
        assert overlap == 1.0
        assert complex(a_w) == 1.0

    @given(angles)
    def test_aav_weak_value(self, alpha):
        overlap, a_w = setups.weak_value_of(setups.aav_setup(alpha))
        assert overlap.real == pytest.approx(math.cos(alpha / 2), abs=1e-14)
        assert complex(a_w) == pytest.approx(math.tan(alpha / 2), rel=1e-12, abs=1e-12)

    @given(st.floats(0.05, 2 * math.pi - 0.05))
    def test_dsjh_weak_value(self, phi):
        _, a_w = setups.weak_value_of(setups.dsjh_setup(phi))
        assert complex(a_w) == pytest.approx(-1j / math.tan(phi / 2), rel=1e-12, abs=1e-12)

    def test_aav_three_quarter(self):
        _, a_w = setups.weak_value_of(setups.aav_setup(3 * math.pi / 4))
        assert a_w.re == pytest.approx(2.41421, abs=5e-6)

    def test_orthogonal_flag(self):
        overlap, flag = setups.weak_value_of(setups.aav_setup(math.pi))
        assert isinstance(flag, setups.OrthogonalFlag)
        assert abs(flag.transition) == pytest.approx(1.0)
        assert abs(overlap) < 1e-15

    def test_degenerate(self):
        up, down = np.array([1.0, 0.0]), np.array([0.0, 1.0])
        with pytest.raises(DegenerateSetupError):
            setups.weak_value_of(setups.TwoLevelSetup(up, down, np.diag([1.0, -1.0])))


class TestAav:
    def test_quarter_turn(self):
        for s in (0.1, 3.0):
            st_ = setups.aav_closed_forms(setups.AavPoint(s, math.pi / 2))
            assert st_.z == pytest.approx(1.0) and st_.mean_pz == pytest.approx(1.0)

    def test_reference_point(self):
        st_ = setups.aav_closed_forms(setups.AavPoint(1.0, 3 * math.pi / 4))
        # grid-oracle values
        assert st_.z == pytest.approx(2.5260740261787635, rel=1e-9)
        assert st_.mean_pz == pytest.approx(0.9557176620136971, rel=1e-9)
        assert st_.delta_pz_sq == pytest.approx(0.9381926299343487, rel=1e-9)
        assert st_.delta_z_sq == pytest.approx(0.8515888794192764, rel=1e-9)

    @given(st.floats(0.05, 3.0).filter(lambda a: abs(a - math.pi) > 1e-3))
    def test_strong_limit(self, alpha):
        assert setups.aav_closed_forms(setups.AavPoint(60.0, alpha)).mean_pz == pytest.approx(math.sin(alpha), abs=1e-12)

    def test_orthogonal_angle(self):
        with pytest.raises(DomainError):
            setups.aav_closed_forms(setups.AavPoint(1.0, math.pi))

    @given(couplings, angles)
    def test_symmetry(self, s, alpha):
        a = setups.aav_closed_forms(setups.AavPoint(s, alpha)).mean_pz
        b = setups.aav_closed_forms(setups.AavPoint(s, 2 * math.pi - alpha)).mean_pz
        assert a == pytest.approx(-b, rel=1e-9, abs=1e-12)

    @given(couplings, angles)
    def test_correspondence(self, s, alpha):
        pt = setups.AavPoint(s, alpha)
        a, b = setups.aav_closed_forms(pt), setups.aav_stats_from_core(pt)
        for name in ("z", "mean_pz", "delta_pz_sq", "delta_z_sq", "snr"):
            assert getattr(a, name) == pytest.approx(getattr(b, name), rel=1e-9, abs=1e-12)

    @pytest.mark.parametrize("s", [0.1, 1.0, 10.0, 1000.0])
    def test_density(self, s):
        pt = setups.AavPoint(s, 2.5)
        sigma = 1 / math.sqrt(2 * s)
        lim = 1 + 14 * sigma
        mass = quad(lambda x: setups.aav_density(pt, x), -lim, lim, points=[-1, 0, 1], limit=400)[0]
        assert mass == pytest.approx(1.0, abs=1e-9)
        x = np.linspace(-lim, lim, 501)
        a_w = math.tan(1.25)
        np.testing.assert_allclose(
            setups.aav_density(pt, x), wc.density_q_nonorthogonal(wc.MeasurementPoint.of(s, a_w), x), rtol=1e-12, atol=1e-14
        )

    def test_weak_density_peaks_near_weak_value(self):
        pt = setups.AavPoint(0.1, math.pi / 2)
        x = np.linspace(-5, 5, 10001)
        peak = x[np.argmax(setups.aav_density(pt, x))]
        assert 0.5 < peak <= 1.0


class TestDsjh:
    def test_global_maximum_value(self):
        s_m, phi_m, _ = optimize.dsjh_global_max()
        st_ = setups.dsjh_closed_forms(setups.DsjhPoint(s_m, phi_m))
        assert -st_.mean_kx == pytest.approx(0.402371, abs=1e-6)

    def test_reference_point_against_oracle(self):
        s_m, phi_m, _ = optimize.dsjh_global_max()
        st_ = setups.dsjh_closed_forms(setups.DsjhPoint(s_m, phi_m))
        # grid-oracle values at (s_m, phi_m)
        assert st_.z == pytest.approx(1.4507636520173075, rel=1e-9)
        assert st_.mean_kx == pytest.approx(-0.402371171274706, rel=1e-9)
        assert st_.delta_x_sq == pytest.approx(0.39840606501001, rel=1e-9)
        assert st_.delta_p_sq == pytest.approx(1.8825014623739629, rel=1e-9)

    def test_half_turn(self):
        assert setups.dsjh_closed_forms(setups.DsjhPoint(2.0, math.pi)).mean_kx == pytest.approx(0.0, abs=1e-15)

    def test_decays_at_strong_coupling(self):
        assert abs(setups.dsjh_closed_forms(setups.DsjhPoint(40.0, 1.0)).mean_kx) < 1e-15

    @given(couplings, st.floats(0.05, math.pi - 0.05))
    def test_sign_consistency(self, s, phi):
        _, a_w = setups.weak_value_of(setups.dsjh_setup(phi))
        assert a_w.im < 0
        assert setups.dsjh_closed_forms(setups.DsjhPoint(s, phi)).mean_kx < 0

    @given(couplings, st.floats(0.05, 2 * math.pi - 0.05))
    def test_symmetry(self, s, phi):
        a = setups.dsjh_closed_forms(setups.DsjhPoint(s, phi)).mean_kx
        b = setups.dsjh_closed_forms(setups.DsjhPoint(s, 2 * math.pi - phi)).mean_kx
        assert a == pytest.approx(-b, rel=1e-9, abs=1e-15)

    @given(couplings, st.floats(0.05, 2 * math.pi - 0.05))
    def test_correspondence(self, s, phi):
        pt = setups.DsjhPoint(s, phi)
        a, b = setups.dsjh_closed_forms(pt), setups.dsjh_stats_from_core(pt)
        for name in ("z", "mean_kx", "delta_x_sq", "delta_p_sq", "snr"):
            assert getattr(a, name) == pytest.approx(getattr(b, name), rel=1e-9, abs=1e-12)

    @pytest.mark.parametrize("s", [0.1, 1.0, 10.0])
    def test_density(self, s):
        pt = setups.DsjhPoint(s, 1.0)
        lim = 14 * math.sqrt(s / 2)
        mass = quad(lambda x: setups.dsjh_density(pt, x), -lim, lim, limit=400)[0]
        assert mass == pytest.approx(1.0, abs=1e-9)
        x = np.linspace(-lim, lim, 777)
        a_w = -1j / math.tan(0.5)
        np.testing.assert_allclose(
            setups.dsjh_density(pt, x), wc.density_p_nonorthogonal(wc.MeasurementPoint.of(s, a_w), x), rtol=1e-12, atol=1e-15
        )
        assert setups.dsjh_density(pt, 0.5) == pytest.approx(0.0, abs=1e-15)

    def test_many_peaks_at_strong_coupling(self):
        pt = setups.DsjhPoint(50.0, 1.0)
        x = np.linspace(-20, 20, 40001)
        rho = setups.dsjh_density(pt, x)
        peaks = np.sum((rho[1:-1] > rho[:-2]) & (rho[1:-1] > rho[2:]))
        assert peaks > 5

    def test_dark_port(self):
        with pytest.raises(DomainError):
            setups.DsjhPoint(1.0, 0.0)
        with pytest.raises(DomainError):
            setups.dsjh_closed_forms(setups.DsjhPoint(1.0, 1e-13))


class TestAmplification:
    def test_definition(self):
        pt = setups.DsjhPoint(1.0, 1.0)
        a1 = setups.dsjh_amplification(pt, 2e-5, 3.0)
        assert setups.dsjh_amplification(pt, 2e-5, 6.0) == pytest.approx(a1 / 2)
        assert setups.dsjh_amplification(setups.DsjhPoint(1.0, math.pi), 2e-5, 3.0) == pytest.approx(0.0, abs=1e-9)

    def test_value_at_global_maximum(self):
        s_m, phi_m, value = optimize.dsjh_global_max()
        amp = setups.dsjh_amplification(setups.DsjhPoint(s_m, phi_m), 2e-5, 3.0)
        # 0.402371 / (2e-5 * 3): the same inputs that are quoted alongside "order 600"
        assert amp == pytest.approx(value / 6e-5)
        assert amp == pytest.approx(6706.2, rel=1e-4)

    def test_domain(self):
        with pytest.raises(DomainError):
            setups.dsjh_amplification(setups.DsjhPoint(1.0, 1.0), 0.0, 3.0)


class TestOracleIdentity:
    @pytest.mark.parametrize("s", LATTICE_S)
    @pytest.mark.parametrize("angle", LATTICE_ANGLES)
    def test_aav(self, s, angle):
        rep = go.oracle_report(setups.aav_setup(angle), s)
        st_ = setups.aav_closed_forms(setups.AavPoint(s, angle))
        assert rep.mean_v == pytest.approx(st_.mean_pz, rel=1e-8, abs=1e-10)
        assert rep.var_v == pytest.approx(st_.delta_pz_sq, rel=1e-8)
        assert rep.var_u == pytest.approx(st_.delta_z_sq, rel=1e-8, abs=1e-10)

    @pytest.mark.parametrize("s", LATTICE_S)
    @pytest.mark.parametrize("angle", LATTICE_ANGLES)
    def test_dsjh(self, s, angle):
        rep = go.oracle_report(setups.dsjh_setup(angle), s)
        st_ = setups.dsjh_closed_forms(setups.DsjhPoint(s, angle))
        assert rep.mean_u == pytest.approx(st_.mean_kx, rel=1e-8, abs=1e-10)
        assert rep.var_u == pytest.approx(st_.delta_x_sq, rel=1e-8, abs=1e-10)
        assert rep.var_v == pytest.approx(st_.delta_p_sq, rel=1e-8)
