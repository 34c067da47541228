import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kljnsim.cable import CableSpec, derive
from kljnsim.constants import BOLTZMANN, PLANCK, SPEED_OF_LIGHT
from kljnsim.errors import ValidationError
from kljnsim.network import Termination
from kljnsim.thermal import (
    Method,
    ThermalConfig,
    corner_frequencies,
    equipartition_deficit,
    instantaneous_energy_ratio,
    matched_linear_approximation,
    planck_intensity,
    thermal_energies,
)

import oracle_values as ov

resistance = st.floats(1.0, 1e6)


def test_codata_constants():
    assert BOLTZMANN == 1.380649e-23
    assert PLANCK == 6.62607015e-34
    assert SPEED_OF_LIGHT == 299792458.0


class TestCorners:
    def test_matched(self, cable):
        f0c, f0l = corner_frequencies(cable)
        expected = 2 / math.pi * derive(cable).min_wave_frequency
        assert f0c == pytest.approx(ov.THERMAL_CORNER_MATCHED, rel=1e-13)
        assert abs(f0c / expected - 1) <= 1e-12 and abs(f0l / expected - 1) <= 1e-12

    def test_doubled_terminations(self, cable):
        f0c, f0l = corner_frequencies(cable)
        g0c, g0l = corner_frequencies(cable, Termination(100, 100))
        assert g0c == pytest.approx(f0c / 2, rel=1e-13)
        assert g0l == pytest.approx(2 * f0l, rel=1e-13)

    def test_open_alice(self, cable):
        f0c, f0l = corner_frequencies(cable, Termination(1e300, 50))
        assert f0c == pytest.approx(1 / (2 * math.pi * 150e-12 * 50), rel=1e-12)
        assert f0l > 1e300

    def test_converges_to_matched(self, cable):
        target = corner_frequencies(cable)[0]
        for eps in (1e-3, 1e-6, 1e-9):
            r = 50 * (1 + eps)
            assert corner_frequencies(cable, Termination(r, r))[0] == pytest.approx(target, rel=2 * eps)


class TestEnergies:
    def test_matched_reference(self, cable):
        fc = derive(cable).min_wave_frequency / 100
        b = thermal_energies(cable, ThermalConfig(300, fc))
        assert b.electric_energy == pytest.approx(ov.THERMAL_MATCHED_E, rel=1e-12)
        assert b.electric_energy == pytest.approx(2.07e-23, rel=1e-3)
        assert abs(b.electric_energy / b.magnetic_energy - 1) <= 1e-12
        assert b.per_mode_quota == pytest.approx(ov.THERMAL_QUOTA_300K, rel=1e-15)
        assert b.electric_linear_approx == pytest.approx(matched_linear_approximation(cable, 300, fc), rel=1e-12)

    def test_general_termination(self, cable):
        b = thermal_energies(cable, ThermalConfig(300, 5e3, Termination(10, 2e3)))
        ee, em, f0c, f0l = ov.THERMAL_10_2K_5K
        assert b.electric_energy == pytest.approx(ee, rel=1e-12)
        assert b.magnetic_energy == pytest.approx(em, rel=1e-12)
        assert (b.corner_electric, b.corner_magnetic) == pytest.approx((f0c, f0l), rel=1e-12)

    def test_empty_band_limit(self, cable):
        b = thermal_energies(cable, ThermalConfig(300, 1e-30))
        assert b.electric_energy < 1e-50 and b.magnetic_energy < 1e-50

    @given(T=st.floats(1e-3, 1e6), fc=st.floats(1.0, 1e10), ra=resistance, rb=resistance)
    def test_methods_agree(self, cable, T, fc, ra, rb):
        cfg = ThermalConfig(T, fc, Termination(ra, rb))
        a = thermal_energies(cable, cfg, Method.CLOSED_FORM)
        b = thermal_energies(cable, cfg, "numeric_integral")
        assert b.method is Method.NUMERIC_INTEGRAL
        assert b.electric_energy == pytest.approx(a.electric_energy, rel=1e-9)
        assert b.magnetic_energy == pytest.approx(a.magnetic_energy, rel=1e-9)

    @given(T=st.floats(1e-3, 1e6), fc_frac=st.floats(1e-9, 1 / 50), ra=resistance, rb=resistance)
    def test_no_wave_bound_any_termination(self, cable, T, fc_frac, ra, rb):
        fc = fc_frac * derive(cable).min_wave_frequency
        b = thermal_energies(cable, ThermalConfig(T, fc, Termination(ra, rb)))
        assert 0 <= b.electric_energy < b.per_mode_quota
        assert 0 <= b.magnetic_energy < b.per_mode_quota
        # atan(a) + atan(b) < pi/2 whenever a*b < 1, and here a*b <= (pi f_c / 4 f_min)^2
        assert b.electric_energy + b.magnetic_energy < b.per_mode_quota

    @given(T=st.floats(1e-3, 1e6), fc_frac=st.floats(1e-9, 1 / 50))
    def test_no_wave_bound_matched(self, cable, T, fc_frac):
        fc = fc_frac * derive(cable).min_wave_frequency
        b = thermal_energies(cable, ThermalConfig(T, fc))
        assert b.electric_energy + b.magnetic_energy < b.per_mode_quota
        de, dm = equipartition_deficit(b)
        assert de < 0.02 and dm < 0.02

    @given(fc_frac=st.floats(1e-9, 0.1))
    def test_linear_approximation_quality(self, cable, fc_frac):
        f0c = corner_frequencies(cable)[0]
        fc = fc_frac * f0c
        b = thermal_energies(cable, ThermalConfig(300, fc))
        approx = matched_linear_approximation(cable, 300, fc)
        assert abs(b.electric_energy - approx) / b.electric_energy <= 0.01

    def test_invalid_config(self):
        for T, fc in [(0, 1e3), (-1, 1e3), (300, 0), (math.nan, 1e3), (300, math.inf)]:
            with pytest.raises(ValidationError):
                ThermalConfig(T, fc)

    def test_to_dict_keys(self, cable):
        d = thermal_energies(cable, ThermalConfig(300, 5e3)).to_dict()
        assert set(d) == {"e_e_j", "e_m_j", "quota_j", "deficit_e", "deficit_m", "f0c_hz", "f0l_hz", "method"}


class TestDeficit:
    def test_hundredth(self, cable):
        fc = derive(cable).min_wave_frequency / 100
        de, dm = equipartition_deficit(thermal_energies(cable, ThermalConfig(300, fc)))
        assert de == pytest.approx(0.01, rel=1e-3) and dm == pytest.approx(0.01, rel=1e-3)

    def test_at_corner(self, cable):
        f0c = corner_frequencies(cable)[0]
        de, _ = equipartition_deficit(thermal_energies(cable, ThermalConfig(300, f0c)))
        assert de == pytest.approx(ov.DEFICIT_AT_CORNER, rel=1e-12)

    @given(T=st.floats(1e-3, 1e6))
    def test_temperature_invariant(self, cable, T):
        a = equipartition_deficit(thermal_energies(cable, ThermalConfig(T, 1e5)))
        b = equipartition_deficit(thermal_energies(cable, ThermalConfig(2 * T, 1e5)))
        assert b == pytest.approx(a, rel=1e-13)


class TestEnergyRatio:
    def test_matched_exact(self, cable):
        assert instantaneous_energy_ratio(cable, derive(cable).wave_impedance) == 1.0

    @given(st.floats(1e-9, 1e3), st.floats(1e-3, 1e3))
    def test_matched_exact_any_cable(self, l_u, scale):
        spec = CableSpec(l_u * 1e-9, l_u * 1e-9 / scale**2, 0.0, 1.0)
        assert instantaneous_energy_ratio(spec, derive(spec).wave_impedance) == pytest.approx(1.0, abs=4e-16)

    def test_quadratic(self, cable):
        assert instantaneous_energy_ratio(cable, 100.0) == pytest.approx(4.0, rel=1e-15)
        assert instantaneous_energy_ratio(cable, 0.0) == 0.0
        with pytest.raises(ValidationError):
            instantaneous_energy_ratio(cable, -1.0)


class TestPlanck:
    def test_frozen(self):
        assert planck_intensity(1e9, 300) == pytest.approx(ov.PLANCK_1GHZ_300K, rel=1e-12)
        f1 = BOLTZMANN * 300 / PLANCK
        assert planck_intensity(f1, 300) == pytest.approx(ov.PLANCK_X1_300K, rel=1e-12)
        assert planck_intensity(30 * f1, 300) == pytest.approx(ov.PLANCK_X30_300K, rel=1e-12)

    @given(st.floats(1e-6, 0.02), st.floats(1.0, 1e4))
    def test_rayleigh_jeans(self, x, T):
        f = x * BOLTZMANN * T / PLANCK
        rj = 4 * math.pi * f**2 * BOLTZMANN * T / SPEED_OF_LIGHT**2
        assert planck_intensity(f, T) == pytest.approx(rj, rel=0.01)

    def test_wien_suppression(self):
        T = 300.0
        f = 30 * BOLTZMANN * T / PLANCK
        prefactor = 4 * math.pi * PLANCK * f**3 / SPEED_OF_LIGHT**2
        assert planck_intensity(f, T) / prefactor == pytest.approx(math.exp(-30), rel=1e-9)

    def test_classical_linear_in_t(self):
        assert planck_intensity(1e6, 600) / planck_intensity(1e6, 300) == pytest.approx(2, rel=1e-6)

    def test_extremes_finite(self):
        out = planck_intensity(np.array([1e-3, 1e12, 1e16]), 1.0)
        assert np.all(np.isfinite(out)) and out[-1] == 0.0
        assert isinstance(planck_intensity(1e9, 300), float)

    def test_invalid(self):
        for f, T in [(0, 300), (-1, 300), (1e9, 0)]:
            with pytest.raises(ValidationError):
                planck_intensity(f, T)
