import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kljnsim.cable import derive
from kljnsim.errors import UnmeasurableError, ValidationError
from kljnsim.network import (
    Direction,
    End,
    NetworkModel,
    Termination,
    Topology,
    ac_sweep,
    derivative_response_check,
    equivalent_phase_velocity,
    phase_shift,
    phase_velocity_table,
    solve_phasor,
    sweep_frequencies,
    time_delay,
)

import oracle_values as ov

ALL_MODELS = [NetworkModel.lossless(), NetworkModel.lossy(), NetworkModel.pi(), NetworkModel.ladder(64)]
resistance = st.floats(1.0, 1e5)


class TestModelParsing:
    @pytest.mark.parametrize("text, topology, n", [
        ("lossless", Topology.LOSSLESS_L, 1),
        ("lossy", Topology.LOSSY_RL, 1),
        ("pi", Topology.PI_RLC, 1),
        ("ladder:64", Topology.LADDER, 64),
        (" LADDER:3 ", Topology.LADDER, 3),
    ])
    def test_parse(self, text, topology, n):
        m = NetworkModel.parse(text)
        assert (m.topology, m.segment_count) == (topology, n)
        assert NetworkModel.parse(str(m)) == m

    @pytest.mark.parametrize("text", ["ladder", "ladder:x", "ladder:0", "pi:3", "coax"])
    def test_bad(self, text):
        with pytest.raises(ValidationError):
            NetworkModel.parse(text)


class TestTermination:
    def test_coerces_and_validates(self):
        t = Termination(50, "10", "bob")
        assert t.resistance_bob == 10.0 and t.drive_end is End.BOB
        for bad in [(0, 50), (50, -1), (math.inf, 50), ("x", 50)]:
            with pytest.raises(ValidationError):
                Termination(*bad)

    def test_matched(self, cable):
        t = Termination.matched(cable)
        assert t.resistance_alice == t.resistance_bob == pytest.approx(50.0)

    def test_direction_aliases(self):
        assert Direction.parse("bob") is Direction.TOWARD_BOB
        assert Direction.parse("toward-alice") is Direction.TOWARD_ALICE
        assert Direction.TOWARD_ALICE.drive_end is End.BOB
        with pytest.raises(ValidationError):
            Direction.parse("sideways")


class TestSolvePhasor:
    def test_dc_limit_divider(self, cable):
        sol = solve_phasor(NetworkModel.lossless(), cable, Termination(50, 50), 1e-3)
        assert sol.voltage_bob_end == pytest.approx(0.5, abs=1e-9)
        assert abs(sol.drop_U_AB) < 1e-9

    def test_inductive_drop(self, cable):
        sol = solve_phasor(NetworkModel.lossless(), cable, Termination(50, 50), 1e3)
        assert abs(sol.drop_U_AB) == pytest.approx(ov.DROP_1K_50_50, rel=1e-12)
        assert abs(sol.drop_U_AB) == pytest.approx(2.36e-5, rel=1e-2)

    def test_pi_vs_ladder(self, cable):
        f = derive(cable).min_wave_frequency / 100
        term = Termination(50, 50)
        pi = solve_phasor(NetworkModel.pi(), cable, term, f).drop_U_AB
        lad = solve_phasor(NetworkModel.ladder(64), cable, term, f).drop_U_AB
        assert abs(pi - lad) / abs(lad) < 1e-3

    @pytest.mark.parametrize("model", ALL_MODELS, ids=str)
    def test_kirchhoff(self, cable, model):
        sol = solve_phasor(model, cable, Termination(10, 2e3, End.BOB, 2.0), 3.3e4)
        assert sol.residual <= 1e-12
        # the drop is summed from series elements, so only rounding separates them
        assert sol.drop_U_AB == pytest.approx(sol.voltage_alice_end - sol.voltage_bob_end,
                                              abs=1e-13 * abs(sol.voltage_alice_end))
        assert sol.node_voltages[0] == sol.voltage_alice_end
        assert sol.node_voltages[-1] == sol.voltage_bob_end

    @pytest.mark.parametrize("model", ALL_MODELS[:2], ids=str)
    def test_single_loop_current(self, cable, model):
        sol = solve_phasor(model, cable, Termination(20, 300), 1e4)
        assert sol.current_alice_resistor == pytest.approx(sol.loop_current, rel=1e-12)
        assert sol.current_bob_resistor == pytest.approx(sol.loop_current, rel=1e-12)

    @pytest.mark.parametrize("model", ALL_MODELS, ids=str)
    @given(ra=resistance, rb=resistance, amp=st.floats(-1e3, 1e3).filter(lambda a: abs(a) > 1e-6),
           f=st.floats(1.0, 6e5))
    def test_linear_in_amplitude(self, cable, model, ra, rb, amp, f):
        base = solve_phasor(model, cable, Termination(ra, rb), f)
        scaled = solve_phasor(model, cable, Termination(ra, rb, End.ALICE, amp), f)
        for x, y in [(base.voltage_bob_end, scaled.voltage_bob_end), (base.drop_U_AB, scaled.drop_U_AB)]:
            assert y == pytest.approx(amp * x, rel=1e-9, abs=1e-300)

    @pytest.mark.parametrize("model", ALL_MODELS[:2], ids=str)
    @given(ra=resistance, rb=resistance, f=st.floats(1.0, 1e10))
    def test_voltage_passivity_series_models(self, cable, model, ra, rb, f):
        sol = solve_phasor(model, cable, Termination(ra, rb), f)
        assert abs(sol.voltage_bob_end) <= 1.0 + 1e-12

    @pytest.mark.parametrize("model", ALL_MODELS[2:], ids=str)
    @given(ra=resistance, rb=resistance, f=st.floats(1.0, 6.6e5))
    def test_voltage_passivity_quasi_static(self, cable, model, ra, rb, f):
        # shunt-C models show a Ferranti rise of about (beta D)^2 / 2 into light loads
        sol = solve_phasor(model, cable, Termination(ra, rb), f)
        beta_d = math.pi * f / derive(cable).min_wave_frequency
        assert abs(sol.voltage_bob_end) <= 1.0 + beta_d**2

    @pytest.mark.parametrize("model", ALL_MODELS, ids=str)
    @given(ra=resistance, rb=resistance, f=st.floats(1.0, 1e10))
    def test_available_power_bound(self, cable, model, ra, rb, f):
        # a passive network can deliver at most the generator's available power
        sol = solve_phasor(model, cable, Termination(ra, rb), f)
        assert abs(sol.voltage_bob_end) ** 2 / rb <= (1 + 1e-9) / (4 * ra)

    def test_rejects_bad_frequency(self, cable):
        for f in (0.0, -1.0, math.nan):
            with pytest.raises(ValidationError):
                solve_phasor(NetworkModel.lossless(), cable, Termination(50, 50), f)


class TestPhaseAndDelay:
    def test_phase_toward_bob(self, cable):
        phi = phase_shift(NetworkModel.lossless(), cable, Termination(50, 50), 1e3, "toward_bob")
        assert phi == pytest.approx(ov.PHASE_TOWARD_BOB_50_1K, rel=1e-12)
        assert phi == pytest.approx(-4.712e-5, rel=1e-3)

    @given(r=resistance, other=resistance, f=st.floats(10.0, 1e5))
    def test_direction_symmetry(self, lossless_cable, r, other, f):
        m = NetworkModel.lossless()
        ab = phase_shift(m, lossless_cable, Termination(other, r), f, Direction.TOWARD_BOB)
        ba = phase_shift(m, lossless_cable, Termination(r, other), f, Direction.TOWARD_ALICE)
        assert ab < 0 < ba
        assert -ab == pytest.approx(ba, rel=1e-12)

    def test_small_angle_formula(self, cable):
        l_c = derive(cable).total_inductance
        for r in (10.0, 1e3):
            phi = phase_shift(NetworkModel.lossless(), cable, Termination(50, r), 1e3, "bob")
            approx = -2 * math.pi * 1e3 * l_c / r
            assert phi == pytest.approx(approx, rel=abs(approx) ** 2)

    def test_dc_limit(self, cable):
        phi = phase_shift(NetworkModel.lossless(), cable, Termination(50, 50), 1e-6, "bob")
        assert abs(phi) < 1e-12

    def test_warns_outside_quasi_static(self, cable):
        with pytest.warns(UserWarning, match="quasi-static"):
            phase_shift(NetworkModel.lossless(), cable, Termination(50, 50), 1e7, "bob")

    def test_delays(self, cable):
        assert time_delay(cable, Termination(50, 10), "toward_bob") == pytest.approx(37.5e-9, rel=1e-14)
        sym = Termination(70, 70)
        assert time_delay(cable, sym, "bob") == time_delay(cable, sym, "alice")
        t = Termination(2e3, 10)
        assert time_delay(cable, t, "alice") / time_delay(cable, t, "bob") == pytest.approx(1 / 200, rel=1e-14)

    @given(ra=resistance, rb=resistance)
    def test_delay_law_is_exact(self, cable, ra, rb):
        l_c = derive(cable).total_inductance
        t = Termination(ra, rb)
        assert time_delay(cable, t, "bob") * rb == pytest.approx(l_c, rel=1e-15)
        assert time_delay(cable, t, "alice") * ra == pytest.approx(l_c, rel=1e-15)
        if ra != rb:
            assert time_delay(cable, t, "bob") != time_delay(cable, t, "alice")

    def test_unmeasurable(self, cable):
        with pytest.raises(UnmeasurableError):
            equivalent_phase_velocity(NetworkModel.lossless(), cable, Termination(50, 1e12), 1e-3, "bob")


class TestPhaseVelocityTable:
    def test_matches_frozen_oracle(self, cable):
        cells = phase_velocity_table(cable)
        assert [(c.r_ohm, c.f_hz) for c in cells] == [tuple(row[:2]) for row in ov.TABLE]
        for cell, row in zip(cells, ov.TABLE):
            assert cell.v_m_per_s == pytest.approx(row[2], rel=1e-9)

    def test_superluminal_flag(self, cable):
        flagged = {c.r_ohm for c in phase_velocity_table(cable) if c.superluminal}
        assert flagged == {1e3, 10e3}
        assert phase_velocity_table(cable)[0].kind == "steady-state phase velocity"

    def test_frequency_flat(self, cable):
        cells = phase_velocity_table(cable)
        for lo, hi in zip(cells[::2], cells[1::2]):
            assert abs(hi.v_m_per_s / lo.v_m_per_s - 1) < 1e-3


class TestSweep:
    def test_grid(self):
        f = sweep_frequencies(100, 10e6, 20)
        assert len(f) == 101 and f[0] == pytest.approx(100) and f[-1] == pytest.approx(10e6)
        assert np.allclose(np.diff(np.log10(f)), 0.05)
        for bad in [(0, 10, 5), (10, 10, 5), (1, 10, 0), (1, 10, 2.5)]:
            with pytest.raises(ValidationError):
                sweep_frequencies(*bad)

    def test_lossless_shape(self, cable):
        rows = ac_sweep(NetworkModel.lossless(), cable, Termination.matched(cable))
        f = np.array([r.freq_hz for r in rows])
        mag = np.array([r.mag_uab_v for r in rows])
        lo = f <= 1e5
        slope = np.polyfit(np.log10(f[lo]), np.log10(mag[lo]), 1)[0]
        assert slope == pytest.approx(1.0, abs=1e-3)
        assert rows[0].phase_deg == pytest.approx(90.0, abs=0.01)

    def test_lossy_crossover(self, cable):
        rows = ac_sweep(NetworkModel.lossy(), cable, Termination.matched(cable), 100, 1e7, 20)
        phase = np.array([r.phase_deg for r in rows])
        f = np.array([r.freq_hz for r in rows])
        assert phase[0] < 5
        assert float(np.interp(5.5, np.log10(f), phase)) > 85
        assert np.all(np.diff(phase[f <= 3e5]) > 0)
        at = float(np.interp(math.log10(ov.LOSS_CROSSOVER_HZ), np.log10(f), phase))
        assert at == pytest.approx(45.0, abs=0.5)

    def test_unwrapped_continuous(self, cable):
        rows = ac_sweep(NetworkModel.ladder(8), cable, Termination(10, 5e3), 1e5, 1e9, 40)
        u = np.array([r.phase_unwrapped_deg for r in rows])
        assert np.all(np.abs(np.diff(u)) < 180)
        w = np.array([r.phase_deg for r in rows])
        assert np.all((w > -180) & (w <= 180))


class TestDerivativeResponse:
    dt = 1e-6

    def _t(self, n):
        return np.arange(n) * self.dt

    def test_sine(self, cable):
        t = self._t(10_000)
        assert derivative_response_check(cable, Termination(50, 50), np.sin(2e3 * np.pi * t), self.dt) <= 1e-3

    def test_two_tones(self, cable):
        t = self._t(10_000)
        u = np.sin(2e3 * np.pi * t) + 0.3 * np.cos(6e3 * np.pi * t)
        assert derivative_response_check(cable, Termination(50, 2e3), u, self.dt) <= 1e-3

    def test_drive_from_bob(self, cable):
        t = self._t(10_000)
        term = Termination(50, 50, End.BOB)
        assert derivative_response_check(cable, term, np.sin(2e3 * np.pi * t), self.dt) <= 1e-3

    def test_constant(self, cable):
        assert derivative_response_check(cable, Termination(50, 50), np.full(1000, 3.0), self.dt) == 0.0

    def test_too_short(self, cable):
        t = self._t(5_000)  # 5 periods at 1 kHz
        with pytest.raises(ValidationError, match="too short"):
            derivative_response_check(cable, Termination(50, 50), np.sin(2e3 * np.pi * t), self.dt)
