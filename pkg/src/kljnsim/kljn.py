"""Time-domain KLJN bit exchange over the pi-RLC cable.

Each bit period Alice and Bob pick a resistor from {R_L, R_H} at random and
connect it with a series noise generator whose one-sided density is the
Johnson level ``4 k T_eff R`` flat up to ``f_c``. Both parties estimate the
mean-square wire voltage at their own end and from it infer the far end's
choice. Eve sees the same wire and estimates the loop resistance from the
mean-square current; in the mixed states (HL, LH) that statistic carries no
information about who holds which resistor.

A separate active probe injects a single tone at one end and measures the
far-end phase lag, which gives the quasi-static directional delay
``L_c / R_far``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, fields, replace
from typing import Iterable

import numpy as np
from scipy import stats

from .cable import CableSpec, derive, reference_cable
from .constants import BOLTZMANN
from .errors import UnmeasurableError, ValidationError
from .network import Direction, End
from .transient import Traces, simulate_loop, sinusoidal_response

MAX_SAMPLES = 2**31
QUASI_STATIC_FRACTION = 0.01
MIN_OVERSAMPLING = 20.0


class Choice(str, enum.Enum):
    L = "L"
    H = "H"


@dataclass(frozen=True)
class KljnConfig:
    r_low: float = 1e3
    r_high: float = 10e3
    noise_temperature: float = 1e15
    noise_cutoff: float = 5e3
    cable: CableSpec = field(default_factory=reference_cable)
    bit_period: float = 0.4  # 2000 / f_c
    sample_rate: float = 100e3
    rng_seed: int = 42
    bit_count: int = 1000
    probe_frequency: float = 1e3

    def __post_init__(self):
        errors = []
        for f in fields(self):
            if f.name in ("cable", "rng_seed", "bit_count"):
                continue
            value = getattr(self, f.name)
            if not (isinstance(value, (int, float)) and not isinstance(value, bool)
                    and math.isfinite(value) and value > 0):
                errors.append(f"{f.name}: must be finite and > 0, got {value!r}")
        if not isinstance(self.cable, CableSpec):
            errors.append("cable: expected a CableSpec")
        if not isinstance(self.rng_seed, (int, np.integer)) or isinstance(self.rng_seed, bool) \
                or not 0 <= self.rng_seed < 2**64:
            errors.append(f"rng_seed: must be an integer in [0, 2^64), got {self.rng_seed!r}")
        if not isinstance(self.bit_count, (int, np.integer)) or isinstance(self.bit_count, bool) \
                or self.bit_count < 1:
            errors.append(f"bit_count: must be an integer >= 1, got {self.bit_count!r}")
        if errors:
            raise ValidationError("; ".join(errors))
        if self.r_low == self.r_high:
            errors.append("r_low/r_high: must differ")
        f_min = derive(self.cable).min_wave_frequency
        if self.noise_cutoff > QUASI_STATIC_FRACTION * f_min:
            errors.append(
                f"noise_cutoff: {self.noise_cutoff:g} Hz exceeds {QUASI_STATIC_FRACTION} * f_min "
                f"= {QUASI_STATIC_FRACTION * f_min:g} Hz"
            )
        if self.probe_frequency > QUASI_STATIC_FRACTION * f_min:
            errors.append(f"probe_frequency: {self.probe_frequency:g} Hz exceeds {QUASI_STATIC_FRACTION} * f_min")
        if self.sample_rate < MIN_OVERSAMPLING * self.noise_cutoff:
            errors.append(
                f"sample_rate: {self.sample_rate:g} Hz is below {MIN_OVERSAMPLING:g} * noise_cutoff"
            )
        if self.bit_period * self.sample_rate > MAX_SAMPLES:
            errors.append("bit_period * sample_rate: too many samples per bit")
        if self.bit_period * self.noise_cutoff < 1:
            errors.append("bit_period: must span at least one period of noise_cutoff")
        if errors:
            raise ValidationError("; ".join(errors))

    def resistance(self, choice: Choice | str) -> float:
        return self.r_low if Choice(choice) is Choice.L else self.r_high

    @property
    def samples_per_bit(self) -> int:
        return int(round(self.bit_period * self.sample_rate))

    @classmethod
    def from_dict(cls, data: dict) -> KljnConfig:
        from .units import parse_quantity

        if not isinstance(data, dict):
            raise ValidationError("config: expected a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        errors = [f"{k}: unknown field" for k in unknown]
        kwargs = {}
        for key, value in data.items():
            if key in unknown:
                continue
            try:
                if key == "cable":
                    from .cable import preset

                    kwargs[key] = preset(value) if isinstance(value, str) else CableSpec.from_dict(value)
                elif key in ("rng_seed", "bit_count"):
                    if isinstance(value, bool) or not isinstance(value, int):
                        raise ValidationError(f"expected an integer, got {value!r}")
                    kwargs[key] = value
                else:
                    kwargs[key] = parse_quantity(value)
            except ValidationError as exc:
                errors.append(f"{key}: {exc}")
        if errors:
            raise ValidationError("; ".join(errors))
        return cls(**kwargs)

    def to_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out["cable"] = self.cable.to_dict()
        return out


def generate_band_limited_noise(
    resistance: float,
    temperature: float,
    cutoff: float,
    duration: float,
    sample_rate: float,
    seed=None,
) -> np.ndarray:
    """Johnson-like noise voltage with one-sided density ``4 k T R`` on (0, f_c].

    Spectral synthesis: every FFT bin inside the band gets the same amplitude
    and a uniformly random phase, bins outside are zero. The record's mean
    square is therefore exactly ``4 k T R f_c`` and its band edge is sharp.
    ``seed`` is anything ``numpy.random.default_rng`` accepts.
    """
    for name, value in (("resistance", resistance), ("temperature", temperature),
                        ("cutoff", cutoff), ("duration", duration), ("sample_rate", sample_rate)):
        if not (math.isfinite(value) and value > 0):
            raise ValidationError(f"{name}: must be finite and > 0, got {value!r}")
    n = int(round(duration * sample_rate))
    if n > MAX_SAMPLES:
        raise ValidationError(f"duration * sample_rate = {n} samples exceeds {MAX_SAMPLES}")
    if n < 2:
        raise ValidationError(f"duration * sample_rate = {n} samples; need at least 2")
    if cutoff >= sample_rate / 2:
        raise ValidationError("cutoff: must be below the Nyquist frequency")
    freqs = np.fft.rfftfreq(n, 1.0 / sample_rate)
    band = np.flatnonzero((freqs > 0) & (freqs <= cutoff))
    if band.size == 0:
        raise ValidationError("duration too short to resolve any frequency below cutoff")
    rng = np.random.default_rng(seed)
    phases = rng.uniform(0.0, 2.0 * math.pi, band.size)
    target_ms = 4.0 * BOLTZMANN * temperature * resistance * cutoff
    amplitude = math.sqrt(2.0 * target_ms / band.size)  # per-bin cosine amplitude
    spectrum = np.zeros(freqs.size, dtype=complex)
    spectrum[band] = 0.5 * n * amplitude * np.exp(1j * phases)
    return np.fft.irfft(spectrum, n)


def _bit_seed(config: KljnConfig, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(config.rng_seed, spawn_key=(0, index))


def _choice_seed(config: KljnConfig) -> np.random.SeedSequence:
    return np.random.SeedSequence(config.rng_seed, spawn_key=(1,))


def simulate_bit_period(
    config: KljnConfig,
    alice: Choice | str,
    bob: Choice | str,
    bit_index: int = 0,
) -> Traces:
    """One bit period with both noise generators active.

    The generators' seeds derive from ``(rng_seed, bit_index)``, so any bit
    of a run can be reproduced on its own.
    """
    r_a, r_b = config.resistance(alice), config.resistance(bob)
    seed_a, seed_b = _bit_seed(config, bit_index).spawn(2)
    args = (config.noise_temperature, config.noise_cutoff, config.bit_period, config.sample_rate)
    u_a = generate_band_limited_noise(r_a, *args, seed=seed_a)
    u_b = generate_band_limited_noise(r_b, *args, seed=seed_b)
    return simulate_loop(config.cable, r_a, r_b, u_a, u_b, config.sample_rate)


def expected_wire_level(config: KljnConfig, r_a: float, r_b: float) -> float:
    """Mean-square wire voltage ``4 k T_eff R_par f_c``."""
    r_par = r_a * r_b / (r_a + r_b)
    return 4.0 * BOLTZMANN * config.noise_temperature * r_par * config.noise_cutoff


def decision_levels(config: KljnConfig) -> dict[str, float]:
    rl, rh = config.r_low, config.r_high
    return {
        "LL": expected_wire_level(config, rl, rl),
        "LH": expected_wire_level(config, rl, rh),
        "HH": expected_wire_level(config, rh, rh),
    }


def decode_bit(
    own_choice: Choice | str,
    own_resistance: float,
    config: KljnConfig,
    measured_mean_square_voltage: float,
    guard: float = 0.0,
) -> Choice | None:
    """Infer the far party's resistor from one's own wire-voltage statistic.

    The statistic is classified as LL, mixed, or HH with thresholds at the
    geometric means of neighbouring expected levels. Returns ``None``
    (undecided) when the class is impossible given ``own_choice``, when the
    statistic lies within ``guard`` (relative, log scale) of a threshold, or
    when it is not a positive finite number.
    """
    own = Choice(own_choice)
    if not math.isclose(own_resistance, config.resistance(own), rel_tol=1e-12):
        raise ValidationError(f"own_resistance {own_resistance!r} does not match choice {own.value}")
    msv = measured_mean_square_voltage
    if not (math.isfinite(msv) and msv > 0):
        return None
    levels = sorted(decision_levels(config).items(), key=lambda kv: kv[1])
    thresholds = [math.sqrt(levels[i][1] * levels[i + 1][1]) for i in range(2)]
    if any(abs(math.log(msv / t)) < guard for t in thresholds):
        return None
    idx = sum(msv > t for t in thresholds)
    state = levels[idx][0]
    if state == "LH":
        return Choice.H if own is Choice.L else Choice.L
    far = Choice(state[0])
    return far if far is own else None


def eve_loop_statistic(traces: Traces, config: KljnConfig) -> float:
    """Loop resistance ``R_A + R_B`` estimated from ``<I^2> = 4 k T f_c / (R_A + R_B)``."""
    msc = float(np.mean(traces.loop_current**2))
    if not msc > 0:
        raise ValidationError("loop current is identically zero; no resistance estimate possible")
    return 4.0 * BOLTZMANN * config.noise_temperature * config.noise_cutoff / msc


def two_sample_pvalue(a: Iterable[float], b: Iterable[float]) -> float:
    """Two-sided two-sample Kolmogorov-Smirnov p-value."""
    a, b = np.asarray(list(a), float), np.asarray(list(b), float)
    if a.size == 0 or b.size == 0:
        return float("nan")
    return float(stats.ks_2samp(a, b).pvalue)


@dataclass(frozen=True)
class DelayMeasurement:
    direction: Direction
    probe_frequency: float
    phase: float  # rad, far end relative to near end
    delay: float  # s
    r_alice: float
    r_bob: float

    @property
    def r_far(self) -> float:
        return self.r_bob if self.direction is Direction.TOWARD_BOB else self.r_alice


def delay_probe(
    config: KljnConfig,
    direction: Direction | str,
    probe_frequency: float | None = None,
    r_alice: float | None = None,
    r_bob: float | None = None,
    lossless: bool = True,
) -> DelayMeasurement:
    """Measure the directional delay with a single injected tone.

    Terminations default to the HL state (Alice R_H, Bob R_L). The tone
    replaces the noise generator at the driving end; the delay is
    ``|far-end phase lag| / (2 pi f)``. The delay law ``L_c / R_far`` holds
    for a lossless cable, so ``R_c`` is dropped unless ``lossless=False``;
    with it, the shunt current through ``R_c`` adds a lag of roughly
    ``R_c C_c R_far / (2 L_c)`` relative.
    """
    direction = Direction.parse(direction)
    f = config.probe_frequency if probe_frequency is None else probe_frequency
    f_min = derive(config.cable).min_wave_frequency
    if not (math.isfinite(f) and 0 < f <= QUASI_STATIC_FRACTION * f_min):
        raise ValidationError(f"probe_frequency: need 0 < f <= {QUASI_STATIC_FRACTION} f_min, got {f!r}")
    r_a = config.r_high if r_alice is None else r_alice
    r_b = config.r_low if r_bob is None else r_bob
    at_alice = direction.drive_end is End.ALICE
    cable = config.cable.lossless() if lossless else config.cable
    resp = sinusoidal_response(cable, r_a, r_b, f, config.sample_rate, drive_at_alice=at_alice)
    near, far = (resp.voltage_alice_end, resp.voltage_bob_end) if at_alice else \
        (resp.voltage_bob_end, resp.voltage_alice_end)
    phase = float(np.angle(far / near))
    if abs(phase) <= 64 * np.finfo(float).eps:
        raise UnmeasurableError(f"far-end phase lag {phase:.3g} rad is below the numeric floor")
    return DelayMeasurement(direction, float(f), phase, abs(phase) / (2.0 * math.pi * f), r_a, r_b)


def time_domain_energy_ratio(
    config: KljnConfig, load_resistance: float | None = None, bit_index: int = 0
) -> float:
    """Electric over magnetic energy of the cable, from a simulated bit period.

    Alice's noise generator drives through ``R_A`` and Bob's end is closed by
    the passive load (both ``R_w`` by default), as in the driven-cable
    picture. Electric energy uses both half-capacitances, magnetic energy the
    series inductance.
    """
    d = derive(config.cable)
    r = d.wave_impedance if load_resistance is None else load_resistance
    seed = _bit_seed(config, bit_index)
    u_a = generate_band_limited_noise(r, config.noise_temperature, config.noise_cutoff,
                                      config.bit_period, config.sample_rate, seed=seed)
    tr = simulate_loop(config.cable, r, r, u_a, np.zeros_like(u_a), config.sample_rate)
    e_el = 0.25 * d.total_capacitance * (np.mean(tr.u_alice_end**2) + np.mean(tr.u_bob_end**2))
    e_mag = 0.5 * d.total_inductance * np.mean(tr.loop_current**2)
    return float(e_el / e_mag)


@dataclass(frozen=True)
class BitExchange:
    index: int
    alice_choice: Choice
    bob_choice: Choice
    alice_decoded_bob: Choice | None  # None: undecided
    bob_decoded_alice: Choice | None
    mean_square_voltage: float  # V^2 at Alice's end
    mean_square_voltage_bob: float  # V^2 at Bob's end
    mean_square_current: float  # A^2
    eve_loop_resistance: float  # ohm
    energy_residual: float

    @property
    def secure(self) -> bool:
        return self.alice_choice is not self.bob_choice

    @property
    def decoded_ok(self) -> bool:
        return self.alice_decoded_bob is self.bob_choice and self.bob_decoded_alice is self.alice_choice

    @property
    def state(self) -> str:
        return self.alice_choice.value + self.bob_choice.value


@dataclass(frozen=True)
class ExchangeReport:
    config: KljnConfig
    exchanges: list[BitExchange]
    legit_error_rate: float
    secure_fraction: float
    eve_hl_lh_pvalue: float
    eve_ll_hh_pvalue: float
    delay_toward_bob: float
    delay_toward_alice: float

    def to_dict(self) -> dict:
        counts = {s: 0 for s in ("LL", "LH", "HL", "HH")}
        for ex in self.exchanges:
            counts[ex.state] += 1
        return {
            "bit_count": len(self.exchanges),
            "rng_seed": self.config.rng_seed,
            "legit_error_rate": self.legit_error_rate,
            "secure_fraction": self.secure_fraction,
            "eve_hl_lh_pvalue": self.eve_hl_lh_pvalue,
            "eve_ll_hh_pvalue": self.eve_ll_hh_pvalue,
            "delay_toward_bob_s": self.delay_toward_bob,
            "delay_toward_alice_s": self.delay_toward_alice,
            "state_counts": counts,
            "max_energy_residual": max((ex.energy_residual for ex in self.exchanges), default=0.0),
            "config": self.config.to_dict(),
        }


def run_bit(config: KljnConfig, index: int, alice: Choice, bob: Choice) -> BitExchange:
    traces = simulate_bit_period(config, alice, bob, index)
    msv_a = float(np.mean(traces.u_alice_end**2))
    msv_b = float(np.mean(traces.u_bob_end**2))
    msc = float(np.mean(traces.loop_current**2))
    return BitExchange(
        index=index,
        alice_choice=alice,
        bob_choice=bob,
        alice_decoded_bob=decode_bit(alice, config.resistance(alice), config, msv_a),
        bob_decoded_alice=decode_bit(bob, config.resistance(bob), config, msv_b),
        mean_square_voltage=msv_a,
        mean_square_voltage_bob=msv_b,
        mean_square_current=msc,
        eve_loop_resistance=eve_loop_statistic(traces, config),
        energy_residual=traces.energy_residual,
    )


def draw_choices(config: KljnConfig) -> list[tuple[Choice, Choice]]:
    rng = np.random.default_rng(_choice_seed(config))
    picks = rng.integers(0, 2, size=(config.bit_count, 2))
    table = (Choice.L, Choice.H)
    return [(table[a], table[b]) for a, b in picks]


def run_exchange(config: KljnConfig) -> ExchangeReport:
    exchanges = [run_bit(config, i, a, b) for i, (a, b) in enumerate(draw_choices(config))]
    by_state: dict[str, list[float]] = {s: [] for s in ("LL", "LH", "HL", "HH")}
    for ex in exchanges:
        by_state[ex.state].append(ex.eve_loop_resistance)
    n = len(exchanges)
    toward_bob = delay_probe(config, Direction.TOWARD_BOB)
    toward_alice = delay_probe(config, Direction.TOWARD_ALICE)
    return ExchangeReport(
        config=config,
        exchanges=exchanges,
        legit_error_rate=sum(not ex.decoded_ok for ex in exchanges) / n,
        secure_fraction=sum(ex.secure for ex in exchanges) / n,
        eve_hl_lh_pvalue=two_sample_pvalue(by_state["HL"], by_state["LH"]),
        eve_ll_hh_pvalue=two_sample_pvalue(by_state["LL"], by_state["HH"]),
        delay_toward_bob=toward_bob.delay,
        delay_toward_alice=toward_alice.delay,
    )


def with_overrides(config: KljnConfig, **changes) -> KljnConfig:
    changes = {k: v for k, v in changes.items() if v is not None}
    return replace(config, **changes) if changes else config
