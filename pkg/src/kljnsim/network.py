"""Steady-state phasor analysis of lumped cable models between two resistors.

The circuit is always the KLJN loop: a generator in series with the resistor
at the driving end, the cable model, and the other resistor shunting the far
cable node to ground. Four cable models are available:

``LOSSLESS_L``  series inductor ``L_c``
``LOSSY_RL``    series ``R_c + j w L_c``
``PI_RLC``      series ``R_c + j w L_c`` with ``C_c/2`` shunts at both ends
``LADDER``      N identical sections, each series ``(R_c + j w L_c)/N``
                followed by a ``C_c/N`` shunt

Phasors are computed by a backward sweep from the far end, which keeps the
tiny cable voltage drop free of cancellation error, and are then verified
against the full nodal equations.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cable import CableSpec, derive
from .constants import SPEED_OF_LIGHT
from .errors import SingularSystemError, UnmeasurableError, ValidationError

NODAL_RESIDUAL_TOL = 1e-12
# |phase| at or below this is indistinguishable from rounding noise
PHASE_FLOOR = 64 * np.finfo(float).eps


class Topology(enum.Enum):
    LOSSLESS_L = "lossless"
    LOSSY_RL = "lossy"
    PI_RLC = "pi"
    LADDER = "ladder"


class End(enum.Enum):
    ALICE = "alice"
    BOB = "bob"

    @property
    def other(self) -> End:
        return End.BOB if self is End.ALICE else End.ALICE


class Direction(enum.Enum):
    """Signal direction; the source sits at the opposite end."""

    TOWARD_BOB = "toward_bob"
    TOWARD_ALICE = "toward_alice"

    @property
    def drive_end(self) -> End:
        return End.ALICE if self is Direction.TOWARD_BOB else End.BOB

    @classmethod
    def parse(cls, text: str | Direction) -> Direction:
        if isinstance(text, Direction):
            return text
        key = str(text).lower().replace("-", "_")
        aliases = {"bob": "toward_bob", "alice": "toward_alice", "ab": "toward_bob",
                   "ba": "toward_alice"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ValidationError(f"direction: expected toward_bob/toward_alice, got {text!r}") from None


@dataclass(frozen=True)
class NetworkModel:
    topology: Topology
    segment_count: int = 1

    def __post_init__(self):
        if self.topology is Topology.LADDER:
            if int(self.segment_count) != self.segment_count or self.segment_count < 1:
                raise ValidationError(f"segment_count: must be an integer >= 1, got {self.segment_count!r}")

    @classmethod
    def lossless(cls) -> NetworkModel:
        return cls(Topology.LOSSLESS_L)

    @classmethod
    def lossy(cls) -> NetworkModel:
        return cls(Topology.LOSSY_RL)

    @classmethod
    def pi(cls) -> NetworkModel:
        return cls(Topology.PI_RLC)

    @classmethod
    def ladder(cls, n: int) -> NetworkModel:
        return cls(Topology.LADDER, n)

    @classmethod
    def parse(cls, text: str) -> NetworkModel:
        """Parse ``lossless``, ``lossy``, ``pi`` or ``ladder:N``."""
        name, _, count = str(text).strip().lower().partition(":")
        try:
            topology = Topology(name)
        except ValueError:
            raise ValidationError(f"model: expected lossless|lossy|pi|ladder:N, got {text!r}") from None
        if topology is Topology.LADDER:
            try:
                n = int(count)
            except ValueError:
                raise ValidationError(f"model: ladder needs a segment count, e.g. ladder:64, got {text!r}") from None
            return cls(topology, n)
        if count:
            raise ValidationError(f"model: {name} takes no segment count")
        return cls(topology)

    def __str__(self) -> str:
        if self.topology is Topology.LADDER:
            return f"ladder:{self.segment_count}"
        return self.topology.value


@dataclass(frozen=True)
class Termination:
    resistance_alice: float
    resistance_bob: float
    drive_end: End = End.ALICE
    drive_amplitude: float = 1.0

    def __post_init__(self):
        for name in ("resistance_alice", "resistance_bob", "drive_amplitude"):
            try:
                object.__setattr__(self, name, float(getattr(self, name)))
            except (TypeError, ValueError):
                raise ValidationError(f"{name}: expected a number, got {getattr(self, name)!r}") from None
        for name in ("resistance_alice", "resistance_bob"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(f"{name}: must be finite and > 0, got {value!r}")
        if not isinstance(self.drive_end, End):
            object.__setattr__(self, "drive_end", End(str(self.drive_end).lower()))
        if not math.isfinite(self.drive_amplitude):
            raise ValidationError("drive_amplitude: must be finite")

    @classmethod
    def matched(cls, cable: CableSpec, **kw) -> Termination:
        r_w = derive(cable).wave_impedance
        return cls(r_w, r_w, **kw)

    def resistance(self, end: End) -> float:
        return self.resistance_alice if end is End.ALICE else self.resistance_bob

    def driven_from(self, end: End) -> Termination:
        return Termination(self.resistance_alice, self.resistance_bob, end, self.drive_amplitude)


@dataclass(frozen=True)
class PhasorSolution:
    """Steady state at one frequency.

    ``loop_current`` is the current in the cable series element adjacent to
    Alice's end, counted positive from Alice toward Bob. For the models
    without shunt capacitance it is the single loop current.
    """

    frequency: float
    voltage_alice_end: complex
    voltage_bob_end: complex
    drop_U_AB: complex
    loop_current: complex
    current_alice_resistor: complex  # from Alice's end node into R_A branch, toward the cable
    current_bob_resistor: complex  # from the cable end into R_B branch, away from the cable
    node_voltages: np.ndarray  # Alice -> Bob
    residual: float


def _elements(model: NetworkModel, cable: CableSpec, frequency: float) -> list[tuple[str, complex]]:
    """Cable elements ordered Alice -> Bob as ('series', Z) / ('shunt', Y)."""
    d = derive(cable)
    w = 2.0 * math.pi * frequency
    top = model.topology
    if top is Topology.LOSSLESS_L:
        return [("series", 1j * w * d.total_inductance)]
    z = complex(d.total_resistance, w * d.total_inductance)
    if top is Topology.LOSSY_RL:
        return [("series", z)]
    y = 1j * w * d.total_capacitance
    if top is Topology.PI_RLC:
        return [("shunt", y / 2), ("series", z), ("shunt", y / 2)]
    n = model.segment_count
    out: list[tuple[str, complex]] = []
    for _ in range(n):
        out.append(("series", z / n))
        out.append(("shunt", y / n))
    return out


def _nodal_residual(elements, r_alice, r_bob, drive_end, amplitude, v) -> float:
    """Normwise relative residual of the nodal equations Y v = i."""
    n_nodes = len(v)
    Y = np.zeros((n_nodes, n_nodes), dtype=complex)
    rhs = np.zeros(n_nodes, dtype=complex)
    Y[0, 0] += 1.0 / r_alice
    Y[-1, -1] += 1.0 / r_bob
    k = 0
    for kind, val in elements:
        if kind == "shunt":
            Y[k, k] += val
        else:
            g = 1.0 / val
            Y[k, k] += g
            Y[k + 1, k + 1] += g
            Y[k, k + 1] -= g
            Y[k + 1, k] -= g
            k += 1
    idx = 0 if drive_end is End.ALICE else -1
    rhs[idx] = amplitude / (r_alice if drive_end is End.ALICE else r_bob)
    r = Y @ v - rhs
    scale = np.linalg.norm(Y, np.inf) * np.linalg.norm(v, np.inf) + np.linalg.norm(rhs, np.inf)
    if scale == 0:
        return 0.0
    return float(np.linalg.norm(r, np.inf) / scale)


def solve_phasor(
    model: NetworkModel, cable: CableSpec, term: Termination, frequency: float
) -> PhasorSolution:
    if not (math.isfinite(frequency) and frequency > 0):
        raise ValidationError(f"frequency: must be finite and > 0, got {frequency!r}")
    elements = _elements(model, cable, frequency)
    drive = term.drive_end
    # work in the drive frame: near = driven end, far = loaded end
    frame = elements if drive is End.ALICE else elements[::-1]
    r_near = term.resistance(drive)
    r_far = term.resistance(drive.other)

    n_series = sum(1 for kind, _ in frame if kind == "series")
    v = np.empty(n_series + 1, dtype=complex)  # drive frame, far node last
    series_current = np.empty(n_series, dtype=complex)  # near -> far
    node = n_series
    v_k = 1.0 + 0j
    i_k = v_k / r_far
    drop = 0j
    v[node] = v_k
    for kind, val in reversed(frame):
        if kind == "shunt":
            i_k = i_k + val * v_k
        else:
            node -= 1
            series_current[node] = i_k
            dv = val * i_k
            drop += dv
            v_k = v_k + dv
            v[node] = v_k
    i_near = i_k
    u_needed = v_k + r_near * i_near
    if u_needed == 0 or not np.isfinite(u_needed):
        raise SingularSystemError("degenerate network: generator sees zero impedance")
    s = term.drive_amplitude / u_needed
    v = v * s
    series_current = series_current * s
    drop = drop * s
    i_near = i_near * s
    i_far = v[-1] / r_far

    if drive is End.ALICE:
        v_nodes = v
        loop_current = series_current[0]
        u_ab = drop
        i_ra, i_rb = i_near, i_far
    else:
        v_nodes = v[::-1]
        loop_current = -series_current[-1]
        u_ab = -drop
        # currents re-expressed in the Alice -> Bob sense
        i_ra, i_rb = -i_far, -i_near

    residual = _nodal_residual(elements, term.resistance_alice, term.resistance_bob,
                               drive, term.drive_amplitude, v_nodes)
    if not residual <= NODAL_RESIDUAL_TOL:
        raise SingularSystemError(f"nodal residual {residual:.3g} exceeds {NODAL_RESIDUAL_TOL}")
    return PhasorSolution(
        frequency=float(frequency),
        voltage_alice_end=complex(v_nodes[0]),
        voltage_bob_end=complex(v_nodes[-1]),
        drop_U_AB=complex(u_ab),
        loop_current=complex(loop_current),
        current_alice_resistor=complex(i_ra),
        current_bob_resistor=complex(i_rb),
        node_voltages=v_nodes,
        residual=residual,
    )


def _warn_if_not_quasi_static(cable: CableSpec, frequency: float) -> None:
    f_min = derive(cable).min_wave_frequency
    if frequency > f_min / 10:
        warnings.warn(
            f"{frequency:g} Hz is above f_min/10 ({f_min / 10:g} Hz); lumped phase results "
            "are outside the quasi-static regime",
            stacklevel=3,
        )


def phase_shift(
    model: NetworkModel,
    cable: CableSpec,
    term: Termination,
    frequency: float,
    direction: Direction | str,
) -> float:
    """Phase (rad) of Bob's end voltage relative to Alice's end voltage.

    The generator is placed according to ``direction``. Toward Bob the
    result is negative (Bob lags, about ``-w L_c / R_B``); toward Alice it is
    positive (about ``+w L_c / R_A``).
    """
    direction = Direction.parse(direction)
    _warn_if_not_quasi_static(cable, frequency)
    sol = solve_phasor(model, cable, term.driven_from(direction.drive_end), frequency)
    return float(np.angle(sol.voltage_bob_end / sol.voltage_alice_end))


def time_delay(cable: CableSpec, term: Termination, direction: Direction | str) -> float:
    """Quasi-static delay ``L_c / R_far`` of the lossless cable."""
    direction = Direction.parse(direction)
    far = direction.drive_end.other
    return derive(cable).total_inductance / term.resistance(far)


def equivalent_phase_velocity(
    model: NetworkModel,
    cable: CableSpec,
    term: Termination,
    frequency: float,
    direction: Direction | str,
) -> float:
    """``2 pi f D / |phase|``: a steady-state phase velocity, not a signal velocity."""
    phi = phase_shift(model, cable, term, frequency, direction)
    if abs(phi) <= PHASE_FLOOR:
        raise UnmeasurableError(f"phase shift {phi:.3g} rad is below the numeric floor")
    return 2.0 * math.pi * frequency * cable.length / abs(phi)


@dataclass(frozen=True)
class PhaseVelocityCell:
    r_ohm: float
    f_hz: float
    v_m_per_s: float

    @property
    def superluminal(self) -> bool:
        # allowed for a driven steady state; it carries no signal
        return self.v_m_per_s > SPEED_OF_LIGHT

    kind = "steady-state phase velocity"


TABLE_RESISTANCES = (10.0, 20.0, 50.0, 1e3, 10e3)
TABLE_FREQUENCIES = (1e3, 5e3)


def phase_velocity_table(
    cable: CableSpec,
    resistances: Sequence[float] = TABLE_RESISTANCES,
    frequencies: Sequence[float] = TABLE_FREQUENCIES,
    model: NetworkModel | None = None,
) -> list[PhaseVelocityCell]:
    """Equivalent phase velocity toward Bob for each load resistance and frequency."""
    model = model or NetworkModel.lossless()
    r_w = derive(cable).wave_impedance
    cells = []
    for r in resistances:
        term = Termination(r_w, float(r))
        for f in frequencies:
            v = equivalent_phase_velocity(model, cable, term, float(f), Direction.TOWARD_BOB)
            cells.append(PhaseVelocityCell(float(r), float(f), v))
    return cells


@dataclass(frozen=True)
class SweepRow:
    freq_hz: float
    mag_uab_v: float
    phase_deg: float
    phase_unwrapped_deg: float


def sweep_frequencies(f_start: float, f_stop: float, points_per_decade: int) -> np.ndarray:
    if not (0 < f_start < f_stop and math.isfinite(f_stop)):
        raise ValidationError(f"sweep range: need 0 < f_start < f_stop, got {f_start!r}, {f_stop!r}")
    if int(points_per_decade) != points_per_decade or points_per_decade < 1:
        raise ValidationError(f"points_per_decade: must be an integer >= 1, got {points_per_decade!r}")
    decades = math.log10(f_stop / f_start)
    n = max(2, int(round(decades * points_per_decade)) + 1)
    return np.logspace(math.log10(f_start), math.log10(f_stop), n)


def ac_sweep(
    model: NetworkModel,
    cable: CableSpec,
    term: Termination,
    f_start: float = 100.0,
    f_stop: float = 10e6,
    points_per_decade: int = 20,
) -> list[SweepRow]:
    """|U_AB| and phase of U_AB relative to Alice's end voltage over a log sweep."""
    freqs = sweep_frequencies(f_start, f_stop, points_per_decade)
    mags, phases = [], []
    for f in freqs:
        sol = solve_phasor(model, cable, term, float(f))
        mags.append(abs(sol.drop_U_AB))
        phases.append(np.angle(sol.drop_U_AB / sol.voltage_alice_end))
    phases = np.asarray(phases)
    unwrapped = np.unwrap(phases)
    return [
        SweepRow(float(f), float(m), float(np.degrees(p)), float(np.degrees(u)))
        for f, m, p, u in zip(freqs, mags, phases, unwrapped)
    ]


def derivative_response_check(
    cable: CableSpec,
    term: Termination,
    waveform: np.ndarray,
    sample_interval: float,
    *,
    significance: float = 1e-9,
) -> float:
    """Normalized RMS distance between U_AB(t) and ``L_c/(R_A+R_B) dU_gen/dt``.

    The waveform is treated as one period of a periodic drive. U_AB(t) is
    obtained by running every significant Fourier component through the
    lossless-inductor network; the reference derivative is the spectral
    derivative of the same waveform.
    """
    u = np.asarray(waveform, dtype=float)
    if u.ndim != 1 or u.size < 4:
        raise ValidationError("waveform: need a 1-D series of at least 4 samples")
    if not (math.isfinite(sample_interval) and sample_interval > 0):
        raise ValidationError("sample_interval: must be finite and > 0")
    n = u.size
    spectrum = np.fft.rfft(u)
    freqs = np.fft.rfftfreq(n, sample_interval)
    # threshold against the whole spectrum so rounding noise around a DC
    # level never counts as signal
    scale = max(float(np.abs(spectrum).max(initial=0.0)), 1e-300)
    significant = np.flatnonzero(np.abs(spectrum[1:]) > significance * scale) + 1
    if significant.size:
        f_low = freqs[significant[0]]
        duration = n * sample_interval
        if duration * f_low < 10 - 1e-9:
            raise ValidationError(
                f"waveform too short: {duration:g} s covers {duration * f_low:.3g} periods of "
                f"its lowest component ({f_low:g} Hz), need >= 10"
            )
        _warn_if_not_quasi_static(cable, float(freqs[significant[-1]]))

    model = NetworkModel.lossless()
    unit = Termination(term.resistance_alice, term.resistance_bob, term.drive_end, 1.0)
    sim = np.zeros_like(spectrum)
    for k in significant:
        sol = solve_phasor(model, cable, unit, float(freqs[k]))
        sim[k] = spectrum[k] * sol.drop_U_AB
    u_ab = np.fft.irfft(sim, n)

    d = derive(cable)
    sign = 1.0 if term.drive_end is End.ALICE else -1.0
    gain = sign * d.total_inductance / (term.resistance_alice + term.resistance_bob)
    deriv_spec = np.zeros_like(spectrum)
    deriv_spec[significant] = 2j * np.pi * freqs[significant] * spectrum[significant]
    if n % 2 == 0:
        deriv_spec[-1] = 0.0  # Nyquist bin has no well-defined derivative
    reference = gain * np.fft.irfft(deriv_spec, n)

    ref_rms = math.sqrt(float(np.mean(reference**2)))
    err_rms = math.sqrt(float(np.mean((u_ab - reference) ** 2)))
    if ref_rms == 0.0:
        return err_rms
    return err_rms / ref_rms
