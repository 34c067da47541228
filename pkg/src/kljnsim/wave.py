"""Exact lossless telegrapher solution of the finite line.

Used as ground truth for the lumped models: the chain (ABCD) matrix of a
lossless line of electrical length ``theta = 2 pi f D / v_c`` is

    [[cos theta,          j R_w sin theta],
     [j sin theta / R_w,  cos theta      ]]

relating ``(V, I)`` at the input to ``(V, I)`` at the output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize

from .cable import CableSpec, derive
from .errors import ValidationError
from .network import End, Termination

BISECT_RTOL = 1e-9


@dataclass(frozen=True)
class LineTwoPort:
    frequency: float
    electrical_length: float  # rad
    chain_matrix: np.ndarray  # 2x2 complex

    @property
    def determinant(self) -> complex:
        m = self.chain_matrix
        return complex(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def _require_lossless(cable: CableSpec) -> None:
    if not cable.is_lossless:
        raise ValidationError(
            "the exact line oracle is lossless only; pass cable.lossless() explicitly"
        )


def electrical_length(cable: CableSpec, frequency: float) -> float:
    d = derive(cable)
    return 2.0 * math.pi * frequency * cable.length / d.wave_velocity


def line_two_port(cable: CableSpec, frequency: float) -> LineTwoPort:
    _require_lossless(cable)
    if not (math.isfinite(frequency) and frequency > 0):
        raise ValidationError(f"frequency: must be finite and > 0, got {frequency!r}")
    r_w = derive(cable).wave_impedance
    theta = electrical_length(cable, frequency)
    c, s = math.cos(theta), math.sin(theta)
    m = np.array([[c, 1j * r_w * s], [1j * s / r_w, c]], dtype=complex)
    return LineTwoPort(float(frequency), theta, m)


def input_impedance(cable: CableSpec, load: float | complex, frequency: float) -> complex:
    """Impedance seen into the line when the far end is closed by ``load``.

    ``load`` may be ``0`` (short) or ``math.inf`` (open).
    """
    m = line_two_port(cable, frequency).chain_matrix
    (a, b), (c, d) = m
    if isinstance(load, (int, float)) and math.isinf(load):
        return complex(a / c)
    return complex((a * load + b) / (c * load + d))


def exact_end_voltages(cable: CableSpec, term: Termination, frequency: float) -> tuple[complex, complex]:
    """(V_alice, V_bob) for the generator of ``term`` driving through its resistor."""
    m = line_two_port(cable, frequency).chain_matrix
    (a, b), (c, d) = m
    drive = term.drive_end
    r_near = term.resistance(drive)
    r_far = term.resistance(drive.other)
    # symmetric line: the same chain matrix holds in either direction
    i_far = 1.0 / r_far
    v_near = a + b * i_far
    i_near = c + d * i_far
    scale = term.drive_amplitude / (v_near + r_near * i_near)
    v_near, v_far = v_near * scale, scale
    if drive is End.ALICE:
        return complex(v_near), complex(v_far)
    return complex(v_far), complex(v_near)


def exact_transfer(cable: CableSpec, term: Termination, frequency: float) -> complex:
    """Far-end over near-end voltage, standing waves included.

    Near/far follow ``term.drive_end``.
    """
    m = line_two_port(cable, frequency).chain_matrix
    (a, b), _ = m
    r_far = term.resistance(term.drive_end.other)
    return complex(r_far / (a * r_far + b))


def dalembert_field(
    u_plus: Callable[[np.ndarray], np.ndarray],
    u_minus: Callable[[np.ndarray], np.ndarray],
    position,
    time,
    velocity: float,
):
    """Superposition of a right-moving and a left-moving waveform.

    Evaluates ``u_plus(t - x/v) + u_minus(t + x/v)``. This is the model the
    directional-delay results contradict; it is kept here so that contradiction
    can be tested explicitly.
    """
    if not (math.isfinite(velocity) and velocity > 0):
        raise ValidationError(f"velocity: must be finite and > 0, got {velocity!r}")
    x = np.asarray(position, dtype=float)
    t = np.asarray(time, dtype=float)
    out = u_plus(t - x / velocity) + u_minus(t + x / velocity)
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class SingleVelocityFit:
    velocity: float
    residual: float  # worst-case delay mismatch, s


def single_velocity_fit(length: float, tau_ab: float, tau_ba: float) -> SingleVelocityFit:
    """Best single propagation velocity for two directional delays.

    One velocity predicts one delay ``D/v`` for both directions; the minimax
    choice is the mean delay, leaving ``|tau_ab - tau_ba| / 2`` unexplained.
    """
    if tau_ab <= 0 or tau_ba <= 0:
        raise ValidationError("delays must be > 0")
    tau = 0.5 * (tau_ab + tau_ba)
    return SingleVelocityFit(length / tau, max(abs(tau_ab - tau), abs(tau_ba - tau)))


@dataclass(frozen=True)
class ForbiddenBandReport:
    f_c: float
    f_min: float
    ratio: float
    mode_count_below_f_c: int

    @property
    def compliant(self) -> bool:
        return self.mode_count_below_f_c == 0

    def to_dict(self) -> dict:
        return {
            "f_c_hz": self.f_c,
            "f_min_hz": self.f_min,
            "ratio": self.ratio,
            "mode_count_below_f_c": self.mode_count_below_f_c,
            "compliant": self.compliant,
        }


def forbidden_band_report(cable: CableSpec, f_c: float) -> ForbiddenBandReport:
    if not (math.isfinite(f_c) and f_c > 0):
        raise ValidationError(f"f_c: must be finite and > 0, got {f_c!r}")
    f_min = derive(cable).min_wave_frequency
    return ForbiddenBandReport(float(f_c), f_min, f_c / f_min, int(math.floor(f_c / f_min)))


def shorted_line_resonances(
    cable: CableSpec, n_max: int, points_per_mode: int = 64
) -> list[float]:
    """Frequencies where the shorted line's input reactance returns to zero.

    Scans ``Im Z_in`` of the shorted line for upward sign changes (the
    reactance also flips sign at its poles, but downward) and refines each
    bracket by bisection.
    """
    if n_max < 1:
        raise ValidationError("n_max: must be >= 1")
    cable = cable.lossless() if not cable.is_lossless else cable
    f_min = derive(cable).min_wave_frequency

    def reactance(f: float) -> float:
        return input_impedance(cable, 0.0, f).imag

    grid = np.linspace(f_min / points_per_mode, (n_max + 0.5) * f_min, int((n_max + 0.5) * points_per_mode))
    values = np.array([reactance(f) for f in grid])
    roots = []
    for k in range(len(grid) - 1):
        lo, hi = values[k], values[k + 1]
        if lo < 0.0 <= hi:
            root = optimize.bisect(reactance, grid[k], grid[k + 1], xtol=1e-300, rtol=BISECT_RTOL)
            roots.append(float(root))
    return roots[:n_max]
