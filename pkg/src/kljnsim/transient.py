"""Trapezoidal transient integration of the KLJN loop with a pi-RLC cable.

State ``x = [v_a, v_b, i_L]``: the two cable-end node voltages (each node
carries ``C_c/2`` to ground) and the series ``R_c + L_c`` branch current
from Alice toward Bob. Generators ``u_A`` and ``u_B`` sit in series with
``R_A`` and ``R_B``::

    (C/2) v_a' = (u_A - v_a)/R_A - i_L
    (C/2) v_b' = i_L - (v_b - u_B)/R_B
     L    i_L' = v_a - v_b - R_c i_L

The trapezoidal rule is A-stable, so the nanosecond cable time constants do
not force a nanosecond step. It also conserves a discrete energy balance
exactly, which is checked after every run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .cable import CableSpec, derive
from .errors import IntegrationError, ValidationError

ENERGY_RESIDUAL_TOL = 1e-6


@dataclass(frozen=True)
class Traces:
    sample_rate: float
    u_alice_end: np.ndarray  # V
    u_bob_end: np.ndarray  # V
    loop_current: np.ndarray  # A, Alice -> Bob
    energy_residual: float

    @property
    def duration(self) -> float:
        return len(self.u_alice_end) / self.sample_rate

    @property
    def drop_U_AB(self) -> np.ndarray:
        return self.u_alice_end - self.u_bob_end


def state_matrices(cable: CableSpec, r_alice: float, r_bob: float) -> tuple[np.ndarray, np.ndarray]:
    d = derive(cable)
    ch = d.total_capacitance / 2.0
    l_c, r_c = d.total_inductance, d.total_resistance
    a = np.array(
        [
            [-1.0 / (r_alice * ch), 0.0, -1.0 / ch],
            [0.0, -1.0 / (r_bob * ch), 1.0 / ch],
            [1.0 / l_c, -1.0 / l_c, -r_c / l_c],
        ]
    )
    b = np.array([[1.0 / (r_alice * ch), 0.0], [0.0, 1.0 / (r_bob * ch)], [0.0, 0.0]])
    return a, b


def trapezoid_matrices(a: np.ndarray, b: np.ndarray, step: float) -> tuple[np.ndarray, np.ndarray]:
    """``x[n+1] = M x[n] + N (u[n] + u[n+1])``."""
    eye = np.eye(a.shape[0])
    lhs = eye - 0.5 * step * a
    m = np.linalg.solve(lhs, eye + 0.5 * step * a)
    n = np.linalg.solve(lhs, 0.5 * step * b)
    return m, n


@numba.njit(cache=True)
def _step_all(m, n, u, x0):  # pragma: no cover - compiled
    steps = u.shape[0]
    dim = x0.shape[0]
    x = np.empty((steps, dim))
    for j in range(dim):
        x[0, j] = x0[j]
    for k in range(steps - 1):
        w0 = u[k, 0] + u[k + 1, 0]
        w1 = u[k, 1] + u[k + 1, 1]
        for j in range(dim):
            acc = n[j, 0] * w0 + n[j, 1] * w1
            for q in range(dim):
                acc += m[j, q] * x[k, q]
            x[k + 1, j] = acc
    return x


def energy_residual(
    cable: CableSpec,
    r_alice: float,
    r_bob: float,
    u_alice: np.ndarray,
    u_bob: np.ndarray,
    x: np.ndarray,
    step: float,
) -> float:
    """Discrete energy-balance mismatch relative to the energy throughput.

    With step-averaged quantities, ``Delta(stored) = h (p_gen - p_diss)``
    holds exactly for the trapezoidal rule, so anything left over is
    rounding or a broken integrator.
    """
    d = derive(cable)
    ch = d.total_capacitance / 2.0
    va, vb, il = x[:, 0], x[:, 1], x[:, 2]
    stored = 0.5 * ch * (va**2 + vb**2) + 0.5 * d.total_inductance * il**2

    def avg(y):
        return 0.5 * (y[1:] + y[:-1])

    ua, ub = avg(u_alice), avg(u_bob)
    ia = (ua - avg(va)) / r_alice  # generator A -> node a
    ib = (ub - avg(vb)) / r_bob  # generator B -> node b
    il_avg = avg(il)
    p_gen = ua * ia + ub * ib
    p_diss = r_alice * ia**2 + r_bob * ib**2 + d.total_resistance * il_avg**2
    mismatch = np.diff(stored) - step * (p_gen - p_diss)
    throughput = step * float(np.sum(np.abs(p_gen))) + float(np.max(stored, initial=0.0))
    if throughput == 0.0:
        return 0.0
    return float(np.max(np.abs(np.cumsum(mismatch)), initial=0.0) / throughput)


def simulate_loop(
    cable: CableSpec,
    r_alice: float,
    r_bob: float,
    u_alice: np.ndarray,
    u_bob: np.ndarray,
    sample_rate: float,
    x0: np.ndarray | None = None,
) -> Traces:
    """Integrate the loop for sampled generator voltages.

    Without ``x0`` the state starts at the DC solution for the first sample.
    """
    u_alice = np.asarray(u_alice, dtype=float)
    u_bob = np.asarray(u_bob, dtype=float)
    if u_alice.shape != u_bob.shape or u_alice.ndim != 1 or u_alice.size < 2:
        raise ValidationError("generator series must be 1-D, equal length, >= 2 samples")
    if not (math.isfinite(sample_rate) and sample_rate > 0):
        raise ValidationError("sample_rate: must be finite and > 0")
    for name, r in (("r_alice", r_alice), ("r_bob", r_bob)):
        if not (math.isfinite(r) and r > 0):
            raise ValidationError(f"{name}: must be finite and > 0, got {r!r}")
    step = 1.0 / sample_rate
    a, b = state_matrices(cable, r_alice, r_bob)
    m, n = trapezoid_matrices(a, b, step)
    radius = float(np.max(np.abs(np.linalg.eigvals(m))))
    if not radius <= 1.0 + 1e-12:
        raise IntegrationError(f"trapezoidal step unstable: spectral radius {radius:.6g}")
    u = np.ascontiguousarray(np.column_stack([u_alice, u_bob]))
    if x0 is None:
        # start on the DC operating point; a zero state would ring at Nyquist
        x0 = np.linalg.solve(a, -b @ u[0])
    x0 = np.asarray(x0, dtype=float)
    x = _step_all(m, n, u, x0)
    if not np.all(np.isfinite(x)):
        raise IntegrationError("non-finite state during integration")
    resid = energy_residual(cable, r_alice, r_bob, u_alice, u_bob, x, step)
    if not resid <= ENERGY_RESIDUAL_TOL:
        raise IntegrationError(f"energy residual {resid:.3g} exceeds {ENERGY_RESIDUAL_TOL}")
    return Traces(float(sample_rate), x[:, 0].copy(), x[:, 1].copy(), x[:, 2].copy(), resid)


@dataclass(frozen=True)
class SinusoidalResponse:
    frequency: float
    voltage_alice_end: complex
    voltage_bob_end: complex
    loop_current: complex
    drop_U_AB: complex
    traces: Traces


def _fit_phasor(t: np.ndarray, y: np.ndarray, omega: float) -> complex:
    """Least-squares ``Re{P exp(j w t)}``; a (-1)^n column absorbs trapezoidal ringing."""
    alt = np.where(np.arange(len(t)) % 2 == 0, 1.0, -1.0)
    design = np.column_stack([np.cos(omega * t), -np.sin(omega * t), alt, np.ones_like(t)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    return complex(coef[0], coef[1])


def sinusoidal_response(
    cable: CableSpec,
    r_alice: float,
    r_bob: float,
    frequency: float,
    sample_rate: float,
    drive_at_alice: bool = True,
    amplitude: float = 1.0,
    settle_periods: int = 10,
    measure_periods: int = 10,
) -> SinusoidalResponse:
    """Drive one end with a sine and extract steady-state phasors.

    The tone is faded in with a raised-cosine envelope over the first half of
    the settling time, so the stiff cable modes start near their quasi-static
    solution. Phasors refer to ``amplitude * cos(w t)`` at the generator.
    """
    if not (math.isfinite(frequency) and 0 < frequency < sample_rate / 4):
        raise ValidationError(f"frequency: need 0 < f < sample_rate/4, got {frequency!r}")
    per_period = sample_rate / frequency
    n_settle = int(math.ceil(settle_periods * per_period))
    n_measure = int(math.ceil(measure_periods * per_period))
    t = np.arange(n_settle + n_measure) / sample_rate
    omega = 2.0 * math.pi * frequency
    ramp_len = max(n_settle // 2, 1)
    envelope = np.ones_like(t)
    envelope[:ramp_len] = 0.5 * (1.0 - np.cos(np.pi * np.arange(ramp_len) / ramp_len))
    drive = amplitude * envelope * np.cos(omega * t)
    zeros = np.zeros_like(drive)
    u_a, u_b = (drive, zeros) if drive_at_alice else (zeros, drive)
    traces = simulate_loop(cable, r_alice, r_bob, u_a, u_b, sample_rate)
    tm = t[n_settle:]
    va = _fit_phasor(tm, traces.u_alice_end[n_settle:], omega)
    vb = _fit_phasor(tm, traces.u_bob_end[n_settle:], omega)
    il = _fit_phasor(tm, traces.loop_current[n_settle:], omega)
    uab = _fit_phasor(tm, traces.drop_U_AB[n_settle:], omega)
    return SinusoidalResponse(float(frequency), va, vb, il, uab, traces)
