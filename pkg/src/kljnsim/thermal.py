"""Thermal (Johnson-Nyquist) energy budget of a short cable.

With both terminations at temperature T and their noise cut off at ``f_c``,
the voltage across the cable capacitance has a Lorentzian one-sided spectrum
``4 k T R_par / (1 + (f/f_0C)^2)`` and the loop current one of
``4 k T / R_sum / (1 + (f/f_0L)^2)``, where ``R_par`` and ``R_sum`` are the
parallel and series combinations of the two terminations. The stored
energies are compared with the kT/2 each quadratic degree of freedom of a
single wave mode would hold.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .cable import CableSpec, derive
from .constants import BOLTZMANN, PLANCK, SPEED_OF_LIGHT
from .errors import QuadratureError, ValidationError
from .network import Termination


class Method(enum.Enum):
    CLOSED_FORM = "closed_form"
    NUMERIC_INTEGRAL = "numeric_integral"


@dataclass(frozen=True)
class ThermalConfig:
    temperature: float  # K
    noise_cutoff: float  # Hz
    termination: Termination | None = None  # None: both ends closed by R_w

    def __post_init__(self):
        for name in ("temperature", "noise_cutoff"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValidationError(f"{name}: must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class EnergyBudget:
    electric_energy: float  # J
    magnetic_energy: float  # J
    per_mode_quota: float  # J, kT/2
    corner_electric: float  # Hz
    corner_magnetic: float  # Hz
    method: Method
    # flat-spectrum (f_c << corner) approximations, for comparison only
    electric_linear_approx: float
    magnetic_linear_approx: float

    @property
    def deficit_electric(self) -> float:
        return self.electric_energy / self.per_mode_quota

    @property
    def deficit_magnetic(self) -> float:
        return self.magnetic_energy / self.per_mode_quota

    def to_dict(self) -> dict:
        return {
            "e_e_j": self.electric_energy,
            "e_m_j": self.magnetic_energy,
            "quota_j": self.per_mode_quota,
            "deficit_e": self.deficit_electric,
            "deficit_m": self.deficit_magnetic,
            "f0c_hz": self.corner_electric,
            "f0l_hz": self.corner_magnetic,
            "method": self.method.value,
        }


def _resistances(cable: CableSpec, term: Termination | None) -> tuple[float, float]:
    if term is None:
        r_w = derive(cable).wave_impedance
        return r_w, r_w
    return term.resistance_alice, term.resistance_bob


def _combine(cable: CableSpec, term: Termination | None) -> tuple[float, float]:
    r_a, r_b = _resistances(cable, term)
    if term is None:
        # exact halves / doubles keep the matched corners bit-symmetric
        return r_a / 2.0, 2.0 * r_a
    return r_a * r_b / (r_a + r_b), r_a + r_b


def corner_frequencies(cable: CableSpec, term: Termination | None = None) -> tuple[float, float]:
    """Lorentzian corners ``(f_0C, f_0L)``; ``term=None`` means matched ends.

    ``f_0C = 1 / (2 pi C_c R_par)`` and ``f_0L = R_sum / (2 pi L_c)``. For
    matched ends both equal ``(2/pi) f_min``.
    """
    d = derive(cable)
    r_par, r_sum = _combine(cable, term)
    f0c = 1.0 / (2.0 * math.pi * d.total_capacitance * r_par)
    f0l = r_sum / (2.0 * math.pi * d.total_inductance)
    return f0c, f0l


def _lorentzian_integral(level: float, corner: float, f_c: float, method: Method) -> float:
    """Integral of ``level / (1 + (f/corner)^2)`` over [0, f_c]."""
    if method is Method.CLOSED_FORM:
        return level * corner * math.atan(f_c / corner)
    # integrate in units of the corner, piecewise per decade: a single quad
    # call over a span of many decades stalls on the long tail
    upper = f_c / corner
    edges = [0.0, min(upper, 1.0)]
    while edges[-1] < upper:
        edges.append(min(edges[-1] * 10.0, upper))
    value = abserr = 0.0
    for lo, hi in zip(edges, edges[1:]):
        part, err = integrate.quad(lambda x: 1.0 / (1.0 + x * x), lo, hi,
                                   epsabs=0.0, epsrel=1e-13, limit=200)
        value += part
        abserr += err
    if abserr > 1e-11 * abs(value):
        raise QuadratureError(
            f"Lorentzian integral did not converge (estimate {value:.6g}, error {abserr:.3g})"
        )
    return level * corner * value


def thermal_energies(
    cable: CableSpec,
    config: ThermalConfig,
    method: Method | str = Method.CLOSED_FORM,
) -> EnergyBudget:
    method = Method(method) if not isinstance(method, Method) else method
    d = derive(cable)
    kt = BOLTZMANN * config.temperature
    r_par, r_sum = _combine(cable, config.termination)
    f0c, f0l = corner_frequencies(cable, config.termination)
    f_c = config.noise_cutoff

    mean_u2 = _lorentzian_integral(4.0 * kt * r_par, f0c, f_c, method)
    mean_i2 = _lorentzian_integral(4.0 * kt / r_sum, f0l, f_c, method)
    return EnergyBudget(
        electric_energy=0.5 * d.total_capacitance * mean_u2,
        magnetic_energy=0.5 * d.total_inductance * mean_i2,
        per_mode_quota=0.5 * kt,
        corner_electric=f0c,
        corner_magnetic=f0l,
        method=method,
        electric_linear_approx=0.5 * d.total_capacitance * 4.0 * kt * r_par * f_c,
        magnetic_linear_approx=0.5 * d.total_inductance * 4.0 * kt / r_sum * f_c,
    )


def equipartition_deficit(budget: EnergyBudget) -> tuple[float, float]:
    """Each thermal energy as a fraction of the kT/2 a wave mode would carry."""
    return budget.deficit_electric, budget.deficit_magnetic


def matched_linear_approximation(cable: CableSpec, temperature: float, f_c: float) -> float:
    """``(kT/2) (f_c / f_min)``, the flat-spectrum estimate for matched ends."""
    return 0.5 * BOLTZMANN * temperature * f_c / derive(cable).min_wave_frequency


def instantaneous_energy_ratio(cable: CableSpec, load_resistance: float) -> float:
    """Electric over magnetic stored energy, ``(C_c / L_c) R_load^2``.

    Written as ``(R_load / R_w)^2`` so a matched load gives exactly 1.
    """
    if not (math.isfinite(load_resistance) and load_resistance >= 0):
        raise ValidationError(f"load_resistance: must be finite and >= 0, got {load_resistance!r}")
    return (load_resistance / derive(cable).wave_impedance) ** 2


def planck_intensity(frequency, temperature: float):
    """Spectral intensity per polarization, W m^-2 Hz^-1.

    ``4 pi h f^3 / c^2 / (exp(h f / k T) - 1)``, evaluated without overflow
    for large ``h f / k T`` and without cancellation for small.
    """
    f = np.asarray(frequency, dtype=float)
    if np.any(~(f > 0)) or not (math.isfinite(temperature) and temperature > 0):
        raise ValidationError("frequency and temperature must be > 0")
    x = PLANCK * f / (BOLTZMANN * temperature)
    prefactor = 4.0 * math.pi * PLANCK * f**3 / SPEED_OF_LIGHT**2
    with np.errstate(over="ignore"):
        small = prefactor / np.expm1(np.minimum(x, 1.0))
        large = prefactor * np.exp(-x) / -np.expm1(-np.maximum(x, 1.0))
    out = np.where(x < 1.0, small, large)
    return out if out.ndim else float(out)
