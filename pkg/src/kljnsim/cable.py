"""Cable parameters, derived line constants and quasi-static admissibility.

All quantities are strict SI. A cable is described by its per-unit-length
inductance, capacitance and series resistance plus its physical length;
everything else (total L/C/R, wave velocity, wave impedance, lowest wave-mode
frequency) is derived from those four numbers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import ValidationError

DEFAULT_MARGIN = 0.01


def _check_finite(name: str, value: float) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{name}: expected a number, got {value!r}") from None
    if not math.isfinite(value):
        raise ValidationError(f"{name}: must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class CableSpec:
    inductance_per_meter: float  # H/m
    capacitance_per_meter: float  # F/m
    resistance_per_meter: float  # ohm/m, 0 for a lossless cable
    length: float  # m

    def __post_init__(self):
        for name in ("inductance_per_meter", "capacitance_per_meter", "length"):
            value = _check_finite(name, getattr(self, name))
            if value <= 0:
                raise ValidationError(f"{name}: must be > 0, got {value!r}")
            object.__setattr__(self, name, value)
        r = _check_finite("resistance_per_meter", self.resistance_per_meter)
        if r < 0:
            raise ValidationError(f"resistance_per_meter: must be >= 0, got {r!r}")
        object.__setattr__(self, "resistance_per_meter", r)

    @property
    def is_lossless(self) -> bool:
        return self.resistance_per_meter == 0.0

    def lossless(self) -> CableSpec:
        return replace(self, resistance_per_meter=0.0)

    def with_length(self, length: float) -> CableSpec:
        return replace(self, length=length)

    @classmethod
    def from_dict(cls, data: dict) -> CableSpec:
        """Build from the JSON layout ``{l_per_m, c_per_m, r_per_m, length_m}``.

        ``r_per_m`` may be omitted (lossless).
        """
        if not isinstance(data, dict):
            raise ValidationError("cable: expected a JSON object")
        missing = [k for k in ("l_per_m", "c_per_m", "length_m") if k not in data]
        if missing:
            raise ValidationError(f"cable: missing keys {', '.join(missing)}")
        unknown = set(data) - {"l_per_m", "c_per_m", "r_per_m", "length_m"}
        if unknown:
            raise ValidationError(f"cable: unknown keys {', '.join(sorted(unknown))}")
        return cls(
            inductance_per_meter=data["l_per_m"],
            capacitance_per_meter=data["c_per_m"],
            resistance_per_meter=data.get("r_per_m", 0.0),
            length=data["length_m"],
        )

    def to_dict(self) -> dict:
        return {
            "l_per_m": self.inductance_per_meter,
            "c_per_m": self.capacitance_per_meter,
            "r_per_m": self.resistance_per_meter,
            "length_m": self.length,
        }

    @classmethod
    def from_json(cls, path: str | Path) -> CableSpec:
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"cable file {path}: {exc}") from None
        return cls.from_dict(data)


# 1.5 m RG58-like coax. L_c = 0.375 uH is the value consistent with R_w = 50 ohm
# and C_c = 150 pF; the 1.03 uH sometimes quoted for this cable is not.
PRESETS: dict[str, CableSpec] = {
    "rg58-1m5": CableSpec(
        inductance_per_meter=250e-9,
        capacitance_per_meter=100e-12,
        resistance_per_meter=0.021,
        length=1.5,
    ),
}


def preset(name: str) -> CableSpec:
    try:
        return PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        raise ValidationError(f"unknown cable preset {name!r} (known: {known})") from None


def reference_cable() -> CableSpec:
    return PRESETS["rg58-1m5"]


@dataclass(frozen=True)
class CableDerived:
    total_inductance: float  # H
    total_capacitance: float  # F
    total_resistance: float  # ohm
    wave_velocity: float  # m/s
    wave_impedance: float  # ohm
    min_wave_frequency: float  # Hz

    def to_dict(self) -> dict:
        return {
            "total_inductance_h": self.total_inductance,
            "total_capacitance_f": self.total_capacitance,
            "total_resistance_ohm": self.total_resistance,
            "wave_velocity_m_per_s": self.wave_velocity,
            "wave_impedance_ohm": self.wave_impedance,
            "f_min_hz": self.min_wave_frequency,
        }


def derive(spec: CableSpec) -> CableDerived:
    l_u, c_u, d = spec.inductance_per_meter, spec.capacitance_per_meter, spec.length
    v_c = 1.0 / math.sqrt(l_u * c_u)
    return CableDerived(
        total_inductance=d * l_u,
        total_capacitance=d * c_u,
        total_resistance=d * spec.resistance_per_meter,
        wave_velocity=v_c,
        wave_impedance=math.sqrt(l_u / c_u),
        min_wave_frequency=v_c / (2.0 * d),
    )


@dataclass(frozen=True)
class QuasiStaticVerdict:
    admissible: bool
    ratio: float  # f / f_min
    margin: float

    @property
    def label(self) -> str:
        return "admissible" if self.admissible else "forbidden-for-KLJN"


def quasi_static_verdict(
    spec: CableSpec, frequency: float, margin: float = DEFAULT_MARGIN
) -> QuasiStaticVerdict:
    """Is ``frequency`` deep enough below f_min to treat the cable as lumped?

    Admissible iff ``frequency <= margin * f_min``.
    """
    frequency = _check_finite("frequency", frequency)
    margin = _check_finite("margin", margin)
    if frequency < 0:
        raise ValidationError(f"frequency: must be >= 0, got {frequency!r}")
    if not 0.0 < margin < 1.0:
        raise ValidationError(f"margin: must lie in (0, 1), got {margin!r}")
    f_min = derive(spec).min_wave_frequency
    return QuasiStaticVerdict(
        admissible=frequency <= margin * f_min, ratio=frequency / f_min, margin=margin
    )


def mode_frequencies(spec: CableSpec, n_max: int) -> list[float]:
    """Allowed standing-wave frequencies ``n * v_c / (2 D)`` for n = 1..n_max."""
    if int(n_max) != n_max or n_max < 1:
        raise ValidationError(f"n_max: must be an integer >= 1, got {n_max!r}")
    f_min = derive(spec).min_wave_frequency
    return [n * f_min for n in range(1, int(n_max) + 1)]


def cable_series_impedance(
    spec: CableSpec, frequency: float, include_loss: bool = True
) -> complex:
    """First-order cable impedance ``R_c + j 2 pi f L_c`` (``R_c`` dropped if lossless)."""
    frequency = _check_finite("frequency", frequency)
    if frequency < 0:
        raise ValidationError(f"frequency: must be >= 0, got {frequency!r}")
    d = derive(spec)
    r = d.total_resistance if include_loss else 0.0
    return complex(r, 2.0 * math.pi * frequency * d.total_inductance)
