"""Cost-of-transport arithmetic, power estimation, and measured-log ingestion.

The cost of transport used throughout is COT = P / (m * v) with power in
watts, mass in kilograms and speed in m/s. Note the convention: there is
no gravitational normalization (the common nondimensional form divides
by m*g*v); the bundled reference measurements only reproduce under this
convention, so it is applied verbatim and documented here.

The robot's mass is not directly known; the default below is derived by
inverting COT = P/(m*v) at the best design's measured operating point
(9.33 W, 0.163181 m/s, COT 95) and is flagged as derived wherever it
appears.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError

# Measured electrical operating points of the physical robot.
P_IDLE_W = 0.48
P_ACTUATION_FULL_W = 9.33
BATTERY_WH = 1.85

# Derived, not measured: mass from inverting COT = P/(m*v).
DERIVED_MASS_KG = 0.6022

DEFAULT_F_REF_HZ = 1.5
DEFAULT_AMPLITUDE_REF_M = 0.008

POWER_CSV_HEADER = ("t_s", "voltage_v", "current_a")
TRACK_CSV_HEADER = ("t_s", "x_m")


@dataclass(frozen=True)
class PowerModel:
    """Interpolates electrical power between the idle and full-actuation
    operating points: P = p_idle + (p_full - p_idle) * (A/A_ref)**exponent * (f/f_ref)."""

    p_idle: float = P_IDLE_W
    p_actuation_full: float = P_ACTUATION_FULL_W
    amplitude_ref: float = DEFAULT_AMPLITUDE_REF_M
    exponent: float = 2.0

    def __post_init__(self):
        if self.p_idle < 0:
            raise ValidationError("idle power cannot be negative")
        if self.p_actuation_full <= self.p_idle:
            raise ValidationError("full-actuation power must exceed idle power")
        if self.amplitude_ref <= 0:
            raise ValidationError("amplitude_ref must be positive")

    def to_dict(self) -> dict:
        return {
            "p_idle_w": self.p_idle,
            "p_actuation_full_w": self.p_actuation_full,
            "amplitude_ref_m": self.amplitude_ref,
            "exponent": self.exponent,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PowerModel":
        try:
            return cls(
                p_idle=float(d["p_idle_w"]),
                p_actuation_full=float(d["p_actuation_full_w"]),
                amplitude_ref=float(d["amplitude_ref_m"]),
                exponent=float(d["exponent"]),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationError(f"bad power model document: {e}") from e


@dataclass(frozen=True)
class SwimResult:
    """One design's swim metrics. Speeds in m/s and body-lengths/s."""

    speed: float
    speed_bl: float
    power: float
    mass: float
    cot: float
    body_length: float

    _CONSISTENCY_RTOL = 0.01  # printed reference values are rounded

    def __post_init__(self):
        if self.speed < 0:
            raise ValidationError("speed cannot be negative")
        if self.mass <= 0 or self.body_length <= 0:
            raise ValidationError("mass and body_length must be positive")
        if self.speed > 0:
            if abs(self.cot * self.mass * self.speed - self.power) > self._CONSISTENCY_RTOL * self.power:
                raise ValidationError("cot, power, mass and speed are inconsistent")
            if abs(self.speed_bl * self.body_length - self.speed) > self._CONSISTENCY_RTOL * self.speed:
                raise ValidationError("speed_bl and speed are inconsistent")

    @classmethod
    def from_power(
        cls, speed: float, power: float, mass: float, body_length: float
    ) -> "SwimResult":
        if speed <= 0:
            raise ValidationError("cost of transport is undefined at zero speed")
        return cls(
            speed=speed,
            speed_bl=speed_bl(speed, body_length),
            power=power,
            mass=mass,
            cot=cot(power, mass, speed),
            body_length=body_length,
        )

    def to_dict(self) -> dict:
        return {
            "speed_mm_s": self.speed * 1000.0,
            "speed_bl_s": self.speed_bl,
            "power_w": self.power,
            "mass_kg": self.mass,
            "cot": self.cot,
            "body_length_m": self.body_length,
        }


@dataclass(frozen=True)
class MeasurementLog:
    """Electrical samples (t, V, I) and/or tracked positions (t, x)."""

    samples: tuple[tuple[float, float, float], ...] = ()
    track: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        for name, rows in (("samples", self.samples), ("track", self.track)):
            times = [r[0] for r in rows]
            if any(b <= a for a, b in zip(times, times[1:])):
                raise ValidationError(f"{name} times must be strictly increasing")


def cot(power: float, mass: float, speed: float) -> float:
    """Cost of transport P/(m*v); undefined at zero speed."""
    if mass <= 0:
        raise ValidationError("mass must be positive")
    if speed <= 0:
        raise ValidationError("cost of transport is undefined for speed <= 0")
    return power / (mass * speed)


def speed_bl(speed: float, body_length: float) -> float:
    """Speed in body lengths per second."""
    if body_length <= 0:
        raise ValidationError("body_length must be positive")
    return speed / body_length


def runtime_hours(battery_wh: float, power_w: float) -> float:
    """Runtime on a battery of the given capacity."""
    if power_w <= 0:
        raise ValidationError("power must be positive")
    return battery_wh / power_w


def predict_power(
    model: PowerModel, amplitude: float, frequency: float, f_ref: float = DEFAULT_F_REF_HZ
) -> float:
    """Electrical power estimate for an actuation setting, W."""
    if amplitude < 0 or frequency < 0:
        raise ValidationError("amplitude and frequency cannot be negative")
    if f_ref <= 0:
        raise ValidationError("f_ref must be positive")
    span = model.p_actuation_full - model.p_idle
    return model.p_idle + span * (amplitude / model.amplitude_ref) ** model.exponent * (
        frequency / f_ref
    )


def average_power(log: MeasurementLog) -> float:
    """Time-weighted mean electrical power of a measured log, W."""
    if len(log.samples) < 2:
        raise ValidationError("need at least 2 electrical samples")
    t = np.array([s[0] for s in log.samples])
    p = np.array([s[1] * s[2] for s in log.samples])
    return float(np.trapezoid(p, t) / (t[-1] - t[0]))


def speed_from_track(log: MeasurementLog) -> float:
    """Mean speed over a tracked run; negative if the run went backward."""
    if len(log.track) < 2:
        raise ValidationError("need at least 2 track points")
    (t0, x0), (t1, x1) = log.track[0], log.track[-1]
    if t1 == t0:
        raise ValidationError("track spans zero elapsed time")
    return (x1 - x0) / (t1 - t0)


def _read_csv(source, header: tuple[str, ...]) -> list[tuple[float, ...]]:
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text(encoding="utf-8")
    reader = csv.reader(io.StringIO(text))
    try:
        got = tuple(h.strip() for h in next(reader))
    except StopIteration:
        raise ValidationError("empty CSV") from None
    if got != header:
        raise ValidationError(f"CSV header must be {','.join(header)}, got {','.join(got)}")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(header):
            raise ValidationError(f"line {lineno}: expected {len(header)} fields")
        try:
            rows.append(tuple(float(v) for v in row))
        except ValueError:
            raise ValidationError(f"line {lineno}: non-numeric value in {row}") from None
    return rows


def load_power_log(source) -> MeasurementLog:
    """Read an electrical log CSV with header ``t_s,voltage_v,current_a``."""
    return MeasurementLog(samples=tuple(_read_csv(source, POWER_CSV_HEADER)))


def load_track(source) -> MeasurementLog:
    """Read a displacement track CSV with header ``t_s,x_m``."""
    return MeasurementLog(track=tuple(_read_csv(source, TRACK_CSV_HEADER)))
