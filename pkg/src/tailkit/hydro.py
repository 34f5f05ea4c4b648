"""Steady swimming speed from tail kinematics.

The tail's periodic midline motion feeds a slender-body mean-thrust
estimate evaluated at the trailing edge,

    thrust = m_a / 2 * <hdot**2 - U**2 * hx**2>,

with m_a = rho * pi * tip_span**2 / 4 * added_mass_coeff the virtual
mass per unit length at the trailing edge, hdot the lateral velocity
and hx the local midline slope there, and <.> the average over one
actuation period. Balancing against quadratic body drag
D = 1/2 * rho * Cd * A * U**2 gives the cruise speed as the root of
thrust(U) = drag(U).

This is a desk-scale surrogate, not a flow solver: absolute speeds are
meaningful only after calibrating the drag coefficient against a
measured operating point, and cross-design comparisons are qualitative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from .errors import ComputationError, ValidationError
from .skeleton import SkeletonGraph
from .tendon import CableRouting, actuation_waveform, bend_from_cables

DEFAULT_N_SAMPLES = 64
MAX_SPEED_M_S = 2.0
BALANCE_TOL_N = 1e-6
CALIBRATION_REL_TOL = 1e-3  # 0.1 %


@dataclass(frozen=True)
class HydroParams:
    """Fluid and body constants of the thrust/drag balance."""

    rho: float = 1000.0  # kg/m^3
    drag_coeff: float = 0.5
    frontal_area: float = 0.003  # m^2
    added_mass_coeff: float = 1.0
    tip_span: float = 0.08  # m, fluke trailing-edge depth

    def __post_init__(self):
        for name in ("rho", "drag_coeff", "frontal_area", "added_mass_coeff", "tip_span"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be strictly positive")

    def to_dict(self) -> dict:
        return {
            "rho_kg_m3": self.rho,
            "drag_coeff": self.drag_coeff,
            "frontal_area_m2": self.frontal_area,
            "added_mass_coeff": self.added_mass_coeff,
            "tip_span_m": self.tip_span,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HydroParams":
        try:
            return cls(
                rho=float(d["rho_kg_m3"]),
                drag_coeff=float(d["drag_coeff"]),
                frontal_area=float(d["frontal_area_m2"]),
                added_mass_coeff=float(d["added_mass_coeff"]),
                tip_span=float(d["tip_span_m"]),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationError(f"bad hydro parameter document: {e}") from e


@dataclass(frozen=True)
class MidlineHistory:
    """Midline snapshots over one actuation period, uniform time grid."""

    times: tuple[float, ...]
    midlines: tuple[tuple[tuple[float, float], ...], ...]
    period: float

    def __post_init__(self):
        if len(self.times) != len(self.midlines):
            raise ValidationError("one midline per time sample required")
        if len(self.times) < 2:
            raise ValidationError("history needs at least 2 samples")
        if self.period <= 0:
            raise ValidationError("period must be positive")
        steps = np.diff(self.times)
        if np.any(steps <= 0):
            raise ValidationError("times must be strictly increasing")
        if np.ptp(steps) > 1e-9 * self.period:
            raise ValidationError("time steps must be uniform")
        stations = {len(m) for m in self.midlines}
        if len(stations) != 1:
            raise ValidationError("all midlines must share the same stations")
        if stations.pop() < 2:
            raise ValidationError("midlines need at least 2 stations")


def sample_kinematics(
    graph: SkeletonGraph,
    routing: CableRouting,
    stiffnesses,
    amplitude: float,
    frequency: float,
    n_samples: int = DEFAULT_N_SAMPLES,
) -> MidlineHistory:
    """Solve the bend pose at uniform phases over one actuation period."""
    if n_samples < 16:
        raise ValidationError("need at least 16 samples per period")
    period = 1.0 / frequency
    times = [period * j / n_samples for j in range(n_samples)]
    midlines = []
    for t in times:
        cmd = actuation_waveform(amplitude, frequency, t)
        pose = bend_from_cables(graph, routing, cmd, stiffnesses)
        midlines.append(pose.midline)
    return MidlineHistory(times=tuple(times), midlines=tuple(midlines), period=period)


def _trailing_edge_series(history: MidlineHistory) -> tuple[np.ndarray, np.ndarray]:
    """Trailing-edge lateral velocity and midline slope per time sample."""
    y = np.array([[p[1] for p in m] for m in history.midlines])
    x = np.array([[p[0] for p in m] for m in history.midlines])
    n_t = y.shape[0]
    if n_t < 3:
        raise ValidationError("need at least 3 time samples for finite differences")
    dt = history.times[1] - history.times[0]
    tip = y[:, -1]
    covers_period = abs((history.times[-1] - history.times[0]) + dt - history.period) < 1e-9
    if covers_period:
        hdot = (np.roll(tip, -1) - np.roll(tip, 1)) / (2.0 * dt)
    else:
        hdot = np.gradient(tip, dt)
    hx = (y[:, -1] - y[:, -2]) / (x[:, -1] - x[:, -2])
    return hdot, hx


def mean_thrust(history: MidlineHistory, speed: float, params: HydroParams) -> float:
    """Period-averaged trailing-edge thrust at forward speed ``speed``.

    Can be negative: a fast-moving body with a waving tail may see net
    drag from the tail itself.
    """
    if speed < 0:
        raise ValidationError("forward speed cannot be negative")
    hdot, hx = _trailing_edge_series(history)
    m_a = params.rho * math.pi * params.tip_span**2 / 4.0 * params.added_mass_coeff
    return float(0.5 * m_a * np.mean(hdot**2 - speed**2 * hx**2))


def drag_force(speed: float, params: HydroParams) -> float:
    """Quadratic body drag, N."""
    if speed < 0:
        raise ValidationError("forward speed cannot be negative")
    return 0.5 * params.rho * params.drag_coeff * params.frontal_area * speed**2


def steady_speed_from_history(history: MidlineHistory, params: HydroParams) -> float:
    """Root of thrust(U) = drag(U) for a precomputed kinematics history."""

    def balance(u: float) -> float:
        return mean_thrust(history, u, params) - drag_force(u, params)

    if balance(0.0) <= 0.0:
        return 0.0
    hi = 0.05
    while balance(hi) > 0.0:
        hi *= 2.0
        if hi > MAX_SPEED_M_S:
            raise ComputationError(
                f"no thrust/drag balance below {MAX_SPEED_M_S} m/s"
            )
    u_star = float(brentq(balance, 0.0, hi, xtol=1e-13, rtol=8.9e-16))
    residual = abs(balance(u_star))
    if residual > BALANCE_TOL_N:
        raise ComputationError(
            f"thrust/drag residual {residual:.2e} N exceeds {BALANCE_TOL_N} N"
        )
    return u_star


def steady_speed(
    graph: SkeletonGraph,
    routing: CableRouting,
    stiffnesses,
    amplitude: float,
    frequency: float,
    params: HydroParams,
    n_samples: int = DEFAULT_N_SAMPLES,
) -> float:
    """Predicted cruise speed for one design and actuation setting, m/s."""
    if amplitude == 0.0:
        return 0.0
    history = sample_kinematics(graph, routing, stiffnesses, amplitude, frequency, n_samples)
    return steady_speed_from_history(history, params)


def calibrate(
    graph: SkeletonGraph,
    routing: CableRouting,
    stiffnesses,
    amplitude: float,
    frequency: float,
    params: HydroParams,
    target_speed: float,
    n_samples: int = DEFAULT_N_SAMPLES,
) -> HydroParams:
    """Scale drag_coeff so the predicted speed hits a measured one.

    Single-parameter secant search; the kinematics are solved once and
    reused across iterations.
    """
    if target_speed <= 0:
        raise ValidationError("calibration target speed must be positive")
    history = sample_kinematics(graph, routing, stiffnesses, amplitude, frequency, n_samples)

    # thrust(U) = A - B*U**2; the drag-free ceiling sqrt(A/B) bounds what
    # any positive drag_coeff can reach
    thrust_0 = mean_thrust(history, 0.0, params)
    thrust_1 = mean_thrust(history, 1.0, params)
    slope = thrust_0 - thrust_1
    if thrust_0 <= 0:
        raise ComputationError("design produces no thrust; cannot calibrate")
    if slope > 0 and target_speed**2 >= thrust_0 / slope:
        raise ComputationError(
            f"target speed {target_speed} m/s is unreachable: the drag-free "
            f"ceiling is {math.sqrt(thrust_0 / slope):.4f} m/s"
        )

    def miss(cd: float) -> float:
        return steady_speed_from_history(history, replace(params, drag_coeff=cd)) - target_speed

    cd_prev = params.drag_coeff
    f_prev = miss(cd_prev)
    cd_cur = cd_prev * (1.5 if f_prev > 0 else 0.5)
    f_cur = miss(cd_cur)
    for _ in range(60):
        if abs(f_cur) <= CALIBRATION_REL_TOL * target_speed * 0.1:
            return replace(params, drag_coeff=cd_cur)
        if f_cur == f_prev:
            break
        cd_next = cd_cur - f_cur * (cd_cur - cd_prev) / (f_cur - f_prev)
        if cd_next <= 0:
            cd_next = 0.5 * min(cd_cur, cd_prev)
        cd_prev, f_prev = cd_cur, f_cur
        cd_cur, f_cur = cd_next, miss(cd_next)
    if abs(f_cur) <= CALIBRATION_REL_TOL * target_speed:
        return replace(params, drag_coeff=cd_cur)
    raise ComputationError(
        f"calibration did not converge (best miss {f_cur:.3e} m/s)"
    )
