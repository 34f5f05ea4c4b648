"""Two-cable antagonistic actuation of a fish-bone skeleton.

The tail is modeled as a serial chain: one bending joint at each rib
(except the tail-most), with the spine segment behind it rotating
rigidly. A torsional spring of stiffness k_i sits at joint i; shortening
a cable by delta forces the polyline length through that cable's guides
to slack - delta, and the tail settles into the pose that minimizes the
total elastic energy sum(1/2 * k_i * theta_i**2) subject to the taut-
cable length constraints. Cables are tension-only: a command that pays
a cable out (delta <= 0) leaves it slack and unconstraining.

The solve is quasi-static (no tail inertia) and exploits that the
polyline length decomposes into per-joint terms: the cable segment
between guides i and i+1 has length |R(theta_i) a_i - b_i| with a_i,
b_i fixed by the straight-pose geometry, so constraint gradients are
closed-form and the stationarity system is solved with a damped root
find plus load continuation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar, root

from .errors import ComputationError, ValidationError
from .skeleton import SkeletonGraph, SkeletonSpec, spine_segment_thicknesses

DEFAULT_K_REF = 0.05  # N*m/rad at the reference (first-rib) thickness
DEFAULT_AMPLITUDE_M = 0.008
DEFAULT_FREQUENCY_HZ = 1.5

TRAVEL_LIMIT_FRACTION = 0.2
CONSTRAINT_TOL_M = 1e-9
MAX_BEND_RAD = math.pi / 2


@dataclass(frozen=True)
class CableRouting:
    """Guide node ids (head to tail) and straight-pose slack lengths."""

    top_guides: tuple[int, ...]
    bottom_guides: tuple[int, ...]
    anchor_top: int
    anchor_bottom: int
    slack_length_top: float
    slack_length_bottom: float

    def __post_init__(self):
        if len(self.top_guides) < 2 or len(self.bottom_guides) < 2:
            raise ValidationError("each cable needs at least 2 guides")
        if self.anchor_top != self.top_guides[-1] or self.anchor_bottom != self.bottom_guides[-1]:
            raise ValidationError("cable anchors must be the tail-most guides")
        if self.slack_length_top <= 0 or self.slack_length_bottom <= 0:
            raise ValidationError("slack lengths must be positive")


@dataclass(frozen=True)
class TailPose:
    """Joint angles and the resulting spine midline."""

    segment_angles: tuple[float, ...]
    midline: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.midline) != len(self.segment_angles) + 1:
            raise ValidationError("midline must have one more point than there are joints")
        if any(abs(a) >= MAX_BEND_RAD for a in self.segment_angles):
            raise ValidationError("joint angle beyond +-pi/2 is outside the model's validity")


@dataclass(frozen=True)
class ActuationCommand:
    """Commanded cable shortenings, + = shorter, in meters."""

    delta_top: float
    delta_bottom: float
    timestamp: float = 0.0

    def to_dict(self) -> dict:
        return {
            "delta_top_m": self.delta_top,
            "delta_bottom_m": self.delta_bottom,
            "timestamp_s": self.timestamp,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ActuationCommand":
        try:
            return cls(
                delta_top=float(d["delta_top_m"]),
                delta_bottom=float(d["delta_bottom_m"]),
                timestamp=float(d.get("timestamp_s", 0.0)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationError(f"bad actuation command document: {e}") from e


def _guide_ids(graph: SkeletonGraph) -> tuple[list[int], list[int], list[int]]:
    """Match rib endpoint coordinates to node ids (top, spine, bottom per rib)."""
    index = {(n.x, n.y): n.id for n in graph.nodes}
    tops, spines, bottoms = [], [], []
    for rib in sorted(graph.ribs, key=lambda r: r.x):
        try:
            tops.append(index[(rib.x, rib.y_top)])
            spines.append(index[(rib.x, rib.y_spine)])
            bottoms.append(index[(rib.x, rib.y_bottom)])
        except KeyError:
            raise ValidationError(
                f"rib at x={rib.x:.4f} has no matching guide/spine nodes"
            ) from None
    return tops, spines, bottoms


def route_cables(graph: SkeletonGraph) -> CableRouting:
    """Thread one cable through all top guides and one through all bottom
    guides; slack lengths are the straight-pose polyline lengths."""
    if len(graph.ribs) < 2:
        raise ValidationError("cable routing needs at least 2 ribs")
    if not graph.strings:
        raise ValidationError("graph has no strings to route cables along")
    tops, _, bottoms = _guide_ids(graph)

    def polyline(ids: list[int]) -> float:
        pts = [graph.node_by_id(i) for i in ids]
        return float(
            sum(math.hypot(b.x - a.x, b.y - a.y) for a, b in zip(pts, pts[1:]))
        )

    return CableRouting(
        top_guides=tuple(tops),
        bottom_guides=tuple(bottoms),
        anchor_top=tops[-1],
        anchor_bottom=bottoms[-1],
        slack_length_top=polyline(tops),
        slack_length_bottom=polyline(bottoms),
    )


def segment_stiffnesses(spec: SkeletonSpec, k_ref: float = DEFAULT_K_REF) -> list[float]:
    """Torsional stiffness per spine segment, cubic in member thickness.

    Beam bending stiffness scales with the cube of the in-plane width,
    so k_i = k_ref * (t_i / t_first)**3 with t_i the segment thickness.
    k_ref is a calibration constant; poses depend only on stiffness
    ratios, so its absolute value does not affect kinematics.
    """
    t_ref = spec.thickness_first
    return [k_ref * (t / t_ref) ** 3 for t in spine_segment_thicknesses(spec)]


def stiffnesses_from_graph(graph: SkeletonGraph, k_ref: float = DEFAULT_K_REF) -> list[float]:
    """Segment stiffnesses recovered from a graph's rib thicknesses."""
    ribs = sorted(graph.ribs, key=lambda r: r.x)
    if len(ribs) < 2:
        raise ValidationError("need at least 2 ribs")
    t_ref = ribs[0].thickness
    return [k_ref * (r.thickness / t_ref) ** 3 for r in ribs[:-1]]


class _Chain:
    """Straight-pose geometry of the joint chain, precomputed."""

    def __init__(self, graph: SkeletonGraph, routing: CableRouting):
        tops, spines, bottoms = _guide_ids(graph)
        if list(routing.top_guides) != tops or list(routing.bottom_guides) != bottoms:
            raise ValidationError("routing does not match this graph's guides")
        node = {n.id: n for n in graph.nodes}
        self.spine0 = np.array([[node[i].x, node[i].y] for i in spines])
        off_top = np.array([[0.0, node[t].y - node[s].y] for t, s in zip(tops, spines)])
        off_bot = np.array([[0.0, node[b].y - node[s].y] for b, s in zip(bottoms, spines)])
        self.seg_vec = np.diff(self.spine0, axis=0)  # (n_seg, 2)
        self.n_seg = len(self.seg_vec)
        # cable segment i length = |R(theta_i) a_i - b_i|
        self.a_top = self.seg_vec + off_top[1:]
        self.b_top = off_top[:-1]
        self.a_bot = self.seg_vec + off_bot[1:]
        self.b_bot = off_bot[:-1]

    def cable_length(self, theta: np.ndarray, top: bool) -> float:
        a, b = (self.a_top, self.b_top) if top else (self.a_bot, self.b_bot)
        c, s = np.cos(theta), np.sin(theta)
        wx = c * a[:, 0] - s * a[:, 1] - b[:, 0]
        wy = s * a[:, 0] + c * a[:, 1] - b[:, 1]
        return float(np.sum(np.hypot(wx, wy)))

    def cable_length_grad(self, theta: np.ndarray, top: bool) -> np.ndarray:
        a, b = (self.a_top, self.b_top) if top else (self.a_bot, self.b_bot)
        c, s = np.cos(theta), np.sin(theta)
        wx = c * a[:, 0] - s * a[:, 1] - b[:, 0]
        wy = s * a[:, 0] + c * a[:, 1] - b[:, 1]
        dwx = -s * a[:, 0] - c * a[:, 1]
        dwy = c * a[:, 0] - s * a[:, 1]
        norm = np.hypot(wx, wy)
        return (wx * dwx + wy * dwy) / norm

    def min_cable_length(self, top: bool) -> float:
        """Geometric lower bound of the cable polyline over admissible angles."""
        a, b = (self.a_top, self.b_top) if top else (self.a_bot, self.b_bot)
        total = 0.0
        for i in range(self.n_seg):
            def seg_len(t, i=i):
                w = np.array(
                    [
                        math.cos(t) * a[i, 0] - math.sin(t) * a[i, 1] - b[i, 0],
                        math.sin(t) * a[i, 0] + math.cos(t) * a[i, 1] - b[i, 1],
                    ]
                )
                return float(np.hypot(*w))
            res = minimize_scalar(
                seg_len, bounds=(-MAX_BEND_RAD + 1e-6, MAX_BEND_RAD - 1e-6), method="bounded"
            )
            total += float(res.fun)
        return total

    def midline(self, theta: np.ndarray) -> tuple[tuple[float, float], ...]:
        pts = [(float(self.spine0[0][0]), float(self.spine0[0][1]))]
        phi = 0.0
        pos = self.spine0[0].copy()
        for i in range(self.n_seg):
            phi += theta[i]
            c, s = math.cos(phi), math.sin(phi)
            vx, vy = self.seg_vec[i]
            pos = pos + np.array([c * vx - s * vy, s * vx + c * vy])
            pts.append((float(pos[0]), float(pos[1])))
        return tuple(pts)


def _solve_constrained(
    chain: _Chain,
    k: np.ndarray,
    targets: list[tuple[bool, float]],
) -> np.ndarray:
    """Minimize the spring energy subject to taut-cable length targets.

    Solves the stationarity system k_i*theta_i = sum_a lambda_a * dL_a/dtheta_i
    together with the length constraints, ramping the load from zero so the
    root tracker stays on the energy-minimizing branch.
    """
    n = chain.n_seg
    n_con = len(targets)
    slacks = [chain.cable_length(np.zeros(n), top) for top, _ in targets]
    stat_tol = 1e-9 * float(np.max(k))

    def kkt(z: np.ndarray, frac: float) -> np.ndarray:
        theta, lam = z[:n], z[n:]
        r = k * theta
        g = np.empty(n_con)
        for j, ((top, target), slack) in enumerate(zip(targets, slacks)):
            r -= lam[j] * chain.cable_length_grad(theta, top)
            ramped = slack + frac * (target - slack)
            g[j] = chain.cable_length(theta, top) - ramped
        return np.concatenate([r, g])

    z = np.zeros(n + n_con)
    n_steps = 4
    step = 0
    while step < n_steps:
        frac = (step + 1) / n_steps
        sol = root(kkt, z, args=(frac,), method="hybr", tol=1e-13)
        # hybr can flag "no progress" after it has already converged, so
        # accept on the actual residual rather than the status flag
        res = kkt(sol.x, frac)
        converged = (
            np.abs(res[n:]).max() <= CONSTRAINT_TOL_M
            and np.abs(res[:n]).max() <= stat_tol
        )
        if not converged:
            if n_steps < 64:
                n_steps *= 2
                step *= 2
                continue
            raise ComputationError(
                f"bend solve did not converge (constraint residual "
                f"{np.abs(res[n:]).max():.2e} m)"
            )
        z = sol.x
        step += 1

    return z[:n]


def bend_from_cables(
    graph: SkeletonGraph,
    routing: CableRouting,
    cmd: ActuationCommand,
    stiffnesses: list[float] | tuple[float, ...] | np.ndarray,
) -> TailPose:
    """Pose of minimum elastic energy under the commanded cable lengths."""
    chain = _Chain(graph, routing)
    k = np.asarray(stiffnesses, dtype=float)
    if k.shape != (chain.n_seg,):
        raise ValidationError(
            f"expected {chain.n_seg} segment stiffnesses, got {len(k)}"
        )
    if np.any(k <= 0):
        raise ValidationError("segment stiffnesses must be positive")

    for name, delta, slack in (
        ("top", cmd.delta_top, routing.slack_length_top),
        ("bottom", cmd.delta_bottom, routing.slack_length_bottom),
    ):
        if abs(delta) > TRAVEL_LIMIT_FRACTION * slack + 1e-15:
            raise ValidationError(
                f"delta_{name} {delta:.4g} m exceeds the motor travel limit "
                f"({TRAVEL_LIMIT_FRACTION:.0%} of slack {slack:.4g} m)"
            )

    targets: list[tuple[bool, float]] = []
    if cmd.delta_top > 0:
        targets.append((True, routing.slack_length_top - cmd.delta_top))
    if cmd.delta_bottom > 0:
        targets.append((False, routing.slack_length_bottom - cmd.delta_bottom))

    if not targets:
        theta = np.zeros(chain.n_seg)
        return TailPose(segment_angles=tuple(theta), midline=chain.midline(theta))

    for top, target in targets:
        feasible_min = chain.min_cable_length(top)
        if target < feasible_min:
            raise ComputationError(
                f"commanded shortening exceeds the geometric limit "
                f"(min achievable length {feasible_min:.4g} m, target {target:.4g} m)"
            )

    theta = _solve_constrained(chain, k, targets)
    if np.any(np.abs(theta) >= MAX_BEND_RAD):
        raise ComputationError("bend solve left the model's angle range (+-pi/2)")
    return TailPose(
        segment_angles=tuple(float(t) for t in theta),
        midline=chain.midline(theta),
    )


def cable_lengths(
    graph: SkeletonGraph, routing: CableRouting, pose: TailPose
) -> tuple[float, float]:
    """Polyline cable lengths through the displaced guides of a pose."""
    chain = _Chain(graph, routing)
    theta = np.asarray(pose.segment_angles, dtype=float)
    if theta.shape != (chain.n_seg,):
        raise ValidationError(f"pose has {len(theta)} angles, graph needs {chain.n_seg}")
    return chain.cable_length(theta, True), chain.cable_length(theta, False)


def actuation_waveform(amplitude: float, frequency: float, t: float) -> ActuationCommand:
    """Antagonistic sinusoid: top shortens as the bottom pays out."""
    if amplitude < 0:
        raise ValidationError("amplitude must be nonnegative")
    if frequency <= 0:
        raise ValidationError("frequency must be positive")
    delta = amplitude * math.sin(2.0 * math.pi * frequency * t)
    return ActuationCommand(delta_top=delta, delta_bottom=-delta, timestamp=t)
