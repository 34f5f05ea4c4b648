"""Design-space sweeps and speed/COT Pareto extraction.

A sweep walks the Cartesian grid of (h1:h2, thickness ratio, rib count),
evaluates each design with the calibrated hydro surrogate and the power
model, and collects one record per grid point. Failed points become
error records: they stay in reports (with the reason, in the JSON form)
but never abort the sweep and are excluded from Pareto analysis.

Simulated numbers and the bundled measured reference values for the six
stock skeleton types must never be conflated, so every record carries a
source tag: ``simulated`` or ``paper-reference``.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

from .energetics import DERIVED_MASS_KG, PowerModel, SwimResult, predict_power
from .errors import ValidationError
from .hydro import HydroParams, steady_speed
from .profile import (
    PolyCurve,
    excise_dorsal,
    fit_polynomial,
    interpolate_gap,
    load_reference_profile,
)
from .skeleton import SkeletonSpec, generate_skeleton, six_presets
from .tendon import (
    DEFAULT_AMPLITUDE_M,
    DEFAULT_FREQUENCY_HZ,
    route_cables,
    segment_stiffnesses,
)

SOURCE_SIMULATED = "simulated"
SOURCE_REFERENCE = "paper-reference"

REPORT_COLUMNS = (
    "label",
    "h1",
    "h2",
    "thickness_ratio",
    "n_ribs",
    "speed_mm_s",
    "speed_bl_s",
    "power_w",
    "mass_kg",
    "cot",
    "pareto",
    "source",
)

# Measured swim metrics of the six stock skeleton types (speed mm/s,
# speed bl/s, COT). Mass and per-row power are derived from these via
# COT = P/(m*v), not measured.
REFERENCE_MEASUREMENTS = (
    ("type1", (1.0, 1.0), 1.0, 133.5607, 0.411, 146.0),
    ("type2", (1.0, 1.0), 2.0, 125.4027, 0.386, 136.0),
    ("type3", (1.0, 1.0), 3.0, 127.8671, 0.393, 136.0),
    ("type4", (1.0, 2.0), 1.0, 163.1813, 0.502, 95.0),
    ("type5", (1.0, 2.0), 2.0, 86.8601, 0.267, 175.0),
    ("type6", (1.0, 2.0), 3.0, 78.7879, 0.243, 193.0),
)


@dataclass(frozen=True)
class DesignGrid:
    """Cartesian design grid plus the evaluation context."""

    h1_h2_values: tuple[tuple[float, float], ...] = ((1.0, 1.0), (1.0, 2.0))
    thickness_ratios: tuple[float, ...] = (1.0, 2.0, 3.0)
    n_ribs_values: tuple[int, ...] = (6,)
    base_spec: SkeletonSpec = SkeletonSpec()
    actuation: tuple[float, float] = (DEFAULT_AMPLITUDE_M, DEFAULT_FREQUENCY_HZ)
    hydro: HydroParams = HydroParams()
    power: PowerModel = PowerModel()

    def __post_init__(self):
        if not self.h1_h2_values or not self.thickness_ratios or not self.n_ribs_values:
            raise ValidationError("grid value lists must be non-empty")

    @property
    def size(self) -> int:
        return len(self.h1_h2_values) * len(self.thickness_ratios) * len(self.n_ribs_values)

    def to_dict(self) -> dict:
        return {
            "h1_h2_values": [list(v) for v in self.h1_h2_values],
            "thickness_ratios": list(self.thickness_ratios),
            "n_ribs_values": list(self.n_ribs_values),
            "base_spec": spec_to_dict(self.base_spec),
            "actuation": {"amplitude_m": self.actuation[0], "frequency_hz": self.actuation[1]},
            "hydro": self.hydro.to_dict(),
            "power": self.power.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DesignGrid":
        kwargs = {}
        if "h1_h2_values" in d:
            kwargs["h1_h2_values"] = tuple(
                (float(a), float(b)) for a, b in d["h1_h2_values"]
            )
        if "thickness_ratios" in d:
            kwargs["thickness_ratios"] = tuple(float(v) for v in d["thickness_ratios"])
        if "n_ribs_values" in d:
            kwargs["n_ribs_values"] = tuple(int(v) for v in d["n_ribs_values"])
        if "base_spec" in d:
            kwargs["base_spec"] = spec_from_dict(d["base_spec"])
        if "actuation" in d:
            kwargs["actuation"] = (
                float(d["actuation"]["amplitude_m"]),
                float(d["actuation"]["frequency_hz"]),
            )
        if "hydro" in d:
            kwargs["hydro"] = HydroParams.from_dict(d["hydro"])
        if "power" in d:
            kwargs["power"] = PowerModel.from_dict(d["power"])
        return cls(**kwargs)


@dataclass(frozen=True)
class DesignRecord:
    """One evaluated (or failed) design."""

    label: str
    spec: SkeletonSpec
    result: SwimResult | None
    source: str = SOURCE_SIMULATED
    error: str | None = None

    def __post_init__(self):
        if (self.result is None) == (self.error is None):
            raise ValidationError("a record carries either a result or an error reason")


def spec_to_dict(spec: SkeletonSpec) -> dict:
    return {
        "body_length_m": spec.body_length,
        "head_fraction": spec.head_fraction,
        "n_ribs": spec.n_ribs,
        "h1": spec.h1_h2[0],
        "h2": spec.h1_h2[1],
        "thickness_first_mm": spec.thickness_first,
        "thickness_ratio": spec.thickness_ratio,
        "spine_shape": spec.spine_shape,
    }


def spec_from_dict(d: dict) -> SkeletonSpec:
    try:
        return SkeletonSpec(
            body_length=float(d["body_length_m"]),
            head_fraction=float(d["head_fraction"]),
            n_ribs=int(d["n_ribs"]),
            h1_h2=(float(d["h1"]), float(d["h2"])),
            thickness_first=float(d["thickness_first_mm"]),
            thickness_ratio=float(d["thickness_ratio"]),
            spine_shape=str(d["spine_shape"]),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"bad skeleton spec document: {e}") from e


@lru_cache(maxsize=1)
def default_curves() -> tuple[PolyCurve, PolyCurve]:
    """Fitted contours of the bundled profile, standard pipeline."""
    samples = interpolate_gap(excise_dorsal(load_reference_profile()), 20)
    upper, lower, _ = fit_polynomial(samples)
    return upper, lower


def evaluate_design(
    spec: SkeletonSpec,
    amplitude: float,
    frequency: float,
    hydro: HydroParams,
    power: PowerModel,
    curves: tuple[PolyCurve, PolyCurve] | None = None,
    mass: float = DERIVED_MASS_KG,
) -> SwimResult:
    """Simulate one design end to end: skeleton, cables, speed, power."""
    upper, lower = curves if curves is not None else default_curves()
    graph = generate_skeleton(spec, upper, lower)
    routing = route_cables(graph)
    stiffnesses = segment_stiffnesses(spec)
    speed = steady_speed(graph, routing, stiffnesses, amplitude, frequency, hydro)
    watts = predict_power(power, amplitude, frequency)
    return SwimResult.from_power(
        speed=speed, power=watts, mass=mass, body_length=spec.body_length
    )


def _grid_points(grid: DesignGrid) -> list[tuple[str, SkeletonSpec]]:
    points = []
    for h1h2 in grid.h1_h2_values:
        for ratio in grid.thickness_ratios:
            for n_ribs in grid.n_ribs_values:
                spec = SkeletonSpec(
                    body_length=grid.base_spec.body_length,
                    head_fraction=grid.base_spec.head_fraction,
                    n_ribs=n_ribs,
                    h1_h2=h1h2,
                    thickness_first=grid.base_spec.thickness_first,
                    thickness_ratio=ratio,
                    spine_shape=grid.base_spec.spine_shape,
                )
                label = f"h{h1h2[0]:g}-{h1h2[1]:g}_t{ratio:g}_r{n_ribs}"
                points.append((label, spec))
    return points


def _evaluate_point(args) -> DesignRecord:
    label, spec, amplitude, frequency, hydro, power, curves = args
    try:
        result = evaluate_design(spec, amplitude, frequency, hydro, power, curves)
        return DesignRecord(label=label, spec=spec, result=result)
    except Exception as e:  # per-point failures must not abort the sweep
        return DesignRecord(label=label, spec=spec, result=None, error=str(e))


def run_sweep(
    grid: DesignGrid,
    jobs: int = 1,
    curves: tuple[PolyCurve, PolyCurve] | None = None,
) -> list[DesignRecord]:
    """Evaluate every grid point; output is sorted by label, so results
    do not depend on the evaluation schedule."""
    resolved = curves if curves is not None else default_curves()
    amplitude, frequency = grid.actuation
    tasks = [
        (label, spec, amplitude, frequency, grid.hydro, grid.power, resolved)
        for label, spec in _grid_points(grid)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_evaluate_point, tasks))
    else:
        records = [_evaluate_point(t) for t in tasks]
    return sorted(records, key=lambda r: r.label)


def non_dominated(points: list[tuple[float, float]]) -> list[bool]:
    """Flags of points not dominated under (maximize speed, minimize cot)."""
    flags = []
    for i, (s_i, c_i) in enumerate(points):
        dominated = any(
            s_j >= s_i and c_j <= c_i and (s_j > s_i or c_j < c_i)
            for j, (s_j, c_j) in enumerate(points)
            if j != i
        )
        flags.append(not dominated)
    return flags


def pareto_front(records: list[DesignRecord]) -> list[DesignRecord]:
    """Non-dominated records (speed up, COT down), sorted by speed, descending.

    Records that tie on both metrics are all retained. Error records are
    excluded from the analysis.
    """
    valid = [r for r in records if r.result is not None]
    if not valid:
        raise ValidationError("pareto_front needs at least one record with a valid result")
    flags = non_dominated([(r.result.speed, r.result.cot) for r in valid])
    front = [r for r, keep in zip(valid, flags) if keep]
    return sorted(front, key=lambda r: (-r.result.speed, r.label))


def reference_records() -> list[DesignRecord]:
    """The bundled measured reference dataset for the six stock types.

    Speed and COT are as published; mass is the derived default and each
    row's power is back-derived through COT = P/(m*v) so the records are
    internally consistent.
    """
    records = []
    specs = six_presets()
    for (label, h1h2, ratio, speed_mm, bl_s, cot_val), spec in zip(
        REFERENCE_MEASUREMENTS, specs
    ):
        assert spec.h1_h2 == h1h2 and spec.thickness_ratio == ratio
        speed = speed_mm / 1000.0
        result = SwimResult(
            speed=speed,
            speed_bl=bl_s,
            power=cot_val * DERIVED_MASS_KG * speed,
            mass=DERIVED_MASS_KG,
            cot=cot_val,
            body_length=spec.body_length,
        )
        records.append(
            DesignRecord(label=label, spec=spec, result=result, source=SOURCE_REFERENCE)
        )
    return records


def _record_row(record: DesignRecord, pareto: bool) -> dict:
    spec = record.spec
    row = {
        "label": record.label,
        "h1": spec.h1_h2[0],
        "h2": spec.h1_h2[1],
        "thickness_ratio": spec.thickness_ratio,
        "n_ribs": spec.n_ribs,
        "pareto": pareto,
        "source": record.source,
    }
    if record.result is not None:
        r = record.result
        row.update(
            speed_mm_s=r.speed * 1000.0,
            speed_bl_s=r.speed_bl,
            power_w=r.power,
            mass_kg=r.mass,
            cot=r.cot,
        )
    else:
        row.update(speed_mm_s=None, speed_bl_s=None, power_w=None, mass_kg=None, cot=None)
    return row


def emit_report(records: list[DesignRecord], fmt: str) -> str:
    """Render records as ``csv``, ``json``, or ``plot`` (speed/COT pairs).

    Column and key order is fixed. The CSV carries the pinned column set;
    the JSON mirrors it and additionally keeps the full spec and any
    error reason, which makes it lossless for round-tripping.
    """
    if not records:
        raise ValidationError("cannot emit a report for zero records")
    front_labels = set()
    if any(r.result is not None for r in records):
        front_labels = {r.label for r in pareto_front(records)}

    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for rec in records:
            row = _record_row(rec, rec.label in front_labels)
            writer.writerow(
                [
                    "" if row[c] is None else (str(row[c]).lower() if c == "pareto" else row[c])
                    for c in REPORT_COLUMNS
                ]
            )
        return buf.getvalue()

    if fmt == "json":
        payload = []
        for rec in records:
            row = _record_row(rec, rec.label in front_labels)
            # mm/s mirrors the CSV; m/s keeps the round-trip bit-exact
            row["speed_m_s"] = rec.result.speed if rec.result is not None else None
            row["error"] = rec.error
            row["spec"] = spec_to_dict(rec.spec)
            payload.append(row)
        return json.dumps(payload, indent=1) + "\n"

    if fmt == "plot":
        lines = ["speed_mm_s,cot"]
        for rec in records:
            if rec.result is not None:
                lines.append(f"{rec.result.speed * 1000.0!r},{rec.result.cot!r}")
        return "\n".join(lines) + "\n"

    raise ValidationError(f"unknown report format {fmt!r} (expected csv, json or plot)")


def parse_report_json(text: str) -> list[DesignRecord]:
    """Inverse of emit_report(..., 'json')."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f"invalid report JSON: {e}") from e
    if not isinstance(payload, list):
        raise ValidationError("report JSON must be an array of records")
    records = []
    for row in payload:
        spec = spec_from_dict(row["spec"])
        if row.get("error") is not None:
            records.append(
                DesignRecord(
                    label=row["label"], spec=spec, result=None,
                    source=row["source"], error=row["error"],
                )
            )
            continue
        result = SwimResult(
            speed=row["speed_m_s"],
            speed_bl=row["speed_bl_s"],
            power=row["power_w"],
            mass=row["mass_kg"],
            cot=row["cot"],
            body_length=spec.body_length,
        )
        records.append(
            DesignRecord(label=row["label"], spec=spec, result=result, source=row["source"])
        )
    return records
