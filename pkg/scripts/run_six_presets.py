#!/usr/bin/env python3
"""Evaluate the six stock skeleton designs end to end.

Calibrates the drag coefficient so the best stock design (type4) hits
its measured cruise speed, sweeps all six designs through the simulator
with identical actuation, and prints both the simulated report and the
bundled measured reference, each with its speed/COT Pareto front.

Simulated cross-design numbers are qualitative (the hydro model is a
calibrated surrogate); the interesting comparison is the ordering.

Usage: python scripts/run_six_presets.py [outdir]
Writes report CSVs plus plot data into outdir (default ./results).
"""

import sys
from dataclasses import replace
from pathlib import Path

from tailkit.explorer import (
    DesignGrid,
    default_curves,
    emit_report,
    pareto_front,
    reference_records,
    run_sweep,
)
from tailkit.hydro import HydroParams, calibrate
from tailkit.skeleton import generate_skeleton, six_presets
from tailkit.tendon import (
    DEFAULT_AMPLITUDE_M,
    DEFAULT_FREQUENCY_HZ,
    route_cables,
    segment_stiffnesses,
)

TARGET_SPEED_M_S = 0.163181  # measured type4 cruise speed


def print_records(title, records):
    print(f"\n{title}")
    print(f"{'label':<14} {'speed mm/s':>10} {'bl/s':>7} {'power W':>8} {'COT':>7}")
    for rec in records:
        if rec.result is None:
            print(f"{rec.label:<14} failed: {rec.error}")
            continue
        r = rec.result
        print(
            f"{rec.label:<14} {r.speed * 1000:>10.2f} {r.speed_bl:>7.3f} "
            f"{r.power:>8.2f} {r.cot:>7.1f}"
        )
    front = pareto_front(records)
    print("pareto front:", ", ".join(r.label for r in front))


def main() -> None:
    outdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("results")
    outdir.mkdir(parents=True, exist_ok=True)

    upper, lower = default_curves()
    spec4 = six_presets()[3]
    graph4 = generate_skeleton(spec4, upper, lower)
    params = calibrate(
        graph4,
        route_cables(graph4),
        segment_stiffnesses(spec4),
        DEFAULT_AMPLITUDE_M,
        DEFAULT_FREQUENCY_HZ,
        HydroParams(),
        TARGET_SPEED_M_S,
    )
    print(f"calibrated drag coefficient: {params.drag_coeff:.4f} "
          f"(target {TARGET_SPEED_M_S * 1000:.2f} mm/s on type4)")

    grid = DesignGrid(hydro=params)
    simulated = run_sweep(grid)
    # relabel grid points to the stock names for readability
    by_params = {(r.spec.h1_h2, r.spec.thickness_ratio): r for r in simulated}
    simulated = [
        replace(by_params[(spec.h1_h2, spec.thickness_ratio)], label=name)
        for name, spec in zip(
            ("type1", "type2", "type3", "type4", "type5", "type6"), six_presets()
        )
    ]
    simulated.sort(key=lambda r: r.label)
    print_records("simulated (calibrated surrogate)", simulated)

    reference = reference_records()
    print_records("measured reference", reference)

    (outdir / "simulated.csv").write_text(emit_report(simulated, "csv"))
    (outdir / "simulated_plot.csv").write_text(emit_report(simulated, "plot"))
    (outdir / "reference.csv").write_text(emit_report(reference, "csv"))
    (outdir / "reference_plot.csv").write_text(emit_report(reference, "plot"))
    print(f"\nwrote reports to {outdir}/")


if __name__ == "__main__":
    main()
