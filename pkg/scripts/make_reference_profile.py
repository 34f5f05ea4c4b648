#!/usr/bin/env python3
"""Regenerate the bundled synthetic reference profile.

The digitized contour of the real animal model is not redistributable,
so the repo ships a stand-in: a smooth closed-form bottlenose-like
outline on a unit chord, sampled at 201 stations. The upper contour
carries a narrow dorsal-fin bump centered at x = 0.505 m that the
excision stage (0.40-0.61 m) removes, exactly like the real pipeline.

Writes src/tailkit/data/profile_ref.csv (9-decimal fixed point, so the
file is byte-stable across platforms).
"""

from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parent.parent / "src" / "tailkit" / "data" / "profile_ref.csv"

N_SAMPLES = 201


def upper_contour(x: np.ndarray) -> np.ndarray:
    body = 0.40 * x * (1.0 - x) + 0.06 * np.exp(-(((x - 0.28) / 0.20) ** 2)) + 0.002 * x
    dorsal_fin = 0.042 * np.exp(-(((x - 0.505) / 0.040) ** 2))
    return body + dorsal_fin


def lower_contour(x: np.ndarray) -> np.ndarray:
    return -(0.34 * x * (1.0 - x) + 0.045 * np.exp(-(((x - 0.38) / 0.28) ** 2)) + 0.002 * x)


def main() -> None:
    x = np.linspace(0.0, 1.0, N_SAMPLES)
    yu = upper_contour(x)
    yl = lower_contour(x)
    assert np.all(yu > yl), "contours must not cross"
    lines = ["x_m,y_upper_m,y_lower_m"]
    for xi, yui, yli in zip(x, yu, yl):
        lines.append(f"{xi:.9f},{yui:.9f},{yli:.9f}")
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {OUT} ({N_SAMPLES} samples)")


if __name__ == "__main__":
    main()
