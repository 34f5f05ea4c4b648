#!/usr/bin/env python3
"""Recompute the frozen high-precision least-squares oracle.

Solves the degree-17 fit of the bundled profile (post excision + gap
fill) in exact rational arithmetic: the normal equations of the
monomial design, assembled and eliminated with Fraction, give the exact
minimizer of the exact floating-point data — no rounding anywhere.
(The production solver avoids normal equations because they square the
condition number IN FLOATING POINT; in exact arithmetic there is no
such hazard, and the route is independent of the production Chebyshev
path.)

Writes tests/data/fit_oracle.json. Slow (~10 s); run only when the
reference profile or the pipeline defaults change.
"""

import json
import sys
from fractions import Fraction
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from tailkit import profile as P  # noqa: E402

OUT = ROOT / "tests" / "data" / "fit_oracle.json"

DEGREE = 17
N_FILL = 20


def exact_lstsq(xs, ys, degree):
    xf = [Fraction(float(v)) for v in xs]
    yf = [Fraction(float(v)) for v in ys]
    n = degree + 1
    powers = [[xi**k for k in range(2 * degree + 1)] for xi in xf]
    gram = [[sum(p[i + j] for p in powers) for j in range(n)] for i in range(n)]
    rhs = [sum(yk * p[i] for yk, p in zip(yf, powers)) for i in range(n)]
    m = [row[:] + [b] for row, b in zip(gram, rhs)]
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(m[r][col]))
        m[col], m[pivot] = m[pivot], m[col]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col] / m[col][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    coef = [m[i][n] / m[i][i] for i in range(n)]
    resid = [yk - sum(c * p[i] for i, c in enumerate(coef)) for yk, p in zip(yf, powers)]
    mse = sum(r * r for r in resid) / len(resid)
    return [float(c) for c in coef], float(mse)


def main() -> None:
    samples = P.load_reference_profile()
    samples = P.excise_dorsal(samples)
    samples = P.interpolate_gap(samples, N_FILL)

    x0, chord = samples.x_min, samples.body_length
    out = {"degree": DEGREE, "n_fill": N_FILL}
    for name, pts in (("upper", samples.points_upper), ("lower", samples.points_lower)):
        xs = [(p[0] - x0) / chord for p in pts]
        ys = [p[1] for p in pts]
        coef, mse = exact_lstsq(xs, ys, DEGREE)
        out[f"coefficients_{name}"] = coef
        out[f"mse_{name}"] = mse
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(out, indent=1) + "\n", encoding="utf-8")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
