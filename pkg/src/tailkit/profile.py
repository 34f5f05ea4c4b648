"""Body-profile ingestion, dorsal-fin excision, gap interpolation and
polynomial curve fitting.

The pipeline mirrors how a side-view hull contour becomes a pair of
smooth analytic curves: load digitized (x, y_upper, y_lower) samples,
cut the dorsal-fin region out of the upper contour, bridge the gap with
a natural cubic spline, then least-squares fit a high-order polynomial
to each contour on the chord normalized to [0, 1].

High-degree monomial fits are numerically treacherous (the plain
Vandermonde system at degree 17 has a condition number around 1e13), so
the solve runs in a Chebyshev basis, where the design matrix is
well-conditioned, and converts the solution to monomial coefficients
afterwards. Chebyshev coefficients below the solve's noise floor are
zeroed before conversion so that representation noise does not get
amplified into spurious monomial terms.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.polynomial import chebyshev as _cheb
from numpy.polynomial import polynomial as _poly
from scipy.interpolate import CubicSpline

from .errors import ComputationError, ValidationError

DEFAULT_DEGREE = 17

# Dorsal-fin excision window on the unit-chord source profile, meters.
DORSAL_EXCISE_LO = 0.40
DORSAL_EXCISE_HI = 0.61

PROFILE_CSV_HEADER = ("x_m", "y_upper_m", "y_lower_m")

# Chebyshev coefficients smaller than this (relative to the largest one)
# are numerical noise of the double-precision solve, not signal.
_CHEB_NOISE_FLOOR = 128 * np.finfo(float).eps


@dataclass(frozen=True)
class ProfileSamples:
    """Digitized upper/lower body contour points, x strictly increasing."""

    points_upper: tuple[tuple[float, float], ...]
    points_lower: tuple[tuple[float, float], ...]
    body_length: float

    def __post_init__(self):
        for name, pts in (("upper", self.points_upper), ("lower", self.points_lower)):
            if len(pts) < 2:
                raise ValidationError(f"{name} contour needs at least 2 points")
            xs = np.array([p[0] for p in pts])
            if not np.all(np.diff(xs) > 0):
                raise ValidationError(f"{name} contour x values must be strictly increasing")
        lower_y = dict(self.points_lower)
        for x, y in self.points_upper:
            yl = lower_y.get(x)
            if yl is not None and y < yl:
                raise ValidationError(f"upper contour below lower contour at x={x}")
        if self.body_length <= 0:
            raise ValidationError("body_length must be positive")
        if abs(self.body_length - (self.x_max - self.x_min)) > 1e-9:
            raise ValidationError("body_length must equal the chord extent max(x) - min(x)")

    @property
    def x_min(self) -> float:
        return min(self.points_upper[0][0], self.points_lower[0][0])

    @property
    def x_max(self) -> float:
        return max(self.points_upper[-1][0], self.points_lower[-1][0])


@dataclass(frozen=True)
class PolyCurve:
    """Polynomial contour y(x) = sum(c_i * x**i) on the normalized chord."""

    coefficients: tuple[float, ...]
    domain: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        if len(self.coefficients) < 2:
            raise ValidationError("a curve needs at least degree 1 (2 coefficients)")
        if not all(np.isfinite(self.coefficients)):
            raise ValidationError("curve coefficients must be finite")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "domain": [self.domain[0], self.domain[1]],
            "coefficients": list(self.coefficients),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PolyCurve":
        try:
            coeffs = tuple(float(c) for c in d["coefficients"])
            domain = tuple(float(v) for v in d["domain"])
            degree = int(d["degree"])
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationError(f"bad curve document: {e}") from e
        if degree != len(coeffs) - 1:
            raise ValidationError("degree field inconsistent with coefficient count")
        return cls(coefficients=coeffs, domain=(domain[0], domain[1]))


@dataclass(frozen=True)
class FitReport:
    """Per-curve fit quality of one fit_polynomial call."""

    mse_upper: float
    mse_lower: float
    residual_max: float
    degree: int

    def __post_init__(self):
        if self.mse_upper < 0 or self.mse_lower < 0 or self.residual_max < 0:
            raise ValidationError("fit errors cannot be negative")


def load_profile(csv_source, min_rows: int = DEFAULT_DEGREE + 2) -> ProfileSamples:
    """Read a profile CSV (header ``x_m,y_upper_m,y_lower_m``) into samples."""
    if hasattr(csv_source, "read"):
        text = csv_source.read()
    else:
        text = Path(csv_source).read_text(encoding="utf-8")
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ValidationError("empty profile CSV") from None
    if tuple(h.strip() for h in header) != PROFILE_CSV_HEADER:
        raise ValidationError(
            f"profile CSV header must be {','.join(PROFILE_CSV_HEADER)}, got {','.join(header)}"
        )
    upper: list[tuple[float, float]] = []
    lower: list[tuple[float, float]] = []
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 3:
            raise ValidationError(f"line {lineno}: expected 3 fields, got {len(row)}")
        try:
            x, yu, yl = (float(v) for v in row)
        except ValueError:
            raise ValidationError(f"line {lineno}: non-numeric value in {row}") from None
        upper.append((x, yu))
        lower.append((x, yl))
    if len(upper) < min_rows:
        raise ValidationError(f"need at least {min_rows} samples, got {len(upper)}")
    xs = [p[0] for p in upper]
    return ProfileSamples(
        points_upper=tuple(upper),
        points_lower=tuple(lower),
        body_length=max(xs) - min(xs),
    )


def reference_profile_path() -> Path:
    """Path of the bundled synthetic unit-chord reference profile."""
    return Path(__file__).parent / "data" / "profile_ref.csv"


def load_reference_profile() -> ProfileSamples:
    return load_profile(reference_profile_path())


def excise_dorsal(
    samples: ProfileSamples,
    x_lo: float = DORSAL_EXCISE_LO,
    x_hi: float = DORSAL_EXCISE_HI,
    min_remaining: int = DEFAULT_DEGREE + 2,
) -> ProfileSamples:
    """Drop upper-contour points with x in the closed window [x_lo, x_hi].

    The lower contour is untouched; sample ordering is preserved.
    """
    if not x_lo < x_hi:
        raise ValidationError(f"excision window is empty: [{x_lo}, {x_hi}]")
    if x_lo < samples.x_min or x_hi > samples.x_max:
        raise ValidationError("excision window must lie within the chord")
    kept = tuple(p for p in samples.points_upper if not (x_lo <= p[0] <= x_hi))
    if len(kept) == len(samples.points_upper):
        return samples
    if len(kept) < min_remaining:
        raise ValidationError(
            f"excision leaves {len(kept)} upper points, need at least {min_remaining}"
        )
    return ProfileSamples(
        points_upper=kept,
        points_lower=samples.points_lower,
        body_length=samples.body_length,
    )


def _find_gap(xs: np.ndarray) -> tuple[int, float, float]:
    spacings = np.diff(xs)
    median = float(np.median(spacings))
    i = int(np.argmax(spacings))
    if spacings[i] <= 2.0 * median:
        raise ValidationError("upper contour has no gap to interpolate")
    return i, float(xs[i]), float(xs[i + 1])


def interpolate_gap(samples: ProfileSamples, n_fill: int) -> ProfileSamples:
    """Bridge the largest upper-contour gap with a natural cubic spline.

    Inserts n_fill new points spaced uniformly across the open gap; all
    pre-existing points are kept as-is. The inserted points inherit C1
    continuity from the spline by construction.
    """
    if n_fill < 0:
        raise ValidationError("n_fill cannot be negative")
    if n_fill == 0:
        return samples
    if len(samples.points_upper) < 4:
        raise ValidationError("cubic gap interpolation needs at least 4 upper points")
    xs = np.array([p[0] for p in samples.points_upper])
    ys = np.array([p[1] for p in samples.points_upper])
    _, gap_lo, gap_hi = _find_gap(xs)
    spline = CubicSpline(xs, ys, bc_type="natural")
    fill_x = gap_lo + (gap_hi - gap_lo) * np.arange(1, n_fill + 1) / (n_fill + 1)
    fill_y = spline(fill_x)
    merged = sorted(
        list(samples.points_upper) + [(float(x), float(y)) for x, y in zip(fill_x, fill_y)]
    )
    return ProfileSamples(
        points_upper=tuple(merged),
        points_lower=samples.points_lower,
        body_length=samples.body_length,
    )


def _lstsq_poly(x_norm: np.ndarray, y: np.ndarray, degree: int) -> np.ndarray:
    """Least-squares monomial coefficients on [0, 1] via a Chebyshev solve."""
    if len(np.unique(x_norm)) < degree + 1:
        raise ComputationError("rank-deficient fit: fewer distinct x values than coefficients")
    t = 2.0 * x_norm - 1.0
    design = _cheb.chebvander(t, degree)
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < degree + 1:
        raise ComputationError(f"rank-deficient fit: rank {rank} < {degree + 1}")
    coef[np.abs(coef) < _CHEB_NOISE_FLOOR * np.abs(coef).max()] = 0.0
    # T_k(2x - 1) expanded into monomials of x
    mono_t = _cheb.cheb2poly(coef)
    composed = np.polynomial.Polynomial(mono_t)(np.polynomial.Polynomial([-1.0, 2.0]))
    out = np.zeros(degree + 1)
    out[: len(composed.coef)] = composed.coef
    return out


def fit_polynomial(
    samples: ProfileSamples, degree: int = DEFAULT_DEGREE
) -> tuple[PolyCurve, PolyCurve, FitReport]:
    """Fit both contours with degree-``degree`` polynomials on the
    normalized chord and report per-curve mean squared errors."""
    if degree < 1:
        raise ValidationError("fit degree must be at least 1")
    x0, chord = samples.x_min, samples.body_length
    curves = []
    mses = []
    residual_max = 0.0
    for pts in (samples.points_upper, samples.points_lower):
        if len(pts) < degree + 1:
            raise ValidationError(
                f"need at least {degree + 1} points per contour, got {len(pts)}"
            )
        x = (np.array([p[0] for p in pts]) - x0) / chord
        y = np.array([p[1] for p in pts])
        coef = _lstsq_poly(x, y, degree)
        resid = y - _poly.polyval(x, coef)
        mses.append(float(np.mean(resid**2)))
        residual_max = max(residual_max, float(np.abs(resid).max()))
        curves.append(PolyCurve(coefficients=tuple(float(c) for c in coef)))
    report = FitReport(
        mse_upper=mses[0], mse_lower=mses[1], residual_max=residual_max, degree=degree
    )
    return curves[0], curves[1], report


def eval_profile(curve: PolyCurve, x):
    """Evaluate the curve at normalized chord position(s) x in [0, 1]."""
    arr = np.asarray(x, dtype=float)
    lo, hi = curve.domain
    if np.any(arr < lo) or np.any(arr > hi):
        raise ValidationError(f"evaluation point outside the curve domain [{lo}, {hi}]")
    val = _poly.polyval(arr, np.array(curve.coefficients))
    return float(val) if np.isscalar(x) or arr.ndim == 0 else val
