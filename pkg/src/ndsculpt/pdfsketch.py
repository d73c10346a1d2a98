"""Freehand curve along a parallel-coordinates axis -> 1D density -> samples.

Plot space: axis i is the vertical line x = i, and positions along an axis
are display parameters y in [0, 1] (y=0 at the axis min end). A stroke's
height over the axis baseline is its horizontal distance from the axis.

The pipeline: resample the stroke at equal arc length, shift heights so
the lowest point touches the baseline, extend the curve ends down to the
baseline, normalize to unit integral, accumulate into a discrete CDF, and
draw values by inverse transform sampling with linear (tent filter)
interpolation inside each CDF bin.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import EngineConfig
from .errors import DegenerateInputError, ValidationError
from .model import Dataset, DimensionSpec, _frozen


@dataclass(frozen=True)
class Stroke:
    """An ordered freehand polyline in plot coordinates."""
    points: np.ndarray  # (M, 2)
    cluster: int = 0

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
            raise ValidationError("a stroke needs at least two 2D points")
        object.__setattr__(self, "points", _frozen(pts))


@dataclass(frozen=True)
class DiscretePDF:
    """Sketched density for one dimension.

    `density` holds K samples at uniform nodes over the display parameter
    u in [0, 1]; (lo, hi) are the axis bounds captured at sketch time, so
    u=0 maps to lo. The trapezoidal integral over u is 1, which makes the
    integral over the data range 1 as well. Curves produced by
    curve_to_pdf additionally have density 0 at both end nodes (baseline
    extension).
    """
    dim: int
    lo: float
    hi: float
    density: np.ndarray  # (K,)

    def __post_init__(self):
        d = np.asarray(self.density, dtype=float)
        if d.ndim != 1 or d.size < 2:
            raise ValidationError("density needs at least two samples")
        if (d < 0).any():
            raise ValidationError("density samples must be non-negative")
        total = np.trapezoid(d, dx=1.0 / (d.size - 1))
        if abs(total - 1.0) > 1e-9:
            raise ValidationError("density must integrate to 1")
        object.__setattr__(self, "density", _frozen(d))

    @property
    def samples(self) -> int:
        return self.density.size

    def value_density(self) -> np.ndarray:
        """Density per data unit instead of per unit display parameter."""
        return self.density / abs(self.hi - self.lo)

    def rebind(self, axis: DimensionSpec) -> "DiscretePDF":
        """Attach the same curve shape to the axis's current bounds."""
        if (self.lo, self.hi) == (axis.min, axis.max):
            return self
        return DiscretePDF(self.dim, axis.min, axis.max, self.density)


@dataclass(frozen=True)
class DiscreteCDF:
    """Cumulative form of a DiscretePDF on the same node grid.

    values[0] = 0, values[-1] = 1, non-decreasing. (lo, hi) map the node
    grid back to data values.
    """
    lo: float
    hi: float
    values: np.ndarray  # (K,)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v[0] != 0.0 or v[-1] != 1.0 or (np.diff(v) < 0).any():
            raise ValidationError("CDF must rise monotonically from 0 to 1")
        object.__setattr__(self, "values", _frozen(v))


def resample_stroke(points: np.ndarray, k: int) -> np.ndarray:
    """Resample a polyline to k points at equal arc-length spacing."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ValidationError("need at least two stroke points")
    if k < 2:
        raise ValidationError("need at least two output points")
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    total = seg.sum()
    if total == 0.0:
        raise DegenerateInputError("all stroke points coincide")
    s = np.concatenate([[0.0], np.cumsum(seg)])
    target = np.linspace(0.0, total, k)
    out = np.column_stack([np.interp(target, s, pts[:, 0]),
                           np.interp(target, s, pts[:, 1])])
    out[0], out[-1] = pts[0], pts[-1]
    return out


def match_axis(points: np.ndarray, dims: tuple[DimensionSpec, ...]) -> DimensionSpec:
    """Bind a stroke to the axis nearest its leftmost point.

    Rejected if the leftmost point sits farther than half the inter-axis
    spacing from every axis.
    """
    pts = np.asarray(points, dtype=float)
    leftmost = pts[np.argmin(pts[:, 0])]
    idx = int(np.clip(round(leftmost[0]), 0, len(dims) - 1))
    if abs(leftmost[0] - idx) > 0.5:
        raise ValidationError("stroke is not close enough to any axis")
    return dims[idx]


def curve_to_pdf(curve: np.ndarray, axis: DimensionSpec,
                 samples: int | None = None,
                 config: EngineConfig | None = None) -> DiscretePDF:
    """Interpret a resampled curve beside `axis` as that dimension's density.

    Heights are measured from the axis line, shifted so the lowest curve
    point touches the baseline, and the curve ends are extended straight
    down to the baseline; outside the stroke's extent the density is zero.
    A curve that is flat after the shift has zero integral and is rejected
    as degenerate (sketch a plateau with baseline endpoints to get a
    uniform density).
    """
    config = config or EngineConfig()
    k = samples or config.pdf_samples
    pts = np.asarray(curve, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ValidationError("need at least two curve points")

    t = np.clip(pts[:, 1], 0.0, 1.0)
    h = pts[:, 0] - axis.index
    h = h - h.min()

    order = np.argsort(t, kind="stable")
    t, h = t[order], h[order]
    # np.interp needs strictly increasing abscissae: average duplicate t's
    tu, inverse = np.unique(t, return_inverse=True)
    hu = np.zeros_like(tu)
    np.add.at(hu, inverse, h)
    hu /= np.bincount(inverse).astype(float)
    if tu.size < 2:
        raise DegenerateInputError("curve has no extent along the axis")

    grid = np.linspace(0.0, 1.0, k)
    density = np.interp(grid, tu, hu)
    density[(grid < tu[0]) | (grid > tu[-1])] = 0.0
    density[0] = density[-1] = 0.0

    total = np.trapezoid(density, dx=1.0 / (k - 1))
    if total <= 1e-12:
        raise DegenerateInputError("degenerate PDF: curve is flat after the baseline shift")
    return DiscretePDF(axis.index, axis.min, axis.max, density / total)


def pdf_to_cdf(pdf: DiscretePDF) -> DiscreteCDF:
    """Running trapezoidal integral, renormalized to end at exactly 1."""
    return DiscreteCDF(pdf.lo, pdf.hi, _accumulate(pdf.density))


def _accumulate(density: np.ndarray) -> np.ndarray:
    k = density.size
    inc = (density[:-1] + density[1:]) * (0.5 / (k - 1))
    values = np.concatenate([[0.0], np.cumsum(inc)])
    values /= values[-1]
    values[-1] = 1.0
    return values


def _invert(values: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Inverse CDF lookup in display-parameter units, tent filter inside
    the bracketing bin."""
    j = np.searchsorted(values, u, side="right")
    j = np.clip(j, 1, values.size - 1)
    i = j - 1
    frac = (u - values[i]) / (values[j] - values[i])
    return (i + frac) / (values.size - 1)


def sample_inverse_transform(cdf: DiscreteCDF, u):
    """Map uniform u in [0, 1) to a data value on the sketched axis."""
    u_arr = np.asarray(u, dtype=float)
    if (u_arr < 0).any() or (u_arr >= 1).any():
        raise ValidationError("u must lie in [0, 1)")
    t = _invert(cdf.values, u_arr)
    out = cdf.lo + t * (cdf.hi - cdf.lo)
    return float(out) if np.isscalar(u) or u_arr.ndim == 0 else out


def clip_density(pdf: DiscretePDF, axis: DimensionSpec,
                 value_ranges) -> np.ndarray:
    """Zero the density outside a union of data-value ranges and
    renormalize (quadrilaterals on an axis clip its sketch)."""
    grid = np.linspace(0.0, 1.0, pdf.samples)
    keep = np.zeros(pdf.samples, dtype=bool)
    for lo, hi in value_ranges:
        a, b = sorted((float(axis.to_param(lo)), float(axis.to_param(hi))))
        keep |= (grid >= a) & (grid <= b)
    density = np.where(keep, pdf.density, 0.0)
    total = np.trapezoid(density, dx=1.0 / (pdf.samples - 1))
    if total <= 1e-12:
        raise ValidationError(
            "clip ranges leave zero density on the sketched axis")
    return density / total


def _merge_param_ranges(param_ranges) -> list[tuple[float, float]]:
    rs = sorted((min(a, b), max(a, b)) for a, b in param_ranges)
    merged: list[tuple[float, float]] = []
    for lo, hi in rs:
        lo, hi = max(lo, 0.0), min(hi, 1.0)
        if hi <= lo:
            continue
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def _sample_clipped(values: np.ndarray, param_ranges, u: np.ndarray) -> np.ndarray:
    """Inverse-transform draw restricted to a union of parameter ranges:
    pick a range proportionally to its CDF mass, then invert the
    conditional inside it. Exact at the range boundaries."""
    grid = np.linspace(0.0, 1.0, values.size)
    merged = _merge_param_ranges(param_ranges)
    if not merged:
        raise ValidationError("clip ranges have no overlap with the axis")
    f_lo = np.array([np.interp(lo, grid, values) for lo, _ in merged])
    f_hi = np.array([np.interp(hi, grid, values) for _, hi in merged])
    masses = np.maximum(f_hi - f_lo, 0.0)
    total = masses.sum()
    if total <= 1e-12:
        raise ValidationError(
            "clip ranges leave zero density on the sketched axis")
    cum = np.concatenate([[0.0], np.cumsum(masses)])
    pos = u * total
    r = np.clip(np.searchsorted(cum, pos, side="right") - 1, 0, len(merged) - 1)
    t = _invert(values, f_lo[r] + (pos - cum[r]))
    bounds = np.array(merged)
    return np.clip(t, bounds[r, 0], bounds[r, 1])


def apply_pdf_to_dimension(ds: Dataset, dim: int, pdf: DiscretePDF,
                           clip_ranges=None,
                           rng: np.random.Generator | None = None) -> Dataset:
    """Resample every point's coordinate in `dim` i.i.d. from the sketch.

    All clusters are affected alike; no other dimension changes. When the
    axis carries quadrilaterals their value ranges clip the density first.
    """
    if pdf.dim != dim:
        raise ValidationError("density belongs to a different dimension")
    axis = ds.dims[dim]
    pdf = pdf.rebind(axis)
    values = _accumulate(pdf.density)
    rng = rng or np.random.default_rng()
    u = rng.random(ds.n_points)
    if clip_ranges:
        ranges = [(float(axis.to_param(lo)), float(axis.to_param(hi)))
                  for lo, hi in clip_ranges]
        t = _sample_clipped(values, ranges, u)
    else:
        t = _invert(values, u)
    pts = ds.points.copy()
    pts[:, dim] = axis.to_value(t)
    return Dataset(ds.dims, pts, ds.cluster_of)


def sample_values(pdf: DiscretePDF, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n data values from a sketched density."""
    t = _invert(_accumulate(pdf.density), rng.random(n))
    return pdf.lo + t * (pdf.hi - pdf.lo)
