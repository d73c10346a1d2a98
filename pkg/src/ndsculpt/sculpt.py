"""Scatterplot sculpting: paint a 2D distribution, backproject it to N-D
points, carve with a fuzzy box eraser, and replenish what carving in other
views took away.

Every view owns a G x G probability map over its plane. The map painted in
the distribution designer is captured as the immutable original; current
maps are recomputed exactly from the surviving points. Dimensions outside
the working plane are completed from the other defined maps (joint or
conditional draws) and randomized uniformly where nothing is defined yet.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.ndimage import gaussian_filter

from .config import EngineConfig
from .errors import (BudgetExhaustedError, DegenerateInputError, EmptyMapError,
                     ValidationError)
from .model import DimensionSpec, _frozen
from .projection import PPABasis, gram_schmidt_complete, point_in_polygon, project_points

Bounds = tuple[float, float, float, float]  # xlo, xhi, ylo, yhi


def domain_box(dims: tuple[DimensionSpec, ...]) -> tuple[np.ndarray, np.ndarray]:
    lo = np.array([min(d.min, d.max) for d in dims])
    hi = np.array([max(d.min, d.max) for d in dims])
    return lo, hi


@dataclass(frozen=True)
class AxisAlignedView:
    """Scatterplot over two data dimensions."""
    i: int
    j: int

    def project(self, points: np.ndarray, dims) -> np.ndarray:
        return np.asarray(points)[:, (self.i, self.j)]

    def bounds(self, dims) -> Bounds:
        (xlo, xhi) = dims[self.i].sorted_bounds()
        (ylo, yhi) = dims[self.j].sorted_bounds()
        return (xlo, xhi, ylo, yhi)


@dataclass(frozen=True)
class GeneralView:
    """Scatterplot over an arbitrary orthonormal plane."""
    basis: PPABasis

    def project(self, points: np.ndarray, dims) -> np.ndarray:
        return project_points(points, self.basis)

    def bounds(self, dims) -> Bounds:
        lo, hi = domain_box(dims)
        c, h = (lo + hi) / 2.0, (hi - lo) / 2.0
        out = []
        for u in (self.basis.x, self.basis.y):
            mid = float(c @ u)
            ext = float(np.abs(u) @ h)
            out += [mid - ext, mid + ext]
        return (out[0], out[1], out[2], out[3])


View = AxisAlignedView | GeneralView


@dataclass(frozen=True)
class ProbabilityMap:
    """Normalized density grid over a view plane; grid[ix, iy].

    `original` is the immutable copy captured when painting completes; it
    never changes afterwards no matter how much carving happens.
    """
    view: View
    bounds: Bounds
    grid: np.ndarray
    original: np.ndarray | None = None

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValidationError("probability map must be a square grid")
        if (g < 0).any():
            raise ValidationError("probability map cells must be non-negative")
        if abs(g.sum() - 1.0) > 1e-9:
            raise ValidationError("probability map must sum to 1")
        object.__setattr__(self, "grid", _frozen(g))
        if self.original is not None:
            object.__setattr__(self, "original", _frozen(np.asarray(self.original, dtype=float)))

    @property
    def size(self) -> int:
        return self.grid.shape[0]

    def capture_original(self) -> "ProbabilityMap":
        return replace(self, original=self.grid.copy())

    def cell_of(self, xy: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        xlo, xhi, ylo, yhi = self.bounds
        g = self.size
        ix = np.clip(((xy[:, 0] - xlo) / (xhi - xlo) * g).astype(int), 0, g - 1)
        iy = np.clip(((xy[:, 1] - ylo) / (yhi - ylo) * g).astype(int), 0, g - 1)
        return ix, iy


@dataclass(frozen=True)
class BrushSpec:
    mode: str          # 'paint' | 'erase'
    size: str          # 'small' | 'medium' | 'large'
    density: float     # 0 leaves the map alone, 1 acts deterministically

    def __post_init__(self):
        if self.mode not in ("paint", "erase"):
            raise ValidationError(f"unknown brush mode {self.mode!r}")
        if not (0.0 <= self.density <= 1.0):
            raise ValidationError("brush density must lie in [0, 1]")


@dataclass(frozen=True)
class PaintedShape:
    """Designer input: closed boundary, centerline where density peaks,
    and a profile of density against normalized centerline distance."""
    boundary: np.ndarray    # (B, 2) view coordinates
    centerline: np.ndarray  # (C, 2)
    profile: np.ndarray     # (S,) densities at uniform distances in [0, 1]

    def __post_init__(self):
        b = np.asarray(self.boundary, dtype=float)
        c = np.atleast_2d(np.asarray(self.centerline, dtype=float))
        p = np.asarray(self.profile, dtype=float)
        if b.ndim != 2 or b.shape[0] < 3:
            raise ValidationError("boundary needs at least three points")
        if p.ndim != 1 or p.size < 2 or (p < 0).any():
            raise ValidationError("profile needs >= 2 non-negative samples")
        object.__setattr__(self, "boundary", _frozen(b))
        object.__setattr__(self, "centerline", _frozen(c))
        object.__setattr__(self, "profile", _frozen(p))


def _cell_centers(bounds: Bounds, g: int) -> tuple[np.ndarray, np.ndarray]:
    xlo, xhi, ylo, yhi = bounds
    xs = xlo + (np.arange(g) + 0.5) * (xhi - xlo) / g
    ys = ylo + (np.arange(g) + 0.5) * (yhi - ylo) / g
    return np.meshgrid(xs, ys, indexing="ij")


def _points_in_polygon(px: np.ndarray, py: np.ndarray, poly: np.ndarray) -> np.ndarray:
    a = poly
    b = np.roll(poly, -1, axis=0)
    inside = np.zeros(px.shape, dtype=bool)
    for (ax, ay), (bx, by) in zip(a, b):
        spans = (ay > py) != (by > py)
        dy = by - ay
        with np.errstate(divide="ignore", invalid="ignore"):
            xs = ax + (py - ay) / dy * (bx - ax)
        inside ^= spans & (xs > px)
    return inside


def _distance_to_polyline(px: np.ndarray, py: np.ndarray,
                          line: np.ndarray, closed: bool = False) -> np.ndarray:
    pts = np.stack([px.ravel(), py.ravel()], axis=1)
    if len(line) == 1:
        d = np.linalg.norm(pts - line[0], axis=1)
        return d.reshape(px.shape)
    a = line
    b = np.roll(line, -1, axis=0) if closed else line[1:]
    a = a if closed else line[:-1]
    seg = b - a
    seg_len2 = np.maximum((seg ** 2).sum(axis=1), 1e-300)
    diff = pts[:, None, :] - a[None, :, :]
    t = np.clip((diff * seg[None, :, :]).sum(axis=2) / seg_len2, 0.0, 1.0)
    proj = a[None, :, :] + t[:, :, None] * seg[None, :, :]
    d = np.linalg.norm(pts[:, None, :] - proj, axis=2).min(axis=1)
    return d.reshape(px.shape)


def rasterize_painted_shape(shape: PaintedShape, view: View, bounds: Bounds,
                            grid_size: int | None = None,
                            config: EngineConfig | None = None) -> ProbabilityMap:
    """Fill the boundary with the profile density: 0 at distance 1 from
    the centerline (the boundary), profile(0) on the centerline itself."""
    config = config or EngineConfig()
    g = grid_size or config.grid_size
    xlo, xhi, ylo, yhi = bounds
    diag = float(np.hypot(xhi - xlo, yhi - ylo))

    boundary = np.asarray(shape.boundary)
    if np.linalg.norm(boundary[0] - boundary[-1]) > config.boundary_close_tolerance * diag:
        raise ValidationError("open boundary: endpoints do not close the shape")
    poly = boundary if np.allclose(boundary[0], boundary[-1]) else np.vstack([boundary, boundary[0]])
    poly = poly[:-1]

    for p in shape.centerline:
        if not point_in_polygon(poly, p):
            raise ValidationError("centerline leaves the boundary")

    px, py = _cell_centers(bounds, g)
    inside = _points_in_polygon(px, py, poly)
    dc = _distance_to_polyline(px, py, shape.centerline)
    db = _distance_to_polyline(px, py, poly, closed=True)
    with np.errstate(invalid="ignore"):
        d = dc / (dc + db)
    d[~np.isfinite(d)] = 0.0
    prof_x = np.linspace(0.0, 1.0, shape.profile.size)
    density = np.interp(d, prof_x, shape.profile) * inside

    if config.gaussian_sigma > 0:
        density = np.maximum(gaussian_filter(density, config.gaussian_sigma), 0.0)
    total = density.sum()
    if total <= 0:
        raise DegenerateInputError("painted shape produced an empty density")
    return ProbabilityMap(view, bounds, density / total)


def brush_map(pm: ProbabilityMap, brush: BrushSpec, position,
              config: EngineConfig | None = None) -> ProbabilityMap:
    """Paint adds a soft (tent kernel) blob of relative mass `density`;
    erase multiplies the covered cells by (1 - density)."""
    config = config or EngineConfig()
    xlo, xhi, ylo, yhi = pm.bounds
    extent = max(xhi - xlo, yhi - ylo)
    radius = config.brush_radius(brush.size) * extent
    px, py = _cell_centers(pm.bounds, pm.size)
    r = np.hypot(px - float(position[0]), py - float(position[1]))
    grid = pm.grid.copy()
    if brush.mode == "paint":
        kernel = np.maximum(1.0 - r / radius, 0.0)
        total = kernel.sum()
        if total > 0 and brush.density > 0:
            grid = grid + brush.density * kernel / total
    else:
        grid = np.where(r <= radius, grid * (1.0 - brush.density), grid)
    mass = grid.sum()
    if mass <= 1e-12:
        raise EmptyMapError("erase removed all probability mass")
    return replace(pm, grid=grid / mass)


def histogram_counts(xy: np.ndarray, bounds: Bounds, g: int) -> np.ndarray:
    xlo, xhi, ylo, yhi = bounds
    if len(xy) == 0:
        return np.zeros((g, g))
    h, _, _ = np.histogram2d(xy[:, 0], xy[:, 1], bins=g,
                             range=[[xlo, xhi], [ylo, yhi]])
    return h


def current_map_grid(points: np.ndarray, labels: np.ndarray, cluster: int,
                     view: View, bounds: Bounds, g: int, dims) -> np.ndarray:
    """Raw per-cell counts of one cluster's points over a view."""
    xy = view.project(points[labels == cluster], dims)
    return histogram_counts(xy, bounds, g)


def sample_from_grid(grid: np.ndarray, bounds: Bounds, n: int,
                     rng: np.random.Generator) -> np.ndarray:
    """Draw 2D positions: cells proportional to density, uniform jitter
    inside the cell."""
    g = grid.shape[0]
    flat = grid.ravel()
    total = flat.sum()
    if total <= 0:
        raise ValidationError("cannot sample from an all-zero map")
    idx = rng.choice(g * g, size=n, p=flat / total)
    ix, iy = np.divmod(idx, g)
    xlo, xhi, ylo, yhi = bounds
    x = xlo + (ix + rng.random(n)) * (xhi - xlo) / g
    y = ylo + (iy + rng.random(n)) * (yhi - ylo) / g
    return np.column_stack([x, y])


@dataclass(frozen=True)
class MapConstraint:
    """A defined distribution that coordinate completion must respect:
    the current map of a painted or carved view."""
    view: AxisAlignedView
    bounds: Bounds
    grid: np.ndarray  # normalized


def _conditional_draw(grid: np.ndarray, row_idx: np.ndarray, axis: int,
                      lo: float, hi: float,
                      rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Sample the free coordinate of `grid` given cell indices of the
    fixed one. axis=0 means rows are fixed (draw columns). Returns values
    and a validity mask (False where the fixed slice has no mass)."""
    sub = grid[row_idx, :] if axis == 0 else grid[:, row_idx].T
    totals = sub.sum(axis=1)
    valid = totals > 0
    g = grid.shape[0]
    out = np.zeros(len(row_idx))
    if valid.any():
        c = np.cumsum(sub[valid], axis=1)
        c = c / c[:, -1:]
        cells = (c < rng.random((int(valid.sum()), 1))).sum(axis=1)
        out[valid] = lo + (cells + rng.random(int(valid.sum()))) * (hi - lo) / g
    return out, valid


def complete_dimensions(plane_dims: tuple[int, int], plane_xy: np.ndarray,
                        constraints: list[MapConstraint],
                        dims: tuple[DimensionSpec, ...],
                        rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Fill all remaining coordinates for points whose plane position is
    known. Defined maps are honored jointly (neither dim drawn yet) or
    conditionally (one dim drawn); untouched dimensions are uniform over
    their axis. Returns (points, valid) where invalid rows hit an empty
    conditional slice and must be redrawn by the caller."""
    n = len(plane_xy)
    nd = len(dims)
    pts = np.full((n, nd), np.nan)
    pts[:, plane_dims[0]] = plane_xy[:, 0]
    pts[:, plane_dims[1]] = plane_xy[:, 1]
    drawn = {plane_dims[0], plane_dims[1]}
    valid = np.ones(n, dtype=bool)

    for con in constraints:
        i, j = con.view.i, con.view.j
        xlo, xhi, ylo, yhi = con.bounds
        g = con.grid.shape[0]
        if i in drawn and j in drawn:
            continue
        if i not in drawn and j not in drawn:
            xy = sample_from_grid(con.grid, con.bounds, n, rng)
            pts[:, i], pts[:, j] = xy[:, 0], xy[:, 1]
            drawn |= {i, j}
            continue
        if i in drawn:
            ix = np.clip(((pts[:, i] - xlo) / (xhi - xlo) * g).astype(int), 0, g - 1)
            vals, ok = _conditional_draw(con.grid, ix, 0, ylo, yhi, rng)
            pts[:, j] = vals
            drawn.add(j)
        else:
            iy = np.clip(((pts[:, j] - ylo) / (yhi - ylo) * g).astype(int), 0, g - 1)
            vals, ok = _conditional_draw(con.grid, iy, 1, xlo, xhi, rng)
            pts[:, i] = vals
            drawn.add(i)
        valid &= ok

    for k in range(nd):
        if k not in drawn:
            lo, hi = dims[k].sorted_bounds()
            pts[:, k] = rng.uniform(lo, hi, n)
    return pts, valid


def backproject_axis_aligned(pm: ProbabilityMap, n: int,
                             constraints: list[MapConstraint],
                             dims: tuple[DimensionSpec, ...],
                             rng: np.random.Generator,
                             config: EngineConfig | None = None,
                             on_exhaust: str = "error") -> tuple[np.ndarray, int]:
    """Generate n N-D points whose (i, j) coordinates follow the painted
    map. Returns (points, dropped) where dropped counts points abandoned
    because completion kept hitting empty conditional slices."""
    config = config or EngineConfig()
    if not isinstance(pm.view, AxisAlignedView):
        raise ValidationError("map is not bound to an axis-aligned view")
    plane = (pm.view.i, pm.view.j)
    out = []
    need = n
    for _ in range(config.backproject_budget):
        if need == 0:
            break
        xy = sample_from_grid(pm.grid, pm.bounds, need, rng)
        pts, valid = complete_dimensions(plane, xy, constraints, dims, rng)
        out.append(pts[valid])
        need -= int(valid.sum())
    if need:
        if on_exhaust == "error":
            raise BudgetExhaustedError(
                "coordinate completion kept violating the defined maps")
    produced = np.vstack(out) if out else np.empty((0, len(dims)))
    return produced, need


def backproject_general(pm: ProbabilityMap, n: int,
                        dims: tuple[DimensionSpec, ...],
                        rng: np.random.Generator,
                        config: EngineConfig | None = None) -> np.ndarray:
    """Generate n points whose projection onto the view plane follows the
    painted map.

    The plane basis is completed to a full orthonormal basis; coordinates
    along the filler vectors are uniform over the domain box's projection
    onto each of them, and points landing outside the data domain are
    rejected and redrawn.
    """
    config = config or EngineConfig()
    if not isinstance(pm.view, GeneralView):
        raise ValidationError("map is not bound to a general view")
    basis = gram_schmidt_complete(pm.view.basis.x, pm.view.basis.y, rng, config)
    lo, hi = domain_box(dims)
    c, h = (lo + hi) / 2.0, (hi - lo) / 2.0
    nd = len(dims)
    mids = basis.vectors @ c
    exts = np.abs(basis.vectors) @ h

    out = []
    need = n
    for _ in range(config.backproject_budget):
        if need == 0:
            break
        coords = np.empty((need, nd))
        coords[:, :2] = sample_from_grid(pm.grid, pm.bounds, need, rng)
        for k in range(2, nd):
            coords[:, k] = rng.uniform(mids[k] - exts[k], mids[k] + exts[k], need)
        pts = coords @ basis.vectors
        ok = ((pts >= lo - 1e-9) & (pts <= hi + 1e-9)).all(axis=1)
        out.append(pts[ok])
        need -= int(ok.sum())
    if need:
        raise BudgetExhaustedError(
            "domain box rejected too many backprojected points")
    return np.vstack(out) if out else np.empty((0, nd))


def carve(points: np.ndarray, labels: np.ndarray, active: set[int],
          view: View, dims: tuple[DimensionSpec, ...],
          center, box_side: float, density: float,
          rng: np.random.Generator) -> np.ndarray:
    """Indices of points removed by one eraser hit: active points that
    project into the box are dropped independently with probability
    `density`. An empty box is a no-op."""
    if not (0.0 <= density <= 1.0):
        raise ValidationError("eraser density must lie in [0, 1]")
    if len(points) == 0:
        return np.empty(0, dtype=int)
    xy = view.project(points, dims)
    half = box_side / 2.0
    inside = ((np.abs(xy[:, 0] - float(center[0])) <= half)
              & (np.abs(xy[:, 1] - float(center[1])) <= half))
    is_active = np.isin(labels, list(active)) if active else np.zeros(len(points), bool)
    candidates = np.flatnonzero(inside & is_active)
    if candidates.size == 0 or density == 0.0:
        return np.empty(0, dtype=int)
    return candidates[rng.random(candidates.size) < density]


def deficit_grid(original: np.ndarray, counts: np.ndarray, p_orig: int) -> np.ndarray:
    """Per-cell missing mass relative to the captured original.

    `original` is the normalized projection histogram captured right after
    backprojection, so before any carving the deficit is exactly zero and
    afterwards it is exactly the carved-away mass (the incremental
    scale-down of the view's probability map)."""
    return np.maximum(original - counts / max(p_orig, 1), 0.0)


def replenish_auto(points: np.ndarray, labels: np.ndarray, cluster: int,
                   repair_view: View, repair_bounds: Bounds,
                   original: np.ndarray, p_orig: int,
                   constraints: list[MapConstraint],
                   dims: tuple[DimensionSpec, ...],
                   rng: np.random.Generator,
                   config: EngineConfig | None = None
                   ) -> tuple[np.ndarray, dict[str, int]]:
    """Fill the deficit between a view's original map and the cluster's
    current projection, batch by batch, until the deficit stops improving
    or the point budget (a multiple of the original count) runs out."""
    config = config or EngineConfig()
    if not isinstance(repair_view, AxisAlignedView):
        raise ValidationError("automatic repair needs an axis-aligned view")
    g = original.shape[0]
    added: list[np.ndarray] = []
    dropped = 0
    budget = int(config.replenish_budget_factor * p_orig)

    def cluster_xy():
        base = points[labels == cluster]
        parts = [repair_view.project(base, dims)] + \
                [repair_view.project(a, dims) for a in added]
        return np.vstack(parts) if parts else np.empty((0, 2))

    deficit = deficit_grid(original, histogram_counts(cluster_xy(), repair_bounds, g), p_orig)
    initial = prev = deficit.sum()
    while prev > 1e-12:
        n_added = sum(len(a) for a in added)
        if n_added >= budget:
            break
        batch = min(max(int(round(prev * p_orig)), 1), budget - n_added)
        plane = sample_from_grid(deficit, repair_bounds, batch, rng)
        pts, valid = complete_dimensions((repair_view.i, repair_view.j), plane,
                                         constraints, dims, rng)
        dropped += int((~valid).sum())
        if valid.any():
            added.append(pts[valid])
        deficit = deficit_grid(original, histogram_counts(cluster_xy(), repair_bounds, g), p_orig)
        now = deficit.sum()
        if prev - now < config.replenish_min_improvement * max(initial, 1e-12):
            break
        prev = now
    new_points = np.vstack(added) if added else np.empty((0, len(dims)))
    return new_points, {"dropped": dropped}


def replenish_manual(points: np.ndarray, labels: np.ndarray, cluster: int,
                     view: View, bounds: Bounds,
                     original: np.ndarray | None, p_orig: int,
                     stroke: np.ndarray, radius_frac: float, density: float,
                     constraints: list[MapConstraint],
                     dims: tuple[DimensionSpec, ...],
                     rng: np.random.Generator,
                     config: EngineConfig | None = None
                     ) -> tuple[np.ndarray, dict[str, int]]:
    """Paint missing points back on by hand. Brushed cells recover their
    original-map deficit scaled by the brush density; without a captured
    original the brush simply deposits a soft blob of new points, which is
    the general editing mode."""
    config = config or EngineConfig()
    if not isinstance(view, AxisAlignedView):
        raise ValidationError("manual repair needs an axis-aligned view")
    if not (0.0 <= density <= 1.0):
        raise ValidationError("brush density must lie in [0, 1]")
    g = original.shape[0] if original is not None else config.grid_size
    xlo, xhi, ylo, yhi = bounds
    extent = max(xhi - xlo, yhi - ylo)
    radius = radius_frac * extent

    stroke = np.atleast_2d(np.asarray(stroke, dtype=float))
    in_bounds = ((stroke[:, 0] >= xlo) & (stroke[:, 0] <= xhi)
                 & (stroke[:, 1] >= ylo) & (stroke[:, 1] <= yhi))
    warnings = {"outside_stroke_points": int((~in_bounds).sum()), "dropped": 0}
    stroke = stroke[in_bounds]
    if len(stroke) == 0 or density == 0.0:
        return np.empty((0, len(dims))), warnings

    px, py = _cell_centers(bounds, g)
    dist = _distance_to_polyline(px, py, stroke)
    brushed = dist <= radius
    if original is not None:
        xy = view.project(points[labels == cluster], dims)
        target = deficit_grid(original, histogram_counts(xy, bounds, g), p_orig) * brushed
        n_new = int(round(target.sum() * p_orig * density))
    else:
        target = np.maximum(1.0 - dist / radius, 0.0) * brushed
        area = brushed.sum() / (g * g)
        n_new = int(round(density * max(p_orig, 1) * area))
    if n_new == 0 or target.sum() <= 0:
        return np.empty((0, len(dims))), warnings

    plane = sample_from_grid(target, bounds, n_new, rng)
    pts, valid = complete_dimensions((view.i, view.j), plane, constraints, dims, rng)
    warnings["dropped"] = int((~valid).sum())
    return pts[valid], warnings


def replenish_general(original_map: ProbabilityMap, p_orig: int,
                      dims: tuple[DimensionSpec, ...],
                      rng: np.random.Generator,
                      config: EngineConfig | None = None) -> np.ndarray:
    """Repair a non-axis-aligned view by bringing all points back: the
    cluster is regenerated wholesale from this view's original map, which
    deliberately forgets carving done in overlapping views."""
    if original_map.original is None:
        raise ValidationError("no original map captured for this view")
    source = replace(original_map, grid=original_map.original, original=None)
    return backproject_general(source, p_orig, dims, rng, config)
