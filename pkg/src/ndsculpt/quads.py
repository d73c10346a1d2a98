"""Connection quadrilaterals between adjacent parallel-coordinate axes.

Four clicks straddling one axis gap snap into a trapezoid (simple click
polygon, direct relationship) or a bowtie (self-intersecting, inverse
relationship). Generation walks dimensions left to right: the value drawn
on the left axis picks a sliding window inside the right range, and
candidates from the next dimension's density (or a uniform draw) are
rejection-sampled until one lands in the window. The window width shrinks
as the cluster's correlation setting grows.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import EngineConfig
from .errors import DegenerateInputError, ValidationError
from .model import DimensionSpec
from .pdfsketch import DiscretePDF, _accumulate, _invert, clip_density


@dataclass(frozen=True)
class CorrelationSetting:
    """Slider value in [0, 1]; 1 means the narrowest sliding window."""
    c: float

    def __post_init__(self):
        if not (0.0 <= self.c <= 1.0):
            raise ValidationError("correlation must lie in [0, 1]")

    def window_fraction(self, config: EngineConfig) -> float:
        """Window width as a fraction of the right range; linear in c,
        w(0)=1, w(1)=the configured minimum."""
        return 1.0 - self.c * (1.0 - config.min_window_fraction)


@dataclass(frozen=True)
class SnapTick:
    """A magnetic position on an axis that quadrilateral vertices snap to."""
    axis: int
    value: float   # data units
    param: float   # display parameter in [0, 1]
    origin: str    # 'pdf-local-minimum' | 'quad-vertex'


@dataclass(frozen=True)
class Quadrilateral:
    """A snapped connection shape between axes left_axis and left_axis+1.

    Ranges are in data units, ordered by display direction (the first
    entry sits at the lower display parameter; on a reversed axis it may
    be the numerically larger value). A trapezoid connects top to top, a
    bowtie connects top to bottom.
    """
    cluster: int
    left_axis: int
    kind: str  # 'trapezoid' | 'bowtie'
    left_range: tuple[float, float]
    right_range: tuple[float, float]

    def __post_init__(self):
        if self.kind not in ("trapezoid", "bowtie"):
            raise ValidationError(f"unknown quadrilateral kind {self.kind!r}")

    @property
    def right_axis(self) -> int:
        return self.left_axis + 1

    def param_ranges(self, dims: tuple[DimensionSpec, ...]):
        l = dims[self.left_axis]
        r = dims[self.right_axis]
        return ((float(l.to_param(self.left_range[0])), float(l.to_param(self.left_range[1]))),
                (float(r.to_param(self.right_range[0])), float(r.to_param(self.right_range[1]))))


def _orient(p, q, r) -> float:
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def _properly_intersects(a, b, c, d) -> bool:
    o1, o2 = _orient(a, b, c), _orient(a, b, d)
    o3, o4 = _orient(c, d, a), _orient(c, d, b)
    if 0.0 in (o1, o2, o3, o4):
        raise DegenerateInputError("collinear quadrilateral vertices")
    return (o1 > 0) != (o2 > 0) and (o3 > 0) != (o4 > 0)


def is_self_intersecting(clicks: np.ndarray) -> bool:
    """True when the closed click polygon crosses itself (bowtie)."""
    v = np.asarray(clicks, dtype=float)
    return (_properly_intersects(v[0], v[1], v[2], v[3])
            or _properly_intersects(v[1], v[2], v[3], v[0]))


def _axis_pair(clicks: np.ndarray, n_dims: int) -> tuple[int, int]:
    nearest = np.clip(np.round(clicks[:, 0]).astype(int), 0, n_dims - 1)
    axes = sorted(set(int(a) for a in nearest))
    if len(axes) == 2:
        if axes[1] - axes[0] != 1:
            raise ValidationError("clicks span more than one axis gap")
        return axes[0], axes[1]
    if len(axes) == 1:
        a = axes[0]
        if clicks[:, 0].mean() >= a and a + 1 < n_dims:
            return a, a + 1
        if a - 1 >= 0:
            return a - 1, a
        return a, a + 1
    raise ValidationError("clicks span more than one axis gap")


def classify_and_snap_quad(clicks, dims: tuple[DimensionSpec, ...],
                           ticks: dict[int, list[SnapTick]] | None = None,
                           cluster: int = 0,
                           config: EngineConfig | None = None) -> Quadrilateral:
    """Snap four clicks (plot coordinates) into a trapezoid or bowtie.

    Each vertex is extended along its most horizontal incident side until
    it reaches the nearer axis of the pair, then pulled onto any existing
    tick within the snap tolerance. Exactly two vertices must land on each
    axis and both snapped ranges must keep a nonzero height.
    """
    config = config or EngineConfig()
    v = np.asarray(clicks, dtype=float)
    if v.shape != (4, 2):
        raise ValidationError("a quadrilateral needs exactly four clicks")
    left, right = _axis_pair(v, len(dims))
    bowtie = is_self_intersecting(v)

    snapped: dict[int, list[float]] = {left: [], right: []}
    for i in range(4):
        p = v[i]
        ax = left if abs(p[0] - left) <= abs(p[0] - right) else right
        sides = [(v[i - 1], p), (p, v[(i + 1) % 4])]
        deltas = [(b[0] - a[0], b[1] - a[1]) for a, b in sides]
        # more horizontal: smaller |dy|/|dx|, compared without dividing
        d0, d1 = deltas
        if abs(d0[1]) * abs(d1[0]) <= abs(d1[1]) * abs(d0[0]):
            dx, dy = d0
        else:
            dx, dy = d1
        if dx == 0.0:
            dx, dy = d1 if (dx, dy) == d0 else d0
        if dx == 0.0:
            raise DegenerateInputError("vertex has no horizontal side to extend")
        y = p[1] + (dy / dx) * (ax - p[0])
        snapped[ax].append(float(np.clip(y, 0.0, 1.0)))

    if len(snapped[left]) != 2 or len(snapped[right]) != 2:
        raise ValidationError("three snapped vertices collapse to the same axis")

    if ticks:
        for ax in (left, right):
            axis_ticks = ticks.get(ax, [])
            if axis_ticks:
                params = np.array([t.param for t in axis_ticks])
                for k, y in enumerate(snapped[ax]):
                    j = int(np.argmin(np.abs(params - y)))
                    if abs(params[j] - y) <= config.snap_tolerance:
                        snapped[ax][k] = float(params[j])

    ranges = {}
    for ax in (left, right):
        t_lo, t_hi = sorted(snapped[ax])
        if t_hi - t_lo <= 1e-12:
            raise ValidationError(
                f"zero-height range after snapping on axis {dims[ax].name!r}")
        ranges[ax] = (float(dims[ax].to_value(t_lo)), float(dims[ax].to_value(t_hi)))

    return Quadrilateral(cluster, left, "bowtie" if bowtie else "trapezoid",
                         ranges[left], ranges[right])


def collect_ticks(pdfs: dict[int, DiscretePDF],
                  quads: list[Quadrilateral],
                  dims: tuple[DimensionSpec, ...],
                  config: EngineConfig | None = None) -> dict[int, list[SnapTick]]:
    """Snap positions per axis: density valleys (local minima of height)
    plus the extended support endpoints of each sketch, plus every snapped
    quadrilateral vertex. Deduplicated within the snap tolerance."""
    config = config or EngineConfig()
    raw: dict[int, list[SnapTick]] = {}

    def add(axis: int, param: float, origin: str):
        param = float(np.clip(param, 0.0, 1.0))
        raw.setdefault(axis, []).append(
            SnapTick(axis, float(dims[axis].to_value(param)), param, origin))

    for dim, pdf in pdfs.items():
        d = pdf.density
        grid = np.linspace(0.0, 1.0, d.size)
        support = np.nonzero(d > 0)[0]
        if support.size == 0:
            continue
        first, last = support[0], support[-1]
        add(dim, grid[first], "pdf-local-minimum")
        add(dim, grid[last], "pdf-local-minimum")
        interior = np.nonzero((d[1:-1] < d[:-2]) & (d[1:-1] < d[2:]))[0] + 1
        for i in interior:
            if first < i < last:
                add(dim, grid[i], "pdf-local-minimum")

    for q in quads:
        (l_lo, l_hi), (r_lo, r_hi) = q.param_ranges(dims)
        add(q.left_axis, l_lo, "quad-vertex")
        add(q.left_axis, l_hi, "quad-vertex")
        add(q.right_axis, r_lo, "quad-vertex")
        add(q.right_axis, r_hi, "quad-vertex")

    out: dict[int, list[SnapTick]] = {}
    for axis, ts in raw.items():
        ts.sort(key=lambda t: t.param)
        kept: list[SnapTick] = []
        for t in ts:
            if not kept or t.param - kept[-1].param > config.snap_tolerance:
                kept.append(t)
        out[axis] = kept
    return out


def _window(t_rel: np.ndarray, kind: str, c: CorrelationSetting,
            r_lo: np.ndarray | float, r_hi: np.ndarray | float,
            config: EngineConfig):
    """Sliding window on the right axis, in display parameters.

    The window keeps its full width and is shifted to fit inside the right
    range, so zero correlation really does open it up to the whole range.
    """
    t = np.clip(t_rel, 0.0, 1.0)
    if kind == "bowtie":
        t = 1.0 - t
    w = c.window_fraction(config)
    rel_lo = np.clip(t - w / 2.0, 0.0, 1.0 - w)
    span = r_hi - r_lo
    return r_lo + rel_lo * span, r_lo + (rel_lo + w) * span


class _ParamSampler:
    """Draws display-parameter values for one dimension, optionally
    restricted to a sub-interval via direct CDF clipping."""

    def __init__(self, pdf_cdf_values: np.ndarray | None):
        self.values = pdf_cdf_values  # None means uniform over the axis

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.values is None:
            return rng.random(n)
        return _invert(self.values, rng.random(n))

    def draw_between(self, rng: np.random.Generator,
                     lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        u = rng.random(len(lo))
        if self.values is None:
            return lo + u * (hi - lo)
        grid = np.linspace(0.0, 1.0, self.values.size)
        f_lo = np.interp(lo, grid, self.values)
        f_hi = np.interp(hi, grid, self.values)
        t = _invert(self.values, f_lo + u * np.maximum(f_hi - f_lo, 0.0))
        return np.clip(t, lo, hi)

    def mass_between(self, lo: float, hi: float) -> float:
        if self.values is None:
            return max(hi - lo, 0.0)
        grid = np.linspace(0.0, 1.0, self.values.size)
        return float(np.interp(hi, grid, self.values) - np.interp(lo, grid, self.values))


def sample_linked_value(prev_value: float, quad: Quadrilateral,
                        corr: CorrelationSetting,
                        dims: tuple[DimensionSpec, ...],
                        rng: np.random.Generator,
                        next_pdf: DiscretePDF | None = None,
                        config: EngineConfig | None = None) -> tuple[float, bool]:
    """One linked draw for the dimension on the quad's right side.

    Returns (value, fell_back): candidates come from the next dimension's
    density (or a uniform draw over its axis) and are rejected until one
    lands inside the sliding window; when the budget runs out the value is
    drawn uniformly inside the window and flagged.
    """
    config = config or EngineConfig()
    (l_lo, l_hi), (r_lo, r_hi) = quad.param_ranges(dims)
    axis_r = dims[quad.right_axis]
    p = float(dims[quad.left_axis].to_param(prev_value))
    if not (min(l_lo, l_hi) - 1e-9 <= p <= max(l_lo, l_hi) + 1e-9):
        raise ValidationError("previous value lies outside the quad's left range")
    t_rel = np.array([(p - l_lo) / (l_hi - l_lo)])
    w_lo, w_hi = _window(t_rel, quad.kind, corr, r_lo, r_hi, config)

    sampler = _ParamSampler(
        _accumulate(next_pdf.rebind(axis_r).density) if next_pdf else None)
    for _ in range(config.rejection_budget):
        cand = float(sampler.draw(rng, 1)[0])
        if w_lo[0] <= cand <= w_hi[0]:
            return float(axis_r.to_value(cand)), False
    fallback = float(sampler_uniform(rng, w_lo, w_hi)[0])
    return float(axis_r.to_value(fallback)), True


def sampler_uniform(rng: np.random.Generator, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    return lo + rng.random(len(lo)) * (hi - lo)


def _union_length(ranges: list[tuple[float, float]]) -> float:
    if not ranges:
        return 0.0
    rs = sorted((min(a, b), max(a, b)) for a, b in ranges)
    total, cur_lo, cur_hi = 0.0, rs[0][0], rs[0][1]
    for lo, hi in rs[1:]:
        if lo > cur_hi:
            total += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
        else:
            cur_hi = max(cur_hi, hi)
    return total + (cur_hi - cur_lo)


def quad_value_ranges_on_axis(quads: list[Quadrilateral], axis: int):
    """Data-unit ranges that quadrilaterals occupy on one axis (their
    sketch-clipping ranges)."""
    out = []
    for q in quads:
        if q.left_axis == axis:
            out.append(q.left_range)
        if q.right_axis == axis:
            out.append(q.right_range)
    return out


def generate_cluster_samples(cluster: int,
                             quads: list[Quadrilateral],
                             pdfs: dict[int, DiscretePDF],
                             corr: CorrelationSetting,
                             n: int,
                             dims: tuple[DimensionSpec, ...],
                             rng: np.random.Generator,
                             config: EngineConfig | None = None
                             ) -> tuple[np.ndarray, dict[str, int]]:
    """Generate n points for one cluster, filling dimensions left to right.

    A dimension on a quad's right side draws through the sliding window; a
    dimension with only a sketched density uses inverse transform
    sampling; anything else is uniform over its axis. A dimension that is
    the left side of a quad is confined to that quad's left range, and a
    windowed draw that violates the next quad's left range restarts the
    whole sample. Only this cluster's points are produced; callers swap
    them into the dataset so other clusters stay untouched.
    """
    config = config or EngineConfig()
    if n < 1:
        raise ValidationError("need at least one sample")
    nd = len(dims)
    mine = [q for q in quads if q.cluster == cluster]
    by_pair: dict[int, list[Quadrilateral]] = {}
    for q in mine:
        if q.right_axis >= nd:
            raise ValidationError("quadrilateral axis pair out of range")
        by_pair.setdefault(q.left_axis, []).append(q)

    samplers: list[_ParamSampler] = []
    for j in range(nd):
        pdf = pdfs.get(j)
        if pdf is None:
            samplers.append(_ParamSampler(None))
            continue
        pdf = pdf.rebind(dims[j])
        clip = quad_value_ranges_on_axis(mine, j)
        if clip:
            try:
                density = clip_density(pdf, dims[j], clip)
            except ValidationError:
                raise ValidationError(
                    f"no density left on axis {dims[j].name!r} after "
                    "clipping to its quadrilateral ranges") from None
        else:
            density = pdf.density
        samplers.append(_ParamSampler(_accumulate(density)))

    # static contradiction check between consecutive quad pairs
    for j, here in by_pair.items():
        there = by_pair.get(j + 1)
        if not there:
            continue
        left_union = [q.param_ranges(dims)[0] for q in there]
        for q in here:
            r = q.param_ranges(dims)[1]
            if not any(max(r[0], min(a, b)) < min(r[1], max(a, b)) + 1e-12
                       for a, b in left_union):
                raise ValidationError(
                    f"contradictory quadrilateral constraints on axis "
                    f"{dims[j + 1].name!r}")

    warnings = {"rejection_fallbacks": 0, "restart_fallbacks": 0}
    out = np.empty((n, nd))
    idx = np.arange(n)

    for round_no in range(config.restart_rounds):
        last_round = round_no == config.restart_rounds - 1
        m = len(idx)
        vals = np.empty((m, nd))
        branch: dict[int, np.ndarray] = {}
        for j, qs in by_pair.items():
            if len(qs) == 1:
                branch[j] = np.zeros(m, dtype=int)
            else:
                lens = np.array([abs(np.subtract(*q.param_ranges(dims)[0]))
                                 for q in qs])
                branch[j] = rng.choice(len(qs), size=m, p=lens / lens.sum())
        restart = np.zeros(m, dtype=bool)

        for j in range(nd):
            qs_left = by_pair.get(j)       # this dim is a left side
            qs_right = by_pair.get(j - 1)  # this dim is a right side
            a_lo = a_hi = None
            if qs_left is not None:
                pr = np.array([q.param_ranges(dims)[0] for q in qs_left])
                a_lo, a_hi = pr[branch[j], 0], pr[branch[j], 1]
                a_lo, a_hi = np.minimum(a_lo, a_hi), np.maximum(a_lo, a_hi)

            if qs_right is None:
                if a_lo is None:
                    vals[:, j] = dims[j].to_value(samplers[j].draw(rng, m))
                else:
                    for b in np.unique(branch[j]):
                        sel = branch[j] == b
                        if samplers[j].mass_between(a_lo[sel][0], a_hi[sel][0]) <= 0:
                            raise ValidationError(
                                f"contradictory constraints leave no density "
                                f"on axis {dims[j].name!r}")
                    vals[:, j] = dims[j].to_value(
                        samplers[j].draw_between(rng, a_lo, a_hi))
                continue

            prev_q = np.array([q.param_ranges(dims) for q in qs_right])
            bsel = branch[j - 1]
            l_lo, l_hi = prev_q[bsel, 0, 0], prev_q[bsel, 0, 1]
            r_lo, r_hi = prev_q[bsel, 1, 0], prev_q[bsel, 1, 1]
            kinds = np.array([q.kind == "bowtie" for q in qs_right])[bsel]
            prev_p = np.asarray(dims[j - 1].to_param(vals[:, j - 1]))
            t_rel = (prev_p - l_lo) / (l_hi - l_lo)
            t_eff = np.where(kinds, 1.0 - np.clip(t_rel, 0, 1),
                             np.clip(t_rel, 0, 1))
            w = corr.window_fraction(config)
            rel_lo = np.clip(t_eff - w / 2.0, 0.0, 1.0 - w)
            span = r_hi - r_lo
            w_lo, w_hi = r_lo + rel_lo * span, r_lo + (rel_lo + w) * span

            got = np.zeros(m, dtype=bool)
            cand = np.empty(m)
            draws = 0
            while not got.all() and draws < config.rejection_budget:
                pending = ~got
                c = samplers[j].draw(rng, int(pending.sum()))
                ok = (c >= w_lo[pending]) & (c <= w_hi[pending])
                hit = np.flatnonzero(pending)[ok]
                cand[hit] = c[ok]
                got[hit] = True
                draws += 1
            fell_back = ~got
            if fell_back.any():
                warnings["rejection_fallbacks"] += int(fell_back.sum())
                cand[fell_back] = sampler_uniform(
                    rng, w_lo[fell_back], w_hi[fell_back])

            if a_lo is not None:
                bad = (cand < a_lo) | (cand > a_hi)
                if last_round and bad.any():
                    f_lo = np.maximum(w_lo[bad], a_lo[bad])
                    f_hi = np.minimum(w_hi[bad], a_hi[bad])
                    empty = f_lo >= f_hi
                    f_lo[empty], f_hi[empty] = w_lo[bad][empty], w_hi[bad][empty]
                    warnings["restart_fallbacks"] += int(bad.sum())
                    cand[bad] = sampler_uniform(rng, f_lo, f_hi)
                else:
                    restart |= bad
            vals[:, j] = dims[j].to_value(cand)

        done = ~restart
        out[idx[done]] = vals[done]
        idx = idx[restart]
        if len(idx) == 0:
            break

    return out, warnings
