"""Command-sourced editing session.

Every edit is a serialized command; the session state is a pure fold over
(seed, command prefix). Undo and redo move a cursor through the log and
rebuild the state by replaying from the nearest checkpoint, which keeps
them trivially correct. Scripts are the log plus the seed, so a headless
run reproduces a session bit for bit.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, replace, field

import numpy as np

from . import model, pdfsketch, quads as quadmod, sculpt
from .config import EngineConfig
from .errors import EngineError, ParseError, ValidationError
from .model import ClusterState, Dataset
from .projection import PPABasis, TouchpadPolygon, ppa_from_touchpad
from .rng import RngHandle
from .sculpt import (AxisAlignedView, GeneralView, MapConstraint,
                     ProbabilityMap, View)

CLUSTER_COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")

SCRIPT_HEADER = "ndsculpt-script"
SCRIPT_VERSION = 1

MUTATING_KINDS = frozenset({
    "set-seed", "import", "set-range", "reorder", "sketch-pdf", "draw-quad",
    "set-correlation", "select-view", "paint-shape", "brush", "backproject",
    "carve", "replenish-auto", "replenish-manual", "set-active",
})
QUERY_KINDS = frozenset({"export", "get-projection", "get-histogram",
                         "get-state-summary", "get-points"})


@dataclass(frozen=True)
class ViewRecord:
    id: int
    view: View
    bounds: sculpt.Bounds


@dataclass(frozen=True)
class SessionState:
    config: EngineConfig
    rng: RngHandle
    dataset: Dataset
    pdfs: dict[int, pdfsketch.DiscretePDF] = field(default_factory=dict)
    quads: tuple[quadmod.Quadrilateral, ...] = ()
    correlations: dict[int, float] = field(default_factory=dict)
    clusters: dict[int, ClusterState] = field(default_factory=dict)
    views: tuple[ViewRecord, ...] = ()
    selected_view: int | None = None
    painted: dict[tuple[int, int], ProbabilityMap] = field(default_factory=dict)
    originals: dict[tuple[int, int], tuple[np.ndarray, int]] = field(default_factory=dict)
    carved: frozenset = frozenset()

    def correlation(self, cluster: int) -> quadmod.CorrelationSetting:
        return quadmod.CorrelationSetting(self.correlations.get(cluster, 0.5))

    def view_record(self, view_id: int) -> ViewRecord:
        for rec in self.views:
            if rec.id == view_id:
                return rec
        raise ValidationError(f"unknown view {view_id}")

    def active_clusters(self) -> set[int]:
        return {c.id for c in self.clusters.values() if c.active}


def initial_state(seed: int, config: EngineConfig | None = None) -> SessionState:
    config = config or EngineConfig()
    rng = RngHandle(seed)
    ds = model.create_default_dataset(rng, config)
    clusters = {0: ClusterState(0, CLUSTER_COLORS[0], config.default_samples, True)}
    return SessionState(config=config, rng=rng.advance(), dataset=ds,
                        clusters=clusters)


def _ensure_cluster(state: SessionState, cluster: int) -> dict[int, ClusterState]:
    if cluster < 0 or cluster >= state.config.cluster_cap:
        raise ValidationError(
            f"cluster id must lie in 0..{state.config.cluster_cap - 1}")
    clusters = dict(state.clusters)
    if cluster not in clusters:
        clusters[cluster] = ClusterState(
            cluster, CLUSTER_COLORS[cluster % len(CLUSTER_COLORS)], 0, True)
    return clusters


def _cluster_count(state: SessionState, cluster: int) -> int:
    return int((state.dataset.cluster_of == cluster).sum())


def _constraints_for(state: SessionState, cluster: int,
                     exclude_view: int | None) -> list[MapConstraint]:
    """Defined distributions (painted or carved views) whose current maps
    constrain coordinate completion, in view creation order."""
    out = []
    for rec in state.views:
        if rec.id == exclude_view or not isinstance(rec.view, AxisAlignedView):
            continue
        key = (cluster, rec.id)
        if key not in state.originals and key not in state.carved:
            continue
        counts = sculpt.current_map_grid(
            state.dataset.points, state.dataset.cluster_of, cluster,
            rec.view, rec.bounds, state.config.grid_size, state.dataset.dims)
        total = counts.sum()
        if total <= 0:
            continue
        out.append(MapConstraint(rec.view, rec.bounds, counts / total))
    return out


def _axis_clip_ranges(state: SessionState, dim: int):
    return quadmod.quad_value_ranges_on_axis(list(state.quads), dim) or None


def _regenerate_cluster(state: SessionState, cluster: int,
                        gen: np.random.Generator) -> tuple[Dataset, dict]:
    n = state.clusters[cluster].sample_count or state.config.default_samples
    pts, warn = quadmod.generate_cluster_samples(
        cluster, list(state.quads), state.pdfs, state.correlation(cluster),
        n, state.dataset.dims, gen, state.config)
    return model.replace_cluster_points(state.dataset, cluster, pts), warn


def _parse_view_payload(state: SessionState, payload: dict) -> View:
    if "axis" in payload:
        i, j = payload["axis"]
        nd = state.dataset.n_dims
        if not (0 <= i < nd and 0 <= j < nd) or i == j:
            raise ValidationError("axis view needs two distinct dimensions")
        return AxisAlignedView(int(i), int(j))
    if "polygon" in payload:
        pad = TouchpadPolygon(np.asarray(payload["polygon"], dtype=float),
                              np.asarray(payload["red"], dtype=float),
                              np.asarray(payload["blue"], dtype=float))
        if len(pad.vertices) != state.dataset.n_dims:
            raise ValidationError(
                "touchpad polygon needs one vertex per dimension")
        return GeneralView(ppa_from_touchpad(pad))
    if "basis" in payload:
        b = payload["basis"]
        return GeneralView(PPABasis(np.asarray(b["x"], dtype=float),
                                    np.asarray(b["y"], dtype=float)))
    raise ValidationError("view payload needs 'axis', 'polygon' or 'basis'")


def apply_command(state: SessionState, cmd: dict) -> tuple[SessionState, dict, list[str]]:
    """Pure command application: returns the next state, a result payload
    and human-readable warnings. Raises EngineError without side effects
    on invalid commands."""
    kind = cmd.get("kind")
    warnings: list[str] = []

    if kind == "export":
        return state, {"text": model.export_dataset(state.dataset)}, warnings
    if kind in ("get-projection", "get-histogram", "get-state-summary", "get-points"):
        return state, run_query(state, cmd), warnings
    if kind not in MUTATING_KINDS:
        raise ValidationError(f"unknown command kind {kind!r}")

    gen = state.rng.stream()
    state2 = replace(state, rng=state.rng.advance())

    if kind == "set-seed":
        seed = int(cmd["seed"])
        return replace(state, rng=RngHandle(seed)), {"seed": seed}, warnings

    if kind == "import":
        ds = model.import_dataset(cmd["text"], state.config)
        clusters = {}
        for c in range(ds.n_clusters):
            clusters[c] = ClusterState(c, CLUSTER_COLORS[c % len(CLUSTER_COLORS)],
                                       int((ds.cluster_of == c).sum()), True)
        fresh = SessionState(config=state2.config, rng=state2.rng, dataset=ds,
                             clusters=clusters)
        return fresh, {"points": ds.n_points, "dims": ds.n_dims}, warnings

    if kind == "set-range":
        ds = model.set_dimension_range(state2.dataset, int(cmd["dim"]),
                                       float(cmd["min"]), float(cmd["max"]))
        return replace(state2, dataset=ds), {}, warnings

    if kind == "reorder":
        ds, perm = model.reorder_dimension(state2.dataset, int(cmd["from"]),
                                           int(cmd["to"]))
        order = np.argsort(perm)
        pdfs = {int(perm[d]): replace(p, dim=int(perm[d]))
                for d, p in state2.pdfs.items()}
        kept = []
        for q in state2.quads:
            nl, nr = int(perm[q.left_axis]), int(perm[q.right_axis])
            if abs(nl - nr) == 1:
                if nl < nr:
                    kept.append(replace(q, left_axis=nl))
                else:
                    kept.append(replace(q, left_axis=nr,
                                        left_range=q.right_range,
                                        right_range=q.left_range))
            else:
                warnings.append(
                    f"detached quadrilateral between {ds.dims[min(nl, nr)].name} "
                    f"and {ds.dims[max(nl, nr)].name}: axes no longer adjacent")
        views = []
        for rec in state2.views:
            if isinstance(rec.view, AxisAlignedView):
                v = AxisAlignedView(int(perm[rec.view.i]), int(perm[rec.view.j]))
            else:
                v = GeneralView(PPABasis(rec.view.basis.x[order],
                                         rec.view.basis.y[order]))
            views.append(ViewRecord(rec.id, v, rec.bounds))
        painted = {}
        for key, pm in state2.painted.items():
            rec = next(r for r in views if r.id == key[1])
            painted[key] = replace(pm, view=rec.view)
        new = replace(state2, dataset=ds, pdfs=pdfs, quads=tuple(kept),
                      views=tuple(views), painted=painted)
        return new, {"detached": len(state2.quads) - len(kept)}, warnings

    if kind == "sketch-pdf":
        pts = np.asarray(cmd["points"], dtype=float)
        curve = pdfsketch.resample_stroke(pts, state2.config.pdf_samples)
        axis = pdfsketch.match_axis(curve, state2.dataset.dims)
        pdf = pdfsketch.curve_to_pdf(curve, axis, config=state2.config)
        ds = pdfsketch.apply_pdf_to_dimension(
            state2.dataset, axis.index, pdf,
            clip_ranges=_axis_clip_ranges(state2, axis.index), rng=gen)
        pdfs = dict(state2.pdfs)
        pdfs[axis.index] = pdf            # a new sketch overwrites the old one
        return (replace(state2, dataset=ds, pdfs=pdfs),
                {"dim": axis.index}, warnings)

    if kind == "draw-quad":
        cluster = int(cmd["cluster"])
        clusters = _ensure_cluster(state2, cluster)
        ticks = quadmod.collect_ticks(state2.pdfs, list(state2.quads),
                                      state2.dataset.dims, state2.config)
        quad = quadmod.classify_and_snap_quad(
            np.asarray(cmd["clicks"], dtype=float), state2.dataset.dims,
            ticks, cluster, state2.config)
        if clusters[cluster].sample_count == 0:
            clusters[cluster] = replace(clusters[cluster],
                                        sample_count=state2.config.default_samples)
        mid = replace(state2, quads=state2.quads + (quad,), clusters=clusters)
        ds, warn = _regenerate_cluster(mid, cluster, gen)
        for key, count in warn.items():
            if count:
                warnings.append(f"{key}: {count}")
        return (replace(mid, dataset=ds),
                {"quad": {"kind": quad.kind, "left_axis": quad.left_axis,
                          "left_range": list(quad.left_range),
                          "right_range": list(quad.right_range)},
                 "regenerated": clusters[cluster].sample_count}, warnings)

    if kind == "set-correlation":
        cluster = int(cmd["cluster"])
        c = float(cmd["c"])
        quadmod.CorrelationSetting(c)  # validate range
        clusters = _ensure_cluster(state2, cluster)
        correlations = dict(state2.correlations)
        correlations[cluster] = c
        mid = replace(state2, correlations=correlations, clusters=clusters)
        if any(q.cluster == cluster for q in mid.quads):
            ds, _ = _regenerate_cluster(mid, cluster, gen)
            mid = replace(mid, dataset=ds)
        return mid, {}, warnings

    if kind == "select-view":
        view = _parse_view_payload(state2, cmd)
        for rec in state2.views:
            if rec.view == view:
                return (replace(state2, selected_view=rec.id),
                        {"view": rec.id, "bounds": list(rec.bounds)}, warnings)
        vid = max((r.id for r in state2.views), default=-1) + 1
        rec = ViewRecord(vid, view, view.bounds(state2.dataset.dims))
        return (replace(state2, views=state2.views + (rec,), selected_view=vid),
                {"view": vid, "bounds": list(rec.bounds)}, warnings)

    if kind == "paint-shape":
        cluster = int(cmd["cluster"])
        clusters = _ensure_cluster(state2, cluster)
        vid = int(cmd.get("view", -1)) if "view" in cmd else state2.selected_view
        if vid is None:
            raise ValidationError("no view selected to paint on")
        rec = state2.view_record(vid)
        shape = sculpt.PaintedShape(np.asarray(cmd["boundary"], dtype=float),
                                    np.asarray(cmd["centerline"], dtype=float),
                                    np.asarray(cmd["profile"], dtype=float))
        pm = sculpt.rasterize_painted_shape(shape, rec.view, rec.bounds,
                                            state2.config.grid_size, state2.config)
        painted = dict(state2.painted)
        painted[(cluster, vid)] = pm
        return (replace(state2, painted=painted, clusters=clusters),
                {"view": vid}, warnings)

    if kind == "brush":
        cluster = int(cmd["cluster"])
        vid = int(cmd.get("view", -1)) if "view" in cmd else state2.selected_view
        key = (cluster, vid)
        if key not in state2.painted:
            raise ValidationError("no painted shape to brush for this cluster/view")
        brush = sculpt.BrushSpec(cmd["mode"], cmd.get("size", "medium"),
                                 float(cmd["density"]))
        painted = dict(state2.painted)
        painted[key] = sculpt.brush_map(painted[key], brush, cmd["position"],
                                        state2.config)
        return replace(state2, painted=painted), {}, warnings

    if kind == "backproject":
        cluster = int(cmd["cluster"])
        count = int(cmd.get("count", 0)) or state2.config.default_samples
        if count < 1:
            raise ValidationError("need at least one point")
        vid = int(cmd.get("view", -1)) if "view" in cmd else state2.selected_view
        key = (cluster, vid)
        if key not in state2.painted:
            raise ValidationError("paint a shape before backprojecting")
        pm = state2.painted[key]
        rec = state2.view_record(vid)
        if isinstance(rec.view, AxisAlignedView):
            cons = _constraints_for(state2, cluster, exclude_view=vid)
            pts, _ = sculpt.backproject_axis_aligned(
                pm, count, cons, state2.dataset.dims, gen, state2.config)
        else:
            pts = sculpt.backproject_general(pm, count, state2.dataset.dims,
                                             gen, state2.config)
        ds = model.replace_cluster_points(state2.dataset, cluster, pts)
        clusters = _ensure_cluster(state2, cluster)
        clusters[cluster] = replace(clusters[cluster], sample_count=count)
        # the captured original is the projection histogram of the points
        # just generated: deficits later measure exactly what carving took
        counts = sculpt.histogram_counts(rec.view.project(pts, ds.dims),
                                         rec.bounds, state2.config.grid_size)
        originals = dict(state2.originals)
        originals[key] = (counts / counts.sum(), count)
        painted = dict(state2.painted)
        painted[key] = pm.capture_original()
        return (replace(state2, dataset=ds, clusters=clusters,
                        originals=originals, painted=painted),
                {"count": count}, warnings)

    if kind == "carve":
        vid = int(cmd.get("view", -1)) if "view" in cmd else state2.selected_view
        if vid is None:
            raise ValidationError("no view selected to carve in")
        rec = state2.view_record(vid)
        xlo, xhi, ylo, yhi = rec.bounds
        extent = max(xhi - xlo, yhi - ylo)
        if "side" in cmd:
            side = float(cmd["side"])
        else:
            side = 2.0 * state2.config.brush_radius(cmd.get("size", "medium")) * extent
        removed = sculpt.carve(state2.dataset.points, state2.dataset.cluster_of,
                               state2.active_clusters(), rec.view,
                               state2.dataset.dims, cmd["position"], side,
                               float(cmd.get("density", 1.0)), gen)
        if removed.size == 0:
            return state2, {"removed": 0}, warnings
        touched = set(int(c) for c in np.unique(state2.dataset.cluster_of[removed]))
        ds = model.remove_points(state2.dataset, removed)
        carved = frozenset(state2.carved | {(c, vid) for c in touched})
        return (replace(state2, dataset=ds, carved=carved),
                {"removed": int(removed.size)}, warnings)

    if kind == "replenish-auto":
        cluster = int(cmd["cluster"])
        vid = int(cmd.get("view", -1)) if "view" in cmd else state2.selected_view
        rec = state2.view_record(vid)
        key = (cluster, vid)
        if key not in state2.originals:
            raise ValidationError("no original map captured for this view")
        grid, p_orig = state2.originals[key]
        if isinstance(rec.view, GeneralView):
            # overlapping non-axis-aligned views cannot be repaired piecewise:
            # bring all points back from this view's original painted map
            pm = state2.painted.get(key)
            if pm is None or pm.original is None:
                raise ValidationError("no original map captured for this view")
            pts = sculpt.replenish_general(pm, p_orig, state2.dataset.dims,
                                           gen, state2.config)
            ds = model.replace_cluster_points(state2.dataset, cluster, pts)
            return replace(state2, dataset=ds), {"added": int(len(pts))}, warnings
        cons = _constraints_for(state2, cluster, exclude_view=vid)
        pts, warn = sculpt.replenish_auto(
            state2.dataset.points, state2.dataset.cluster_of, cluster,
            rec.view, rec.bounds, grid, p_orig, cons, state2.dataset.dims,
            gen, state2.config)
        if warn.get("dropped"):
            warnings.append(f"dropped: {warn['dropped']}")
        ds = model.append_points(state2.dataset, cluster, pts)
        return replace(state2, dataset=ds), {"added": int(len(pts))}, warnings

    if kind == "replenish-manual":
        cluster = int(cmd["cluster"])
        vid = int(cmd.get("view", -1)) if "view" in cmd else state2.selected_view
        rec = state2.view_record(vid)
        key = (cluster, vid)
        grid, p_orig = state2.originals.get(key, (None, _cluster_count(state2, cluster)))
        cons = _constraints_for(state2, cluster, exclude_view=vid)
        radius = state2.config.brush_radius(cmd.get("size", "medium"))
        pts, warn = sculpt.replenish_manual(
            state2.dataset.points, state2.dataset.cluster_of, cluster,
            rec.view, rec.bounds, grid, p_orig,
            np.asarray(cmd["stroke"], dtype=float), radius,
            float(cmd.get("density", 1.0)), cons, state2.dataset.dims,
            gen, state2.config)
        if warn.get("outside_stroke_points"):
            warnings.append(
                f"stroke points outside the view: {warn['outside_stroke_points']}")
        if warn.get("dropped"):
            warnings.append(f"dropped: {warn['dropped']}")
        ds = model.append_points(state2.dataset, cluster, pts)
        return replace(state2, dataset=ds), {"added": int(len(pts))}, warnings

    if kind == "set-active":
        ids = cmd.get("clusters", [cmd.get("cluster")])
        flag = bool(cmd["active"])
        clusters = dict(state2.clusters)
        for cid in ids:
            clusters = dict(_ensure_cluster(replace(state2, clusters=clusters),
                                            int(cid)))
            clusters[int(cid)] = replace(clusters[int(cid)], active=flag)
        return replace(state2, clusters=clusters), {}, warnings

    raise ValidationError(f"unknown command kind {kind!r}")


def run_query(state: SessionState, cmd: dict) -> dict:
    kind = cmd["kind"]
    if kind == "get-state-summary":
        return {
            "points": state.dataset.n_points,
            "dims": [{"name": d.name, "min": d.min, "max": d.max}
                     for d in state.dataset.dims],
            "clusters": [{"id": c.id, "color": c.color, "active": c.active,
                          "sample_count": c.sample_count,
                          "count": _cluster_count(state, c.id),
                          "correlation": state.correlations.get(c.id, 0.5)}
                         for c in sorted(state.clusters.values(), key=lambda c: c.id)],
            "views": [_view_summary(rec) for rec in state.views],
            "selected_view": state.selected_view,
            "pdf_dims": sorted(state.pdfs),
            "quads": [{"cluster": q.cluster, "left_axis": q.left_axis,
                       "kind": q.kind, "left_range": list(q.left_range),
                       "right_range": list(q.right_range)}
                      for q in state.quads],
        }
    if kind == "get-points":
        return {"points": state.dataset.points.tolist(),
                "cluster": state.dataset.cluster_of.tolist()}
    if kind == "get-projection":
        rec = state.view_record(int(cmd["view"]))
        xy = rec.view.project(state.dataset.points, state.dataset.dims)
        return {"x": xy[:, 0].tolist(), "y": xy[:, 1].tolist(),
                "cluster": state.dataset.cluster_of.tolist(),
                "bounds": list(rec.bounds)}
    if kind == "get-histogram":
        rec = state.view_record(int(cmd["view"]))
        g = int(cmd.get("grid", state.config.grid_size))
        if "cluster" in cmd:
            counts = sculpt.current_map_grid(
                state.dataset.points, state.dataset.cluster_of,
                int(cmd["cluster"]), rec.view, rec.bounds, g, state.dataset.dims)
        else:
            xy = rec.view.project(state.dataset.points, state.dataset.dims)
            counts = sculpt.histogram_counts(xy, rec.bounds, g)
        return {"grid": counts.tolist(), "bounds": list(rec.bounds)}
    raise ValidationError(f"unknown query {kind!r}")


def _view_summary(rec: ViewRecord) -> dict:
    if isinstance(rec.view, AxisAlignedView):
        return {"id": rec.id, "kind": "axis", "dims": [rec.view.i, rec.view.j],
                "bounds": list(rec.bounds)}
    return {"id": rec.id, "kind": "general",
            "x": rec.view.basis.x.tolist(), "y": rec.view.basis.y.tolist(),
            "bounds": list(rec.bounds)}


class Session:
    """Mutable shell around the pure fold: log, cursor, checkpoints."""

    def __init__(self, seed: int = 0, config: EngineConfig | None = None):
        self.config = config or EngineConfig()
        self.seed = seed
        self.state = initial_state(seed, self.config)
        self.log: list[dict] = []
        self.cursor = 0
        self._checkpoints: dict[int, SessionState] = {0: self.state}

    def execute(self, cmd: dict) -> dict:
        """Apply one command or query; returns a structured reply."""
        kind = cmd.get("kind")
        try:
            if kind == "undo":
                if self.cursor == 0:
                    return {"ok": True, "result": {"at": 0, "noop": True},
                            "warnings": []}
                self.cursor -= 1
                self.state = self._replay(self.cursor)
                return {"ok": True, "result": {"at": self.cursor}, "warnings": []}
            if kind == "redo":
                if self.cursor == len(self.log):
                    return {"ok": True,
                            "result": {"at": self.cursor, "noop": True},
                            "warnings": []}
                self.cursor += 1
                self.state = self._replay(self.cursor)
                return {"ok": True, "result": {"at": self.cursor}, "warnings": []}

            new_state, result, warnings = apply_command(self.state, cmd)
            if kind in MUTATING_KINDS:
                del self.log[self.cursor:]
                self._checkpoints = {k: v for k, v in self._checkpoints.items()
                                     if k <= self.cursor}
                self.log.append(dict(cmd))
                self.cursor += 1
                self.state = new_state
                if self.cursor % self.config.checkpoint_interval == 0:
                    self._checkpoints[self.cursor] = new_state
            return {"ok": True, "result": result, "warnings": warnings}
        except EngineError as exc:
            return {"ok": False,
                    "error": {"type": type(exc).__name__, "message": str(exc)}}

    def _replay(self, prefix: int) -> SessionState:
        base = max(k for k in self._checkpoints if k <= prefix)
        state = self._checkpoints[base]
        for cmd in self.log[base:prefix]:
            state, _, _ = apply_command(state, cmd)
        return state

    def export(self) -> str:
        return model.export_dataset(self.state.dataset)

    def save_script(self) -> str:
        lines = [f"{SCRIPT_HEADER} v{SCRIPT_VERSION}", f"seed {self.seed}"]
        for cmd in self.log[:self.cursor]:
            lines.append(json.dumps(cmd, sort_keys=True))
        return "\n".join(lines) + "\n"


def load_script(text: str, config: EngineConfig | None = None,
                seed_override: int | None = None) -> tuple[Session, list[str]]:
    """Build a session by replaying a script; returns it with accumulated
    warnings. Raises ParseError on malformed scripts and ValidationError
    when a replayed command is rejected."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith(SCRIPT_HEADER):
        raise ParseError("not a session script", line=1)
    version = lines[0].split("v")[-1].strip()
    if version != str(SCRIPT_VERSION):
        raise ParseError(f"unsupported script version {version!r}", line=1)
    if len(lines) < 2 or not lines[1].startswith("seed "):
        raise ParseError("missing seed header", line=2)
    try:
        seed = int(lines[1].split()[1])
    except (IndexError, ValueError):
        raise ParseError("malformed seed header", line=2) from None
    if seed_override is not None:
        seed = seed_override

    session = Session(seed, config)
    warnings: list[str] = []
    for lineno, line in enumerate(lines[2:], start=3):
        if not line.strip():
            continue
        try:
            cmd = json.loads(line)
        except json.JSONDecodeError:
            raise ParseError("malformed command", line=lineno) from None
        reply = session.execute(cmd)
        if not reply["ok"]:
            raise ValidationError(
                f"line {lineno}: {reply['error']['message']}")
        warnings.extend(f"line {lineno}: {w}" for w in reply.get("warnings", []))
    return session, warnings
