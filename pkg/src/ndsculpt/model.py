"""Shared dataset model: dimensions, point table, cluster labels, file I/O.

A Dataset is an immutable snapshot; every edit returns a new one. The
space-delimited file format is: a header line of dimension names (an
optional trailing column named exactly ``cluster`` holds integer labels),
then one row per point, fields separated by single spaces, reals written
in shortest round-trip form.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .config import EngineConfig
from .errors import ParseError, ValidationError
from .rng import RngHandle


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class DimensionSpec:
    """One axis: label, display/sampling bounds, and ordinal position.

    A reversed axis is represented by min > max; min == max is invalid.
    The bounds are not clamps on the data, they define the range used for
    sketching and sampling.
    """
    name: str
    min: float
    max: float
    index: int

    def __post_init__(self):
        if self.min == self.max:
            raise ValidationError(
                f"dimension {self.name!r}: min and max must differ")

    @property
    def span(self) -> float:
        return self.max - self.min

    def to_param(self, value):
        """Data value -> display parameter t in [0, 1] (t=0 at min end)."""
        return (np.asarray(value, dtype=float) - self.min) / self.span

    def to_value(self, t):
        """Display parameter -> data value; works for reversed axes."""
        return self.min + np.asarray(t, dtype=float) * self.span

    def sorted_bounds(self) -> tuple[float, float]:
        return (self.min, self.max) if self.min < self.max else (self.max, self.min)


@dataclass(frozen=True)
class ClusterState:
    """Editing state of one cluster: only active clusters respond to brushes."""
    id: int
    color: str
    sample_count: int
    active: bool = True


@dataclass(frozen=True)
class Dataset:
    dims: tuple[DimensionSpec, ...]
    points: np.ndarray      # (P, N) float64, read-only
    cluster_of: np.ndarray  # (P,) int64, read-only

    def __post_init__(self):
        object.__setattr__(self, "points", _frozen(np.asarray(self.points, dtype=float)))
        object.__setattr__(self, "cluster_of", _frozen(np.asarray(self.cluster_of, dtype=np.int64)))
        if self.points.ndim != 2 or self.points.shape[1] != len(self.dims):
            raise ValidationError("point table shape does not match dimension count")
        if self.cluster_of.shape != (self.points.shape[0],):
            raise ValidationError("every point needs exactly one cluster label")
        names = [d.name for d in self.dims]
        if len(set(names)) != len(names):
            raise ValidationError("dimension names must be unique")
        for i, d in enumerate(self.dims):
            if d.index != i:
                raise ValidationError("dimension indices must match their order")
        if self.n_points and self.cluster_of.min() < 0:
            raise ValidationError("cluster labels must be non-negative")

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def n_dims(self) -> int:
        return len(self.dims)

    @property
    def n_clusters(self) -> int:
        return int(self.cluster_of.max()) + 1 if self.n_points else 0

    def dim_named(self, name: str) -> DimensionSpec:
        for d in self.dims:
            if d.name == name:
                return d
        raise ValidationError(f"unknown dimension {name!r}")

    def cluster_points(self, cluster: int) -> np.ndarray:
        return self.points[self.cluster_of == cluster]


def create_default_dataset(rng: RngHandle, config: EngineConfig | None = None) -> Dataset:
    """The prepopulated dataset: one uniform cluster of 500 points x 7 dims
    over [-10, 10]."""
    config = config or EngineConfig()
    lo, hi = config.default_range
    n, nd = config.default_samples, config.default_dims
    pts = rng.stream().uniform(lo, hi, size=(n, nd))
    dims = tuple(DimensionSpec(f"x{i + 1}", lo, hi, i) for i in range(nd))
    return Dataset(dims, pts, np.zeros(n, dtype=np.int64))


def format_real(x: float) -> str:
    """Shortest decimal string that round-trips to the same float64."""
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def export_dataset(ds: Dataset) -> str:
    """Serialize to the canonical space-delimited form (UTF-8/LF assumed by
    callers writing it out). Lossless: import(export(d)) is coordinate-exact."""
    if ds.n_points == 0:
        raise ValidationError("refusing to export an empty dataset")
    lines = [" ".join([d.name for d in ds.dims] + ["cluster"])]
    for row, label in zip(ds.points, ds.cluster_of):
        lines.append(" ".join([format_real(v) for v in row] + [str(int(label))]))
    return "\n".join(lines) + "\n"


def import_dataset(data: bytes | str, config: EngineConfig | None = None) -> Dataset:
    """Parse a space-delimited dataset file.

    Dimension names come from the header; per-dimension bounds are set to
    the observed extremes (a constant column gets +-0.5 padding so min and
    max stay distinct). A trailing column named exactly ``cluster`` holds
    integer labels; otherwise everything lands in cluster 0.
    """
    config = config or EngineConfig()
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise ParseError("empty dataset file")
    names = lines[0].split()
    has_labels = names[-1] == "cluster"
    value_names = names[:-1] if has_labels else names
    if not value_names:
        raise ParseError("header declares no dimensions", line=1)

    rows, labels = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != len(names):
            raise ParseError(
                f"expected {len(names)} fields, found {len(fields)}", line=lineno)
        try:
            rows.append([float(f) for f in fields[:len(value_names)]])
        except ValueError:
            raise ParseError("non-numeric value", line=lineno) from None
        if has_labels:
            try:
                labels.append(int(fields[-1]))
            except ValueError:
                raise ParseError("non-integer cluster label", line=lineno) from None
        else:
            labels.append(0)
    if not rows:
        raise ParseError("no data rows")

    pts = np.asarray(rows, dtype=float)
    lab = np.asarray(labels, dtype=np.int64)
    if lab.min() < 0:
        raise ParseError("negative cluster label")
    if int(lab.max()) + 1 > config.cluster_cap:
        raise ValidationError(
            f"{int(lab.max()) + 1} clusters exceed the cap of {config.cluster_cap}")

    dims = []
    for i, name in enumerate(value_names):
        lo, hi = float(pts[:, i].min()), float(pts[:, i].max())
        if lo == hi:
            lo, hi = lo - 0.5, hi + 0.5
        dims.append(DimensionSpec(name, lo, hi, i))
    return Dataset(tuple(dims), pts, lab)


def reorder_dimension(ds: Dataset, frm: int, to: int) -> tuple[Dataset, np.ndarray]:
    """Move the dimension at ordinal `frm` to ordinal `to` (drag-and-drop
    semantics: remove, then insert).

    Returns the new dataset and the permutation array, where
    permutation[old_index] == new_index, so attachments keyed by dimension
    can be remapped by the caller.
    """
    n = ds.n_dims
    if not (0 <= frm < n and 0 <= to < n):
        raise ValidationError(f"dimension ordinal out of range 0..{n - 1}")
    order = list(range(n))
    order.insert(to, order.pop(frm))          # order[new_index] = old_index
    perm = np.empty(n, dtype=int)
    for new_i, old_i in enumerate(order):
        perm[old_i] = new_i
    dims = tuple(replace(ds.dims[old_i], index=new_i)
                 for new_i, old_i in enumerate(order))
    return Dataset(dims, ds.points[:, order], ds.cluster_of), perm


def set_dimension_range(ds: Dataset, dim: int, new_min: float, new_max: float) -> Dataset:
    """Update one axis's bounds. Point values are untouched: bounds steer
    sketching and sampling, they never clamp the data. Swapping min and max
    reverses the axis."""
    if not (0 <= dim < ds.n_dims):
        raise ValidationError(f"dimension ordinal out of range 0..{ds.n_dims - 1}")
    if new_min == new_max:
        raise ValidationError("min and max must differ")
    dims = list(ds.dims)
    dims[dim] = replace(dims[dim], min=float(new_min), max=float(new_max))
    return Dataset(tuple(dims), ds.points, ds.cluster_of)


def replace_cluster_points(ds: Dataset, cluster: int, new_points: np.ndarray) -> Dataset:
    """Swap out one cluster's rows. Other clusters keep their rows bit for
    bit and in their original relative order."""
    new_points = np.asarray(new_points, dtype=float)
    if new_points.ndim != 2 or new_points.shape[1] != ds.n_dims:
        raise ValidationError("replacement points have the wrong dimensionality")
    keep = ds.cluster_of != cluster
    pts = np.vstack([ds.points[keep], new_points])
    lab = np.concatenate([ds.cluster_of[keep],
                          np.full(len(new_points), cluster, dtype=np.int64)])
    return Dataset(ds.dims, pts, lab)


def remove_points(ds: Dataset, indices: np.ndarray) -> Dataset:
    keep = np.ones(ds.n_points, dtype=bool)
    keep[np.asarray(indices, dtype=int)] = False
    return Dataset(ds.dims, ds.points[keep], ds.cluster_of[keep])


def append_points(ds: Dataset, cluster: int, new_points: np.ndarray) -> Dataset:
    new_points = np.asarray(new_points, dtype=float)
    if new_points.size == 0:
        return ds
    if new_points.ndim != 2 or new_points.shape[1] != ds.n_dims:
        raise ValidationError("appended points have the wrong dimensionality")
    pts = np.vstack([ds.points, new_points])
    lab = np.concatenate([ds.cluster_of,
                          np.full(len(new_points), cluster, dtype=np.int64)])
    return Dataset(ds.dims, pts, lab)
