"""N-D to 2D view machinery.

The touchpad polygon has one vertex per data dimension; the red and blue
interior points turn into N-D weight vectors via mean-value barycentric
coordinates and, after orthonormalization, become the projection-plane
axis (PPA) vectors. Completing them to a full orthonormal basis with
Gram-Schmidt lets painted 2D coordinates rotate back into data space.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import EngineConfig
from .errors import DegenerateInputError, ValidationError
from .model import _frozen


def point_in_polygon(vertices: np.ndarray, p) -> bool:
    """Ray-crossing test for a simple polygon; boundary points count as in."""
    v = np.asarray(vertices, dtype=float)
    x, y = float(p[0]), float(p[1])
    a = v
    b = np.roll(v, -1, axis=0)
    d = b - a
    cross = d[:, 0] * (y - a[:, 1]) - d[:, 1] * (x - a[:, 0])
    dot = (x - a[:, 0]) * (x - b[:, 0]) + (y - a[:, 1]) * (y - b[:, 1])
    if np.any((np.abs(cross) < 1e-12 * np.maximum(np.linalg.norm(d, axis=1), 1.0))
              & (dot <= 1e-12)):
        return True
    spans = (a[:, 1] > y) != (b[:, 1] > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xs = a[:, 0] + (y - a[:, 1]) / d[:, 1] * d[:, 0]
    return bool(np.count_nonzero(spans & (xs > x)) % 2)


def barycentric_weights(vertices: np.ndarray, p) -> np.ndarray:
    """Mean-value coordinates of p with respect to a simple polygon.

    Weights sum to 1, reproduce p linearly (sum w_i v_i = p), recover
    vertices exactly, and are non-negative inside convex polygons.
    """
    v = np.asarray(vertices, dtype=float)
    n = v.shape[0]
    if n < 3:
        raise ValidationError("polygon needs at least three vertices")
    p = np.asarray(p, dtype=float)
    if not point_in_polygon(v, p):
        raise ValidationError("point lies outside the touchpad polygon")

    s = v - p
    r = np.linalg.norm(s, axis=1)
    scale = max(float(r.max()), 1e-300)
    hit = np.nonzero(r <= 1e-12 * scale)[0]
    if hit.size:                                 # p sits on a vertex
        w = np.zeros(n)
        w[hit[0]] = 1.0
        return w

    s_next = np.roll(s, -1, axis=0)
    r_next = np.roll(r, -1)
    cross = s[:, 0] * s_next[:, 1] - s[:, 1] * s_next[:, 0]
    dot = (s * s_next).sum(axis=1)
    on_edge = np.nonzero((np.abs(cross) <= 1e-12 * r * r_next) & (dot < 0.0))[0]
    if on_edge.size:                             # p sits on an open edge
        i = int(on_edge[0])
        j = (i + 1) % n
        w = np.zeros(n)
        t = r[i] / (r[i] + r_next[i])
        w[i], w[j] = 1.0 - t, t
        return w

    with np.errstate(divide="ignore", invalid="ignore"):
        tan_half = (r * r_next - dot) / cross
    # p on an edge's line beyond the segment: angle 0, contribution 0
    tan_half = np.where(np.abs(cross) <= 1e-12 * r * r_next, 0.0, tan_half)
    w = (tan_half + np.roll(tan_half, 1)) / r
    return w / w.sum()


@dataclass(frozen=True)
class TouchpadPolygon:
    """Navigation polygon: vertex i stands for dimension i; the red point
    steers the projection x-axis and the blue point the y-axis."""
    vertices: np.ndarray  # (N, 2)
    red: np.ndarray       # (2,)
    blue: np.ndarray      # (2,)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise ValidationError("touchpad polygon needs at least three 2D vertices")
        red = np.asarray(self.red, dtype=float)
        blue = np.asarray(self.blue, dtype=float)
        for name, pt in (("red", red), ("blue", blue)):
            if not point_in_polygon(v, pt):
                raise ValidationError(f"{name} point lies outside the polygon")
        object.__setattr__(self, "vertices", _frozen(v))
        object.__setattr__(self, "red", _frozen(red))
        object.__setattr__(self, "blue", _frozen(blue))

    @classmethod
    def regular(cls, n: int, red=None, blue=None) -> "TouchpadPolygon":
        """Regular n-gon on the unit circle, points defaulting to the centroid."""
        ang = 2.0 * np.pi * np.arange(n) / n
        v = np.column_stack([np.cos(ang), np.sin(ang)])
        c = v.mean(axis=0)
        return cls(v, c if red is None else red, c if blue is None else blue)


@dataclass(frozen=True)
class PPABasis:
    """The two orthonormal N-D vectors spanning a scatterplot's plane."""
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.shape != y.shape or x.ndim != 1:
            raise ValidationError("basis vectors must share one dimensionality")
        if (abs(np.linalg.norm(x) - 1) > 1e-12 or abs(np.linalg.norm(y) - 1) > 1e-12
                or abs(float(x @ y)) > 1e-12):
            raise ValidationError("basis vectors must be orthonormal")
        object.__setattr__(self, "x", _frozen(x))
        object.__setattr__(self, "y", _frozen(y))

    @property
    def n_dims(self) -> int:
        return self.x.size

    @classmethod
    def axis_aligned(cls, i: int, j: int, n: int) -> "PPABasis":
        x = np.zeros(n)
        y = np.zeros(n)
        x[i] = 1.0
        y[j] = 1.0
        return cls(x, y)


def ppa_from_touchpad(pad: TouchpadPolygon) -> PPABasis:
    """Barycentric weights of the red and blue points, orthonormalized.

    Interpolated weight vectors are rarely orthogonal, so the blue (y)
    vector is orthogonalized against the red (x) one deterministically.
    """
    wx = barycentric_weights(pad.vertices, pad.red)
    wy = barycentric_weights(pad.vertices, pad.blue)
    x = wx / np.linalg.norm(wx)
    y = wy - (wy @ x) * x
    ny = np.linalg.norm(y)
    if ny <= 1e-9 * np.linalg.norm(wy):
        raise DegenerateInputError(
            "degenerate view: red and blue points give parallel directions")
    y = y / ny
    y = y - (y @ x) * x          # second pass tightens orthogonality
    return PPABasis(x, y / np.linalg.norm(y))


def project_points(points: np.ndarray, basis: PPABasis) -> np.ndarray:
    """Dot every point onto the plane axes: output column k is p . axis_k."""
    pts = np.asarray(points, dtype=float)
    if pts.shape[-1] != basis.n_dims:
        raise ValidationError("point dimensionality does not match the basis")
    return pts @ np.column_stack([basis.x, basis.y])


@dataclass(frozen=True)
class OrthonormalBasis:
    """N orthonormal N-D vectors (rows); the first two span the view plane."""
    vectors: np.ndarray  # (N, N)

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValidationError("need N vectors of dimension N")
        gram = v @ v.T
        if np.abs(gram - np.eye(v.shape[0])).max() > 1e-10:
            raise ValidationError("vectors are not orthonormal")
        object.__setattr__(self, "vectors", _frozen(v))

    @property
    def plane(self) -> PPABasis:
        return PPABasis(self.vectors[0], self.vectors[1])


def _orthogonalize(v: np.ndarray, basis_rows: np.ndarray) -> np.ndarray:
    # two projection passes keep the residual orthogonal to working precision
    for _ in range(2):
        v = v - basis_rows.T @ (basis_rows @ v)
    return v


def gram_schmidt_complete(x: np.ndarray, y: np.ndarray,
                          rng: np.random.Generator,
                          config: EngineConfig | None = None) -> OrthonormalBasis:
    """Orthonormal basis whose first two vectors span the plane of (x, y).

    The user-selected vectors are kept (orthonormalized in order), the
    remaining N-2 start as random uniform [-1, 1] vectors and are redrawn
    whenever orthogonalization leaves them nearly dependent.
    """
    config = config or EngineConfig()
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    if y.size != n:
        raise ValidationError("basis seed vectors must share one dimensionality")
    nx = np.linalg.norm(x)
    if nx == 0.0:
        raise ValidationError("zero vector cannot seed a basis")
    rows = np.empty((n, n))
    rows[0] = x / nx
    y2 = _orthogonalize(y, rows[:1])
    ny = np.linalg.norm(y2)
    if ny <= 1e-12 * max(np.linalg.norm(y), 1e-300):
        raise DegenerateInputError("seed vectors are linearly dependent")
    rows[1] = y2 / ny

    k = 2
    attempts = 0
    while k < n:
        v = _orthogonalize(rng.uniform(-1.0, 1.0, n), rows[:k])
        nv = np.linalg.norm(v)
        if nv < config.dependence_residual:
            attempts += 1
            if attempts > 100:
                raise DegenerateInputError("could not complete an independent basis")
            continue
        rows[k] = v / nv
        k += 1
    return OrthonormalBasis(rows)


def express_in_basis(points: np.ndarray, basis: OrthonormalBasis) -> np.ndarray:
    """Coordinates of data-space points in the rotated basis."""
    return np.asarray(points, dtype=float) @ basis.vectors.T


def rotate_to_data_coords(coords: np.ndarray, basis: OrthonormalBasis) -> np.ndarray:
    """Back from rotated-space coordinates to data space:
    point = sum_i coord_i * basis_i."""
    return np.asarray(coords, dtype=float) @ basis.vectors
