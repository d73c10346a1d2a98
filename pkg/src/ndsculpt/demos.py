"""Validation scenarios for the headless CLI.

The k-means challenge rebuilds the interlocking-L dataset (two clusters
whose L-shaped structures live on different planes, linearly
non-separable) through ordinary session commands and shows that plain
Lloyd clustering fails on it while passing a well-separated control. The
outlier demo carves scripted regions out of an imported dataset.
"""
from __future__ import annotations

from itertools import permutations

import numpy as np

from .config import EngineConfig
from .errors import ValidationError
from .session import Session


def lloyd_kmeans(points: np.ndarray, k: int, restarts: int,
                 rng: np.random.Generator, max_iter: int = 100
                 ) -> tuple[np.ndarray, np.ndarray, float]:
    """Standard k-means with random restarts; returns the best run's
    (labels, centers, inertia)."""
    pts = np.asarray(points, dtype=float)
    best = None
    for _ in range(restarts):
        centers = pts[rng.choice(len(pts), size=k, replace=False)].copy()
        for _ in range(max_iter):
            d2 = ((pts[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
            labels = d2.argmin(axis=1)
            new_centers = centers.copy()
            for c in range(k):
                member = labels == c
                if member.any():
                    new_centers[c] = pts[member].mean(axis=0)
                else:
                    new_centers[c] = pts[rng.integers(len(pts))]
            if np.allclose(new_centers, centers):
                break
            centers = new_centers
        inertia = float(((pts - centers[labels]) ** 2).sum())
        if best is None or inertia < best[2]:
            best = (labels, centers, inertia)
    return best


def best_permutation_accuracy(truth: np.ndarray, predicted: np.ndarray) -> float:
    """Label accuracy maximized over cluster relabelings."""
    truth = np.asarray(truth)
    predicted = np.asarray(predicted)
    ids = sorted(set(int(v) for v in np.unique(predicted)))
    best = 0.0
    for perm in permutations(sorted(set(int(v) for v in np.unique(truth)))):
        mapping = dict(zip(ids, perm))
        relabeled = np.array([mapping.get(int(p), -1) for p in predicted])
        best = max(best, float((relabeled == truth).mean()))
    return best


def _l_shape(shift: float = 1.923) -> tuple[list, list]:
    """An L-shaped boundary polygon translated so its centroid sits near
    the plane center, plus a centerline along the arm spines."""
    boundary = [(-8, -8), (8, -8), (8, -2), (-2, -2), (-2, 8), (-8, 8), (-8, -8)]
    centerline = [(-5, 5), (-5, -5), (5, -5)]
    b = [(x + shift, y + shift) for x, y in boundary]
    c = [(x + shift, y + shift) for x, y in centerline]
    return b, c


def _corner_seed_dataset(n_dims: int) -> str:
    names = " ".join(f"x{i + 1}" for i in range(n_dims)) + " cluster"
    low = " ".join(["-10"] * n_dims) + " 0"
    high = " ".join(["10"] * n_dims) + " 0"
    return f"{names}\n{low}\n{high}\n"


def build_interlocking_session(seed: int, samples: int = 500,
                               config: EngineConfig | None = None) -> Session:
    """Two 4D clusters: an L on the x1-x2 plane and the same L on x2-x3,
    everything else uniform. Means coincide, so the clusters are linearly
    non-separable."""
    session = Session(seed, config)
    boundary, centerline = _l_shape()
    steps = [
        {"kind": "import", "text": _corner_seed_dataset(4)},
        {"kind": "select-view", "axis": [0, 1]},
        {"kind": "paint-shape", "cluster": 0, "boundary": boundary,
         "centerline": centerline, "profile": [1.0, 1.0]},
        {"kind": "backproject", "cluster": 0, "count": samples},
        {"kind": "select-view", "axis": [1, 2]},
        {"kind": "paint-shape", "cluster": 1, "boundary": boundary,
         "centerline": centerline, "profile": [1.0, 1.0]},
        {"kind": "backproject", "cluster": 1, "count": samples},
    ]
    for cmd in steps:
        reply = session.execute(cmd)
        if not reply["ok"]:
            raise ValidationError(
                f"scenario step {cmd['kind']} failed: {reply['error']['message']}")
    return session


def gaussian_control(seed: int, samples: int = 500, n_dims: int = 4
                     ) -> tuple[np.ndarray, np.ndarray]:
    """Two well-separated spherical blobs: the sanity check that the
    clustering harness itself works."""
    rng = np.random.default_rng(seed)
    a = rng.normal(-5.0, 1.0, size=(samples, n_dims))
    b = rng.normal(5.0, 1.0, size=(samples, n_dims))
    pts = np.vstack([a, b])
    truth = np.concatenate([np.zeros(samples, int), np.ones(samples, int)])
    return pts, truth


def kmeans_demo(seed: int = 0, samples: int = 500, restarts: int = 20,
                config: EngineConfig | None = None) -> dict:
    """Run the clustering challenge and its control; returns a report."""
    session = build_interlocking_session(seed, samples, config)
    ds = session.state.dataset
    if ds.n_clusters != 2:
        raise ValidationError("scenario must produce exactly two clusters")
    rng = np.random.default_rng(seed)
    labels, centers, _ = lloyd_kmeans(ds.points, 2, restarts, rng)
    accuracy = best_permutation_accuracy(ds.cluster_of, labels)

    ctrl_pts, ctrl_truth = gaussian_control(seed, samples)
    ctrl_labels, _, _ = lloyd_kmeans(ctrl_pts, 2, restarts,
                                     np.random.default_rng(seed + 1))
    control_accuracy = best_permutation_accuracy(ctrl_truth, ctrl_labels)

    means = {}
    for c in (0, 1):
        member = ds.points[labels == c]
        means[c] = member.mean(axis=0).tolist() if len(member) else []
    return {
        "seed": seed,
        "samples_per_cluster": samples,
        "challenge_accuracy": accuracy,
        "control_accuracy": control_accuracy,
        "kmeans_cluster_means": means,
        "dim_names": [d.name for d in ds.dims],
        "dataset": session.export(),
    }


def outlier_demo(text: str, dim_names: tuple[str, str], carves: list[dict],
                 seed: int = 0, config: EngineConfig | None = None) -> dict:
    """Import a dataset, carve the scripted regions on the named 2D view,
    and report the cleaned dataset plus removal accounting."""
    session = Session(seed, config)
    reply = session.execute({"kind": "import", "text": text})
    if not reply["ok"]:
        raise ValidationError(reply["error"]["message"])
    before = session.state.dataset.n_points
    ds = session.state.dataset
    i = ds.dim_named(dim_names[0]).index
    j = ds.dim_named(dim_names[1]).index
    reply = session.execute({"kind": "select-view", "axis": [i, j]})
    view_id = reply["result"]["view"]
    removed = 0
    for gesture in carves:
        cmd = {"kind": "carve", "view": view_id,
               "position": gesture["position"],
               "density": gesture.get("density", 1.0)}
        if "side" in gesture:
            cmd["side"] = gesture["side"]
        else:
            cmd["size"] = gesture.get("size", "medium")
        reply = session.execute(cmd)
        if not reply["ok"]:
            raise ValidationError(reply["error"]["message"])
        removed += reply["result"]["removed"]
    return {
        "view": [dim_names[0], dim_names[1]],
        "points_before": before,
        "points_after": session.state.dataset.n_points,
        "removed": removed,
        "dataset": session.export(),
    }
