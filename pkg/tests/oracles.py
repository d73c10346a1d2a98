"""Independent checking tools for the test suite.

Everything here deliberately avoids the engine's own code paths: EMD via
scipy's exact solver, analytic CDFs in closed form, a permutation energy
test for two-sample comparisons.
"""
from __future__ import annotations

import numpy as np
from scipy.stats import wasserstein_distance_nd

EMD_GRID = 16  # support size keeps the exact solver fast


def downsample(grid: np.ndarray, out: int = EMD_GRID) -> np.ndarray:
    g = grid.shape[0]
    assert g % out == 0, "grid size must be a multiple of the EMD grid"
    f = g // out
    return grid.reshape(out, f, out, f).sum(axis=(1, 3))


def hist2d(xy: np.ndarray, bounds, bins: int = EMD_GRID) -> np.ndarray:
    xlo, xhi, ylo, yhi = bounds
    h, _, _ = np.histogram2d(xy[:, 0], xy[:, 1], bins=bins,
                             range=[[xlo, xhi], [ylo, yhi]])
    return h


def emd_2d(hist_a: np.ndarray, hist_b: np.ndarray, bounds) -> float:
    """Exact earth-mover distance between two histograms on the same
    bounds, normalized by the domain diagonal. Histograms coarser than
    EMD_GRID are used as-is; finer ones must be downsampled first."""
    xlo, xhi, ylo, yhi = bounds
    g = hist_a.shape[0]
    assert hist_a.shape == hist_b.shape
    xs = xlo + (np.arange(g) + 0.5) * (xhi - xlo) / g
    ys = ylo + (np.arange(g) + 0.5) * (yhi - ylo) / g
    cx, cy = np.meshgrid(xs, ys, indexing="ij")
    centers = np.stack([cx.ravel(), cy.ravel()], axis=1)

    wa = hist_a.ravel().astype(float)
    wb = hist_b.ravel().astype(float)
    assert wa.sum() > 0 and wb.sum() > 0
    sa, sb = wa > 0, wb > 0
    d = wasserstein_distance_nd(centers[sa], centers[sb],
                                wa[sa] / wa[sa].sum(), wb[sb] / wb[sb].sum())
    return float(d) / float(np.hypot(xhi - xlo, yhi - ylo))


def triangle_cdf(x: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Closed-form CDF of the symmetric triangle density on [lo, hi]."""
    t = np.clip((np.asarray(x, dtype=float) - lo) / (hi - lo), 0.0, 1.0)
    return np.where(t <= 0.5, 2.0 * t ** 2, 1.0 - 2.0 * (1.0 - t) ** 2)


def energy_statistic(a: np.ndarray, b: np.ndarray) -> float:
    def mean_dist(x, y):
        return float(np.linalg.norm(x[:, None, :] - y[None, :, :], axis=2).mean())
    return 2.0 * mean_dist(a, b) - mean_dist(a, a) - mean_dist(b, b)


def energy_test(a: np.ndarray, b: np.ndarray, rng: np.random.Generator,
                n_perm: int = 99, subsample: int = 800) -> float:
    """Permutation p-value for the two-sample energy test."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) > subsample:
        a = a[rng.choice(len(a), subsample, replace=False)]
    if len(b) > subsample:
        b = b[rng.choice(len(b), subsample, replace=False)]
    observed = energy_statistic(a, b)
    pooled = np.vstack([a, b])
    n = len(a)
    hits = 1
    for _ in range(n_perm):
        idx = rng.permutation(len(pooled))
        stat = energy_statistic(pooled[idx[:n]], pooled[idx[n:]])
        if stat >= observed:
            hits += 1
    return hits / (n_perm + 1)


def chi_square_uniform_pvalue(values: np.ndarray, lo: float, hi: float,
                              bins: int = 20) -> float:
    from scipy.stats import chisquare
    counts, _ = np.histogram(values, bins=bins, range=(lo, hi))
    return float(chisquare(counts).pvalue)
