"""Engine configuration knobs.

All tunables live here so a session can be reproduced from (seed, config,
command log) alone.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class EngineConfig:
    # dataset defaults
    cluster_cap: int = 10
    default_samples: int = 500
    default_dims: int = 7
    default_range: tuple[float, float] = (-10.0, 10.0)

    # density sketching
    pdf_samples: int = 256            # nodes per discrete density curve

    # connection quadrilaterals
    min_window_fraction: float = 0.02  # sliding-window width at full correlation
    snap_tolerance: float = 0.015      # fraction of axis length, axis + tick snapping
    rejection_budget: int = 1000       # candidate draws per linked value
    restart_rounds: int = 50           # whole-sample restarts for chained quads

    # scatterplot sculpting
    grid_size: int = 128               # probability-map resolution per view
    gaussian_sigma: float = 0.0        # map smoothing in cells, 0 disables
    brush_radii: tuple[float, float, float] = (0.01, 0.03, 0.08)  # of view extent
    boundary_close_tolerance: float = 0.05   # of view diagonal
    backproject_budget: int = 100      # redraw attempts per out-of-domain point
    replenish_budget_factor: float = 2.0     # point budget as multiple of original P
    replenish_min_improvement: float = 0.01  # stop when a batch helps less than this

    # numerics
    dependence_residual: float = 1e-8  # redraw threshold for random basis fill

    # session
    checkpoint_interval: int = 50      # commands between replay checkpoints

    def brush_radius(self, size: str) -> float:
        """Resolve a named brush size to a fraction of the view extent."""
        try:
            return self.brush_radii[("small", "medium", "large").index(size)]
        except ValueError:
            raise KeyError(f"unknown brush size {size!r}") from None
