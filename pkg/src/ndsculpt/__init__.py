"""ndsculpt: generate and edit high-dimensional datasets by sketching.

Two editing paradigms share one dataset: freehand density curves and
connection quadrilaterals on parallel coordinates, and paint/carve/repair
sculpting on arbitrary 2D projections. Everything runs through a
command-sourced session, so sessions replay deterministically and undo is
exact.
"""

from .config import EngineConfig
from .errors import (BudgetExhaustedError, DegenerateInputError, EmptyMapError,
                     EngineError, ParseError, ValidationError)
from .model import (ClusterState, Dataset, DimensionSpec, create_default_dataset,
                    export_dataset, import_dataset, reorder_dimension,
                    set_dimension_range)
from .rng import RngHandle
from .session import Session, SessionState, apply_command, load_script

__all__ = [
    "EngineConfig", "RngHandle",
    "EngineError", "ParseError", "ValidationError", "DegenerateInputError",
    "BudgetExhaustedError", "EmptyMapError",
    "Dataset", "DimensionSpec", "ClusterState",
    "create_default_dataset", "import_dataset", "export_dataset",
    "reorder_dimension", "set_dimension_range",
    "Session", "SessionState", "apply_command", "load_script",
]
