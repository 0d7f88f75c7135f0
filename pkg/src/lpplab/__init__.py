"""Monte Carlo laboratory for exponential last-passage percolation and TASEP."""

__version__ = "0.1.0"

from .errors import BufferExhausted, ConfigError, LppLabError, MissingPath, NoAdmissiblePath
from .geometry import (
    AntiDiagonalHalfLine,
    AntiDiagonalLine,
    FinitePoints,
    ForbiddenRegion,
    SinglePoint,
    Staircase,
    UnionSet,
    truncate,
)
from .lpp import (
    LppResult,
    PathStats,
    last_passage,
    local_shift_check,
    multi_endpoint_last_passage,
    path_stats,
    restricted_last_passage,
)
from .weights import Seed, TableField, WeightField, make_weight_field, weight_at

__all__ = [
    "AntiDiagonalHalfLine",
    "AntiDiagonalLine",
    "BufferExhausted",
    "ConfigError",
    "FinitePoints",
    "ForbiddenRegion",
    "LppLabError",
    "LppResult",
    "MissingPath",
    "NoAdmissiblePath",
    "PathStats",
    "Seed",
    "SinglePoint",
    "Staircase",
    "TableField",
    "UnionSet",
    "WeightField",
    "last_passage",
    "local_shift_check",
    "make_weight_field",
    "multi_endpoint_last_passage",
    "path_stats",
    "restricted_last_passage",
    "truncate",
    "weight_at",
]
