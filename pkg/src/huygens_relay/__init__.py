"""Desk-scale simulator for a dual-band tunable Huygens metasurface relaying LEO links."""

from .circuit import (
    CellResponse,
    HuygensCell,
    MetaAtomCircuit,
    ResonatorBranch,
    VaractorModel,
    calibrate,
    cell_s_params,
)
from .errors import (
    BiasRangeError,
    CalibrationError,
    ConfigError,
    CoverageError,
    ScenarioError,
)

__all__ = [
    "BiasRangeError",
    "CalibrationError",
    "CellResponse",
    "ConfigError",
    "CoverageError",
    "HuygensCell",
    "MetaAtomCircuit",
    "ResonatorBranch",
    "ScenarioError",
    "VaractorModel",
    "calibrate",
    "cell_s_params",
]

__version__ = "0.1.0"
