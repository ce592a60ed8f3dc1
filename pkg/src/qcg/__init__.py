"""Hilbert-Schmidt geometric discord for two-qubit states, with the CS/X
Hadamard correspondence and two spin-model state generators."""
from .core import (BlochForm, CsParams, XParams, build_cs, build_x, extract_cs,
                   extract_x, from_bloch, hadamard_conjugate, to_bloch, validate)
from .geodisc import (GeoResult, MeasurementAxes, OptimizerConfig,
                      geometric_measure, micc, objective)

__all__ = [
    "BlochForm", "CsParams", "XParams", "build_cs", "build_x", "extract_cs",
    "extract_x", "from_bloch", "hadamard_conjugate", "to_bloch", "validate",
    "GeoResult", "MeasurementAxes", "OptimizerConfig", "geometric_measure",
    "micc", "objective",
]
