"""Kempe-change reconfiguration of proper edge colourings."""

from .core import (
    Colouring,
    ColouringError,
    Graph,
    GraphFormatError,
    InvariantViolation,
    PreconditionError,
    TriangleError,
    edge,
    format_colouring,
    format_graph,
    is_proper,
    parse_colouring,
    parse_graph,
    validate_colouring,
)
from .engine import make_class_monochromatic, regularize, run_transform, transform
from .fan import fan_sequence, invert_sequence
from .kempe import KempeMove, Trace, apply_move, chain_at, format_trace, parse_trace, verify_trace
from .oracle import are_equivalent, enumerate_colourings, reconfiguration_components

__all__ = [
    "Colouring", "ColouringError", "Graph", "GraphFormatError", "InvariantViolation",
    "KempeMove", "PreconditionError", "Trace", "TriangleError", "apply_move", "are_equivalent",
    "chain_at", "edge", "enumerate_colourings", "fan_sequence", "format_colouring", "format_graph",
    "format_trace", "invert_sequence", "is_proper", "make_class_monochromatic", "parse_colouring",
    "parse_graph", "parse_trace", "reconfiguration_components", "regularize", "run_transform",
    "transform", "validate_colouring", "verify_trace",
]
