"""Minimal distinguishing Hennessy-Milner formulas for labelled transition systems."""

from __future__ import annotations

__version__ = "0.1.0"

from .distinguish import (
    DEPTH_AND_NEGATION,
    DEPTH_ONLY,
    BisimilarStatesError,
    Distinguisher,
    DistinguishResult,
    WitnessRequest,
    distinguish,
)
from .equivalences import INF, PartitionSequence, dirdist, dist, refine_sequence
from .hml import FormulaStore, Metrics, evaluate, metrics, parse_formula, render
from .lts import Lts, parse_aut, write_aut

__all__ = [
    "DEPTH_AND_NEGATION",
    "DEPTH_ONLY",
    "BisimilarStatesError",
    "Distinguisher",
    "DistinguishResult",
    "FormulaStore",
    "INF",
    "Lts",
    "Metrics",
    "PartitionSequence",
    "WitnessRequest",
    "dirdist",
    "dist",
    "distinguish",
    "evaluate",
    "metrics",
    "parse_aut",
    "parse_formula",
    "refine_sequence",
    "render",
    "write_aut",
]
