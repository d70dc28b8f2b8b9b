"""Reducible trees and numerical continuation for Galerkin truncations of the
cubic wave equation u_tt - u_xx + u^3 = 0 with Dirichlet conditions on [0, pi]."""

from .continuation import (
    ContinuationConfig,
    ContinuationCurve,
    Marker,
    NewtonError,
    detect_bifurcations,
    switch_branch,
    trace_curve,
    trace_family,
    trunk_point,
)
from .galerkin import AlgebraicSystem, SolutionPoint, energy, is_reducible
from .modes import FUNDAMENTAL, ModeIndex, ModeSet, diagonal_truncation, parse_modes
from .reducible import n_mode_solution
from .tree import ReducibleTree, build_tree, primary_branch_count

__all__ = [
    "AlgebraicSystem",
    "ContinuationConfig",
    "ContinuationCurve",
    "FUNDAMENTAL",
    "Marker",
    "ModeIndex",
    "ModeSet",
    "NewtonError",
    "ReducibleTree",
    "SolutionPoint",
    "build_tree",
    "detect_bifurcations",
    "diagonal_truncation",
    "energy",
    "is_reducible",
    "n_mode_solution",
    "parse_modes",
    "primary_branch_count",
    "switch_branch",
    "trace_curve",
    "trace_family",
    "trunk_point",
]

__version__ = "0.1.0"
