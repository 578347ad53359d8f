"""Quantum-dimension solutions of simply laced Q-systems.

Builds the specialised character tables z^(a)_m for families A and D,
certifies their exact zeros and signs, verifies the KNS property list
and the recurrence, solves the level-k restricted system numerically,
and evaluates the Rogers-dilogarithm identity for the positive solution.
"""

from .affine import (AffineWeight, IterationCapExceeded, ReductionResult,
                     affinize, apply_automorphism, diagram_automorphisms,
                     level_of, orbit_of_zero, reduce_to_alcove, reflect,
                     shifted_action)
from .dynkin import (DynkinData, RankMismatch, Root, UnsupportedType, Weight,
                     build_dynkin, dominant_weights, pairing, positive_roots,
                     weyl_vector)
from .qdim import (QDimValue, RankTooLarge, precision_bits, qdim, qdim_affine,
                   qdim_oracle, weyl_group_order)
from .solver import (DilogReport, DomainError, InvalidLevel, NoConvergence,
                     RestrictedSolution, XOutOfRange,
                     check_positive_solution_properties, dilog_identity,
                     rogers_L, solve_restricted, uniqueness_probe)
from .table import (KRDecomposition, QTable, build_qtable, forced_tail_report,
                    kr_decompose, kr_term_count, midpoint_checks,
                    rebuild_from_first_row, verify_kns, verify_qsystem)

__version__ = "0.1.0"

__all__ = [
    "AffineWeight", "DilogReport", "DomainError", "DynkinData",
    "InvalidLevel", "IterationCapExceeded", "KRDecomposition",
    "NoConvergence", "QDimValue", "QTable", "RankMismatch", "RankTooLarge",
    "ReductionResult", "RestrictedSolution", "Root", "UnsupportedType",
    "Weight", "XOutOfRange", "affinize", "apply_automorphism",
    "build_dynkin", "build_qtable", "check_positive_solution_properties",
    "diagram_automorphisms", "dilog_identity", "dominant_weights",
    "forced_tail_report", "kr_decompose", "kr_term_count", "level_of",
    "midpoint_checks", "orbit_of_zero", "pairing", "positive_roots",
    "precision_bits", "qdim", "qdim_affine", "qdim_oracle",
    "rebuild_from_first_row", "reduce_to_alcove", "reflect", "rogers_L",
    "shifted_action", "solve_restricted", "uniqueness_probe", "verify_kns",
    "verify_qsystem", "weyl_group_order", "weyl_vector",
]
