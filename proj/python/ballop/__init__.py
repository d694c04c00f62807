"""Composition operators on weighted Hardy spaces of the unit ball."""

from ._ballop import (
    BallopError,
    LinearFractionalMap,
    Space,
    certify,
    composition_matrix,
    compose,
    conjugation_Ja,
    csym_residual,
    find_conjugation_2x2,
    involution_defect,
    jv_pipeline,
    linear_map,
    mobius,
    normality_residual,
    polar_unitary,
    takagi,
)

__all__ = [
    "BallopError",
    "LinearFractionalMap",
    "Space",
    "certify",
    "composition_matrix",
    "compose",
    "conjugation_Ja",
    "csym_residual",
    "find_conjugation_2x2",
    "involution_defect",
    "jv_pipeline",
    "linear_map",
    "mobius",
    "normality_residual",
    "polar_unitary",
    "takagi",
]
