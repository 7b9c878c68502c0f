"""Finite-dimensional models for gluing formulas of zeta determinants and Mayer-Vietoris torsion."""

__version__ = "0.1.0"

from .complexes import FiniteComplex, NotExactError, canonical_section_norm, direct_sum, shift, torsion
from .gluing import CircleGeometry, GluingScenario, circle_gluing_check, full_report, zeta_gluing_model_check
from .hermitian import HermitianSpace, OrthoProjection, ValidationError, det_star, projection_pair_detstar
from .mayer_vietoris import (ScaledDiagram, build_l_sequence, mv_asymptotic_rhs, mv_torsion_scaled, torsion_l,
                             torsion_l_closed_form)
from .scattering import (LimitingSubspace, ScatteringFamily, ScatteringMatrix, YModel, c12, c12_matrix, c_bd,
                         chi_euler, chi_prime_of, chi_prime_top, scattering_from_subspace)
from .spectra import lambda_roots, near_root_refine
from .zeta import (EigenvalueCatalog, Progression, hurwitz_zeta, model_weighted_zeta_prime0, model_zeta_prime0,
                   progression_zeta_prime0)

__all__ = [
    "CircleGeometry", "EigenvalueCatalog", "FiniteComplex", "GluingScenario", "HermitianSpace", "LimitingSubspace",
    "NotExactError", "OrthoProjection", "Progression", "ScaledDiagram", "ScatteringFamily", "ScatteringMatrix",
    "ValidationError", "YModel", "build_l_sequence", "c12", "c12_matrix", "c_bd", "canonical_section_norm",
    "chi_euler", "chi_prime_of", "chi_prime_top", "circle_gluing_check", "det_star", "direct_sum", "full_report",
    "hurwitz_zeta", "lambda_roots", "model_weighted_zeta_prime0", "model_zeta_prime0", "mv_asymptotic_rhs",
    "mv_torsion_scaled", "near_root_refine", "progression_zeta_prime0", "projection_pair_detstar",
    "scattering_from_subspace", "shift", "torsion", "torsion_l", "torsion_l_closed_form", "zeta_gluing_model_check",
]
