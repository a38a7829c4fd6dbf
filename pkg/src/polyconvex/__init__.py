"""Numerical criteria for local polynomial convexity of unions of totally-real
planes and of CR-singular surfaces ``w = z^2 zb + t z zb^2 + (t^2/3) zb^3``."""

from .analysis import (
    CurveAnalysis,
    SubharmonicityReport,
    curve_analysis,
    laplacian_symbolic,
    maslov_index_algebraic,
    maslov_index_winding,
    min_preimage_threshold,
    preimage_count,
    subharmonicity_check,
)
from .certify import KallinCase, KallinReport, kallin_verify
from .config import DEFAULT, Tolerances
from .convexity import (
    STAR,
    SQRT3_OVER_2,
    ConvexityVerdict,
    FamilyClassification,
    Status,
    SurfaceKind,
    bishop_t,
    classify_cubic_surface,
    classify_perturbed_surface,
    three_plane_decider,
    weinstock_pair_check,
)
from .errors import PolyConvexError
from .invariants import InvariantReport, beta_normalform_identity_check, compute_invariants
from .kernel import (
    HermitianPoly,
    LaurentExpr,
    RootSet,
    cubic_normal_form,
    evaluate,
    find_roots,
    winding_number,
    wirtinger_dbar,
)
from .planes import (
    CubicCoefficients,
    TotallyRealPlane,
    branch_lift,
    factor_cubic_preimage,
    family_matrices,
    family_planes,
    pairwise_reduction,
    simultaneous_normal_form,
    verify_pullback,
    weinstock_normal_form,
)

__version__ = "0.1.0"

__all__ = [
    "ConvexityVerdict",
    "CubicCoefficients",
    "CurveAnalysis",
    "DEFAULT",
    "FamilyClassification",
    "HermitianPoly",
    "InvariantReport",
    "KallinCase",
    "KallinReport",
    "LaurentExpr",
    "PolyConvexError",
    "RootSet",
    "SQRT3_OVER_2",
    "STAR",
    "Status",
    "SubharmonicityReport",
    "SurfaceKind",
    "Tolerances",
    "TotallyRealPlane",
    "beta_normalform_identity_check",
    "bishop_t",
    "branch_lift",
    "classify_cubic_surface",
    "classify_perturbed_surface",
    "compute_invariants",
    "cubic_normal_form",
    "curve_analysis",
    "evaluate",
    "factor_cubic_preimage",
    "family_matrices",
    "family_planes",
    "find_roots",
    "kallin_verify",
    "laplacian_symbolic",
    "maslov_index_algebraic",
    "maslov_index_winding",
    "min_preimage_threshold",
    "pairwise_reduction",
    "preimage_count",
    "simultaneous_normal_form",
    "subharmonicity_check",
    "three_plane_decider",
    "verify_pullback",
    "weinstock_normal_form",
    "weinstock_pair_check",
    "winding_number",
    "wirtinger_dbar",
]
