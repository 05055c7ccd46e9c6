"""Exact combinatorial engine for algebraic torsion orders of contact
3-manifold models and the ECH survival invariants f / f_simp."""

from .algebra import (
    AlgebraElement,
    DifferentialOperator,
    Generator,
    Monomial,
    Truncation,
    apply_operator,
    bracket,
    normalize,
    verify_square_zero,
)
from .cylinders import (
    assemble_sft_differential,
    automatic_transversality_check,
    count_index1_positive_only,
    enumerate_cylinders,
)
from .ech import (
    ECHComplex,
    EmbeddedOrbitECH,
    OrbitSetECH,
    RelClassData,
    decompose_differential,
    ech_index,
    ech_lower_bound_certificate,
    f_value,
    j_plus,
    scaling_relabel,
    simplicity_closure,
    survival_report,
)
from .groupring import CoefficientLattice, GroupRingElement
from .orbits import ReebOrbit, conley_zehnder, generate_orbits
from .primitives import primitive_via_bracket, solve_primitive
from .surface import (
    DividedSurface,
    SidedSurface,
    build_divided_surface,
    enumerate_flow_lines,
    morse_homology,
    null_homology_check,
)
from .torsion import (
    PlanarTorsionDescriptor,
    TorsionReport,
    coefficient_morphism,
    lower_bound_certificate,
    planar_torsion_differential,
    torsion_upper_bound,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraElement",
    "CoefficientLattice",
    "DifferentialOperator",
    "DividedSurface",
    "ECHComplex",
    "EmbeddedOrbitECH",
    "Generator",
    "GroupRingElement",
    "Monomial",
    "OrbitSetECH",
    "PlanarTorsionDescriptor",
    "ReebOrbit",
    "RelClassData",
    "SidedSurface",
    "TorsionReport",
    "Truncation",
    "apply_operator",
    "assemble_sft_differential",
    "automatic_transversality_check",
    "bracket",
    "build_divided_surface",
    "coefficient_morphism",
    "conley_zehnder",
    "count_index1_positive_only",
    "decompose_differential",
    "ech_index",
    "ech_lower_bound_certificate",
    "enumerate_cylinders",
    "enumerate_flow_lines",
    "f_value",
    "generate_orbits",
    "j_plus",
    "lower_bound_certificate",
    "morse_homology",
    "normalize",
    "null_homology_check",
    "planar_torsion_differential",
    "primitive_via_bracket",
    "scaling_relabel",
    "simplicity_closure",
    "solve_primitive",
    "survival_report",
    "torsion_upper_bound",
    "verify_square_zero",
]
