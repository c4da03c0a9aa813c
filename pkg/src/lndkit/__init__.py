"""Degree modules, resolutions and factorizations for locally nilpotent derivations."""
from .degmod import (
    DegreeModule,
    DegreeResolution,
    Filtration,
    GradedRingTruncation,
    d_basis_check,
    degree_module,
    degree_resolution,
    freeness_diagnostics,
    graded_ring_truncation,
    initial_module,
)
from .factor import (
    AffineTriple,
    CanonicalFactorization,
    ModificationStep,
    canonical_factorization,
    compose_modifications,
    equivariance_check,
    find_modification,
    modification_ring,
)
from .groebner import Ideal, QuotientContext, Submodule, groebner_basis, syzygies
from .lnd import (
    Derivation,
    LocalSlice,
    deg_D,
    dixmier_map,
    find_local_slice,
    fixed_point_ideal,
    image_ideal,
    kernel_generators,
    plinth_ideal,
)
from .poly import GREVLEX, GRLEX, LEX, Polynomial, PolyRing, divide_exact, parse
from .problem import Problem, fixture, load_problem, parse_problem
from .subalg import AIdeal, SubalgebraPresentation, SubmoduleOverA, algebra_equal

__all__ = [
    "DegreeModule",
    "DegreeResolution",
    "Filtration",
    "GradedRingTruncation",
    "d_basis_check",
    "degree_module",
    "degree_resolution",
    "freeness_diagnostics",
    "graded_ring_truncation",
    "initial_module",
    "AffineTriple",
    "CanonicalFactorization",
    "ModificationStep",
    "canonical_factorization",
    "compose_modifications",
    "equivariance_check",
    "find_modification",
    "modification_ring",
    "Ideal",
    "QuotientContext",
    "Submodule",
    "groebner_basis",
    "syzygies",
    "Derivation",
    "LocalSlice",
    "deg_D",
    "dixmier_map",
    "find_local_slice",
    "fixed_point_ideal",
    "image_ideal",
    "kernel_generators",
    "plinth_ideal",
    "GREVLEX",
    "GRLEX",
    "LEX",
    "Polynomial",
    "PolyRing",
    "divide_exact",
    "parse",
    "Problem",
    "fixture",
    "load_problem",
    "parse_problem",
    "AIdeal",
    "SubalgebraPresentation",
    "SubmoduleOverA",
    "algebra_equal",
]

__version__ = "0.1.0"
