"""Finite truncated presheaves over Eilenberg-Zilber shape categories.

Shapes (simplices, cubes, cubes with connections), presheaves truncated at
a dimension ``N``, lifting and fibration checks, homotopies, minimal models
and minimal fibrations, and size-bounded universe classification.
"""
from .shape import ShapeMorphism, ShapeObject, homs, verify_ez_axioms
from .presheaf import (
    Presheaf,
    PresheafMorphism,
    Subpresheaf,
    codiscrete,
    discrete,
    nerve_of_group,
    point,
    product,
    pullback,
    pushforward_along_mono,
    representable,
    validate_presheaf,
)
from .lifting import (
    Verdict,
    bounded_soa_factorize,
    has_rlp,
    is_fibrant,
    is_fibration,
    is_trivial_fibration,
    solve_lifting,
)
from .homotopy import (
    boundary_equivalent,
    homotopy_inverse_search,
    is_weak_equivalence_fiberwise,
    partition_by_boundary_equivalence,
)
from .minimal import (
    check_minimal_characterization,
    extend_fibration,
    glue_equivalence_extension,
    is_minimal_complex,
    minimal_fibration_factorization,
    minimal_model,
)
from .universe import (
    ClassifyingMap,
    SmallPresheaf,
    eq_subobject,
    extend_classifier_along_mono,
    hs_classify,
    is_in_universe,
    realize,
    rel_hom,
    univalence_witness,
)
from .io import parse_morphism, parse_presheaf, read_morphism, read_presheaf

__version__ = "0.1.0"

__all__ = [
    "Presheaf",
    "PresheafMorphism",
    "Subpresheaf",
    "codiscrete",
    "discrete",
    "nerve_of_group",
    "point",
    "product",
    "pullback",
    "pushforward_along_mono",
    "representable",
    "validate_presheaf",
    "Verdict",
    "bounded_soa_factorize",
    "has_rlp",
    "is_fibrant",
    "is_fibration",
    "is_trivial_fibration",
    "solve_lifting",
    "boundary_equivalent",
    "homotopy_inverse_search",
    "is_weak_equivalence_fiberwise",
    "partition_by_boundary_equivalence",
    "check_minimal_characterization",
    "extend_fibration",
    "glue_equivalence_extension",
    "is_minimal_complex",
    "minimal_fibration_factorization",
    "minimal_model",
    "ClassifyingMap",
    "SmallPresheaf",
    "eq_subobject",
    "extend_classifier_along_mono",
    "hs_classify",
    "is_in_universe",
    "realize",
    "rel_hom",
    "univalence_witness",
    "ShapeMorphism",
    "ShapeObject",
    "homs",
    "verify_ez_axioms",
    "parse_morphism",
    "parse_presheaf",
    "read_morphism",
    "read_presheaf",
]
