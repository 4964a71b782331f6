"""Exact-arithmetic toolkit for Leibniz algebras and their affine
extensions: structure-constant algebras, bi-affine brackets with their
Leibnizians, type classifiers, morphism verification and search, and a
catalog of low-dimensional algebras and bracket families.

All arithmetic is exact (rationals or prime fields); there is no floating
point anywhere.  The hot identity checks run on a compiled kernel when the
extension is built, with a pure-Python interpreter as fallback.
"""

from ._kernel import backend_name, compiled_available
from .affine import AffineMapData, act, heap, translate
from .affgebra import (
    AssociativeAffgebra,
    BiAffineBracket,
    VectorValuedBracket,
    check_general_conditions,
    condition_report,
    conditions_derivative,
    conditions_homogeneous,
    conditions_lie_type,
    derivative_from_associative,
    from_vector_valued,
    generalized_derivation_holds,
    is_affine_antisymmetric,
    is_affine_leibniz,
    is_derivative,
    is_homogeneous,
    is_lie_affgebra,
    is_lie_type,
    satisfies_affine_jacobi,
    to_vector_valued,
)
from .exactmath import (
    GF,
    FieldSpec,
    Mat,
    Q,
    Subspace,
    Vec,
    grid_vanishes,
    solve_linear,
)
from .leibalg import LeibnizAlgebra, NotLeibnizError, is_leibniz
from .morphism import (
    automorphism_family,
    induced_subaffgebra,
    is_affgebra_hom,
    is_affgebra_iso,
    is_leibniz_morphism,
    is_subaffgebra,
    search_iso,
)

__version__ = "0.1.0"

__all__ = [
    "AffineMapData",
    "AssociativeAffgebra",
    "BiAffineBracket",
    "FieldSpec",
    "GF",
    "LeibnizAlgebra",
    "Mat",
    "NotLeibnizError",
    "Q",
    "Subspace",
    "Vec",
    "VectorValuedBracket",
    "act",
    "automorphism_family",
    "backend_name",
    "check_general_conditions",
    "compiled_available",
    "condition_report",
    "conditions_derivative",
    "conditions_homogeneous",
    "conditions_lie_type",
    "derivative_from_associative",
    "from_vector_valued",
    "generalized_derivation_holds",
    "grid_vanishes",
    "heap",
    "induced_subaffgebra",
    "is_affgebra_hom",
    "is_affgebra_iso",
    "is_affine_antisymmetric",
    "is_affine_leibniz",
    "is_derivative",
    "is_homogeneous",
    "is_leibniz",
    "is_leibniz_morphism",
    "is_lie_affgebra",
    "is_lie_type",
    "is_subaffgebra",
    "satisfies_affine_jacobi",
    "search_iso",
    "solve_linear",
    "to_vector_valued",
    "translate",
]
