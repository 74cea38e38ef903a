"""logfree: exact freeness and stable freeness of hyperplane arrangements.

The toolkit constructs the graded module of vector fields with
logarithmic poles along an arrangement (kernel of the Jacobian row),
decides freeness through Horrocks splitting and stable freeness through
the Coanda vanishing range, computes intersection-lattice invariants, and
stress-tests the combinatorial-invariance conjectures by grouping
enumerated arrangements by lattice isomorphism class.
"""

from .arrangement import (
    Arrangement,
    ArrangementError,
    catalog,
    defining_polynomial,
    jacobian_map,
    log_tangent_module,
    parse_arrangement_file,
    parse_arrangement_text,
    serialize_arrangement,
)
from .classify import ClassifyOptions, Dossier, classify, saito_check
from .cohomology import (
    CohomologyReport,
    coanda_stably_free,
    cohomology_table,
    ext_module,
    horrocks_split,
    module_is_zero,
)
from .fields import GF, QQ, parse_field
from .groebner import Budget, BudgetExceeded, groebner_basis, kernel_gens, syzygy_module
from .lattice import Lattice, intersection_lattice, lattices_isomorphic
from .modules import FreeModule, GradedMap, GradedModule, Vec
from .poly import Poly, PolyRing
from .resolution import (
    Resolution,
    hilbert_series,
    is_free_module,
    minimal_free_resolution,
)

__version__ = "0.1.0"

__all__ = [
    "Arrangement",
    "ArrangementError",
    "Budget",
    "BudgetExceeded",
    "ClassifyOptions",
    "CohomologyReport",
    "Dossier",
    "FreeModule",
    "GF",
    "GradedMap",
    "GradedModule",
    "Lattice",
    "Poly",
    "PolyRing",
    "QQ",
    "Resolution",
    "Vec",
    "catalog",
    "classify",
    "coanda_stably_free",
    "cohomology_table",
    "defining_polynomial",
    "ext_module",
    "groebner_basis",
    "hilbert_series",
    "horrocks_split",
    "intersection_lattice",
    "is_free_module",
    "jacobian_map",
    "kernel_gens",
    "lattices_isomorphic",
    "log_tangent_module",
    "minimal_free_resolution",
    "module_is_zero",
    "parse_arrangement_file",
    "parse_arrangement_text",
    "parse_field",
    "saito_check",
    "serialize_arrangement",
    "syzygy_module",
]
