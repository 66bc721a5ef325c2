"""Exact intersection theory on toric varieties from tropical data."""

from .classrecovery import (
    StructuredIdeal,
    class_from_tropical,
    class_from_tropical_cox,
    class_wonderful_compactification,
    huh_katz_check,
    recover_class,
)
from .matroid import bergman_fan, characteristic_polynomial, chromatic_polynomial, matroid_from_graph, matroid_from_matrix
from .polyhedra import Fan, cone_contains
from .toric import ToricCycle, ToricDivisor, ToricVariety, deg_cycle, make_transverse, projective_space, render_cycle
from .tropical import LaurentPolynomial, TropicalCycle, check_balancing, stable_intersection, tropical_hypersurface

__version__ = "0.1.0"

__all__ = [
    "Fan",
    "LaurentPolynomial",
    "StructuredIdeal",
    "ToricCycle",
    "ToricDivisor",
    "ToricVariety",
    "TropicalCycle",
    "bergman_fan",
    "characteristic_polynomial",
    "check_balancing",
    "chromatic_polynomial",
    "class_from_tropical",
    "class_from_tropical_cox",
    "class_wonderful_compactification",
    "cone_contains",
    "deg_cycle",
    "huh_katz_check",
    "make_transverse",
    "matroid_from_graph",
    "matroid_from_matrix",
    "projective_space",
    "recover_class",
    "render_cycle",
    "stable_intersection",
    "tropical_hypersurface",
]
