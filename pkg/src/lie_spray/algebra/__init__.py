"""
Finite-dimensional real Lie algebras given by structure constants.

`structure` holds the algebra type and its operations, `catalog` the built-in
algebras with their matrix representations, and `definition_file` the JSON definition file.
"""

from .catalog import builtin, catalog_names
from .definition_file import (
    AlgebraDefinition,
    RepDefinition,
    algebra_from_definition,
    algebra_from_dict,
    algebra_to_dict,
    read_algebra,
    write_algebra,
)
from .structure import LieAlgebra, MatrixRep, ValidationReport, ad_matrix, bracket, validate

__all__ = [
    "AlgebraDefinition",
    "LieAlgebra",
    "MatrixRep",
    "RepDefinition",
    "ValidationReport",
    "ad_matrix",
    "algebra_from_definition",
    "algebra_from_dict",
    "algebra_to_dict",
    "bracket",
    "builtin",
    "catalog_names",
    "read_algebra",
    "validate",
    "write_algebra",
]
