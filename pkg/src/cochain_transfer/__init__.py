"""Homotopy-transferred action of vector fields on cochains of small triangulated manifolds.

The package builds cochain retracts of the interval, the circle and the unit
square, computes the induced word tensors ``<chain, L h L ... h L cochain>``
and checks the classical master equation of the resulting BV action.
"""

from .backends import BuildError, CochainComplex, build_circle, build_from_config, build_interval, build_square
from .grassmann import GPoly, GVar, antibracket, assemble_action, cme_residual, resolve_sign_convention
from .liealg import (GeneratorBasis, basis_from_config, circle_basis, interval_basis, square_basis,
                     structure_constants, window_closed)
from .transfer import closed_form_tables, differential_matrix, transfer_tensors, word_operator

__version__ = "0.1.0"

__all__ = [
    "BuildError", "CochainComplex", "build_circle", "build_from_config", "build_interval",
    "build_square", "GPoly", "GVar", "antibracket", "assemble_action", "cme_residual",
    "resolve_sign_convention", "GeneratorBasis", "basis_from_config", "circle_basis",
    "interval_basis", "square_basis", "structure_constants",
    "window_closed", "closed_form_tables", "differential_matrix", "transfer_tensors",
    "word_operator",
]
