"""Operators, system assembly, least-squares solve and solution evaluation."""

from .operators import (
    Coefficient,
    ScalarOperator,
    OperatorSpec,
    ProblemDefinition,
    BasisDerivatives,
    basis_derivatives,
    apply_operator,
    coefficient_values,
    as_columns,
)
from .solution import ColumnMap, Solution, FieldValues, evaluate, evaluate_values
from .assembly import RowTag, LinearSystem, compute_rescaling, assemble_system
from .lstsq import LstsqResult, solve_lstsq

__all__ = [
    'Coefficient',
    'ScalarOperator',
    'OperatorSpec',
    'ProblemDefinition',
    'BasisDerivatives',
    'basis_derivatives',
    'apply_operator',
    'coefficient_values',
    'as_columns',
    'ColumnMap',
    'Solution',
    'FieldValues',
    'evaluate',
    'evaluate_values',
    'RowTag',
    'LinearSystem',
    'compute_rescaling',
    'assemble_system',
    'LstsqResult',
    'solve_lstsq',
]
