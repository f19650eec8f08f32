"""Exact computations for Beloshapka CR models and their rigidity."""

from __future__ import annotations

from .aut_cr import AutGradedComponent, AutSummary, HolomorphicField, aut_summary, graded_component, tangency_residue
from .cr_structures import (
    ComplexStructure,
    FreeCRAlgebra,
    free_cr_algebra,
    is_totally_nondegenerate_symbol,
    standard_complex_structure,
)
from .errors import BudgetExceeded, ConsistencyError, ResourceError
from .exact_linalg import Echelon, Matrix, Q, determinant, nullspace, rank, solve
from .free_lie import HallBasis, free_nilpotent_algebra, generate_hall_basis, witt_dimension
from .graded_lie import GradedLieAlgebra, check_axioms
from .models import (
    ModelEquations,
    assign_weights,
    basis_N2,
    basis_N3,
    basis_Nj,
    check_total_nondegeneracy,
    full_model,
    is_pluriharmonic_on_graph,
    model_equations,
    model_for,
    symbol_algebra,
)
from .rigidity import (
    RigidityReport,
    WarhurstSystem,
    coefficient_C,
    determinant_polynomial_roots,
    verify_cr_dim_one,
    verify_full_model,
    warhurst_matrix,
)
from .tanaka import ProlongationResult, levi_tanaka, prolong_degree_zero, prolong_step

__version__ = "0.1.0"
