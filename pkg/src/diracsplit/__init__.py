"""Splitting of the Dirac equation in longitudinal external fields.

The library verifies, numerically and in closed form where possible,
that a Dirac solution under a longitudinal potential splits into two
projector subequations, separates into transverse 2D Pauli
eigenproblems plus longitudinal 1+1D Dirac pairs with effective mass,
and reconstructs to a full four-component solution.
"""

from .clifford import (GammaSet, ProjectorId, anticommutator_defect,
                       build_spinor_rep, charge_conjugate, projector,
                       similarity_transform)
from .expressions import Expression, parse_expression
from .fields import BispinorField
from .lattice import (AxisSpec, ComplexField2D, DiffOp, Grid2D, apply,
                      operator_matrix, pi_operator)
from .potentials import (FieldStrengths, PotentialSpec, add_potentials,
                         builtin, commutator_residual, field_strengths,
                         from_expressions, validate_longitudinal)
from .separation import (Branch, LongitudinalSolution, SeparatedSolution,
                         TransverseMode, build_pauli_operator, effective_mass,
                         ladder_residuals, reconstruct, rescale_alpha,
                         scan_levels, second_order_residual,
                         solve_longitudinal_planewave,
                         solve_longitudinal_stationary, solve_transverse,
                         truncation_estimate)
from .splitting import (PiSpinorMatrix, SubsolutionPair, build_pi_matrix,
                        dirac_residual, identity_residuals, recombine, split,
                        subequation_residual)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
