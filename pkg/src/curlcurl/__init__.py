"""Divergence-free Legendre spectral methods for curl-curl and Maxwell problems.

The unknown fields are expanded in tensor products of Legendre-type bases
whose every member is exactly divergence free. The linear systems are solved
by GMRES preconditioned with an auxiliary problem that the eigenvectors of
the 1D mass matrix diagonalize.
"""
from .basis import BasisConfig, QuadratureRule, gauss_legendre, basis_tables
from .operators import assemble_mass, assemble_stiffness, diagonalize_mass
from .solver2d import (CurlCurlConfig, ResonanceError, SolveReport, apply_operator_2d,
                       aux_solve_2d, discretization, pgmres_2d, pgmres_var_2d,
                       VarCoeffOperator2D)
from .solver3d import CoeffSet3D, apply_operator_3d, aux_solve_3d, pgmres_3d
from .fields import (project_rhs_2d, project_rhs_3d, evaluate_field_2d, evaluate_field_3d,
                     divergence_max, error_norms)
from .maxwell import MaxwellConfig, run_maxwell_2d, run_maxwell_3d

__version__ = "0.1.0"
