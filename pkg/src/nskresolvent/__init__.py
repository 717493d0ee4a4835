"""
Fourier-symbol solver and certification tools for the linearized two-phase
resolvent problem: a compressible Navier-Stokes-Korteweg phase above a flat
interface, an incompressible Stokes phase below.
"""

__version__ = "0.1.0"

from .params import (PhysicalParams, ValidatedParams, DerivedConstants, ParamError, EtaStarZero,
                     KappaEqualsMuNu, EqualDensities, NonPositiveConstant, ViscosityRatio,
                     InvalidDimension, DEFAULT_PARAMS, validate_params, derived_constants)
from .symbols import (SpectralPoint, SymbolSet, DegenerateRoots, BranchCutError, InadmissiblePoint,
                      characteristic_roots, eval_M, eval_M_derivatives)
from .lopatinski import (lopatinski_data, kinetic_symbol, scan_lower_bound, scan_kinetic_bound,
                         regime_constants, ScanGrid, ScanReport)
from .multipliers import (coefficient_table, coefficient, ClassClaim, ClassGrid, certify_classes,
                          class_estimate, kernel_decay_probe, default_claims)
from .mode_solver import (BoundaryData, ModeSolution, solve_mode, eval_mode, residual_mode,
                          synthesize_field, extend_height, extension_coefficients, SingularL,
                          KineticSingular)
from .oracle import CollocationConfig, collocation_solve, compare, converge
