"""Numerical kernel functions and period matrices on multiply connected
planar domains."""

import os as _os

# Cap the numeric thread pools before the linear-algebra stack loads; the
# BLAS/OpenMP runtimes read these variables once, at import time.
_cap = _os.environ.get("HEJHAL_LAB_THREADS", "")
if _cap.isdigit() and int(_cap) > 0:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                 "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS",
                 "VECLIB_MAXIMUM_THREADS"):
        _os.environ[_var] = _cap

__version__ = "0.1.0"

from ._backend import backend_name
from . import errors
from .geometry import (
    CurveParam,
    Domain,
    build_cuts,
    build_domain,
    domain_from_config,
    radius_schedule,
    sample_boundary,
    shrinking_hole_family,
)
from .laplace import GreenFunction, HarmonicMeasure, dirichlet_solver, harmonic_measures
from .szego import AhlforsMap, SzegoSolver, szego_solver
from .periods import (
    LambdaMatrix,
    Workspace,
    beta_period_dF,
    beta_period_kappa,
    beta_period_sigma,
    lambda_from_periods,
    period_vector,
    sigma_span_rank,
)
from .hejhal import (
    DEFAULT_TOLERANCES,
    HomotopyTrace,
    LambdaReport,
    ahlfors_suite,
    boundary_sign_checks,
    differential_zero_counts,
    hejhal_verify,
    homotopy_sweep,
    lambda_all_methods,
    lambda_from_fit,
    residue_projection_check,
    suita_gap,
    unit_mass_F,
    verify_suite,
)

__all__ = [
    "AhlforsMap",
    "CurveParam",
    "DEFAULT_TOLERANCES",
    "Domain",
    "GreenFunction",
    "HarmonicMeasure",
    "HomotopyTrace",
    "LambdaMatrix",
    "LambdaReport",
    "SzegoSolver",
    "Workspace",
    "__version__",
    "ahlfors_suite",
    "backend_name",
    "beta_period_dF",
    "beta_period_kappa",
    "beta_period_sigma",
    "boundary_sign_checks",
    "build_cuts",
    "build_domain",
    "differential_zero_counts",
    "dirichlet_solver",
    "domain_from_config",
    "errors",
    "harmonic_measures",
    "hejhal_verify",
    "homotopy_sweep",
    "lambda_all_methods",
    "lambda_from_fit",
    "lambda_from_periods",
    "period_vector",
    "radius_schedule",
    "residue_projection_check",
    "sample_boundary",
    "shrinking_hole_family",
    "sigma_span_rank",
    "suita_gap",
    "szego_solver",
    "unit_mass_F",
    "verify_suite",
]
