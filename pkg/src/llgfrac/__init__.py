"""Norm-preserving finite-difference integrators for the Landau-Lifshitz-Gilbert equation."""

from . import _backend
from .errors import LLGError, NonFiniteError, PicardError, SolverError, StepError
from .grid_field import (
    Boundary, Grid, NormTriple, VectorField, error_norms, exchange_energy, make_grid,
    max_unit_norm_deviation, weighted_inner, weighted_l2,
)
from .harness import (
    ConvergenceReport, StudyConfig, StudyError, StudyKind, estimate_order, format_csv,
    preset, read_csv, run_study, write_csv,
)
from .manufactured import ManufacturedProblem, evaluate_run, exact_solution, forcing, initial_profile
from .nodal import (
    SpectrumShape, cayley_step, constant_field_propagator, cross, iteration_spectrum, skew_matrix,
    solve3_cramer,
)
from .operators import HelmholtzOptions, helmholtz_solve, laplacian, offdiag_laplacian
from .schemes import SchemeConfig, SchemeKind, StepDiagnostics, integrate, step

__version__ = "0.1.0"


def backend_name() -> str:
    """``"compiled"`` or ``"python"``: the kernel set currently in use."""
    return _backend.kernels.NAME
