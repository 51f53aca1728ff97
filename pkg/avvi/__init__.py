from .exact_linalg import (
    AffineSet,
    DimensionError,
    Infeasible,
    LinIneqSystem,
    Matrix,
    NotSkewSymmetricError,
    Vector,
    affine_hull,
    determinant,
    fm_project,
    interpolate_parametric_det,
    interpolate_parametric_pf,
    is_feasible,
    pfaffian,
    solve_affine_system,
)
from .polynomials import UniPoly, isolate_roots, merge_roots
from .model import (
    AffineOperator,
    ActivePattern,
    AvviProblem,
    Polyhedron,
    UNCONSTRAINED,
    UnsupportedProblemError,
    Weight,
    active_pattern_of,
    is_monotone,
    is_nondegenerate,
    is_psd,
    is_skew,
    scalarize,
)
from .avi_solver import (
    AviSolutionSet,
    TooManyConstraintsError,
    is_pareto,
    is_vi_solution,
    is_weak_pareto,
    solution_at,
    solve_avi,
    solve_pattern,
)
from .parametric_sweep import (
    BicriteriaSweep,
    IrrationalCriticalValueError,
    Mode,
    SweepInvariantError,
    critical_values,
    decompose_cells,
    limit_at,
)
from .components import build_piece_graph, compare_modes, count_components
from .sampling_oracle import SamplingOracle, sampling_oracle
from .instances import (
    BoundKind,
    bounds,
    gen_family,
    ground_truth,
    lift_criterion,
    lift_variable,
    lower_bound_witness,
    skew_root_bound,
)
from .analysis_service import AvviAnalysisService

__all__ = [
    "AffineSet",
    "DimensionError",
    "Infeasible",
    "LinIneqSystem",
    "Matrix",
    "NotSkewSymmetricError",
    "Vector",
    "affine_hull",
    "determinant",
    "fm_project",
    "interpolate_parametric_det",
    "interpolate_parametric_pf",
    "is_feasible",
    "pfaffian",
    "solve_affine_system",
    "UniPoly",
    "isolate_roots",
    "merge_roots",
    "AffineOperator",
    "ActivePattern",
    "AvviProblem",
    "Polyhedron",
    "UNCONSTRAINED",
    "UnsupportedProblemError",
    "Weight",
    "active_pattern_of",
    "is_monotone",
    "is_nondegenerate",
    "is_psd",
    "is_skew",
    "scalarize",
    "AviSolutionSet",
    "TooManyConstraintsError",
    "is_pareto",
    "is_vi_solution",
    "is_weak_pareto",
    "solution_at",
    "solve_avi",
    "solve_pattern",
    "BicriteriaSweep",
    "IrrationalCriticalValueError",
    "Mode",
    "SweepInvariantError",
    "critical_values",
    "decompose_cells",
    "limit_at",
    "build_piece_graph",
    "compare_modes",
    "count_components",
    "SamplingOracle",
    "sampling_oracle",
    "BoundKind",
    "bounds",
    "gen_family",
    "ground_truth",
    "lift_criterion",
    "lift_variable",
    "lower_bound_witness",
    "skew_root_bound",
    "AvviAnalysisService",
]
