from .newton import (SingularSystemError, SolveReport, SolverError, UnfoldingState, assemble_jacobian,
                     default_tol, newton_solve, residual_henon, residual_standard_recast, solve_linear,
                     unfolding_diagnostics)
from .problems import (ConjugacyProblem, PhaseCondition, QuadraticProblem, RecastProblem, SampledProblem,
                       make_problem, trig_aux)

__all__ = [
    "ConjugacyProblem", "PhaseCondition", "QuadraticProblem", "RecastProblem", "SampledProblem",
    "SingularSystemError", "SolveReport", "SolverError", "UnfoldingState", "assemble_jacobian",
    "default_tol", "make_problem", "newton_solve", "residual_henon", "residual_standard_recast",
    "solve_linear", "trig_aux", "unfolding_diagnostics",
]
