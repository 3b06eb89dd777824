"""Quasiperiodic invariant circles of area-preserving maps from orbit data."""

__version__ = "0.1.0"

from .birkhoff import (Classification, DecayFitError, InsufficientData, OrbitKind, RotationEstimate,
                       classify_orbit, estimate_truncation, fourier_coefficient, fourier_coefficients,
                       make_weights, rotation_number, sample_decay, weighted_average)
from .continuation import (ContinuationConfig, ContinuationRecord, FamilyResult, NotElliptic, RestartError,
                           StopReason, continue_family, restart_next_family)
from .fourier import CircleSystem, FourierCircle, defect, enclosed_area, sobolev_norm
from .io import CircleFile, FamilyFile, SchemaError
from .maps import (Family, MapOverflowError, MapSpec, OrbitSegment, PeriodicOrbit, PeriodicOrbitError,
                   StabilityKind, eval_map, find_periodic_orbit, henon, iterate_orbit, jacobian, stability_type,
                   standard)
from .projection import AngleSequence, DegenerateProjection, diff_sequence, forward_diff, project_angles
from .recipe import (InitialGuessError, NewtonFailure, NotQuasiperiodic, RecipeConfig, RecipeError, RecipeResult,
                     initial_guess, run_recipe)
from .solver import (PhaseCondition, SolveReport, SolverError, UnfoldingState, newton_solve,
                     unfolding_diagnostics)

__all__ = [name for name in dir() if not name.startswith("_")]
