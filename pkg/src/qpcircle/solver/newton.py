"""Newton iteration for the truncated conjugacy systems."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla

from .. import fourier as fs
from ..fourier import CircleSystem
from .problems import ConjugacyProblem, PhaseCondition, make_problem, trig_aux

log = logging.getLogger(__name__)

UNFOLDING_TOL = 1e-10
DENSE_LIMIT = 1500
PIVOT_WARN = 1e-13
# long shooting chains factor faster in their natural block order
NATURAL_ORDER_PERIOD = 8


class SolverError(RuntimeError):
    pass


class SingularSystemError(SolverError):
    pass


@dataclass
class UnfoldingState:
    beta: float = 0.0
    gamma: list = field(default_factory=list)
    omega: list = field(default_factory=list)

    def max_abs(self) -> float:
        return max([abs(self.beta)] + [abs(g) for g in self.gamma] + [abs(w) for w in self.omega])


@dataclass
class SolveReport:
    converged: bool
    iterations: int
    defect_history: list
    unfolding: UnfoldingState
    final_defect: float
    condition_warning: bool = False
    reason: str = ""
    residual_norm: float = float("nan")
    max_scalar_imag: float = 0.0
    aux: list | None = None


def solve_linear(J, rhs, permc_spec: str = "COLAMD"):
    """Pivoted LU solve; dense below ``DENSE_LIMIT`` unknowns, sparse above.

    Returns the solution and the smallest relative pivot of ``U``.
    """
    n = J.shape[0]
    if n <= DENSE_LIMIT:
        A = J.toarray() if hasattr(J, "toarray") else np.asarray(J)
        lu, piv = sla.lu_factor(A, check_finite=True)
        u = np.abs(np.diag(lu))
        x = sla.lu_solve((lu, piv), rhs)
    else:
        try:
            f = spla.splu(J.tocsc(), permc_spec=permc_spec)
        except RuntimeError as exc:
            raise SingularSystemError(str(exc)) from exc
        u = np.abs(f.U.diagonal())
        x = f.solve(rhs)
    if u.min() == 0 or not np.all(np.isfinite(x)):
        raise SingularSystemError("singular Newton matrix")
    return x, float(u.min() / u.max())


def assemble_jacobian(problem: ConjugacyProblem, z) -> np.ndarray:
    """Dense Jacobian of ``problem.residual`` at the packed state ``z``."""
    z = np.asarray(z, dtype=complex)
    if z.shape != (problem.size,):
        raise ValueError(f"state has size {z.shape}, problem expects {problem.size}")
    return problem.jacobian(z).toarray()


def default_tol(system: CircleSystem) -> float:
    scale = max(float(np.abs(np.concatenate([k.a, k.b])).max()) for k in system.circles)
    return 5e-15 * (1 + scale)


def _unfolding_state(problem, z) -> UnfoldingState:
    u = problem.unfolding(z)
    return UnfoldingState(u["beta"].real,
                          [g.real for g in u.get("gamma", [])],
                          [w.real for w in u.get("omega", [])])


def newton_solve(spec, initial: CircleSystem, phase: PhaseCondition | None = None, *,
                 tol: float | None = None, max_iter: int = 20, stagnation_factor: float = 0.5,
                 aux=None, problem_kind: str | None = None):
    """Solve the unfolded conjugacy system starting from ``initial``.

    Parameters
    ----------
    spec : MapSpec
    initial : CircleSystem
        Initial guess; ``initial.rho`` is the rotation number and its
        truncation order is kept.
    phase : PhaseCondition, optional
        Defaults to the line through ``K_1(0)`` normal to the curve.
    tol : float, optional
        Defect target, ``5e-15 * (1 + coefficient scale)`` by default.
    stagnation_factor : float
        Once the defect is below ``1e-9``, a step that does not reduce it by
        this factor ends the iteration as converged.
    aux : list of (s, c), optional
        Initial sine/cosine sequences for recast problems.

    Returns
    -------
    system : CircleSystem
    report : SolveReport
    """
    phase = phase or PhaseCondition.tangent(initial.circles[0])
    tol = default_tol(initial) if tol is None else tol
    problem = make_problem(spec, initial.rho, initial.d, initial.N, phase, problem_kind)
    z = problem.symmetrize(problem.pack(initial, aux=aux))
    d0 = fs.defect(problem.system(z), spec)
    if not np.isfinite(d0):
        raise SolverError("initial defect is not finite")
    history = [d0]
    warn, imag_seen, reason = False, 0.0, "max_iter"
    converged = d0 <= tol
    if converged:
        reason = "tolerance"
    permc = "NATURAL" if initial.d >= NATURAL_ORDER_PERIOD else "COLAMD"
    it = 0
    while not converged and it < max_iter:
        F = problem.residual(z)
        dz, pivot = solve_linear(problem.jacobian(z), -F, permc)
        warn = warn or pivot < PIVOT_WARN
        imag_seen = max(imag_seen, float(np.abs(dz[:problem.n_scalars].imag).max()))
        z_new = problem.symmetrize(z + dz)
        d_new = fs.defect(problem.system(z_new), spec)
        it += 1
        history.append(d_new)
        log.debug("newton %d: defect %.3e", it, d_new)
        d_old = history[-2]
        if not np.isfinite(d_new) or d_new > 10 * d_old:
            reason = "diverged"
            break
        if d_new <= tol:
            z, converged, reason = z_new, True, "tolerance"
            break
        if d_old < 1e-9 and d_new > stagnation_factor * d_old:
            # saturated: keep the better of the last two iterates
            if d_new <= d_old:
                z = z_new
            converged, reason = True, "stagnated"
            break
        if len(history) >= 3 and min(history[-3:-1]) < 1e-6 and d_new > 0.9 * history[-2] \
                and history[-2] > 0.9 * history[-3]:
            # truncation floor well above tolerance: more iterations will not help
            if d_new <= d_old:
                z = z_new
            reason = "plateau"
            break
        z = z_new
    unf = _unfolding_state(problem, z)
    if converged and unf.max_abs() > UNFOLDING_TOL:
        converged, reason = False, f"unfolding parameters not zero ({unf.max_abs():.2e})"
    system = problem.system(z)
    final = fs.defect(system, spec)
    report = SolveReport(converged, it, history, unf, final, warn, reason,
                         float(np.abs(problem.residual(z)).max()), imag_seen,
                         problem.aux(z) if hasattr(problem, "aux") else None)
    return system, report


def residual_henon(system: CircleSystem, beta: float, phase: PhaseCondition, spec) -> np.ndarray:
    """Stacked coefficient-space residual of the quadratic (Henon-type) system."""
    p = make_problem(spec, system.rho, system.d, system.N, phase, "quadratic")
    return p.residual(p.pack(system, [beta]))


def residual_standard_recast(system: CircleSystem, aux, unfolding, phase: PhaseCondition, spec) -> np.ndarray:
    """Stacked residual of the recast standard-map system.

    ``unfolding`` is ``(beta, gammas, omegas)`` with one ``gamma, omega``
    per component circle.
    """
    p = make_problem(spec, system.rho, system.d, system.N, phase, "recast")
    beta, gammas, omegas = unfolding
    scalars = np.concatenate([[beta], np.broadcast_to(gammas, system.d), np.broadcast_to(omegas, system.d)])
    return p.residual(p.pack(system, scalars, aux))


def unfolding_diagnostics(K, spec, rho: float):
    """Areas ``(A1, A2, A3)`` of ``K``, ``K(. + rho)`` and ``F o K``.

    ``A3`` re-fits the image curve sampled on the defect grid with ``2N``
    modes. Equal areas are what forces the unfolding parameter to vanish.
    """
    N = K.N
    L = max(fs.defect_grid_size(N), 2 * (4 * N + 1))
    pts = fs.curve_samples(K, L)
    fx, fy = spec(pts[:, 0], pts[:, 1])
    image = fs.FourierCircle(fs.symmetrize(fs.dft_from_samples(fx, 2 * N)),
                             fs.symmetrize(fs.dft_from_samples(fy, 2 * N)))
    return fs.enclosed_area(K), fs.enclosed_area(K.rotated(rho)), fs.enclosed_area(image)
