"""From a seed point to a converged parameterization.

The pipeline: classify the seed orbit, pin down the rotation number, pick a
truncation order from sampled coefficient decay, build a low-order initial
guess from weighted averages and hand it to Newton.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import birkhoff as bk
from . import fourier as fs
from .maps import MapSpec, OrbitSegment, extend_orbit, iterate_orbit
from .projection import circle_distance, project_angles
from .solver import PhaseCondition, SolveReport, newton_solve

log = logging.getLogger(__name__)

MACHINE_EPS = 2.2e-16
COLLAPSE_TOL = 0.5


class RecipeError(RuntimeError):
    stage = "recipe"


class NotQuasiperiodic(RecipeError):
    stage = "classify"

    def __init__(self, msg, classification=None):
        super().__init__(msg)
        self.classification = classification


class InitialGuessError(RecipeError):
    stage = "initial_guess"


class NewtonFailure(RecipeError):
    stage = "newton"

    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report


@dataclass
class RecipeConfig:
    spec: MapSpec
    seed: tuple
    period: int = 1
    M_classify: int = 20_000
    M_rho: int = 200_000
    M_coeff: int = 10_000
    M_decay: int = 1_000
    N0_fraction: float = 0.15
    initial_defect_tol: float = 0.05
    n_modes: int | None = None
    N_min: int = 8
    N_max: int = 256
    center: tuple | None = None
    classify_tol: float = bk.DEFAULT_CLASSIFY_TOL
    rho_agreement: float = 1e-12
    decay_modes: tuple = tuple(range(1, 31))
    newton: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0 < self.N0_fraction < 1:
            raise ValueError("N0_fraction must lie in (0, 1)")
        if not 0 < self.initial_defect_tol < 1:
            raise ValueError("initial_defect_tol must lie in (0, 1)")
        if self.period < 1:
            raise ValueError("period must be positive")


@dataclass
class RecipeResult:
    classification: bk.Classification
    rho: bk.RotationEstimate
    N: int
    N0: int
    system: fs.CircleSystem
    report: SolveReport
    decay: list
    initial_defect: float
    center: np.ndarray
    phase: PhaseCondition

    @property
    def rho_per_iterate(self) -> float:
        """``rho / d``: the shift per link when every link carries a rotation."""
        return self.system.rho / self.system.d


def component_orbits(orbit: OrbitSegment, d: int) -> list[np.ndarray]:
    """Phase-shifted subsequences ``F^j(p_{kd})`` for ``j = 0..d-1``."""
    pts = orbit.points
    out = [pts]
    for _ in range(1, d):
        x, y = orbit.spec(out[-1][:, 0], out[-1][:, 1])
        out.append(np.stack([x, y], axis=-1))
    return out


def initial_guess(orbit: OrbitSegment, rho: float, N0: int, N: int, d: int = 1) -> fs.CircleSystem:
    """Weighted-average coefficients ``|n| <= N0`` for each component,
    zero-padded to order ``N``.

    ``orbit`` samples ``F^d`` starting on the first component.
    """
    if orbit.stride != d:
        raise ValueError(f"orbit stride {orbit.stride} does not match period {d}")
    circles = []
    for pts in component_orbits(orbit, d):
        c = bk.fourier_coefficients(pts, rho, range(-N0, N0 + 1))
        circles.append(fs.FourierCircle(fs.pad(c[:, 0], N), fs.pad(c[:, 1], N)).symmetrized())
    return fs.CircleSystem(rho, circles)


def decay_envelope(decay) -> list[tuple[int, float]]:
    """Parity-robust decay samples up to the noise floor.

    Each sample is replaced by the max over itself and the next sampled mode
    (maps with a point symmetry have vanishing even modes), and samples past
    the envelope's minimum are dropped as noise.
    """
    vals = [v for _, v in decay]
    env = [max(vals[i:i + 2]) for i in range(len(vals))]
    stop = int(np.argmin(env[:-1])) + 1 if len(env) > 2 else len(env)
    return [(decay[i][0], env[i]) for i in range(stop)]


def truncation_from_orbit(orbit, rho, modes=tuple(range(1, 31)), eps=MACHINE_EPS):
    decay = bk.sample_decay(orbit, rho, modes)
    return bk.estimate_truncation(decay_envelope(decay), eps), decay


def refine_rotation_number(orbit: OrbitSegment, center, est: bk.RotationEstimate, M_max: int,
                           agreement: float = 1e-12):
    """Grow the orbit by 15% at a time until consecutive estimates agree."""
    history = list(est.history)
    M = history[-1][0]
    while True:
        M_new = math.ceil(1.15 * M)
        if M_new > M_max:
            break
        orbit = extend_orbit(orbit, M_new - orbit.M)
        rho_new = bk.rotation_number(project_angles(orbit.points[:M_new + 1], center), [M_new]).rho
        history.append((M_new, rho_new))
        M = M_new
        if circle_distance(history[-1][1], history[-2][1]) <= agreement:
            break
    last = [r for _, r in history[-3:]]
    return bk.RotationEstimate(history[-1][1], history[-1][0], history, bk._spread(last)), orbit


def _check_not_collapsed(guess: fs.CircleSystem, system: fs.CircleSystem, report) -> None:
    """Reject solutions whose circles lost most of the area of the guess.

    A singular Newton matrix (a map with a continuum of invariant circles
    through the phase line) can jump to the trivial point solution.
    """
    for K0, K in zip(guess.circles, system.circles):
        a0 = abs(fs.enclosed_area(K0))
        if abs(abs(fs.enclosed_area(K)) - a0) > COLLAPSE_TOL * a0:
            raise NewtonFailure("Newton left the guessed circle (area changed by more than "
                                f"{COLLAPSE_TOL:.0%}); the linearized system is likely singular", report)


def run_recipe(cfg: RecipeConfig) -> RecipeResult:
    spec, d = cfg.spec, cfg.period
    seed = np.asarray(cfg.seed, dtype=float)
    orbit = iterate_orbit(spec, seed, cfg.M_classify, stride=d)
    if cfg.center is not None:
        center = np.asarray(cfg.center, float)
    elif d == 1:
        center = spec.center
    else:
        center = orbit.points.mean(axis=0)
    cls = bk.classify_orbit(project_angles(orbit, center), tol=cfg.classify_tol)
    log.info("step 0: %s (spread %.2e)", cls.kind.value, cls.estimate.spread)
    if not cls.quasiperiodic:
        raise NotQuasiperiodic(f"seed {tuple(seed)} does not look quasiperiodic "
                               f"(spread {cls.estimate.spread:.2e})", cls)

    rho_est, orbit = refine_rotation_number(orbit, center, cls.estimate, cfg.M_rho, cfg.rho_agreement)
    rho = rho_est.rho
    log.info("step 1: rho = %.15f from M = %d", rho, rho_est.M)

    short = OrbitSegment(spec, seed, orbit.points[:cfg.M_decay + 1], d)
    decay = bk.sample_decay(short, rho, cfg.decay_modes)
    if cfg.n_modes:
        N = cfg.n_modes
    else:
        N = bk.estimate_truncation(decay_envelope(decay), MACHINE_EPS)
        N = min(max(N, cfg.N_min), cfg.N_max)
    log.info("step 2: N = %d", N)

    if orbit.M < cfg.M_coeff:
        orbit = extend_orbit(orbit, cfg.M_coeff - orbit.M)
    coeff_orbit = OrbitSegment(spec, seed, orbit.points[:cfg.M_coeff + 1], d)
    phase = PhaseCondition.radial(seed, center)
    N0 = min(N, max(1, math.ceil(cfg.N0_fraction * N)))

    def guess(N0):
        for _ in range(4):
            g = initial_guess(coeff_orbit, rho, N0, N, d)
            eps = fs.defect(g, spec)
            log.info("step 3: N0 = %d, initial defect %.2e", N0, eps)
            if eps <= cfg.initial_defect_tol:
                return g, eps, N0
            if N0 >= N:
                break
            N0 = min(N, 2 * N0)
        raise InitialGuessError(f"initial defect {eps:.2e} above {cfg.initial_defect_tol}")

    g, eps0, N0 = guess(N0)
    system, report = newton_solve(spec, g, phase, **cfg.newton)
    if not report.converged and N0 < N:
        log.info("step 4 failed (%s); retrying with a larger N0", report.reason)
        g, eps0, N0 = guess(min(N, 2 * N0))
        system, report = newton_solve(spec, g, phase, **cfg.newton)
    if not report.converged:
        raise NewtonFailure(f"Newton did not converge: {report.reason}", report)
    _check_not_collapsed(g, system, report)
    log.info("step 4: defect %.2e after %d iterations", report.final_defect, report.iterations)
    return RecipeResult(cls, rho_est, N, N0, system, report, decay, eps0, center, phase)
