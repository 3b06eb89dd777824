"""Discrete continuation of invariant circles in the rotation number.

Each step nudges ``rho`` and re-solves with the previous circle as the
initial guess. Failed steps halve the increment, and two failures in a row
also double the truncation order. The family ends when the increment
underflows or a Sobolev norm blows up.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import fourier as fs
from .birkhoff import classify_orbit
from .maps import (MapOverflowError, MapSpec, PeriodicOrbit, PeriodicOrbitError, StabilityKind,
                   find_periodic_orbit, iterate_orbit, stability_type)
from .projection import DegenerateProjection, project_angles
from .recipe import RecipeConfig
from .solver import PhaseCondition, SolverError, newton_solve

log = logging.getLogger(__name__)

# coefficients below this fraction of the largest one are roundoff, and the
# exponential Sobolev weights would turn them into spurious blow-up
NOISE_FLOOR = 1e-13


class StopReason(str, enum.Enum):
    SOBOLEV_BLOWUP = "SobolevBlowup"
    STEP_UNDERFLOW = "StepUnderflow"
    MAX_STEPS = "MaxSteps"
    SOLVER_HARD_FAILURE = "SolverHardFailure"


class RestartError(RuntimeError):
    pass


class NotElliptic(RestartError):
    def __init__(self, msg, stability=None):
        super().__init__(msg)
        self.stability = stability


@dataclass
class ContinuationConfig:
    initial_step: float = 1e-3
    min_step: float = 1e-13
    max_steps: int = 1000
    sobolev_orders: tuple = tuple(range(1, 11))
    blowup_factor: float = 1e6
    N_max: int = 512
    failures_before_growth: int = 2
    defect_tol: float = 1e-11
    newton: dict = field(default_factory=lambda: {"max_iter": 12})

    def __post_init__(self):
        if not self.initial_step > self.min_step > 0:
            raise ValueError("need initial_step > min_step > 0")


def significant_log_sobolev(K: fs.FourierCircle, d: float, floor: float = NOISE_FLOOR) -> float:
    """Log Sobolev norm of ``K`` restricted to modes above the noise floor."""
    m = np.maximum(np.abs(K.a), np.abs(K.b))
    return fs.log_sobolev_norm(np.where(m > floor * m.max(), m, 0.0), d)


def sobolev_profile(system: fs.CircleSystem, orders, floor: float = NOISE_FLOOR) -> list[tuple[float, float]]:
    """``(d, log norm)`` per order, maximized over the component circles."""
    return [(float(d), max(significant_log_sobolev(K, d, floor) for K in system.circles)) for d in orders]


@dataclass
class ContinuationRecord:
    rho: float
    system: fs.CircleSystem
    defect: float
    log_sobolev: list = field(default_factory=list)
    step: float = float("nan")
    iterations: int = 0

    @property
    def sobolev(self) -> list[tuple[float, float]]:
        with np.errstate(over="ignore"):
            return [(d, float(np.exp(v))) for d, v in self.log_sobolev]

    @classmethod
    def from_system(cls, system: fs.CircleSystem, spec: MapSpec, orders=tuple(range(1, 11)), **kw):
        return cls(system.rho, system, fs.defect(system, spec), sobolev_profile(system, orders), **kw)


@dataclass
class FamilyResult:
    records: list
    stop_reason: StopReason
    spec: MapSpec
    direction: int = 1
    attempts: int = 0
    message: str = ""

    @property
    def last(self) -> ContinuationRecord:
        return self.records[-1]

    def rhos(self) -> np.ndarray:
        return np.array([r.rho for r in self.records])

    def sobolev_growth(self) -> dict:
        """Ratio last/first of each monitored norm."""
        first, last = self.records[0], self.records[-1]
        with np.errstate(over="ignore"):
            return {d: float(np.exp(b - a)) for (d, a), (_, b) in zip(first.log_sobolev, last.log_sobolev)}


def _blowup(rec: ContinuationRecord, start: ContinuationRecord, factor: float):
    lim = math.log(factor)
    for (d, v), (_, v0) in zip(rec.log_sobolev, start.log_sobolev):
        if v - v0 > lim:
            return d
    return None


def continue_family(start: ContinuationRecord, spec: MapSpec, cfg: ContinuationConfig | None = None,
                    direction: int = 1, callback=None) -> FamilyResult:
    """Step the rotation number away from ``start`` until breakdown.

    Parameters
    ----------
    start : ContinuationRecord
        A converged circle (system).
    spec : MapSpec
    cfg : ContinuationConfig, optional
    direction : {1, -1}
    callback : callable, optional
        Called with each new record.

    Returns
    -------
    FamilyResult
        The records include ``start``.
    """
    cfg = cfg or ContinuationConfig()
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    if not start.log_sobolev:
        start = ContinuationRecord.from_system(start.system, spec, cfg.sobolev_orders)
    records = [start]
    step, failures, attempts = cfg.initial_step, 0, 0
    prev = start.system
    while True:
        if step < cfg.min_step:
            return FamilyResult(records, StopReason.STEP_UNDERFLOW, spec, direction, attempts)
        if len(records) - 1 >= cfg.max_steps:
            return FamilyResult(records, StopReason.MAX_STEPS, spec, direction, attempts)
        rho = prev.rho + direction * step
        guess = fs.CircleSystem(rho, [k.copy() for k in prev.circles])
        phase = PhaseCondition.tangent(prev.circles[0])
        attempts += 1
        try:
            system, report = newton_solve(spec, guess, phase, **cfg.newton)
            ok = report.converged and report.final_defect <= cfg.defect_tol
        except SolverError as exc:
            log.debug("step at rho=%.15f raised %s", rho, exc)
            ok, report = False, None
        except (ArithmeticError, ValueError) as exc:
            return FamilyResult(records, StopReason.SOLVER_HARD_FAILURE, spec, direction, attempts, str(exc))
        if ok:
            rec = ContinuationRecord.from_system(system, spec, cfg.sobolev_orders, step=step,
                                                 iterations=report.iterations)
            records.append(rec)
            prev, failures = system, 0
            log.info("rho %.15f  N %d  defect %.2e  step %.1e", rho, system.N, rec.defect, step)
            if callback is not None:
                callback(rec)
            d = _blowup(rec, start, cfg.blowup_factor)
            if d is not None:
                return FamilyResult(records, StopReason.SOBOLEV_BLOWUP, spec, direction, attempts,
                                    f"Sobolev order {d:g} grew past {cfg.blowup_factor:g}x")
            continue
        failures += 1
        step /= 2
        if failures >= cfg.failures_before_growth and prev.N < cfg.N_max:
            prev = prev.padded(min(cfg.N_max, 2 * prev.N))
            failures = 0
            log.info("rho %.15f: raising N to %d", rho, prev.N)


def restart_next_family(last: FamilyResult, spec: MapSpec, guess, period: int, *,
                        offset_fraction: float = 0.1, tol: float = 1e-12, max_halvings: int = 4,
                        M_check: int = 20_000) -> RecipeConfig:
    """Seed a recipe inside the island chain found beyond a broken family.

    Locates a period-``period`` orbit from ``guess`` and checks it is
    elliptic. The seed sits ``offset_fraction`` of the way from the orbit
    point nearest the last circle toward that circle; the offset is halved
    (at most ``max_halvings`` times) until the seed orbit classifies as
    quasiperiodic about the periodic point.
    """
    try:
        orbit: PeriodicOrbit = find_periodic_orbit(spec, guess, period, tol=tol)
    except PeriodicOrbitError as exc:
        raise RestartError(f"no period-{period} orbit near {tuple(guess)}: {exc}") from exc
    stab = stability_type(orbit)
    if stab.kind is not StabilityKind.ELLIPTIC:
        raise NotElliptic(f"period-{period} orbit is {stab.kind.value} (trace {stab.trace:.4f})", stab)
    curve = fs.curve_samples(last.last.system.circles[0], 2048)
    dist = np.hypot(*(orbit.points[:, None, :] - curve[None, :, :]).transpose(2, 0, 1))
    j, k = np.unravel_index(np.argmin(dist), dist.shape)
    p = orbit.points[j]
    frac = offset_fraction
    for _ in range(max_halvings + 1):
        seed = p + frac * (curve[k] - p)
        try:
            seg = iterate_orbit(spec, seed, M_check, stride=period)
            if classify_orbit(project_angles(seg, p)).quasiperiodic:
                return RecipeConfig(spec, (float(seed[0]), float(seed[1])), period=period,
                                    center=(float(p[0]), float(p[1])))
        except (MapOverflowError, DegenerateProjection):
            pass
        frac /= 2
    raise RestartError(f"no quasiperiodic seed within {offset_fraction:g} of the period-{period} orbit")
