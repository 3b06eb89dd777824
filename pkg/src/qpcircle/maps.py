"""Planar area-preserving maps and point-wise dynamical utilities.

Every map family is registered in :data:`FAMILIES` with a scalar step used
for long orbits, array-valued evaluation and Jacobian (these accept complex
input, which the Fourier-space solvers rely on), a default interior point and
the name of the coefficient-space problem builder the solver should use.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

ESCAPE_RADIUS = 1e8
PARABOLIC_TOL = 1e-10
MAX_BACKTRACK = 12


class MapOverflowError(OverflowError):
    """An iterate left the escape box or became non-finite."""


class PeriodicOrbitError(RuntimeError):
    """Newton search for a periodic orbit did not converge."""


class SingularPeriodicJacobian(PeriodicOrbitError):
    """``I - DF^period`` is not invertible at an iterate."""


class Family(str, enum.Enum):
    HENON = "henon"
    STANDARD = "standard"
    ROTATION = "rotation"
    TWIST = "twist"


@dataclass(frozen=True)
class MapFamily:
    step: Callable[[float, float, float], tuple[float, float]]
    point: Callable
    jac: Callable
    center: tuple[float, float]
    problem: str


def _henon_step(x, y, alpha):
    c, s = math.cos(alpha), math.sin(alpha)
    u = y - x * x
    return x * c - u * s, x * s + u * c


def _henon_point(x, y, alpha):
    c, s = np.cos(alpha), np.sin(alpha)
    u = y - x * x
    return x * c - u * s, x * s + u * c


def _henon_jac(x, y, alpha):
    c, s = np.cos(alpha), np.sin(alpha)
    one = np.ones_like(x)
    return ((c + 2 * s * x, -s * one), (s - 2 * c * x, c * one))


def _standard_step(x, y, alpha):
    y1 = y + alpha * math.sin(x)
    return x + y1, y1


def _standard_point(x, y, alpha):
    y1 = y + alpha * np.sin(x)
    return x + y1, y1


def _standard_jac(x, y, alpha):
    k = alpha * np.cos(x)
    one = np.ones_like(k)
    return ((1 + k, one), (k, one))


def _rotation_step(x, y, alpha):
    c, s = math.cos(alpha), math.sin(alpha)
    return c * x - s * y, s * x + c * y


def _rotation_point(x, y, alpha):
    c, s = np.cos(alpha), np.sin(alpha)
    return c * x - s * y, s * x + c * y


def _rotation_jac(x, y, alpha):
    c, s = np.cos(alpha), np.sin(alpha)
    one = np.ones_like(np.asarray(x))
    return ((c * one, -s * one), (s * one, c * one))


# Integrable twist: rotation by alpha + r^2 radians, so the circle of radius r
# has rotation number (alpha + r^2) / 2pi.
def _twist_step(x, y, alpha):
    phi = alpha + x * x + y * y
    c, s = math.cos(phi), math.sin(phi)
    return c * x - s * y, s * x + c * y


def _twist_point(x, y, alpha):
    phi = alpha + x * x + y * y
    c, s = np.cos(phi), np.sin(phi)
    return c * x - s * y, s * x + c * y


def _twist_jac(x, y, alpha):
    phi = alpha + x * x + y * y
    c, s = np.cos(phi), np.sin(phi)
    xp, yp = c * x - s * y, s * x + c * y
    return ((c - 2 * x * yp, -s - 2 * y * yp), (s + 2 * x * xp, c + 2 * y * xp))


FAMILIES: dict[Family, MapFamily] = {
    Family.HENON: MapFamily(_henon_step, _henon_point, _henon_jac, (0.0, 0.0), "quadratic"),
    Family.STANDARD: MapFamily(_standard_step, _standard_point, _standard_jac, (math.pi, 0.0), "recast"),
    Family.ROTATION: MapFamily(_rotation_step, _rotation_point, _rotation_jac, (0.0, 0.0), "quadratic"),
    Family.TWIST: MapFamily(_twist_step, _twist_point, _twist_jac, (0.0, 0.0), "sampled"),
}


@dataclass(frozen=True)
class MapSpec:
    """A map family together with its parameter ``alpha`` (radians)."""

    family: Family
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not math.isfinite(self.alpha):
            raise ValueError("alpha must be finite")

    @property
    def impl(self) -> MapFamily:
        return FAMILIES[self.family]

    @property
    def center(self) -> np.ndarray:
        """Default interior point: the elliptic fixed point of the family."""
        return np.array(self.impl.center)

    def __call__(self, x, y):
        """Array evaluation of the map (complex input allowed)."""
        return self.impl.point(x, y, self.alpha)

    def jac(self, x, y):
        return self.impl.jac(x, y, self.alpha)


def henon(alpha=None, *, cos_alpha=None) -> MapSpec:
    if cos_alpha is not None:
        alpha = math.acos(cos_alpha)
    return MapSpec(Family.HENON, alpha)


def standard(alpha) -> MapSpec:
    return MapSpec(Family.STANDARD, alpha)


@dataclass
class OrbitSegment:
    """Orbit ``points[j+1] = F^stride(points[j])`` of length ``M + 1``."""

    spec: MapSpec
    seed: np.ndarray
    points: np.ndarray
    stride: int = 1

    @property
    def M(self) -> int:
        return len(self.points) - 1


@dataclass
class PeriodicOrbit:
    spec: MapSpec
    period: int
    points: np.ndarray
    residual: float
    iterations: int = field(default=0, compare=False)


def _check(x, y):
    if not (abs(x) <= ESCAPE_RADIUS and abs(y) <= ESCAPE_RADIUS):
        raise MapOverflowError(f"iterate ({x!r}, {y!r}) escaped")


def eval_map(spec: MapSpec, p) -> np.ndarray:
    x, y = spec.impl.step(float(p[0]), float(p[1]), spec.alpha)
    if not (math.isfinite(x) and math.isfinite(y)):
        raise MapOverflowError("non-finite map value")
    return np.array([x, y])


def jacobian(spec: MapSpec, p) -> np.ndarray:
    (a, b), (c, d) = spec.jac(np.float64(p[0]), np.float64(p[1]))
    return np.array([[a, b], [c, d]], dtype=float)


def iterate_orbit(spec: MapSpec, seed, M: int, stride: int = 1) -> OrbitSegment:
    """Iterate ``F`` ``stride * M`` times from ``seed``, keeping every
    ``stride``-th point.

    Raises
    ------
    MapOverflowError
        If an iterate leaves the box ``|x|, |y| <= 1e8``.
    """
    if M < 1 or stride < 1:
        raise ValueError("M and stride must be positive")
    step, alpha = spec.impl.step, spec.alpha
    x, y = float(seed[0]), float(seed[1])
    _check(x, y)
    pts = np.empty((M + 1, 2))
    pts[0] = x, y
    for j in range(1, M + 1):
        for _ in range(stride):
            x, y = step(x, y, alpha)
        _check(x, y)
        pts[j] = x, y
    return OrbitSegment(spec, np.array(seed, dtype=float), pts, stride)


def extend_orbit(orbit: OrbitSegment, extra: int) -> OrbitSegment:
    """Continue an orbit by ``extra`` further points (bitwise identical to
    iterating the longer orbit in one go)."""
    if extra <= 0:
        return orbit
    tail = iterate_orbit(orbit.spec, orbit.points[-1], extra, orbit.stride)
    return OrbitSegment(orbit.spec, orbit.seed, np.vstack([orbit.points, tail.points[1:]]), orbit.stride)


def _compose(spec, p, period):
    """Return ``F^period(p)``, all intermediate points and ``DF^period(p)``."""
    pts = [np.asarray(p, dtype=float)]
    mono = np.eye(2)
    for _ in range(period):
        mono = jacobian(spec, pts[-1]) @ mono
        pts.append(eval_map(spec, pts[-1]))
    return pts, mono


def find_periodic_orbit(spec: MapSpec, guess, period: int, tol: float = 1e-12,
                        max_iter: int = 50) -> PeriodicOrbit:
    """Newton iteration on ``G(p) = F^period(p) - p``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    p = np.asarray(guess, dtype=float)
    for it in range(max_iter + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            pts, mono = _compose(spec, p, period)
        g = pts[-1] - p
        res = float(np.max(np.abs(g)))
        if not (np.isfinite(res) and np.all(np.isfinite(mono))):
            raise PeriodicOrbitError(f"iterates of {p} left every bounded region")
        if res <= tol:
            orbit = np.array(pts[:-1])
            closing = [np.max(np.abs(eval_map(spec, orbit[j]) - orbit[(j + 1) % period]))
                       for j in range(period)]
            return PeriodicOrbit(spec, period, orbit, max(closing), it)
        a = mono - np.eye(2)
        if abs(np.linalg.det(a)) < 1e-14 * max(1.0, np.abs(a).max() ** 2):
            raise SingularPeriodicJacobian(f"I - DF^{period} is singular near {p}")
        step = np.linalg.solve(a, g)
        # backtrack until the residual drops; full steps overshoot far from the orbit
        for _ in range(MAX_BACKTRACK):
            trial = p - step
            with np.errstate(over="ignore", invalid="ignore"):
                try:
                    r_new = float(np.max(np.abs(_compose(spec, trial, period)[0][-1] - trial)))
                except MapOverflowError:
                    r_new = math.inf
            if r_new < res:
                break
            step = step / 2
        p = trial
    raise PeriodicOrbitError(f"no convergence after {max_iter} iterations (residual {res:.3e})")


class StabilityKind(str, enum.Enum):
    ELLIPTIC = "elliptic"
    HYPERBOLIC = "hyperbolic"
    PARABOLIC = "parabolic"


@dataclass(frozen=True)
class Stability:
    kind: StabilityKind
    trace: float
    angle: float | None = None


def monodromy(orbit: PeriodicOrbit) -> np.ndarray:
    m = np.eye(2)
    for p in orbit.points:
        m = jacobian(orbit.spec, p) @ m
    return m


def stability_type(orbit: PeriodicOrbit) -> Stability:
    """Classify a periodic orbit by the trace of its monodromy matrix.

    Elliptic orbits carry the rotation angle ``acos(trace / 2)`` in radians.
    """
    t = float(np.trace(monodromy(orbit)))
    if abs(t - 2) <= PARABOLIC_TOL or abs(t + 2) <= PARABOLIC_TOL:
        return Stability(StabilityKind.PARABOLIC, t)
    if abs(t) < 2:
        return Stability(StabilityKind.ELLIPTIC, t, math.acos(t / 2))
    return Stability(StabilityKind.HYPERBOLIC, t)
