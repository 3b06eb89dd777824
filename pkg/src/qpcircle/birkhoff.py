"""Weighted Birkhoff averages along orbits.

The weights are the exponential bump ``w(t) = exp(-1/(t(1-t)))`` sampled at
``t = n/N`` and normalised to unit sum; sums are accumulated with
:func:`math.fsum` so that long averages keep all fifteen digits.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .projection import AngleSequence, circle_distance, diff_sequence

DEFAULT_CLASSIFY_TOL = 1e-9


class InsufficientData(ValueError):
    pass


class DecayFitError(ValueError):
    """Sampled Fourier norms do not decay."""


@lru_cache(maxsize=64)
def _weights(N: int) -> np.ndarray:
    n = np.arange(1, N, dtype=float)
    # n(N-n)/N^2 keeps w(n/N) == w((N-n)/N) bitwise
    w = np.exp(-(float(N) * N) / (n * (N - n)))
    out = np.zeros(N)
    out[1:] = w / math.fsum(w)
    out.flags.writeable = False
    return out


def make_weights(N: int) -> np.ndarray:
    """Normalised bump weights ``w_hat[n]`` for ``n = 0, ..., N-1``.

    ``w(0)`` and ``w(1)`` are taken as zero, so the normalising sum over
    ``j = 0..N`` reduces to the interior nodes.
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    return _weights(int(N))


def weighted_average(values, weights):
    """Compensated weighted sum ``sum(weights[n] * values[n])``."""
    values = np.asarray(values)
    weights = np.asarray(weights)
    if values.shape[0] != weights.shape[0]:
        raise ValueError(f"length mismatch: {values.shape[0]} values, {weights.shape[0]} weights")
    prod = (weights.reshape((-1,) + (1,) * (values.ndim - 1)) * values)
    return _fsum(prod)


def _fsum(prod):
    if prod.ndim > 1:
        return np.array([_fsum(prod[:, j]) for j in range(prod.shape[1])])
    if np.iscomplexobj(prod):
        return complex(math.fsum(prod.real), math.fsum(prod.imag))
    return math.fsum(prod)


@dataclass
class RotationEstimate:
    rho: float
    M: int
    history: list = field(default_factory=list)
    spread: float = 0.0


def _spread(values):
    worst = 0.0
    for i, a in enumerate(values):
        for b in values[i + 1:]:
            worst = max(worst, float(circle_distance(a, b)))
    return worst


def rotation_number(angles: AngleSequence, checkpoints=None) -> RotationEstimate:
    """Weighted-average rotation number at each checkpoint length.

    ``rho`` is the estimate at the largest checkpoint and ``spread`` the
    largest circle distance among the last three estimates.
    """
    diffs = diff_sequence(angles)
    if checkpoints is None:
        checkpoints = [len(diffs)]
    checkpoints = [int(m) for m in checkpoints]
    if any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        raise ValueError("checkpoints must be strictly increasing")
    if checkpoints[0] < 2 or checkpoints[-1] > len(diffs):
        raise InsufficientData(f"checkpoints need 2 <= M <= {len(diffs)}")
    history = [(m, weighted_average(diffs[:m], make_weights(m))) for m in checkpoints]
    last = [r for _, r in history[-3:]]
    return RotationEstimate(history[-1][1], checkpoints[-1], history, _spread(last))


class OrbitKind(str, enum.Enum):
    QUASIPERIODIC = "quasiperiodic"
    NONCONVERGENT = "nonconvergent"


@dataclass
class Classification:
    kind: OrbitKind
    estimate: RotationEstimate

    @property
    def quasiperiodic(self) -> bool:
        return self.kind is OrbitKind.QUASIPERIODIC


def default_checkpoints(M: int) -> list[int]:
    return [M // 4, M // 2, (3 * M) // 4, M]


def classify_orbit(angles: AngleSequence, checkpoints=None, tol: float = DEFAULT_CLASSIFY_TOL) -> Classification:
    """Quasiperiodic when the late rotation-number estimates agree to ``tol``.

    Chaotic orbits show estimates drifting in the fourth to sixth digit.
    """
    if checkpoints is None:
        checkpoints = default_checkpoints(len(angles.thetas) - 1)
    if len(checkpoints) < 3:
        raise ValueError("classification needs at least three checkpoints")
    est = rotation_number(angles, checkpoints)
    kind = OrbitKind.QUASIPERIODIC if est.spread <= tol else OrbitKind.NONCONVERGENT
    return Classification(kind, est)


@dataclass
class CoefficientEstimate:
    n: int
    value: np.ndarray
    M: int


def fourier_coefficients(orbit, rho: float, modes, theta0: float = 0.0) -> np.ndarray:
    """Weighted-average Fourier vectors ``(a_n, b_n)`` for each ``n`` in ``modes``.

    Uses the first ``M`` points of an orbit of length ``M + 1``. The phase is
    anchored so that ``theta0 = 0`` corresponds to ``orbit.points[0]``.

    Returns
    -------
    ndarray, shape (len(modes), 2), complex
    """
    pts = orbit.points if hasattr(orbit, "points") else np.asarray(orbit)
    M = len(pts) - 1
    if M < 2:
        raise InsufficientData("orbit too short")
    w = make_weights(M)
    k = np.arange(M)
    out = np.empty((len(modes), 2), dtype=complex)
    for i, n in enumerate(modes):
        phase = np.exp(-2j * np.pi * np.mod(n * rho * k, 1.0))
        out[i] = weighted_average(pts[:M] * phase[:, None], w)
        if theta0:
            out[i] *= np.exp(-2j * np.pi * n * theta0)
    return out


def fourier_coefficient(orbit, rho: float, n: int, theta0: float = 0.0) -> CoefficientEstimate:
    value = fourier_coefficients(orbit, rho, [n], theta0)[0]
    pts = orbit.points if hasattr(orbit, "points") else orbit
    return CoefficientEstimate(n, value, len(pts) - 1)


def sample_decay(orbit, rho: float, modes) -> list[tuple[int, float]]:
    """``max(|a_n|, |b_n|)`` for each sampled mode."""
    coeffs = fourier_coefficients(orbit, rho, modes)
    return [(int(n), float(np.abs(c).max())) for n, c in zip(modes, coeffs)]


def estimate_truncation(decay, eps: float = 2.2e-16) -> int:
    """Smallest power of two past the mode where the fitted decay hits ``eps``.

    Fits ``log(norm) = c - lam * n`` by least squares over samples above
    ``eps``.
    """
    pts = [(n, v) for n, v in decay if v > eps]
    if len(pts) < 2:
        raise DecayFitError("need at least two samples above eps")
    n = np.array([p[0] for p in pts], dtype=float)
    logv = np.log([p[1] for p in pts])
    slope, c = np.polyfit(n, logv, 1)
    lam = -slope
    if lam <= 0:
        raise DecayFitError(f"coefficients do not decay (fitted rate {lam:.3g})")
    n_star = max((c - math.log(eps)) / lam, 1.0)
    return 1 << math.ceil(math.log2(n_star) - 1e-12)
