"""Projection of planar orbits onto circle angles and circle arithmetic."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEGENERATE_RADIUS = 1e-12


class DegenerateProjection(ValueError):
    """An orbit point coincides with the projection center."""


@dataclass
class AngleSequence:
    center: np.ndarray
    thetas: np.ndarray


def _frac(t):
    t = np.mod(t, 1.0)
    # np.mod can round tiny negative input up to exactly 1.0
    t = np.where(t >= 1.0, 0.0, t)
    return t if t.ndim else float(t)


def project_angles(orbit, center=None) -> AngleSequence:
    """Angles ``atan2(y - cy, x - cx) / 2pi`` reduced to ``[0, 1)``.

    ``orbit`` may be an :class:`~qpcircle.maps.OrbitSegment` or an ``(M, 2)``
    array of points. The default center is the map's elliptic fixed point.
    """
    if hasattr(orbit, "points"):
        pts = orbit.points
        if center is None:
            center = orbit.spec.center
    else:
        pts = np.asarray(orbit, dtype=float)
    if center is None:
        raise ValueError("a center is required for raw point arrays")
    center = np.asarray(center, dtype=float)
    xi = pts - center
    if np.any(np.hypot(xi[:, 0], xi[:, 1]) < DEGENERATE_RADIUS):
        raise DegenerateProjection("orbit passes through the projection center")
    return AngleSequence(center, _frac(np.arctan2(xi[:, 1], xi[:, 0]) / (2 * np.pi)))


def forward_diff(theta_next, theta_prev):
    """Forward angular increment ``frac(theta_next - theta_prev)``."""
    return _frac(np.subtract(theta_next, theta_prev))


def diff_sequence(angles) -> np.ndarray:
    thetas = angles.thetas if isinstance(angles, AngleSequence) else np.asarray(angles)
    if len(thetas) < 2:
        raise ValueError("need at least two angles")
    return forward_diff(thetas[1:], thetas[:-1])


def circle_distance(a, b):
    # |a - b| keeps the result exactly symmetric in its arguments
    d = np.mod(np.abs(np.subtract(a, b)), 1.0)
    return np.minimum(d, 1.0 - d)
