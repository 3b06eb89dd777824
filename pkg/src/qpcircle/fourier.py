"""Truncated Fourier series of closed plane curves.

A coefficient sequence is a complex array of length ``2N + 1`` holding the
modes ``n = -N, ..., N`` in order, so mode ``n`` lives at index ``n + N``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

EVAL_IMAG_TOL = 1e-10
AREA_IMAG_TOL = 1e-12


class SymmetryError(ValueError):
    """Coefficients are too far from conjugate symmetric to give a real curve."""


def order(c) -> int:
    n = len(c)
    if n % 2 != 1:
        raise ValueError("coefficient arrays must have odd length 2N+1")
    return n // 2


def modes(N: int) -> np.ndarray:
    return np.arange(-N, N + 1)


def delta(N: int, n: int = 0, value=1.0) -> np.ndarray:
    c = np.zeros(2 * N + 1, dtype=complex)
    c[n + N] = value
    return c


def pad(c, N: int) -> np.ndarray:
    """Zero-pad (or truncate) a sequence to order ``N``."""
    M = order(c)
    out = np.zeros(2 * N + 1, dtype=complex)
    k = min(M, N)
    out[N - k:N + k + 1] = c[M - k:M + k + 1]
    return out


@dataclass
class FourierCircle:
    """``K(theta) = sum_n (a_n, b_n) exp(2 pi i n theta)``."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=complex)
        self.b = np.asarray(self.b, dtype=complex)
        if self.a.shape != self.b.shape:
            raise ValueError("a and b must have the same truncation order")
        order(self.a)

    @property
    def N(self) -> int:
        return order(self.a)

    def __call__(self, theta):
        return eval_circle(self, theta)

    def padded(self, N: int) -> "FourierCircle":
        return FourierCircle(pad(self.a, N), pad(self.b, N))

    def symmetrized(self) -> "FourierCircle":
        return FourierCircle(symmetrize(self.a), symmetrize(self.b))

    def rotated(self, rho: float) -> "FourierCircle":
        return FourierCircle(rotate(self.a, rho), rotate(self.b, rho))

    def copy(self) -> "FourierCircle":
        return FourierCircle(self.a.copy(), self.b.copy())

    @classmethod
    def zeros(cls, N: int) -> "FourierCircle":
        return cls(np.zeros(2 * N + 1, complex), np.zeros(2 * N + 1, complex))

    @classmethod
    def ellipse(cls, N: int, center=(0.0, 0.0), rx: float = 1.0, ry: float = 1.0) -> "FourierCircle":
        """``(cx + rx cos 2pi t, cy + ry sin 2pi t)``; the unit circle by default."""
        k = cls.zeros(N)
        k.a[N] = center[0]
        k.b[N] = center[1]
        if N >= 1:
            k.a[N + 1] = k.a[N - 1] = rx / 2
            k.b[N + 1] = -0.5j * ry
            k.b[N - 1] = 0.5j * ry
        return k


@dataclass
class CircleSystem:
    """Period-``d`` system of circles with a shared rotation number.

    ``circles[j + 1]`` is the image of ``circles[j]``; the image of the last
    circle closes onto ``circles[0]`` shifted by ``rho``.
    """

    rho: float
    circles: list
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.circles:
            raise ValueError("a circle system needs at least one circle")
        if len({k.N for k in self.circles}) != 1:
            raise ValueError("all circles must share N")

    @property
    def d(self) -> int:
        return len(self.circles)

    @property
    def N(self) -> int:
        return self.circles[0].N

    def padded(self, N: int) -> "CircleSystem":
        return CircleSystem(self.rho, [k.padded(N) for k in self.circles], dict(self.meta))

    def copy(self) -> "CircleSystem":
        return CircleSystem(self.rho, [k.copy() for k in self.circles], dict(self.meta))


def as_system(K, rho=None) -> CircleSystem:
    if isinstance(K, CircleSystem):
        return K
    return CircleSystem(0.0 if rho is None else rho, [K])


def _scale(c) -> float:
    return max(1.0, float(np.abs(c).max()))


def eval_series(c, theta) -> np.ndarray:
    """Complex values of the series at ``theta`` (scalar or array)."""
    N = order(c)
    theta = np.asarray(theta, dtype=float)
    e = np.exp(2j * np.pi * np.multiply.outer(theta, modes(N)))
    return e @ c


def eval_circle(K: FourierCircle, theta) -> np.ndarray:
    """Points ``K(theta)`` with shape ``theta.shape + (2,)``.

    Raises :class:`SymmetryError` if the imaginary residue exceeds
    ``1e-10`` times the coefficient scale.
    """
    z = np.stack([eval_series(K.a, theta), eval_series(K.b, theta)], axis=-1)
    scale = max(_scale(K.a), _scale(K.b))
    if np.abs(z.imag).max(initial=0.0) > EVAL_IMAG_TOL * scale:
        raise SymmetryError("curve evaluation has a non-negligible imaginary part")
    return z.real


def grid_values(c, L: int) -> np.ndarray:
    """Complex series values on the uniform grid ``theta_j = j / L`` (FFT)."""
    N = order(c)
    if L < 2 * N + 1:
        raise ValueError("grid too coarse for the truncation order")
    buf = np.zeros(L, dtype=complex)
    buf[:N + 1] = c[N:]
    if N:
        buf[-N:] = c[:N]
    return np.fft.ifft(buf) * L


def dft_from_samples(samples, N: int) -> np.ndarray:
    """Fourier modes ``|n| <= N`` of equispaced samples on ``[0, 1)``."""
    samples = np.asarray(samples)
    L = len(samples)
    if L < 2 * N + 1:
        raise ValueError("need at least 2N+1 samples")
    f = np.fft.fft(samples) / L
    return np.concatenate([f[L - N:] if N else f[:0], f[:N + 1]])


def rotate(c, rho: float) -> np.ndarray:
    """``(R_rho c)_n = exp(2 pi i n rho) c_n``."""
    N = order(c)
    return np.exp(2j * np.pi * np.mod(modes(N) * rho, 1.0)) * c


def differentiate(c) -> np.ndarray:
    return 2j * np.pi * modes(order(c)) * c


def convolve(u, v) -> np.ndarray:
    """Truncated Cauchy product: modes ``|n| <= N`` of ``u * v``."""
    N = order(u)
    if order(v) != N:
        raise ValueError("convolution operands must share N")
    return np.convolve(u, v)[N:3 * N + 1]


def toeplitz(u) -> np.ndarray:
    """Matrix of ``h -> convolve(u, h)``."""
    N = order(u)
    n = modes(N)
    diff = n[:, None] - n[None, :]
    full = np.zeros(4 * N + 1, dtype=complex)
    full[N:3 * N + 1] = u
    return full[diff + 2 * N]


def symmetrize(c) -> np.ndarray:
    """``c_n <- (c_n + conj(c_{-n})) / 2``."""
    c = np.asarray(c)
    return 0.5 * (c + np.conj(c[::-1]))


def symmetry_residual(c) -> float:
    c = np.asarray(c)
    return float(np.abs(c - np.conj(c[::-1])).max() / _scale(c))


def _mode_norms(K):
    if isinstance(K, FourierCircle):
        return modes(K.N), np.maximum(np.abs(K.a), np.abs(K.b))
    c = np.asarray(K)
    return modes(order(c)), np.abs(c)


def weighted_l1_norm(K, nu: float) -> float:
    """``sum_n max(|a_n|, |b_n|) nu^|n|``."""
    if nu < 1:
        raise ValueError("nu must be >= 1")
    n, m = _mode_norms(K)
    return float(np.sum(m * float(nu) ** np.abs(n)))


def log_sobolev_norm(K, d: float) -> float:
    """Natural log of :func:`sobolev_norm`, safe against overflow."""
    n, m = _mode_norms(K)
    keep = m > 0
    if not keep.any():
        return -np.inf
    terms = np.abs(n[keep]) * np.log1p(d * d) + 2 * np.log(m[keep])
    return 0.5 * float(np.logaddexp.reduce(terms))


def sobolev_norm(K, d: float) -> float:
    """``sqrt(sum_n (1 + d^2)^|n| max(|a_n|^2, |b_n|^2))``."""
    if d < 0:
        raise ValueError("d must be >= 0")
    with np.errstate(over="ignore"):
        return float(np.exp(log_sobolev_norm(K, d)))


def enclosed_area(K: FourierCircle) -> float:
    """Signed area ``1/2 int (K1 K2' - K2 K1') dtheta`` from the coefficients."""
    a, b = K.a, K.b
    n = modes(K.N)
    val = 0.5 * np.sum(2j * np.pi * n * (a[::-1] * b - b[::-1] * a))
    scale = max(_scale(a), _scale(b)) ** 2 * max(K.N, 1)
    if abs(val.imag) > AREA_IMAG_TOL * scale:
        raise SymmetryError("area functional has a non-negligible imaginary part")
    return float(val.real)


def defect_grid_size(N: int) -> int:
    return max(1024, 8 * (2 * N + 1))


def curve_samples(K: FourierCircle, L: int) -> np.ndarray:
    """Real points of ``K`` on the uniform grid of size ``L``, shape (L, 2)."""
    return np.stack([grid_values(K.a, L).real, grid_values(K.b, L).real], axis=-1)


def defect(K, spec, rho: float | None = None, L: int | None = None) -> float:
    """Sup-norm conjugacy error on a uniform grid.

    For a single circle this is ``max |F(K(theta)) - K(theta + rho)|``; for a
    system, the max over the links ``F(K_j) - K_{j+1}`` and the closing
    ``F(K_d(theta)) - K_1(theta + rho)``. Components are combined with the
    max norm.
    """
    system = as_system(K, rho)
    rho = system.rho if rho is None else rho
    L = L or defect_grid_size(system.N)
    pts = [curve_samples(k, L) for k in system.circles]
    worst = 0.0
    for j, p in enumerate(pts):
        fx, fy = spec(p[:, 0], p[:, 1])
        if j + 1 < system.d:
            target = pts[j + 1]
        else:
            target = curve_samples(system.circles[0].rotated(rho), L)
        err = max(np.abs(fx - target[:, 0]).max(), np.abs(fy - target[:, 1]).max())
        worst = max(worst, float(err))
    return worst
