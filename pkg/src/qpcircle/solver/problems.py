"""Truncated conjugacy systems in Fourier coefficient space.

All three problem kinds share one layout. The unknown vector holds the
scalar unfolding parameters first, then for each component circle its
coefficient sequences (``a, b`` and, for the recast standard map, also the
sine/cosine sequences ``s, c``). The residual holds the phase condition,
any scalar anchors, the shooting links ``F(K_j) - K_{j+1}`` closed by
``F(K_d) - (1 + beta) R_rho K_1``, and any auxiliary differential rows.

Residuals are holomorphic in the unknowns, so Newton runs in complex
arithmetic and Jacobians can be checked against complex finite differences.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .. import fourier as fs
from ..fourier import CircleSystem, FourierCircle


@dataclass(frozen=True)
class PhaseCondition:
    """Scalar constraint ``<pbar - K_1(0), eta> = 0``."""

    pbar: np.ndarray
    eta: np.ndarray

    def __post_init__(self):
        eta = np.asarray(self.eta, dtype=float)
        norm = np.hypot(*eta)
        if norm == 0:
            raise ValueError("eta must be non-zero")
        object.__setattr__(self, "eta", eta / norm)
        object.__setattr__(self, "pbar", np.asarray(self.pbar, dtype=float))

    @classmethod
    def radial(cls, p0, center) -> "PhaseCondition":
        """The line through ``p0`` and ``center``."""
        r = np.asarray(p0, float) - np.asarray(center, float)
        return cls(p0, (-r[1], r[0]))

    @classmethod
    def tangent(cls, K: FourierCircle) -> "PhaseCondition":
        """The line through ``K(0)`` normal to the curve there."""
        p = fs.eval_circle(K, 0.0)
        t = np.array([fs.eval_series(fs.differentiate(K.a), 0.0).real,
                      fs.eval_series(fs.differentiate(K.b), 0.0).real])
        return cls(p, t)


class _Assembler:
    """Collects COO triplets for a sparse Jacobian."""

    def __init__(self):
        self.rows, self.cols, self.vals = [], [], []

    def dense(self, r0, c0, block):
        block = np.asarray(block)
        i, j = np.indices(block.shape)
        self.rows.append((i + r0).ravel())
        self.cols.append((j + c0).ravel())
        self.vals.append(block.ravel())

    def diag(self, r0, c0, values, size=None):
        values = np.asarray(values, dtype=complex)
        if values.ndim == 0:
            values = np.full(size, values)
        k = np.arange(len(values))
        self.rows.append(k + r0)
        self.cols.append(k + c0)
        self.vals.append(values)

    def row(self, r, c0, values):
        values = np.asarray(values, dtype=complex)
        self.rows.append(np.full(len(values), r))
        self.cols.append(np.arange(len(values)) + c0)
        self.vals.append(values)

    def col(self, r0, c, values):
        values = np.asarray(values, dtype=complex)
        self.rows.append(np.arange(len(values)) + r0)
        self.cols.append(np.full(len(values), c))
        self.vals.append(values)

    def build(self, n) -> sp.csc_matrix:
        m = sp.coo_matrix((np.concatenate(self.vals), (np.concatenate(self.rows), np.concatenate(self.cols))),
                          shape=(n, n))
        return m.tocsc()


class ConjugacyProblem:
    """Shared bookkeeping; subclasses supply the image of a circle under ``F``."""

    n_seq = 2
    kind = "base"

    def __init__(self, spec, rho: float, d: int, N: int, phase: PhaseCondition):
        self.spec, self.rho, self.d, self.N, self.phase = spec, float(rho), int(d), int(N), phase
        self.P = 2 * self.N + 1
        self.R = np.exp(2j * np.pi * np.mod(fs.modes(self.N) * self.rho, 1.0))

    # layout -----------------------------------------------------------
    @property
    def n_scalars(self) -> int:
        return 1

    @property
    def size(self) -> int:
        return self.n_scalars + self.d * self.n_seq * self.P

    def seq_offset(self, j: int, k: int) -> int:
        return self.n_scalars + (self.n_seq * j + k) * self.P

    def seq(self, z, j, k):
        o = self.seq_offset(j, k)
        return z[o:o + self.P]

    def pack(self, system: CircleSystem, scalars=None, aux=None) -> np.ndarray:
        z = np.zeros(self.size, dtype=complex)
        if scalars is not None:
            z[:self.n_scalars] = scalars
        for j, K in enumerate(system.circles):
            z[self.seq_offset(j, 0):self.seq_offset(j, 0) + self.P] = K.a
            z[self.seq_offset(j, 1):self.seq_offset(j, 1) + self.P] = K.b
        return z

    def system(self, z) -> CircleSystem:
        return CircleSystem(self.rho, [FourierCircle(self.seq(z, j, 0).copy(), self.seq(z, j, 1).copy())
                                       for j in range(self.d)])

    def symmetrize(self, z) -> np.ndarray:
        z = z.copy()
        z[:self.n_scalars] = z[:self.n_scalars].real
        for j in range(self.d):
            for k in range(self.n_seq):
                o = self.seq_offset(j, k)
                z[o:o + self.P] = fs.symmetrize(z[o:o + self.P])
        return z

    def unfolding(self, z) -> dict:
        return {"beta": complex(z[0])}

    # residual pieces ----------------------------------------------------
    def _phase_row(self, z):
        a, b = self.seq(z, 0, 0), self.seq(z, 0, 1)
        eta = self.phase.eta
        return eta @ self.phase.pbar - (eta[0] * np.sum(a) + eta[1] * np.sum(b))

    def _link_rows(self, z, fa, fb, j):
        """``F(K_j) - K_{j+1}``, with the rotation and unfolding on the last link."""
        if j + 1 < self.d:
            return fa - self.seq(z, j + 1, 0), fb - self.seq(z, j + 1, 1)
        scale = (1 + z[0]) * self.R
        return fa - scale * self.seq(z, 0, 0), fb - scale * self.seq(z, 0, 1)

    def _link_jac(self, asm, z, r0, j):
        """Columns of the link residual for the target circle and beta."""
        P = self.P
        if j + 1 < self.d:
            asm.diag(r0, self.seq_offset(j + 1, 0), -1.0, P)
            asm.diag(r0 + P, self.seq_offset(j + 1, 1), -1.0, P)
        else:
            scale = -(1 + z[0]) * self.R
            asm.diag(r0, self.seq_offset(0, 0), scale)
            asm.diag(r0 + P, self.seq_offset(0, 1), scale)
            asm.col(r0, 0, -self.R * self.seq(z, 0, 0))
            asm.col(r0 + P, 0, -self.R * self.seq(z, 0, 1))

    def image(self, z, j):
        raise NotImplementedError

    def image_jacobian(self, z, j):
        """2x2 nested list of (P, P) blocks: d(Fa, Fb) / d(a_j, b_j)."""
        raise NotImplementedError

    def residual(self, z) -> np.ndarray:
        out = [np.atleast_1d(self._phase_row(z))]
        for j in range(self.d):
            out.extend(self._link_rows(z, *self.image(z, j), j))
        return np.concatenate(out)

    def jacobian(self, z) -> sp.csc_matrix:
        asm = _Assembler()
        P = self.P
        asm.row(0, self.seq_offset(0, 0), np.full(P, -self.phase.eta[0]))
        asm.row(0, self.seq_offset(0, 1), np.full(P, -self.phase.eta[1]))
        for j in range(self.d):
            r0 = 1 + 2 * j * P
            blocks = self.image_jacobian(z, j)
            for p in range(2):
                for q in range(2):
                    blk = blocks[p][q]
                    if np.ndim(blk) == 0:
                        asm.diag(r0 + p * P, self.seq_offset(j, q), blk, P)
                    else:
                        asm.dense(r0 + p * P, self.seq_offset(j, q), blk)
            self._link_jac(asm, z, r0, j)
        return asm.build(self.size)


class QuadraticProblem(ConjugacyProblem):
    """Maps ``F(x, y) = Rot(alpha) (x, y - q x^2)``: area-preserving Henon
    (``q = 1``) and the rigid rotation (``q = 0``)."""

    kind = "quadratic"

    def __init__(self, spec, rho, d, N, phase, q=None):
        super().__init__(spec, rho, d, N, phase)
        from ..maps import Family
        self.q = (0.0 if spec.family is Family.ROTATION else 1.0) if q is None else q
        self.cos, self.sin = np.cos(spec.alpha), np.sin(spec.alpha)

    def image(self, z, j):
        a, b = self.seq(z, j, 0), self.seq(z, j, 1)
        aa = self.q * fs.convolve(a, a)
        return (self.cos * a - self.sin * b + self.sin * aa,
                self.sin * a + self.cos * b - self.cos * aa)

    def image_jacobian(self, z, j):
        c, s = self.cos, self.sin
        if self.q == 0:
            return [[c, -s], [s, c]]
        T = 2 * self.q * fs.toeplitz(self.seq(z, j, 0))
        eye = np.eye(self.P)
        return [[c * eye + s * T, -s], [s * eye - c * T, c]]


class SampledProblem(ConjugacyProblem):
    """Any registered map: the image coefficients come from the DFT of ``F``
    on a uniform grid, and the Jacobian from the DFT of ``DF``."""

    kind = "sampled"

    def __init__(self, spec, rho, d, N, phase, L=None):
        super().__init__(spec, rho, d, N, phase)
        self.L = L or 1 << int(np.ceil(np.log2(4 * self.P)))
        n = fs.modes(self.N)
        self._diff = np.mod(n[:, None] - n[None, :], self.L)

    def _grid(self, z, j):
        return fs.grid_values(self.seq(z, j, 0), self.L), fs.grid_values(self.seq(z, j, 1), self.L)

    def image(self, z, j):
        x, y = self._grid(z, j)
        fx, fy = self.spec(x, y)
        return fs.dft_from_samples(fx, self.N), fs.dft_from_samples(fy, self.N)

    def image_jacobian(self, z, j):
        x, y = self._grid(z, j)
        J = self.spec.jac(x, y)
        return [[np.fft.fft(np.broadcast_to(J[p][q], x.shape))[self._diff] / self.L for q in range(2)]
                for p in range(2)]


class RecastProblem(ConjugacyProblem):
    """Standard map with ``sin(K_1)`` and ``cos(K_1)`` carried as unknowns.

    Per component ``j`` the extra unknowns ``s_j, c_j`` satisfy
    ``D s = c * D a`` and ``D c = -s * D a`` (unfolded by ``gamma_j`` and
    ``omega_j``) together with the anchors ``sum s = sin(sum a)`` and
    ``sum c = cos(sum a)``. The map itself becomes linear:
    ``F(K) = (a + b + alpha s, b + alpha s)``.
    """

    n_seq = 4
    kind = "recast"

    @property
    def n_scalars(self) -> int:
        return 1 + 2 * self.d

    def gamma(self, z, j):
        return z[1 + j]

    def omega(self, z, j):
        return z[1 + self.d + j]

    def pack(self, system, scalars=None, aux=None):
        z = super().pack(system, scalars)
        if aux is None:
            aux = trig_aux(system)
        for j, (s, c) in enumerate(aux):
            z[self.seq_offset(j, 2):self.seq_offset(j, 2) + self.P] = s
            z[self.seq_offset(j, 3):self.seq_offset(j, 3) + self.P] = c
        return z

    def aux(self, z):
        return [(self.seq(z, j, 2).copy(), self.seq(z, j, 3).copy()) for j in range(self.d)]

    def unfolding(self, z):
        return {"beta": complex(z[0]),
                "gamma": [complex(self.gamma(z, j)) for j in range(self.d)],
                "omega": [complex(self.omega(z, j)) for j in range(self.d)]}

    def image(self, z, j):
        al = self.spec.alpha
        a, b, s = self.seq(z, j, 0), self.seq(z, j, 1), self.seq(z, j, 2)
        return a + b + al * s, b + al * s

    def image_jacobian(self, z, j):
        return [[1.0, 1.0], [0.0, 1.0]]

    def residual(self, z):
        out = [np.atleast_1d(self._phase_row(z))]
        for j in range(self.d):
            a, s, c = self.seq(z, j, 0), self.seq(z, j, 2), self.seq(z, j, 3)
            sa = np.sum(a)
            out.append(np.array([np.sum(s) - np.sin(sa), np.sum(c) - np.cos(sa)]))
        for j in range(self.d):
            out.extend(self._link_rows(z, *self.image(z, j), j))
        for j in range(self.d):
            a, s, c = self.seq(z, j, 0), self.seq(z, j, 2), self.seq(z, j, 3)
            g, w = self.gamma(z, j), self.omega(z, j)
            da = fs.differentiate(a)
            out.append(fs.differentiate(s) - fs.convolve(c, da) - g * s + w * c)
            out.append(fs.differentiate(c) + fs.convolve(s, da) - g * c - w * s)
        return np.concatenate(out)

    def jacobian(self, z):
        asm = _Assembler()
        P, d, al = self.P, self.d, self.spec.alpha
        ones = np.ones(P)
        asm.row(0, self.seq_offset(0, 0), -self.phase.eta[0] * ones)
        asm.row(0, self.seq_offset(0, 1), -self.phase.eta[1] * ones)
        for j in range(d):
            r = 1 + 2 * j
            sa = np.sum(self.seq(z, j, 0))
            asm.row(r, self.seq_offset(j, 0), -np.cos(sa) * ones)
            asm.row(r, self.seq_offset(j, 2), ones)
            asm.row(r + 1, self.seq_offset(j, 0), np.sin(sa) * ones)
            asm.row(r + 1, self.seq_offset(j, 3), ones)
        base = 1 + 2 * d
        for j in range(d):
            r0 = base + 2 * j * P
            asm.diag(r0, self.seq_offset(j, 0), 1.0, P)
            asm.diag(r0, self.seq_offset(j, 1), 1.0, P)
            asm.diag(r0, self.seq_offset(j, 2), al, P)
            asm.diag(r0 + P, self.seq_offset(j, 1), 1.0, P)
            asm.diag(r0 + P, self.seq_offset(j, 2), al, P)
            self._link_jac(asm, z, r0, j)
        base += 2 * d * P
        Dn = 2j * np.pi * fs.modes(self.N)
        for j in range(d):
            r0 = base + 2 * j * P
            a, s, c = self.seq(z, j, 0), self.seq(z, j, 2), self.seq(z, j, 3)
            g, w = self.gamma(z, j), self.omega(z, j)
            Tda = fs.toeplitz(fs.differentiate(a))
            oa, os_, oc = self.seq_offset(j, 0), self.seq_offset(j, 2), self.seq_offset(j, 3)
            # D s - c * D a - g s + w c
            asm.dense(r0, oa, -fs.toeplitz(c) * Dn[None, :])
            asm.diag(r0, os_, Dn - g)
            asm.dense(r0, oc, -Tda + w * np.eye(P))
            asm.col(r0, 1 + j, -s)
            asm.col(r0, 1 + d + j, c)
            # D c + s * D a - g c - w s
            asm.dense(r0 + P, oa, fs.toeplitz(s) * Dn[None, :])
            asm.diag(r0 + P, oc, Dn - g)
            asm.dense(r0 + P, os_, Tda - w * np.eye(P))
            asm.col(r0 + P, 1 + j, -c)
            asm.col(r0 + P, 1 + d + j, -s)
        return asm.build(self.size)


def trig_aux(system: CircleSystem, L: int | None = None):
    """``(s, c)`` sequences of ``sin(K_1)``, ``cos(K_1)`` for each circle."""
    N = system.N
    L = L or fs.defect_grid_size(N)
    out = []
    for K in system.circles:
        x = fs.grid_values(K.a, L).real
        out.append((fs.symmetrize(fs.dft_from_samples(np.sin(x), N)),
                    fs.symmetrize(fs.dft_from_samples(np.cos(x), N))))
    return out


PROBLEMS = {"quadratic": QuadraticProblem, "sampled": SampledProblem, "recast": RecastProblem}


def make_problem(spec, rho, d, N, phase, kind=None) -> ConjugacyProblem:
    """Problem builder registered for the map family (or forced by ``kind``)."""
    return PROBLEMS[kind or spec.impl.problem](spec, rho, d, N, phase)
