"""3D curl-curl solver on the cube.

The divergence-free space has two interior families (u1, u2) with
coefficient arrays indexed (m, n, l) along (x, y, z), and three families of
face modes that are constant along one axis (ux indexed (n, l), uy (m, l),
uz (m, n)). Face modes decouple from the interior ones and each behaves like
a 2D problem scaled by the length 2 of the missing direction.
"""
import time
from dataclasses import dataclass

import numpy as np

from .solver2d import (ResonanceError, SolveReport, aux_denominators_2d, discretization,
                       fdsa_gmres)

__all__ = [
    "FAMILIES_3D",
    "CoeffSet3D",
    "Gamma3D",
    "gamma_3d",
    "apply_operator_3d",
    "apply_mass_3d",
    "aux_solve_3d",
    "pgmres_3d",
]

FAMILIES_3D = ("u1", "u2", "ux", "uy", "uz")
_FACES = ("ux", "uy", "uz")


@dataclass
class CoeffSet3D:
    """Coefficients of the five 3D families; vector order u1, u2, ux, uy, uz."""

    u1: np.ndarray
    u2: np.ndarray
    ux: np.ndarray
    uy: np.ndarray
    uz: np.ndarray

    @property
    def N(self):
        return self.u1.shape[0] + 1

    @classmethod
    def zeros(cls, N):
        K = N - 1
        return cls(np.zeros((K,) * 3), np.zeros((K,) * 3),
                   np.zeros((K, K)), np.zeros((K, K)), np.zeros((K, K)))

    def to_vector(self):
        return np.concatenate([np.asarray(getattr(self, f)).ravel(order="F") for f in FAMILIES_3D])

    @classmethod
    def from_vector(cls, v, N):
        K = N - 1
        n3, n2 = K ** 3, K ** 2
        v = np.asarray(v, dtype=float)
        if v.size != 2 * n3 + 3 * n2:
            raise ValueError(f"vector of size {v.size} does not match N={N}")
        parts = [v[:n3].reshape((K,) * 3, order="F"), v[n3:2 * n3].reshape((K,) * 3, order="F")]
        off = 2 * n3
        for _ in _FACES:
            parts.append(v[off:off + n2].reshape((K, K), order="F"))
            off += n2
        return cls(*parts)

    def _combine(self, other, fn):
        return CoeffSet3D(*(fn(getattr(self, f), getattr(other, f)) for f in FAMILIES_3D))

    def __add__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __mul__(self, a):
        return CoeffSet3D(*(a * getattr(self, f) for f in FAMILIES_3D))

    __rmul__ = __mul__

    def norm(self):
        return float(np.linalg.norm(self.to_vector()))


def _face_op(U, S, M, kappa):
    UM = M.apply(U, axis=1)
    MU = M.apply(U, axis=0)
    return 2.0 * (S.apply(UM, axis=0) + S.apply(MU, axis=1) + 2.0 * U + kappa * (MU + UM))


def apply_operator_3d(c, S, M, kappa):
    """Galerkin curl-curl plus kappa mass operator applied to a CoeffSet3D."""
    c1 = np.asarray(c.u1, dtype=float)
    c2 = np.asarray(c.u2, dtype=float)
    Mx1, My1 = M.apply(c1, 0), M.apply(c1, 1)
    Mx2, Mz2 = M.apply(c2, 0), M.apply(c2, 2)
    # shared cross block: S_z M_x + S_y M_x + I + kappa M_x
    cross1 = S.apply(Mx1, 2) + S.apply(Mx1, 1) + c1 + kappa * Mx1
    cross2 = S.apply(Mx2, 2) + S.apply(Mx2, 1) + c2 + kappa * Mx2
    a11 = (S.apply(My1, 2) + S.apply(Mx1, 2) + S.apply(My1, 0) + S.apply(Mx1, 1)
           + 2.0 * c1 + kappa * (Mx1 + My1))
    a22 = (S.apply(Mz2, 1) + S.apply(Mx2, 2) + S.apply(Mz2, 0) + S.apply(Mx2, 1)
           + 2.0 * c2 + kappa * (Mx2 + Mz2))
    return CoeffSet3D(a11 + cross2, cross1 + a22,
                      *(_face_op(getattr(c, f), S, M, kappa) for f in _FACES))


def apply_mass_3d(c, M):
    """The L2 Gram operator of the 3D basis."""
    Mx1 = M.apply(c.u1, 0)
    Mx2 = M.apply(c.u2, 0)
    faces = (2.0 * (M.apply(getattr(c, f), 0) + M.apply(getattr(c, f), 1)) for f in _FACES)
    return CoeffSet3D(Mx1 + M.apply(c.u1, 1) + Mx2, Mx1 + Mx2 + M.apply(c.u2, 2), *faces)


@dataclass(frozen=True)
class Gamma3D:
    """Diagonal symbols of the auxiliary interior 2x2 block system."""

    g11: np.ndarray
    g12: np.ndarray
    g22: np.ndarray
    det: np.ndarray
    face: np.ndarray  # 2 x (2D auxiliary denominators)


def gamma_3d(d, kappa, resonance_tol=1e-10):
    dm = d[:, None, None]
    dn = d[None, :, None]
    dl = d[None, None, :]
    g11 = dn / dl + dm / dl + dn / dm + dm / dn + 2.0 + kappa * (dm + dn)
    g12 = dm / dl + dm / dn + 1.0 + kappa * dm
    g22 = dl / dn + dm / dl + dl / dm + dm / dn + 2.0 + kappa * (dm + dl)
    det = g11 * g22 - g12 * g12
    scale = np.maximum(np.abs(g11 * g22), g12 * g12)
    bad = np.abs(det) <= resonance_tol * scale
    if bad.any():
        idx = tuple(np.argwhere(bad)[0])
        raise ResonanceError(idx, det[idx], _critical_kappa_3d(d, idx))
    face = 2.0 * aux_denominators_2d(d, kappa, resonance_tol)
    return Gamma3D(g11, g12, g22, det, face)


def _critical_kappa_3d(d, idx):
    # det is quadratic in kappa; report the root nearest to the real axis
    dm, dn, dl = (d[i] for i in idx)
    a0 = dn / dl + dm / dl + dn / dm + dm / dn + 2.0
    b0 = dm / dl + dm / dn + 1.0
    c0 = dl / dn + dm / dl + dl / dm + dm / dn + 2.0
    a1, b1, c1 = dm + dn, dm, dm + dl
    roots = np.roots([a1 * c1 - b1 * b1, a0 * c1 + a1 * c0 - 2 * b0 * b1, a0 * c0 - b0 * b0])
    return float(roots[np.argmin(np.abs(roots.imag))].real)


def _transform3(X, E):
    for ax in range(3):
        X = np.moveaxis(np.tensordot(E, X, axes=([1], [ax])), 0, ax)
    return X


def aux_solve_3d(F, eig, gam):
    """Exact solve of the auxiliary 3D system (S replaced by M^-1)."""
    E, ET = eig.E, eig.E.T
    G1 = _transform3(np.asarray(F.u1, dtype=float), ET)
    G2 = _transform3(np.asarray(F.u2, dtype=float), ET)
    V1 = (gam.g22 * G1 - gam.g12 * G2) / gam.det
    V2 = (gam.g11 * G2 - gam.g12 * G1) / gam.det
    faces = (E @ ((ET @ np.asarray(getattr(F, f), dtype=float) @ E) / gam.face) @ ET
             for f in _FACES)
    return CoeffSet3D(_transform3(V1, E), _transform3(V2, E), *faces)


def pgmres_3d(F, cfg, disc=None, precondition=True):
    """Solve the 3D constant-coefficient system; returns (CoeffSet3D, SolveReport)."""
    t0 = time.perf_counter()
    N = F.N
    disc = disc if disc is not None else discretization(N)

    def apply_A(v):
        return apply_operator_3d(CoeffSet3D.from_vector(v, N), disc.S, disc.M,
                                 cfg.kappa).to_vector()

    f = F.to_vector()
    if precondition:
        gam = gamma_3d(disc.eig.d, cfg.kappa, cfg.resonance_tol)

        def precond(v):
            return aux_solve_3d(CoeffSet3D.from_vector(v, N), disc.eig, gam).to_vector()

        u0 = precond(f)
    else:
        def precond(v):
            return v

        u0 = np.zeros_like(f)
    u, its, hist = fdsa_gmres(apply_A, precond, f, u0, cfg.eps, cfg.max_iter)
    report = SolveReport(its, hist, hist[-1] <= cfg.eps, time.perf_counter() - t0)
    return CoeffSet3D.from_vector(u, N), report
