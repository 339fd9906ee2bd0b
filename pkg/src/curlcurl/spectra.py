"""Dense assembly of A and its auxiliary counterpart at small N.

Used to verify the matrix-free operators, to count the dimension of the
eigenvalue-1 invariant subspace of the preconditioned matrix, and to
inspect its spectrum. Vectors use the m-fastest (column-major) ordering.
"""
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg as sla

from .operators import assemble_mass, assemble_stiffness
from .solver2d import ResonanceError

__all__ = [
    "MAX_N_2D",
    "MAX_N_3D",
    "DenseOperatorPair",
    "assemble_dense_2d",
    "assemble_dense_3d_interior",
    "invariant_subspace_dim",
    "preconditioned_spectrum",
    "null_witness_2d",
    "null_witness_3d",
    "write_spectrum",
]

MAX_N_2D = 64
MAX_N_3D = 12


@dataclass(frozen=True)
class DenseOperatorPair:
    A: np.ndarray
    Atilde: np.ndarray
    N: int
    kappa: float
    dim: int


def _capacity(N, cap, what):
    if N > cap:
        raise MemoryError(f"dense {what} assembly is limited to N <= {cap}, got N={N}")


def _blocks(N):
    M = assemble_mass(N).dense()
    S = assemble_stiffness(N).dense()
    return M, S, np.linalg.inv(M), np.eye(N - 1)


def _op2(M, S, I, kappa):
    return np.kron(M, S) + np.kron(S, M) + 2.0 * np.kron(I, I) + kappa * (np.kron(I, M) + np.kron(M, I))


def assemble_dense_2d(N, kappa):
    _capacity(N, MAX_N_2D, "2D")
    M, S, Minv, I = _blocks(N)
    return DenseOperatorPair(_op2(M, S, I, kappa), _op2(M, Minv, I, kappa), N, float(kappa), 2)


def _k3(ax, ay, az):
    # factor ax acts on the fastest index m (x), az on the slowest l (z)
    return np.kron(az, np.kron(ay, ax))


def _op3(M, S, I, kappa):
    Id = _k3(I, I, I)
    Mx, My, Mz = _k3(M, I, I), _k3(I, M, I), _k3(I, I, M)
    a11 = (_k3(I, M, S) + _k3(M, I, S) + _k3(S, M, I) + _k3(M, S, I)
           + 2.0 * Id + kappa * (Mx + My))
    a12 = _k3(M, I, S) + _k3(M, S, I) + Id + kappa * Mx
    a22 = (_k3(I, S, M) + _k3(M, I, S) + _k3(S, I, M) + _k3(M, S, I)
           + 2.0 * Id + kappa * (Mx + Mz))
    return np.block([[a11, a12], [a12, a22]])


def assemble_dense_3d_interior(N, kappa):
    _capacity(N, MAX_N_3D, "3D")
    M, S, Minv, I = _blocks(N)
    return DenseOperatorPair(_op3(M, S, I, kappa), _op3(M, Minv, I, kappa), N, float(kappa), 3)


def invariant_subspace_dim(pair, tol=1e-10):
    """dim null(A - Atilde) from the singular values of the difference."""
    s = np.linalg.svd(pair.A - pair.Atilde, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return pair.A.shape[0]
    return int(np.sum(s <= tol * s[0]))


def _check_invertible(pair):
    s = np.linalg.svd(pair.Atilde, compute_uv=False)
    if s[-1] <= 1e-13 * s[0]:
        idx = (int(np.argmin(s)),)
        raise ResonanceError(idx, s[-1], float("nan"))


def preconditioned_spectrum(pair):
    """Eigenvalues of Atilde^-1 A sorted by real part (complex dtype)."""
    if pair.A.shape[0] > 4096:
        raise MemoryError("dense spectrum limited to 4096 unknowns")
    _check_invertible(pair)
    T = np.linalg.solve(pair.Atilde, pair.A)
    w = sla.eigvals(T)
    return w[np.lexsort((w.imag, w.real))]


def null_witness_2d(N, seed=0):
    """U = M Vbar M with Vbar supported on the leading (N-3)x(N-3) block."""
    rng = np.random.default_rng(seed)
    M = assemble_mass(N).dense()
    V = np.zeros((N - 1, N - 1))
    V[:N - 3, :N - 3] = rng.standard_normal((N - 3, N - 3))
    return M @ V @ M


def null_witness_3d(N, seed=0):
    """Both interior components M_x M_y M_z Vbar with Vbar on the leading (N-3)^3 block."""
    rng = np.random.default_rng(seed)
    Md = assemble_mass(N)
    out = []
    for _ in range(2):
        V = np.zeros((N - 1,) * 3)
        V[:N - 3, :N - 3, :N - 3] = rng.standard_normal((N - 3,) * 3)
        for ax in range(3):
            V = Md.apply(V, ax)
        out.append(V)
    return out


def write_spectrum(stem, eigs, pair, tol=1e-10):
    """Write ``stem.csv`` (re, im) and ``stem.json`` summary; returns the summary."""
    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    eigs = np.asarray(eigs, dtype=complex)
    np.savetxt(stem.with_name(stem.name + ".csv"), np.column_stack([eigs.real, eigs.imag]),
               delimiter=",", fmt="%.17g", header="re,im", comments="")
    summary = {
        "schema": 1,
        "dim": pair.dim,
        "N": pair.N,
        "kappa": pair.kappa,
        "dim_eig1": invariant_subspace_dim(pair, tol),
        "fraction_at_1": float(np.mean(np.abs(eigs - 1.0) <= 1e-6)),
    }
    stem.with_name(stem.name + ".json").write_text(json.dumps(summary, indent=2))
    return summary
