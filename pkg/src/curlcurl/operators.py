"""1D mass/stiffness matrices of the psi/phi families and their spectral data.

M_mn = (psi_{n+1}, psi_{m+1})   penta-diagonal (only the 0 and +-2 diagonals)
S_mn = (phi_n', phi_m')         dense, zero whenever m + n is odd
I_mn = (phi_n, phi_m) = delta_mn

Indices run over 1..N-1; arrays use 0-based row k <-> index k+1.
"""
from dataclasses import dataclass, field
from math import ceil, sqrt

import numpy as np
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "MassMatrix",
    "StiffMatrix",
    "MassEigen",
    "assemble_mass",
    "assemble_stiffness",
    "product_MS_analytic",
    "diagonalize_mass",
    "spherical_bessel_j",
    "bessel_half_integer",
    "analytic_eigen_approx",
    "dump_csv",
    "DENSE_STIFFNESS_CAP",
]

DENSE_STIFFNESS_CAP = 2048


def _check_order(N):
    if int(N) != N or N < 4:
        raise ValueError(f"polynomial order N must be an integer >= 4, got {N}")
    return int(N)


def _along(X, axis):
    return np.moveaxis(np.asarray(X, dtype=float), axis, 0)


@dataclass(frozen=True)
class MassMatrix:
    N: int
    main: np.ndarray    # M_nn, n = 1..N-1
    super2: np.ndarray  # M_{n,n+2}, n = 1..N-3

    def dense(self):
        return np.diag(self.main) + np.diag(self.super2, 2) + np.diag(self.super2, -2)

    def apply(self, X, axis=0):
        """M applied along ``axis`` of ``X`` in O(size) work."""
        Xa = _along(X, axis)
        shape = (-1,) + (1,) * (Xa.ndim - 1)
        Y = self.main.reshape(shape) * Xa
        s = self.super2.reshape(shape)
        Y[:-2] += s * Xa[2:]
        Y[2:] += s * Xa[:-2]
        return np.moveaxis(Y, 0, axis)


def assemble_mass(N):
    N = _check_order(N)
    n = np.arange(1, N, dtype=float)
    main = (1.0 / (2 * n + 1)) * (1.0 / (2 * n - 1) + 1.0 / (2 * n + 3))
    k = n[:-2]
    super2 = -1.0 / (np.sqrt(2 * k + 1) * np.sqrt(2 * k + 5) * (2 * k + 3))
    main.setflags(write=False)
    super2.setflags(write=False)
    return MassMatrix(N, main, super2)


@dataclass(frozen=True)
class StiffMatrix:
    """S_mn = 1/4 sqrt((2m+1)(2n+1)) k(k+1) (1 + (-1)^(m+n)), k = min(m, n).

    Within each parity class S is c_m c_n g(min(m, n)) / 2, a semiseparable
    matrix, so products are done with prefix sums in O(size) per vector.
    """

    N: int
    _dense: list = field(default_factory=list, repr=False, compare=False)

    def dense(self):
        if not self._dense:
            if self.N > DENSE_STIFFNESS_CAP:
                raise MemoryError(
                    f"dense S refused for N={self.N} > {DENSE_STIFFNESS_CAP}; use apply()")
            n = np.arange(1, self.N, dtype=float)
            k = np.minimum.outer(n, n)
            parity = (np.add.outer(n, n) % 2 == 0).astype(float)
            S = 0.5 * np.sqrt(np.outer(2 * n + 1, 2 * n + 1)) * k * (k + 1) * parity
            S.setflags(write=False)
            self._dense.append(S)
        return self._dense[0]

    def apply(self, X, axis=0):
        Xa = _along(X, axis)
        n = np.arange(1, self.N, dtype=float)
        shape = (-1,) + (1,) * (Xa.ndim - 1)
        c = np.sqrt(2 * n + 1).reshape(shape)
        g = (n * (n + 1)).reshape(shape)
        Z = c * Xa
        Y = np.empty_like(Z)
        for start in (0, 1):
            z = Z[start::2]
            gg = g[start::2]
            lower = np.cumsum(gg * z, axis=0)
            tail = np.cumsum(z[::-1], axis=0)[::-1]
            upper = np.zeros_like(z)
            upper[:-1] = tail[1:]
            Y[start::2] = lower + gg * upper
        Y *= 0.5 * c
        return np.moveaxis(Y, 0, axis)


def assemble_stiffness(N):
    return StiffMatrix(_check_order(N))


def product_MS_analytic(N):
    """Closed form of M S: identity rows 1..N-3 plus two corrected rows."""
    N = _check_order(N)
    n = np.arange(1, N, dtype=float)
    P = np.eye(N - 1)
    P[N - 3] += 0.25 * np.sqrt((2 * n + 1) / (2 * N - 3)) * n * (n + 1) / (2 * N - 1) \
        * (1 + (-1.0) ** (n + N))
    P[N - 2] += 0.25 * np.sqrt((2 * n + 1) / (2 * N - 1)) * n * (n + 1) / (2 * N + 1) \
        * (1 + (-1.0) ** (n + N + 1))
    return P


@dataclass(frozen=True)
class MassEigen:
    """M = E diag(d) E^T with E orthonormal; columns ordered by decreasing d.

    Entries of E coupling indices of different parity are exactly zero.
    """

    E: np.ndarray
    d: np.ndarray

    @property
    def size(self):
        return self.d.size


def _fix_signs(V):
    idx = np.argmax(np.abs(V) > 0, axis=0)
    s = np.sign(V[idx, np.arange(V.shape[1])])
    s[s == 0] = 1.0
    return V * s


def diagonalize_mass(M):
    """Eigen-decomposition of M through its two tridiagonal parity blocks."""
    K = M.main.size
    E = np.zeros((K, K))
    d = np.zeros(K)
    col = 0
    blocks = []
    for start in (0, 1):
        rows = np.arange(start, K, 2)
        w, V = eigh_tridiagonal(M.main[start::2], M.super2[start::2])
        G = V.T @ V
        if np.max(np.abs(G - np.eye(G.shape[0]))) > 1e-12:
            V, _ = np.linalg.qr(V)
        blocks.append((rows, w, _fix_signs(V)))
    for rows, w, V in blocks:
        cols = np.arange(col, col + w.size)
        E[np.ix_(rows, cols)] = V
        d[cols] = w
        col += w.size
    order = np.argsort(-d, kind="stable")
    E = E[:, order]
    d = d[order]
    if np.any(d <= 0):
        raise ArithmeticError("mass matrix is not positive definite")
    E.setflags(write=False)
    d.setflags(write=False)
    return MassEigen(E, d)


def spherical_bessel_j(nmax, r):
    """j_0(r)..j_nmax(r) for scalar r > 0.

    Upward recurrence is used for n < r, Miller's downward recurrence for
    n >= r, matched on the overlap.
    """
    r = float(r)
    if not r > 0:
        raise ValueError("spherical Bessel argument must be positive")
    nmax = int(nmax)
    j = np.zeros(nmax + 1)
    j0 = np.sin(r) / r
    j1 = np.sin(r) / r ** 2 - np.cos(r) / r
    j[0] = j0
    if nmax == 0:
        return j
    j[1] = j1
    n_up = min(nmax, max(1, int(np.floor(r))))
    for n in range(1, n_up):
        j[n + 1] = (2 * n + 1) / r * j[n] - j[n - 1]
    if n_up == nmax:
        return j
    start = nmax + int(ceil(sqrt(40.0 * (nmax + 1)))) + 20
    lo = n_up - 1
    down = np.zeros(nmax + 2)
    a_next, a = 0.0, 1.0
    for n in range(start, lo, -1):
        a_prev = (2 * n + 1) / r * a - a_next
        a_next, a = a, a_prev
        if n - 1 <= nmax + 1:
            down[n - 1] = a
        if abs(a) > 1e250:
            a_next *= 1e-250
            a *= 1e-250
            down *= 1e-250
    down /= np.max(np.abs(down[lo:n_up + 1]))
    ref = j[lo:n_up + 1]
    trial = down[lo:n_up + 1]
    scale = np.dot(ref, trial) / np.dot(trial, trial)
    j[n_up + 1:] = scale * down[n_up + 1:nmax + 1]
    return j


def bessel_half_integer(n, r):
    """J_{n+1/2}(r) = sqrt(2r/pi) j_n(r)."""
    if n < 0:
        raise ValueError("order index must be non-negative")
    return np.sqrt(2.0 * r / np.pi) * spherical_bessel_j(n, r)[n]


def analytic_eigen_approx(N, normalize=True):
    """Bessel-function approximation (E_hat, d_hat) of the eigenpairs of M.

    Column j of E_hat holds the psi-coefficients of sin(j pi (x+1)/2),
    d_hat_j = (pi j / 2)^-2. The raw coefficient vector has 2-norm close to
    pi j / 2 (the L2 norm of the derivative); ``normalize`` divides it out
    so that columns are comparable with the unit eigenvectors of M.
    """
    N = _check_order(N)
    K = N - 1
    i = np.arange(1, N)
    Eh = np.zeros((K, K))
    for col, j in enumerate(i):
        r = np.pi * j / 2.0
        J = np.sqrt(2.0 * r / np.pi) * spherical_bessel_j(K, r)[1:]
        Eh[:, col] = np.pi * np.sqrt((2 * i + 1) * j / 2.0) * np.cos(np.pi * (j + i) / 2.0) * J
    Eh[np.add.outer(i, i) % 2 == 1] = 0.0
    if normalize:
        Eh /= (np.pi * i / 2.0)[None, :]
    dh = (np.pi * i / 2.0) ** -2
    return Eh, dh


def dump_csv(path, array):
    """Write a 1D/2D array as row-major CSV with full precision."""
    np.savetxt(path, np.atleast_2d(array) if np.ndim(array) == 1 else array,
               delimiter=",", fmt="%.17g")
