"""Legendre / generalized Jacobi polynomials and Gauss-Legendre quadrature.

The divergence-free bases are built from two 1D families on (-1, 1):

    phi_m(x)     = sqrt((2m+1)/2) L_m(x)                     m >= 0
    psi_{m+1}(x) = (L_{m+1}(x) - L_{m-1}(x)) / sqrt(2(2m+1))  m >= 1

with psi_{m+1}' = phi_m and psi_{m+1}(+-1) = 0.
"""
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

__all__ = [
    "BasisConfig",
    "QuadratureRule",
    "Tables1D",
    "gauss_legendre",
    "legendre_eval",
    "legendre_table",
    "legendre_deriv",
    "legendre_deriv_table",
    "phi_eval",
    "psi_eval",
    "psi_deriv",
    "jacobi_m1m1_eval",
    "basis_tables",
]


@dataclass(frozen=True)
class BasisConfig:
    """Polynomial order of the divergence-free space (indices 1..N-1)."""

    N: int

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 4:
            raise ValueError(f"polynomial order N must be an integer >= 4, got {self.N}")

    @property
    def size(self):
        return self.N - 1


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def Q(self):
        return self.nodes.size


def _check_domain(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0):
        raise ValueError("Legendre evaluation requires |x| <= 1")
    return x


def legendre_table(n, x):
    """Return L_0..L_n at ``x`` stacked along a new leading axis."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    x = _check_domain(x)
    out = np.empty((n + 1,) + x.shape)
    out[0] = 1.0
    if n >= 1:
        out[1] = x
    for k in range(1, n):
        out[k + 1] = ((2 * k + 1) * x * out[k] - k * out[k - 1]) / (k + 1)
    return out


def legendre_eval(n, x):
    """L_n(x) by the three-term recurrence."""
    return legendre_table(n, x)[n]


def legendre_deriv_table(n, x, L=None):
    """L_0'..L_n' via L_{k+1}' = L_{k-1}' + (2k+1) L_k (endpoint safe)."""
    x = _check_domain(x)
    if L is None:
        L = legendre_table(n, x)
    out = np.zeros((n + 1,) + x.shape)
    if n >= 1:
        out[1] = 1.0
    for k in range(1, n):
        out[k + 1] = out[k - 1] + (2 * k + 1) * L[k]
    return out


def legendre_deriv(n, x):
    return legendre_deriv_table(n, x)[n]


def phi_eval(m, x):
    return np.sqrt((2 * m + 1) / 2.0) * legendre_eval(m, x)


def psi_eval(mp1, x):
    """psi_{m+1}(x) for ``mp1 = m + 1 >= 2``."""
    if mp1 < 2:
        raise ValueError("psi index m+1 must be >= 2")
    m = mp1 - 1
    L = legendre_table(mp1, x)
    return (L[mp1] - L[m - 1]) / np.sqrt(2.0 * (2 * m + 1))


def psi_deriv(mp1, x):
    """Analytic derivative of the closed form of psi_{m+1}."""
    if mp1 < 2:
        raise ValueError("psi index m+1 must be >= 2")
    m = mp1 - 1
    dL = legendre_deriv_table(mp1, x)
    return (dL[mp1] - dL[m - 1]) / np.sqrt(2.0 * (2 * m + 1))


def jacobi_m1m1_eval(n, x):
    """Generalized Jacobi polynomial P_n^{(-1,-1)}, n >= 2."""
    if n < 2:
        raise ValueError("P^{(-1,-1)}_n is defined here for n >= 2")
    L = legendre_table(n, x)
    return (n - 1) / (2.0 * (2 * n - 1)) * (L[n] - L[n - 2])


def gauss_legendre(Q):
    """Q-point Gauss-Legendre rule on (-1, 1), nodes increasing."""
    if int(Q) != Q or Q < 1:
        raise ValueError("quadrature size must be a positive integer")
    x, w = roots_legendre(int(Q))
    # enforce exact symmetry
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    x.setflags(write=False)
    w.setflags(write=False)
    return QuadratureRule(x, w)


@dataclass(frozen=True)
class Tables1D:
    """Values of the 1D families at a set of points, row k <-> index m = k+1.

    ``psi``/``dpsi`` hold psi_{m+1} and its analytic derivative, ``phi``/
    ``dphi`` hold phi_m and phi_m'. Arrays have shape (N-1, npoints).
    """

    N: int
    x: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray

    def kind(self, name):
        return {"p": self.psi, "dp": self.dpsi, "f": self.phi, "df": self.dphi}[name]


def basis_tables(N, x):
    x = _check_domain(np.atleast_1d(x))
    L = legendre_table(N, x)
    dL = legendre_deriv_table(N, x, L)
    m = np.arange(1, N)
    cphi = np.sqrt((2 * m + 1) / 2.0)[:, None]
    cpsi = 1.0 / np.sqrt(2.0 * (2 * m + 1))[:, None]
    phi = cphi * L[1:N]
    dphi = cphi * dL[1:N]
    psi = cpsi * (L[2:N + 1] - L[0:N - 1])
    dpsi = cpsi * (dL[2:N + 1] - dL[0:N - 1])
    return Tables1D(N, x, psi, dpsi, phi, dphi)
