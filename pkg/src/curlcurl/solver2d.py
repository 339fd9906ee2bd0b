"""2D curl-curl solver: matrix-free operator, diagonal auxiliary solve, GMRES.

Unknowns are the coefficients U[m-1, n-1] of Phi_{m,n} = (psi_{m+1}(x) phi_n(y),
-phi_m(x) psi_{n+1}(y)). The Galerkin system reads

    S U M + 2 U + M U S + kappa (M U + U M) = F.

Replacing S by M^-1 yields an auxiliary system that E diagonalizes
exactly; its inverse is used as the preconditioner.
"""
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .basis import basis_tables, gauss_legendre
from .operators import assemble_mass, assemble_stiffness, diagonalize_mass

__all__ = [
    "CurlCurlConfig",
    "SolveReport",
    "ResonanceError",
    "Discretization",
    "discretization",
    "apply_operator_2d",
    "aux_denominators_2d",
    "aux_solve_2d",
    "fdsa_gmres",
    "pgmres_2d",
    "VarCoeffOperator2D",
    "apply_operator_var_2d",
    "pgmres_var_2d",
]


class ResonanceError(ArithmeticError):
    """A preconditioner denominator is (numerically) zero for this kappa."""

    def __init__(self, index, denominator, critical_kappa):
        self.index = tuple(int(i) + 1 for i in index)
        self.denominator = float(denominator)
        self.critical_kappa = float(critical_kappa)
        super().__init__(
            f"auxiliary problem is resonant at eigen-index {self.index} "
            f"(denominator {self.denominator:.3e}); critical kappa ~ {self.critical_kappa:.6g}")


@dataclass(frozen=True)
class CurlCurlConfig:
    kappa: float
    eps: float = 1e-12
    max_iter: int = 500
    resonance_tol: float = 1e-10

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.max_iter < 0:
            raise ValueError("max_iter must be non-negative")


@dataclass
class SolveReport:
    iterations: int
    residual_history: list
    converged: bool
    wall_time: float = 0.0
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Discretization:
    """The 1D building blocks shared by every solve at order N."""

    N: int
    M: object
    S: object
    eig: object


@lru_cache(maxsize=16)
def discretization(N):
    M = assemble_mass(N)
    return Discretization(N, M, assemble_stiffness(N), diagonalize_mass(M))


def apply_operator_2d(U, S, M, kappa):
    """S U M + 2 U + M U S + kappa (M U + U M)."""
    U = np.asarray(U, dtype=float)
    UM = M.apply(U, axis=1)
    MU = M.apply(U, axis=0)
    return S.apply(UM, axis=0) + S.apply(MU, axis=1) + 2.0 * U + kappa * (MU + UM)


def aux_denominators_2d(d, kappa, resonance_tol=1e-10):
    """(d_i/d_j + d_j/d_i + 2) + kappa (d_i + d_j), checked for resonance."""
    ratio = np.divide.outer(d, d)
    den = ratio + ratio.T + 2.0 + kappa * np.add.outer(d, d)
    bad = np.abs(den) < resonance_tol
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise ResonanceError((i, j), den[i, j], -(1.0 / d[i] + 1.0 / d[j]))
    return den


def aux_solve_2d(F, eig, kappa, resonance_tol=1e-10, den=None):
    """Solve the auxiliary system exactly: U = E V E^T, V = (E^T F E) / den."""
    E = eig.E
    if den is None:
        den = aux_denominators_2d(eig.d, kappa, resonance_tol)
    V = (E.T @ np.asarray(F, dtype=float) @ E) / den
    return E @ V @ E.T


def fdsa_gmres(apply_A, precond, f, u0, eps=1e-12, max_iter=500):
    """Left-preconditioned full GMRES in the bookkeeping of the FDSA loop.

    The stopping test compares the preconditioned residual ``rho`` with
    ``gamma = ||f||``. Returns (u, iterations, history) where ``history[0]``
    is the relative preconditioned residual of the initial guess.
    """
    f = np.asarray(f, dtype=float)
    gamma = np.linalg.norm(f)
    if gamma == 0.0:
        return np.zeros_like(f), 0, [0.0]
    r = precond(f - apply_A(u0))
    delta = np.linalg.norm(r)
    rho = delta
    history = [rho / gamma]
    if rho / gamma <= eps:
        return u0, 0, history

    m = min(max_iter, f.size)
    V = [r / delta]
    H = np.zeros((m + 1, m))
    cs = np.zeros(m)
    sn = np.zeros(m)
    g = np.zeros(m + 1)
    g[0] = delta
    j = 0
    while rho / gamma > eps and j < m:
        w = precond(apply_A(V[j]))
        for i in range(j + 1):
            H[i, j] = np.dot(w, V[i])
            w -= H[i, j] * V[i]
        H[j + 1, j] = np.linalg.norm(w)
        breakdown = H[j + 1, j] <= 1e-14 * max(abs(H[j, j]), 1.0)
        if not breakdown:
            V.append(w / H[j + 1, j])
        for i in range(j):
            t = cs[i] * H[i, j] + sn[i] * H[i + 1, j]
            H[i + 1, j] = -sn[i] * H[i, j] + cs[i] * H[i + 1, j]
            H[i, j] = t
        a, b = H[j, j], H[j + 1, j]
        nrm = np.hypot(a, b)
        cs[j], sn[j] = a / nrm, b / nrm
        H[j, j] = nrm
        H[j + 1, j] = 0.0
        g[j + 1] = -sn[j] * g[j]
        g[j] = cs[j] * g[j]
        rho = abs(g[j + 1])
        j += 1
        history.append(rho / gamma)
        if breakdown:
            break
    y = np.linalg.solve(np.triu(H[:j, :j]), g[:j])
    u = u0.copy()
    for i in range(j):
        u += y[i] * V[i]
    return u, j, history


def _vec(U):
    return np.asarray(U).ravel(order="F")


def _mat(v, K):
    return np.asarray(v).reshape((K, K), order="F")


def pgmres_2d(F, cfg, eig, S, M, precondition=True):
    """Solve the constant-coefficient 2D system; returns (U, SolveReport)."""
    t0 = time.perf_counter()
    F = np.asarray(F, dtype=float)
    K = F.shape[0]

    def apply_A(v):
        return _vec(apply_operator_2d(_mat(v, K), S, M, cfg.kappa))

    if precondition:
        den = aux_denominators_2d(eig.d, cfg.kappa, cfg.resonance_tol)

        def precond(v):
            return _vec(aux_solve_2d(_mat(v, K), eig, cfg.kappa, den=den))

        u0 = precond(_vec(F))
    else:
        def precond(v):
            return v

        u0 = np.zeros(K * K)
    u, its, hist = fdsa_gmres(apply_A, precond, _vec(F), u0, cfg.eps, cfg.max_iter)
    report = SolveReport(its, hist, hist[-1] <= cfg.eps, time.perf_counter() - t0)
    return _mat(u, K), report


def _const(value):
    return lambda x, y: np.full(np.broadcast(x, y).shape, float(value))


class VarCoeffOperator2D:
    """Matrix-free W(V) = (alpha curl(beta v), curl Phi_mn) + kappa (v, Phi_mn).

    ``alpha`` and ``beta`` are callables f(X, Y) on an "ij" meshgrid or
    scalars. A non-constant ``beta`` needs ``beta_grad(X, Y) -> (bx, by)``.
    """

    def __init__(self, N, alpha=1.0, beta=1.0, kappa=0.0, quad=None, beta_grad=None):
        self.N = N
        self.kappa = float(kappa)
        self.quad = quad if quad is not None else gauss_legendre(2 * N)
        x = self.quad.nodes
        w = self.quad.weights
        self.tab = basis_tables(N, x)
        X, Y = np.meshgrid(x, x, indexing="ij")
        a = alpha(X, Y) if callable(alpha) else _const(alpha)(X, Y)
        self.alpha = np.asarray(a, dtype=float)
        self.wa = np.outer(w, w) * self.alpha
        if callable(beta):
            if beta_grad is None:
                raise ValueError("a variable beta needs beta_grad")
            self.beta = np.asarray(beta(X, Y), dtype=float)
            bx, by = beta_grad(X, Y)
            self.beta_x = np.asarray(bx, dtype=float)
            self.beta_y = np.asarray(by, dtype=float)
        else:
            self.beta = float(beta)
            self.beta_x = self.beta_y = None
        self.M = assemble_mass(N)

    def curl_grid(self, V):
        """Scalar curl of beta v on the quadrature grid."""
        t = self.tab
        curl = -(t.dphi.T @ V @ t.psi) - (t.psi.T @ V @ t.dphi)
        c = self.beta * curl
        if self.beta_x is not None:
            v1 = t.psi.T @ V @ t.phi
            v2 = -(t.phi.T @ V @ t.psi)
            c = c + self.beta_x * v2 - self.beta_y * v1
        return c

    def test_curl(self, g):
        """(g, curl Phi_mn) for a scalar field already multiplied by weights."""
        t = self.tab
        return -(t.dphi @ g @ t.psi.T) - (t.psi @ g @ t.dphi.T)

    def __call__(self, V, kappa=None):
        V = np.asarray(V, dtype=float)
        kappa = self.kappa if kappa is None else kappa
        W = self.test_curl(self.wa * self.curl_grid(V))
        if kappa:
            W = W + kappa * (self.M.apply(V, axis=0) + self.M.apply(V, axis=1))
        return W


def apply_operator_var_2d(V, alpha, beta, kappa, quad, beta_grad=None):
    V = np.asarray(V, dtype=float)
    op = VarCoeffOperator2D(V.shape[0] + 1, alpha, beta, kappa, quad, beta_grad)
    return op(V)


def pgmres_var_2d(F, cfg, op, eig=None):
    """Variable-coefficient solve; the preconditioner stays the constant one.

    ``op`` is a :class:`VarCoeffOperator2D` whose kappa must equal ``cfg.kappa``.
    """
    t0 = time.perf_counter()
    F = np.asarray(F, dtype=float)
    K = F.shape[0]
    if eig is None:
        eig = discretization(K + 1).eig
    den = aux_denominators_2d(eig.d, cfg.kappa, cfg.resonance_tol)

    def apply_A(v):
        return _vec(op(_mat(v, K), cfg.kappa))

    def precond(v):
        return _vec(aux_solve_2d(_mat(v, K), eig, cfg.kappa, den=den))

    u0 = precond(_vec(F))
    u, its, hist = fdsa_gmres(apply_A, precond, _vec(F), u0, cfg.eps, cfg.max_iter)
    report = SolveReport(its, hist, hist[-1] <= cfg.eps, time.perf_counter() - t0)
    return _mat(u, K), report
