"""Independent reference implementations used by the tests.

Everything here is built from numpy.polynomial Legendre objects, exact
polynomial integration and brute-force Galerkin assembly over explicit
basis-function lists, without touching the package's tables or Kronecker
formulas.
"""
import numpy as np
from numpy.polynomial import Legendre
from numpy.polynomial.legendre import leggauss


def phi_poly(m):
    return np.sqrt((2 * m + 1) / 2.0) * Legendre.basis(m)


def psi_poly(mp1):
    m = mp1 - 1
    return (Legendre.basis(m + 1) - Legendre.basis(m - 1)) / np.sqrt(2.0 * (2 * m + 1))


ONE = Legendre([1.0])


def integrate(p):
    P = p.integ()
    return P(1.0) - P(-1.0)


def mass_1d(N):
    K = N - 1
    ps = [psi_poly(m + 1) for m in range(1, N)]
    return np.array([[integrate(ps[i] * ps[j]) for j in range(K)] for i in range(K)])


def stiff_1d(N):
    K = N - 1
    dp = [phi_poly(m).deriv() for m in range(1, N)]
    return np.array([[integrate(dp[i] * dp[j]) for j in range(K)] for i in range(K)])


def identity_1d(N):
    K = N - 1
    ph = [phi_poly(m) for m in range(1, N)]
    return np.array([[integrate(ph[i] * ph[j]) for j in range(K)] for i in range(K)])


# A basis function is a list of (component, sign, (p_x, p_y[, p_z])) tensor terms.
def basis_2d(N):
    out = []
    for n in range(1, N):       # m fastest
        for m in range(1, N):
            out.append([(0, 1.0, (psi_poly(m + 1), phi_poly(n))),
                        (1, -1.0, (phi_poly(m), psi_poly(n + 1)))])
    return out


def _fortran_order(K, dims):
    """Index tuples (1-based) with the first index fastest."""
    return [tuple(reversed(t)) for t in np.ndindex(*(K,) * dims)]


def basis_3d(N):
    K = N - 1
    out = []
    for m, n, l in ((i + 1 for i in t) for t in _fortran_order(K, 3)):
        out.append([(0, 1.0, (psi_poly(m + 1), phi_poly(n), phi_poly(l))),
                    (1, -1.0, (phi_poly(m), psi_poly(n + 1), phi_poly(l)))])
    for m, n, l in ((i + 1 for i in t) for t in _fortran_order(K, 3)):
        out.append([(0, 1.0, (psi_poly(m + 1), phi_poly(n), phi_poly(l))),
                    (2, -1.0, (phi_poly(m), phi_poly(n), psi_poly(l + 1)))])
    for n, l in ((i + 1 for i in t) for t in _fortran_order(K, 2)):
        out.append([(1, 1.0, (ONE, psi_poly(n + 1), phi_poly(l))),
                    (2, -1.0, (ONE, phi_poly(n), psi_poly(l + 1)))])
    for m, l in ((i + 1 for i in t) for t in _fortran_order(K, 2)):
        out.append([(0, 1.0, (psi_poly(m + 1), ONE, phi_poly(l))),
                    (2, -1.0, (phi_poly(m), ONE, psi_poly(l + 1)))])
    for m, n in ((i + 1 for i in t) for t in _fortran_order(K, 2)):
        out.append([(0, 1.0, (psi_poly(m + 1), phi_poly(n), ONE)),
                    (1, -1.0, (phi_poly(m), psi_poly(n + 1), ONE))])
    return out


def _tensor(polys, x):
    vals = [p(x) for p in polys]
    if len(vals) == 2:
        return np.multiply.outer(*vals)
    return np.einsum("i,j,k->ijk", *vals)


def sample(fn, x, dim):
    """Values (dim, Q..) and curl (1 or 3, Q..) of a term-list basis function."""
    shape = (x.size,) * dim
    u = np.zeros((dim,) + shape)
    curl = np.zeros(((1 if dim == 2 else 3),) + shape)
    for comp, sign, polys in fn:
        u[comp] += sign * _tensor(polys, x)
        for a in range(dim):
            if a == comp:
                continue
            d = list(polys)
            d[a] = d[a].deriv()
            val = sign * _tensor(d, x)
            if dim == 2:
                # curl = d0 u1 - d1 u0
                curl[0] += val if (a, comp) == (0, 1) else -val
            else:
                c = 3 - a - comp
                s = 1.0 if (a, comp) in ((1, 2), (2, 0), (0, 1)) else -1.0
                curl[c] += s * val
    return u, curl


def galerkin(basis, dim, Q, kappa=0.0, alpha=None, beta=None, beta_grad=None):
    """Brute-force Galerkin matrices (alpha curl(beta u), curl v) + kappa (u, v) and the Gram."""
    x, w = leggauss(Q)
    W = np.multiply.outer(w, w) if dim == 2 else np.einsum("i,j,k->ijk", w, w, w)
    grid = np.meshgrid(*([x] * dim), indexing="ij")
    vals, curls = zip(*(sample(f, x, dim) for f in basis))
    U = np.array(vals).reshape(len(basis), dim, -1)
    C = np.array(curls).reshape(len(basis), curls[0].shape[0], -1)
    Wf = W.ravel()
    G = np.einsum("pcx,qcx,x->pq", U, U, Wf)
    if beta is None:
        Cb = C
    else:
        b = beta(*grid).ravel()
        bx, by = (g.ravel() for g in beta_grad(*grid))
        # curl(beta u) = beta curl u + grad(beta) x u
        Cb = b * C + (bx * U[:, 1] - by * U[:, 0])[:, None, :]
    a = np.ones_like(Wf) if alpha is None else alpha(*grid).ravel()
    A = np.einsum("pcx,qcx,x->pq", C, Cb, Wf * a) + kappa * G
    return A, G


def project(basis, dim, f, Q):
    x, w = leggauss(Q)
    W = np.multiply.outer(w, w) if dim == 2 else np.einsum("i,j,k->ijk", w, w, w)
    grid = np.meshgrid(*([x] * dim), indexing="ij")
    fv = np.array([np.broadcast_to(c, W.shape) for c in f(*grid)])
    return np.array([np.sum(W * np.sum(sample(b, x, dim)[0] * fv, axis=0)) for b in basis])
