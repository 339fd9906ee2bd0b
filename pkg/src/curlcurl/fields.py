"""Projection, evaluation, divergence checks and error norms.

Every basis family is a list of tensor-product terms ``(component, sign,
kinds)`` where ``kinds[a]`` names the 1D factor along axis ``a``:
``"p"`` = psi_{m+1}, ``"f"`` = phi_m, ``"dp"``/``"df"`` their derivatives and
``"1"`` a constant (face modes do not depend on one coordinate). Curls and
divergences are obtained by differentiating the terms, and all sums are
sum-factorized one axis at a time.
"""
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .basis import basis_tables, gauss_legendre
from .solver3d import FAMILIES_3D, CoeffSet3D

__all__ = [
    "TERMS_2D",
    "TERMS_3D",
    "GridSnapshot",
    "project_rhs_2d",
    "project_curl_2d",
    "project_rhs_3d",
    "project_curl_3d",
    "evaluate_field_2d",
    "evaluate_points_2d",
    "evaluate_field_3d",
    "divergence_max",
    "ErrorNorms",
    "error_norms",
    "l2_project_2d",
]

TERMS_2D = ((0, 1.0, ("p", "f")), (1, -1.0, ("f", "p")))

TERMS_3D = {
    "u1": ((0, 1.0, ("p", "f", "f")), (1, -1.0, ("f", "p", "f"))),
    "u2": ((0, 1.0, ("p", "f", "f")), (2, -1.0, ("f", "f", "p"))),
    "ux": ((1, 1.0, ("1", "p", "f")), (2, -1.0, ("1", "f", "p"))),
    "uy": ((0, 1.0, ("p", "1", "f")), (2, -1.0, ("f", "1", "p"))),
    "uz": ((0, 1.0, ("p", "f", "1")), (1, -1.0, ("f", "p", "1"))),
}
assert tuple(TERMS_3D) == FAMILIES_3D

# component k of u enters (curl component, derivative axis, sign)
_CURL_RULE_3D = {0: ((1, 2, 1.0), (2, 1, -1.0)),
                 1: ((2, 0, 1.0), (0, 2, -1.0)),
                 2: ((0, 1, 1.0), (1, 0, -1.0))}
_CURL_RULE_2D = {0: ((0, 1, -1.0),), 1: ((0, 0, 1.0),)}


def _diff(kinds, axis):
    k = kinds[axis]
    if k == "1":
        return None
    if k.startswith("d"):
        raise ValueError("second derivatives are not tabulated")
    return kinds[:axis] + ("d" + k,) + kinds[axis + 1:]


def curl_terms(terms, dim):
    rule = _CURL_RULE_3D if dim == 3 else _CURL_RULE_2D
    out = []
    for comp, sign, kinds in terms:
        for c, axis, s in rule[comp]:
            dk = _diff(kinds, axis)
            if dk is not None:
                out.append((c, sign * s, dk))
    return tuple(out)


def div_terms(terms):
    out = []
    for comp, sign, kinds in terms:
        dk = _diff(kinds, comp)
        if dk is not None:
            out.append((0, sign, dk))
    return tuple(out)


def _mats(kinds, tables):
    return [None if k == "1" else tables[a].kind(k) for a, k in enumerate(kinds)]


def _synth(coef, mats, shape):
    out = coef
    for T in mats:
        if T is not None:
            out = np.tensordot(out, T, axes=([0], [0]))
    for a, T in enumerate(mats):
        if T is None:
            out = np.expand_dims(out, a)
    return np.broadcast_to(out, shape)


def _analysis(gw, mats):
    out = gw
    for T in mats:
        out = out.sum(axis=0) if T is None else np.tensordot(out, T, axes=([0], [1]))
    return out


def _evaluate(terms, coef, tables, ncomp):
    shape = tuple(t.x.size for t in tables)
    out = np.zeros((ncomp,) + shape)
    for comp, sign, kinds in terms:
        out[comp] += sign * _synth(coef, _mats(kinds, tables), shape)
    return out


def _project(terms, gw, tables):
    res = None
    for comp, sign, kinds in terms:
        part = sign * _analysis(gw[comp], _mats(kinds, tables))
        res = part if res is None else res + part
    return res


def _weights(quad, dim):
    w = quad.weights
    return w[:, None] * w[None, :] if dim == 2 else np.einsum("i,j,k->ijk", w, w, w)


def _grid(quad, dim):
    return np.meshgrid(*([quad.nodes] * dim), indexing="ij")


def _quad(N, quad):
    return quad if quad is not None else gauss_legendre(2 * N)


def project_rhs_2d(f, N, quad=None):
    """F_mn = (f, Phi_mn) by tensor Gauss quadrature; ``f(X, Y) -> (f1, f2)``."""
    quad = _quad(N, quad)
    X, Y = _grid(quad, 2)
    w = _weights(quad, 2)
    f1, f2 = f(X, Y)
    gw = np.array([np.broadcast_to(f1, X.shape) * w, np.broadcast_to(f2, X.shape) * w])
    tab = basis_tables(N, quad.nodes)
    return _project(TERMS_2D, gw, (tab, tab))


def project_curl_2d(g, N, quad):
    """(g, curl Phi_mn) for a scalar field ``g`` sampled on the quadrature grid."""
    tab = basis_tables(N, quad.nodes)
    gw = (np.asarray(g) * _weights(quad, 2))[None]
    return _project(curl_terms(TERMS_2D, 2), gw, (tab, tab))


def _project_3d(terms_of, gw, N, quad):
    tab = basis_tables(N, quad.nodes)
    tables = (tab, tab, tab)
    return CoeffSet3D(**{name: _project(terms_of(name), gw, tables) for name in FAMILIES_3D})


def project_rhs_3d(f, N, quad=None):
    """(f, chi) for all five 3D families; ``f(X, Y, Z) -> (f1, f2, f3)``."""
    quad = _quad(N, quad)
    X, Y, Z = _grid(quad, 3)
    w = _weights(quad, 3)
    gw = np.array([np.broadcast_to(c, X.shape) * w for c in f(X, Y, Z)])
    return _project_3d(lambda n: TERMS_3D[n], gw, N, quad)


def project_curl_3d(g, N, quad):
    """(g, curl chi) for a vector field ``g`` of shape (3, Q, Q, Q) on the grid."""
    gw = np.asarray(g) * _weights(quad, 3)[None]
    return _project_3d(lambda n: curl_terms(TERMS_3D[n], 3), gw, N, quad)


def _tables_for(N, axes):
    return tuple(basis_tables(N, np.asarray(a, dtype=float)) for a in axes)


def evaluate_field_2d(U, x, y=None):
    """u_N and its scalar curl on the tensor grid x (x) y.

    Returns ``(u, curl)`` with ``u`` of shape (2, len(x), len(y)).
    """
    U = np.asarray(U, dtype=float)
    N = U.shape[0] + 1
    tables = _tables_for(N, (x, x if y is None else y))
    u = _evaluate(TERMS_2D, U, tables, 2)
    curl = _evaluate(curl_terms(TERMS_2D, 2), U, tables, 1)[0]
    return u, curl


def evaluate_points_2d(U, points):
    """Direct summation at scattered points of shape (P, 2)."""
    U = np.asarray(U, dtype=float)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    N = U.shape[0] + 1
    tx = basis_tables(N, pts[:, 0])
    ty = basis_tables(N, pts[:, 1])
    u1 = np.einsum("mk,mn,nk->k", tx.psi, U, ty.phi)
    u2 = -np.einsum("mk,mn,nk->k", tx.phi, U, ty.psi)
    curl = -(np.einsum("mk,mn,nk->k", tx.dphi, U, ty.psi)
             + np.einsum("mk,mn,nk->k", tx.psi, U, ty.dphi))
    return np.stack([u1, u2], axis=1), curl


def evaluate_field_3d(c, x, y=None, z=None):
    """u_N and curl u_N (each of shape (3, nx, ny, nz)) on a tensor grid."""
    tables = _tables_for(c.N, (x, x if y is None else y, x if z is None else z))
    u = 0.0
    curl = 0.0
    for name in FAMILIES_3D:
        coef = getattr(c, name)
        u = u + _evaluate(TERMS_3D[name], coef, tables, 3)
        curl = curl + _evaluate(curl_terms(TERMS_3D[name], 3), coef, tables, 3)
    return u, curl


def divergence_max(coeffs, resolution=64):
    """max |div u_N| on a uniform tensor grid of [-1, 1]^d (analytic derivatives)."""
    x = np.linspace(-1.0, 1.0, resolution)
    if isinstance(coeffs, CoeffSet3D):
        tables = _tables_for(coeffs.N, (x, x, x))
        div = 0.0
        for name in FAMILIES_3D:
            div = div + _evaluate(div_terms(TERMS_3D[name]), getattr(coeffs, name), tables, 1)[0]
    else:
        U = np.asarray(coeffs, dtype=float)
        tables = _tables_for(U.shape[0] + 1, (x, x))
        div = _evaluate(div_terms(TERMS_2D), U, tables, 1)[0]
    return float(np.max(np.abs(div)))


def l2_project_2d(f, N, quad=None, eig=None):
    """Coefficients of the L2-orthogonal projection of ``f`` onto the 2D space."""
    from .solver2d import discretization

    eig = eig if eig is not None else discretization(N).eig
    F = project_rhs_2d(f, N, quad)
    E, d = eig.E, eig.d
    return E @ ((E.T @ F @ E) / np.add.outer(d, d)) @ E.T


@dataclass(frozen=True)
class ErrorNorms:
    l2: float
    curl: float

    @property
    def hcurl(self):
        return float(np.hypot(self.l2, self.curl))

    def weighted(self, kappa):
        """||curl e|| + kappa ||e||, the combination of the a priori estimate."""
        return self.curl + kappa * self.l2


def error_norms(coeffs, exact, exact_curl, quad=None):
    """L2 and curl error of the expansion against an exact field.

    ``exact(*grid)`` returns the d components, ``exact_curl(*grid)`` the
    scalar curl in 2D or the three curl components in 3D.
    """
    is3d = isinstance(coeffs, CoeffSet3D)
    N = coeffs.N if is3d else np.asarray(coeffs).shape[0] + 1
    quad = _quad(N, quad)
    dim = 3 if is3d else 2
    grid = _grid(quad, dim)
    w = _weights(quad, dim)
    if is3d:
        u, curl = evaluate_field_3d(coeffs, quad.nodes)
    else:
        u, c = evaluate_field_2d(coeffs, quad.nodes)
        curl = c[None]
    ue = np.array([np.broadcast_to(v, grid[0].shape) for v in exact(*grid)])
    ce = exact_curl(*grid)
    ce = np.array([np.broadcast_to(v, grid[0].shape) for v in (ce if is3d else [ce])])
    l2 = np.sqrt(np.sum(w * np.sum((u - ue) ** 2, axis=0)))
    cu = np.sqrt(np.sum(w * np.sum((curl - ce) ** 2, axis=0)))
    return ErrorNorms(float(l2), float(cu))


def _sibling(stem, ext):
    # append rather than replace: stems such as "B_t0.050000" contain dots
    return stem.with_name(stem.name + ext)


@dataclass
class GridSnapshot:
    """Field samples on a tensor grid plus metadata (N, kappa, time, ...)."""

    axes: tuple
    values: np.ndarray  # (ncomp, n1, n2[, n3])
    metadata: dict = field(default_factory=dict)

    def write(self, stem):
        """Write ``stem.csv`` (x, y[, z], u1, u2[, u3]) and ``stem.json``."""
        stem = Path(stem)
        stem.parent.mkdir(parents=True, exist_ok=True)
        csv, js = _sibling(stem, ".csv"), _sibling(stem, ".json")
        grids = np.meshgrid(*self.axes, indexing="ij")
        cols = [g.ravel() for g in grids] + [v.ravel() for v in self.values]
        names = ["x", "y", "z"][:len(self.axes)] + [f"u{i + 1}" for i in range(len(self.values))]
        np.savetxt(csv, np.column_stack(cols), delimiter=",",
                   fmt="%.17g", header=",".join(names), comments="")
        meta = dict(self.metadata, shape=[len(a) for a in self.axes], columns=names)
        js.write_text(json.dumps(meta, indent=2))
        return csv, js

    @classmethod
    def read(cls, stem):
        stem = Path(stem)
        meta = json.loads(_sibling(stem, ".json").read_text())
        data = np.loadtxt(_sibling(stem, ".csv"), delimiter=",", skiprows=1, ndmin=2)
        shape = tuple(meta.pop("shape"))
        names = meta.pop("columns")
        d = len(shape)
        grids = [data[:, a].reshape(shape) for a in range(d)]
        axes = tuple(np.moveaxis(g, a, 0)[(slice(None),) + (0,) * (d - 1)]
                     for a, g in enumerate(grids))
        values = np.array([data[:, k].reshape(shape) for k in range(d, len(names))])
        return cls(axes, values, meta)
