"""Manufactured solutions and source terms used by tests, demos and the CLI.

Sources are derived symbolically with sympy and compiled with lambdify, so
each right-hand side is exactly consistent with its exact solution.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import sympy as sp

__all__ = [
    "Manufactured",
    "smooth_2d",
    "smooth_3d",
    "point_source_2d",
    "ring_permittivity",
    "ring_current",
    "two_point_current",
    "cavity_mode_2d",
]

x, y, z, kap = sp.symbols("x y z kappa", real=True)


def _lambdify(args, exprs):
    fns = [sp.lambdify(args, e, "numpy") for e in exprs]

    def f(*a):
        shape = np.broadcast(*a[:len(args) - (1 if kap in args else 0)]).shape
        return tuple(np.broadcast_to(np.asarray(fn(*a), dtype=float), shape) for fn in fns)

    return f


@dataclass(frozen=True)
class Manufactured:
    """Exact field ``u``, its curl and a kappa-dependent source ``f``.

    ``u(X, Y[, Z])`` and ``curl(...)`` return component tuples (the 2D
    curl is a scalar). ``source(kappa)`` returns the callable for ``f``.
    """

    dim: int
    u: object
    curl_fn: object
    f_kappa: object

    def curl(self, *grid):
        c = self.curl_fn(*grid)
        return c[0] if self.dim == 2 else c

    def source(self, kappa):
        return lambda *grid: self.f_kappa(*grid, float(kappa))


def _bump_potential(vars_, s):
    w = sp.Integer(1)
    for v in vars_:
        w *= (1 - v ** 2) ** 3
    return w * (1 + s) * sp.exp(s)


def _curl2(p):
    return [sp.diff(p, y), -sp.diff(p, x)]


def _curl3(A):
    a0, a1, a2 = A
    return [sp.diff(a2, y) - sp.diff(a1, z), sp.diff(a0, z) - sp.diff(a2, x),
            sp.diff(a1, x) - sp.diff(a0, y)]


@lru_cache(maxsize=None)
def smooth_2d():
    """u = curl p for a smooth bump potential p vanishing to third order on the boundary."""
    p = _bump_potential((x, y), sp.sin(sp.pi * x) * sp.cos(sp.pi * y))
    lap = sp.diff(p, x, 2) + sp.diff(p, y, 2)
    u = _curl2(p)
    f = _curl2(kap * p - lap)
    return Manufactured(2, _lambdify((x, y), u), _lambdify((x, y), [-lap]),
                        _lambdify((x, y, kap), f))


@lru_cache(maxsize=None)
def smooth_3d():
    """u = curl(p (1, 1, 1)) for the 3D bump potential."""
    p = _bump_potential((x, y, z), sp.sin(sp.pi * x) * sp.sin(sp.pi * y) * sp.sin(sp.pi * z))
    A = [p, p, p]
    u = _curl3(A)
    cu = _curl3(u)
    lapA = [sp.diff(a, x, 2) + sp.diff(a, y, 2) + sp.diff(a, z, 2) for a in A]
    f = _curl3([kap * a - la for a, la in zip(A, lapA)])
    return Manufactured(3, _lambdify((x, y, z), u), _lambdify((x, y, z), cu),
                        _lambdify((x, y, z, kap), f))


def point_source_2d(sigma=0.01, centers=((-0.5, 0.0), (0.5, 0.0))):
    """f = curl g with g a sum of narrow Gaussians; returns f(X, Y) -> (f1, f2)."""
    def f(X, Y):
        f1 = np.zeros(np.broadcast(X, Y).shape)
        f2 = np.zeros_like(f1)
        for cx, cy in centers:
            g = np.exp(-((X - cx) ** 2 + (Y - cy) ** 2) / sigma ** 2)
            f1 += -2.0 * (Y - cy) / sigma ** 2 * g
            f2 += 2.0 * (X - cx) / sigma ** 2 * g
        return f1, f2

    return f


def ring_permittivity(X, Y, width=0.05):
    """Relative permittivity switching from 2 inside a wavy ring to 1 outside."""
    theta = np.arctan2(Y, X)
    return 1.5 + 0.5 * np.tanh((0.16 + 0.07 * np.sin(6.0 * (theta + np.pi / 4)) - X ** 2 - Y ** 2)
                               / width)


def ring_current(sigma=0.04, center=(-0.8, 0.0)):
    """Out-of-plane current density J3(X, Y) (time independent)."""
    def J(X, Y, t=0.0):
        return np.exp(-((X - center[0]) ** 2 + (Y - center[1]) ** 2) / sigma ** 2)

    return J


def two_point_current(sigma=0.05, z0=0.5):
    """Current J = (J1, 0, 0) from two Gaussians centred at (0, 0, +-z0)."""
    def J(X, Y, Z, t=0.0):
        r2 = X ** 2 + Y ** 2
        j1 = np.exp(-(r2 + (Z - z0) ** 2) / sigma ** 2) + np.exp(-(r2 + (Z + z0) ** 2) / sigma ** 2)
        zero = np.zeros(j1.shape)
        return j1, zero, zero

    return J


@dataclass(frozen=True)
class CavityMode:
    """Transverse-electric cavity mode with E = (0, 0, E3), B = (B1, B2).

    E3 = sin(a(x+1)) sin(b(y+1)) cos(w t), w^2 = a^2 + b^2 (vacuum units).
    """

    p: int = 1
    q: int = 1

    @property
    def a(self):
        return self.p * np.pi / 2

    @property
    def b(self):
        return self.q * np.pi / 2

    @property
    def omega(self):
        return float(np.hypot(self.a, self.b))

    def E(self, X, Y, t):
        return np.sin(self.a * (X + 1)) * np.sin(self.b * (Y + 1)) * np.cos(self.omega * t)

    def B(self, X, Y, t):
        a, b, w = self.a, self.b, self.omega
        s = -np.sin(w * t) / w
        by = b * np.sin(a * (X + 1)) * np.cos(b * (Y + 1))
        bx = a * np.cos(a * (X + 1)) * np.sin(b * (Y + 1))
        return s * by, -s * bx

    def curl_B(self, X, Y, t):
        a, b, w = self.a, self.b, self.omega
        return -np.sin(w * t) * w * np.sin(a * (X + 1)) * np.sin(b * (Y + 1))


def cavity_mode_2d(p=1, q=1):
    return CavityMode(p, q)
