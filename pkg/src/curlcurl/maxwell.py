"""Crank-Nicolson time stepping for Maxwell's equations with divergence-free B.

    dB/dt + curl E = 0,    d(eps0 eps_r E)/dt - curl B / mu0 = -J.

B lives in the divergence-free space. E is held on the tensor Gauss grid,
stored as its (lossless) coefficients in the orthonormal phi_0..phi_{Q-1}
basis. The E equation is imposed pointwise on the grid and the B equation
weakly, with (E, curl Phi) on the right. Eliminating E^{n+1} then gives,
per step, the curl-curl problem

    (alpha curl B', curl Phi) + k (B', Phi) = k (B^n, Phi) + (g, curl Phi),
    g = -(4/tau) E^n - alpha curl B^n + (2/tau) J / (eps0 eps_r),

with k = 4/tau^2 and alpha = 1/(eps0 eps_r mu0). For J = 0 the scheme
conserves (1/mu0)||B||^2 + (eps0 eps_r E, E) exactly.
"""
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .basis import gauss_legendre, legendre_table
from .fields import (GridSnapshot, divergence_max, evaluate_field_2d, evaluate_field_3d,
                     l2_project_2d, project_curl_3d)
from .solver2d import CurlCurlConfig, VarCoeffOperator2D, discretization, pgmres_var_2d
from .solver3d import CoeffSet3D, apply_mass_3d, pgmres_3d

__all__ = [
    "MaxwellConfig",
    "MaxwellState2D",
    "MaxwellState3D",
    "MaxwellRun",
    "MaxwellSolveError",
    "Stepper2D",
    "Stepper3D",
    "cn_step_2d",
    "cn_step_3d",
    "run_maxwell_2d",
    "run_maxwell_3d",
]


class MaxwellSolveError(RuntimeError):
    def __init__(self, step, report):
        self.step = step
        self.report = report
        super().__init__(f"curl-curl solve did not converge at time step {step} "
                         f"(residual {report.residual_history[-1]:.3e})")


@dataclass
class MaxwellConfig:
    """Run parameters. ``eps_r`` is a scalar or (in 2D) a callable eps_r(X, Y).

    ``J`` is J3(X, Y, t) in 2D or (J1, J2, J3) = J(X, Y, Z, t) in 3D and is
    sampled at the half step. ``initial_B``/``initial_E`` are optional field
    callbacks at t = 0 (zero fields otherwise).
    """

    N: int
    tau: float
    T: float
    eps0: float = 1.0
    mu0: float = 1.0
    eps_r: object = 1.0
    J: object = None
    snapshot_times: tuple = ()
    snapshot_resolution: int = 65
    quad_size: int = None
    solver_eps: float = 1e-12
    max_iter: int = 500
    initial_B: object = None
    initial_E: object = None
    check_divergence: bool = True
    div_resolution: int = None

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if self.T < 0:
            raise ValueError("final time must be non-negative")
        if not (self.eps0 > 0 and self.mu0 > 0):
            raise ValueError("eps0 and mu0 must be positive")
        if self.N < 4:
            raise ValueError("polynomial order N must be >= 4")

    @property
    def steps(self):
        return int(np.floor(self.T / self.tau + 1e-9))

    @property
    def Q(self):
        return self.quad_size if self.quad_size is not None else 2 * self.N


@dataclass
class MaxwellState2D:
    B: np.ndarray   # (N-1, N-1) divergence-free coefficients
    E3: np.ndarray  # (Q, Q) phi_a (x) phi_b coefficients
    t: float = 0.0


@dataclass
class MaxwellState3D:
    B: CoeffSet3D
    E: np.ndarray   # (3, Q, Q, Q)
    t: float = 0.0


class _GridTransform:
    """Gauss-grid values <-> orthonormal Legendre coefficients (degree < Q)."""

    def __init__(self, quad):
        L = legendre_table(quad.Q - 1, quad.nodes)
        self.P = np.sqrt((2 * np.arange(quad.Q) + 1) / 2.0)[:, None] * L
        self.T = self.P * quad.weights[None, :]

    def to_coeffs(self, G):
        for ax in range(G.ndim):
            G = np.moveaxis(np.tensordot(self.T, G, axes=([1], [ax])), 0, ax)
        return G

    def to_grid(self, C):
        for ax in range(C.ndim):
            C = np.moveaxis(np.tensordot(self.P.T, C, axes=([1], [ax])), 0, ax)
        return C


def _const_or_call(value, grid):
    if callable(value):
        return np.asarray(value(*grid), dtype=float)
    return np.full(grid[0].shape, float(value))


class Stepper2D:
    """Holds the step-invariant data (grid, alpha, operator) of a 2D run."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.quad = gauss_legendre(cfg.Q)
        self.grid = np.meshgrid(self.quad.nodes, self.quad.nodes, indexing="ij")
        self.w = np.outer(self.quad.weights, self.quad.weights)
        self.eps = cfg.eps0 * _const_or_call(cfg.eps_r, self.grid)
        if np.any(self.eps <= 0):
            raise ValueError("eps_r must be positive on the domain")
        self.alpha = 1.0 / (self.eps * cfg.mu0)
        self.kappa = 4.0 / cfg.tau ** 2
        alpha = self.alpha
        self.op = VarCoeffOperator2D(cfg.N, lambda X, Y: alpha, 1.0, self.kappa, self.quad)
        self.disc = discretization(cfg.N)
        self.tr = _GridTransform(self.quad)
        self.solver_cfg = CurlCurlConfig(self.kappa, cfg.solver_eps, cfg.max_iter)

    def initial_state(self):
        cfg = self.cfg
        K = cfg.N - 1
        B = np.zeros((K, K)) if cfg.initial_B is None else \
            l2_project_2d(cfg.initial_B, cfg.N, self.quad, self.disc.eig)
        E = np.zeros(self.w.shape) if cfg.initial_E is None else \
            np.asarray(cfg.initial_E(*self.grid), dtype=float) * np.ones(self.w.shape)
        return MaxwellState2D(B, self.tr.to_coeffs(E), 0.0)

    def current(self, t):
        if self.cfg.J is None:
            return 0.0
        return np.asarray(self.cfg.J(*self.grid, t), dtype=float)

    def mass(self, B):
        M = self.disc.M
        return M.apply(B, 0) + M.apply(B, 1)

    def energy(self, state):
        B = state.B
        E = self.tr.to_grid(state.E3)
        return float(np.sum(B * self.mass(B)) / self.cfg.mu0 + np.sum(self.w * self.eps * E * E))

    def step(self, state, index=0):
        cfg, tau = self.cfg, self.cfg.tau
        E = self.tr.to_grid(state.E3)
        J = self.current(state.t + 0.5 * tau)
        cB = self.op.curl_grid(state.B)
        g = -(4.0 / tau) * E - self.alpha * cB + (2.0 / tau) * J / self.eps
        F = self.kappa * self.mass(state.B) + self.op.test_curl(self.w * g)
        B, rep = pgmres_var_2d(F, self.solver_cfg, self.op, self.disc.eig)
        if not rep.converged:
            raise MaxwellSolveError(index, rep)
        cB1 = self.op.curl_grid(B)
        E1 = E + (tau / self.eps) * ((cB1 + cB) / (2.0 * cfg.mu0) - J)
        return MaxwellState2D(B, self.tr.to_coeffs(E1), state.t + tau), rep

    def snapshot(self, state):
        x = np.linspace(-1.0, 1.0, self.cfg.snapshot_resolution)
        u, _ = evaluate_field_2d(state.B, x)
        return GridSnapshot((x, x), u, {"t": state.t, "N": self.cfg.N, "field": "B"})


class Stepper3D:
    """Constant-coefficient 3D stepper; the system is scaled by 1/alpha."""

    def __init__(self, cfg):
        if callable(cfg.eps_r):
            raise ValueError("3D runs support a constant eps_r only")
        self.cfg = cfg
        self.quad = gauss_legendre(cfg.Q)
        x = self.quad.nodes
        self.grid = np.meshgrid(x, x, x, indexing="ij")
        self.w = np.einsum("i,j,k->ijk", *([self.quad.weights] * 3))
        self.eps = cfg.eps0 * float(cfg.eps_r)
        if self.eps <= 0:
            raise ValueError("eps_r must be positive")
        self.alpha = 1.0 / (self.eps * cfg.mu0)
        self.kappa = 4.0 / cfg.tau ** 2
        self.disc = discretization(cfg.N)
        self.tr = _GridTransform(self.quad)
        self.solver_cfg = CurlCurlConfig(self.kappa / self.alpha, cfg.solver_eps, cfg.max_iter)

    def initial_state(self):
        cfg = self.cfg
        if cfg.initial_B is not None:
            raise NotImplementedError("non-zero initial B is supported in 2D only")
        E = np.zeros((3,) + self.w.shape)
        if cfg.initial_E is not None:
            E = np.array([np.broadcast_to(c, self.w.shape) for c in cfg.initial_E(*self.grid)])
        return MaxwellState3D(CoeffSet3D.zeros(cfg.N), self._coeffs(E), 0.0)

    def _coeffs(self, E):
        return np.array([self.tr.to_coeffs(c) for c in E])

    def _grid(self, C):
        return np.array([self.tr.to_grid(c) for c in C])

    def current(self, t):
        if self.cfg.J is None:
            return 0.0
        return np.array([np.broadcast_to(c, self.w.shape) for c in self.cfg.J(*self.grid, t)])

    def curl_grid(self, B):
        return evaluate_field_3d(B, self.quad.nodes)[1]

    def energy(self, state):
        B = state.B
        E = self._grid(state.E)
        mass = apply_mass_3d(B, self.disc.M)
        return float(np.dot(B.to_vector(), mass.to_vector()) / self.cfg.mu0
                     + self.eps * np.sum(self.w * E * E))

    def step(self, state, index=0):
        cfg, tau = self.cfg, self.cfg.tau
        E = self._grid(state.E)
        J = self.current(state.t + 0.5 * tau)
        cB = self.curl_grid(state.B)
        g = -(4.0 / tau) * E - self.alpha * cB + (2.0 / tau) * J / self.eps
        F = (self.kappa * apply_mass_3d(state.B, self.disc.M)
             + project_curl_3d(g, cfg.N, self.quad)) * (1.0 / self.alpha)
        B, rep = pgmres_3d(F, self.solver_cfg, self.disc)
        if not rep.converged:
            raise MaxwellSolveError(index, rep)
        cB1 = self.curl_grid(B)
        E1 = E + (tau / self.eps) * ((cB1 + cB) / (2.0 * cfg.mu0) - J)
        return MaxwellState3D(B, self._coeffs(E1), state.t + tau), rep

    def snapshot(self, state):
        x = np.linspace(-1.0, 1.0, self.cfg.snapshot_resolution)
        u, _ = evaluate_field_3d(state.B, x)
        return GridSnapshot((x, x, x), u, {"t": state.t, "N": self.cfg.N, "field": "B"})


def cn_step_2d(state, cfg, stepper=None):
    """One Crank-Nicolson step; returns (new state, SolveReport)."""
    return (stepper or Stepper2D(cfg)).step(state)


def cn_step_3d(state, cfg, stepper=None):
    return (stepper or Stepper3D(cfg)).step(state)


@dataclass
class MaxwellRun:
    state: object
    snapshots: list
    iterations: list
    max_divB: float
    max_divB_relative: float
    wall_time: float
    energy: list = field(default_factory=list)

    @property
    def avg_iterations(self):
        return float(np.mean(self.iterations)) if self.iterations else 0.0

    def report(self, cfg):
        return {
            "schema": 1,
            "N": cfg.N,
            "tau": cfg.tau,
            "steps": len(self.iterations),
            "avg_iterations": self.avg_iterations,
            "max_iterations": int(max(self.iterations, default=0)),
            "max_divB": self.max_divB,
            "max_divB_relative": self.max_divB_relative,
            "wall_time": self.wall_time,
        }

    def write(self, cfg, out_dir):
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        files = []
        for snap in self.snapshots:
            files.extend(str(p) for p in snap.write(out / f"B_t{snap.metadata['t']:.6f}"))
        rep = dict(self.report(cfg), files=files)
        (out / "report.json").write_text(json.dumps(rep, indent=2))
        return rep


def _run(stepper, cfg, dim):
    t0 = time.perf_counter()
    state = stepper.initial_state()
    want = sorted(set(float(t) for t in cfg.snapshot_times))
    snaps = [stepper.snapshot(state)]
    iters, energy = [], [stepper.energy(state)]
    res = cfg.div_resolution or (64 if dim == 2 else 16)
    max_div = max_rel = 0.0
    for n in range(cfg.steps):
        state, rep = stepper.step(state, n + 1)
        iters.append(rep.iterations)
        energy.append(stepper.energy(state))
        if cfg.check_divergence:
            d = divergence_max(state.B, res)
            scale = np.max(np.abs(state.B.to_vector() if dim == 3 else state.B))
            max_div = max(max_div, d)
            max_rel = max(max_rel, d / scale if scale > 0 else 0.0)
        while want and want[0] <= state.t + 0.5 * cfg.tau:
            t = want.pop(0)
            if t > 0.5 * cfg.tau:
                snaps.append(stepper.snapshot(state))
    return MaxwellRun(state, snaps, iters, max_div, max_rel, time.perf_counter() - t0, energy)


def run_maxwell_2d(cfg):
    """March from t = 0 to T; snapshots at the steps nearest ``snapshot_times``."""
    return _run(Stepper2D(cfg), cfg, 2)


def run_maxwell_3d(cfg):
    return _run(Stepper3D(cfg), cfg, 3)
