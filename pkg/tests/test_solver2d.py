import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from curlcurl.basis import gauss_legendre
from curlcurl.fields import error_norms, l2_project_2d, project_rhs_2d
from curlcurl.problems import smooth_2d
from curlcurl.solver2d import (CurlCurlConfig, ResonanceError, VarCoeffOperator2D,
                               apply_operator_2d, apply_operator_var_2d, aux_denominators_2d,
                               aux_solve_2d, discretization, fdsa_gmres, pgmres_2d, pgmres_var_2d)

import oracles


def vec(U):
    return np.asarray(U).ravel(order="F")


def mat(v, K):
    return np.asarray(v).reshape((K, K), order="F")


def dense_aux(N, kappa):
    M, I = oracles.mass_1d(N), np.eye(N - 1)
    Mi = np.linalg.inv(M)
    return (np.kron(M, Mi) + np.kron(Mi, M) + 2 * np.kron(I, I)
            + kappa * (np.kron(I, M) + np.kron(M, I)))


@pytest.mark.parametrize("kappa", [0.0, 1.0, -37.5])
def test_operator_matches_bruteforce_galerkin(kappa):
    N = 8
    A, _ = oracles.galerkin(oracles.basis_2d(N), 2, N + 2, kappa=kappa)
    d = discretization(N)
    rng = np.random.default_rng(1)
    for _ in range(3):
        U = rng.standard_normal((N - 1, N - 1))
        ref = A @ vec(U)
        out = vec(apply_operator_2d(U, d.S, d.M, kappa))
        assert np.linalg.norm(out - ref) <= 1e-11 * np.linalg.norm(ref)


def test_operator_is_linear_and_zero_preserving():
    d = discretization(10)
    Z = np.zeros((9, 9))
    assert np.all(apply_operator_2d(Z, d.S, d.M, 3.0) == 0)
    rng = np.random.default_rng(2)
    U, V = rng.standard_normal((2, 9, 9))
    lhs = apply_operator_2d(2 * U - V, d.S, d.M, 3.0)
    rhs = 2 * apply_operator_2d(U, d.S, d.M, 3.0) - apply_operator_2d(V, d.S, d.M, 3.0)
    np.testing.assert_allclose(lhs, rhs, atol=1e-11)


@pytest.mark.parametrize("kappa", [0.0, 10.0, -3.0])
def test_aux_solve_inverts_auxiliary_operator(kappa):
    N = 8
    d = discretization(N)
    F = np.random.default_rng(4).standard_normal((N - 1, N - 1))
    U = aux_solve_2d(F, d.eig, kappa)
    r = dense_aux(N, kappa) @ vec(U) - vec(F)
    assert np.linalg.norm(r) <= 1e-10 * np.linalg.norm(F)
    assert np.all(aux_solve_2d(np.zeros_like(F), d.eig, kappa) == 0)


def test_resonance_detected_with_critical_kappa():
    d = discretization(12).eig.d
    kc = -(1 / d[2] + 1 / d[4])
    with pytest.raises(ResonanceError) as info:
        aux_denominators_2d(d, kc)
    err = info.value
    assert err.critical_kappa == pytest.approx(kc, rel=1e-10)
    assert set(err.index) == {3, 5}


@settings(max_examples=25, deadline=None)
@given(st.floats(-200, 200), st.integers(4, 30))
def test_denominators_symmetric_and_factorized(kappa, N):
    d = discretization(N).eig.d
    try:
        den = aux_denominators_2d(d, kappa)
    except ResonanceError:
        return
    np.testing.assert_allclose(den, den.T, rtol=0, atol=0)
    ref = np.add.outer(d, d) * (np.add.outer(1 / d, 1 / d) + kappa)
    np.testing.assert_allclose(den, ref, rtol=1e-10, atol=1e-10)


@pytest.mark.parametrize("kappa", [3.7, -50.0, 0.0])
def test_pgmres_matches_direct_solve(kappa):
    N = 10
    d = discretization(N)
    A, _ = oracles.galerkin(oracles.basis_2d(N), 2, N + 2, kappa=kappa)
    F = np.random.default_rng(5).standard_normal((N - 1, N - 1))
    U, rep = pgmres_2d(F, CurlCurlConfig(kappa), d.eig, d.S, d.M)
    ref = np.linalg.solve(A, vec(F))
    assert rep.converged
    assert np.linalg.norm(vec(U) - ref) <= 1e-9 * np.linalg.norm(ref)
    # residual history is the GMRES minimum residual: non-increasing
    assert np.all(np.diff(rep.residual_history) <= 1e-15)
    assert rep.iterations == len(rep.residual_history) - 1


def test_unpreconditioned_mode_same_solution():
    N = 6
    d = discretization(N)
    F = np.random.default_rng(6).standard_normal((N - 1, N - 1))
    U1, r1 = pgmres_2d(F, CurlCurlConfig(2.0), d.eig, d.S, d.M)
    U2, r2 = pgmres_2d(F, CurlCurlConfig(2.0), d.eig, d.S, d.M, precondition=False)
    assert r1.converged and r2.converged
    np.testing.assert_allclose(U1, U2, atol=1e-9 * np.abs(U1).max())


def test_zero_rhs_and_iteration_cap():
    d = discretization(8)
    U, rep = pgmres_2d(np.zeros((7, 7)), CurlCurlConfig(1.0), d.eig, d.S, d.M)
    assert rep.iterations == 0 and np.all(U == 0) and rep.converged
    F = np.random.default_rng(7).standard_normal((7, 7))
    U, rep = pgmres_2d(F, CurlCurlConfig(1.0, max_iter=1), d.eig, d.S, d.M)
    assert rep.iterations == 1 and not rep.converged


def test_config_validation():
    with pytest.raises(ValueError):
        CurlCurlConfig(1.0, eps=0.0)
    with pytest.raises(ValueError):
        CurlCurlConfig(1.0, max_iter=-1)


def test_fdsa_gmres_identity_preconditioner_small_system():
    rng = np.random.default_rng(8)
    A = rng.standard_normal((12, 12)) + 12 * np.eye(12)
    b = rng.standard_normal(12)
    x, its, hist = fdsa_gmres(lambda v: A @ v, lambda v: v, b, np.zeros(12), 1e-13, 50)
    np.testing.assert_allclose(x, np.linalg.solve(A, b), rtol=1e-10)
    assert its <= 12


def test_auxiliary_mode_rhs_converges_quickly():
    # kappa = 0, F = Atilde applied to a single eigen-mode of the auxiliary operator
    N = 16
    d = discretization(N)
    E = d.eig.E
    for i, j in [(0, 0), (1, 3), (4, 2)]:
        Ustar = np.outer(E[:, i], E[:, j])
        F = mat(dense_aux(N, 0.0) @ vec(Ustar), N - 1)
        U, rep = pgmres_2d(F, CurlCurlConfig(0.0), d.eig, d.S, d.M)
        assert rep.iterations <= 2


def test_galerkin_beats_l2_projection_in_energy_norm():
    # for kappa > 0 the Galerkin solution minimizes ||curl e||^2 + kappa ||e||^2
    P = smooth_2d()
    for N, kappa in [(12, 1.0), (20, 5.0)]:
        d = discretization(N)
        F = project_rhs_2d(P.source(kappa), N, gauss_legendre(3 * N))
        U, rep = pgmres_2d(F, CurlCurlConfig(kappa), d.eig, d.S, d.M)
        q = gauss_legendre(3 * N)
        eg = error_norms(U, P.u, P.curl, q)
        ep = error_norms(l2_project_2d(P.u, N, q), P.u, P.curl, q)
        energy = lambda e: e.curl ** 2 + kappa * e.l2 ** 2
        assert energy(eg) <= energy(ep) * (1 + 1e-10)


def test_var_operator_reduces_to_constant_case():
    N, Q = 16, 40
    d = discretization(N)
    V = np.random.default_rng(9).standard_normal((N - 1, N - 1))
    ref = apply_operator_2d(V, d.S, d.M, 2.5)
    out = apply_operator_var_2d(V, 1.0, 1.0, 2.5, gauss_legendre(Q))
    assert np.linalg.norm(out - ref) <= 1e-11 * np.linalg.norm(ref)
    out2 = VarCoeffOperator2D(N, lambda X, Y: np.ones_like(X), 1.0, 2.5, gauss_legendre(Q))(V)
    assert np.linalg.norm(out2 - ref) <= 1e-11 * np.linalg.norm(ref)


def _alpha(X, Y):
    return 1.5 + 0.5 * np.sin(X + 2 * Y)


def _beta(X, Y):
    return 2.0 + X * Y ** 2


def _beta_grad(X, Y):
    return Y ** 2, 2 * X * Y


def test_var_operator_matches_bruteforce_with_product_rule():
    N, Q = 6, 24
    A, _ = oracles.galerkin(oracles.basis_2d(N), 2, Q, kappa=0.7, alpha=_alpha, beta=_beta,
                            beta_grad=_beta_grad)
    op = VarCoeffOperator2D(N, _alpha, _beta, 0.7, gauss_legendre(Q), beta_grad=_beta_grad)
    V = np.random.default_rng(10).standard_normal((N - 1, N - 1))
    ref = A @ vec(V)
    assert np.linalg.norm(vec(op(V)) - ref) <= 1e-11 * np.linalg.norm(ref)


def test_var_operator_requires_beta_gradient():
    with pytest.raises(ValueError):
        VarCoeffOperator2D(6, 1.0, _beta, 0.0)


def test_pgmres_var_solves_the_variable_system():
    N = 14
    op = VarCoeffOperator2D(N, _alpha, 1.0, 20.0)
    F = np.random.default_rng(11).standard_normal((N - 1, N - 1))
    U, rep = pgmres_var_2d(F, CurlCurlConfig(20.0), op)
    assert rep.converged
    assert np.linalg.norm(op(U) - F) <= 1e-8 * np.linalg.norm(F)
