import json

import numpy as np
import pytest

from curlcurl.solver2d import ResonanceError, discretization
from curlcurl.spectra import (MAX_N_2D, MAX_N_3D, assemble_dense_2d, assemble_dense_3d_interior,
                              invariant_subspace_dim, null_witness_2d, null_witness_3d,
                              preconditioned_spectrum, write_spectrum)

import oracles


def vec(U):
    return np.asarray(U).ravel(order="F")


def test_dense_2d_matches_bruteforce():
    N = 7
    A, _ = oracles.galerkin(oracles.basis_2d(N), 2, N + 2, kappa=-2.5)
    pair = assemble_dense_2d(N, -2.5)
    np.testing.assert_allclose(pair.A, A, atol=1e-11 * np.abs(A).max())
    assert pair.dim == 2 and pair.N == N


def test_dense_3d_interior_matches_bruteforce():
    N = 4
    A, _ = oracles.galerkin(oracles.basis_3d(N), 3, N + 2, kappa=1.5)
    n = 2 * (N - 1) ** 3
    pair = assemble_dense_3d_interior(N, 1.5)
    np.testing.assert_allclose(pair.A, A[:n, :n], atol=1e-11 * np.abs(A).max())


@pytest.mark.parametrize("N", [6, 8, 12])
@pytest.mark.parametrize("kappa", [1.0, -100.0])
def test_invariant_subspace_dimension_2d(N, kappa):
    assert invariant_subspace_dim(assemble_dense_2d(N, kappa)) == (N - 3) ** 2


@pytest.mark.parametrize("N", [5, 6])
def test_invariant_subspace_dimension_3d(N):
    assert invariant_subspace_dim(assemble_dense_3d_interior(N, 2.0)) == 2 * (N - 3) ** 3


def test_null_witnesses_satisfy_A_equals_Atilde():
    N = 9
    pair = assemble_dense_2d(N, 7.0)
    w = vec(null_witness_2d(N, seed=1))
    assert np.linalg.norm((pair.A - pair.Atilde) @ w) <= 1e-12 * np.linalg.norm(pair.A @ w)
    N = 6
    pair = assemble_dense_3d_interior(N, 7.0)
    w = np.concatenate([vec(c) for c in null_witness_3d(N, seed=2)])
    assert np.linalg.norm((pair.A - pair.Atilde) @ w) <= 1e-12 * np.linalg.norm(pair.A @ w)


def test_spectrum_clusters_at_one():
    N = 12
    eigs = preconditioned_spectrum(assemble_dense_2d(N, 1.0))
    assert eigs.size == (N - 1) ** 2
    assert np.abs(eigs.imag).max() < 1e-10
    at_one = np.abs(eigs - 1) < 1e-8
    assert at_one.sum() >= (N - 3) ** 2
    assert np.all(np.diff(eigs.real) >= 0)


def test_resonant_auxiliary_raises():
    N = 8
    d = discretization(N).eig.d
    with pytest.raises(ResonanceError):
        preconditioned_spectrum(assemble_dense_2d(N, -(1 / d[1] + 1 / d[3])))


def test_capacity_guards():
    with pytest.raises(MemoryError):
        assemble_dense_2d(MAX_N_2D + 1, 1.0)
    with pytest.raises(MemoryError):
        assemble_dense_3d_interior(MAX_N_3D + 1, 1.0)


def test_write_spectrum(tmp_path):
    N = 6
    pair = assemble_dense_2d(N, 1.0)
    eigs = preconditioned_spectrum(pair)
    summary = write_spectrum(tmp_path / "spectrum", eigs, pair)
    data = np.loadtxt(tmp_path / "spectrum.csv", delimiter=",", skiprows=1)
    np.testing.assert_array_equal(data[:, 0], eigs.real)
    meta = json.loads((tmp_path / "spectrum.json").read_text())
    assert meta["dim_eig1"] == 9 and meta["N"] == 6 and meta == summary
    assert meta["fraction_at_1"] == pytest.approx((N - 3) ** 2 / (N - 1) ** 2)
