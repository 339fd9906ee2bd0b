"""
Why so few iterations
=====================

A and its auxiliary counterpart agree on a subspace of dimension (N-3)^2
in 2D and 2(N-3)^3 in 3D, so the preconditioned matrix has eigenvalue 1
with that multiplicity. Assemble both densely at small N and check.
"""
import numpy as np

from curlcurl.spectra import (assemble_dense_2d, assemble_dense_3d_interior,
                              invariant_subspace_dim, null_witness_2d, preconditioned_spectrum)

# %% dimension of null(A - Atilde)
for N in (8, 12, 16, 24):
    dim = invariant_subspace_dim(assemble_dense_2d(N, -50.0))
    print(f"2D N={N:>2}: {dim:>4} = (N-3)^2 = {(N - 3) ** 2:>4} of {(N - 1) ** 2} unknowns")
for N in (5, 6, 7):
    dim = invariant_subspace_dim(assemble_dense_3d_interior(N, 1.0))
    print(f"3D N={N}: {dim:>4} = 2(N-3)^3 = {2 * (N - 3) ** 3:>4}")

# %% an explicit member: U = M V M with V supported on the leading block
N = 12
pair = assemble_dense_2d(N, 1.0)
w = null_witness_2d(N).ravel(order="F")
print("||(A - Atilde) w|| / ||A w|| =", np.linalg.norm((pair.A - pair.Atilde) @ w)
      / np.linalg.norm(pair.A @ w))

# %% the rest of the spectrum sits in a small cluster
eigs = preconditioned_spectrum(pair)
away = eigs[np.abs(eigs - 1) > 1e-8]
print(f"{eigs.size - away.size} eigenvalues at 1; the other {away.size} lie in "
      f"[{away.real.min():.3f}, {away.real.max():.3f}]")
