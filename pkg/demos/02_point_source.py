"""
Indefinite problems with a point source
=======================================

Drive the 2D problem with the curl of two narrow Gaussians and make kappa
strongly negative. The solution becomes highly oscillatory, yet the
iteration count stays small and does not grow with N.
"""
from pathlib import Path

import numpy as np

from curlcurl import CurlCurlConfig, discretization, pgmres_2d, project_rhs_2d
from curlcurl.fields import GridSnapshot, divergence_max, evaluate_field_2d
from curlcurl.problems import point_source_2d

out = Path("runs/demo_point_source")
f = point_source_2d(sigma=0.01)

# %% one order, several kappa; a 201^2 snapshot of u1 for each
N = 128
d = discretization(N)
F = project_rhs_2d(f, N)
x = np.linspace(-1, 1, 201)
for kappa in (-100.0, -400.0, -2500.0, -10000.0):
    U, rep = pgmres_2d(F, CurlCurlConfig(kappa), d.eig, d.S, d.M)
    u, _ = evaluate_field_2d(U, x)
    GridSnapshot((x, x), u[:1], {"N": N, "kappa": kappa}).write(out / f"u1_kappa{-kappa:g}")
    print(f"kappa {kappa:>8g}: {rep.iterations:3d} iterations, "
          f"max |div u| {divergence_max(U):.1e}, max |u1| {np.abs(u[0]).max():.3f}")

# %% iterations versus N at kappa = -10000
for N in (120, 160, 240, 320):
    d = discretization(N)
    U, rep = pgmres_2d(project_rhs_2d(f, N), CurlCurlConfig(-10000.0), d.eig, d.S, d.M)
    print(f"N = {N}: {rep.iterations} iterations ({rep.wall_time:.2f} s)")
