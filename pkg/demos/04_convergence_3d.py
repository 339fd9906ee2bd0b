"""
The 3D solver
=============

Five families span the divergence-free space on the cube: two interior
families coupled through a 2x2 block and three face families that behave
like the 2D problem. Solve a manufactured 3D problem at a few orders.
"""
from curlcurl import CurlCurlConfig, error_norms, pgmres_3d, project_rhs_3d
from curlcurl.fields import divergence_max
from curlcurl.problems import smooth_3d

P = smooth_3d()
for kappa in (100.0, -100.0):
    for N in (8, 12, 16, 20):
        c, rep = pgmres_3d(project_rhs_3d(P.source(kappa), N), CurlCurlConfig(kappa))
        e = error_norms(c, P.u, P.curl)
        print(f"kappa {kappa:>6g} N {N:>2}: {rep.iterations:>2} iterations, "
              f"H(curl) error {e.hcurl:.2e}, max |div u| {divergence_max(c, 16):.1e}")
