"""
A 3D Maxwell run
================

Two Gaussian currents at (0, 0, +-0.5) in vacuum. B stays divergence free
at every step because every basis function is.
"""
from pathlib import Path

from curlcurl import MaxwellConfig, run_maxwell_3d
from curlcurl.problems import two_point_current

cfg = MaxwellConfig(N=24, tau=0.02, T=0.4, J=two_point_current(0.05), snapshot_times=(0.4,),
                    snapshot_resolution=17)
run = run_maxwell_3d(cfg)
run.write(cfg, Path("runs/demo_maxwell_3d"))
print(f"iterations per step: {run.iterations}")
print(f"average {run.avg_iterations:.1f}, max div B {run.max_divB:.1e}, {run.wall_time:.1f} s")
