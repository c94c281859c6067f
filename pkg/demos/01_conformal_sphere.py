"""
Conformal map of a closed mesh onto the sphere
==============================================

Start from a geodesic sphere, map it conformally to the unit sphere and
measure how far the result is from conformal.
"""

import numpy as np

from qcsphere import fsqc_parameterize, icosphere, validate_genus0

# A level-4 icosphere has 5120 faces. The pipeline checks that the input
# is closed, oriented and genus 0 before doing anything else.
mesh = icosphere(4)
print(validate_genus0(mesh))

# K = 1 everywhere asks for a conformal map.
sph = fsqc_parameterize(mesh, 1.0)
print(sph.report.summary())

# Every output vertex lies on the unit sphere.
r = np.linalg.norm(sph.points, axis=1)
print(f"radius range: {r.min():.15f} .. {r.max():.15f}")

# The dilation histogram is concentrated just above 1.
for lo, hi, n in zip(sph.report.hist_edges[:-1], sph.report.hist_edges[1:],
                     sph.report.hist_counts):
    if n:
        print(f"  [{lo:.3f}, {hi:.3f})  {n}")
