"""
Pullback tubes and univalence along backward orbits
===================================================

Around a backward orbit, pull a disk boundary back step by step: each
step is univalent exactly when the previous curve does not wind around
the critical value.  A disk centered at the critical value itself fails
immediately; a small disk along an orbit that stays away from the
critical point pulls back univalently for many steps.  The regularity
probe runs this over a schedule of radii — truncated evidence for the
regularity of a point of the natural extension, never a certification.
"""

import numpy as np

from nexlab import BackwardOrbit, QuadraticMap, pullback_tube, \
    regularity_probe
from nexlab.dynamics import GOLDEN_MEAN

f = QuadraticMap.centered(-1)
v = f(f.critical_point)
print(f"critical value of the basilica: {v}")

# Disk centered at the critical value: depth 1 is nonunivalent for any
# radius — the boundary circle winds once around v.
pre = f.inverse_images(v)[0]
orbit = BackwardOrbit.from_points(f, np.array([v, pre]),
                                  strategy="explicit-word")
tube = pullback_tube(f, orbit, R0=0.3)
print(f"disk at critical value: first nonunivalent depth = "
      f"{tube.first_nonunivalent}")

# Constant orbit at the repelling fixed point of the golden Siegel map:
# pullbacks of small disks stay univalent over the whole truncation.
g = QuadraticMap.siegel(GOLDEN_MEAN)
beta = 1.0 - g.lam
orbit = BackwardOrbit.from_points(g, np.full(51, beta),
                                  strategy="explicit-word")
probe = regularity_probe(g, orbit, (0.2, 0.1, 0.05))
print(f"\nrepelling fixed point beta = {beta:.6f}, depth 50 probe:")
for r in probe.radii:
    fail = probe.first_failures[r]
    print(f"  radius {r:5.2f}: first nonunivalent depth = {fail}")
print(f"largest fully univalent radius: {probe.max_univalent_radius}")
print("(evidence over the truncation only)")
