"""
Deepness of the golden-mean Siegel boundary
===========================================

For the golden rotation number, the boundary of the Siegel disk (the
postcritical set) is "measurably deep" in the filled Julia set: around a
boundary point x, the largest hole of the complement inside D(x, r)
shrinks faster than r, and the area density of K in D(x, r) climbs
toward 1 as r decreases.  This demo measures delta_x(r)/r and dens(K /
D(x, r)) at critical-orbit points over dyadic radii and fits the
power law 1 - dens ~ C * r^alpha.
"""

from nexlab import QuadraticMap, deepness_profile, distance_transform, \
    fill_raster, fit_power_law
from nexlab.dynamics import GOLDEN_MEAN
from nexlab.rays import critical_orbit

f = QuadraticMap.siegel(GOLDEN_MEAN)
print(f"map: z -> lam*z + z^2 with theta = {f.theta:.12f}")

raster = fill_raster(f, (-1.3, 2.0, -1.0, 1.6), 1024, 1000)
field = distance_transform(raster)
points = critical_orbit(f, 8)[:8]
radii = (0.2, 0.1, 0.05)

profiles = [deepness_profile(x, radii, raster, field) for x in points]
print(f"{'x':>22s}  " + "  ".join(f"dens(r={r:g})" for r in radii))
for p in profiles:
    cells = "  ".join(f"{d:11.4f}" for d in p.density)
    print(f"{p.x.real:10.4f}{p.x.imag:+.4f}j  {cells}")

fit = fit_power_law(profiles)
print(f"\npooled fit: 1 - dens ~ {fit.C:.3f} * r^{fit.alpha:.3f} "
      f"({fit.points_used} points, residual {fit.residual:.3f})")
print("alpha > 0 is the numerical signature of measurable deepness.")
