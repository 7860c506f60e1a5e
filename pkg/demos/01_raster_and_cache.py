"""
Rasterize a filled Julia set and round-trip the binary cache
============================================================

The escape-time raster marks a cell "inside" when its center stays
bounded for max_iter iterations — an over-approximation of the filled
Julia set that shrinks as max_iter grows.  The NEXR1 cache stores the
bit-packed mask with its window and parameters; a write/read cycle is
bit-exact.
"""

import os
import tempfile

import numpy as np

from nexlab import QuadraticMap, fill_raster, load_raster, save_raster, \
    write_pgm

# The basilica: c = -1, a superattracting 2-cycle 0 -> -1 -> 0.
f = QuadraticMap.centered(-1)
raster = fill_raster(f, window=(-2, 2, -1.5, 1.5), resolution=(512, 384),
                     max_iter=300)
print(f"inside fraction: {raster.inside_fraction():.4f}")
print(f"cell size:       {raster.cell_size:.5f}")

out = tempfile.mkdtemp(prefix="nexlab_demo_")
path = os.path.join(out, "basilica.nexr")
save_raster(path, raster)
back = load_raster(path)
assert np.array_equal(back.inside, raster.inside)
print(f"NEXR1 round-trip bit-exact: {os.path.getsize(path)} bytes")

write_pgm(os.path.join(out, "basilica.pgm"), raster)
print(f"artifacts in {out}")
