"""Distance transforms and the deepness/density functionals on rasters.

delta(x, r) is the radius of the largest open disk inside D(x, r) minus
the rasterized set; density(x, r) is the area fraction of D(x, r) covered
by the set.  Both are evaluated on cell centers, so all tolerances are
naturally expressed in cell sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import DomainError, FitError, ResolutionError

DENSITY_LOG_CUTOFF = 1e-6  # 1-dens below this is excluded from power-law fits


# ---------------------------------------------------------------------------
# Exact Euclidean distance transform (two-pass parabola envelope)
# ---------------------------------------------------------------------------

@njit(cache=True)
def _edt_1d(f, w2):
    """Exact 1D squared-distance transform of a sampled function.

    Lower envelope of the parabolas q -> f[q] + w2*(p-q)^2.  With integer
    f and w2 = 1 every arithmetic result is an exact small integer in
    float64, so the transform is exact.
    """
    n = f.size
    d = np.empty(n)
    v = np.empty(n, dtype=np.int64)
    z = np.empty(n + 1)
    k = 0
    v[0] = 0
    z[0] = -np.inf
    z[1] = np.inf
    for q in range(1, n):
        if f[q] == np.inf:
            continue
        if f[v[0]] == np.inf:
            v[0] = q
            continue
        s = ((f[q] + w2 * q * q) - (f[v[k]] + w2 * v[k] * v[k])) \
            / (2.0 * w2 * (q - v[k]))
        while s <= z[k]:
            k -= 1
            s = ((f[q] + w2 * q * q) - (f[v[k]] + w2 * v[k] * v[k])) \
                / (2.0 * w2 * (q - v[k]))
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = np.inf
    k = 0
    for p in range(n):
        while z[k + 1] < p:
            k += 1
        d[p] = w2 * (p - v[k]) * (p - v[k]) + f[v[k]]
    return d


@njit(cache=True)
def _edt_sq(mask, wx, wy):
    """Squared Euclidean distance to the nearest True cell.

    wx, wy are the per-axis cell extents.  Cells marked True get 0; a
    mask with no True cell yields +inf everywhere.
    """
    h, w = mask.shape
    g = np.empty((h, w))
    # Pass 1: along columns (y axis, weight wy).
    col = np.empty(h)
    for j in range(w):
        for i in range(h):
            col[i] = 0.0 if mask[i, j] else np.inf
        has_any = False
        for i in range(h):
            if mask[i, j]:
                has_any = True
                break
        if has_any:
            dcol = _edt_1d(col, wy * wy)
            for i in range(h):
                g[i, j] = dcol[i]
        else:
            for i in range(h):
                g[i, j] = np.inf
    # Pass 2: along rows (x axis, weight wx).
    out = np.empty((h, w))
    row = np.empty(w)
    for i in range(h):
        all_inf = True
        for j in range(w):
            row[j] = g[i, j]
            if row[j] != np.inf:
                all_inf = False
        if all_inf:
            for j in range(w):
                out[i, j] = np.inf
        else:
            drow = _edt_1d(row, wx * wx)
            for j in range(w):
                out[i, j] = drow[j]
    return out


def edt_squared(mask, wx=1.0, wy=1.0):
    """Exact squared distances (in plane units) to the nearest True cell."""
    mask = np.ascontiguousarray(mask, dtype=bool)
    return _edt_sq(mask, float(wx), float(wy))


def edt_squared_brute(mask, wx=1.0, wy=1.0):
    """O(n^2) reference distance transform; tests only."""
    h, w = mask.shape
    ii, jj = np.nonzero(mask)
    out = np.full((h, w), np.inf)
    if ii.size == 0:
        return out
    for i in range(h):
        for j in range(w):
            d2 = (wy * (ii - i)) ** 2 + (wx * (jj - j)) ** 2
            out[i, j] = d2.min()
    return out


@dataclass(frozen=True)
class DistanceField:
    """Per-cell Euclidean distance (plane units) to the nearest inside cell.

    Shares the grid of the raster it was built from.  `dist` is +inf
    everywhere when the raster has no inside cell.
    """

    raster: object
    dist: np.ndarray

    @property
    def window(self):
        return self.raster.window


def distance_transform(raster):
    """Exact Euclidean distance transform of a raster's inside mask."""
    sq = edt_squared(raster.inside, raster.cell_w, raster.cell_h)
    dist = np.sqrt(sq)
    dist.setflags(write=False)
    return DistanceField(raster=raster, dist=dist)


# ---------------------------------------------------------------------------
# delta and density
# ---------------------------------------------------------------------------

class DeltaValue(float):
    """delta value with a flag marking queries clipped by the window."""

    clipped = False

    def __new__(cls, value, clipped=False):
        obj = super().__new__(cls, value)
        obj.clipped = clipped
        return obj


def _disk_cells(raster, x, r):
    """Row/col index slices of the bounding box of D(x, r), clamped."""
    x = complex(x)
    xmin, _, ymin, _ = raster.window
    cw, ch = raster.cell_w, raster.cell_h
    j0 = max(int(math.floor((x.real - r - xmin) / cw)) - 1, 0)
    j1 = min(int(math.ceil((x.real + r - xmin) / cw)) + 1, raster.width)
    i0 = max(int(math.floor((x.imag - r - ymin) / ch)) - 1, 0)
    i1 = min(int(math.ceil((x.imag + r - ymin) / ch)) + 1, raster.height)
    return i0, i1, j0, j1


def delta(x, r, field):
    """Radius of the largest open disk in D(x, r) minus the rasterized set.

    Evaluates max over cell centers y in D(x, r) of
    min(d(y, K), r - |y - x|); zero when the disk is entirely inside.
    A query disk leaving the window sets the `clipped` flag on the result.
    """
    if r <= 0:
        raise DomainError("r must be positive")
    raster = field.raster
    x = complex(x)
    clipped = not raster.contains_disk(x, r)
    i0, i1, j0, j1 = _disk_cells(raster, x, r)
    if i0 >= i1 or j0 >= j1:
        return DeltaValue(0.0 if not np.isinf(field.dist).all() else r,
                          clipped=True)
    xs = raster.centers_x()[j0:j1]
    ys = raster.centers_y()[i0:i1]
    dx = xs[None, :] - x.real
    dy = ys[:, None] - x.imag
    rho = np.hypot(dx, dy)
    sel = rho <= r
    if not sel.any():
        # Disk thinner than a cell: fall back to the cell containing x.
        row, col = raster.cell_of(x)
        d = field.dist[row, col]
        return DeltaValue(min(d, r) if np.isfinite(d) else r, clipped=clipped)
    vals = np.minimum(field.dist[i0:i1, j0:j1][sel], r - rho[sel])
    best = float(vals.max())
    return DeltaValue(max(best, 0.0), clipped=clipped)


def delta_brute(x, r, raster):
    """Brute-force delta over all cells of the raster; tests only."""
    if r <= 0:
        raise DomainError("r must be positive")
    x = complex(x)
    ii, jj = np.nonzero(raster.inside)
    cx = raster.window[0] + (jj + 0.5) * raster.cell_w
    cy = raster.window[2] + (ii + 0.5) * raster.cell_h
    inside_pts = cx + 1j * cy
    xs = raster.centers_x()
    ys = raster.centers_y()
    best = 0.0
    for i in range(raster.height):
        for j in range(raster.width):
            y = complex(xs[j], ys[i])
            rho = abs(y - x)
            if rho > r:
                continue
            if inside_pts.size:
                d = np.abs(inside_pts - y).min()
            else:
                d = np.inf
            best = max(best, min(d, r - rho))
    return best


def density(x, r, raster, coverage=None):
    """Area fraction of D(x, r) covered by inside cells.

    Cells crossing the circle are weighted by a 4x4 subsample of the disk
    indicator; fully covered/uncovered cells are counted analytically.
    The denominator is the discretized disk area built from the same
    weights, so the result is always in [0, 1].  `coverage` optionally
    replaces the binary mask with per-cell coverage fractions (see
    raster.fill_coverage) for faster convergence in resolution.
    """
    if r <= 0:
        raise DomainError("r must be positive")
    raster = getattr(raster, "raster", raster)
    if r < raster.cell_size:
        raise ResolutionError(
            f"r = {r:g} is below one cell ({raster.cell_size:g})")
    x = complex(x)
    i0, i1, j0, j1 = _disk_cells(raster, x, r)
    xs = raster.centers_x()[j0:j1]
    ys = raster.centers_y()[i0:i1]
    dx = xs[None, :] - x.real
    dy = ys[:, None] - x.imag
    rho = np.hypot(dx, dy)
    half_diag = 0.5 * math.hypot(raster.cell_w, raster.cell_h)
    weights = np.zeros_like(rho)
    weights[rho <= r - half_diag] = 1.0
    boundary = (rho > r - half_diag) & (rho < r + half_diag)
    if boundary.any():
        bi, bj = np.nonzero(boundary)
        # 4x4 subsample offsets within a cell, in cell units.
        off = (np.arange(4) + 0.5) / 4.0 - 0.5
        ox = off * raster.cell_w
        oy = off * raster.cell_h
        sx = xs[bj][:, None, None] + ox[None, None, :]
        sy = ys[bi][:, None, None] + oy[None, :, None]
        inside_disk = (sx - x.real) ** 2 + (sy - x.imag) ** 2 <= r * r
        weights[bi, bj] = inside_disk.reshape(len(bi), 16).mean(axis=1)
    total = weights.sum()
    if total == 0.0:
        raise ResolutionError("query disk covers no cells")
    mask = raster.inside if coverage is None else coverage
    covered = (weights * mask[i0:i1, j0:j1]).sum()
    return float(covered / total)


# ---------------------------------------------------------------------------
# Profiles and power-law fits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeepnessProfile:
    """Per-radius delta_x(r)/r and dens(K / D(x, r)) at one center."""

    x: complex
    radii: tuple
    delta_over_r: tuple
    density: tuple
    clipped: tuple

    def as_rows(self):
        """(x_re, x_im, r, delta_over_r, density) rows for CSV export."""
        return [(self.x.real, self.x.imag, r, d, q)
                for r, d, q in zip(self.radii, self.delta_over_r, self.density)]


def deepness_profile(x, radii, raster, field, coverage=None):
    """DeepnessProfile of x over a decreasing schedule of radii."""
    radii = [float(r) for r in radii]
    if any(b >= a for a, b in zip(radii, radii[1:])):
        raise DomainError("radii must be strictly decreasing")
    if radii and radii[-1] < 2 * raster.cell_size:
        raise ResolutionError("smallest radius is below two cells")
    dvals, qvals, cvals = [], [], []
    for r in radii:
        dv = delta(x, r, field)
        dvals.append(min(float(dv) / r, 1.0))
        qvals.append(density(x, r, raster, coverage=coverage))
        cvals.append(dv.clipped)
    return DeepnessProfile(x=complex(x), radii=tuple(radii),
                           delta_over_r=tuple(dvals), density=tuple(qvals),
                           clipped=tuple(cvals))


@dataclass(frozen=True)
class PowerLawFit:
    """Fit of dens = 1 - C * r^alpha in log space (pooled over profiles)."""

    C: float
    alpha: float
    residual: float
    points_used: int


def fit_power_law(profiles):
    """Least-squares fit of log(1-dens) against log r, pooled.

    Points with 1-dens below the cutoff are excluded (log singularity).
    """
    log_r, log_gap = [], []
    for p in profiles:
        for r, q in zip(p.radii, p.density):
            gap = 1.0 - q
            if gap > DENSITY_LOG_CUTOFF:
                log_r.append(math.log(r))
                log_gap.append(math.log(gap))
    if len(log_r) < 2:
        raise FitError(f"only {len(log_r)} usable points, need >= 2")
    A = np.vstack([log_r, np.ones(len(log_r))]).T
    coef, _, _, _ = np.linalg.lstsq(A, np.array(log_gap), rcond=None)
    alpha, logc = float(coef[0]), float(coef[1])
    resid = np.array(log_gap) - A @ coef
    rms = float(np.sqrt(np.mean(resid ** 2)))
    return PowerLawFit(C=math.exp(logc), alpha=alpha, residual=rms,
                       points_used=len(log_r))
