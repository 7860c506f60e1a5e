"""Quadratic maps, rotation numbers, orbits and inverse branches.

Everything downstream (rasters, backward orbits, ray lifting) is built on
the operations in this module.  All functions are pure; the dataclasses are
frozen and safe to share between workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConsistencyError, DomainError, InternalInconsistencyError

DEFAULT_ESCAPE_RADIUS = 1e3
ORBIT_STEP_RTOL = 1e-9
_CF_TERMINATION_EPS = 1e-12

GOLDEN_MEAN = (math.sqrt(5.0) - 1.0) / 2.0


# ---------------------------------------------------------------------------
# Continued fractions and rotation numbers
# ---------------------------------------------------------------------------

def _cf_expand(x, depth):
    """Partial quotients of x in (0,1); returns (quotients, terminated)."""
    if not (0.0 < x < 1.0):
        raise DomainError(f"continued-fraction input must lie in (0,1), got {x}")
    quotients = []
    rem = x
    terminated = False
    for _ in range(depth):
        rem = 1.0 / rem
        a = int(math.floor(rem))
        quotients.append(a)
        rem -= a
        if rem < _CF_TERMINATION_EPS:
            terminated = True
            break
    return quotients, terminated


def cf_expand(x, depth):
    """First `depth` continued-fraction partial quotients of x in (0,1).

    Stops early when the remainder vanishes (rational input, up to the
    double-precision termination threshold).
    """
    if depth < 1:
        raise DomainError("depth must be positive")
    quotients, _ = _cf_expand(x, depth)
    return quotients


def cf_convergents(quotients):
    """Numerators and denominators (p_k, q_k) of the convergents."""
    ps, qs = [], []
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    for a in quotients:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        ps.append(p)
        qs.append(q)
    return ps, qs


def cf_value(quotients):
    """Value of the finite continued fraction [0; a1, a2, ...]."""
    v = 0.0
    for a in reversed(list(quotients)):
        v = 1.0 / (a + v)
    return v


def is_bounded_type(quotients, bound):
    """True iff every partial quotient is <= bound.

    This is a truncation-depth approximation of the true bounded-type
    predicate: it only inspects the quotients that were computed.
    """
    if len(quotients) == 0:
        raise DomainError("quotient sequence must be nonempty")
    if bound < 1:
        raise DomainError("bound must be a positive integer")
    return all(a <= bound for a in quotients)


@dataclass(frozen=True)
class RotationNumber:
    """An irrational rotation number in (0,1) with its quotient prefix.

    `value` is the source of truth; `quotients` records the first
    `depth` partial quotients, with `terminated` set when the expansion
    stopped early (rational input).
    """

    value: float
    quotients: tuple
    terminated: bool = False

    @classmethod
    def from_value(cls, x, depth=30):
        # Depth ~30 is what double precision supports before the computed
        # quotients start to drift from the true expansion.
        quotients, terminated = _cf_expand(x, depth)
        return cls(value=float(x), quotients=tuple(quotients), terminated=terminated)

    @classmethod
    def golden(cls, depth=30):
        return cls.from_value(GOLDEN_MEAN, depth)

    def bounded_type(self, bound):
        return is_bounded_type(self.quotients, bound)


# ---------------------------------------------------------------------------
# Quadratic maps
# ---------------------------------------------------------------------------

SIEGEL_FORM = "siegel"
CENTERED_FORM = "centered"


@dataclass(frozen=True)
class QuadraticMap:
    """f(z) = lam*z + z^2 (siegel form) or f(z) = z^2 + c (centered form).

    For the siegel form, theta is the source of truth and lam = e^{2 pi i
    theta} is recomputed from it, so |lam| = 1 holds to machine precision.
    """

    form: str
    theta: float | None = None
    c: complex = 0j
    lam: complex = field(init=False, default=0j)

    def __post_init__(self):
        if self.form == SIEGEL_FORM:
            if self.theta is None:
                raise DomainError("siegel form requires theta")
            lam = complex(math.cos(2 * math.pi * self.theta),
                          math.sin(2 * math.pi * self.theta))
        elif self.form == CENTERED_FORM:
            lam = 0j
        else:
            raise DomainError(f"unknown map form {self.form!r}")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "c", complex(self.c))

    @classmethod
    def siegel(cls, theta):
        """Siegel-form map; theta may be a float or a RotationNumber."""
        if isinstance(theta, RotationNumber):
            theta = theta.value
        return cls(form=SIEGEL_FORM, theta=float(theta))

    @classmethod
    def centered(cls, c):
        return cls(form=CENTERED_FORM, c=complex(c))

    @property
    def critical_point(self):
        if self.form == SIEGEL_FORM:
            return -self.lam / 2.0
        return 0j

    @property
    def critical_value(self):
        return self(self.critical_point)

    def __call__(self, z):
        if self.form == SIEGEL_FORM:
            return self.lam * z + z * z
        return z * z + self.c

    def deriv(self, z):
        if self.form == SIEGEL_FORM:
            return self.lam + 2.0 * z
        return 2.0 * z

    def evaluate(self, z):
        """(f(z), f'(z)) in one call."""
        return self(z), self.deriv(z)

    def inverse_images(self, w):
        """The two solutions of f(z) = w as a length-2 complex array.

        Index 0 is the "+" branch (principal square root), index 1 the "-"
        branch.  The pair is coincident when w is the critical value.
        """
        if self.form == SIEGEL_FORM:
            s = np.sqrt(self.lam * self.lam + 4.0 * np.asarray(w, dtype=complex))
            return np.stack(((-self.lam + s) / 2.0, (-self.lam - s) / 2.0))
        s = np.sqrt(np.asarray(w, dtype=complex) - self.c)
        return np.stack((s, -s))


def evaluate(f, z):
    """Module-level alias for QuadraticMap.evaluate."""
    return f.evaluate(z)


def inverse_images(f, w):
    """Module-level alias for QuadraticMap.inverse_images."""
    return f.inverse_images(w)


# ---------------------------------------------------------------------------
# Orbits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitResult:
    """Forward orbit [z, f(z), ..., f^n(z)], possibly escape-truncated.

    `escaped_at` is the first index k with |f^k(z)| > escape_radius, or
    None when the full orbit stayed bounded.  Points after the escape
    index are not computed.
    """

    points: np.ndarray
    escaped_at: int | None

    @property
    def escaped(self):
        return self.escaped_at is not None

    def __len__(self):
        return len(self.points)


def forward_orbit(f, z, n, escape_radius=DEFAULT_ESCAPE_RADIUS):
    """Iterate f up to n times from z, stopping at escape."""
    pts = np.empty(n + 1, dtype=complex)
    pts[0] = z
    w = complex(z)
    for k in range(1, n + 1):
        if abs(w) > escape_radius:
            return OrbitResult(points=pts[:k], escaped_at=k - 1)
        w = f(w)
        pts[k] = w
    if abs(w) > escape_radius:
        return OrbitResult(points=pts, escaped_at=n)
    return OrbitResult(points=pts, escaped_at=None)


def escapes(f, z, max_iter, escape_radius=DEFAULT_ESCAPE_RADIUS):
    """True iff the orbit of z leaves |z| <= escape_radius within max_iter."""
    w = complex(z)
    r2 = escape_radius * escape_radius
    for _ in range(max_iter):
        if w.real * w.real + w.imag * w.imag > r2:
            return True
        w = f(w)
    return w.real * w.real + w.imag * w.imag > r2


# ---------------------------------------------------------------------------
# Point clouds with a uniform-grid bucket index
# ---------------------------------------------------------------------------

class PointCloud:
    """A finite set of complex points with fast nearest-neighbor lookup.

    The index is a uniform bucket grid over the bounding box; queries walk
    outward ring by ring until the found candidate is certified nearer
    than the next unexplored ring.
    """

    def __init__(self, points):
        pts = np.asarray(points, dtype=complex)
        if pts.size == 0:
            raise DomainError("point cloud must be nonempty")
        self.points = pts
        xs, ys = pts.real, pts.imag
        self._x0 = xs.min()
        self._y0 = ys.min()
        span_x = max(xs.max() - self._x0, 0.0)
        span_y = max(ys.max() - self._y0, 0.0)
        span = max(span_x, span_y, 1e-300)
        self._nb = max(1, int(math.sqrt(pts.size)))
        self._cell = span / self._nb
        ix = np.minimum((xs - self._x0) / self._cell, self._nb - 1).astype(np.int64)
        iy = np.minimum((ys - self._y0) / self._cell, self._nb - 1).astype(np.int64)
        key = iy * self._nb + ix
        order = np.argsort(key, kind="stable")
        self._order = order
        sorted_key = key[order]
        self._starts = np.searchsorted(sorted_key, np.arange(self._nb * self._nb))
        self._ends = np.searchsorted(sorted_key, np.arange(self._nb * self._nb), side="right")

    def __len__(self):
        return len(self.points)

    def _bucket(self, ix, iy):
        if ix < 0 or iy < 0 or ix >= self._nb or iy >= self._nb:
            return ()
        k = iy * self._nb + ix
        return self._order[self._starts[k]:self._ends[k]]

    def nearest(self, z):
        """(index, distance) of the nearest cloud point to z."""
        z = complex(z)
        cx = int((z.real - self._x0) / self._cell) if self._cell > 0 else 0
        cy = int((z.imag - self._y0) / self._cell) if self._cell > 0 else 0
        cx = min(max(cx, 0), self._nb - 1)
        cy = min(max(cy, 0), self._nb - 1)
        # Slack for queries outside the bounding box: distance from z to the
        # clamped center cell weakens the ring lower bound by that much.
        rx0 = self._x0 + cx * self._cell
        ry0 = self._y0 + cy * self._cell
        dx = max(rx0 - z.real, 0.0, z.real - (rx0 + self._cell))
        dy = max(ry0 - z.imag, 0.0, z.imag - (ry0 + self._cell))
        d_out = math.hypot(dx, dy)
        best_i, best_d = -1, math.inf
        for ring in range(2 * self._nb + 2):
            # Once a candidate is found, stop when the next ring cannot beat it.
            if best_i >= 0 and (ring - 1) * self._cell - d_out > best_d:
                break
            for ix, iy in _ring_cells(cx, cy, ring):
                if ix < 0 or iy < 0 or ix >= self._nb or iy >= self._nb:
                    continue
                for i in self._bucket(ix, iy):
                    d = abs(self.points[i] - z)
                    if d < best_d:
                        best_d, best_i = d, int(i)
        return best_i, best_d

    def nearest_brute(self, z):
        """Brute-force reference for nearest(); used by tests."""
        d = np.abs(self.points - complex(z))
        i = int(np.argmin(d))
        return i, float(d[i])

    def distance(self, z):
        return self.nearest(z)[1]

    def distances(self, zs):
        """Vectorized nearest distances for an array of query points."""
        zs = np.asarray(zs, dtype=complex)
        out = np.empty(zs.shape, dtype=float)
        flat = zs.ravel()
        flat_out = out.ravel()
        for i, z in enumerate(flat):
            flat_out[i] = self.nearest(z)[1]
        return out


def _ring_cells(cx, cy, ring):
    if ring == 0:
        yield cx, cy
        return
    for ix in range(cx - ring, cx + ring + 1):
        yield ix, cy - ring
        yield ix, cy + ring
    for iy in range(cy - ring + 1, cy + ring):
        yield cx - ring, iy
        yield cx + ring, iy


def postcritical_cloud(f, n, escape_radius=DEFAULT_ESCAPE_RADIUS):
    """Cloud of the first n forward images of the critical point.

    For the siegel form the critical orbit is bounded, so escape before n
    steps signals a bug and raises InternalInconsistencyError.  For the
    centered form the orbit is truncated at escape.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    orbit = forward_orbit(f, f.critical_point, n, escape_radius=escape_radius)
    if orbit.escaped and f.form == SIEGEL_FORM:
        raise InternalInconsistencyError(
            f"siegel critical orbit escaped at step {orbit.escaped_at}")
    return PointCloud(orbit.points[1:])


# ---------------------------------------------------------------------------
# Branch words and derivative chains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BranchWord:
    """Finite word over {+,-} selecting inverse images, one bit per step.

    Bit 0 is the "+" (principal) branch, bit 1 the "-" branch.
    """

    bits: tuple

    @classmethod
    def parse(cls, s):
        """Build from a string like '++-+' (or '0110')."""
        table = {"+": 0, "-": 1, "0": 0, "1": 1}
        try:
            return cls(bits=tuple(table[ch] for ch in s))
        except KeyError as exc:
            raise DomainError(f"bad branch symbol {exc.args[0]!r}") from exc

    @classmethod
    def from_int(cls, value, length):
        """Word of the given length from the binary digits of value."""
        return cls(bits=tuple((value >> k) & 1 for k in range(length)))

    def __len__(self):
        return len(self.bits)

    def __getitem__(self, k):
        return self.bits[k]

    def __str__(self):
        return "".join("+" if b == 0 else "-" for b in self.bits)


def check_orbit_consistency(f, points, rtol=ORBIT_STEP_RTOL):
    """Max residual of |f(z_{-k-1}) - z_{-k}|; raises on violation."""
    points = np.asarray(points, dtype=complex)
    residual = 0.0
    for k in range(len(points) - 1):
        r = abs(f(points[k + 1]) - points[k])
        tol = rtol * max(1.0, abs(points[k]))
        if r > tol:
            raise ConsistencyError(
                f"orbit inconsistent at backward step {k + 1}: residual {r:g}",
                index=k + 1)
        residual = max(residual, r)
    return residual


def derivative_chain(f, orbit):
    """|Df^n(z_{-n})| for n = 0..depth along a backward orbit.

    The n-th entry is the product of |f'| over z_{-1}, ..., z_{-n}; the
    0-th entry is 1.  Accepts a BackwardOrbit or a raw point sequence
    (z_0, z_{-1}, ...), which is consistency-checked first.
    """
    points = np.asarray(getattr(orbit, "points", orbit), dtype=complex)
    check_orbit_consistency(f, points)
    out = np.empty(len(points), dtype=float)
    out[0] = 1.0
    acc = 1.0
    for k in range(1, len(points)):
        acc *= abs(f.deriv(points[k]))
        out[k] = acc
    return out
