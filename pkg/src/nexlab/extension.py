"""Backward orbits, pullback tubes, and leaf-type diagnostics.

A pullback tube tracks the boundary of a base disk through successive
inverse branches by continuation of the sampled boundary polygon; the
univalence of each step is decided by the winding number of the previous
polygon around the critical value.  Reports produced here are truncated
evidence, never proofs: a finite probe cannot certify the infinite tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .deepness import delta as _delta
from .dynamics import (BranchWord, DEFAULT_ESCAPE_RADIUS, PointCloud,
                       check_orbit_consistency, derivative_chain, escapes)
from .errors import DomainError, StrategyStuckError

AMBIGUITY_RTOL = 1e-3      # candidates closer than this (x local step) stop a tube
KOEBE_TOL = 1e-2           # slack on the quarter-theorem inequality
DEFAULT_SAMPLES = 256

STRATEGY_EXPLICIT = "explicit-word"
STRATEGY_RANDOM = "random"
STRATEGY_TOWARD_TARGET = "toward-target"
STRATEGY_OUTSIDE_K = "outside-K-nearest-boundary"


# ---------------------------------------------------------------------------
# Backward orbits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BackwardOrbit:
    """Truncated backward orbit (z_0, z_{-1}, ..., z_{-N}) with its word.

    `residual` is the max forward-consistency defect over the steps.
    """

    points: np.ndarray
    word: BranchWord
    strategy: str
    residual: float

    @property
    def depth(self):
        return len(self.points) - 1

    @property
    def z0(self):
        return complex(self.points[0])

    @classmethod
    def from_points(cls, f, points, strategy="explicit-word", word=None):
        """Wrap an explicit point sequence, checking consistency.

        The branch word is reconstructed from which inverse image each
        step matches when not given.
        """
        points = np.asarray(points, dtype=complex)
        residual = check_orbit_consistency(f, points)
        if word is None:
            bits = []
            for k in range(len(points) - 1):
                pair = f.inverse_images(points[k])
                bits.append(int(np.argmin(np.abs(pair - points[k + 1]))))
            word = BranchWord(bits=tuple(bits))
        return cls(points=points, word=word, strategy=strategy,
                   residual=residual)


def extend_backward(f, z0, strategy, depth, *, word=None, target=None,
                    cloud=None, rng=None, max_iter=1000,
                    escape_radius=DEFAULT_ESCAPE_RADIUS):
    """Build a backward orbit of the given depth from z0.

    Strategies:
      explicit-word            follow the given BranchWord bits
      random                   fair coin per step (rng required)
      toward-target            preimage closer to `target`
      outside-K-nearest-boundary
          among the preimages whose forward orbit escapes (certifying
          membership in the complement of K), pick the one closer to the
          boundary `cloud`; StrategyStuckError when neither escapes.
    """
    z0 = complex(z0)
    points = [z0]
    bits = []
    for k in range(depth):
        pair = f.inverse_images(points[-1])
        if strategy == STRATEGY_EXPLICIT:
            if word is None or len(word) < depth:
                raise DomainError("explicit-word strategy needs a word of full depth")
            bit = word[k]
        elif strategy == STRATEGY_RANDOM:
            if rng is None:
                raise DomainError("random strategy needs an rng")
            bit = int(rng.integers(2))
        elif strategy == STRATEGY_TOWARD_TARGET:
            if target is None:
                raise DomainError("toward-target strategy needs a target")
            bit = int(np.argmin(np.abs(pair - complex(target))))
        elif strategy == STRATEGY_OUTSIDE_K:
            if cloud is None:
                raise DomainError("outside-K strategy needs a boundary cloud")
            esc = [escapes(f, pair[i], max_iter, escape_radius) for i in (0, 1)]
            if esc[0] and esc[1]:
                d0 = cloud.distance(pair[0])
                d1 = cloud.distance(pair[1])
                bit = 0 if d0 <= d1 else 1
            elif esc[0] or esc[1]:
                bit = 0 if esc[0] else 1
            else:
                partial = BackwardOrbit(
                    points=np.asarray(points, dtype=complex),
                    word=BranchWord(bits=tuple(bits)), strategy=strategy,
                    residual=0.0)
                raise StrategyStuckError(
                    f"neither preimage escapes at depth {k + 1}",
                    partial_orbit=partial, depth=k + 1)
        else:
            raise DomainError(f"unknown strategy {strategy!r}")
        points.append(complex(pair[bit]))
        bits.append(bit)
    points = np.asarray(points, dtype=complex)
    residual = check_orbit_consistency(f, points)
    return BackwardOrbit(points=points, word=BranchWord(bits=tuple(bits)),
                         strategy=strategy, residual=residual)


# ---------------------------------------------------------------------------
# Winding numbers
# ---------------------------------------------------------------------------

def winding_number(polygon, p):
    """Winding number of a closed polygon around p (crossing count).

    Vertices are taken cyclically; the standard signed horizontal-ray
    crossing rule makes the result exact for p off the edges.
    """
    v = np.asarray(polygon, dtype=complex) - complex(p)
    x, y = v.real, v.imag
    x2, y2 = np.roll(x, -1), np.roll(y, -1)
    up = (y <= 0) & (y2 > 0)
    down = (y > 0) & (y2 <= 0)
    cross = x * y2 - x2 * y  # > 0 when p is left of the edge
    return int(np.sum(up & (cross > 0)) - np.sum(down & (cross < 0)))


# ---------------------------------------------------------------------------
# Pullback tubes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PullbackTube:
    """Boundary polylines of the pullback of D(z0, R0) along an orbit.

    polylines[n] samples the boundary of the depth-n component; the
    univalent flag of step n (1-based) records whether the depth-(n-1)
    polygon winds zero times around the critical value.  Depths past the
    first nonunivalent step are still continued but flagged untrusted.
    """

    z0: complex
    R0: float
    samples: int
    polylines: np.ndarray          # shape (depth_reached + 1, P)
    univalent: np.ndarray          # shape (depth_reached,), per step
    first_nonunivalent: int | None
    ambiguous_at: int | None = None

    @property
    def depth(self):
        return len(self.polylines) - 1

    def trusted(self, n):
        """True when depth n lies before any nonunivalent step."""
        return self.first_nonunivalent is None or n < self.first_nonunivalent

    def to_jsonable(self):
        return {
            "schema": "nexlab.tube/1",
            "z0": [self.z0.real, self.z0.imag],
            "R0": self.R0,
            "samples": self.samples,
            "depth": self.depth,
            "univalent": [bool(u) for u in self.univalent],
            "first_nonunivalent": self.first_nonunivalent,
            "ambiguous_at": self.ambiguous_at,
        }


def _continue_polyline(f, prev, anchor, ambiguity_rtol=AMBIGUITY_RTOL):
    """One backward continuation step of a sampled boundary polygon.

    Each sample goes to the inverse image nearest its neighbor's
    continuation; the first sample is anchored at the orbit point.
    Returns (new_polyline or None, ambiguous_index or None).
    """
    pairs = f.inverse_images(prev)  # shape (2, P)
    P = prev.size
    new = np.empty(P, dtype=complex)
    ref = complex(anchor)
    for j in range(P):
        c0, c1 = pairs[0, j], pairs[1, j]
        d0, d1 = abs(c0 - ref), abs(c1 - ref)
        step = abs(prev[j] - prev[j - 1])
        if abs(d0 - d1) <= ambiguity_rtol * max(step, 1e-300):
            return None, j
        new[j] = c0 if d0 < d1 else c1
        ref = new[j]
    return new, None


def pullback_tube(f, orbit, R0, samples=DEFAULT_SAMPLES):
    """Pull the boundary circle of D(z0, R0) back along the orbit.

    Step n is univalent iff the depth-(n-1) polygon does not wind around
    the critical value.  On continuation ambiguity the tube is truncated
    with `ambiguous_at` set.
    """
    if samples < 64:
        raise DomainError("need at least 64 boundary samples")
    if R0 <= 0:
        raise DomainError("R0 must be positive")
    z0 = complex(orbit.points[0])
    angles = 2.0 * np.pi * np.arange(samples) / samples
    polylines = [z0 + R0 * np.exp(1j * angles)]
    univalent = []
    first_bad = None
    ambiguous_at = None
    cv = f.critical_value
    for n in range(1, orbit.depth + 1):
        prev = polylines[-1]
        ok = winding_number(prev, cv) == 0
        univalent.append(ok)
        if not ok and first_bad is None:
            first_bad = n
        new, amb = _continue_polyline(f, prev, orbit.points[n])
        if new is None:
            ambiguous_at = n
            break
        polylines.append(new)
    return PullbackTube(z0=z0, R0=float(R0), samples=samples,
                        polylines=np.asarray(polylines),
                        univalent=np.asarray(univalent, dtype=bool),
                        first_nonunivalent=first_bad,
                        ambiguous_at=ambiguous_at)


@dataclass(frozen=True)
class RegularityProbe:
    """Truncated-evidence univalence summary over a radius schedule.

    `max_univalent_radius` is the largest tested radius whose tube is
    univalent at every step past the allowed prefix, or None.  This is
    evidence over the truncation only, never a proof of regularity or of
    irregularity.
    """

    radii: tuple
    first_failures: dict
    allowed_prefix: int
    max_univalent_radius: float | None


def regularity_probe(f, orbit, radii, samples=DEFAULT_SAMPLES,
                     allowed_prefix=0):
    """Probe tube univalence over decreasing radii.

    first_failures maps each radius to the first nonunivalent depth past
    the allowed prefix (None when fully univalent over the truncation).
    """
    radii = [float(r) for r in radii]
    failures = {}
    best = None
    for r in radii:
        tube = pullback_tube(f, orbit, r, samples)
        bad = None
        for n, ok in enumerate(tube.univalent, start=1):
            if n <= allowed_prefix:
                continue
            if not ok:
                bad = n
                break
        failures[r] = bad
        if bad is None and tube.ambiguous_at is None:
            if best is None or r > best:
                best = r
    return RegularityProbe(radii=tuple(radii), first_failures=failures,
                           allowed_prefix=allowed_prefix,
                           max_univalent_radius=best)


# ---------------------------------------------------------------------------
# Leaf-type reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LeafTypeReport:
    """Per-depth expansion/geometry record along a backward orbit.

    R[n] is the distance of z_{-n} to the boundary cloud, D[n] the
    absolute derivative of the n-fold composition at z_{-n}, v[n] its
    reciprocal, product[n] = R[n]*D[n] (the divergence diagnostic), and
    ratio[n] = v[n]/R[n].  koebe_ok is evaluated only at depths whose
    tube is univalent so far; witness fields are filled when a distance
    field is supplied.
    """

    orbit: BackwardOrbit
    R0: float
    R: np.ndarray
    D: np.ndarray
    v: np.ndarray
    product: np.ndarray
    ratio: np.ndarray
    univalent: np.ndarray
    koebe_ok: np.ndarray            # only meaningful where univalent
    s: float
    witness_delta: np.ndarray | None      # delta_{x_n}(2 R_n) on the raster
    witness_bound: np.ndarray | None      # s * R0 * v_n / 4
    witness_ok: np.ndarray | None
    max_product: float = field(init=False, default=0.0)
    min_ratio: float = field(init=False, default=0.0)
    monotone_run: int = field(init=False, default=0)

    def __post_init__(self):
        object.__setattr__(self, "max_product", float(self.product.max()))
        object.__setattr__(self, "min_ratio", float(self.ratio.min()))
        object.__setattr__(self, "monotone_run",
                           _longest_nondecreasing(self.product))

    @property
    def depth(self):
        return len(self.R) - 1

    def to_jsonable(self, meta=None):
        out = {
            "schema": "nexlab.leaf_report/1",
            "depth": self.depth,
            "R0": self.R0,
            "s": self.s,
            "R": list(map(float, self.R)),
            "D": list(map(float, self.D)),
            "v": list(map(float, self.v)),
            "product": list(map(float, self.product)),
            "ratio": list(map(float, self.ratio)),
            "univalent": [bool(u) for u in self.univalent],
            "koebe_ok": [bool(u) for u in self.koebe_ok],
            "verdict": {
                "max_product": self.max_product,
                "min_ratio": self.min_ratio,
                "monotone_run": self.monotone_run,
            },
        }
        if self.witness_delta is not None:
            out["witness_delta"] = list(map(float, self.witness_delta))
            out["witness_bound"] = list(map(float, self.witness_bound))
            out["witness_ok"] = [bool(u) for u in self.witness_ok]
        if meta:
            out["meta"] = meta
        return out

    def csv_rows(self):
        """One row per depth: n, R, D, v, product, ratio, univalent, koebe."""
        rows = []
        for n in range(len(self.R)):
            rows.append((n, float(self.R[n]), float(self.D[n]),
                         float(self.v[n]), float(self.product[n]),
                         float(self.ratio[n]), int(self.univalent[n]),
                         int(self.koebe_ok[n])))
        return rows


def _longest_nondecreasing(seq):
    best = run = 1
    for a, b in zip(seq, seq[1:]):
        run = run + 1 if b >= a else 1
        best = max(best, run)
    return best


def leaf_type_report(f, orbit, boundary, dist_field=None, s=0.5,
                     R0=None, samples=DEFAULT_SAMPLES, koebe_tol=KOEBE_TOL):
    """Full per-depth report along a backward orbit.

    R0 defaults to the distance from z_0 to the boundary cloud.  The
    quarter-theorem check R0*v_n/4 <= R_n*(1+tol) is asserted at depths
    whose pullback tube is univalent so far.  With a distance field, the
    empty-disk witness delta_{x_n}(2 R_n) >= s*R0*v_n/4 is recorded per
    depth (x_n = nearest cloud point to z_{-n}).
    """
    if len(boundary) == 0:
        raise DomainError("boundary cloud must be nonempty")
    pts = orbit.points
    N = orbit.depth
    R = boundary.distances(pts)
    D = derivative_chain(f, orbit)
    with np.errstate(divide="ignore"):
        v = 1.0 / D
    if R0 is None:
        R0 = float(R[0])
    product = R * D
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(R > 0, v / R, np.inf)
    tube = pullback_tube(f, orbit, R0, samples)
    univ = np.zeros(N + 1, dtype=bool)
    univ[0] = True
    trusted = True
    for n in range(1, N + 1):
        if n - 1 < len(tube.univalent):
            trusted = trusted and bool(tube.univalent[n - 1])
        else:
            trusted = False  # tube truncated (ambiguity) before this depth
        univ[n] = trusted
    koebe = np.zeros(N + 1, dtype=bool)
    for n in range(N + 1):
        if univ[n]:
            koebe[n] = R0 * v[n] / 4.0 <= R[n] * (1.0 + koebe_tol)
    wd = wb = wok = None
    if dist_field is not None:
        wd = np.empty(N + 1)
        wb = np.empty(N + 1)
        wok = np.zeros(N + 1, dtype=bool)
        for n in range(N + 1):
            i, _ = boundary.nearest(pts[n])
            xn = boundary.points[i]
            wd[n] = float(_delta(xn, 2.0 * max(R[n], 1e-300), dist_field))
            wb[n] = s * R0 * v[n] / 4.0
            wok[n] = wd[n] >= wb[n]
    return LeafTypeReport(orbit=orbit, R0=R0, R=R, D=D, v=v, product=product,
                          ratio=ratio, univalent=univ, koebe_ok=koebe, s=s,
                          witness_delta=wd, witness_bound=wb, witness_ok=wok)


def hyperbolic_norm_bounds(z, boundary):
    """Upper bound 1/d(z, boundary) for the hyperbolic density at z.

    The product R_n * D_n of a LeafTypeReport is the matching lower-bound
    proxy for the hyperbolic norm of the n-fold derivative; no two-sided
    constant is claimed.
    """
    d = boundary.distance(z) if isinstance(boundary, PointCloud) else float(boundary)
    if d <= 0:
        raise DomainError("z lies on the boundary cloud")
    note = ("upper bound for the hyperbolic density; the report product "
            "R_n*D_n is the corresponding lower-bound proxy")
    return 1.0 / d, note
