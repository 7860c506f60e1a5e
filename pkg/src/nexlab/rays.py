"""Half-line lifting under inverse branches of quadratic maps.

A truncated ray from a base point is continued backward through n inverse
branches at once ("towers" of depth n per ray sample).  Branch points of
the n-fold inverse sit exactly on critical-orbit points of the base
plane, so admissibility of an angle is checked against the critical
orbit, and stepping refines adaptively when the two candidate preimages
of a sample approach each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import BranchWord, forward_orbit
from .errors import DomainError, ObstructionError

DEFAULT_RAY_TRUNCATION = 1e3
COMPLETED = "completed"
OBSTRUCTED = "obstructed"
AMBIGUOUS = "ambiguous"


@dataclass(frozen=True)
class Ray:
    """Truncated half-line {z0 + t e^{i theta} : 0 <= t <= r_max}."""

    z0: complex
    theta: float
    r_max: float = DEFAULT_RAY_TRUNCATION
    step0: float | None = None      # initial arclength step
    refine_factor: float = 0.5      # step multiplier near branch points

    def __post_init__(self):
        if self.r_max <= 0:
            raise DomainError("r_max must be positive")

    @property
    def direction(self):
        return complex(math.cos(self.theta), math.sin(self.theta))

    def point(self, t):
        return complex(self.z0) + t * self.direction


@dataclass(frozen=True)
class LiftedRay:
    """One lift of a ray under an n-fold inverse branch.

    `ts` are the base arclength parameters of the polyline vertices;
    applying the n-fold composition forward maps polyline[j] to
    ray.point(ts[j]).  termination is completed / obstructed / ambiguous;
    the obstruction fields name the critical-orbit point responsible.
    """

    word: BranchWord
    ts: np.ndarray
    polyline: np.ndarray
    termination: str
    obstruction_index: int | None = None
    obstruction_point: complex | None = None
    obstruction_distance: float | None = None

    @property
    def start(self):
        return complex(self.polyline[0])

    def to_jsonable(self):
        coords = np.empty(2 * len(self.polyline))
        coords[0::2] = self.polyline.real
        coords[1::2] = self.polyline.imag
        out = {
            "schema": "nexlab.lift/1",
            "word": str(self.word),
            "ts": [float(t) for t in self.ts],
            "polyline": [float(c) for c in coords],
            "termination": self.termination,
        }
        if self.termination == OBSTRUCTED:
            out["obstruction"] = {
                "index": self.obstruction_index,
                "point": [self.obstruction_point.real, self.obstruction_point.imag],
                "distance": self.obstruction_distance,
            }
        return out


@dataclass(frozen=True)
class ObstructionSet:
    """Critical-orbit points within eps of a base ray."""

    pairs: tuple  # of (orbit index k, point f^k(c0), distance to ray)

    def __len__(self):
        return len(self.pairs)


def critical_orbit(f, depth, escape_radius=DEFAULT_RAY_TRUNCATION):
    """{f^k(critical point) : 1 <= k <= depth}, escape-truncated."""
    orbit = forward_orbit(f, f.critical_point, depth, escape_radius=escape_radius)
    return orbit.points[1:]


def _point_segment_distance(p, a, b):
    """Euclidean distance from p to the segment [a, b]."""
    ab = b - a
    denom = abs(ab) ** 2
    if denom == 0.0:
        return abs(p - a)
    t = ((p - a).real * ab.real + (p - a).imag * ab.imag) / denom
    t = min(max(t, 0.0), 1.0)
    return abs(p - (a + t * ab))


def ray_obstructions(f, ray, orbit_depth, eps):
    """Critical-orbit points within eps of the truncated ray."""
    co = critical_orbit(f, orbit_depth)
    a = ray.point(0.0)
    b = ray.point(ray.r_max)
    pairs = []
    for k, p in enumerate(co, start=1):
        d = _point_segment_distance(p, a, b)
        if d <= eps:
            pairs.append((k, complex(p), float(d)))
    return ObstructionSet(pairs=tuple(pairs))


def theta_admissible(f, z0, theta, orbit_depth, eps,
                     r_max=DEFAULT_RAY_TRUNCATION):
    """Whether the ray from z0 at angle theta avoids the critical orbit.

    Returns (admissible, witness); the witness is the nearest offending
    (index, point, distance) triple when inadmissible, else None.
    """
    if eps <= 0:
        raise DomainError("eps must be positive")
    ray = Ray(z0=complex(z0), theta=float(theta), r_max=r_max)
    obs = ray_obstructions(f, ray, orbit_depth, eps)
    if len(obs) == 0:
        return True, None
    witness = min(obs.pairs, key=lambda p: p[2])
    return False, witness


def _initial_tower(f, z0, word):
    """Depth-wise preimages of z0 selected by the word's bits."""
    tower = np.empty(len(word) + 1, dtype=complex)
    tower[0] = z0
    for k in range(len(word)):
        pair = f.inverse_images(tower[k])
        tower[k + 1] = pair[word[k]]
    return tower


def lift_ray(f, ray, word, eps, co_depth=None):
    """Continue the n-fold inverse branch selected by `word` along a ray.

    Marches outward with adaptive steps, halving the step whenever the
    two candidate preimages at some level come within 10*eps of each
    other; stops obstructed when the base segment passes within eps of a
    critical-orbit point of index <= n.
    """
    n = len(word)
    if eps <= 0:
        raise DomainError("eps must be positive")
    co = critical_orbit(f, co_depth if co_depth is not None else n)
    step0 = ray.step0 if ray.step0 is not None else ray.r_max / 1024.0
    min_step = max(step0 * ray.refine_factor ** 40, 1e-14 * ray.r_max)

    tower = _initial_tower(f, ray.point(0.0), word)
    ts = [0.0]
    polyline = [tower[n]]
    termination = COMPLETED
    obs_k = obs_p = obs_d = None
    t = 0.0
    h = step0
    while t < ray.r_max:
        h = min(h, ray.r_max - t)
        t_next = t + h
        a, b = ray.point(t), ray.point(t_next)
        hit = None
        for k, p in enumerate(co, start=1):
            d = _point_segment_distance(p, a, b)
            if d <= eps:
                hit = (k, complex(p), float(d))
                break
        if hit is not None:
            termination = OBSTRUCTED
            obs_k, obs_p, obs_d = hit
            break
        new_tower, close = _advance_tower(f, tower, b, eps)
        if close and h > min_step:
            h *= ray.refine_factor
            continue
        if new_tower is None:
            termination = AMBIGUOUS
            break
        tower = new_tower
        t = t_next
        ts.append(t)
        polyline.append(tower[n])
        if not close:
            h = min(h * 2.0, step0)
    return LiftedRay(word=word, ts=np.asarray(ts),
                     polyline=np.asarray(polyline, dtype=complex),
                     termination=termination, obstruction_index=obs_k,
                     obstruction_point=obs_p, obstruction_distance=obs_d)


def _advance_tower(f, tower, base_point, eps):
    """Continue a preimage tower to the next base point.

    Returns (new_tower, candidates_were_close).  new_tower is None when
    the two candidates at some level are numerically indistinguishable.
    """
    n = len(tower) - 1
    new = np.empty_like(tower)
    new[0] = base_point
    close = False
    for k in range(n):
        pair = f.inverse_images(new[k])
        gap = abs(pair[0] - pair[1])
        if gap <= 10.0 * eps:
            close = True
        if gap <= 1e-3 * eps:
            return None, True
        d0 = abs(pair[0] - tower[k + 1])
        d1 = abs(pair[1] - tower[k + 1])
        new[k + 1] = pair[0] if d0 <= d1 else pair[1]
    return new, close


def enumerate_lifts(f, ray, n, eps, check_disjoint=True):
    """All 2^n lifts of an admissible ray, one per branch word.

    Starting vertices are asserted pairwise distinct; for modest n the
    lifts are additionally checked for parameter-matched disjointness
    (two lifts can only intersect at a shared base parameter, since an
    intersection point maps forward onto the same base point).
    """
    if n < 0:
        raise DomainError("depth must be nonnegative")
    ok, witness = theta_admissible(f, ray.z0, ray.theta, max(n, 1), eps,
                                   r_max=ray.r_max)
    if not ok:
        raise ObstructionError(
            f"ray at angle {ray.theta:g} passes within {eps:g} of the "
            f"critical orbit", witness=witness)
    words = [BranchWord.from_int(i, n) for i in range(2 ** n)]
    lifts = [lift_ray(f, ray, w, eps) for w in words]
    starts = np.array([lift.start for lift in lifts])
    if n >= 1:
        dmat = np.abs(starts[:, None] - starts[None, :])
        np.fill_diagonal(dmat, np.inf)
        if dmat.min() <= 1e-9:
            raise ObstructionError(
                f"starting vertices collide (min gap {dmat.min():g})")
    if check_disjoint and 1 <= n <= 8:
        _check_parameter_matched_disjoint(lifts)
    return lifts


def _check_parameter_matched_disjoint(lifts):
    """Assert no two completed lifts meet at a shared base parameter."""
    complete = [l for l in lifts if l.termination == COMPLETED]
    if len(complete) < 2:
        return
    # Lifts may refine differently; compare on the union grid by linear
    # interpolation of each polyline over its own parameters.
    all_ts = np.unique(np.concatenate([l.ts for l in complete]))
    vals = np.empty((len(complete), len(all_ts)), dtype=complex)
    for i, l in enumerate(complete):
        vals[i] = (np.interp(all_ts, l.ts, l.polyline.real)
                   + 1j * np.interp(all_ts, l.ts, l.polyline.imag))
    for i in range(len(complete)):
        gaps = np.abs(vals[i + 1:] - vals[i]).min(axis=1)
        if gaps.size and gaps.min() <= 1e-9:
            raise ObstructionError(
                f"lifted curves intersect (min gap {gaps.min():g})")


@dataclass(frozen=True)
class SeparationResult:
    """Outcome of a two-angle branch-separation run."""

    separated: bool
    depth: int | None
    gap: float | None


def branch_separation_experiment(f, z0, theta, theta2, n_max, eps, *,
                                 word=None, word2=None, marker=None,
                                 r_max=DEFAULT_RAY_TRUNCATION):
    """First backward depth at which designated branches of two rays split.

    Each ray carries one designated branch word (an explicit stand-in for
    an externally selected branch); alternatively `marker` selects, at
    every backward step, the preimage nearest to a fixed marker point.
    Reports the smallest n with |z_{-n}(theta) - z_{-n}(theta2)| > eps,
    or not-separated over the truncation.
    """
    for ang in (theta, theta2):
        ok, witness = theta_admissible(f, z0, ang, n_max, eps, r_max=r_max)
        if not ok:
            raise ObstructionError(
                f"angle {ang:g} is not admissible", witness=witness)
    if marker is not None:
        starts_a = _marker_selected_starts(f, Ray(z0=complex(z0), theta=theta,
                                                  r_max=r_max), marker, n_max, eps)
        starts_b = _marker_selected_starts(f, Ray(z0=complex(z0), theta=theta2,
                                                  r_max=r_max), marker, n_max, eps)
    else:
        if word is None or word2 is None:
            raise DomainError("provide branch words or a marker point")
        starts_a = _initial_tower(f, complex(z0), word)[1:n_max + 1]
        starts_b = _initial_tower(f, complex(z0), word2)[1:n_max + 1]
    for nn in range(1, n_max + 1):
        gap = abs(starts_a[nn - 1] - starts_b[nn - 1])
        if gap > eps:
            return SeparationResult(separated=True, depth=nn, gap=float(gap))
    return SeparationResult(separated=False, depth=None, gap=None)


def _marker_selected_starts(f, ray, marker, n_max, eps, samples=256):
    """Starting vertices of the marker-selected lift at every depth.

    At each depth all 2^n lifts of the ray are continued and the one
    passing nearest the marker point is designated; this stands in for a
    branch selected by an external invariant set.  Selection is global
    per depth (not greedy along one curve) so that two rays from the
    same base point can end up with different branch words.
    """
    marker = complex(marker)
    ts = np.linspace(0.0, ray.r_max, samples)
    curves = [np.array([ray.point(t) for t in ts])]
    starts = []
    for _ in range(n_max):
        nxt = []
        for poly in curves:
            pair0 = f.inverse_images(poly[0])
            for bit in (0, 1):
                nxt.append(_continue_curve(f, poly, complex(pair0[bit])))
        curves = nxt
        dists = [np.abs(c - marker).min() for c in curves]
        starts.append(complex(curves[int(np.argmin(dists))][0]))
    return starts


def _continue_curve(f, base, first):
    """Single-inverse continuation of a sampled curve from a chosen start."""
    out = np.empty_like(base)
    out[0] = first
    pairs = f.inverse_images(base)
    for j in range(1, base.size):
        d0 = abs(pairs[0, j] - out[j - 1])
        d1 = abs(pairs[1, j] - out[j - 1])
        out[j] = pairs[0, j] if d0 <= d1 else pairs[1, j]
    return out


# ---------------------------------------------------------------------------
# SVG export
# ---------------------------------------------------------------------------

def lifts_to_svg(path, lifts, size=800, margin=0.05):
    """Write lift polylines as an SVG overlay for visual inspection."""
    pts = np.concatenate([l.polyline for l in lifts])
    xmin, xmax = pts.real.min(), pts.real.max()
    ymin, ymax = pts.imag.min(), pts.imag.max()
    span = max(xmax - xmin, ymax - ymin, 1e-12)
    pad = margin * span
    xmin -= pad
    ymin -= pad
    span += 2 * pad
    scale = size / span

    def sx(z):
        return (z.real - xmin) * scale

    def sy(z):
        return size - (z.imag - ymin) * scale

    lines = ['<svg xmlns="http://www.w3.org/2000/svg" '
             f'width="{size}" height="{size}" viewBox="0 0 {size} {size}">']
    palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd",
               "#ff7f0e", "#8c564b", "#e377c2", "#17becf"]
    for i, lift in enumerate(lifts):
        color = palette[i % len(palette)]
        coords = " ".join(f"{sx(z):.2f},{sy(z):.2f}" for z in lift.polyline)
        lines.append(f'<polyline points="{coords}" fill="none" '
                     f'stroke="{color}" stroke-width="1"/>')
    lines.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
