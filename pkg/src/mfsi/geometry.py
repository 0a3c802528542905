"""Shapes, trajectories, spatial grids and strip membership.

Shapes are rigid regions with a reference center; translating a shape moves
the region without reshaping it.  Projections onto an observation direction
are analytic where possible (balls) and fall back to dense boundary sampling
otherwise, with a refinement check guarding the sampling resolution.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, MfsiError

# Boundary sampling resolution for non-analytic projections; doubling it
# must not move the interval by more than _BOUNDARY_RTOL.
_BOUNDARY_SAMPLES = 4096
_BOUNDARY_RTOL = 1e-3

__all__ = [
    "ProjectionInterval",
    "Ball",
    "Kite",
    "RoundedSquare",
    "SamplingGrid",
    "direction",
    "in_strip",
    "make_shape",
    "make_trajectory",
    "convex_hull",
    "distance_outside_hull",
]


def direction(v):
    """Normalize ``v`` to a unit observation direction (2D or 3D)."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.shape[0] not in (2, 3):
        raise DimensionError(f"direction must be a 2- or 3-vector, got shape {v.shape}")
    n = np.linalg.norm(v)
    if n == 0.0:
        raise MfsiError("zero vector cannot be a direction")
    v = v / n
    assert abs(np.linalg.norm(v) - 1.0) <= 1e-12
    return v


@dataclass(frozen=True)
class ProjectionInterval:
    """Range of ``direction . y`` over a region."""

    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise MfsiError(f"empty projection interval ({self.lo}, {self.hi})")

    @property
    def width(self):
        return self.hi - self.lo

    def shifted(self, offset):
        return ProjectionInterval(self.lo + offset, self.hi + offset)


def in_strip(y, dir_, proj, eta, t0, c):
    """Membership in the strip obtained by sliding ``proj`` along ``dir_``.

    The strip at temporal offset ``eta`` collects points whose projection
    lies strictly between ``proj.lo - c*t0 + c*eta`` and the same shift of
    ``proj.hi``.  At ``eta == t0`` this is the smallest strip containing the
    projected region.
    """
    p = float(np.asarray(y, dtype=np.float64) @ dir_)
    shift = c * (eta - t0)
    return (proj.lo + shift < p) and (p < proj.hi + shift)


def _as_points(p, dim):
    pts = np.atleast_2d(np.asarray(p, dtype=np.float64))
    if pts.shape[1] != dim:
        raise DimensionError(f"expected dim-{dim} points, got shape {pts.shape}")
    return pts


class _Shape:
    """Common behaviour: midpoint quadrature, sampled projections."""

    dim = 2

    def contains(self, p):
        """Boolean membership; scalar for a single point, array for a batch."""
        pts = _as_points(p, self.dim)
        res = self._contains(pts)
        return bool(res[0]) if np.asarray(p).ndim == 1 else res

    def bounding_box(self):
        raise NotImplementedError

    def translated(self, to):
        raise NotImplementedError

    def quadrature(self, pts_per_axis):
        """Midpoint-rule nodes masked to the region.

        Returns ``(points, weight)`` where every point lies inside the shape
        and ``weight`` is the per-node cell measure; the weights sum to the
        area (2D) or volume (3D) in the refinement limit.
        """
        if pts_per_axis < 4:
            raise MfsiError("pts_per_axis must be at least 4")
        lo, hi = self.bounding_box()
        steps = (hi - lo) / pts_per_axis
        axes = [lo[k] + (np.arange(pts_per_axis) + 0.5) * steps[k] for k in range(self.dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        mask = self._contains(pts)
        return pts[mask], float(np.prod(steps))

    def projection_interval(self, at, dir_):
        """(inf, sup) of ``dir_ . y`` over the shape translated to ``at``."""
        at = np.asarray(at, dtype=np.float64)
        base = self._sampled_projection(dir_, _BOUNDARY_SAMPLES)
        refined = self._sampled_projection(dir_, 2 * _BOUNDARY_SAMPLES)
        if max(abs(base[0] - refined[0]), abs(base[1] - refined[1])) >= _BOUNDARY_RTOL:
            raise MfsiError("projection interval did not stabilize under refinement")
        off = float(at @ dir_)
        return ProjectionInterval(refined[0] + off, refined[1] + off)

    def _sampled_projection(self, dir_, n):
        b = self.boundary_points(n) - self.center
        p = b @ dir_
        return float(p.min()), float(p.max())

    def boundary_points(self, n):
        raise NotImplementedError

    def diameter(self):
        """Supremum of pairwise distances (sampled for boundary shapes)."""
        b = self.boundary_points(720)
        widths = []
        for ang in np.linspace(0.0, np.pi, 360, endpoint=False):
            d = np.array([np.cos(ang), np.sin(ang)])
            p = b[:, :2] @ d
            widths.append(p.max() - p.min())
        return float(max(widths))


class Ball(_Shape):
    """Disk (2D) or ball (3D) of given radius."""

    def __init__(self, radius, center=(0.0, 0.0)):
        if radius <= 0:
            raise MfsiError("radius must be positive")
        self.radius = float(radius)
        self.center = np.asarray(center, dtype=np.float64)
        self.dim = self.center.shape[0]
        if self.dim not in (2, 3):
            raise DimensionError("ball center must be 2D or 3D")

    def _contains(self, pts):
        return ((pts - self.center) ** 2).sum(axis=1) <= self.radius**2

    def bounding_box(self):
        return self.center - self.radius, self.center + self.radius

    def translated(self, to):
        return Ball(self.radius, to)

    def projection_interval(self, at, dir_):
        p = float(np.asarray(at, dtype=np.float64) @ dir_)
        return ProjectionInterval(p - self.radius, p + self.radius)

    def boundary_points(self, n):
        if self.dim != 2:
            raise DimensionError("boundary sampling is 2D only")
        th = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
        return self.center + self.radius * np.stack([np.cos(th), np.sin(th)], axis=1)

    def diameter(self):
        return 2.0 * self.radius


class Kite(_Shape):
    """Kite-shaped 2D region.

    Boundary ``scale * (cos t + 0.65 cos 2t - 0.65, 1.5 sin t)`` around the
    reference center; at scale 1 the region has diameter close to 3.
    """

    def __init__(self, scale=1.0, center=(0.0, 0.0)):
        if scale <= 0:
            raise MfsiError("scale must be positive")
        self.scale = float(scale)
        self.center = np.asarray(center, dtype=np.float64)
        if self.center.shape[0] != 2:
            raise DimensionError("kite is a 2D shape")
        self._poly = self.boundary_points(1024)

    def boundary_points(self, n):
        th = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
        x = np.cos(th) + 0.65 * np.cos(2 * th) - 0.65
        y = 1.5 * np.sin(th)
        return self.center + self.scale * np.stack([x, y], axis=1)

    def _contains(self, pts):
        return _points_in_polygon(pts, self._poly)

    def bounding_box(self):
        lo = self._poly.min(axis=0)
        hi = self._poly.max(axis=0)
        return lo, hi

    def translated(self, to):
        return Kite(self.scale, to)


class RoundedSquare(_Shape):
    """Axis-aligned square with quarter-circle corners."""

    def __init__(self, half_width, corner_radius, center=(0.0, 0.0)):
        if half_width <= 0 or corner_radius <= 0:
            raise MfsiError("half_width and corner_radius must be positive")
        if corner_radius > half_width:
            raise MfsiError("corner_radius cannot exceed half_width")
        self.half_width = float(half_width)
        self.corner_radius = float(corner_radius)
        self.center = np.asarray(center, dtype=np.float64)
        if self.center.shape[0] != 2:
            raise DimensionError("rounded square is a 2D shape")

    def _contains(self, pts):
        a = np.abs(pts - self.center)
        w, r = self.half_width, self.corner_radius
        inside_box = (a[:, 0] <= w) & (a[:, 1] <= w)
        in_corner = (a[:, 0] > w - r) & (a[:, 1] > w - r)
        corner_ok = (a[:, 0] - (w - r)) ** 2 + (a[:, 1] - (w - r)) ** 2 <= r**2
        return inside_box & (~in_corner | corner_ok)

    def bounding_box(self):
        return self.center - self.half_width, self.center + self.half_width

    def translated(self, to):
        return RoundedSquare(self.half_width, self.corner_radius, to)

    def boundary_points(self, n):
        # Four edges and four corner arcs, n/8 samples each.
        w, r = self.half_width, self.corner_radius
        k = max(n // 8, 2)
        s = np.linspace(-(w - r), w - r, k, endpoint=False)
        arcs = [np.linspace(a0, a0 + np.pi / 2, k, endpoint=False) for a0 in
                (0.0, np.pi / 2, np.pi, 3 * np.pi / 2)]
        cx = w - r
        segs = [
            np.stack([np.full(k, w), s], axis=1),                      # right edge
            np.stack([cx + r * np.cos(arcs[0]), cx + r * np.sin(arcs[0])], axis=1),
            np.stack([-s, np.full(k, w)], axis=1),                     # top edge
            np.stack([-cx + r * np.cos(arcs[1]), cx + r * np.sin(arcs[1])], axis=1),
            np.stack([np.full(k, -w), -s], axis=1),                    # left edge
            np.stack([-cx + r * np.cos(arcs[2]), -cx + r * np.sin(arcs[2])], axis=1),
            np.stack([s, np.full(k, -w)], axis=1),                     # bottom edge
            np.stack([cx + r * np.cos(arcs[3]), -cx + r * np.sin(arcs[3])], axis=1),
        ]
        return self.center + np.concatenate(segs, axis=0)

    def diameter(self):
        return 2.0 * (np.sqrt(2.0) * (self.half_width - self.corner_radius) + self.corner_radius)


def _points_in_polygon(pts, poly):
    """Even-odd crossing test, vectorized over points."""
    x, y = pts[:, 0], pts[:, 1]
    x0, y0 = poly[:, 0], poly[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    inside = np.zeros(pts.shape[0], dtype=bool)
    for lo in range(0, pts.shape[0], 8192):
        hi = min(lo + 8192, pts.shape[0])
        yy = y[lo:hi, None]
        xx = x[lo:hi, None]
        crosses = (y0 > yy) != (y1 > yy)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = x0 + (yy - y0) * (x1 - x0) / (y1 - y0)
        hits = crosses & (xx < xint)
        inside[lo:hi] = (hits.sum(axis=1) % 2).astype(bool)
    return inside


# ---------------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------------

class Trajectory:
    """Time-parametrized source path on [0, t_max]."""

    dim = 2
    t_max = np.inf

    def position(self, t):
        t = np.asarray(t, dtype=np.float64)
        if np.any(t < 0) or np.any(t > self.t_max):
            raise MfsiError(f"time outside [0, {self.t_max}]")
        pos = self._position(t)
        return pos if t.ndim else pos.reshape(self.dim)

    def _position(self, t):
        raise NotImplementedError

    def max_speed(self, samples=2001):
        """Largest sampled finite-difference speed over the time domain."""
        t_hi = self.t_max if np.isfinite(self.t_max) else 100.0
        ts = np.linspace(0.0, t_hi, samples)
        pos = self._position(ts)
        v = np.diff(pos, axis=0) / np.diff(ts)[:, None]
        return float(np.linalg.norm(v, axis=1).max())

    def check_speed(self, wave_speed):
        s = self.max_speed()
        if s >= wave_speed:
            warnings.warn(
                f"trajectory speed {s:.3g} is not below the wave speed {wave_speed:.3g}",
                stacklevel=2,
            )


class FixedPoint(Trajectory):
    def __init__(self, point):
        self.point = np.asarray(point, dtype=np.float64)
        self.dim = self.point.shape[0]

    def _position(self, t):
        return np.broadcast_to(self.point, np.shape(t) + (self.dim,)).copy()

    def max_speed(self, samples=2001):
        return 0.0


class LinearPath(Trajectory):
    def __init__(self, velocity, start=None, t_max=np.inf):
        self.velocity = np.asarray(velocity, dtype=np.float64)
        self.dim = self.velocity.shape[0]
        self.start = np.zeros(self.dim) if start is None else np.asarray(start, dtype=np.float64)
        self.t_max = float(t_max)

    def _position(self, t):
        return self.start + np.multiply.outer(np.asarray(t, dtype=np.float64), self.velocity)

    def max_speed(self, samples=2001):
        return float(np.linalg.norm(self.velocity))


class Cardioid(Trajectory):
    t_max = 80.0

    def _position(self, t):
        th = np.pi * np.asarray(t) / 40.0
        x = 8.0 * np.sin(th) ** 3
        y = (6.0 * np.cos(th) - 2.0 * np.cos(2 * th)
             - np.cos(3 * th) - 0.5 * np.cos(4 * th))
        return np.stack([x, y], axis=-1)


class Trifolium(Trajectory):
    t_max = 80.0

    def _position(self, t):
        th = np.pi * np.asarray(t) / 40.0
        return np.stack([8.0 * np.cos(3 * th) * np.cos(th),
                         8.0 * np.cos(3 * th) * np.sin(th)], axis=-1)


class Star(Trajectory):
    t_max = 80.0

    def _position(self, t):
        th = np.pi * np.asarray(t) / 40.0
        return np.stack([7.0 * np.cos(th) ** 3, 7.0 * np.sin(th) ** 3], axis=-1)


class SineLine(Trajectory):
    t_max = 16.0

    def _position(self, t):
        t = np.asarray(t, dtype=np.float64)
        return np.stack([t - 8.0, 4.0 * np.sin(np.pi / 8.0 * (t - 8.0) + np.pi)], axis=-1)


class Helix(Trajectory):
    dim = 3
    t_max = 120.0

    def _position(self, t):
        t = np.asarray(t, dtype=np.float64)
        return np.stack([np.cos(t / 4.0), t / 12.0 - 5.0, np.sin(t / 4.0)], axis=-1)


_SHAPES = {"ball": Ball, "disk": Ball, "kite": Kite, "rounded_square": RoundedSquare}
_TRAJECTORIES = {
    "fixed": FixedPoint,
    "linear": LinearPath,
    "cardioid": Cardioid,
    "trifolium": Trifolium,
    "star": Star,
    "sine_line": SineLine,
    "helix": Helix,
}


def make_shape(kind, **params):
    """Instantiate a catalog shape by name."""
    try:
        cls = _SHAPES[kind]
    except KeyError:
        raise MfsiError(f"unknown shape kind {kind!r}") from None
    return cls(**params)


def make_trajectory(kind, **params):
    """Instantiate a catalog trajectory by name."""
    try:
        cls = _TRAJECTORIES[kind]
    except KeyError:
        raise MfsiError(f"unknown trajectory kind {kind!r}") from None
    if kind == "fixed":
        return cls(params["point"])
    return cls(**params)


# ---------------------------------------------------------------------------
# Sampling grids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SamplingGrid:
    """Uniform box grid; cell centers are the sample points."""

    box_min: tuple
    box_max: tuple
    resolution: tuple

    def __post_init__(self):
        lo, hi = np.asarray(self.box_min), np.asarray(self.box_max)
        if lo.shape != hi.shape or len(self.resolution) != lo.shape[0]:
            raise DimensionError("grid bounds and resolution disagree on dimension")
        if np.any(hi <= lo):
            raise MfsiError("box_max must exceed box_min componentwise")
        if any(r < 1 for r in self.resolution):
            raise MfsiError("resolution must be positive")

    @property
    def dim(self):
        return len(self.resolution)

    def axes(self):
        lo, hi = np.asarray(self.box_min), np.asarray(self.box_max)
        return [lo[k] + (np.arange(self.resolution[k]) + 0.5) * (hi[k] - lo[k]) / self.resolution[k]
                for k in range(self.dim)]

    def cell_centers(self):
        """(n_cells, dim) array in row-major order (first axis slowest)."""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def cell_widths(self):
        lo, hi = np.asarray(self.box_min), np.asarray(self.box_max)
        return (hi - lo) / np.asarray(self.resolution)

    def circumradius(self):
        """Radius of the smallest origin-centered ball containing the box."""
        corners = np.abs(np.stack([self.box_min, self.box_max]))
        return float(np.linalg.norm(corners.max(axis=0)))

    def n_cells(self):
        return int(np.prod(self.resolution))


# ---------------------------------------------------------------------------
# Convex hull helpers (2D), used by hull-reconstruction checks
# ---------------------------------------------------------------------------

def convex_hull(points):
    """Convex hull polygon (CCW) of 2D points via the monotone chain."""
    pts = np.unique(np.asarray(points, dtype=np.float64), axis=0)
    if pts.shape[0] < 3:
        return pts

    def _cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def _half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = _half(pts)
    upper = _half(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])


def distance_outside_hull(queries, hull):
    """Euclidean distance from each query to a convex polygon (0 inside)."""
    q = np.atleast_2d(np.asarray(queries, dtype=np.float64))
    edges = list(zip(hull, np.roll(hull, -1, axis=0)))
    inside = np.ones(q.shape[0], dtype=bool)
    dmin = np.full(q.shape[0], np.inf)
    for a, b in edges:
        e = b - a
        # CCW polygon: cross < 0 means the point is right of the edge (outside).
        cross = e[0] * (q[:, 1] - a[1]) - e[1] * (q[:, 0] - a[0])
        inside &= cross >= 0
        t = np.clip(((q - a) @ e) / (e @ e), 0.0, 1.0)
        proj = a + t[:, None] * e
        dmin = np.minimum(dmin, np.linalg.norm(q - proj, axis=1))
    return np.where(inside, 0.0, dmin)
