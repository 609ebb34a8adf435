"""Constant-curvature surface models: flat plane, Poincare disk, spherical hemisphere chart.

All other modules are metric-agnostic through this interface.  Angles are
radians; `theta` values are measured counterclockwise against an orthonormal
frame of the tangent space at the base point (for the conformal disk this is
the chart frame itself, for the sphere the east/north frame).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import (
    AntipodalPoints,
    CoincidentPoints,
    MismatchedBasePoint,
    MismatchedSurface,
    OutOfChart,
    SelfIntersectingPolygon,
    UnsupportedSurface,
)

TWO_PI = 2.0 * math.pi

FLAT = "flat"
HYPERBOLIC = "hyperbolic"
SPHERICAL = "spherical"

# Spherical chart keeps pairs strictly closer than pi (in curvature-1 angle).
ANTIPODAL_GUARD = math.pi - 1e-9


def wrap_angle(theta: float) -> float:
    """Normalize to [0, 2*pi)."""
    t = math.fmod(theta, TWO_PI)
    if t < 0.0:
        t += TWO_PI
    return t if t < TWO_PI else 0.0


def wrap_signed(theta: float) -> float:
    """Normalize to (-pi, pi]."""
    t = math.fmod(theta, TWO_PI)
    if t > math.pi:
        t -= TWO_PI
    elif t <= -math.pi:
        t += TWO_PI
    return t


@dataclass(frozen=True)
class SurfaceModel:
    """Which constant-curvature chart the geometry runs on.

    kind: "flat" | "hyperbolic" | "spherical"
    curvature: 0 for flat, < 0 hyperbolic, > 0 spherical (units 1/length^2)
    """

    kind: str
    curvature: float

    def __post_init__(self):
        if self.kind == FLAT:
            if self.curvature != 0.0:
                raise ValueError("flat surface requires curvature 0")
        elif self.kind == HYPERBOLIC:
            if not self.curvature < 0.0:
                raise ValueError("hyperbolic surface requires curvature < 0")
        elif self.kind == SPHERICAL:
            if not self.curvature > 0.0:
                raise ValueError("spherical surface requires curvature > 0")
        else:
            raise ValueError(f"unknown surface kind {self.kind!r}")

    @property
    def default_tol(self) -> float:
        # transcendental evaluation on curved models justifies a looser default
        return 1e-9 if self.kind == FLAT else 1e-8

    def validate_coords(self, x: float, y: float) -> None:
        if not (math.isfinite(x) and math.isfinite(y)):
            raise OutOfChart(f"non-finite coordinates ({x}, {y})")
        if self.kind == HYPERBOLIC:
            if x * x + y * y >= 1.0:
                raise OutOfChart(f"({x}, {y}) not inside the unit disk")
        elif self.kind == SPHERICAL:
            if y < -1e-12 or y > math.pi / 2.0 + 1e-12:
                raise OutOfChart(f"colatitude {y} outside [0, pi/2]")

    def point(self, x: float, y: float) -> "Point":
        return Point(self, x, y)


def flat() -> SurfaceModel:
    return SurfaceModel(FLAT, 0.0)


def hyperbolic(curvature: float = -1.0) -> SurfaceModel:
    return SurfaceModel(HYPERBOLIC, curvature)


def spherical(curvature: float = 1.0) -> SurfaceModel:
    return SurfaceModel(SPHERICAL, curvature)


@dataclass(frozen=True)
class Point:
    """A chart point: Cartesian (flat), Poincare disk (hyperbolic),
    (longitude, colatitude) in radians (spherical)."""

    surface: SurfaceModel
    x: float
    y: float

    def __post_init__(self):
        self.surface.validate_coords(self.x, self.y)

    @property
    def coords(self) -> tuple:
        return (self.x, self.y)


@dataclass(frozen=True)
class TangentDir:
    """Unit tangent vector at `base`, as a frame angle in [0, 2*pi)."""

    base: Point
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", wrap_angle(self.theta))


@dataclass(frozen=True)
class GeodesicSegment:
    a: Point
    b: Point
    length: float
    dir_at_a: TangentDir
    dir_at_b: TangentDir


# ---------------------------------------------------------------------------
# spherical embedding helpers (unit sphere; curvature rescales lengths)
# ---------------------------------------------------------------------------

def _embed(lon: float, colat: float):
    sc, cc = math.sin(colat), math.cos(colat)
    return (sc * math.cos(lon), sc * math.sin(lon), cc)


def _frame(lon: float, colat: float):
    """Orthonormal (east, north) frame; (east, north) is positively oriented
    as seen in the orthographic projection from above the pole."""
    east = (-math.sin(lon), math.cos(lon), 0.0)
    north = (-math.cos(colat) * math.cos(lon),
             -math.cos(colat) * math.sin(lon),
             math.sin(colat))
    return east, north


def _dot(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0])


def _norm3(u):
    return math.sqrt(_dot(u, u))


def _chart_from_embed(n) -> tuple:
    colat = math.acos(max(-1.0, min(1.0, n[2])))
    lon = math.atan2(n[1], n[0])
    return (wrap_angle(lon), colat)


# ---------------------------------------------------------------------------
# raw coordinate operations (tuples in, tuples out)
# ---------------------------------------------------------------------------

def _check_pair(p: Point, q: Point):
    if p.surface != q.surface:
        raise MismatchedSurface(f"{p.surface} vs {q.surface}")


def _raw_distance(surface: SurfaceModel, a: tuple, b: tuple) -> float:
    if surface.kind == FLAT:
        return math.hypot(b[0] - a[0], b[1] - a[1])
    if surface.kind == HYPERBOLIC:
        k = math.sqrt(-surface.curvature)
        z, w = complex(*a), complex(*b)
        t = (w - z) / (1.0 - z.conjugate() * w)
        return (2.0 / k) * math.atanh(min(abs(t), 1.0 - 1e-16))
    na, nb = _embed(*a), _embed(*b)
    ang = math.atan2(_norm3(_cross(na, nb)), _dot(na, nb))
    return ang / math.sqrt(surface.curvature)


def _raw_direction(surface: SurfaceModel, a: tuple, b: tuple) -> float:
    """Frame angle at a of the geodesic toward b."""
    if surface.kind == FLAT:
        return wrap_angle(math.atan2(b[1] - a[1], b[0] - a[0]))
    if surface.kind == HYPERBOLIC:
        # the disk model is conformal and the Mobius translation taking a to
        # the origin has positive real derivative at a, so chart angle works
        z, w = complex(*a), complex(*b)
        t = (w - z) / (1.0 - z.conjugate() * w)
        return wrap_angle(cmath.phase(t))
    na, nb = _embed(*a), _embed(*b)
    t = tuple(nb[i] - _dot(na, nb) * na[i] for i in range(3))
    tn = _norm3(t)
    if tn == 0.0:
        raise CoincidentPoints("no direction between coincident points")
    t = tuple(c / tn for c in t)
    east, north = _frame(*a)
    return wrap_angle(math.atan2(_dot(t, north), _dot(t, east)))


def _raw_point_at(surface: SurfaceModel, a: tuple, theta: float, s: float) -> tuple:
    """Exponential map: walk distance s from a in frame direction theta."""
    if surface.kind == FLAT:
        return (a[0] + s * math.cos(theta), a[1] + s * math.sin(theta))
    if surface.kind == HYPERBOLIC:
        k = math.sqrt(-surface.curvature)
        z = complex(*a)
        w = math.tanh(0.5 * k * s) * cmath.exp(1j * theta)
        r = (w + z) / (1.0 + z.conjugate() * w)
        return (r.real, r.imag)
    rho = 1.0 / math.sqrt(surface.curvature)
    na = _embed(*a)
    east, north = _frame(*a)
    t = tuple(math.cos(theta) * east[i] + math.sin(theta) * north[i]
              for i in range(3))
    ang = s / rho
    n = tuple(math.cos(ang) * na[i] + math.sin(ang) * t[i] for i in range(3))
    return _chart_from_embed(n)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def geodesic_connect(p: Point, q: Point) -> GeodesicSegment:
    """Unique minimizing geodesic segment between distinct chart points."""
    _check_pair(p, q)
    surface = p.surface
    if surface.kind == SPHERICAL:
        ang = _raw_distance(surface, p.coords, q.coords) * math.sqrt(surface.curvature)
        if ang < 1e-14:
            raise CoincidentPoints(f"{p.coords} and {q.coords} coincide")
        if ang >= ANTIPODAL_GUARD:
            raise AntipodalPoints(f"{p.coords} and {q.coords} are (nearly) antipodal")
    elif p.coords == q.coords or _raw_distance(surface, p.coords, q.coords) < 1e-15:
        raise CoincidentPoints(f"{p.coords} and {q.coords} coincide")
    length = _raw_distance(surface, p.coords, q.coords)
    da = TangentDir(p, _raw_direction(surface, p.coords, q.coords))
    db = TangentDir(q, _raw_direction(surface, q.coords, p.coords))
    return GeodesicSegment(p, q, length, da, db)


def point_at(p: Point, theta: float, s: float) -> Point:
    """Point reached by the geodesic from p with initial frame angle theta
    after arclength s."""
    x, y = _raw_point_at(p.surface, p.coords, theta, s)
    return Point(p.surface, x, y)


def angle_ccw(d1: TangentDir, d2: TangentDir) -> float:
    """Counterclockwise angle from d1 to d2 in the shared tangent space."""
    if d1.base != d2.base:
        raise MismatchedBasePoint(f"{d1.base} vs {d2.base}")
    return wrap_angle(d2.theta - d1.theta)


# ---------------------------------------------------------------------------
# straight-model coordinates (geodesics become straight segments)
# ---------------------------------------------------------------------------

def straight_coords(p: Point) -> tuple:
    """Coordinates in a model with straight geodesics: the chart itself for
    flat, the Klein disk for hyperbolic.  Not available on the sphere."""
    if p.surface.kind == FLAT:
        return p.coords
    if p.surface.kind == HYPERBOLIC:
        x, y = p.coords
        d = 1.0 + x * x + y * y
        return (2.0 * x / d, 2.0 * y / d)
    raise UnsupportedSurface("no global straight model on the spherical chart")


def from_straight(surface: SurfaceModel, xy: tuple) -> Point:
    if surface.kind == FLAT:
        return Point(surface, xy[0], xy[1])
    if surface.kind == HYPERBOLIC:
        x, y = xy
        r2 = x * x + y * y
        if r2 >= 1.0:
            raise OutOfChart(f"Klein coordinates {xy} outside the disk")
        f = 1.0 / (1.0 + math.sqrt(1.0 - r2))
        return Point(surface, x * f, y * f)
    raise UnsupportedSurface("no global straight model on the spherical chart")


# ---------------------------------------------------------------------------
# segment intersection predicates
# ---------------------------------------------------------------------------

def _seg_intersect_2d(p1, q1, p2, q2, eps):
    """Intersections of two straight segments, skipping shared endpoints.

    Returns a list of (t, u, point) with t along p1->q1 and u along p2->q2.
    Collinear overlap is reported as ("overlap", None, None).
    """
    r = (q1[0] - p1[0], q1[1] - p1[1])
    s = (q2[0] - p2[0], q2[1] - p2[1])
    d = (p2[0] - p1[0], p2[1] - p1[1])
    denom = r[0] * s[1] - r[1] * s[0]
    lr = math.hypot(*r)
    ls = math.hypot(*s)
    scale = max(lr * ls, 1e-300)
    if abs(denom) <= eps * scale:
        # parallel; collinear overlap check
        if abs(d[0] * r[1] - d[1] * r[0]) > eps * max(lr, 1.0) * max(math.hypot(*d), lr):
            return []
        tt0 = (d[0] * r[0] + d[1] * r[1]) / (lr * lr)
        tt1 = tt0 + (s[0] * r[0] + s[1] * r[1]) / (lr * lr)
        lo, hi = min(tt0, tt1), max(tt0, tt1)
        margin = eps
        if hi < margin or lo > 1.0 - margin or hi - max(lo, 0.0) < margin:
            return []
        return [("overlap", None, None)]
    t = (d[0] * s[1] - d[1] * s[0]) / denom
    u = (d[0] * r[1] - d[1] * r[0]) / denom
    tol_t = eps / max(lr, 1e-300)
    tol_u = eps / max(ls, 1e-300)
    if -tol_t <= t <= 1.0 + tol_t and -tol_u <= u <= 1.0 + tol_u:
        pt = (p1[0] + t * r[0], p1[1] + t * r[1])
        return [(t, u, pt)]
    return []


def _arc_param(n_a, n_b, n_x):
    """Fraction of the way from a to b along the minor arc, for x on it."""
    full = math.atan2(_norm3(_cross(n_a, n_b)), _dot(n_a, n_b))
    part = math.atan2(_norm3(_cross(n_a, n_x)), _dot(n_a, n_x))
    return part / full if full > 0.0 else 0.0


def _seg_intersect_sphere(a1, b1, a2, b2, eps):
    """Intersections of two minor great-circle arcs (embedded unit vectors)."""
    n1 = _cross(a1, b1)
    n2 = _cross(a2, b2)
    n1n, n2n = _norm3(n1), _norm3(n2)
    if n1n < 1e-14 or n2n < 1e-14:
        return []
    n1 = tuple(c / n1n for c in n1)
    n2 = tuple(c / n2n for c in n2)
    axis = _cross(n1, n2)
    axn = _norm3(axis)

    def on_arc(x, a, b):
        full = math.atan2(_norm3(_cross(a, b)), _dot(a, b))
        pa = math.atan2(_norm3(_cross(a, x)), _dot(a, x))
        pb = math.atan2(_norm3(_cross(x, b)), _dot(x, b))
        return abs(pa + pb - full) <= max(eps, 1e-12) * 4.0

    if axn < 1e-12:
        # same great circle: look for overlap beyond shared endpoints
        hits = 0
        for x in (a2, b2):
            if on_arc(x, a1, b1) and _norm3(_cross(x, a1)) > eps and _norm3(_cross(x, b1)) > eps:
                hits += 1
        for x in (a1, b1):
            if on_arc(x, a2, b2) and _norm3(_cross(x, a2)) > eps and _norm3(_cross(x, b2)) > eps:
                hits += 1
        return [("overlap", None, None)] if hits else []
    axis = tuple(c / axn for c in axis)
    out = []
    for cand in (axis, tuple(-c for c in axis)):
        if on_arc(cand, a1, b1) and on_arc(cand, a2, b2):
            out.append((_arc_param(a1, b1, cand), _arc_param(a2, b2, cand), cand))
    return out


def segment_intersections(seg1: GeodesicSegment, seg2: GeodesicSegment, eps: float = 1e-12):
    """Parametric intersections between two geodesic segments.

    Each hit is (t_on_seg1, u_on_seg2, Point); collinear/co-circular overlap
    comes back as ("overlap", None, None).  Parameters are fractions of the
    straight-model chord (flat/hyperbolic) or of the arc (spherical).
    """
    surface = seg1.a.surface
    if surface.kind == SPHERICAL:
        hits = _seg_intersect_sphere(_embed(*seg1.a.coords), _embed(*seg1.b.coords),
                                     _embed(*seg2.a.coords), _embed(*seg2.b.coords), eps)
        out = []
        for t, u, x in hits:
            if t == "overlap":
                out.append((t, u, x))
            else:
                out.append((t, u, Point(surface, *_chart_from_embed(x))))
        return out
    p1, q1 = straight_coords(seg1.a), straight_coords(seg1.b)
    p2, q2 = straight_coords(seg2.a), straight_coords(seg2.b)
    hits = _seg_intersect_2d(p1, q1, p2, q2, eps)
    out = []
    for t, u, x in hits:
        if t == "overlap":
            out.append((t, u, x))
        else:
            out.append((t, u, from_straight(surface, x)))
    return out


# ---------------------------------------------------------------------------
# polygon area
# ---------------------------------------------------------------------------

def _shoelace(coords) -> float:
    s = 0.0
    n = len(coords)
    for i in range(n):
        x0, y0 = coords[i]
        x1, y1 = coords[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * s


def _check_polygon_simple(vertices, segs, eps):
    n = len(segs)
    for i in range(n):
        for j in range(i + 1, n):
            adjacent = (j == i + 1) or (i == 0 and j == n - 1)
            hits = segment_intersections(segs[i], segs[j], eps)
            for t, u, _ in hits:
                if t == "overlap":
                    raise SelfIntersectingPolygon(f"edges {i} and {j} overlap")
                if adjacent:
                    # only the shared endpoint may touch
                    if j == i + 1 and abs(t - 1.0) < 1e-9 and abs(u) < 1e-9:
                        continue
                    if i == 0 and j == n - 1 and abs(t) < 1e-9 and abs(u - 1.0) < 1e-9:
                        continue
                raise SelfIntersectingPolygon(f"edges {i} and {j} intersect")


def polygon_area(vertices, tol: float | None = None) -> float:
    """Enclosed area of a simple geodesic polygon (vertex order either way).

    Spherical area equals the angle excess over curvature, hyperbolic area the
    angle defect over |curvature|.
    """
    if len(vertices) < 3:
        raise SelfIntersectingPolygon("a polygon needs at least 3 vertices")
    surface = vertices[0].surface
    for v in vertices[1:]:
        if v.surface != surface:
            raise MismatchedSurface("polygon vertices on different surfaces")
    eps = tol if tol is not None else 1e-12
    n = len(vertices)
    segs = [geodesic_connect(vertices[i], vertices[(i + 1) % n]) for i in range(n)]
    _check_polygon_simple(vertices, segs, eps)

    if surface.kind == FLAT:
        return abs(_shoelace([v.coords for v in vertices]))

    # interior-angle sum assuming counterclockwise order; the value itself
    # tells us whether the order was actually clockwise
    total = 0.0
    for i in range(n):
        d_next = segs[i].dir_at_a
        d_prev = segs[(i - 1) % n].dir_at_b
        total += angle_ccw(d_next, d_prev)
    excess = total - (n - 2) * math.pi
    if surface.kind == HYPERBOLIC:
        area = -excess if excess < 0.0 else excess - 4.0 * math.pi
        return area / (-surface.curvature)
    area = excess if excess <= TWO_PI else 4.0 * math.pi - excess
    return area / surface.curvature
