"""Explicit nets: the Fermat tree, the four-boundary net with 27 balanced
vertices, and the hemisphere net that breaks the bound under positive
curvature."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import surfaces
from .relaxation import RelaxParams, fermat_point as _fermat_point, relax as _relax
from .errors import (
    BisectionNoSignChange,
    NoFermatPoint,
    ParamConstraintViolated,
)
from .net import DEFAULT_BALANCE_TOL, Net, NetVertex, classify_vertices
from .surfaces import Point, TWO_PI


@dataclass
class NetCensus:
    tol: float
    n_balanced: int
    n_unbalanced: int
    balanced_degree_histogram: dict
    max_imbalance_balanced: float
    extras: dict = field(default_factory=dict)

    def to_json_dict(self):
        return {
            "tol": self.tol,
            "n_balanced": self.n_balanced,
            "n_unbalanced": self.n_unbalanced,
            "balanced_degree_histogram": {str(k): v for k, v in
                                          sorted(self.balanced_degree_histogram.items())},
            "max_imbalance_balanced": self.max_imbalance_balanced,
            **{k: v for k, v in self.extras.items()},
        }


def census(net: Net, tol: float = DEFAULT_BALANCE_TOL) -> NetCensus:
    report = classify_vertices(net, tol)
    hist = {}
    worst = 0.0
    for vid in report.balanced_ids:
        deg = net.degree(vid)
        hist[deg] = hist.get(deg, 0) + 1
        worst = max(worst, report.entries[vid].norm)
    return NetCensus(tol, report.n_balanced, report.n_unbalanced, hist, worst)


# ---------------------------------------------------------------------------
# Fermat tree
# ---------------------------------------------------------------------------

def build_fermat_net(leaves, params: RelaxParams | None = None) -> Net:
    """Three fixed leaves plus one free balanced center (when it exists)."""
    if len(leaves) != 3:
        raise ParamConstraintViolated("three-leaves", str(len(leaves)))
    center = _fermat_point(*leaves, params=params)
    if center is None:
        raise NoFermatPoint("some triangle angle is 120 degrees or more")
    verts = {"o": NetVertex(center, False)}
    edges = []
    for i, p in enumerate(leaves):
        verts[f"l{i}"] = NetVertex(p, True)
        edges.append(("o", f"l{i}"))
    net = Net(leaves[0].surface, verts, edges, meta={"name": "fermat-tree"})
    net.validate()
    return net


# ---------------------------------------------------------------------------
# the four-boundary net (two 240-degree arcs facing each other)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Fig2Params:
    big_radius: float = 2.0     # arc about the upper centre
    small_radius: float = 1.0   # arc about the lower centre
    separation: float = 5.0     # distance between the two centres

    def validate(self):
        if not self.separation > self.big_radius + self.small_radius:
            raise ParamConstraintViolated(
                "d-gt-R-plus-r",
                f"d={self.separation} <= R+r={self.big_radius + self.small_radius}")
        if self.big_radius == self.small_radius:
            raise ParamConstraintViolated("R-neq-r", "equal radii merge the middle vertex")
        if self.big_radius <= 0 or self.small_radius <= 0:
            raise ParamConstraintViolated("positive-radii")


def _angle_at(b, p, q):
    """Unsigned angle at b between rays toward p and q (flat coords)."""
    a1 = math.atan2(p[1] - b[1], p[0] - b[0])
    a2 = math.atan2(q[1] - b[1], q[0] - b[0])
    d = abs(a1 - a2) % TWO_PI
    return min(d, TWO_PI - d)


def _bisect_angle(fun, lo, hi, target_residual=1e-12, max_iter=200):
    flo, fhi = fun(lo), fun(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise BisectionNoSignChange(f"f({lo})={flo:.4g}, f({hi})={fhi:.4g}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = fun(mid)
        if abs(fm) <= target_residual:
            return mid
        if flo * fm <= 0.0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def build_fig2_net(params: Fig2Params | None = None,
                   tol: float = DEFAULT_BALANCE_TOL):
    """Construct the flat net with four unbalanced vertices and (for the
    default parameters) 27 balanced ones; returns (net, census).

    The outer endpoints of two 240-degree arcs become the boundary vertices;
    the inscribed-angle theorem puts every arc point at 120 degrees over the
    opposite chord, the remaining arc vertices are found by bisection, a
    two-vertex tree is relaxed in, and finally every crossing of the straight
    chords is subdivided into a degree-4 vertex."""
    if params is None:
        params = Fig2Params()
    params.validate()
    R, r, d = params.big_radius, params.small_radius, params.separation
    f = surfaces.flat()
    P = (0.0, d)
    Q = (0.0, 0.0)

    def on_big(t_deg):
        t = math.radians(t_deg)
        return (P[0] + R * math.cos(t), P[1] + R * math.sin(t))

    def on_small(t_deg):
        t = math.radians(t_deg)
        return (Q[0] + r * math.cos(t), Q[1] + r * math.sin(t))

    A, C, B2 = on_big(210.0), on_big(330.0), on_big(270.0)
    X, Z, Y2 = on_small(150.0), on_small(30.0), on_small(90.0)

    angle_zxa = _angle_at(X, Z, A)
    if angle_zxa >= math.radians(120.0):
        raise ParamConstraintViolated(
            "ZXA-lt-120", f"angle ZXA = {math.degrees(angle_zxa):.2f} deg")

    # arc points with a 120-degree view of the far chord, by bisection
    t_b1 = _bisect_angle(lambda t: _angle_at(on_big(t), X, C) - math.radians(120.0),
                         210.0 + 1e-9, 270.0 - 1e-9)
    B1 = on_big(t_b1)
    t_y1 = _bisect_angle(lambda t: _angle_at(on_small(t), Z, A) - math.radians(120.0),
                         90.0 + 1e-9, 150.0 - 1e-9)
    Y1 = on_small(t_y1)
    B3 = (-B1[0], B1[1])
    Y3 = (-Y1[0], Y1[1])

    # the inner two-vertex tree, placed by relaxation
    lane = {"A": (Point(f, *A), True), "X": (Point(f, *X), True),
            "Z": (Point(f, *Z), True), "C": (Point(f, *C), True),
            "L": (Point(f, 0.5 * (A[0] + X[0]) * 0.6, 0.5 * (A[1] + X[1])), False),
            "N": (Point(f, -0.5 * (A[0] + X[0]) * 0.6, 0.5 * (A[1] + X[1])), False)}
    gprime = Net(f, lane, [("A", "L"), ("X", "L"), ("L", "N"), ("N", "Z"), ("N", "C")])
    gprime_relaxed, _ = _relax(
        gprime, RelaxParams(grad_tol=1e-10, max_iters=30000))
    L = gprime_relaxed.point("L").coords
    Nn = gprime_relaxed.point("N").coords

    named = {"A": A, "C": C, "X": X, "Z": Z, "B1": B1, "B2": B2, "B3": B3,
             "Y1": Y1, "Y2": Y2, "Y3": Y3, "L": L, "N": Nn}
    fixed_ids = {"A", "C", "X", "Z"}
    chords = [
        ("A", "B1"), ("B1", "C"), ("A", "B2"), ("B2", "C"), ("A", "B3"), ("B3", "C"),
        ("X", "Y1"), ("Y1", "Z"), ("X", "Y2"), ("Y2", "Z"), ("X", "Y3"), ("Y3", "Z"),
        ("B1", "X"), ("B3", "Z"), ("Y1", "A"), ("Y3", "C"), ("B2", "Y2"),
        ("A", "L"), ("X", "L"), ("L", "N"), ("N", "Z"), ("N", "C"),
        ("A", "Z"), ("C", "X"),
    ]
    net = subdivide_segments(f, named, chords, fixed_ids, merge_tol=1e-9)
    net.meta.update({"name": "four-boundary-net",
                     "params": {"R": R, "r": r, "d": d}})
    net.validate()
    cen = census(net, tol)
    cen.extras["angle_zxa_deg"] = math.degrees(angle_zxa)
    return net, cen


def subdivide_segments(surface, named, chords, fixed_ids, merge_tol=1e-9) -> Net:
    """Turn straight flat segments into an embedded net: every pairwise
    proper crossing becomes a vertex, coincident crossings merge, and
    segments passing through existing vertices are split there."""
    pts = dict(named)

    def seg_coords(ch):
        return pts[ch[0]], pts[ch[1]]

    # proper pairwise crossings
    raw_hits = []  # (chord_index, t, x, y)
    for i in range(len(chords)):
        for j in range(i + 1, len(chords)):
            if set(chords[i]) & set(chords[j]):
                continue
            p1, q1 = seg_coords(chords[i])
            p2, q2 = seg_coords(chords[j])
            hits = surfaces._seg_intersect_2d(p1, q1, p2, q2, eps=1e-13)
            for t, u, xy in hits:
                if t == "overlap":
                    raise ParamConstraintViolated("chords-overlap", f"{chords[i]} / {chords[j]}")
                if 1e-9 < t < 1.0 - 1e-9 and 1e-9 < u < 1.0 - 1e-9:
                    raw_hits.append((i, t, xy[0], xy[1]))
                    raw_hits.append((j, u, xy[0], xy[1]))

    # cluster coincident crossing points
    clusters = []  # (x, y, vid)
    hit_vertex = {}
    order = sorted(range(len(raw_hits)), key=lambda k: (raw_hits[k][2], raw_hits[k][3]))
    for k in order:
        _, _, x, y = raw_hits[k]
        # snap to an existing named vertex if the crossing lands on one
        snapped = None
        for vid, (vx, vy) in pts.items():
            if math.hypot(x - vx, y - vy) <= merge_tol:
                snapped = vid
                break
        if snapped is None:
            for cx, cy, vid in clusters:
                if math.hypot(x - cx, y - cy) <= merge_tol:
                    snapped = vid
                    break
        if snapped is None:
            snapped = f"c{len(clusters):02d}"
            clusters.append((x, y, snapped))
            pts[snapped] = (x, y)
        hit_vertex[k] = snapped

    per_chord = {i: [] for i in range(len(chords))}
    for k, (i, t, _, _) in enumerate(raw_hits):
        per_chord[i].append((t, hit_vertex[k]))

    # existing vertices sitting inside a chord also split it
    for i, (a, b) in enumerate(chords):
        p, q = pts[a], pts[b]
        dx, dy = q[0] - p[0], q[1] - p[1]
        ln2 = dx * dx + dy * dy
        for vid, (vx, vy) in pts.items():
            if vid in (a, b):
                continue
            t = ((vx - p[0]) * dx + (vy - p[1]) * dy) / ln2
            if not 1e-9 < t < 1.0 - 1e-9:
                continue
            px, py = p[0] + t * dx, p[1] + t * dy
            if math.hypot(vx - px, vy - py) <= merge_tol \
                    and all(abs(t - t0) > 1e-9 for t0, _ in per_chord[i]):
                per_chord[i].append((t, vid))

    verts = {vid: NetVertex(Point(surface, *xy), vid in fixed_ids)
             for vid, xy in pts.items()}
    edges = set()
    for i, (a, b) in enumerate(chords):
        stops = [(0.0, a)] + sorted(set(per_chord[i])) + [(1.0, b)]
        for (t0, v0), (t1, v1) in zip(stops, stops[1:]):
            if v0 == v1:
                continue
            edges.add((min(v0, v1), max(v0, v1)))
    return Net(surface, verts, sorted(edges))


# ---------------------------------------------------------------------------
# hemisphere net (positive curvature)
# ---------------------------------------------------------------------------

HEMISPHERE_COLATITUDE = math.acos(1.0 / 3.0)


def build_hemisphere_net(lift: float = 0.0, tol: float = DEFAULT_BALANCE_TOL):
    """Equilateral spherical triangle of area pi with three equator spokes:
    three balanced and three unbalanced vertices on the unit hemisphere.

    The triangle latitude solves cos(colatitude) = 1/3, which makes every
    interior angle 120 degrees.  `lift` raises the spoke feet above the
    equator (balance at the top vertices is unchanged since the spokes stay
    on their meridians)."""
    sp = surfaces.spherical(1.0)
    colat_feet = math.pi / 2.0 - lift
    if not 0.0 <= lift < math.pi / 2.0 - HEMISPHERE_COLATITUDE - 1e-6:
        raise ParamConstraintViolated("lift-range",
                                      "feet must stay strictly below the triangle")
    lons = [0.0, TWO_PI / 3.0, 2.0 * TWO_PI / 3.0]
    verts = {}
    for name, lon in zip("ABC", lons):
        verts[name] = NetVertex(Point(sp, lon, HEMISPHERE_COLATITUDE), False)
    for name, lon in zip("XYZ", lons):
        verts[name] = NetVertex(Point(sp, lon, colat_feet), True)
    edges = [("A", "B"), ("B", "C"), ("C", "A"), ("X", "A"), ("Y", "B"), ("Z", "C")]
    net = Net(sp, verts, edges, meta={"name": "hemisphere-net", "lift": lift})
    net.validate()
    return net, census(net, tol)


def hemisphere_sweep(samples: int = 21):
    """Sweep the triangle latitude and report enclosed curvature mass,
    interior angle and the vertex imbalance of the resulting net.

    Balance occurs exactly where the enclosed total curvature is pi; the
    sweep is the experiment hook for the positive-curvature question."""
    sp = surfaces.spherical(1.0)
    rows = []
    for k in range(samples):
        colat = math.radians(20.0 + (70.0 - 20.0) * k / (samples - 1))
        tri = [Point(sp, lon, colat) for lon in (0.0, TWO_PI / 3.0, 2.0 * TWO_PI / 3.0)]
        area = surfaces.polygon_area(tri)
        segs = [surfaces.geodesic_connect(tri[0], tri[1]),
                surfaces.geodesic_connect(tri[0], tri[2])]
        ang = surfaces.angle_ccw(segs[0].dir_at_a, segs[1].dir_at_a)
        ang = min(ang, TWO_PI - ang)
        foot = Point(sp, 0.0, math.pi / 2.0)
        spoke = surfaces.geodesic_connect(tri[0], foot)
        vx = math.cos(segs[0].dir_at_a.theta) + math.cos(segs[1].dir_at_a.theta) \
            + math.cos(spoke.dir_at_a.theta)
        vy = math.sin(segs[0].dir_at_a.theta) + math.sin(segs[1].dir_at_a.theta) \
            + math.sin(spoke.dir_at_a.theta)
        rows.append({"colatitude_deg": math.degrees(colat),
                     "curvature_mass": area,
                     "interior_angle_deg": math.degrees(ang),
                     "imbalance": math.hypot(vx, vy)})
    return rows
