"""Surface model tests: distances, directions, exponential map, areas."""

import math

import numpy as np
import pytest
from shapely.geometry import Polygon

from gnet import surfaces as S
from gnet.errors import (
    AntipodalPoints,
    CoincidentPoints,
    MismatchedBasePoint,
    OutOfChart,
    SelfIntersectingPolygon,
)

import oracles

FLAT = S.flat()
HYP = S.hyperbolic(-1.0)
SPH = S.spherical(1.0)


def test_flat_three_four_five():
    seg = S.geodesic_connect(FLAT.point(0, 0), FLAT.point(3, 4))
    assert seg.length == pytest.approx(5.0, abs=1e-15)
    assert seg.dir_at_a.theta == pytest.approx(math.atan2(4, 3), abs=1e-15)


def test_hyperbolic_diameter_matches_metric_quadrature():
    seg = S.geodesic_connect(HYP.point(0, 0), HYP.point(0.5, 0))
    assert seg.length == pytest.approx(2.0 * math.atanh(0.5), abs=1e-12)
    assert seg.length == pytest.approx(oracles.poincare_diameter_length(0.5), abs=1e-10)


def test_spherical_equator_law_of_cosines():
    a = SPH.point(0.0, math.pi / 2)
    b = SPH.point(2 * math.pi / 3, math.pi / 2)
    seg = S.geodesic_connect(a, b)
    assert seg.length == pytest.approx(2 * math.pi / 3, abs=1e-12)
    assert seg.length == pytest.approx(oracles.spherical_side(a.coords, b.coords), abs=1e-12)


def test_connect_errors():
    with pytest.raises(CoincidentPoints):
        S.geodesic_connect(FLAT.point(1, 2), FLAT.point(1, 2))
    with pytest.raises(AntipodalPoints):
        S.geodesic_connect(SPH.point(0.0, math.pi / 2), SPH.point(math.pi, math.pi / 2))
    with pytest.raises(OutOfChart):
        HYP.point(1.2, 0.0)
    with pytest.raises(OutOfChart):
        SPH.point(0.0, 2.5)


def test_angle_ccw_basics():
    p = FLAT.point(0, 0)
    d1 = S.TangentDir(p, 0.0)
    d2 = S.TangentDir(p, math.pi / 2)
    assert S.angle_ccw(d1, d1) == 0.0
    assert S.angle_ccw(d1, d2) == pytest.approx(math.pi / 2)
    with pytest.raises(MismatchedBasePoint):
        S.angle_ccw(d1, S.TangentDir(FLAT.point(1, 0), 0.0))


def test_angle_ccw_complementarity():
    rng = np.random.default_rng(0)
    p = HYP.point(0.3, -0.2)
    for _ in range(200):
        t1, t2 = rng.uniform(0, 2 * math.pi, size=2)
        if abs(t1 - t2) < 1e-12:
            continue
        d1, d2 = S.TangentDir(p, t1), S.TangentDir(p, t2)
        assert S.angle_ccw(d1, d2) + S.angle_ccw(d2, d1) == pytest.approx(2 * math.pi, abs=1e-12)


SURFACE_SAMPLES = {
    "flat": (FLAT, lambda rng: (rng.uniform(-2, 2), rng.uniform(-2, 2))),
    "hyperbolic": (HYP, lambda rng: tuple(rng.uniform(-0.55, 0.55, size=2))),
    "spherical": (SPH, lambda rng: (rng.uniform(0, 2 * math.pi), rng.uniform(0.15, 1.4))),
}


@pytest.mark.parametrize("kind", sorted(SURFACE_SAMPLES))
def test_triangle_inequality(kind):
    surface, sample = SURFACE_SAMPLES[kind]
    rng = np.random.default_rng(hash(kind) % 2 ** 31)
    for _ in range(150):
        p, q, r = (surface.point(*sample(rng)) for _ in range(3))
        try:
            pq = S.geodesic_connect(p, q).length
            qr = S.geodesic_connect(q, r).length
            pr = S.geodesic_connect(p, r).length
        except CoincidentPoints:
            continue
        assert pr <= pq + qr + 1e-9


@pytest.mark.parametrize("kind", sorted(SURFACE_SAMPLES))
def test_direction_consistency_against_geodesic_ode(kind):
    # the initial direction, integrated by the chart ODE for the segment
    # length, must land on the far endpoint
    surface, sample = SURFACE_SAMPLES[kind]
    rng = np.random.default_rng(hash(kind) % 2 ** 31 + 1)
    for _ in range(10):
        p = surface.point(*sample(rng))
        q = surface.point(*sample(rng))
        try:
            seg = S.geodesic_connect(p, q)
        except CoincidentPoints:
            continue
        landed = oracles.integrate_geodesic(surface, p.coords, seg.dir_at_a.theta, seg.length)
        err = oracles.chart_distance(surface, landed, q.coords)
        assert err < 1e-7


@pytest.mark.parametrize("kind", sorted(SURFACE_SAMPLES))
def test_point_at_round_trip(kind):
    surface, sample = SURFACE_SAMPLES[kind]
    rng = np.random.default_rng(hash(kind) % 2 ** 31 + 2)
    for _ in range(50):
        p = surface.point(*sample(rng))
        theta = rng.uniform(0, 2 * math.pi)
        dist = rng.uniform(0.05, 0.8)
        try:
            q = S.point_at(p, theta, dist)
            seg = S.geodesic_connect(p, q)
        except OutOfChart:
            continue
        assert seg.length == pytest.approx(dist, abs=1e-10)
        assert S.wrap_signed(seg.dir_at_a.theta - theta) == pytest.approx(0.0, abs=1e-9)


# ---------------------------------------------------------------------------
# polygon areas
# ---------------------------------------------------------------------------

def test_flat_unit_square_area():
    sq = [FLAT.point(0, 0), FLAT.point(1, 0), FLAT.point(1, 1), FLAT.point(0, 1)]
    assert S.polygon_area(sq) == pytest.approx(1.0, abs=1e-12)
    assert S.polygon_area(list(reversed(sq))) == pytest.approx(1.0, abs=1e-12)


def test_flat_polygon_matches_shapely():
    rng = np.random.default_rng(5)
    for _ in range(50):
        n = int(rng.integers(3, 9))
        angles = np.sort(rng.uniform(0, 2 * math.pi, size=n))
        if np.diff(angles).min(initial=2 * math.pi) < 0.05:
            continue
        radii = rng.uniform(0.4, 2.0, size=n)
        pts = [(r * math.cos(a), r * math.sin(a)) for a, r in zip(angles, radii)]
        ours = S.polygon_area([FLAT.point(*p) for p in pts])
        assert ours == pytest.approx(Polygon(pts).area, abs=1e-12)


def test_spherical_octant_triangle():
    tri = [SPH.point(0, math.pi / 2), SPH.point(math.pi / 2, math.pi / 2), SPH.point(0, 1e-12)]
    assert S.polygon_area(tri) == pytest.approx(math.pi / 2, abs=1e-8)


def test_spherical_triangle_matches_lhuilier():
    rng = np.random.default_rng(7)
    for _ in range(40):
        pts = [(rng.uniform(0, 2 * math.pi), rng.uniform(0.2, 1.35)) for _ in range(3)]
        try:
            area = S.polygon_area([SPH.point(*p) for p in pts])
        except SelfIntersectingPolygon:
            continue
        sides = [oracles.spherical_side(pts[i], pts[(i + 1) % 3]) for i in range(3)]
        assert area == pytest.approx(oracles.lhuilier_area(*sides), abs=1e-9)


def test_hemisphere_latitude_triangle_area_is_pi():
    colat = math.acos(1.0 / 3.0)
    tri = [SPH.point(k * 2 * math.pi / 3, colat) for k in range(3)]
    assert S.polygon_area(tri) == pytest.approx(math.pi, abs=1e-12)


def test_equator_triangle_covers_half_sphere():
    tri = [SPH.point(k * 2 * math.pi / 3, math.pi / 2) for k in range(3)]
    assert S.polygon_area(tri) == pytest.approx(2 * math.pi, abs=1e-12)


def test_hyperbolic_triangle_area_angle_defect_and_quadrature():
    rng = np.random.default_rng(11)
    for _ in range(25):
        pts = [HYP.point(*rng.uniform(-0.6, 0.6, size=2)) for _ in range(3)]
        try:
            area = S.polygon_area(pts)
        except SelfIntersectingPolygon:
            continue
        segs = [S.geodesic_connect(pts[i], pts[(i + 1) % 3]) for i in range(3)]
        angsum = 0.0
        for i in range(3):
            a = S.angle_ccw(segs[i].dir_at_a, segs[(i - 1) % 3].dir_at_b)
            angsum += min(a, 2 * math.pi - a)
        assert area == pytest.approx(math.pi - angsum, abs=1e-8)
        klein = [S.straight_coords(p) for p in pts]
        assert area == pytest.approx(oracles.klein_polygon_area(klein), abs=1e-8)


def test_polygon_rejects_self_intersection():
    bow = [FLAT.point(0, 0), FLAT.point(1, 1), FLAT.point(1, 0), FLAT.point(0, 1)]
    with pytest.raises(SelfIntersectingPolygon):
        S.polygon_area(bow)


def test_hyperbolic_scaled_curvature():
    h4 = S.hyperbolic(-4.0)  # doubling k halves all lengths
    seg1 = S.geodesic_connect(HYP.point(0, 0), HYP.point(0.5, 0))
    seg2 = S.geodesic_connect(h4.point(0, 0), h4.point(0.5, 0))
    assert seg2.length == pytest.approx(seg1.length / 2.0, abs=1e-12)
