"""Tests for the explicit nets: Fermat tree, the four-boundary net, the
hemisphere net."""

import math

import pytest

from gnet import constructions as C
from gnet import net as N
from gnet import surfaces as S
from gnet.errors import (
    BisectionNoSignChange,
    NoFermatPoint,
    ParamConstraintViolated,
)

FLAT = S.flat()
HYP = S.hyperbolic(-1.0)


# ---------------------------------------------------------------------------
# Fermat tree
# ---------------------------------------------------------------------------

def test_fermat_net_equilateral():
    leaves = [FLAT.point(math.cos(t), math.sin(t))
              for t in (0.4, 0.4 + 2 * math.pi / 3, 0.4 + 4 * math.pi / 3)]
    net = C.build_fermat_net(leaves)
    cen = C.census(net)
    assert cen.n_balanced == 1 and cen.n_unbalanced == 3
    o = net.point("o")
    assert math.hypot(o.x, o.y) < 1e-8


def test_fermat_net_leaf_angles_20_140_260():
    leaves = [FLAT.point(1.2 * math.cos(math.radians(a)), 1.2 * math.sin(math.radians(a)))
              for a in (20, 140, 260)]
    net = C.build_fermat_net(leaves)
    assert N.imbalance(net, "o").norm < 1e-10


def test_fermat_net_rejects_wide_triangle():
    with pytest.raises(NoFermatPoint):
        C.build_fermat_net([FLAT.point(0, 0), FLAT.point(1, 0), FLAT.point(-0.9, 0.05)])


def test_fermat_net_hyperbolic():
    leaves = [S.point_at(HYP.point(0, 0), t, 0.4)
              for t in (0.2, 0.2 + 2 * math.pi / 3, 0.2 + 4 * math.pi / 3)]
    net = C.build_fermat_net(leaves)
    assert N.imbalance(net, "o").norm < 1e-8
    gaps = N._gaps([net.direction("o", n) for n in net.rotation("o")])
    for g in gaps:
        assert g == pytest.approx(2 * math.pi / 3, abs=1e-6)


# ---------------------------------------------------------------------------
# the four-boundary net
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def fig2():
    return C.build_fig2_net(C.Fig2Params(2.0, 1.0, 5.0))


def test_fig2_boundary_and_balance(fig2):
    net, cen = fig2
    assert cen.n_unbalanced == 4
    report = N.classify_vertices(net)
    assert sorted(report.unbalanced_ids) == ["A", "C", "X", "Z"]
    assert cen.max_imbalance_balanced < 1e-6


def test_fig2_angle_zxa(fig2):
    _net, cen = fig2
    assert abs(cen.extras["angle_zxa_deg"] - 104.0) < 1.0


def test_fig2_thales_inscribed_angles(fig2):
    net, _cen = fig2
    # every point on the big arc sees the chord A-C at 120 degrees
    for b in ("B1", "B2", "B3"):
        pb, pa, pc = net.point(b), net.point("A"), net.point("C")
        v1 = math.atan2(pa.y - pb.y, pa.x - pb.x)
        v2 = math.atan2(pc.y - pb.y, pc.x - pb.x)
        ang = abs(v1 - v2) % (2 * math.pi)
        ang = min(ang, 2 * math.pi - ang)
        assert ang == pytest.approx(math.radians(120), abs=1e-9)
    for y in ("Y1", "Y2", "Y3"):
        py, px, pz = net.point(y), net.point("X"), net.point("Z")
        v1 = math.atan2(px.y - py.y, px.x - py.x)
        v2 = math.atan2(pz.y - py.y, pz.x - py.x)
        ang = abs(v1 - v2) % (2 * math.pi)
        ang = min(ang, 2 * math.pi - ang)
        assert ang == pytest.approx(math.radians(120), abs=1e-9)


def test_fig2_axis_mirror_symmetry(fig2):
    net, _cen = fig2
    pts = sorted((round(net.point(v).x, 9), round(net.point(v).y, 9))
                 for v in net.vertices)
    mirrored = sorted((round(-x, 9), y) for x, y in pts)
    for (x1, y1), (x2, y2) in zip(pts, mirrored):
        assert abs(x1 - x2) < 1e-8 and abs(y1 - y2) < 1e-8


def test_fig2_crossing_vertices_degree4_balanced(fig2):
    net, _cen = fig2
    report = N.classify_vertices(net, tol=1e-9)
    m_vertex = None
    for vid in net.vertices:
        if vid.startswith("c"):
            deg = net.degree(vid)
            assert deg in (4, 6)
            if deg == 6:
                assert m_vertex is None
                m_vertex = vid
            else:
                assert report.entries[vid].norm < 1e-9
    assert m_vertex is not None
    assert abs(net.point(m_vertex).x) < 1e-9  # on the axis
    assert report.entries[m_vertex].norm < 1e-9


def test_fig2_named_degree3_vertices(fig2):
    net, _cen = fig2
    for vid in ("B1", "B2", "B3", "Y1", "Y2", "Y3", "L", "N"):
        assert net.degree(vid) == 3


def test_fig2_parameter_violations():
    with pytest.raises(ParamConstraintViolated) as err:
        C.build_fig2_net(C.Fig2Params(2.0, 1.0, 2.5))
    assert err.value.which == "d-gt-R-plus-r"
    with pytest.raises(ParamConstraintViolated) as err:
        C.build_fig2_net(C.Fig2Params(2.0, 2.0, 5.0))
    assert err.value.which == "R-neq-r"


def test_fig2_parameter_openness():
    # one percent perturbations of each parameter still construct
    base = (2.0, 1.0, 5.0)
    for i in range(3):
        for sign in (-1, 1):
            vals = list(base)
            vals[i] *= 1.0 + sign * 0.01
            net, cen = C.build_fig2_net(C.Fig2Params(*vals))
            assert cen.n_unbalanced == 4
            assert cen.max_imbalance_balanced < 1e-6


def test_fig2_census_is_stable_across_small_radius_swap():
    # r > R also constructs (the bisection brackets still change sign)
    net, cen = C.build_fig2_net(C.Fig2Params(1.0, 2.0, 5.0))
    assert cen.n_unbalanced == 4


def test_bisection_requires_sign_change():
    with pytest.raises(BisectionNoSignChange):
        C._bisect_angle(lambda t: 1.0 + 0.0 * t, 0.0, 1.0)


# ---------------------------------------------------------------------------
# hemisphere net
# ---------------------------------------------------------------------------

def test_hemisphere_closed_form_latitude():
    assert math.cos(C.HEMISPHERE_COLATITUDE) == pytest.approx(1.0 / 3.0, abs=1e-15)
    # law-of-cosines derivation: interior angle 120 forces cos side = -1/3
    side = math.acos(-1.0 / 3.0)
    c = C.HEMISPHERE_COLATITUDE
    chord = math.cos(c) ** 2 + math.sin(c) ** 2 * math.cos(2 * math.pi / 3)
    assert chord == pytest.approx(math.cos(side), abs=1e-12)


def test_hemisphere_net_area_angles_balance():
    net, cen = C.build_hemisphere_net()
    tri = [net.point(v) for v in "ABC"]
    assert S.polygon_area(tri) == pytest.approx(math.pi, abs=1e-8)
    for v, nbrs in (("A", ("B", "C")), ("B", ("C", "A")), ("C", ("A", "B"))):
        s1 = S.geodesic_connect(net.point(v), net.point(nbrs[0]))
        s2 = S.geodesic_connect(net.point(v), net.point(nbrs[1]))
        ang = S.angle_ccw(s1.dir_at_a, s2.dir_at_a)
        ang = min(ang, 2 * math.pi - ang)
        assert ang == pytest.approx(math.radians(120), abs=1e-8)
    assert cen.n_balanced == 3 and cen.n_unbalanced == 3
    assert cen.balanced_degree_histogram == {3: 3}
    assert cen.max_imbalance_balanced < 1e-12


def test_hemisphere_lifted_feet_keep_balance():
    net, cen = C.build_hemisphere_net(lift=0.15)
    assert cen.n_balanced == 3 and cen.n_unbalanced == 3
    assert cen.max_imbalance_balanced < 1e-12
    for v in "XYZ":
        assert net.point(v).y == pytest.approx(math.pi / 2 - 0.15, abs=1e-15)


def test_hemisphere_sweep_balances_only_at_pi_mass():
    rows = C.hemisphere_sweep(41)
    best = min(rows, key=lambda r: r["imbalance"])
    assert abs(best["curvature_mass"] - math.pi) < 0.1
    assert abs(best["colatitude_deg"] - math.degrees(C.HEMISPHERE_COLATITUDE)) < 2.0
    worst = max(rows, key=lambda r: r["imbalance"])
    assert worst["imbalance"] > 0.1
