"""Independent numerical oracles used by the tests.

Everything here deliberately avoids the library's own closed forms: geodesics
are integrated from the chart ODEs, hyperbolic areas come from quadrature of
the Klein-coordinate area element, spherical triangle areas from l'Huilier.
"""

import math

import numpy as np
from scipy.integrate import quad, solve_ivp

from gnet import surfaces as S


def integrate_geodesic(surface, start, theta, length):
    """Land point of the unit-speed geodesic ODE from `start` with initial
    frame angle `theta`, integrated for arclength `length`."""
    if surface.kind == S.FLAT:
        return (start[0] + length * math.cos(theta),
                start[1] + length * math.sin(theta))
    if surface.kind == S.HYPERBOLIC:
        k = math.sqrt(-surface.curvature)

        def rhs(_t, y):
            x, yy, vx, vy = y
            w = 1.0 - x * x - yy * yy
            px, py = 2.0 * x / w, 2.0 * yy / w
            ax = -(px * vx * vx + 2.0 * py * vx * vy - px * vy * vy)
            ay = -(-py * vx * vx + 2.0 * px * vx * vy + py * vy * vy)
            return [vx, vy, ax, ay]

        lam = (2.0 / k) / (1.0 - start[0] ** 2 - start[1] ** 2)
        v0 = (math.cos(theta) / lam, math.sin(theta) / lam)
        sol = solve_ivp(rhs, (0.0, length), [*start, *v0],
                        rtol=1e-12, atol=1e-12, dense_output=False)
        return (sol.y[0][-1], sol.y[1][-1])

    rho = 1.0 / math.sqrt(surface.curvature)

    def rhs(_t, y):
        lon, c, vl, vc = y
        return [vl, vc,
                -2.0 * (math.cos(c) / math.sin(c)) * vc * vl,
                math.sin(c) * math.cos(c) * vl * vl]

    lon0, c0 = start
    v0 = (math.cos(theta) / (rho * math.sin(c0)), -math.sin(theta) / rho)
    sol = solve_ivp(rhs, (0.0, length), [lon0, c0, *v0],
                    rtol=1e-12, atol=1e-12)
    return (sol.y[0][-1] % (2.0 * math.pi), sol.y[1][-1])


def chart_distance(surface, a, b):
    """Distance between landed chart points, for comparing ODE landings."""
    pa = S.Point(surface, *a)
    pb = S.Point(surface, *b)
    try:
        return S.geodesic_connect(pa, pb).length
    except S.CoincidentPoints:
        return 0.0


def poincare_diameter_length(x: float) -> float:
    """Quadrature of the curvature -1 disk metric along [0, x] on a diameter."""
    val, _err = quad(lambda t: 2.0 / (1.0 - t * t), 0.0, x, epsabs=1e-14)
    return val


def klein_polygon_area(vertices, curvature=-1.0) -> float:
    """Hyperbolic area of the polygon with the given Klein-model vertices.

    Fans from the origin using the radial antiderivative of the area element
    dx dy / (1-r^2)^(3/2); each edge contributes a smooth 1d integral."""
    n = len(vertices)
    total = 0.0
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]

        def f(t):
            x = x0 + t * (x1 - x0)
            y = y0 + t * (y1 - y0)
            r2 = x * x + y * y
            dtheta = (x * (y1 - y0) - y * (x1 - x0))
            if r2 < 1e-30:
                return 0.5 * dtheta
            return dtheta / r2 * (1.0 / math.sqrt(1.0 - r2) - 1.0)

        val, _err = quad(f, 0.0, 1.0, epsabs=1e-13, limit=200)
        total += val
    return abs(total) / (-curvature)


def lhuilier_area(a, b, c) -> float:
    """Spherical triangle excess from its side lengths (unit sphere)."""
    s = 0.5 * (a + b + c)
    t = math.tan(0.5 * s) * math.tan(0.5 * (s - a)) \
        * math.tan(0.5 * (s - b)) * math.tan(0.5 * (s - c))
    return 4.0 * math.atan(math.sqrt(max(t, 0.0)))


def spherical_side(p, q) -> float:
    """Great-circle distance on the unit sphere from (lon, colat) pairs, by
    the spherical law of cosines."""
    lon1, c1 = p
    lon2, c2 = q
    cosd = math.cos(c1) * math.cos(c2) + math.sin(c1) * math.sin(c2) * math.cos(lon1 - lon2)
    return math.acos(max(-1.0, min(1.0, cosd)))


def brute_force_weber(points, lo, hi, grid=200):
    """Grid scan + Nelder-Mead polish of the total spoke length."""
    from scipy.optimize import minimize

    def cost(p):
        return sum(math.hypot(p[0] - q[0], p[1] - q[1]) for q in points)

    best, best_val = None, math.inf
    for x in np.linspace(lo[0], hi[0], grid):
        for y in np.linspace(lo[1], hi[1], grid):
            v = cost((x, y))
            if v < best_val:
                best, best_val = (x, y), v
    res = minimize(cost, best, method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
    return tuple(res.x)
