"""Numerical oracle for the staircase-region argument.

The region between a leftwards and a rightwards staircase of unit-circle
quarter arcs anchored at (m, 0) traps every partial sum of the re-angled
unit vectors of a balanced configuration; membership, the arc fact and the
iterated sum walk are all checkable here.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionViolated, StartOutsideRegion
from .surfaces import TWO_PI, wrap_angle

DEFAULT_REGION_TOL = 1e-9


class RegionLocation(enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    CORNER = "corner"
    OUTSIDE = "outside"


def in_region(p, m: int, tol: float = DEFAULT_REGION_TOL) -> RegionLocation:
    """Classify a point against the staircase region anchored at (m, 0).

    For y in [l, l+1] the left boundary is x = m-l-1+sqrt(1-(y-l)^2) and the
    right boundary x = m+l+1-sqrt(1-(y-l)^2); corners are the lattice joints
    (m-l, l) and (m+l, l)."""
    x, y = float(p[0]), float(p[1])
    if y < -tol:
        return RegionLocation.OUTSIDE
    y = max(y, 0.0)
    lc = round(y)
    if lc >= 0 and abs(y - lc) <= tol:
        for cx in (m - lc, m + lc):
            if math.hypot(x - cx, y - lc) <= tol:
                return RegionLocation.CORNER
    band = min(int(math.floor(y)), 10 ** 9)
    cl = (m - band - 1, band)
    cr = (m + band + 1, band)
    if x < cl[0] - tol or x > cr[0] + tol:
        return RegionLocation.OUTSIDE
    dl = math.hypot(x - cl[0], y - cl[1])
    dr = math.hypot(x - cr[0], y - cr[1])
    if dl < 1.0 - tol or dr < 1.0 - tol:
        return RegionLocation.OUTSIDE
    if abs(dl - 1.0) <= tol or abs(dr - 1.0) <= tol:
        return RegionLocation.BOUNDARY
    return RegionLocation.INTERIOR


def region_classify_batch(xs: np.ndarray, ys: np.ndarray, m: int,
                          tol: float = DEFAULT_REGION_TOL) -> np.ndarray:
    """Vectorized in_region; codes 0=interior 1=boundary 2=corner 3=outside."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    out = np.empty(xs.shape, dtype=np.int8)
    below = ys < -tol
    y = np.maximum(ys, 0.0)
    lc = np.rint(y)
    near_level = np.abs(y - lc) <= tol
    corner = near_level & (
        (np.hypot(xs - (m - lc), y - lc) <= tol)
        | (np.hypot(xs - (m + lc), y - lc) <= tol))
    band = np.floor(y)
    clx = m - band - 1.0
    crx = m + band + 1.0
    dl = np.hypot(xs - clx, y - band)
    dr = np.hypot(xs - crx, y - band)
    outside = below | (xs < clx - tol) | (xs > crx + tol) \
        | (dl < 1.0 - tol) | (dr < 1.0 - tol)
    boundary = (np.abs(dl - 1.0) <= tol) | (np.abs(dr - 1.0) <= tol)
    out[:] = 0
    out[boundary] = 1
    out[corner & ~below] = 2
    out[outside & ~corner] = 3
    # corners sitting below the floor are still outside
    out[below] = 3
    return out


def unit_step(c: int, theta: float):
    """The map e(C, theta) = (C cos theta, sin theta)."""
    return (c * math.cos(theta), math.sin(theta))


# ---------------------------------------------------------------------------
# arc fact
# ---------------------------------------------------------------------------

@dataclass
class ArcFactReport:
    start: tuple
    start_class: RegionLocation
    c: int
    theta_max: float
    samples: int
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def arc_fact_check(start, c: int, theta_max: float, m: int,
                   samples: int = 128, tol: float = DEFAULT_REGION_TOL) -> ArcFactReport:
    """Sample gamma(theta) = start - e(C,0) + e(C,theta) over [0, theta_max].

    Asserts that every sample stays in the region, that only theta = 0 can
    sit in a corner, and that a non-corner start keeps every theta > 0 sample
    in the interior."""
    if c not in (-1, 1):
        raise PreconditionViolated("c-in-pm-1", str(c))
    if not 0.0 <= theta_max < math.pi / 2.0:
        raise PreconditionViolated("theta-max-below-90", f"{math.degrees(theta_max)} deg")
    start_class = in_region(start, m, tol)
    if start_class == RegionLocation.OUTSIDE:
        raise StartOutsideRegion(str(start))
    report = ArcFactReport(tuple(start), start_class, c, theta_max, samples)
    thetas = np.linspace(0.0, theta_max, samples)
    xs = start[0] - c + c * np.cos(thetas)
    ys = start[1] + np.sin(thetas)
    codes = region_classify_batch(xs, ys, m, tol)
    positive = thetas > tol
    if (codes == 3).any():
        k = int(np.argmax(codes == 3))
        report.violations.append(("left-region", float(thetas[k])))
    hits = (codes == 2) & positive
    if hits.any():
        k = int(np.argmax(hits))
        report.violations.append(("corner-at-positive-theta", float(thetas[k])))
    if start_class != RegionLocation.CORNER:
        soft = positive & (codes != 0) & (codes != 3)
        if soft.any():
            k = int(np.argmax(soft))
            report.violations.append(("not-interior", float(thetas[k])))
    return report


@dataclass
class MonteCarloReport:
    trials: int
    violations: int
    corner_starts: int
    boundary_starts: int

    @property
    def ok(self) -> bool:
        return self.violations == 0


def arc_fact_monte_carlo(trials: int, seed: int = 0, samples_per_arc: int = 32,
                         anchors=(-3, -2, -1, 0, 1, 2, 3),
                         tol: float = DEFAULT_REGION_TOL) -> MonteCarloReport:
    """Random (start, C, theta_max) triples against the arc fact; starts are
    drawn inside the region with a sprinkling of exact boundary points and
    corners."""
    rng = np.random.default_rng(seed)
    violations = 0
    n_corner = n_boundary = 0
    per = max(1, trials // len(anchors))
    for m in anchors:
        bands = rng.integers(0, 4, size=per)
        yfrac = rng.uniform(0.0, 1.0, size=per)
        y = bands + yfrac
        kind = rng.uniform(0.0, 1.0, size=per)
        root = np.sqrt(np.clip(1.0 - yfrac ** 2, 0.0, 1.0))
        xl = m - bands - 1.0 + root
        xr = m + bands + 1.0 - root
        u = rng.uniform(0.0, 1.0, size=per)
        x = xl + u * (xr - xl)
        # exact boundary (left or right staircase)
        on_b = kind < 0.15
        x[on_b & (u < 0.5)] = xl[on_b & (u < 0.5)]
        x[on_b & (u >= 0.5)] = xr[on_b & (u >= 0.5)]
        # exact corners
        on_c = kind > 0.9
        y[on_c] = bands[on_c].astype(float)
        left_c = on_c & (u < 0.5)
        x[left_c] = m - bands[left_c]
        x[on_c & (u >= 0.5)] = m + bands[on_c & (u >= 0.5)]
        cs = np.where(rng.uniform(size=per) < 0.5, 1, -1)
        tmax = rng.uniform(0.0, math.pi / 2.0 - 1e-9, size=per)

        thetas = np.linspace(0.0, 1.0, samples_per_arc)[None, :] * tmax[:, None]
        gx = x[:, None] - cs[:, None] + cs[:, None] * np.cos(thetas)
        gy = y[:, None] + np.sin(thetas)
        codes = region_classify_batch(gx.ravel(), gy.ravel(), m, tol).reshape(gx.shape)
        start_codes = region_classify_batch(x, y, m, tol)
        n_corner += int((start_codes == 2).sum())
        n_boundary += int((start_codes == 1).sum())
        positive = thetas > tol
        bad = (codes == 3).any(axis=1)
        bad |= ((codes == 2) & positive).any(axis=1)
        noncorner = start_codes != 2
        bad |= noncorner & (((codes != 0) & positive).any(axis=1))
        violations += int(bad.sum())
    return MonteCarloReport(per * len(anchors), violations, n_corner, n_boundary)


# ---------------------------------------------------------------------------
# the iterated sum walk of a balanced configuration
# ---------------------------------------------------------------------------

@dataclass
class SumWalkReport:
    degree: int
    b_index: int
    m: int
    combined: float
    alpha: float
    gamma: float
    angle_to_y_axis: float
    partial_classes: list
    failures: list = field(default_factory=list)
    partials: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def sum_walk_verify(directions, b_index: int, tol: float = 1e-9) -> SumWalkReport:
    """Run the staircase walk for a balanced vertex of degree >= 5 whose edge
    at b_index has a combined angle of at least 180 degrees.

    Rotates the frame so the rotation predecessor of b points along the
    negative x-axis, splits the remaining edges into left/right unit steps
    e(C, theta), and checks that every partial sum stays in the staircase
    region, that the final sum is interior with anchor m = 0 (so the degree
    is odd), and that the flanking angles land in (60, 120) degrees."""
    dirs = [wrap_angle(t) for t in directions]
    n = len(dirs)
    if n < 5:
        raise PreconditionViolated("degree-at-least-5", str(n))
    sx = sum(math.cos(t) for t in dirs)
    sy = sum(math.sin(t) for t in dirs)
    if math.hypot(sx, sy) > 1e-6:
        raise PreconditionViolated("balanced", f"residual {math.hypot(sx, sy):.3g}")
    order = sorted(range(n), key=lambda i: dirs[i])
    pos = order.index(b_index)
    a_idx = order[pos - 1]
    c_idx = order[(pos + 1) % n]
    alpha = wrap_angle(dirs[b_index] - dirs[a_idx])
    gamma = wrap_angle(dirs[c_idx] - dirs[b_index])
    combined = alpha + gamma
    if combined < math.pi - 1e-12:
        raise PreconditionViolated("combined-at-least-180",
                                   f"{math.degrees(combined):.3f} deg")

    # rotate the frame: a onto the negative x-axis
    rot = math.pi - dirs[a_idx]
    b_angle = wrap_angle(dirs[b_index] + rot)
    others = [wrap_angle(dirs[i] + rot) for i in range(n) if i != b_index]
    others.sort()

    steps = []
    for t in others:
        yc = math.sin(t)
        xc = math.cos(t)
        if yc < -1e-9:
            raise PreconditionViolated("upper-half-plane",
                                       f"edge angle {math.degrees(t):.3f} deg")
        yc = max(yc, 0.0)
        c = 1 if xc >= 0.0 else -1
        theta = math.atan2(yc, abs(xc))
        if theta >= math.pi / 2.0 - 1e-12:
            raise PreconditionViolated("theta-strictly-below-90")
        steps.append((c, theta))

    m = sum(c for c, _ in steps)
    report = SumWalkReport(n, b_index, m, combined, alpha, gamma, 0.0, [])
    x, y = float(m), 0.0
    partials = [(x, y)]
    classes = [in_region((x, y), m, tol)]
    for c, theta in steps:
        x += c * math.cos(theta) - c
        y += math.sin(theta)
        partials.append((x, y))
        classes.append(in_region((x, y), m, tol))
    report.partials = partials
    report.partial_classes = classes

    if any(cl == RegionLocation.OUTSIDE for cl in classes):
        report.failures.append("partial-sum-left-region")
    if classes[-1] != RegionLocation.INTERIOR:
        report.failures.append("final-sum-not-interior")
    if m != 0:
        report.failures.append("anchor-not-zero")
    if (n - 1) % 2 != 0:
        report.failures.append("j-not-even")

    # final sum must be the negated b, a unit vector within 30 deg of +y
    bx, by = math.cos(b_angle), math.sin(b_angle)
    if math.hypot(x + bx, y + by) > 1e-9:
        report.failures.append("sum-not-minus-b")
    ang = math.atan2(x, y)  # signed angle from the +y axis
    report.angle_to_y_axis = ang
    if not abs(ang) < math.pi / 6.0 + tol:
        report.failures.append("sum-outside-30-deg-cone")
    lo, hi = math.pi / 3.0 - 1e-9, 2.0 * math.pi / 3.0 + 1e-9
    if not (lo < alpha < hi and lo < gamma < hi):
        report.failures.append("flank-angle-outside-60-120")
    return report


def generate_special_config(degree: int, rng, max_tries: int = 400):
    """Balanced direction set of odd degree >= 5 with some combined angle of
    at least 180 degrees; returns (directions, b_index) or None.

    Clusters the free directions in a narrow sector so the exact closing pair
    lands far away, which makes a large combined angle likely."""
    if degree < 5 or degree % 2 == 0:
        raise PreconditionViolated("odd-degree-at-least-5", str(degree))
    for _ in range(max_tries):
        width = rng.uniform(math.radians(20.0), math.radians(150.0))
        phi0 = rng.uniform(0.0, TWO_PI)
        base = phi0 + rng.uniform(0.0, width, size=degree - 2)
        sx = float(np.cos(base).sum())
        sy = float(np.sin(base).sum())
        s = math.hypot(sx, sy)
        if s > 2.0 - 1e-9 or s < 1e-12:
            continue
        axis = math.atan2(-sy, -sx)
        delta = math.acos(s / 2.0)
        dirs = sorted(wrap_angle(t) for t in (*base.tolist(), axis - delta, axis + delta))
        gaps = [wrap_angle(dirs[(i + 1) % degree] - dirs[i]) for i in range(degree)]
        if min(gaps) < 1e-6:
            continue
        best_i, best = None, 0.0
        for i in range(degree):
            comb = gaps[i - 1] + gaps[i]
            if comb > best:
                best, best_i = comb, i
        if best < math.pi:
            continue
        # reject configurations with an edge on the would-be positive y-axis
        a_dir = dirs[best_i - 1]
        rotated = [wrap_angle(t + math.pi - a_dir) for t in dirs]
        if any(abs(t - math.pi / 2.0) < 1e-9 for t in rotated):
            continue
        return dirs, best_i
    return None
