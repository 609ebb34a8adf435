"""Geodesic-net data model: embedded graph, rotation system, imbalance,
balanced-vertex classification, combined angles and the local lemma checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import surfaces
from .errors import (
    DegreeTooSmall,
    NetDegenerate,
    NetInvariantViolated,
    UnknownVertex,
    UnsupportedSurface,
)
from .surfaces import Point, SurfaceModel, TWO_PI, wrap_angle

DEFAULT_BALANCE_TOL = 1e-8

# two incident edges closer than this in direction make the rotation system
# meaningless
DIRECTION_GAP_MIN = 1e-7


@dataclass(frozen=True)
class NetVertex:
    point: Point
    fixed: bool


class Net:
    """Immutable embedded graph with geodesic edges.

    vertices: mapping id -> NetVertex (or (Point, fixed) pairs)
    edges: iterable of id pairs
    """

    def __init__(self, surface: SurfaceModel, vertices, edges, meta=None):
        self.surface = surface
        self.vertices: dict[str, NetVertex] = {}
        for vid, data in vertices.items():
            if not isinstance(data, NetVertex):
                data = NetVertex(*data)
            if data.point.surface != surface:
                raise NetInvariantViolated("surface", f"vertex {vid} on a different surface")
            self.vertices[str(vid)] = data
        self.edges: list[tuple[str, str]] = []
        seen = set()
        for u, v in edges:
            u, v = str(u), str(v)
            if u == v:
                raise NetInvariantViolated("simple-graph", f"loop at {u}")
            if u not in self.vertices or v not in self.vertices:
                raise NetInvariantViolated("edge-endpoints", f"({u}, {v}) references unknown vertex")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise NetInvariantViolated("simple-graph", f"duplicate edge ({u}, {v})")
            seen.add(key)
            self.edges.append(key)
        self.edges.sort()
        self.meta = dict(meta) if meta else {}

        self._adj: dict[str, list[str]] = {vid: [] for vid in self.vertices}
        for u, v in self.edges:
            self._adj[u].append(v)
            self._adj[v].append(u)

        # direction of the geodesic from u toward v, as a frame angle at u
        self._dir: dict[tuple[str, str], float] = {}
        self._len: dict[tuple[str, str], float] = {}
        for u, v in self.edges:
            seg = surfaces.geodesic_connect(self.point(u), self.point(v))
            self._dir[(u, v)] = seg.dir_at_a.theta
            self._dir[(v, u)] = seg.dir_at_b.theta
            self._len[(u, v)] = seg.length

        # rotation system: incident neighbors sorted counterclockwise
        self._rotation: dict[str, list[str]] = {}
        for vid in self.vertices:
            self._rotation[vid] = sorted(self._adj[vid], key=lambda n: self._dir[(vid, n)])

    # -- accessors ----------------------------------------------------------

    def point(self, vid: str) -> Point:
        try:
            return self.vertices[vid].point
        except KeyError:
            raise UnknownVertex(vid) from None

    def is_fixed(self, vid: str) -> bool:
        return self.vertices[vid].fixed

    def neighbors(self, vid: str) -> list[str]:
        if vid not in self._adj:
            raise UnknownVertex(vid)
        return list(self._adj[vid])

    def degree(self, vid: str) -> int:
        return len(self._adj[vid])

    def rotation(self, vid: str) -> list[str]:
        """Incident neighbors in counterclockwise order."""
        if vid not in self._rotation:
            raise UnknownVertex(vid)
        return list(self._rotation[vid])

    def direction(self, u: str, v: str) -> float:
        """Frame angle at u of the edge toward v."""
        try:
            return self._dir[(u, v)]
        except KeyError:
            raise NetInvariantViolated("edge-endpoints", f"no edge ({u}, {v})") from None

    def edge_length(self, u: str, v: str) -> float:
        key = (u, v) if u < v else (v, u)
        return self._len[key]

    def has_edge(self, u: str, v: str) -> bool:
        key = (u, v) if u < v else (v, u)
        return key in self._len

    def total_length(self) -> float:
        return sum(self._len.values())

    # -- structural validation ----------------------------------------------

    def validate(self, tol: float | None = None) -> None:
        """Raise unless connected, embedded and rotation-nondegenerate."""
        if tol is None:
            tol = self.surface.default_tol
        if not self.vertices:
            raise NetInvariantViolated("nonempty", "no vertices")
        # connectivity
        start = next(iter(self.vertices))
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for n in self._adj[v]:
                if n not in seen:
                    seen.add(n)
                    stack.append(n)
        if len(seen) != len(self.vertices):
            missing = sorted(set(self.vertices) - seen)
            raise NetInvariantViolated("connected", f"unreached vertices {missing[:5]}")
        # rotation degeneracy
        for vid, rot in self._rotation.items():
            if len(rot) < 2:
                continue
            if min(_gaps([self._dir[(vid, n)] for n in rot])) < DIRECTION_GAP_MIN:
                raise NetDegenerate(f"two edges at {vid} share a direction")
        # embedding: edges intersect only at shared endpoint vertices
        segs = {}
        for u, v in self.edges:
            segs[(u, v)] = surfaces.geodesic_connect(self.point(u), self.point(v))
        keys = list(segs)
        for i in range(len(keys)):
            for j in range(i + 1, len(keys)):
                (u1, v1), (u2, v2) = keys[i], keys[j]
                shared = {u1, v1} & {u2, v2}
                hits = surfaces.segment_intersections(segs[keys[i]], segs[keys[j]], eps=tol)
                for t, u, _pt in hits:
                    if t == "overlap":
                        raise NetInvariantViolated(
                            "embedded", f"edges {keys[i]} and {keys[j]} overlap")
                    if shared:
                        # touching at a shared endpoint is fine
                        end_t = t < 1e-7 or t > 1.0 - 1e-7
                        end_u = u < 1e-7 or u > 1.0 - 1e-7
                        if end_t and end_u:
                            continue
                    raise NetInvariantViolated(
                        "embedded", f"edges {keys[i]} and {keys[j]} cross")

    # -- derived nets ---------------------------------------------------------

    def with_positions(self, positions: dict[str, Point]) -> "Net":
        verts = {vid: NetVertex(positions.get(vid, nv.point), nv.fixed)
                 for vid, nv in self.vertices.items()}
        return Net(self.surface, verts, self.edges, meta=self.meta)

    def without_edges(self, removed) -> "Net":
        removed = {tuple(sorted(e)) for e in removed}
        kept = [e for e in self.edges if e not in removed]
        return Net(self.surface, self.vertices, kept, meta=self.meta)

    def subnet(self, vertex_ids) -> "Net":
        keep = set(vertex_ids)
        verts = {vid: nv for vid, nv in self.vertices.items() if vid in keep}
        edges = [e for e in self.edges if e[0] in keep and e[1] in keep]
        return Net(self.surface, verts, edges, meta=self.meta)


# ---------------------------------------------------------------------------
# imbalance and classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VertexBalance:
    vertex: str
    vector: tuple
    norm: float
    degree: int
    balanced: bool


@dataclass(frozen=True)
class ImbalanceReport:
    tol: float
    entries: dict = field(default_factory=dict)

    @property
    def balanced_ids(self):
        return sorted(v for v, e in self.entries.items() if e.balanced)

    @property
    def unbalanced_ids(self):
        return sorted(v for v, e in self.entries.items() if not e.balanced)

    @property
    def n_balanced(self):
        return len(self.balanced_ids)

    @property
    def n_unbalanced(self):
        return len(self.unbalanced_ids)

    def max_imbalance_over(self, ids) -> float:
        return max((self.entries[v].norm for v in ids), default=0.0)

    def to_json_dict(self):
        return {
            "tol": self.tol,
            "vertices": {
                v: {
                    "vector": list(e.vector),
                    "norm": e.norm,
                    "degree": e.degree,
                    "classification": "balanced" if e.balanced else "unbalanced",
                }
                for v, e in sorted(self.entries.items())
            },
            "n_balanced": self.n_balanced,
            "n_unbalanced": self.n_unbalanced,
        }


def imbalance(net: Net, vid: str, tol: float = DEFAULT_BALANCE_TOL) -> VertexBalance:
    """Sum of outgoing unit tangents at vid, in the tangent frame there."""
    if vid not in net.vertices:
        raise UnknownVertex(vid)
    sx = sy = 0.0
    for n in net.neighbors(vid):
        th = net.direction(vid, n)
        sx += math.cos(th)
        sy += math.sin(th)
    norm = math.hypot(sx, sy)
    deg = net.degree(vid)
    return VertexBalance(vid, (sx, sy), norm, deg, deg >= 3 and norm <= tol)


def classify_vertices(net: Net, tol: float = DEFAULT_BALANCE_TOL) -> ImbalanceReport:
    """Label every vertex; balanced needs degree >= 3 and norm <= tol."""
    entries = {vid: imbalance(net, vid, tol) for vid in net.vertices}
    return ImbalanceReport(tol=tol, entries=entries)


# ---------------------------------------------------------------------------
# combined angles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CombinedAngle:
    vertex: str
    b: str            # neighbor across the middle edge
    a: str            # rotation predecessor
    c: str            # rotation successor
    alpha: float      # ccw angle a -> b
    gamma: float      # ccw angle b -> c

    @property
    def combined(self) -> float:
        return self.alpha + self.gamma


def combined_angle(net: Net, vid: str, b: str) -> CombinedAngle:
    """Total angle swept from a through b to c for rotation-consecutive
    edges a, b, c at vid."""
    rot = net.rotation(vid)
    if len(rot) < 3:
        raise DegreeTooSmall(f"vertex {vid} has degree {len(rot)} < 3")
    if b not in rot:
        raise NetInvariantViolated("edge-endpoints", f"no edge ({vid}, {b})")
    i = rot.index(b)
    a = rot[i - 1]
    c = rot[(i + 1) % len(rot)]
    alpha = wrap_angle(net.direction(vid, b) - net.direction(vid, a))
    gamma = wrap_angle(net.direction(vid, c) - net.direction(vid, b))
    return CombinedAngle(vid, b, a, c, alpha, gamma)


# ---------------------------------------------------------------------------
# local lemma checks on a single vertex
# ---------------------------------------------------------------------------

def _gaps(dirs):
    """Consecutive ccw gaps of sorted direction angles."""
    d = sorted(dirs)
    return [wrap_angle(d[(i + 1) % len(d)] - d[i]) if len(d) > 1 else TWO_PI
            for i in range(len(d))]


def general_combined_bound(degree: int) -> float:
    """Upper bound on the combined angle by vertex degree, radians."""
    if degree == 3:
        return 4.0 * math.pi / 3.0
    if degree == 4:
        return math.pi
    return math.pi + 2.0 * math.asin(1.0 / (degree - 1))


@dataclass
class LocalLemmaReport:
    vertex: str
    degree: int
    balanced: bool
    violations: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_local_lemmas(net: Net, vid: str, tol: float = DEFAULT_BALANCE_TOL) -> LocalLemmaReport:
    """Evaluate the single-vertex angle lemmas at vid.

    Checks: every gap between rotation-consecutive edges is < 180 degrees;
    every tangent line has edges strictly on both sides; combined angles obey
    the degree-dependent bound; a combined angle of >= 180 degrees at degree
    >= 5 forces odd degree with both flanking angles in (60, 120) degrees.
    """
    bal = imbalance(net, vid, tol)
    report = LocalLemmaReport(vid, bal.degree, bal.balanced)
    report.details["imbalance"] = bal.norm
    slack = max(tol, 1e-12)
    dirs = [net.direction(vid, n) for n in net.rotation(vid)]

    gaps = _gaps(dirs)
    report.details["max_gap"] = max(gaps)
    if max(gaps) >= math.pi + slack:
        report.violations.append("gap-under-180")

    # straight-line lemma: check the lines spanned by each edge direction
    for phi in dirs:
        sides = [math.sin(th - phi) for th in dirs]
        if not (any(s > slack for s in sides) and any(s < -slack for s in sides)):
            report.violations.append("edge-on-each-side")
            break

    if bal.degree >= 3:
        bound = general_combined_bound(bal.degree)
        combineds = []
        for b in net.rotation(vid):
            ca = combined_angle(net, vid, b)
            combineds.append(ca)
            if bal.degree == 3 and abs(ca.combined - bound) > slack:
                report.violations.append("combined-240-at-degree-3")
            elif bal.degree == 4 and abs(ca.combined - bound) > slack:
                report.violations.append("combined-180-at-degree-4")
            elif bal.degree >= 5 and ca.combined >= bound + slack:
                report.violations.append("combined-bound-at-high-degree")
        report.details["max_combined"] = max(c.combined for c in combineds)
        if bal.degree >= 5:
            for ca in combineds:
                if ca.combined >= math.pi:
                    if bal.degree % 2 == 0:
                        report.violations.append("odd-degree-forced")
                    lo, hi = math.pi / 3.0 - slack, 2.0 * math.pi / 3.0 + slack
                    if not (lo < ca.alpha < hi and lo < ca.gamma < hi):
                        report.violations.append("flank-angles-60-120")
    report.violations = sorted(set(report.violations))
    return report


# ---------------------------------------------------------------------------
# convex hull of unbalanced vertices
# ---------------------------------------------------------------------------

def _monotone_chain(points):
    """Convex hull of 2d points, counterclockwise, no repeated endpoint."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _strictly_inside(hull, p, eps):
    if len(hull) < 3:
        return False
    for i in range(len(hull)):
        a, b = hull[i], hull[(i + 1) % len(hull)]
        if (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) <= eps:
            return False
    return True


@dataclass
class HullReport:
    hull_vertices: list
    violations: list
    n_balanced: int
    n_unbalanced: int

    @property
    def ok(self) -> bool:
        return not self.violations


def convex_hull_check(net: Net, tol: float = DEFAULT_BALANCE_TOL) -> HullReport:
    """Balanced vertices must lie strictly inside the convex hull of the
    unbalanced ones, and one balanced vertex forces at least three unbalanced.

    Works in straight-model coordinates (Klein for the hyperbolic disk)."""
    if net.surface.kind == surfaces.SPHERICAL:
        raise UnsupportedSurface("convex hull check needs a flat or hyperbolic net")
    report = classify_vertices(net, tol)
    coords = {vid: surfaces.straight_coords(net.point(vid)) for vid in net.vertices}
    hull_pts = _monotone_chain([coords[v] for v in report.unbalanced_ids])
    violations = []
    if report.n_balanced >= 1 and report.n_unbalanced < 3:
        violations.append(("at-least-three-unbalanced", None))
    for v in report.balanced_ids:
        if not _strictly_inside(hull_pts, coords[v], eps=tol):
            violations.append(("balanced-strictly-interior", v))
    return HullReport(hull_pts, violations, report.n_balanced, report.n_unbalanced)


# ---------------------------------------------------------------------------
# pruning edges between unbalanced vertices
# ---------------------------------------------------------------------------

@dataclass
class PruneResult:
    components: list
    removed_edges: list
    isolated_vertices: list
    rounds: int


def prune_irrelevant_edges(net: Net, tol: float = DEFAULT_BALANCE_TOL) -> PruneResult:
    """Drop edges whose both endpoints are unbalanced, reclassify, repeat.

    Returns the surviving connected components as nets; vertices left with no
    edges are reported separately (a bare vertex is not a valid net)."""
    current = net
    removed_all = []
    rounds = 0
    while True:
        rounds += 1
        report = classify_vertices(current, tol)
        doomed = [e for e in current.edges
                  if not report.entries[e[0]].balanced and not report.entries[e[1]].balanced]
        if not doomed:
            break
        removed_all.extend(doomed)
        current = current.without_edges(doomed)

    # split into connected components
    seen = set()
    components = []
    isolated = []
    for vid in sorted(current.vertices):
        if vid in seen:
            continue
        comp = {vid}
        stack = [vid]
        while stack:
            v = stack.pop()
            for n in current.neighbors(v):
                if n not in comp:
                    comp.add(n)
                    stack.append(n)
        seen |= comp
        if len(comp) == 1 and current.degree(vid) == 0:
            isolated.append(vid)
        else:
            components.append(current.subnet(comp))
    return PruneResult(components, removed_all, isolated, rounds)


# ---------------------------------------------------------------------------
# random balanced configurations (closing-vectors construction)
# ---------------------------------------------------------------------------

def random_balanced_directions(degree: int, rng, max_tries: int = 1000) -> list[float]:
    """Sample `degree` unit directions with zero vector sum.

    degree-2 directions are free; the configuration is closed exactly by two
    unit vectors whose sum is the negated partial sum (possible iff its norm
    is at most 2; resample otherwise)."""
    if degree < 3:
        raise ValueError("degree must be >= 3")
    for _ in range(max_tries):
        base = rng.uniform(0.0, TWO_PI, size=degree - 2)
        sx = float(np.cos(base).sum())
        sy = float(np.sin(base).sum())
        s = math.hypot(sx, sy)
        if s > 2.0 - 1e-9:
            continue
        if s < 1e-12:
            phi = float(rng.uniform(0.0, TWO_PI))
            pair = (phi, phi + math.pi)
        else:
            axis = math.atan2(-sy, -sx)
            delta = math.acos(s / 2.0)
            pair = (axis - delta, axis + delta)
        dirs = sorted(wrap_angle(t) for t in (*base.tolist(), *pair))
        if min(_gaps(dirs)) < DIRECTION_GAP_MIN:
            continue
        return dirs
    raise RuntimeError("failed to close a balanced configuration")


def star_net(surface: SurfaceModel, directions, spoke_length: float = 1.0,
             center=(0.0, 0.0)) -> Net:
    """One free center with fixed leaves placed along the given directions."""
    cpt = Point(surface, *center)
    verts = {"o": NetVertex(cpt, False)}
    edges = []
    for i, th in enumerate(directions):
        leaf = surfaces.point_at(cpt, th, spoke_length)
        verts[f"l{i}"] = NetVertex(leaf, True)
        edges.append(("o", f"l{i}"))
    return Net(surface, verts, edges)


# ---------------------------------------------------------------------------
# bulk lemma suites (vectorized over configurations)
# ---------------------------------------------------------------------------

def _batch_closed_directions(degree: int, count: int, rng) -> np.ndarray:
    """(count, degree) direction angles, each row summing to zero as vectors."""
    out = np.empty((count, degree))
    filled = 0
    while filled < count:
        m = count - filled
        base = rng.uniform(0.0, TWO_PI, size=(m, degree - 2))
        sx = np.cos(base).sum(axis=1)
        sy = np.sin(base).sum(axis=1)
        s = np.hypot(sx, sy)
        ok = s <= 2.0 - 1e-9
        base, sx, sy, s = base[ok], sx[ok], sy[ok], s[ok]
        tiny = s < 1e-12
        axis = np.where(tiny, rng.uniform(0.0, TWO_PI, size=s.shape), np.arctan2(-sy, -sx))
        delta = np.where(tiny, 0.5 * math.pi, np.arccos(np.clip(s / 2.0, -1.0, 1.0)))
        rows = np.concatenate([base, (axis - delta)[:, None], (axis + delta)[:, None]], axis=1)
        rows = np.sort(np.mod(rows, TWO_PI), axis=1)
        gaps = _batch_gaps(rows)
        rows = rows[gaps.min(axis=1) >= DIRECTION_GAP_MIN]
        take = min(len(rows), count - filled)
        out[filled:filled + take] = rows[:take]
        filled += take
    return out


def _batch_gaps(sorted_dirs: np.ndarray) -> np.ndarray:
    gaps = np.diff(sorted_dirs, axis=1)
    closing = TWO_PI - (sorted_dirs[:, -1] - sorted_dirs[:, 0])
    return np.concatenate([gaps, closing[:, None]], axis=1)


def _batch_combined(gaps: np.ndarray) -> np.ndarray:
    """combined angle of edge i = gap(i-1) + gap(i), per row."""
    return gaps + np.roll(gaps, 1, axis=1)


@dataclass
class LemmaSuiteReport:
    samples: int
    degrees: tuple
    violations: int
    special_cases: int
    max_combined_by_degree: dict

    @property
    def ok(self) -> bool:
        return self.violations == 0


def combined_angle_suite(samples: int, degrees=(3, 4, 5, 6, 7, 8, 9),
                         seed: int = 0, slack: float = 1e-9) -> LemmaSuiteReport:
    """Random balanced configurations vs the combined-angle lemmas.

    Counts violations of the degree-dependent combined-angle bound and, for
    degree >= 5 with a combined angle of 180 degrees or more, of odd degree
    and flanking angles in (60, 120) degrees."""
    rng = np.random.default_rng(seed)
    per = max(1, samples // len(degrees))
    violations = 0
    special = 0
    max_combined = {}
    for deg in degrees:
        dirs = _batch_closed_directions(deg, per, rng)
        gaps = _batch_gaps(dirs)
        combined = _batch_combined(gaps)
        max_combined[deg] = float(combined.max())
        bound = general_combined_bound(deg)
        if deg in (3, 4):
            violations += int((np.abs(combined - bound) > 1e-7).sum())
        else:
            violations += int((combined >= bound + slack).sum())
            trigger = combined >= math.pi
            special += int(trigger.any(axis=1).sum())
            if deg % 2 == 0:
                violations += int(trigger.sum())
            else:
                alpha = np.roll(gaps, 1, axis=1)
                gamma = gaps
                lo, hi = math.pi / 3.0 - slack, 2.0 * math.pi / 3.0 + slack
                bad = trigger & ~((alpha > lo) & (alpha < hi) & (gamma > lo) & (gamma < hi))
                violations += int(bad.sum())
    return LemmaSuiteReport(per * len(degrees), tuple(degrees), violations,
                            special, max_combined)


@dataclass
class EvenDegreeSearchReport:
    restarts: int
    degrees: tuple
    best_combined: float
    counterexamples: int

    @property
    def ok(self) -> bool:
        return self.counterexamples == 0


def even_degree_counterexample_search(restarts: int, seed: int = 0,
                                      degrees=(6, 8), steps: int = 30,
                                      step_size: float = 0.15) -> EvenDegreeSearchReport:
    """Hill-climb for a balanced even-degree vertex with a combined angle of
    180 degrees or more (the special combined-angle lemma says none exists).

    Each restart perturbs the free directions of a closed configuration to
    push the largest combined angle up, re-closing exactly after every move."""
    rng = np.random.default_rng(seed)
    best = 0.0
    found = 0
    per = max(1, restarts // len(degrees))
    for deg in degrees:
        batch = min(per, 20000)
        done = 0
        while done < per:
            m = min(batch, per - done)
            base = rng.uniform(0.0, TWO_PI, size=(m, deg - 2))
            score = _even_score(base)
            for _ in range(steps):
                prop = base + rng.normal(0.0, step_size, size=base.shape)
                new_score = _even_score(prop)
                better = new_score > score
                base[better] = prop[better]
                score = np.maximum(score, new_score)
            best = max(best, float(score.max()))
            found += int((score >= math.pi).sum())
            done += m
    return EvenDegreeSearchReport(per * len(degrees), tuple(degrees), best, found)


def _even_score(base: np.ndarray) -> np.ndarray:
    """Largest combined angle of the closed configuration, -inf if the
    closing pair does not exist."""
    sx = np.cos(base).sum(axis=1)
    sy = np.sin(base).sum(axis=1)
    s = np.hypot(sx, sy)
    ok = s <= 2.0 - 1e-12
    axis = np.arctan2(-sy, -sx)
    delta = np.arccos(np.clip(s / 2.0, -1.0, 1.0))
    rows = np.concatenate([base, (axis - delta)[:, None], (axis + delta)[:, None]], axis=1)
    rows = np.sort(np.mod(rows, TWO_PI), axis=1)
    combined = _batch_combined(_batch_gaps(rows))
    out = combined.max(axis=1)
    out[~ok] = -np.inf
    return out
