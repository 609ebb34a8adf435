"""Length minimization: gradient of the total edge length, relaxation of
free vertices to balanced critical points, Fermat point solvers, and the
randomized falsification search over random topologies."""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from . import net as netmod
from . import surfaces
from .errors import (
    CollinearInput,
    Degenerated,
    GnetError,
    MaxItersExceeded,
    PreconditionViolated,
    UnsupportedSurface,
    VertexCollision,
)
from .net import Net, NetVertex
from .surfaces import Point, SurfaceModel, TWO_PI


@dataclass(frozen=True)
class RelaxParams:
    max_iters: int = 4000
    step_rule: str = "backtracking"   # or "fixed"
    step_size: float = 1.0            # initial (backtracking) or constant (fixed)
    shrink: float = 0.5
    armijo_c: float = 1e-4
    grad_tol: float = 1e-10
    collision_eps: float = 1e-6

    def __post_init__(self):
        if self.grad_tol < 1e-12:
            raise ValueError("grad_tol below the 1e-12 floor")
        if self.max_iters <= 0 or self.step_size <= 0 or self.collision_eps <= 0:
            raise ValueError("RelaxParams fields must be positive")
        if self.step_rule not in ("backtracking", "fixed"):
            raise ValueError(f"unknown step rule {self.step_rule!r}")


@dataclass
class RelaxReport:
    converged: bool
    iters: int
    initial_length: float
    final_length: float
    final_max_imbalance: float
    monotone: bool


def total_length(net: Net) -> float:
    """Sum of all edge lengths."""
    return net.total_length()


def length_gradient(net: Net, vid: str, collision_eps: float = 1e-6):
    """Gradient of the total length w.r.t. moving vid, in its tangent frame.

    Equals the negated imbalance vector: the distance-function gradient is
    the negated unit tangent toward the other endpoint, on every model."""
    for n in net.neighbors(vid):
        if net.edge_length(vid, n) < collision_eps:
            raise VertexCollision(f"edge ({vid}, {n}) shorter than {collision_eps}")
    bal = netmod.imbalance(net, vid)
    return (-bal.vector[0], -bal.vector[1])


# ---------------------------------------------------------------------------
# vectorized per-surface edge geometry
# ---------------------------------------------------------------------------

class _Engine:
    """Array-based lengths / frame-direction components for one net topology."""

    def __init__(self, net: Net):
        self.surface = net.surface
        self.ids = sorted(net.vertices)
        self.index = {v: i for i, v in enumerate(self.ids)}
        self.free = np.array([not net.vertices[v].fixed for v in self.ids])
        self.pos = np.array([net.point(v).coords for v in self.ids], dtype=float)
        self.eu = np.array([self.index[u] for u, _ in net.edges], dtype=int)
        self.ev = np.array([self.index[v] for _, v in net.edges], dtype=int)
        self.net = net

    def lengths(self, pos):
        k = self.surface
        a, b = pos[self.eu], pos[self.ev]
        if k.kind == surfaces.FLAT:
            return np.hypot(*(b - a).T)
        if k.kind == surfaces.HYPERBOLIC:
            kk = math.sqrt(-k.curvature)
            z = a[:, 0] + 1j * a[:, 1]
            w = b[:, 0] + 1j * b[:, 1]
            t = (w - z) / (1.0 - np.conj(z) * w)
            return (2.0 / kk) * np.arctanh(np.minimum(np.abs(t), 1.0 - 1e-16))
        na, nb = _embed_arr(a), _embed_arr(b)
        dots = np.clip((na * nb).sum(axis=1), -1.0, 1.0)
        crossn = np.linalg.norm(np.cross(na, nb), axis=1)
        return np.arctan2(crossn, dots) / math.sqrt(k.curvature)

    def imbalance_vectors(self, pos):
        """(V, 2) sum of outgoing unit tangents (frame coords) per vertex."""
        k = self.surface
        a, b = pos[self.eu], pos[self.ev]
        if k.kind == surfaces.FLAT:
            d = b - a
            ln = np.hypot(*d.T)[:, None]
            u_at_a = d / ln
            u_at_b = -u_at_a
        elif k.kind == surfaces.HYPERBOLIC:
            z = a[:, 0] + 1j * a[:, 1]
            w = b[:, 0] + 1j * b[:, 1]
            t_ab = (w - z) / (1.0 - np.conj(z) * w)
            t_ba = (z - w) / (1.0 - np.conj(w) * z)
            t_ab = t_ab / np.abs(t_ab)
            t_ba = t_ba / np.abs(t_ba)
            u_at_a = np.stack([t_ab.real, t_ab.imag], axis=1)
            u_at_b = np.stack([t_ba.real, t_ba.imag], axis=1)
        else:
            na, nb = _embed_arr(a), _embed_arr(b)
            u_at_a = _sphere_frame_components(a, na, nb)
            u_at_b = _sphere_frame_components(b, nb, na)
        out = np.zeros((len(pos), 2))
        np.add.at(out, self.eu, u_at_a)
        np.add.at(out, self.ev, u_at_b)
        return out

    def step(self, pos, vec, alpha):
        """Geodesic step of tangent-frame displacement alpha*vec per vertex."""
        k = self.surface
        disp = alpha * vec
        if k.kind == surfaces.FLAT:
            return pos + disp
        if k.kind == surfaces.HYPERBOLIC:
            kk = math.sqrt(-k.curvature)
            s = np.hypot(*disp.T)
            theta = np.arctan2(disp[:, 1], disp[:, 0])
            z = pos[:, 0] + 1j * pos[:, 1]
            w = np.tanh(0.5 * kk * s) * np.exp(1j * theta)
            r = (w + z) / (1.0 + np.conj(z) * w)
            return np.stack([r.real, r.imag], axis=1)
        rho = 1.0 / math.sqrt(k.curvature)
        s = np.hypot(*disp.T)
        moving = s > 0.0
        n = _embed_arr(pos)
        east, north = _sphere_frames(pos)
        theta = np.arctan2(disp[:, 1], disp[:, 0])
        t3 = np.cos(theta)[:, None] * east + np.sin(theta)[:, None] * north
        ang = (s / rho)[:, None]
        n2 = np.where(moving[:, None], np.cos(ang) * n + np.sin(ang) * t3, n)
        colat = np.arccos(np.clip(n2[:, 2], -1.0, 1.0))
        lon = np.mod(np.arctan2(n2[:, 1], n2[:, 0]), TWO_PI)
        if (colat > math.pi / 2.0 + 1e-12).any():
            raise surfaces.OutOfChart("step left the hemisphere chart")
        return np.stack([lon, colat], axis=1)

    def min_direction_gap(self, pos):
        """Smallest angular gap between incident edge directions, per net."""
        k = self.surface
        a, b = pos[self.eu], pos[self.ev]
        if k.kind == surfaces.FLAT:
            d = b - a
            th_ab = np.arctan2(d[:, 1], d[:, 0])
            th_ba = np.arctan2(-d[:, 1], -d[:, 0])
        elif k.kind == surfaces.HYPERBOLIC:
            z = a[:, 0] + 1j * a[:, 1]
            w = b[:, 0] + 1j * b[:, 1]
            t_ab = (w - z) / (1.0 - np.conj(z) * w)
            t_ba = (z - w) / (1.0 - np.conj(w) * z)
            th_ab = np.angle(t_ab)
            th_ba = np.angle(t_ba)
        else:
            na, nb = _embed_arr(a), _embed_arr(b)
            ca = _sphere_frame_components(a, na, nb)
            cb = _sphere_frame_components(b, nb, na)
            th_ab = np.arctan2(ca[:, 1], ca[:, 0])
            th_ba = np.arctan2(cb[:, 1], cb[:, 0])
        vidx = np.concatenate([self.eu, self.ev])
        angs = np.mod(np.concatenate([th_ab, th_ba]), TWO_PI)
        order = np.lexsort((angs, vidx))
        vs, ths = vidx[order], angs[order]
        best = math.inf
        start = 0
        for i in range(1, len(vs) + 1):
            if i == len(vs) or vs[i] != vs[start]:
                if i - start >= 2:
                    seg = ths[start:i]
                    gaps = np.diff(seg)
                    wrap = TWO_PI - (seg[-1] - seg[0])
                    best = min(best, float(gaps.min()), float(wrap))
                start = i
        return best


def _embed_arr(chart):
    lon, colat = chart[:, 0], chart[:, 1]
    sc = np.sin(colat)
    return np.stack([sc * np.cos(lon), sc * np.sin(lon), np.cos(colat)], axis=1)


def _sphere_frames(chart):
    lon, colat = chart[:, 0], chart[:, 1]
    east = np.stack([-np.sin(lon), np.cos(lon), np.zeros_like(lon)], axis=1)
    north = np.stack([-np.cos(colat) * np.cos(lon),
                      -np.cos(colat) * np.sin(lon),
                      np.sin(colat)], axis=1)
    return east, north


def _sphere_frame_components(chart_a, na, nb):
    dots = (na * nb).sum(axis=1)[:, None]
    t = nb - dots * na
    t = t / np.linalg.norm(t, axis=1)[:, None]
    east, north = _sphere_frames(chart_a)
    return np.stack([(t * east).sum(axis=1), (t * north).sum(axis=1)], axis=1)


# ---------------------------------------------------------------------------
# the relaxation loop
# ---------------------------------------------------------------------------

def relax(net: Net, params: RelaxParams | None = None,
          check_embedding: bool = True):
    """Gradient descent on free-vertex positions until every free vertex is
    balanced to grad_tol.  Raises Degenerated / MaxItersExceeded on failure.

    Returns (relaxed_net, RelaxReport)."""
    if params is None:
        params = RelaxParams()
    n_fixed = sum(1 for v in net.vertices.values() if v.fixed)
    if n_fixed < 1:
        raise PreconditionViolated("at-least-one-fixed")
    for vid, nv in net.vertices.items():
        if not nv.fixed and net.degree(vid) < 3:
            raise PreconditionViolated("free-degree-3", vid)

    eng = _Engine(net)
    pos = eng.pos.copy()
    free = eng.free
    lengths = eng.lengths(pos)
    total = float(lengths.sum())
    initial = total
    alpha = params.step_size
    monotone = True
    iters = 0
    while True:
        if (lengths < params.collision_eps).any():
            raise Degenerated("vertex-collision")
        vecs = eng.imbalance_vectors(pos)
        vecs[~free] = 0.0
        norms = np.hypot(*vecs.T)
        max_imb = float(norms[free].max()) if free.any() else 0.0
        if max_imb <= params.grad_tol:
            break
        if iters >= params.max_iters:
            raise MaxItersExceeded(f"max imbalance {max_imb:.3g} after {iters} iterations")
        if iters % 25 == 0 and eng.min_direction_gap(pos) < netmod.DIRECTION_GAP_MIN:
            raise Degenerated("direction-collapse")
        iters += 1
        g2 = float((norms[free] ** 2).sum())
        if params.step_rule == "fixed":
            pos = eng.step(pos, vecs, params.step_size)
            lengths = eng.lengths(pos)
            new_total = float(lengths.sum())
            monotone = monotone and new_total < total
            total = new_total
            continue
        accepted = False
        # the sufficient-decrease term can drop below float resolution of the
        # total; length comparisons are then meaningless and the acceptance
        # switches to contraction of the gradient norm itself
        floor = 1e-13 * max(1.0, total)
        while alpha > 1e-18:
            try:
                cand = eng.step(pos, vecs, alpha)
                cand_len = eng.lengths(cand)
                cand_total = float(cand_len.sum())
            except surfaces.OutOfChart:
                alpha *= params.shrink
                continue
            required = params.armijo_c * alpha * g2
            if required > floor:
                ok = cand_total <= total - required
            else:
                cand_vecs = eng.imbalance_vectors(cand)
                cand_vecs[~free] = 0.0
                cand_g2 = float((np.hypot(*cand_vecs.T)[free] ** 2).sum())
                ok = cand_total <= total + floor and cand_g2 <= g2 * (1.0 - 1e-4)
            if ok:
                pos, lengths, total = cand, cand_len, cand_total
                accepted = True
                alpha = min(alpha / params.shrink, 1e3)
                break
            alpha *= params.shrink
        if not accepted:
            raise Degenerated("line-search-stalled")

    if eng.min_direction_gap(pos) < netmod.DIRECTION_GAP_MIN:
        raise Degenerated("direction-collapse")
    positions = {vid: Point(net.surface, *pos[eng.index[vid]]) for vid in eng.ids}
    out = net.with_positions(positions)
    if check_embedding:
        out.validate()
    report = RelaxReport(True, iters, initial, total,
                         float(np.hypot(*eng.imbalance_vectors(pos).T)[free].max())
                         if free.any() else 0.0, monotone)
    return out, report


# ---------------------------------------------------------------------------
# Fermat point
# ---------------------------------------------------------------------------

def fermat_point(p1: Point, p2: Point, p3: Point,
                 params: RelaxParams | None = None):
    """The balanced degree-3 point of a triangle with all angles < 120
    degrees, or None when some angle reaches 120."""
    surface = p1.surface
    if surface.kind == surfaces.SPHERICAL:
        raise UnsupportedSurface("Fermat solver runs on flat or hyperbolic charts")
    pts = [p1, p2, p3]
    sc = [surfaces.straight_coords(p) for p in pts]
    area2 = abs((sc[1][0] - sc[0][0]) * (sc[2][1] - sc[0][1])
                - (sc[1][1] - sc[0][1]) * (sc[2][0] - sc[0][0]))
    dmax = max(math.hypot(sc[i][0] - sc[j][0], sc[i][1] - sc[j][1])
               for i in range(3) for j in range(i))
    if area2 < 1e-12 * max(dmax * dmax, 1e-30):
        raise CollinearInput("triangle corners are collinear")
    for i in range(3):
        segs = [surfaces.geodesic_connect(pts[i], pts[j]) for j in range(3) if j != i]
        ang = surfaces.angle_ccw(segs[0].dir_at_a, segs[1].dir_at_a)
        ang = min(ang, TWO_PI - ang)
        if ang >= 2.0 * math.pi / 3.0 - 1e-12:
            return None
    centroid = tuple(sum(c[k] for c in sc) / 3.0 for k in (0, 1))
    start = surfaces.from_straight(surface, centroid)
    verts = {"o": NetVertex(start, False)}
    edges = []
    for i, p in enumerate(pts):
        verts[f"p{i}"] = NetVertex(p, True)
        edges.append(("o", f"p{i}"))
    tripod = Net(surface, verts, edges)
    if params is None:
        params = RelaxParams(grad_tol=1e-11, max_iters=20000)
    relaxed, _ = relax(tripod, params)
    return relaxed.point("o")


# ---------------------------------------------------------------------------
# randomized counterexample search
# ---------------------------------------------------------------------------

@dataclass
class TrialRecord:
    index: int
    status: str            # converged | degenerated | max-iters | invalid | embedding-lost
    n_vertices: int = 0
    n_edges: int = 0
    n_free: int = 0
    unbalanced_count: int = 0
    balanced_count: int = 0
    max_free_imbalance: float = 0.0
    detail: str = ""

    def to_json_dict(self):
        return asdict(self)


@dataclass
class SearchReport:
    n_unbalanced: int
    trials: int
    seed: int
    surface_kind: str
    curvature: float
    records: list = field(default_factory=list)
    f_estimate: dict = field(default_factory=dict)
    max_balanced_observed: int = 0
    n_converged: int = 0
    n_degenerate: int = 0

    def to_json_dict(self):
        return {
            "n_unbalanced": self.n_unbalanced,
            "trials": self.trials,
            "seed": self.seed,
            "surface": {"kind": self.surface_kind, "curvature": self.curvature},
            "f_estimate": {str(k): v for k, v in sorted(self.f_estimate.items())},
            "max_balanced_observed": self.max_balanced_observed,
            "n_converged": self.n_converged,
            "n_degenerate": self.n_degenerate,
        }


def sample_random_net(surface: SurfaceModel, n_fixed: int, rng,
                      n_free: int | None = None) -> Net | None:
    """Random embedded net: fixed vertices on a jittered circle, free ones
    inside their hull, proximity-graph edges, free degrees >= 3.

    Sampling happens in straight-model coordinates (gnomonic chart for the
    sphere) so the proximity triangulation cannot produce crossing edges."""
    from scipy.spatial import Delaunay, QhullError

    if n_free is None:
        n_free = int(rng.integers(1, max(2, n_fixed + 3)))
    base = {surfaces.FLAT: 1.0, surfaces.HYPERBOLIC: 0.55,
            surfaces.SPHERICAL: 1.0}[surface.kind]
    pts = []
    if n_fixed:
        angles = np.sort(rng.uniform(0.0, TWO_PI, size=n_fixed))
        if n_fixed >= 2 and np.diff(np.concatenate([angles, [angles[0] + TWO_PI]])).min() < 0.3:
            angles = np.sort(np.linspace(0.0, TWO_PI, n_fixed, endpoint=False)
                             + rng.uniform(-0.3, 0.3, size=n_fixed))
        radii = base * rng.uniform(0.75, 1.0, size=n_fixed)
        pts = [(r * math.cos(a), r * math.sin(a)) for a, r in zip(angles, radii)]
    for _ in range(n_free):
        if n_fixed >= 3:
            w = rng.dirichlet(np.full(n_fixed, 1.2))
            pts.append((float(sum(w[i] * pts[i][0] for i in range(n_fixed))),
                        float(sum(w[i] * pts[i][1] for i in range(n_fixed)))))
        else:
            r = base * 0.5 * math.sqrt(rng.uniform())
            a = rng.uniform(0.0, TWO_PI)
            pts.append((r * math.cos(a), r * math.sin(a)))
    if len(pts) < 4:
        return None
    try:
        tri = Delaunay(np.array(pts))
    except QhullError:
        return None
    edge_set = set()
    for simplex in tri.simplices:
        for i in range(3):
            a, b = int(simplex[i]), int(simplex[(i + 1) % 3])
            edge_set.add((min(a, b), max(a, b)))
    edges = sorted(edge_set)

    deg = {i: 0 for i in range(len(pts))}
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1

    def connected(es):
        adj = {i: [] for i in range(len(pts))}
        for a, b in es:
            adj[a].append(b)
            adj[b].append(a)
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(pts)

    # thin both-fixed edges and a few others, keeping the structure legal
    for a, b in rng.permutation(edges).tolist():
        a, b = int(a), int(b)
        both_fixed = a < n_fixed and b < n_fixed
        p_drop = 0.5 if both_fixed else 0.12
        if rng.uniform() > p_drop:
            continue
        if (a >= n_fixed and deg[a] <= 3) or (b >= n_fixed and deg[b] <= 3):
            continue
        trial = [e for e in edges if e != (min(a, b), max(a, b))]
        if connected(trial):
            edges = trial
            deg[a] -= 1
            deg[b] -= 1
    if any(deg[i] < 3 for i in range(n_fixed, len(pts))):
        return None

    def lift(xy):
        if surface.kind == surfaces.SPHERICAL:
            r = math.hypot(*xy)
            return Point(surface, math.atan2(xy[1], xy[0]) % TWO_PI, math.atan(r))
        return surfaces.from_straight(surface, xy)

    verts = {}
    for i, xy in enumerate(pts):
        verts[f"v{i}"] = NetVertex(lift(xy), i < n_fixed)
    try:
        out = Net(surface, verts, [(f"v{a}", f"v{b}") for a, b in edges])
        out.validate()
    except GnetError:
        return None
    return out


def _run_trial(surface: SurfaceModel, n_unbalanced: int, seed: int, index: int,
               params: RelaxParams) -> TrialRecord:
    rng = np.random.default_rng([seed, index])
    net = sample_random_net(surface, n_unbalanced, rng)
    if net is None:
        return TrialRecord(index, "invalid", detail="sampler rejected topology")
    rec = TrialRecord(index, "", len(net.vertices), len(net.edges),
                      sum(1 for v in net.vertices.values() if not v.fixed))
    try:
        relaxed, rep = relax(net, params, check_embedding=False)
    except Degenerated as exc:
        rec.status = "degenerated"
        rec.detail = exc.reason
        return rec
    except MaxItersExceeded:
        rec.status = "max-iters"
        return rec
    try:
        relaxed.validate()
    except GnetError as exc:
        rec.status = "embedding-lost"
        rec.detail = str(exc)[:100]
        return rec
    report = netmod.classify_vertices(relaxed, tol=params.grad_tol)
    rec.status = "converged"
    rec.unbalanced_count = report.n_unbalanced
    rec.balanced_count = report.n_balanced
    rec.max_free_imbalance = rep.final_max_imbalance
    return rec


def _trial_star(args):
    return _run_trial(*args)


def search_counterexamples(n_unbalanced: int, trials: int, seed: int = 0,
                           params: RelaxParams | None = None,
                           surface: SurfaceModel | None = None,
                           extra_nets=(), stream=None,
                           workers: int | None = None) -> SearchReport:
    """Relax random topologies over n_unbalanced boundary vertices and count
    balanced vertices of the cleanly converged, still-embedded results.

    f_estimate maps each observed unbalanced count to the maximum balanced
    count among converged trials; degenerate trials are recorded but do not
    contribute."""
    if n_unbalanced < 0:
        raise PreconditionViolated("n-unbalanced-nonnegative")
    surface = surface if surface is not None else surfaces.flat()
    if surface.kind == surfaces.SPHERICAL:
        raise UnsupportedSurface("the search runs on flat or hyperbolic charts")
    params = params if params is not None else RelaxParams(grad_tol=1e-9, max_iters=3000)
    if workers is None:
        workers = int(os.environ.get("GNET_THREADS", "1") or "1")
    args = [(surface, n_unbalanced, seed, i, params) for i in range(trials)]
    if workers > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_trial_star, args,
                                    chunksize=max(1, trials // (workers * 4))))
    else:
        records = [_run_trial(*a) for a in args]

    for k, extra in enumerate(extra_nets):
        rec = TrialRecord(trials + k, "", len(extra.vertices), len(extra.edges),
                          sum(1 for v in extra.vertices.values() if not v.fixed))
        try:
            relaxed, rep = relax(extra, params, check_embedding=False)
            relaxed.validate()
            cl = netmod.classify_vertices(relaxed, tol=max(params.grad_tol, 1e-8))
            rec.status = "converged"
            rec.unbalanced_count = cl.n_unbalanced
            rec.balanced_count = cl.n_balanced
            rec.max_free_imbalance = rep.final_max_imbalance
            rec.detail = "seeded"
        except GnetError as exc:
            rec.status = "degenerated"
            rec.detail = str(exc)[:100]
        records.append(rec)

    report = SearchReport(n_unbalanced, trials, seed, surface.kind,
                          surface.curvature, records)
    for rec in records:
        if rec.status == "converged":
            report.n_converged += 1
            cur = report.f_estimate.get(rec.unbalanced_count, 0)
            report.f_estimate[rec.unbalanced_count] = max(cur, rec.balanced_count)
            report.max_balanced_observed = max(report.max_balanced_observed,
                                               rec.balanced_count)
        elif rec.status in ("degenerated", "embedding-lost", "max-iters"):
            report.n_degenerate += 1
    if stream is not None:
        close = False
        fh = stream
        if isinstance(stream, (str, os.PathLike)):
            fh = open(stream, "w")
            close = True
        try:
            for rec in records:
                fh.write(json.dumps(rec.to_json_dict(), sort_keys=True) + "\n")
        finally:
            if close:
                fh.close()
    return report
