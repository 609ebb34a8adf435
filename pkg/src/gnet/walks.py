"""Turn-angle calculus on piecewise-geodesic walks through a net.

Covers backtrack admissibility, transversality of self-meetings, essential
simplicity, the Gauss-Bonnet residual, outer-face circumference extraction,
the first-right-turn escape-path construction and conditional
path-independence checking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import net as netmod
from . import surfaces
from .errors import (
    AmbiguousReversal,
    ConditionsNotMet,
    NetInvariantViolated,
    NonAdjacentEdges,
    NotClosed,
    NotEssentiallySimple,
    PreconditionViolated,
    UnsupportedSurface,
)
from .surfaces import TWO_PI, wrap_angle, wrap_signed

DirectedEdge = tuple


def reverse(edge: DirectedEdge) -> DirectedEdge:
    return (edge[1], edge[0])


def turn_angle(net: netmod.Net, e: DirectedEdge, f: DirectedEdge) -> float:
    """Signed turn from e to f at their shared vertex, left positive.

    Measured against the geodesic extension of e; a backtrack (f == -e) is
    +pi by convention.  Any other turn of exactly +-pi is ambiguous and a
    hard error."""
    if e[1] != f[0]:
        raise NonAdjacentEdges(f"{e} then {f}")
    v = e[1]
    if f[1] == e[0]:
        return math.pi
    ext = net.direction(v, e[0]) + math.pi  # continuation of e through v
    out = net.direction(v, f[1])
    delta = wrap_signed(out - ext)
    if abs(abs(delta) - math.pi) < 1e-12:
        raise AmbiguousReversal(f"turn from {e} to {f} is a stealth reversal")
    return delta


class Walk:
    """Oriented sequence of directed net edges, consecutive edges chained."""

    def __init__(self, net: netmod.Net, edges):
        self.net = net
        self.edges = [(str(u), str(v)) for u, v in edges]
        if not self.edges:
            raise NetInvariantViolated("walk", "empty walk")
        for u, v in self.edges:
            if not net.has_edge(u, v):
                raise NetInvariantViolated("walk", f"({u}, {v}) is not a net edge")
        for i in range(len(self.edges) - 1):
            if self.edges[i][1] != self.edges[i + 1][0]:
                raise NonAdjacentEdges(f"{self.edges[i]} then {self.edges[i + 1]}")
        self.closed = self.edges[0][0] == self.edges[-1][1]
        self.turns = self._compute_turns()

    def _compute_turns(self):
        out = []
        n = len(self.edges)
        upto = n if self.closed else n - 1
        for i in range(upto):
            out.append(turn_angle(self.net, self.edges[i], self.edges[(i + 1) % n]))
        return out

    def __len__(self):
        return len(self.edges)

    def vertices(self):
        """Visited vertices in order (first tail, then each head)."""
        return [self.edges[0][0]] + [e[1] for e in self.edges]

    def reversed_walk(self) -> "Walk":
        return Walk(self.net, [reverse(e) for e in reversed(self.edges)])

    def turn_sum(self) -> float:
        return sum(self.turns)

    def to_json_dict(self):
        return {
            "edges": [list(e) for e in self.edges],
            "closed": self.closed,
            "turns_deg": [math.degrees(t) for t in self.turns],
            "turn_sum_deg": math.degrees(self.turn_sum()),
        }


def walk_from_vertices(net: netmod.Net, vertices) -> Walk:
    vs = [str(v) for v in vertices]
    return Walk(net, [(vs[i], vs[i + 1]) for i in range(len(vs) - 1)])


# ---------------------------------------------------------------------------
# classification: backtracks, self-meetings, essential simplicity
# ---------------------------------------------------------------------------

@dataclass
class Backtrack:
    junction: int          # spur starts on edges[junction]
    vertex: str            # base vertex of the spur
    spur: str              # spur tip vertex
    admissible: bool
    reason: str = ""


@dataclass
class Meeting:
    junctions: tuple       # (i, j) chain-start junction indices
    chain_len: int         # number of shared (reversed) edges
    order: str             # cyclic stub word, e.g. "adbc"
    non_transversal: bool
    reason: str = ""


@dataclass
class WalkClassification:
    simple: bool
    essentially_simple: bool
    closed: bool
    counterclockwise: bool | None
    backtracks: list = field(default_factory=list)
    meetings: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_json_dict(self):
        return {
            "simple": self.simple,
            "essentially_simple": self.essentially_simple,
            "closed": self.closed,
            "counterclockwise": self.counterclockwise,
            "backtracks": [
                {"junction": b.junction, "vertex": b.vertex,
                 "admissible": b.admissible, "reason": b.reason}
                for b in self.backtracks],
            "meetings": [
                {"junctions": list(m.junctions), "chain_len": m.chain_len,
                 "order": m.order, "non_transversal": m.non_transversal,
                 "reason": m.reason}
                for m in self.meetings],
            "notes": self.notes,
        }


def _right_of_corner(net, v, dir_back, dir_out, dir_test) -> bool:
    """Is the stub dir_test strictly to the right of the corner that comes in
    toward v (reversal stub dir_back) and leaves along dir_out?"""
    span = wrap_angle(dir_out - dir_back)
    off = wrap_angle(dir_test - dir_back)
    return 1e-12 < off < span - 1e-12


_NONTRANSVERSAL_WORDS = set()
for _w in ("abcd", "dcba"):
    for _k in range(4):
        _NONTRANSVERSAL_WORDS.add(_w[_k:] + _w[:_k])


def classify(walk: Walk) -> WalkClassification:
    """Label backtracks admissible/inadmissible, self-meetings transversal or
    not, and set the simplicity / counterclockwise flags."""
    net = walk.net
    edges = walk.edges
    n = len(edges)
    closed = walk.closed

    # junction k sits at the tail of edges[k]; for closed walks k runs over
    # all of 0..n-1 (cyclically), for open walks over 1..n-1
    junctions = list(range(n)) if closed else list(range(1, n))

    def edge_at(k):
        return edges[k % n]

    notes = []
    backtracks = []
    directed_seen = {}
    for idx, e in enumerate(edges):
        directed_seen.setdefault(e, []).append(idx)
    repeated_directed = sorted(e for e, occ in directed_seen.items() if len(occ) > 1)
    if repeated_directed:
        notes.append(f"directed edge reused: {repeated_directed[:3]}")

    # --- backtracks: edges[k] followed by its reversal -----------------------
    back_positions = set()
    limit = n if closed else n - 1
    for k in range(limit):
        if edge_at(k + 1) == reverse(edge_at(k)):
            back_positions.add(k)
    for k in sorted(back_positions):
        a = edge_at(k)
        base = a[0]
        e_in = edge_at(k - 1) if (closed or k - 1 >= 0) else None
        f_out = edge_at(k + 2) if (closed or k + 2 < n) else None
        if e_in is None or f_out is None:
            backtracks.append(Backtrack(k, base, a[1], False, "no-flanking-edge"))
            continue
        if f_out == reverse(e_in):
            backtracks.append(Backtrack(k, base, a[1], False, "double-backtrack"))
            continue
        dir_back = net.direction(base, e_in[0])
        dir_out = net.direction(base, f_out[1])
        dir_spur = net.direction(base, a[1])
        ok = _right_of_corner(net, base, dir_back, dir_out, dir_spur)
        backtracks.append(Backtrack(k, base, a[1], ok, "" if ok else "spur-left-of-path"))

    # --- self-meetings --------------------------------------------------------
    by_vertex = {}
    for k in junctions:
        by_vertex.setdefault(edge_at(k)[0], []).append(k)
    # open-walk endpoints touching the interior are not classifiable
    endpoint_touch = False
    if not closed:
        interior = {edge_at(k)[0] for k in junctions}
        if edges[0][0] in interior or edges[-1][1] in interior or edges[0][0] == edges[-1][1]:
            endpoint_touch = True
            notes.append("open walk endpoint revisits the path")

    meetings = []
    for vertex, ks in sorted(by_vertex.items()):
        if len(ks) < 2:
            continue
        for x in range(len(ks)):
            for y in range(x + 1, len(ks)):
                i, j = ks[x], ks[y]
                m = _classify_pair(net, edges, closed, i, j)
                if m is not None:
                    meetings.append(m)

    simple = (not backtracks and not meetings and not endpoint_touch
              and not repeated_directed
              and len(set(by_vertex)) == len(junctions))
    essentially_simple = (all(b.admissible for b in backtracks)
                          and all(m.non_transversal for m in meetings)
                          and not endpoint_touch and not repeated_directed)

    ccw = None
    if closed and net.surface.kind != surfaces.SPHERICAL:
        ccw = _counterclockwise(net, edges)

    return WalkClassification(simple, essentially_simple, closed, ccw,
                              backtracks, meetings, notes)


def _classify_pair(net, edges, closed, i, j):
    """Classify the self-meeting of junctions i < j, or None if the pair is
    interior to a chain handled elsewhere / a backtrack turnaround."""
    n = len(edges)

    def at(k):
        return edges[k % n]

    def has(k):
        return closed or 0 <= k < n

    # skip pairs whose shared chain extends backward: handled at its start
    if has(i - 1) and has(j) and at(i - 1) == reverse(at(j)):
        return None

    span = (j - i) % n if closed else j - i
    m = 0
    while has(i + m) and has(j - 1 - m) and 2 * m < span - 1 \
            and at(i + m) == reverse(at(j - 1 - m)):
        m += 1
    if 2 * m >= span:
        # the two passes fold onto each other: a backtrack turnaround
        return None

    a_in = at(i - 1) if has(i - 1) else None
    b_out = at(i + m) if has(i + m) else None
    c_in = at(j - 1 - m) if has(j - 1 - m) else None
    d_out = at(j) if has(j) else None
    if a_in is None or b_out is None or c_in is None or d_out is None:
        return Meeting((i, j), m, "", False, "meeting-at-open-end")

    if m == 0:
        v = at(i)[0]
        if b_out == reverse(a_in) or d_out == reverse(c_in):
            return Meeting((i, j), 0, "backtrack-pass", True, "pass-is-backtrack")
        stubs = {
            "a": net.direction(v, a_in[0]),
            "b": net.direction(v, b_out[1]),
            "c": net.direction(v, c_in[0]),
            "d": net.direction(v, d_out[1]),
        }
        vals = sorted(stubs.values())
        if min(wrap_angle(vals[(t + 1) % 4] - vals[t]) for t in range(4)) < 1e-12:
            return Meeting((i, j), 0, "", False, "coincident-stubs")
        word = "".join(sorted(stubs, key=stubs.get))
    else:
        v0 = at(i)[0]
        v1 = at(i + m)[0] if has(i + m) else at((i + m) % n)[0]
        ref0 = net.direction(v0, at(i)[1])
        th_a = wrap_angle(net.direction(v0, a_in[0]) - ref0)
        th_d = wrap_angle(net.direction(v0, d_out[1]) - ref0)
        ref1 = net.direction(v1, at(i + m - 1)[0])
        ph_b = wrap_angle(net.direction(v1, b_out[1]) - ref1)
        ph_c = wrap_angle(net.direction(v1, c_in[0]) - ref1)
        word = ("ad" if th_a < th_d else "da") + ("bc" if ph_b < ph_c else "cb")
    ok = word in _NONTRANSVERSAL_WORDS or word == "backtrack-pass"
    reason = "" if ok else f"cyclic order {word}"
    return Meeting((i, j), m, word, ok, reason)


# ---------------------------------------------------------------------------
# counterclockwise test by ray casting in straight-model coordinates
# ---------------------------------------------------------------------------

def _counterclockwise(net, edges):
    segs = []
    for u, v in edges:
        p = surfaces.straight_coords(net.point(u))
        q = surfaces.straight_coords(net.point(v))
        segs.append((p, q))
    xs = [p[0] for p, _ in segs] + [q[0] for _, q in segs]
    ys = [p[1] for p, _ in segs] + [q[1] for _, q in segs]
    diam = max(max(xs) - min(xs), max(ys) - min(ys), 1e-9)

    def outside(pt):
        return _in_unbounded(segs, pt, diam)

    any_right = False
    for p, q in segs:
        dx, dy = q[0] - p[0], q[1] - p[1]
        ln = math.hypot(dx, dy)
        mid = ((p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0)
        off = 1e-6 * ln
        right = (mid[0] + off * dy / ln, mid[1] - off * dx / ln)
        left = (mid[0] - off * dy / ln, mid[1] + off * dx / ln)
        r_out = outside(right)
        l_out = outside(left)
        if l_out and not r_out:
            return False
        any_right = any_right or r_out
    return any_right


def _in_unbounded(segs, pt, diam, max_tries=32):
    """Parity ray test: even crossing count puts pt in the unbounded face."""
    for k in range(max_tries):
        phi = 0.1234567 + 2.399963229728653 * k
        far = (pt[0] + 3.0 * diam * math.cos(phi), pt[1] + 3.0 * diam * math.sin(phi))
        count = 0
        degenerate = False
        for p, q in segs:
            hits = surfaces._seg_intersect_2d(pt, far, p, q, eps=1e-15)
            for t, u, _ in hits:
                if t == "overlap":
                    degenerate = True
                    break
                if u < 1e-9 or u > 1.0 - 1e-9 or t < 1e-12:
                    degenerate = True
                    break
                count += 1
            if degenerate:
                break
        if not degenerate:
            return count % 2 == 0
    raise RuntimeError("ray casting failed to find a clean direction")


# ---------------------------------------------------------------------------
# Gauss-Bonnet residual
# ---------------------------------------------------------------------------

def gauss_bonnet_residual(walk: Walk, classification: WalkClassification | None = None) -> float:
    """(sum of turn angles) - 2*pi for a closed essentially simple
    counterclockwise walk.  Zero on flat, nonnegative on nonpositive
    curvature; equals |K| * enclosed area for simple hyperbolic walks."""
    if not walk.closed:
        raise NotClosed("walk is not closed")
    cls = classification if classification is not None else classify(walk)
    if not cls.essentially_simple:
        raise NotEssentiallySimple("walk is not essentially simple")
    if cls.counterclockwise is False:
        raise NotEssentiallySimple("walk is not counterclockwise")
    return walk.turn_sum() - TWO_PI


# ---------------------------------------------------------------------------
# circumference: boundary walk of the outer face
# ---------------------------------------------------------------------------

def circumference(net: netmod.Net) -> Walk:
    """Counterclockwise boundary walk of the unbounded face.

    Starts at the bottom-most (then left-most) vertex in straight-model
    coordinates and repeatedly takes the first right turn: the rotation
    successor of the reversed incoming edge."""
    if net.surface.kind == surfaces.SPHERICAL:
        raise UnsupportedSurface("the spherical chart has no unbounded face")
    coords = {vid: surfaces.straight_coords(net.point(vid)) for vid in net.vertices}
    start = min(net.vertices, key=lambda v: (coords[v][1], coords[v][0], v))
    down = 1.5 * math.pi
    first_nbr = min(net.neighbors(start),
                    key=lambda u: wrap_angle(net.direction(start, u) - down))
    first = (start, first_nbr)
    edges = [first]
    guard = 2 * len(net.edges) + 1
    while True:
        u, v = edges[-1]
        rot = net.rotation(v)
        nxt = (v, rot[(rot.index(u) + 1) % len(rot)])
        if nxt == first:
            break
        edges.append(nxt)
        if len(edges) > guard:
            raise NetInvariantViolated("circumference", "face traversal did not close")
    return Walk(net, edges)


# ---------------------------------------------------------------------------
# escape path (first-right-turn construction of the 60-degree lemma)
# ---------------------------------------------------------------------------

@dataclass
class EscapeCertificate:
    case: str                    # "u-equals-w" | "nonpositive-at-v" | "reached-w" | "left-hull"
    gamma: Walk | None
    terminated: bool
    steps: int
    turn_abcd: float
    turn_a_gamma_d: float | None
    bound_ok: bool | None        # flat + reached-w only

    def to_json_dict(self):
        return {
            "case": self.case,
            "terminated": self.terminated,
            "steps": self.steps,
            "turn_abcd_deg": math.degrees(self.turn_abcd),
            "turn_a_gamma_d_deg": None if self.turn_a_gamma_d is None
            else math.degrees(self.turn_a_gamma_d),
            "bound_ok": self.bound_ok,
            "gamma": None if self.gamma is None else self.gamma.to_json_dict(),
        }


def _closed_triangle_contains(tri, p, eps):
    """p inside or on the (possibly degenerate) hull of <= 3 straight points."""
    hull = netmod._monotone_chain(tri)
    if len(hull) >= 3:
        for i in range(len(hull)):
            a, b = hull[i], hull[(i + 1) % len(hull)]
            if (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) < -eps:
                return False
        return True
    if len(hull) == 2:
        a, b = hull
        dx, dy = b[0] - a[0], b[1] - a[1]
        ln2 = dx * dx + dy * dy
        t = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / ln2
        t = max(0.0, min(1.0, t))
        cx, cy = a[0] + t * dx, a[1] + t * dy
        return math.hypot(p[0] - cx, p[1] - cy) <= eps
    return math.hypot(p[0] - hull[0][0], p[1] - hull[0][1]) <= eps


def escape_path(net: netmod.Net, a, u, b, v, c, w, d,
                tol: float = netmod.DEFAULT_BALANCE_TOL) -> EscapeCertificate:
    """Build the right-turning path from u toward w that avoids v, and
    certify the 60-degree turn bound for the corner a,u,b,v,c,w,d.

    a, b, c, d are directed edges with a into u, b = (u, v), c = (v, w),
    d out of w."""
    if net.surface.kind == surfaces.SPHERICAL:
        raise UnsupportedSurface("escape paths are defined on flat/hyperbolic nets")
    a, b, c, d = tuple(a), tuple(b), tuple(c), tuple(d)
    for name, e in (("a", a), ("b", b), ("c", c), ("d", d)):
        if not net.has_edge(*e):
            raise PreconditionViolated("edges-exist", f"{name}={e} is not a net edge")
    if a[1] != u or b != (u, v) or c != (v, w) or d[0] != w:
        raise PreconditionViolated("path-order", "edges do not trace a,u,b,v,c,w,d")
    if a == reverse(b):
        raise PreconditionViolated("a-not-minus-b")
    if d == reverse(c):
        raise PreconditionViolated("c-not-minus-d")
    report = netmod.classify_vertices(net, tol)
    for name, vid in (("u", u), ("w", w)):
        if not report.entries[vid].balanced:
            raise PreconditionViolated(f"{name}-balanced",
                                       f"imbalance {report.entries[vid].norm:.3g}")
    rot_u = net.rotation(u)
    if rot_u[(rot_u.index(a[0]) + 1) % len(rot_u)] != v:
        raise PreconditionViolated("first-right-turn-at-u")
    rot_w = net.rotation(w)
    if rot_w[(rot_w.index(v) + 1) % len(rot_w)] != d[1]:
        raise PreconditionViolated("first-right-turn-at-w")
    coords = {vid: surfaces.straight_coords(net.point(vid)) for vid in net.vertices}
    tri = [coords[u], coords[v], coords[w]]
    for vid in report.unbalanced_ids:
        if vid == v:
            continue
        if _closed_triangle_contains(tri, coords[vid], eps=tol):
            raise PreconditionViolated("hull-free-of-unbalanced", vid)

    turn_abcd = (turn_angle(net, a, b) + turn_angle(net, b, c)
                 + turn_angle(net, c, d))
    is_flat = net.surface.kind == surfaces.FLAT
    bound = math.pi / 3.0 + tol

    if u == w:
        gamma = Walk(net, [b, c])
        cert_turn = netmod.combined_angle(net, u, v).combined - math.pi
        return EscapeCertificate("u-equals-w", gamma, True, 0, turn_abcd, cert_turn,
                                 (cert_turn <= bound) if is_flat else None)
    if turn_angle(net, b, c) <= 0.0:
        gamma = Walk(net, [b, c])
        return EscapeCertificate("nonpositive-at-v", gamma, True, 0, turn_abcd,
                                 turn_abcd, (turn_abcd <= bound) if is_flat else None)

    # second right turn at u, counting from a
    out0 = rot_u[(rot_u.index(a[0]) + 2) % len(rot_u)]
    gamma_edges = [(u, out0)]
    steps = 0
    guard = 4 * len(net.edges)
    case = None
    while True:
        steps += 1
        x, y = gamma_edges[-1]
        if y == w:
            case = "reached-w"
            break
        if not _closed_triangle_contains(tri, coords[y], eps=tol):
            case = "left-hull"
            break
        if y == v or not report.entries[y].balanced:
            raise PreconditionViolated("hull-free-of-unbalanced",
                                       f"walk reached non-balanced interior vertex {y}")
        rot = net.rotation(y)
        idx = rot.index(x)
        nxt = rot[(idx + 1) % len(rot)]
        if nxt == v:
            nxt = rot[(idx + 2) % len(rot)]
        gamma_edges.append((y, nxt))
        if steps > guard:
            gamma = Walk(net, gamma_edges)
            return EscapeCertificate("guard-exceeded", gamma, False, steps,
                                     turn_abcd, None, None)
    gamma = Walk(net, gamma_edges)
    turn_agd = None
    bound_ok = None
    if case == "reached-w":
        full = Walk(net, [a] + gamma_edges + [d])
        turn_agd = full.turn_sum()
        if is_flat:
            bound_ok = turn_abcd <= bound
    return EscapeCertificate(case, gamma, True, steps, turn_abcd, turn_agd, bound_ok)


# ---------------------------------------------------------------------------
# conditional path independence of the turn angle (flat plane)
# ---------------------------------------------------------------------------

def conditional_path_independence_check(net: netmod.Net, path1: Walk, path2: Walk,
                                        e, f, tol: float = 1e-9) -> bool:
    """Check the hypotheses of conditional path independence and then that
    the turn angle from e to f agrees along e*path1*f and e*path2*f."""
    if net.surface.kind != surfaces.FLAT:
        raise UnsupportedSurface("conditional path independence is a flat-plane fact")
    e, f = tuple(e), tuple(f)
    failing = []
    u1, v1 = path1.edges[0][0], path1.edges[-1][1]
    u2, v2 = path2.edges[0][0], path2.edges[-1][1]
    if (u1, v1) != (u2, v2):
        raise ConditionsNotMet(["shared-endpoints"])
    if e[1] != u1 or f[0] != v1:
        raise ConditionsNotMet(["e-into-u-f-out-of-v"])

    # (a) e and f lie outside the closed curve and share no endpoints
    if {e[0], e[1]} & {f[0], f[1]}:
        failing.append("a: e and f share an endpoint")
    loop_edges = path1.edges + [reverse(x) for x in reversed(path2.edges)]
    segs = []
    for uu, vv in loop_edges:
        segs.append((surfaces.straight_coords(net.point(uu)),
                     surfaces.straight_coords(net.point(vv))))
    xs = [p[0] for p, _ in segs] + [q[0] for _, q in segs]
    ys = [p[1] for p, _ in segs] + [q[1] for _, q in segs]
    diam = max(max(xs) - min(xs), max(ys) - min(ys), 1e-9)
    for name, ed in (("e", e), ("f", f)):
        p = surfaces.straight_coords(net.point(ed[0]))
        q = surfaces.straight_coords(net.point(ed[1]))
        mid = ((p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0)
        if not _in_unbounded(segs, mid, diam):
            failing.append(f"a: {name} lies inside the closed curve")

    # (b) each path simple apart from admissible backtracks
    for name, pw in (("path1", path1), ("path2", path2)):
        cls = classify(pw)
        if any(not bt.admissible for bt in cls.backtracks) or cls.meetings:
            failing.append(f"b: {name} is not simple-modulo-admissible-backtracks")

    # (c) mutual meetings away from the endpoints are non-transversal
    combined = Walk(net, loop_edges)
    ccls = classify(combined)
    n1 = len(path1.edges)
    for meet in ccls.meetings:
        i, j = meet.junctions
        if {i, j} & {0, n1}:
            continue  # endpoint junctions
        same_half = (i < n1) == (j < n1)
        if same_half:
            continue  # internal to one path, already covered by (b)
        if not meet.non_transversal:
            failing.append(f"c: transversal meeting at junctions {meet.junctions}")

    if failing:
        raise ConditionsNotMet(failing)

    t1 = Walk(net, [e] + path1.edges + [f]).turn_sum()
    t2 = Walk(net, [e] + path2.edges + [f]).turn_sum()
    return abs(t1 - t2) <= tol
