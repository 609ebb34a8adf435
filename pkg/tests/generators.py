"""Constructed nets and configuration solvers shared by the walk tests."""

import itertools
import math

import numpy as np

from gnet import net as N
from gnet import surfaces as S
from gnet.surfaces import TWO_PI, wrap_angle

FLAT = S.flat()


def _in_arcs(theta, arcs, margin):
    t = wrap_angle(theta)
    for lo, hi in arcs:
        lo, hi = wrap_angle(lo), wrap_angle(hi)
        width = wrap_angle(hi - lo)
        off = wrap_angle(t - lo)
        if margin < off < width - margin:
            return True
    return False


def balance_with_extras(fixed_dirs, allowed_arcs, margin=math.radians(3.0),
                        grid_deg=4.0):
    """Find extra unit directions inside the allowed arcs so the whole set is
    exactly balanced.  Deterministic grid search over one or two free extras
    plus an exact closing pair."""
    fixed = [wrap_angle(t) for t in fixed_dirs]
    sx = sum(math.cos(t) for t in fixed)
    sy = sum(math.sin(t) for t in fixed)

    def closing_pair(tx, ty):
        norm = math.hypot(tx, ty)
        if norm > 2.0 - 1e-9:
            return None
        if norm < 1e-12:
            return None
        axis = math.atan2(ty, tx)
        delta = math.acos(norm / 2.0)
        return (axis - delta, axis + delta)

    grid = [math.radians(g) for g in np.arange(0.0, 360.0, grid_deg)]
    candidates = itertools.chain(
        [()],
        ((g,) for g in grid),
        ((g1, g2) for g1 in grid for g2 in grid if g1 <= g2),
    )
    for free in candidates:
        if not all(_in_arcs(g, allowed_arcs, margin) for g in free):
            continue
        tx = -sx - sum(math.cos(g) for g in free)
        ty = -sy - sum(math.sin(g) for g in free)
        pair = closing_pair(tx, ty)
        if pair is None:
            continue
        if not all(_in_arcs(p, allowed_arcs, margin) for p in pair):
            continue
        dirs = sorted(wrap_angle(t) for t in (*fixed, *free, *pair))
        gaps = [wrap_angle(dirs[(i + 1) % len(dirs)] - dirs[i]) for i in range(len(dirs))]
        if min(gaps) < math.radians(1.0):
            continue
        return sorted(wrap_angle(t) for t in (*free, *pair))
    raise RuntimeError("no balancing extras found")


def _leaf(xy, t, length):
    return (xy[0] + length * math.cos(t), xy[1] + length * math.sin(t))


def _add_spokes(verts, edges, base_id, base_xy, dirs, prefix, length=0.45):
    for i, t in enumerate(dirs):
        vid = f"{prefix}{i}"
        verts[vid] = (FLAT.point(*_leaf(base_xy, t, length)), True)
        edges.append((base_id, vid))


def _corner_common(c_turn_deg, w_step, gamma1_deg=250.0, with_uw_edge=True,
                   exit_len=None):
    """Escape-path corner with a(150), b(240) at u; the second right turn at
    u points along gamma1.  c turns by c_turn_deg at v."""
    alpha, beta, gamma1 = math.radians(150.0), math.radians(240.0), math.radians(gamma1_deg)
    u_xy = (0.0, 0.0)
    v_xy = _leaf(u_xy, beta, 0.9)
    c_dir = beta + math.radians(c_turn_deg)
    w_xy = _leaf(v_xy, c_dir, w_step)

    verts = {"u": (FLAT.point(*u_xy), False), "v": (FLAT.point(*v_xy), True),
             "w": (FLAT.point(*w_xy), False)}
    edges = [("u", "v"), ("v", "w")]
    _add_spokes(verts, edges, "u", u_xy, [alpha], "a")
    u_fixed = [alpha, beta]
    if with_uw_edge:
        edges.append(("u", "w"))
        u_fixed.append(math.atan2(w_xy[1], w_xy[0]))
    elif exit_len is not None:
        verts["q"] = (FLAT.point(*_leaf(u_xy, gamma1, exit_len)), True)
        edges.append(("u", "q"))
        u_fixed.append(gamma1)
    _add_spokes(verts, edges, "u", u_xy,
                balance_with_extras(u_fixed, [(u_fixed[-1], alpha)]), "ue")

    c_stub = math.atan2(v_xy[1] - w_xy[1], v_xy[0] - w_xy[0])
    d_dir = c_stub + math.radians(8.0)
    _add_spokes(verts, edges, "w", w_xy, [d_dir], "d")
    w_fixed = [c_stub, d_dir]
    if with_uw_edge:
        w_fixed.append(math.atan2(-w_xy[1], -w_xy[0]))
    _add_spokes(verts, edges, "w", w_xy,
                balance_with_extras(w_fixed, [(d_dir, c_stub)]), "we")

    net = N.Net(FLAT, verts, edges)
    net.validate()
    return net, ("a0", "u"), ("u", "v"), ("v", "w"), ("w", "d0")


def corner_reached_w():
    """Positive turn at v; the second right turn at u is the edge to w."""
    return _corner_common(c_turn_deg=26.9, w_step=1.4, with_uw_edge=True)


def corner_left_hull():
    """Positive turn at v; the second right turn at u exits the hull."""
    return _corner_common(c_turn_deg=15.0, w_step=1.2, with_uw_edge=False,
                          exit_len=0.25)


def corner_nonpositive():
    """u, v, w collinear: the turn from b to c at v is exactly zero."""
    return _corner_common(c_turn_deg=0.0, w_step=1.1, with_uw_edge=False)


def random_spur_polygon(rng, n_min=5, n_max=10, spurs_max=2):
    """Star-convex flat polygon walk, optionally with outward spur edges that
    the walk backtracks along (each an admissible backtrack)."""
    n = int(rng.integers(n_min, n_max + 1))
    angles = np.sort(rng.uniform(0.0, TWO_PI, size=n))
    gaps = np.diff(np.concatenate([angles, [angles[0] + TWO_PI]]))
    # the origin must sit inside, otherwise sorted angles need not be ccw
    if gaps.min() < 0.12 or gaps.max() >= math.pi - 0.05:
        return None
    radii = rng.uniform(0.6, 1.8, size=n)
    pts = [(r * math.cos(a), r * math.sin(a)) for a, r in zip(angles, radii)]
    verts = {f"p{i}": (FLAT.point(*p), True) for i, p in enumerate(pts)}
    edges = [(f"p{i}", f"p{(i + 1) % n}") for i in range(n)]

    spur_at = sorted(rng.choice(n, size=int(rng.integers(0, spurs_max + 1)),
                                replace=False).tolist())
    for k, i in enumerate(spur_at):
        # spur pointing outward, i.e. right of the ccw boundary walk
        x, y = pts[i]
        out = math.atan2(y, x) + rng.uniform(-0.2, 0.2)
        verts[f"s{k}"] = (FLAT.point(x + 0.5 * math.cos(out), y + 0.5 * math.sin(out)), True)
        edges.append((f"p{i}", f"s{k}"))

    net = N.Net(FLAT, verts, edges)
    walk_edges = []
    for i in range(n):
        if i in spur_at:
            k = spur_at.index(i)
            walk_edges.append((f"p{i}", f"s{k}"))
            walk_edges.append((f"s{k}", f"p{i}"))
        walk_edges.append((f"p{i}", f"p{(i + 1) % n}"))
    return net, walk_edges


def random_hyperbolic_polygon(rng, curvature=-1.0, n_min=3, n_max=7):
    """Simple geodesic polygon on the disk, built star-convex in Klein
    coordinates (counterclockwise)."""
    surface = S.hyperbolic(curvature)
    n = int(rng.integers(n_min, n_max + 1))
    angles = np.sort(rng.uniform(0.0, TWO_PI, size=n))
    gaps = np.diff(np.concatenate([angles, [angles[0] + TWO_PI]]))
    if gaps.min() < 0.15 or gaps.max() >= math.pi - 0.05:
        return None
    radii = rng.uniform(0.25, 0.8, size=n)
    pts = []
    for a, r in zip(angles, radii):
        pts.append(S.from_straight(surface, (r * math.cos(a), r * math.sin(a))))
    verts = {f"p{i}": (p, True) for i, p in enumerate(pts)}
    edges = [(f"p{i}", f"p{(i + 1) % n}") for i in range(n)]
    net = N.Net(surface, verts, edges)
    walk = [(f"p{i}", f"p{(i + 1) % n}") for i in range(n)]
    return net, walk
