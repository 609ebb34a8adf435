"""Command-line front end: verify / relax / construct / circumference /
render / search / lemmas.

Exit codes: 0 pass, 1 verification failure, 2 usage or schema error."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import constructions, netfile, render, staircase, surfaces, walks
from .relaxation import RelaxParams, relax as _relax, search_counterexamples
from . import net as netmod
from .errors import GnetError, NetInvariantViolated, SchemaError, UnsupportedSurface
from .net import DEFAULT_BALANCE_TOL


def _surface_from_args(args) -> surfaces.SurfaceModel:
    kind = args.surface
    if kind == "flat":
        return surfaces.flat()
    curvature = args.curvature
    if kind == "hyperbolic":
        return surfaces.hyperbolic(curvature if curvature is not None else -1.0)
    return surfaces.spherical(curvature if curvature is not None else 1.0)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def run_verification(net, tol: float):
    """All applicable balance / angle / walk checks; list of (name, ok, detail)."""
    checks = []
    report = netmod.classify_vertices(net, tol)
    checks.append(("classification", True,
                   f"{report.n_balanced} balanced / {report.n_unbalanced} unbalanced"))

    bad = []
    for vid in report.balanced_ids:
        lr = netmod.check_local_lemmas(net, vid, tol)
        if not lr.ok:
            bad.append((vid, lr.violations))
    checks.append(("local-angle-lemmas", not bad, f"violations: {bad[:5]}" if bad else
                   f"checked {report.n_balanced} balanced vertices"))

    if net.surface.kind != surfaces.SPHERICAL:
        hull = netmod.convex_hull_check(net, tol)
        checks.append(("convex-hull", hull.ok,
                       f"violations: {hull.violations[:5]}" if not hull.ok else
                       "balanced vertices strictly inside the unbalanced hull"))
        try:
            circ = walks.circumference(net)
            cls = walks.classify(circ)
            ok_es = cls.essentially_simple and cls.counterclockwise is True
            checks.append(("circumference-essentially-simple", ok_es,
                           f"{len(circ.edges)} edges"))
            balanced_set = set(report.balanced_ids)
            checks.append(("circumference-balanced-turns-negative",
                           _balanced_turns_negative(circ, balanced_set), ""))
            touches = any(v in set(report.unbalanced_ids) for v in circ.vertices())
            need = report.n_balanced >= 1
            checks.append(("circumference-contains-unbalanced",
                           touches or not need, ""))
            if ok_es:
                res = walks.gauss_bonnet_residual(circ, cls)
                if net.surface.kind == surfaces.FLAT:
                    gb_ok = abs(res) <= 1e-8
                else:
                    gb_ok = res >= -1e-8
                checks.append(("gauss-bonnet-circumference", gb_ok,
                               f"residual {math.degrees(res):.3e} deg"))
        except NetInvariantViolated as exc:
            checks.append(("circumference", False, str(exc)))

    expect = net.meta.get("expected") if net.meta else None
    if isinstance(expect, dict):
        ok = (expect.get("balanced", report.n_balanced) == report.n_balanced
              and expect.get("unbalanced", report.n_unbalanced) == report.n_unbalanced)
        checks.append(("matches-stored-expectation", ok,
                       f"stored {expect}, computed {report.n_balanced}/{report.n_unbalanced}"))
    return checks, report


def _balanced_turns_negative(circ, balanced_set) -> bool:
    n = len(circ.edges)
    for i in range(n):
        vertex = circ.edges[i][0]
        if vertex in balanced_set:
            turn = circ.turns[(i - 1) % n]
            if turn >= 1e-12:
                return False
    return True


def _cmd_verify(args) -> int:
    net = netfile.load(args.net, tol=args.tol)
    checks, report = run_verification(net, args.tol)
    if args.report == "json":
        payload = {
            "checks": [{"name": n, "ok": ok, "detail": d} for n, ok, d in checks],
            "imbalance": report.to_json_dict(),
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for name, ok, detail in checks:
            print(f"{'PASS' if ok else 'FAIL'} {name}" + (f"  ({detail})" if detail else ""))
    return 0 if all(ok for _, ok, _ in checks) else 1


# ---------------------------------------------------------------------------
# relax / construct / circumference / render
# ---------------------------------------------------------------------------

def _cmd_relax(args) -> int:
    net = netfile.load(args.net, tol=args.tol)
    params = RelaxParams(max_iters=args.max_iters, step_rule=args.step_rule,
                     step_size=args.step_size, grad_tol=args.grad_tol)
    relaxed, report = _relax(net, params)
    if args.output:
        netfile.save(relaxed, args.output)
    print(json.dumps({
        "converged": report.converged, "iterations": report.iters,
        "initial_length": report.initial_length, "final_length": report.final_length,
        "max_imbalance": report.final_max_imbalance,
    }, indent=2, sort_keys=True))
    return 0


def _print_census(cen) -> None:
    print(json.dumps(cen.to_json_dict(), indent=2, sort_keys=True))


def _cmd_construct(args) -> int:
    if args.what == "fermat":
        surface = _surface_from_args(args)
        vals = [float(x) for x in args.leaves.split(",")]
        if len(vals) != 6:
            raise SchemaError("--leaves", "expected x1,y1,x2,y2,x3,y3")
        leaves = [surfaces.Point(surface, vals[0], vals[1]),
                  surfaces.Point(surface, vals[2], vals[3]),
                  surfaces.Point(surface, vals[4], vals[5])]
        net = constructions.build_fermat_net(leaves)
        cen = constructions.census(net, args.tol)
    elif args.what == "fig2":
        params = constructions.Fig2Params(args.R, args.r, args.d)
        net, cen = constructions.build_fig2_net(params, tol=args.tol)
    else:
        if args.sweep:
            rows = constructions.hemisphere_sweep(args.sweep)
            for row in rows:
                print(json.dumps(row, sort_keys=True))
            return 0
        net, cen = constructions.build_hemisphere_net(lift=args.lift, tol=args.tol)
    if args.output:
        netfile.save(net, args.output)
    if args.census or not args.output:
        _print_census(cen)
    return 0


def _cmd_circumference(args) -> int:
    net = netfile.load(args.net, tol=args.tol)
    circ = walks.circumference(net)
    cls = walks.classify(circ)
    payload = circ.to_json_dict()
    payload["classification"] = cls.to_json_dict()
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _cmd_render(args) -> int:
    net = netfile.load(args.net, tol=args.tol)
    svg = render.render_svg(net, width=args.width, tol=args.tol,
                            imbalance_glyphs=args.imbalance_glyphs)
    with open(args.output, "w") as fh:
        fh.write(svg)
        fh.write("\n")
    print(f"wrote {args.output}")
    return 0


# ---------------------------------------------------------------------------
# search / lemmas
# ---------------------------------------------------------------------------

def _cmd_search(args) -> int:
    surface = _surface_from_args(args)
    workers = args.workers or int(os.environ.get("GNET_THREADS", "1") or "1")
    report = search_counterexamples(
        args.unbalanced, args.trials, seed=args.seed, surface=surface,
        stream=args.stream, workers=workers)
    print(json.dumps(report.to_json_dict(), indent=2, sort_keys=True))
    return 0


def _cmd_lemmas(args) -> int:
    if args.which == "combined":
        degrees = tuple(range(args.min_degree, args.max_degree + 1))
        rep = netmod.combined_angle_suite(args.samples, degrees=degrees, seed=args.seed)
        even = netmod.even_degree_counterexample_search(args.even_restarts, seed=args.seed)
        print(json.dumps({
            "samples": rep.samples, "violations": rep.violations,
            "special_cases": rep.special_cases,
            "max_combined_deg": {str(k): math.degrees(v)
                                 for k, v in rep.max_combined_by_degree.items()},
            "even_search": {"restarts": even.restarts,
                            "best_combined_deg": math.degrees(even.best_combined),
                            "counterexamples": even.counterexamples},
        }, indent=2, sort_keys=True))
        return 0 if rep.ok and even.ok else 1
    if args.which == "staircase":
        mc = staircase.arc_fact_monte_carlo(args.samples, seed=args.seed)
        sw_total = sw_fail = 0
        rng = np.random.default_rng(args.seed + 1)
        while sw_total < args.sum_walks:
            deg = int(rng.choice([5, 7, 9]))
            got = staircase.generate_special_config(deg, rng)
            if got is None:
                continue
            rep = staircase.sum_walk_verify(*got)
            sw_total += 1
            sw_fail += 0 if rep.ok else 1
        print(json.dumps({
            "arc_trials": mc.trials, "arc_violations": mc.violations,
            "sum_walks": sw_total, "sum_walk_failures": sw_fail,
        }, indent=2, sort_keys=True))
        return 0 if mc.ok and sw_fail == 0 else 1
    # first/second turn lemma sampling over random balanced stars
    rng = np.random.default_rng(args.seed)
    f = surfaces.flat()
    first_bad = second_bad = seconds_positive = 0
    for _ in range(args.samples):
        deg = int(rng.integers(3, 10))
        dirs = netmod.random_balanced_directions(deg, rng)
        star = netmod.star_net(f, dirs)
        rot = star.rotation("o")
        for i, inc in enumerate(rot):
            first = rot[(i + 1) % deg]
            second = rot[(i + 2) % deg]
            t1 = walks.turn_angle(star, (inc, "o"), ("o", first))
            if t1 >= 0.0:
                first_bad += 1
            t2 = walks.turn_angle(star, (inc, "o"), ("o", second))
            # degree-4 second turns are exactly zero; rounding noise is not
            # the lemma's "positive turn angle"
            if t2 > 1e-12:
                seconds_positive += 1
                flank1 = t1
                flank2 = walks.turn_angle(star, (first, "o"), ("o", second))
                ok = (t2 <= math.pi / 3.0 + 1e-9
                      and -2.0 * math.pi / 3.0 < flank1 <= -math.pi / 3.0 + 1e-9
                      and -2.0 * math.pi / 3.0 < flank2 <= -math.pi / 3.0 + 1e-9)
                if not ok:
                    second_bad += 1
    print(json.dumps({
        "samples": args.samples, "first_turn_violations": first_bad,
        "second_turn_positive_cases": seconds_positive,
        "second_turn_violations": second_bad,
    }, indent=2, sort_keys=True))
    return 0 if first_bad == 0 and second_bad == 0 else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gnet",
        description="Geodesic nets on constant-curvature planes: verify, relax, "
                    "construct, render, search.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_tol(p):
        p.add_argument("--tol", type=float, default=DEFAULT_BALANCE_TOL,
                       help="balance / geometry tolerance")

    p = sub.add_parser("verify", help="run every applicable balance and walk check")
    p.add_argument("net")
    add_tol(p)
    p.add_argument("--report", choices=("text", "json"), default="text")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("relax", help="minimize total length over free vertices")
    p.add_argument("net")
    add_tol(p)
    p.add_argument("--output", "-o")
    p.add_argument("--grad-tol", type=float, default=1e-10, dest="grad_tol")
    p.add_argument("--max-iters", type=int, default=4000, dest="max_iters")
    p.add_argument("--step-rule", choices=("backtracking", "fixed"),
                   default="backtracking", dest="step_rule")
    p.add_argument("--step-size", type=float, default=1.0, dest="step_size")
    p.set_defaults(func=_cmd_relax)

    p = sub.add_parser("construct", help="build one of the explicit nets")
    p.add_argument("what", choices=("fermat", "fig2", "hemisphere"))
    add_tol(p)
    p.add_argument("--output", "-o")
    p.add_argument("--census", action="store_true",
                   help="print the degree / balance table")
    p.add_argument("--leaves", default="1,0,-0.5,0.8,-0.5,-0.8",
                   help="fermat: x1,y1,x2,y2,x3,y3")
    p.add_argument("--surface", choices=("flat", "hyperbolic"), default="flat")
    p.add_argument("--curvature", type=float, default=None)
    p.add_argument("--R", type=float, default=2.0, help="fig2 large arc radius")
    p.add_argument("--r", type=float, default=1.0, help="fig2 small arc radius")
    p.add_argument("--d", type=float, default=5.0, help="fig2 centre separation")
    p.add_argument("--lift", type=float, default=0.0,
                   help="hemisphere: raise the spoke feet above the equator")
    p.add_argument("--sweep", type=int, default=0,
                   help="hemisphere: sweep triangle latitude, print curvature mass table")
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("circumference", help="boundary walk of the unbounded face")
    p.add_argument("net")
    add_tol(p)
    p.set_defaults(func=_cmd_circumference)

    p = sub.add_parser("render", help="write an SVG picture of a net")
    p.add_argument("net")
    add_tol(p)
    p.add_argument("--output", "-o", required=True)
    p.add_argument("--width", type=int, default=720)
    p.add_argument("--imbalance-glyphs", action="store_true", dest="imbalance_glyphs")
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("search", help="randomized relaxation search for balanced counts")
    p.add_argument("--unbalanced", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--surface", choices=("flat", "hyperbolic"), default="flat")
    p.add_argument("--curvature", type=float, default=None)
    p.add_argument("--stream", help="write one JSON line per trial to this file")
    p.add_argument("--workers", type=int, default=0,
                   help="parallel workers (default: GNET_THREADS or 1)")
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("lemmas", help="bulk numerical checks of the angle lemmas")
    p.add_argument("which", choices=("combined", "staircase", "turn"))
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-degree", type=int, default=3, dest="min_degree")
    p.add_argument("--max-degree", type=int, default=9, dest="max_degree")
    p.add_argument("--even-restarts", type=int, default=20000, dest="even_restarts")
    p.add_argument("--sum-walks", type=int, default=200, dest="sum_walks")
    p.set_defaults(func=_cmd_lemmas)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, NetInvariantViolated) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except UnsupportedSurface as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GnetError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
