"""Geodesic nets on constant-curvature planes.

Balance classification, combined-angle and turn-angle lemma verification,
staircase-region oracles, length-minimizing relaxation, randomized
counterexample search, and the explicit example nets, over flat, Poincare
disk and hemisphere charts."""

from .surfaces import (
    SurfaceModel, Point, TangentDir, GeodesicSegment,
    flat, hyperbolic, spherical,
    geodesic_connect, angle_ccw, polygon_area, point_at,
)
from .net import (
    Net, NetVertex, ImbalanceReport, CombinedAngle,
    imbalance, classify_vertices, combined_angle, check_local_lemmas,
    convex_hull_check, prune_irrelevant_edges, random_balanced_directions,
    star_net,
)
from .walks import (
    Walk, WalkClassification, turn_angle, classify, gauss_bonnet_residual,
    circumference, escape_path, conditional_path_independence_check,
    walk_from_vertices,
)
from .staircase import (
    RegionLocation, in_region, arc_fact_check, arc_fact_monte_carlo,
    sum_walk_verify,
)
from .relaxation import (
    RelaxParams, RelaxReport, SearchReport, total_length, length_gradient,
    relax, fermat_point, search_counterexamples,
)
from .constructions import (
    Fig2Params, build_fermat_net, build_fig2_net, build_hemisphere_net,
    census,
)
from .netfile import load, save, net_to_dict, net_from_dict
from .render import render_svg

__version__ = "0.1.0"
