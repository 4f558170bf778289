"""Curve similarity toolkit.

Retractable bottleneck morphings on the vertex-edge graph of the free-space
diagram, certified exact continuous Frechet distances via refinement and
simplification, and the sweep distance (an upper bound on continuous dynamic
time warping) with a matching grid lower bound.
"""

from .geometry import Curve, Segment, dist, nearest_on_segment
from .bottleneck import (
    RetractResult,
    retractable_path,
    retractable_path_with_node_weights,
)
from .discrete import (
    DiscreteMorphing,
    discrete_frechet_dp,
    retractable_discrete_frechet,
)
from .ve import (
    CellElevation,
    cell_elevation,
    cell_min_elevation,
    elevation_gradient,
    elevation_in_cell,
    min_lines,
    portal,
    ve_frechet,
    ve_successors,
)
from .morphing import (
    Morphing,
    backtrack_intervals,
    combine,
    is_monotone,
    monotonize,
    width,
)
from .simplify import (
    SimplificationProfile,
    SimplifiedCurve,
    combined_simplify,
    compute_profile,
    delta_simplify,
    extract,
    greedy_morphing,
    greedy_simplify,
    spine_morphing,
)
from .driver import (
    DistanceCertificate,
    EdgeWidths,
    SlackTable,
    bisector_refine,
    compute_slack_table,
    decide,
    frechet_approx,
    frechet_exact,
    frechet_exact_via_simplification,
    frechet_lower_bound_D,
    sensitive_simplify,
)
from .sweep import (
    QuadraticUnderRoot,
    SweepResult,
    cdtw_lower_bound,
    edge_price,
    integral_sqrt_quadratic,
    split,
    sweep_distance,
)
from .errors import (
    CurveParseError,
    DegenerateCurveError,
    FrechetError,
    NotReachableError,
)

__version__ = "0.1.0"
