"""Verified nonautonomous horseshoes for planar map sequences.

The library checks the Conley-Moser strip and cone conditions (A1, A3,
and the derived width contraction A2) for a sequence of maps, builds
the symbolic dynamics they certify, and approximates the time-n slices
of the chaotic invariant set by refining admissible words to points.
The built-in instance is a Henon family with a sinusoidally modulated
parameter.
"""

from .cones import (
    A1Report,
    ConeParams,
    ConeReport,
    ContractionBounds,
    ContractionMeasurement,
    check_a1,
    check_a3_grid,
    check_sector_point,
    derive_contraction,
    measure_contraction,
)
from .curves import (
    ConvergenceError,
    DomainBox,
    LipschitzCurve,
    Orientation,
    Point2,
    Strip,
    curve_intersection,
    intersects_fully,
    nested_limit,
    strip_width,
)
from .geometry import (
    DegenerateGeometryError,
    HenonGeometry,
    InequalityRow,
    build_geometry,
    check_domain_inequalities,
    sector_threshold,
    strip_separation_check,
)
from .invariant import (
    LambdaApproximation,
    LambdaPoint,
    SurvivorCloud,
    approximate_lambda,
    brute_force_survivors,
    directed_hausdorff,
)
from .maps import HenonParams, HenonSequence, MapSequence, henon_sequence
from .refine import RefinementError, pull_back_vertical, push_forward_horizontal
from .symbolic import (
    Itinerary,
    TransitionMatrixSeq,
    compute_transition_matrix,
    conjugacy_residual,
    enumerate_words,
    is_admissible,
    itinerary_to_point,
    refine_horizontal,
    refine_vertical,
    shift_word,
    unshift_word,
)

__version__ = "0.1.0"

__all__ = [
    "A1Report",
    "ConeParams",
    "ConeReport",
    "ContractionBounds",
    "ContractionMeasurement",
    "ConvergenceError",
    "DegenerateGeometryError",
    "DomainBox",
    "HenonGeometry",
    "HenonParams",
    "HenonSequence",
    "InequalityRow",
    "Itinerary",
    "LambdaApproximation",
    "LambdaPoint",
    "LipschitzCurve",
    "MapSequence",
    "Orientation",
    "Point2",
    "RefinementError",
    "Strip",
    "SurvivorCloud",
    "TransitionMatrixSeq",
    "approximate_lambda",
    "brute_force_survivors",
    "build_geometry",
    "check_a1",
    "check_a3_grid",
    "check_domain_inequalities",
    "check_sector_point",
    "compute_transition_matrix",
    "conjugacy_residual",
    "curve_intersection",
    "derive_contraction",
    "directed_hausdorff",
    "enumerate_words",
    "henon_sequence",
    "intersects_fully",
    "is_admissible",
    "itinerary_to_point",
    "measure_contraction",
    "nested_limit",
    "pull_back_vertical",
    "push_forward_horizontal",
    "refine_horizontal",
    "refine_vertical",
    "sector_threshold",
    "shift_word",
    "strip_separation_check",
    "strip_width",
    "unshift_word",
]
