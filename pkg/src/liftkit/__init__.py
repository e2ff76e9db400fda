"""liftkit: path lifting, scalar derivative bounds, and global
inversion certificates for maps between metric spaces."""

__version__ = "0.1.0"

from .errors import (
    DegenerateInputError,
    DomainError,
    EvalDomainError,
    InputError,
    LiftkitError,
    NonConvergenceError,
    ParseError,
    SingularJacobianError,
)
from .geometry import (
    Box,
    CircleQuotient,
    Euclidean,
    ExpressionPath,
    FunctionPath,
    Loop,
    OpenSubset,
    Path,
    Point,
    ProductSpace,
    Sampled,
    Segment,
    Space,
    Torus,
    distance,
    path_length,
    points_equal,
    polyline,
    reparam_arclength,
    reverse_path,
    subset_from_expression,
)
from .mapdef import (
    MapHandle,
    expression_map,
    jacobian_at,
    local_solve,
    resolve_map,
)
from .sderiv import (
    ScalarDerivEstimate,
    SurjectionEstimate,
    d_pm_from_jacobian,
    scalar_derivatives,
    surjection_constant,
)
from .meanvalue import (
    BisectionCertificate,
    LengthBoundsReport,
    find_tau,
    length_bounds_report,
    mapped_path,
    split_inequality_slack,
)
from .lift import (
    ContinuationFailure,
    LiftNode,
    LiftOptions,
    LiftTrace,
    TraceAnalysis,
    Verdict,
    analyze_trace,
    lift_path,
)
from .hadamard import (
    AffineWeight,
    CertificateReport,
    ConstantWeight,
    DivergenceReport,
    ExpressionWeight,
    HadamardProfile,
    PowerWeight,
    TableWeight,
    Weight,
    WeightValidation,
    ball_infimum_profile,
    classify_divergence,
    validate_weight,
    weight_certificate,
    weight_from_profile,
)
from .globalinv import (
    FiberReport,
    QIBounds,
    fiber_enumerate,
    invert_at,
    path_battery,
    quasi_isometry_bounds,
    sheet_count,
)
from .implicit import (
    BranchReport,
    ImplicitOptions,
    ImplicitProblem,
    ImplicitTrace,
    branch_probe,
    davidenko_lift,
    implicit_eval,
)
from .registry import Registry, load_registry, parse_weight_spec
from .report import Report, load_schema, validate_report

__all__ = [
    "__version__",
    # errors
    "LiftkitError",
    "InputError",
    "ParseError",
    "DegenerateInputError",
    "DomainError",
    "EvalDomainError",
    "SingularJacobianError",
    "NonConvergenceError",
    # geometry
    "Space",
    "Euclidean",
    "CircleQuotient",
    "Torus",
    "ProductSpace",
    "OpenSubset",
    "Box",
    "Point",
    "Path",
    "Segment",
    "Sampled",
    "Loop",
    "ExpressionPath",
    "FunctionPath",
    "polyline",
    "distance",
    "points_equal",
    "path_length",
    "reparam_arclength",
    "reverse_path",
    "subset_from_expression",
    # maps
    "MapHandle",
    "expression_map",
    "resolve_map",
    "jacobian_at",
    "local_solve",
    # scalar derivatives
    "ScalarDerivEstimate",
    "SurjectionEstimate",
    "d_pm_from_jacobian",
    "scalar_derivatives",
    "surjection_constant",
    # mean value
    "BisectionCertificate",
    "LengthBoundsReport",
    "find_tau",
    "length_bounds_report",
    "mapped_path",
    "split_inequality_slack",
    # lifting
    "LiftOptions",
    "LiftNode",
    "LiftTrace",
    "Verdict",
    "TraceAnalysis",
    "ContinuationFailure",
    "lift_path",
    "analyze_trace",
    # hadamard
    "Weight",
    "ConstantWeight",
    "AffineWeight",
    "PowerWeight",
    "ExpressionWeight",
    "TableWeight",
    "WeightValidation",
    "HadamardProfile",
    "DivergenceReport",
    "CertificateReport",
    "validate_weight",
    "ball_infimum_profile",
    "weight_from_profile",
    "classify_divergence",
    "weight_certificate",
    # global inversion
    "FiberReport",
    "QIBounds",
    "invert_at",
    "fiber_enumerate",
    "sheet_count",
    "quasi_isometry_bounds",
    "path_battery",
    # implicit
    "ImplicitOptions",
    "ImplicitProblem",
    "ImplicitTrace",
    "BranchReport",
    "davidenko_lift",
    "implicit_eval",
    "branch_probe",
    # registry and reports
    "Registry",
    "load_registry",
    "parse_weight_spec",
    "Report",
    "load_schema",
    "validate_report",
]
