"""pgkit: matroids over finite fields, projective geometries and their projections.

Subsets of a ground set are int bitsets internally; public functions accept
any iterable of element identifiers.
"""

from .analysis import (
    Fullness,
    FullnessParams,
    GrowthRateOracle,
    critical_dichotomy_check,
    critical_elements,
    fullness,
    has_line_restriction,
    kung_bound_check,
    line_minor,
    lines_through,
    long_line_checks,
    matching_bound,
    pg_points,
)
from .errors import (
    AxiomViolation,
    NotAFlat,
    NotOverfull,
    NotSpanned,
    ParseError,
    PgkitError,
    PreconditionFailed,
    RankOutOfRange,
    ReplayError,
    ResourceExceeded,
    StructureViolation,
    UnknownElement,
    UnknownSuite,
    UnsupportedSize,
)
from .field import FieldElement, FieldSpec, field_make, field_of_order
from .geometry import (
    Projection,
    ProjectionSpec,
    ProjectiveGeometry,
    pg,
    principal_extension,
    project,
    spanning_flat,
    truncate,
)
from .harness import recheck, run_suite, suite_names
from .matching import contract_unstable_check, find_matching, find_unstable, is_unstable, skew_dense_subset
from .matroid import (
    FlatRef,
    LinearMatroid,
    Matroid,
    all_flats,
    closure,
    contract,
    delete,
    epsilon,
    flats_of_rank,
    is_modular_flat,
    is_modular_pair,
    local_connectivity,
    rank,
    simplify,
    skew,
)
from .roundness import dense_round_restriction, phi_bound_holds, weakly_round
from .serialize import ConstructionDocument, load, parse, replay, serialize
from .verdict import AnalysisVerdict

__version__ = "0.1.0"

__all__ = [
    "AnalysisVerdict",
    "AxiomViolation",
    "ConstructionDocument",
    "FieldElement",
    "FieldSpec",
    "FlatRef",
    "Fullness",
    "FullnessParams",
    "GrowthRateOracle",
    "LinearMatroid",
    "Matroid",
    "NotAFlat",
    "NotOverfull",
    "NotSpanned",
    "ParseError",
    "PgkitError",
    "PreconditionFailed",
    "Projection",
    "ProjectionSpec",
    "ProjectiveGeometry",
    "RankOutOfRange",
    "ReplayError",
    "ResourceExceeded",
    "StructureViolation",
    "UnknownElement",
    "UnknownSuite",
    "UnsupportedSize",
    "all_flats",
    "closure",
    "contract",
    "contract_unstable_check",
    "critical_dichotomy_check",
    "critical_elements",
    "delete",
    "dense_round_restriction",
    "epsilon",
    "field_make",
    "field_of_order",
    "find_matching",
    "find_unstable",
    "flats_of_rank",
    "fullness",
    "has_line_restriction",
    "is_modular_flat",
    "is_modular_pair",
    "is_unstable",
    "kung_bound_check",
    "line_minor",
    "lines_through",
    "load",
    "local_connectivity",
    "long_line_checks",
    "matching_bound",
    "parse",
    "pg",
    "pg_points",
    "phi_bound_holds",
    "principal_extension",
    "project",
    "rank",
    "recheck",
    "replay",
    "run_suite",
    "serialize",
    "simplify",
    "skew",
    "skew_dense_subset",
    "spanning_flat",
    "suite_names",
    "truncate",
    "weakly_round",
]
