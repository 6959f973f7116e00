"""{p,q} hyperbolic lattices: layered construction, minimal-perimeter shapes,
exhaustive animal search, growth invariants and Poincare-disc drawings."""

from .asymptotics import (
    cheeger_constant,
    count_sequence,
    euler_characteristic,
    growth_function,
    series_coefficients,
    spectral,
)
from .embedding import DiscLattice, EmbeddingConfig, embed_ball
from .enumeration import (
    EnumerationTask,
    OracleResult,
    VisitCapExceeded,
    bounded_min_perimeter,
    brute_force_min_perimeter,
    enumerate_animals,
    oracle,
)
from .lattice import (
    HyperbolicityViolation,
    LatticeBall,
    LatticeParams,
    NonsenseParams,
    ResourceLimit,
    build_ball,
    layer_counts,
    perimeter,
    transfer_matrix,
    validate_params,
)
from .render import render_svg
from .shapes import Shape, build_minimal_shape, classify, minimal_perimeter_closed_form

__all__ = [
    "DiscLattice",
    "EmbeddingConfig",
    "EnumerationTask",
    "HyperbolicityViolation",
    "LatticeBall",
    "LatticeParams",
    "NonsenseParams",
    "OracleResult",
    "ResourceLimit",
    "Shape",
    "VisitCapExceeded",
    "bounded_min_perimeter",
    "brute_force_min_perimeter",
    "build_ball",
    "build_minimal_shape",
    "cheeger_constant",
    "classify",
    "count_sequence",
    "embed_ball",
    "enumerate_animals",
    "euler_characteristic",
    "growth_function",
    "layer_counts",
    "minimal_perimeter_closed_form",
    "oracle",
    "perimeter",
    "render_svg",
    "series_coefficients",
    "spectral",
    "transfer_matrix",
    "validate_params",
]
