"""Causal flow analysis for measurement geometries.

Decide whether a geometry (graph plus input and output vertex sets)
admits a causal flow, construct the flow and its measurement schedule,
generate the edge-maximal geometries saturating the gamma(n, k) bound,
and check at desk scale that found flows implement isometries for any
choice of measurement angles.
"""

from flowscope.geometry import (
    Digraph,
    Geometry,
    GeometryError,
    Graph,
    load_geometry,
    serialize_geometry,
)
from flowscope.flow import (
    AcyclicityResult,
    CausalFlow,
    FlowCheck,
    FlowDomainError,
    FlowFormatError,
    FlowSearchResult,
    InfluencingDigraph,
    NaturalPreorder,
    OracleBoundError,
    PathCover,
    PathCoverError,
    SuccessorFunction,
    acyclic_order,
    brute_force_flow,
    build_influencing_digraph,
    dump_flow,
    find_causal_flow,
    find_path_cover,
    flow_from_cover,
    load_flow,
    natural_preorder,
    verify_flow,
)
from flowscope.extremal import (
    ArcKind,
    ExtremalPartition,
    classify_arcs,
    count_connecting_edges,
    gamma,
    generate_extremal,
    lambda_labels,
    lex_acyclicity_certificate,
    observation_checks,
)
from flowscope.simulate import (
    LinearMap,
    MeasurementPattern,
    SimulationBoundError,
    ZeroMapError,
    draw_angles,
    isometry_defect,
    measurement_order,
    simulate_postselected,
)

__version__ = "0.1.0"

__all__ = [
    "AcyclicityResult",
    "ArcKind",
    "CausalFlow",
    "Digraph",
    "ExtremalPartition",
    "FlowCheck",
    "FlowDomainError",
    "FlowFormatError",
    "FlowSearchResult",
    "Geometry",
    "GeometryError",
    "Graph",
    "InfluencingDigraph",
    "LinearMap",
    "MeasurementPattern",
    "NaturalPreorder",
    "OracleBoundError",
    "PathCover",
    "PathCoverError",
    "SimulationBoundError",
    "SuccessorFunction",
    "ZeroMapError",
    "acyclic_order",
    "brute_force_flow",
    "build_influencing_digraph",
    "classify_arcs",
    "count_connecting_edges",
    "draw_angles",
    "dump_flow",
    "find_causal_flow",
    "find_path_cover",
    "flow_from_cover",
    "gamma",
    "generate_extremal",
    "isometry_defect",
    "lambda_labels",
    "lex_acyclicity_certificate",
    "load_flow",
    "load_geometry",
    "measurement_order",
    "natural_preorder",
    "observation_checks",
    "serialize_geometry",
    "simulate_postselected",
    "verify_flow",
]
