"""Sensor placement analysis for road networks with turning ratios.

Given a two-way road network, its centroids (vertices that inject or
absorb traffic) and a set of monitored intersections, flowscope decides
whether the observations pin down every flow in the network, explains
which unmonitored regions fail and why, and reconstructs the complete
flow state when the placement suffices.
"""

from .conditions import (
    ComponentDiagnosis,
    CutWitness,
    DiagnosisReport,
    Verdict,
    diagnose,
    explain_component,
    is_tree,
    legacy_count_condition,
    min_vertex_cut,
)
from .document import (
    NetworkDocument,
    document_from_parts,
    load_document,
    parse_document,
    save_document,
    serialize_document,
)
from .errors import (
    CanonicalArcError,
    CentroidPresentError,
    ConservationError,
    DocumentError,
    FlowscopeError,
    InconsistentObservationsError,
    InconsistentSystemError,
    InvalidCutError,
    NoConsistentFlowError,
    PairingConditionError,
    RankDeficientError,
    ScenarioError,
    SingularSystemError,
    UnderdeterminedBoundaryError,
    ValidationError,
    ZeroReferenceError,
)
from .flowsystem import (
    FlowSolution,
    FlowSystem,
    ObstructionReport,
    RankReport,
    Unknown,
    build_flow_system,
    canonical_arcs,
    component_block,
    incidence_matrix,
    rank_certify,
    rank_obstruction,
    reduced_matrix,
    solve_flow,
)
from .monitoring import (
    Placement,
    UnmonitoredComponent,
    adjacent_set,
    combined_cutset,
    deduced_outflow_totals,
    deducible_boundary,
    unmonitored_components,
    validate_placement,
)
from .network import (
    Arc,
    FlowState,
    RoadNetwork,
    check_flow_state,
    require_valid,
    turning_factor,
    validate_network,
)
from .scenarios import (
    ScenarioSpec,
    generate,
    observe,
    random_balancing,
    simulate_ground_truth,
)
from .treesolve import (
    CentroidPairing,
    PairedPath,
    TreeSolution,
    pair_centroids,
    solve_by_trees,
    solve_centroid_free_subtree,
    solve_tree_component,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
