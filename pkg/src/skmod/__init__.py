"""Reaction-network kinetics toolkit.

Parse reaction networks, build their kinetic independence graphs, decompose
the undirected graph into junction-tree modularizations, validate the
independence conditions behind each module, and check everything against an
exact stochastic simulator with likelihood and path-reconstruction oracles.
"""

__version__ = "0.1.0"

from .chordal import (
    JunctionTree,
    Triangulation,
    aggregate,
    build_clique_tree,
    clique_tree,
    cliques_rip,
    is_chordal,
    minimal_triangulation,
    mpd,
    perfect_elimination_order,
    verify_junction_tree,
)
from .errors import (
    ExplosionError,
    GraphError,
    NetworkError,
    NotChordalError,
    ParseError,
    PartitionError,
    PathConsistencyError,
    RIPOrderError,
    SimulationError,
    SkmodError,
    TreeError,
    UnknownReactionError,
    UnknownSpeciesError,
)
from .graphs import (
    DirectedGraph,
    chemical_separated,
    UndirectedGraph,
    build_kig,
    closure,
    fraternize,
    is_separated,
    local_independence_report,
    moralize,
    undirected,
)
from .modular import (
    CopyMove,
    Modularization,
    ModuleReport,
    copy_species,
    derive_modularization,
    validate_modularization,
)
from .network import (
    Finding,
    PartitionABD,
    Reaction,
    ReactionClass,
    ReactionNetwork,
    Species,
    ValidationReport,
    changed_reactions,
    check_history_equality,
    check_ident_consumption,
    check_standard,
    dstar_partition,
    normalize_condition_iv,
    refinement_check,
    subprocess_partition,
)
from .parse import (
    network_from_json,
    network_to_json,
    parse_network,
    serialize_network,
)
from .session import Session
from .simulate import (
    LogLikelihoodBreakdown,
    PathComponent,
    SubprocessPath,
    Trajectory,
    conditional_projection_test,
    likelihood_groups,
    log_likelihood,
    poisson_reference_simulate,
    project_dstar,
    project_subprocess,
    propensity,
    reconstruct_reaction_paths,
    relay_network,
    replica_statistics,
    run_replicas,
    simulate,
    state_at,
    truncate,
)
